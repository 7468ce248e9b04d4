#pragma once

#include "fmo/parse.hpp"
#include "lexer.hpp"

namespace fmo {

// Recursive-descent type parser over a shared token stream, so that the term
// parser can embed type annotations.
class TypeParser {
 public:
  TypeParser(Lexer& lexer, const TypeAliases& aliases) : lx_(lexer), aliases_(aliases) {}

  Type parse_type();       // arrows, seq, binders
  Type parse_seq_level();  // no top-level arrow
  Type parse_app_level();  // application of atoms only
  Type parse_prefix();     // one atom, possibly under ? or !
  Kind parse_kind();

  bool starts_atom() const;

 private:
  bool at_binder() const;
  Type parse_binder();
  Type parse_seq();
  Type parse_atom();
  Type parse_labelled(const char* close, int which);
  Kind parse_kind_atom();

  Lexer& lx_;
  const TypeAliases& aliases_;
};

}  // namespace fmo
