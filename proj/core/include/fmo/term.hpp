#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fmo/parse.hpp"
#include "fmo/type.hpp"

namespace fmo {

enum class TermTag : std::uint8_t {
  Const, Var, Endpoint, Abs, Rec, TAbs, App, TApp, Record, LetRecord, Let, Variant, Case, Match
};

enum class ConstName : std::uint8_t { Receive, Send, Select, Close, Fork, New };

const char* const_name(ConstName c);

// Immutable, structurally shared term tree.
//
// Children by tag:
//   Abs, Rec, TAbs        kid(0) body
//   App                   kid(0) function, kid(1) argument
//   TApp, Variant         kid(0) operand
//   Record                kid(i) field labels()[i]
//   LetRecord             kid(0) scrutinee, kid(1) body; labels()[i] bound to binders()[i]
//   Let                   kid(0) bound term, kid(1) body
//   Case, Match           kid(0) scrutinee, kid(i+1) handler for labels()[i]
class Term {
 public:
  Term() = default;

  static Term constant(ConstName c);
  static Term select(std::string label, Type choice);
  static Term var(std::string name);
  static Term endpoint(std::string name);
  static Term abs(std::string binder, Type type, Term body, bool unrestricted = false);
  static Term rec(std::string binder, Type type, Term body);
  static Term tabs(std::string binder, Kind kind, Term body);
  static Term app(Term fun, Term arg);
  static Term tapp(Term fun, Type arg);
  static Term record(std::vector<std::pair<std::string, Term>> fields);
  static Term let_record(std::vector<std::pair<std::string, std::string>> binders, Term scrutinee,
                         Term body);
  static Term let(std::string binder, Term bound, Term body);
  static Term variant(std::string label, Term payload, Type type);
  static Term case_of(Term scrutinee, std::vector<std::pair<std::string, Term>> handlers);
  static Term match(Term scrutinee, std::vector<std::pair<std::string, Term>> handlers);

  static Term unit() { return record({}); }
  static Term pair(Term first, Term second);

  bool is_null() const { return node_ == nullptr; }
  TermTag tag() const;
  ConstName const_name() const;
  // Variable, endpoint or binder name; label of Variant and select.
  const std::string& name() const;
  // Annotation of Abs, Rec, TApp, Variant and select.
  const Type& type() const;
  const Kind& kind() const;
  bool unrestricted() const;
  const Term& kid(std::size_t i) const;
  std::size_t kid_count() const;
  const std::vector<std::string>& labels() const;
  const std::vector<std::string>& binders() const;

  Term with_kid(std::size_t i, Term t) const;
  Term with_kids(std::vector<Term> kids) const;
  Term with_type(Type t) const;

  bool is(TermTag t) const { return !is_null() && tag() == t; }
  bool is_const(ConstName c) const;
  std::size_t size() const;

  friend bool operator==(const Term& a, const Term& b);

 private:
  struct Node;
  explicit Term(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

// Surface rendering; parses back to an equal term for parser-produced input.
std::string to_string(const Term& t);

// Values: abstractions, constants, endpoints, records and variants of
// values, and the partial applications of send and receive.
bool is_value(const Term& t);

struct Binding {
  std::string name;
  Type type;
  std::optional<Term> body;  // empty for axioms
  int line = 0;
};

struct Program {
  TypeAliases aliases;
  std::vector<Binding> bindings;

  const Binding* find(const std::string& name) const;
};

// Declarations begin at column 1; indented lines continue the previous one.
//   type Name = T
//   name : T
//   name = term
Program parse_program(std::string_view text);

Term parse_term(std::string_view text);
Term parse_term(std::string_view text, const TypeAliases& aliases);

}  // namespace fmo
