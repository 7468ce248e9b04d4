#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <string_view>

#include "fmo/type.hpp"

namespace fmo {

class ParseError : public std::runtime_error {
 public:
  ParseError(int line, int column, const std::string& message);
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

// Named type abbreviations substituted at parse time.
using TypeAliases = std::map<std::string, Type>;

// Unit and Int stand for {}, Bool for <False:{}, True:{}>.
const TypeAliases& builtin_aliases();

Type parse_type(std::string_view text);
Type parse_type(std::string_view text, const TypeAliases& aliases);
Kind parse_kind(std::string_view text);

// Comma-separated `name:kind` bindings, e.g. "a:T, f:S=>S".
KContext parse_kcontext(std::string_view text);

}  // namespace fmo
