#pragma once

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "fmo/lts.hpp"
#include "fmo/type.hpp"

namespace fmo {

// Expression of a first-order grammar: a formal `x<i>` or a nonterminal
// applied to exactly arity-many arguments.
struct FogExpr {
  std::string var;
  std::string head;
  std::vector<FogExpr> args;

  static FogExpr variable(std::string name) { return {std::move(name), {}, {}}; }
  static FogExpr apply(std::string head, std::vector<FogExpr> args = {}) { return {{}, std::move(head), std::move(args)}; }
  bool is_var() const { return !var.empty(); }
  bool closed() const;
  std::string str() const;

  friend bool operator==(const FogExpr&, const FogExpr&) = default;
  friend auto operator<=>(const FogExpr&, const FogExpr&) = default;
};

class FogError : public std::runtime_error {
 public:
  FogError(std::size_t line, const std::string& message);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Deterministic first-order grammar. The formals of an arity-m nonterminal
// are x1..xm.
struct Fog {
  std::map<std::string, std::size_t> arity;
  std::map<std::string, std::map<std::string, FogExpr>> productions;
  FogExpr start;

  std::size_t arity_of(const std::string& x) const;
};

// Text format: `arity X 2`, `X a -> X (R x1) (R x2)`, `start X A B`; `#`
// starts a comment. Undeclared nonterminals are constants.
Fog parse_fog(const std::string& text);
std::string fog_to_string(const Fog& g);
FogExpr parse_fog_expr(const Fog& g, const std::string& text);

std::optional<FogExpr> fog_step(const Fog& g, const FogExpr& e, const std::string& terminal);
std::map<std::string, FogExpr> fog_transitions(const Fog& g, const FogExpr& e);

// All terminal traces of length at most `depth`, including the empty one.
std::set<std::vector<std::string>> fog_traces(const Fog& g, const FogExpr& e, std::size_t depth);

// Terminal traces of an encoded type, read off the type LTS: the j-th label
// of a record maps back to a terminal and the empty record's own transition
// is dropped. Other labels appear as `?<label>`.
std::set<std::vector<std::string>> encoded_traces(const Type& t, std::size_t depth);

// Closed types for every nonterminal: each becomes an abstraction over its
// formals returning a record keyed by terminals; recursion becomes mu at the
// nonterminal's arrow kind.
class FogEncoding {
 public:
  explicit FogEncoding(const Fog& g);

  const std::map<std::string, Type>& nonterminals() const { return closed_; }
  Type encode(const FogExpr& e) const;
  Type start() const { return encode(grammar_.start); }

 private:
  Type close_group(const std::string& x, std::map<std::string, VarName> bound) const;
  Type body(const std::string& x, const std::map<std::string, VarName>& bound) const;
  Type expr(const FogExpr& e, const std::map<std::string, VarName>& bound) const;

  Fog grammar_;
  std::map<std::string, int> component_;
  std::map<std::string, bool> recursive_;
  std::map<std::string, Type> closed_;
};

}  // namespace fmo
