#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fmo/type.hpp"

namespace fmo {

struct Label {
  enum class Tag : std::uint8_t { VarHead, ConstHead, AbsLabel };
  Tag tag = Tag::ConstHead;
  VarName var;         // VarHead and AbsLabel
  TypeConst con;       // ConstHead
  std::size_t index = 0;
  Kind kind;           // AbsLabel

  static Label var_head(VarName v, std::size_t i);
  static Label const_head(TypeConst c, std::size_t i);
  static Label abs(VarName binder, Kind k);
  static Label end() { return const_head(TypeConst::end(), 0); }

  std::string str() const;
  std::size_t hash() const;

  friend bool operator==(const Label& a, const Label& b) { return (a <=> b) == 0; }
  friend std::strong_ordering operator<=>(const Label& a, const Label& b);
};

// Inverse of Label::str; throws ParseError.
Label parse_label(const std::string& text);

using Transitions = std::map<Label, Type>;

// Successors after normalisation; successor types are renamed. Throws
// KindError when the type does not normalise.
Transitions transitions(const KContext& ctx, const Type& t);

struct Verdict {
  enum class Result { Bisimilar, NotBisimilar, Unknown };
  Result result = Result::Unknown;
  std::vector<Label> trace;   // NotBisimilar: path, ending in a label only one side has
  std::string reason;         // Unknown: which limit or stage gave up
  std::string method;         // backend that produced the answer
  std::size_t explored = 0;   // pairs, states or nodes examined

  bool bisimilar() const { return result == Result::Bisimilar; }
  bool not_bisimilar() const { return result == Result::NotBisimilar; }
  bool unknown() const { return result == Result::Unknown; }

  static Verdict yes(std::string method, std::size_t explored);
  static Verdict no(std::vector<Label> trace, std::string method, std::size_t explored);
  static Verdict maybe(std::string reason, std::string method, std::size_t explored);
};

const char* result_name(Verdict::Result r);
std::string trace_string(const std::vector<Label>& trace);

struct BisimLimits {
  std::size_t depth = 64;
  std::size_t node_cap = 100000;
};

Verdict bounded_bisim(const KContext& ctx, const Type& t, const Type& u, const BisimLimits& limits = {});

// Follows `trace` from `t`; returns the number of labels taken before getting stuck.
std::size_t replay(const KContext& ctx, const Type& t, const std::vector<Label>& trace);

// True when the trace distinguishes the two types in the type LTS.
bool trace_distinguishes(const KContext& ctx, const Type& t, const Type& u, const std::vector<Label>& trace);

}  // namespace fmo

template <>
struct std::hash<fmo::Label> {
  std::size_t operator()(const fmo::Label& l) const { return l.hash(); }
};
