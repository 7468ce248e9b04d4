#pragma once

// Syntax-directed characterisation of equivalence against a type of known
// shape: T ~ R iff the normal form of T has one of the shapes listed for R,
// with components related as stated. `derived_side` evaluates the right-hand
// side of each rule; equivalence of components uses `equivalent`.

#include <string>
#include <vector>

#include "fmo/equivalence.hpp"
#include "fmo/parse.hpp"
#include "fmo/reduce.hpp"
#include "fmo/rename.hpp"

namespace fmo::testing {

struct DerivedInstance {
  int rule;
  const char* t;
  const char* r;
};

inline const KContext& derived_context() {
  static const KContext ctx = parse_kcontext("a:T, b:T, s:S, f:S=>S, g:T=>S");
  return ctx;
}

// Rules 1-15, each with instances on both sides of the equivalence.
inline const std::vector<DerivedInstance>& derived_corpus() {
  static const std::vector<DerivedInstance> corpus = {
      {1, "(\\x:T. x) a", "a"},
      {1, "a", "a"},
      {1, "b", "a"},
      {2, "\\x:S. x;Skip", "\\y:S. y"},
      {2, "(\\h:S=>S. h) (\\x:S. !Int;x)", "\\x:S. !Int;x"},
      {2, "\\x:S. End", "\\x:S. x"},
      {3, "End;!Int", "End"},
      {3, "Skip;End", "End"},
      {3, "Skip", "End"},
      {4, "Skip;Skip", "Skip"},
      {4, "(\\x:T. x) {}", "{}"},
      {4, "End", "Skip"},
      {5, "f (Skip;s)", "f s"},
      {5, "f s;Skip", "f s"},
      {5, "f End", "f s"},
      {6, "(\\x:T. x) (Int -> Bool)", "Int -> Bool"},
      {6, "Int -> Int", "Int -> Bool"},
      {7, "forall x:T. (\\y:T. y) x", "forall x:T. x"},
      {7, "forall x:T. x -> x", "forall x:T. x"},
      {8, "{A: Skip;End}", "{A: End}"},
      {8, "<A: Int, B: Bool>", "<A: Int, B: Int>"},
      {9, "!Int;Skip", "!Int"},
      {9, "(\\x:T. ?x) Int", "?Int"},
      {9, "?Int", "!Int"},
      {10, "&{A: !Int};?Int", "&{A: !Int;?Int}"},
      {10, "+{A: Skip;End, B: s}", "+{A: End, B: s}"},
      {10, "+{A: End}", "&{A: End}"},
      {11, "End", "End;!Int"},
      {11, "End;?Bool", "End;!Int"},
      {11, "!Int", "End;!Int"},
      {12, "!Int", "!Int;Skip"},
      {12, "(!Int;?Int);Skip", "!Int;?Int"},
      {12, "!Int;!Int", "!Int;?Int"},
      {13, "&{A: ?Int;!Int}", "&{A: ?Int};!Int"},
      {13, "&{A: ?Int};!Int", "&{A: ?Int};!Int"},
      {13, "&{A: ?Int}", "&{A: ?Int};!Int"},
      {14, "Dual (Dual (Dual (f (Skip;s))))", "Dual (f s)"},
      {14, "f s", "Dual (f s)"},
      {15, "Dual s;(Skip;!Int)", "Dual s;!Int"},
      {15, "Dual (g a)", "Dual (g a);Skip"},
  };
  return corpus;
}

class DerivedRules {
 public:
  explicit DerivedRules(KContext ctx) : ctx_(std::move(ctx)) {}

  bool eq(const Type& x, const Type& y) const { return equivalent(ctx_, x, y).bisimilar(); }

  bool holds(int rule, const Type& t_in, const Type& r_in) const {
    Type r = rename(r_in);
    NormalizeResult n = normalize(ctx_, rename(t_in));
    if (n.divergent()) return false;
    const Type& t = n.type;
    Type first, rest, r_first, r_rest;
    bool t_seq = match_seq(t, &first, &rest);
    bool r_seq = match_seq(r, &r_first, &r_rest);
    const Type skip = build::skip();
    switch (rule) {
      case 1:
      case 4: return t == r;
      case 2: return same_abs(t, r);
      case 3:
      case 11: return t.is_const(ConstTag::End) || (t_seq && first.is_const(ConstTag::End));
      case 5:
      case 9:
      case 14: return args_match(t, r) || (t_seq && args_match(first, r) && eq(rest, skip));
      case 6:
      case 7:
      case 8: return args_match(t, r);
      case 10: {
        if (args_match(t, r)) return true;
        if (!t_seq || !same_head(first, r)) return false;
        Spine sf = spine(first), sr = spine(r);
        for (std::size_t i = 0; i < sr.args.size(); ++i) {
          if (!eq(sr.args[i], build::seq(sf.args[i], rest))) return false;
        }
        return true;
      }
      case 12:
      case 15:
        if (!r_seq) return false;
        if (args_match(t, r_first)) return eq(r_rest, skip);
        return t_seq && args_match(first, r_first) && eq(r_rest, rest);
      case 13: {
        if (!r_seq) return false;
        Spine sr = spine(r_first);
        auto branches = [&](const Type& head, const Type* tail) {
          if (!same_head(head, r_first)) return false;
          Spine sh = spine(head);
          for (std::size_t i = 0; i < sr.args.size(); ++i) {
            Type left = build::seq(sr.args[i], r_rest);
            Type right = tail ? build::seq(sh.args[i], *tail) : sh.args[i];
            if (!eq(left, right)) return false;
          }
          return true;
        };
        return branches(t, nullptr) || (t_seq && branches(first, &rest));
      }
      default: return false;
    }
  }

 private:
  // Same head (constant, variable, or Dual over a variable-headed spine) and
  // pairwise equivalent arguments.
  bool args_match(const Type& x, const Type& pattern) const {
    Type xi, pi;
    if (match_dual(pattern, &pi)) return match_dual(x, &xi) && args_match(xi, pi);
    if (!same_head(x, pattern)) return false;
    Spine sx = spine(x), sp = spine(pattern);
    for (std::size_t i = 0; i < sp.args.size(); ++i) {
      if (!eq(sx.args[i], sp.args[i])) return false;
    }
    return true;
  }

  static bool same_head(const Type& x, const Type& pattern) {
    Spine sx = spine(x), sp = spine(pattern);
    if (sx.args.size() != sp.args.size()) return false;
    if (sp.head.is_var()) return sx.head == sp.head;
    return sp.head.tag() == Type::Tag::Const && sx.head.tag() == Type::Tag::Const && sx.head.con() == sp.head.con();
  }

  bool same_abs(const Type& x, const Type& pattern) const {
    if (!x.is_abs() || !pattern.is_abs() || x.kind() != pattern.kind()) return false;
    VarName z = VarName::user("zeta");
    KContext inner = ctx_;
    inner[z] = pattern.kind();
    Type bx = rename_subst(x.body(), {{x.binder(), Type::var(z)}});
    Type bp = rename_subst(pattern.body(), {{pattern.binder(), Type::var(z)}});
    return equivalent(inner, bx, bp).bisimilar();
  }

  KContext ctx_;
};

}  // namespace fmo::testing
