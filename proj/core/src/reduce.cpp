#include "fmo/reduce.hpp"

#include <unordered_set>

#include "fmo/rename.hpp"

namespace fmo {

const char* rule_name(Rule r) {
  switch (r) {
    case Rule::Seq1: return "Seq1";
    case Rule::Seq2: return "Seq2";
    case Rule::Assoc: return "Assoc";
    case Rule::Mu: return "Mu";
    case Rule::Beta: return "Beta";
    case Rule::TAppL: return "TAppL";
    case Rule::DualSeq: return "DSeq";
    case Rule::DualSkip: return "DSkip";
    case Rule::DualEnd: return "DEnd";
    case Rule::DualIn: return "DIn";
    case Rule::DualOut: return "DOut";
    case Rule::DualExternal: return "DExternal";
    case Rule::DualInternal: return "DInternal";
    case Rule::DualCtx: return "DCtx";
    case Rule::DualDualVar: return "DDVar";
  }
  return "?";
}

namespace {

bool is_var_headed(const Type& t) {
  Type cur = t;
  while (cur.is_app()) cur = cur.fun();
  return cur.is_var();
}

bool is_full_choice(const Type& t, const Spine& s) {
  (void)t;
  return s.head.is_const(ConstTag::Choice) && s.args.size() == s.head.con().arity();
}

struct Raw {
  Type result;
  Rule rule;
  Type redex;
};

std::optional<Raw> raw_step(const Type& t);

// Dual applied to `inner`; returns the reduct of Dual(inner) itself.
std::optional<Raw> dual_step(const Type& whole, const Type& inner) {
  Type a, b;
  if (match_seq(inner, &a, &b)) {
    return Raw{build::seq(build::dual(a), build::dual(b)), Rule::DualSeq, whole};
  }
  if (inner.is_const(ConstTag::Skip)) return Raw{inner, Rule::DualSkip, whole};
  if (inner.is_const(ConstTag::End)) return Raw{inner, Rule::DualEnd, whole};
  Polarity p;
  if (match_msg(inner, &p, &a)) {
    return Raw{build::msg(p == Polarity::In ? Polarity::Out : Polarity::In, a),
               p == Polarity::In ? Rule::DualIn : Rule::DualOut, whole};
  }
  Spine s = spine(inner);
  if (is_full_choice(inner, s)) {
    const TypeConst& c = s.head.con();
    View flipped = c.view == View::External ? View::Internal : View::External;
    Type r = Type::constant(TypeConst::choice(flipped, c.labels));
    for (const auto& arg : s.args) r = Type::app(r, build::dual(arg));
    return Raw{r, c.view == View::External ? Rule::DualExternal : Rule::DualInternal, whole};
  }
  if (match_dual(inner, &a) && is_var_headed(a)) return Raw{a, Rule::DualDualVar, whole};
  auto sub = raw_step(inner);
  if (!sub) return std::nullopt;
  sub->result = build::dual(sub->result);
  return sub;
}

std::optional<Raw> raw_step(const Type& t) {
  if (!t.is_app()) return std::nullopt;
  Spine s = spine(t);
  const Type& h = s.head;
  const std::size_t n = s.args.size();
  std::optional<Raw> r;
  std::size_t used = 0;
  if (h.is_const(ConstTag::Semi) && n >= 2) {
    used = 2;
    const Type& first = s.args[0];
    Type x, y;
    if (first.is_const(ConstTag::Skip)) {
      r = Raw{s.args[1], Rule::Seq1, build::seq(first, s.args[1])};
    } else if (match_seq(first, &x, &y)) {
      r = Raw{build::seq(x, build::seq(y, s.args[1])), Rule::Assoc, build::seq(first, s.args[1])};
    } else if (auto sub = raw_step(first)) {
      sub->result = build::seq(sub->result, s.args[1]);
      r = std::move(sub);
    }
  } else if (h.is_const(ConstTag::Mu) && n >= 1) {
    used = 1;
    Type redex = Type::app(h, s.args[0]);
    r = Raw{Type::app(s.args[0], redex), Rule::Mu, redex};
  } else if (h.is_abs() && n >= 1) {
    used = 1;
    r = Raw{rename_subst(h.body(), {{h.binder(), s.args[0]}}), Rule::Beta, Type::app(h, s.args[0])};
  } else if (h.is_const(ConstTag::Dual) && n >= 1) {
    used = 1;
    r = dual_step(Type::app(h, s.args[0]), s.args[0]);
  }
  if (!r) return std::nullopt;
  r->result = apply(std::move(r->result), s.args, used);
  return r;
}

}  // namespace

std::optional<StepInfo> step_info(const Type& t) {
  auto r = raw_step(t);
  if (!r) return std::nullopt;
  return StepInfo{rename(r->result), r->rule, r->redex};
}

std::optional<Type> step(const Type& t) {
  auto r = raw_step(t);
  if (!r) return std::nullopt;
  return rename(r->result);
}

bool is_whnf(const Type& t) {
  if (!t.is_app()) return true;
  Spine s = spine(t);
  const Type& h = s.head;
  const std::size_t m = s.args.size();
  if (h.is_var()) return true;
  if (h.is_abs()) return false;
  const TypeConst& c = h.con();
  switch (c.tag) {
    case ConstTag::Mu: return false;
    case ConstTag::Semi: {
      if (m == 1) return true;
      const Type& first = s.args[0];
      return is_whnf(first) && !match_seq(first) && !first.is_const(ConstTag::Skip);
    }
    case ConstTag::Dual: {
      const Type& first = s.args[0];
      if (!is_whnf(first)) return false;
      if (first.is_const(ConstTag::Skip) || first.is_const(ConstTag::End)) return false;
      if (match_msg(first) || match_seq(first)) return false;
      if (is_full_choice(first, spine(first))) return false;
      Type inner;
      if (match_dual(first, &inner) && is_var_headed(inner)) return false;
      return true;
    }
    default: return true;
  }
}

NormalizeResult normalize(const KContext&, const Type& t, const NormalizeLimits& limits) {
  NormalizeResult out;
  std::unordered_set<Type, TypeHash> tagged;
  std::size_t higher = 0;
  Type cur = t;
  while (true) {
    auto r = raw_step(cur);
    if (!r) {
      out.type = cur;
      return out;
    }
    if (++out.steps > limits.fuel) {
      out.witness = cur;
      return out;
    }
    if (r->rule == Rule::Mu) {
      const Kind& k = r->redex.fun().con().kind;
      if (k.is_proper()) {
        if (!tagged.insert(rename(r->redex)).second) {
          out.witness = rename(r->redex);
          return out;
        }
      } else if (++higher > limits.higher_mu_fuel) {
        out.witness = rename(r->redex);
        return out;
      }
    }
    cur = rename(r->result);
  }
}

NormalizeResult normalize(const Type& t) { return normalize(KContext{}, t); }

Type normalize_bd(const Type& t) {
  Type cur = t;
  while (true) {
    auto r = raw_step(cur);
    if (!r || r->rule == Rule::Mu) return cur;
    cur = rename(r->result);
  }
}

}  // namespace fmo
