#pragma once

#include <cstddef>
#include <optional>

#include "fmo/type.hpp"

namespace fmo {

enum class Rule {
  Seq1, Seq2, Assoc, Mu, Beta, TAppL,
  DualSeq, DualSkip, DualEnd, DualIn, DualOut, DualExternal, DualInternal, DualCtx, DualDualVar
};

const char* rule_name(Rule r);

struct StepInfo {
  Type result;
  Rule rule;       // the axiom fired at the redex
  Type redex;      // the redex subterm
};

// One reduction step with the head-first strategy; nullopt iff irreducible.
std::optional<Type> step(const Type& t);
std::optional<StepInfo> step_info(const Type& t);

bool is_whnf(const Type& t);

struct NormalizeResult {
  Type type;     // null when divergent
  Type witness;  // repeating mu-subterm (renamed) when divergent
  std::size_t steps = 0;
  bool divergent() const { return type.is_null(); }
};

struct NormalizeLimits {
  std::size_t fuel = 1000000;
  // Bound on unfoldings of mu at an arrow kind, where tagging is not complete.
  std::size_t higher_mu_fuel = 10000;
};

NormalizeResult normalize(const KContext& ctx, const Type& t, const NormalizeLimits& limits = {});
NormalizeResult normalize(const Type& t);

// Normal form under every rule except mu unfolding.
Type normalize_bd(const Type& t);

}  // namespace fmo
