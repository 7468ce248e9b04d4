#pragma once

#include <utility>
#include <vector>

#include "fmo/type.hpp"

namespace fmo {

VarSet free_vars(const Type& t);

// Least canonical variable outside `avoid` and the free variables of `abs`.
VarName first_avail(const VarSet& avoid, const Type& abs);

// Minimal renaming: every binder becomes the least canonical variable that is
// neither in `avoid` nor free in the binder's scope.
Type rename(const VarSet& avoid, const Type& t);
Type rename(const Type& t);

// Renames `t` while simultaneously replacing free variables per `subst`.
// Capture cannot occur: binders avoid the free variables of the replacements.
Type rename_subst(const Type& t, const std::vector<std::pair<VarName, Type>>& subst);

// Plain substitution t[u/v]; stops at binders that rebind v and never renames.
Type substitute(const Type& t, const Type& u, const VarName& v);

bool is_renamed(const Type& t);

}  // namespace fmo
