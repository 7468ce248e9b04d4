#pragma once

#include <map>
#include <optional>
#include <vector>

#include "fmo/lts.hpp"
#include "fmo/type.hpp"

namespace fmo {

// Deterministic automaton over the reachable states of a type. States are
// renamed types; state 0 is initial.
struct Fsa {
  std::vector<Type> states;
  std::vector<std::map<Label, std::size_t>> delta;
  std::size_t initial = 0;

  std::size_t size() const { return states.size(); }
};

// Explores the type LTS; nullopt when more than `cap` states are reachable.
std::optional<Fsa> build_fsa(const KContext& ctx, const Type& t, std::size_t cap);

Verdict fsa_bisim(const Fsa& a, const Fsa& b);

}  // namespace fmo
