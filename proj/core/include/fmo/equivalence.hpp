#pragma once

#include <optional>
#include <string>

#include "fmo/lts.hpp"
#include "fmo/type.hpp"

namespace fmo {

enum class Backend { Auto, Grammar, Fsa, Oracle };

const char* backend_name(Backend b);
std::optional<Backend> parse_backend(const std::string& s);

struct EquivConfig {
  Backend backend = Backend::Auto;
  std::size_t oracle_depth = 64;
  std::size_t node_cap = 100000;
  std::size_t fsa_cap = 4096;
  std::size_t depth_cap = 1000;
};

// Type equivalence. Throws KindError when either side is not kinded;
// recursion at arrow kinds is accepted and routed to the bounded oracle.
Verdict equivalent(const KContext& ctx, const Type& t, const Type& u, const EquivConfig& config = {});

}  // namespace fmo
