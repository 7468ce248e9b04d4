#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include "fmo/type.hpp"

namespace fmo {

class KindError : public std::runtime_error {
 public:
  enum class Reason { NotPreKinded, NonNormalising, HigherKindRecursion };

  KindError(Reason reason, const std::string& message, Type witness = {});
  Reason reason() const { return reason_; }
  const Type& witness() const { return witness_; }

 private:
  Reason reason_;
  Type witness_;
};

const char* reason_name(KindError::Reason r);

// Kind inference without the normalisation proviso. Unconstrained proper
// kinds of bare constants default to T.
std::optional<Kind> pre_kind(const KContext& ctx, const Type& t);

// Full kinding; throws KindError.
Kind kind_of(const KContext& ctx, const Type& t);

// Kinding that admits recursion at arrow kinds, as used by the equivalence
// heuristics. Throws KindError for the other two reasons.
Kind kind_of_lenient(const KContext& ctx, const Type& t);

enum class Fragment { MuStarSemi, FullMu };
const char* fragment_name(Fragment f);
Fragment classify(const Type& t);

}  // namespace fmo
