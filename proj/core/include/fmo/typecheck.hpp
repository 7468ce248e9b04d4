#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fmo/equivalence.hpp"
#include "fmo/term.hpp"
#include "fmo/type.hpp"

namespace fmo {

class TypeError : public std::runtime_error {
 public:
  enum class Kind {
    UnboundVariable, LinearityViolation, KindError, EquivalenceUnknown, LabelMismatch, TypeMismatch
  };

  TypeError(Kind kind, const std::string& message, std::string binding = {});
  Kind kind() const { return kind_; }
  // Top-level binding being checked, empty for bare terms.
  const std::string& binding() const { return binding_; }
  const std::string& detail() const { return detail_; }

 private:
  Kind kind_;
  std::string binding_;
  std::string detail_;
};

const char* error_name(TypeError::Kind k);

struct TBinding {
  std::string name;
  Type type;
  bool linear = true;
};

// Ordered term-variable bindings; later bindings shadow earlier ones.
class TContext {
 public:
  TContext() = default;

  void add(std::string name, Type type, bool linear = true);
  const std::vector<TBinding>& bindings() const { return bindings_; }
  const TBinding* find(const std::string& name) const;
  bool empty() const { return bindings_.empty(); }
  bool has_linear() const;

 private:
  std::vector<TBinding> bindings_;
};

// Unrestricted assumptions: top-level signatures.
using Globals = std::map<std::string, Type>;

struct SynthResult {
  Type type;
  TContext remaining;  // bindings not consumed by the term
};

SynthResult synth(const KContext& delta, const TContext& gamma, const Term& t,
                  const Globals& globals = {}, const EquivConfig& config = {});

// Synthesis followed by an equivalence check against `expected`.
TContext check(const KContext& delta, const TContext& gamma, const Term& t, const Type& expected,
               const Globals& globals = {}, const EquivConfig& config = {});

// Signature of every binding, after checking each body.
std::map<std::string, Type> typecheck_program(const Program& prog, const EquivConfig& config = {});

Globals program_globals(const Program& prog);

// Type schemes of the constants; select needs its choice annotation.
Type const_type(ConstName c);

}  // namespace fmo
