#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "fmo/term.hpp"

namespace fmo {

// Bodies of top-level bindings, unfolded when a thread reaches their name.
using Definitions = std::map<std::string, Term>;

Definitions program_definitions(const Program& prog);

// Capture-free substitution of a closed value for a term variable.
Term substitute(const Term& t, const std::string& x, const Term& v);
// Substitution of a type for a type variable in every annotation.
Term substitute_type(const Term& t, const VarName& a, const Type& u);

struct Thread {
  std::size_t id = 0;
  Term term;
};

// Structural normal form: restrictions over a multiset of threads.
struct Process {
  std::vector<std::pair<std::string, std::string>> channels;  // (x, y) endpoint pairs
  std::vector<Thread> threads;
  std::size_t next_thread = 1;
  std::size_t next_channel = 1;

  static Process main(Term t);
  std::string str() const;
};

// One term reduction inside a thread, or nullopt when the term is a value or
// its next step involves another thread or is stuck.
std::optional<Term> term_step(const Term& t, const Definitions& defs = {});

enum class TermStatus {
  Value,
  Reduces,
  Blocked,  // session operation, fork or new awaiting the process level, or a free variable
  Error
};

TermStatus term_status(const Term& t, const Definitions& defs = {});

// Runtime-error clauses; numbering follows the seven clauses of the definition.
enum class RuntimeErrorKind : std::uint8_t {
  BadApplication = 1, BadTypeApplication, BadRecordPattern, BadCase, NotAChannel, SharedSubject, Disagreement
};

const char* runtime_error_name(RuntimeErrorKind k);

struct RuntimeErrorInfo {
  RuntimeErrorKind kind;
  std::string location;  // thread ids and the offending redex
};

std::optional<RuntimeErrorInfo> detect_error(const Process& p, const Definitions& defs = {});

// Picks uniformly among enabled actions with a seeded 64-bit Mersenne twister.
class Scheduler {
 public:
  explicit Scheduler(std::uint64_t seed) : rng_(seed) {}
  std::size_t pick(std::size_t n) { return static_cast<std::size_t>(rng_() % n); }

 private:
  std::mt19937_64 rng_;
};

struct StepEvent {
  std::string rule;              // beta, fork, new, comm, ...
  std::vector<std::size_t> threads;
  std::string str() const;
};

std::optional<Process> proc_step(const Process& p, Scheduler& sched, const Definitions& defs = {},
                                 StepEvent* event = nullptr);

struct Outcome {
  enum class Kind { Value, Stuck, FuelExhausted, RuntimeError };
  Kind kind = Kind::Stuck;
  Term value;                    // Value: the main thread's result
  Process process;               // final state
  std::optional<RuntimeErrorInfo> error;
  std::size_t steps = 0;
  std::vector<StepEvent> trace;
};

const char* outcome_name(Outcome::Kind k);

struct RunOptions {
  std::uint64_t seed = 1;
  std::size_t fuel = 10000;
  std::string entry = "main";
  bool keep_trace = false;
};

// Runs the entry binding; throws std::invalid_argument when it has no body.
Outcome run(const Program& prog, const RunOptions& options = {});
Outcome run_process(Process p, const Definitions& defs, const RunOptions& options = {});

}  // namespace fmo
