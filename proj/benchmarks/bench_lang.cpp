#include <benchmark/benchmark.h>

#include <fstream>
#include <sstream>

#include "fmo/eval.hpp"
#include "fmo/term.hpp"
#include "fmo/typecheck.hpp"

using namespace fmo;

namespace {

std::string corpus() {
  std::ifstream in(std::string(FMO_DATA_DIR) + "/fold_run.fmo");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void BM_TypecheckFold(benchmark::State& state) {
  Program prog = parse_program(corpus());
  for (auto _ : state) benchmark::DoNotOptimize(typecheck_program(prog));
}
BENCHMARK(BM_TypecheckFold)->Unit(benchmark::kMillisecond);

void BM_RunFold(benchmark::State& state) {
  Program prog = parse_program(corpus());
  RunOptions opt;
  for (auto _ : state) {
    opt.seed = static_cast<std::uint64_t>(state.iterations());
    benchmark::DoNotOptimize(run(prog, opt));
  }
}
BENCHMARK(BM_RunFold)->Unit(benchmark::kMillisecond);

}  // namespace
