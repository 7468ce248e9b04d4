#include <benchmark/benchmark.h>

#include "fmo/equivalence.hpp"
#include "fmo/fsa.hpp"
#include "fmo/grammar.hpp"
#include "fmo/lts.hpp"
#include "fmo/parse.hpp"
#include "fmo/reduce.hpp"
#include "fmo/rename.hpp"
#include "support/gen.hpp"
#include "support/rewrite.hpp"

using namespace fmo;

namespace {

Type R(const char* s) { return rename(parse_type(s)); }

const char* kTreeC = "\\a:T. mu t:S. &{Leaf: Skip, Node: t;?a;t}";

std::vector<std::pair<Type, Type>> pairs(std::uint64_t seed, int n, int depth) {
  testing::TypeGen gen(seed);
  std::vector<std::pair<Type, Type>> out;
  for (int i = 0; i < n; ++i) out.push_back(testing::random_pair(gen, depth));
  return out;
}

void BM_TreeGrammar(benchmark::State& state) {
  Type t = R(kTreeC);
  for (auto _ : state) {
    GrammarBuilder b;
    benchmark::DoNotOptimize(b.word(t));
    b.finish();
  }
}
BENCHMARK(BM_TreeGrammar);

void BM_Normalize(benchmark::State& state) {
  Type t = R("Dual ((\\p:S. p;p) (!Int;(mu r:S. &{A: ?Int;r, B: End})))");
  for (auto _ : state) benchmark::DoNotOptimize(normalize(t));
}
BENCHMARK(BM_Normalize);

// Non-regular protocols: continuation distributed into the tree exchange.
void BM_TreeDistribution(benchmark::State& state) {
  Type t = R("(mu t:S. &{Leaf: Skip, Node: t;?Int;t});!Bool;End");
  Type u = R("(mu t:S. &{Leaf: Skip, Node: t;?Int;t});(!Bool;End)");
  EquivConfig cfg;
  cfg.backend = Backend::Grammar;
  for (auto _ : state) benchmark::DoNotOptimize(equivalent({}, t, u, cfg));
}
BENCHMARK(BM_TreeDistribution);

void BM_Backend(benchmark::State& state) {
  auto ps = pairs(77, 50, static_cast<int>(state.range(1)));
  EquivConfig cfg;
  cfg.backend = static_cast<Backend>(state.range(0));
  const KContext ctx = testing::TypeGen(0).context();
  for (auto _ : state) {
    for (const auto& [t, u] : ps) benchmark::DoNotOptimize(equivalent(ctx, t, u, cfg));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(ps.size()));
  state.SetLabel(backend_name(cfg.backend));
}
BENCHMARK(BM_Backend)
    ->ArgsProduct({{static_cast<int>(Backend::Auto), static_cast<int>(Backend::Grammar),
                    static_cast<int>(Backend::Fsa), static_cast<int>(Backend::Oracle)},
                   {2, 3}})
    ->Unit(benchmark::kMillisecond);

}  // namespace
