#include <fstream>
#include <functional>
#include <random>
#include <sstream>

#include "doctest.h"
#include "fmo/fog.hpp"
#include "fmo/kinding.hpp"
#include "fmo/lts.hpp"
#include "fmo/parse.hpp"
#include "fmo/rename.hpp"
#include "support/print.hpp"

using namespace fmo;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

FogExpr E(const Fog& g, const char* s) { return parse_fog_expr(g, s); }

// Random deterministic grammar over nonterminals N0..N3 and terminals a, b.
// Bodies use each formal at most once, which keeps expressions from doubling.
Fog random_fog(std::mt19937_64& rng) {
  auto pick = [&](int n) { return static_cast<int>(rng() % static_cast<std::uint64_t>(n)); };
  Fog g;
  std::vector<std::string> names = {"N0", "N1", "N2", "N3"};
  for (const auto& n : names) g.arity[n] = static_cast<std::size_t>(pick(3));
  std::vector<std::string> pool;
  std::function<FogExpr(int)> gen = [&](int depth) -> FogExpr {
    if (!pool.empty() && (depth == 0 || pick(3) == 0)) {
      std::size_t k = static_cast<std::size_t>(pick(static_cast<int>(pool.size())));
      std::string v = pool[k];
      pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(k));
      return FogExpr::variable(v);
    }
    std::vector<std::string> usable;
    for (const auto& n : names) {
      if (depth > 0 || g.arity[n] == 0) usable.push_back(n);
    }
    if (usable.empty()) usable.push_back("Bot");
    std::string head = usable[static_cast<std::size_t>(pick(static_cast<int>(usable.size())))];
    std::vector<FogExpr> args;
    for (std::size_t i = 0; i < g.arity_of(head); ++i) args.push_back(gen(depth - 1));
    return FogExpr::apply(head, std::move(args));
  };
  for (const auto& n : names) {
    for (const char* t : {"a", "b"}) {
      if (pick(3) == 0) continue;
      pool.clear();
      for (std::size_t i = 1; i <= g.arity[n]; ++i) pool.push_back("x" + std::to_string(i));
      g.productions[n][t] = gen(2);
    }
  }
  pool.clear();
  g.start = gen(2);
  return g;
}

}  // namespace

TEST_CASE("fog: parsing and stepping the L3 grammar") {
  Fog g = parse_fog(slurp("data/l3.fog"));
  CHECK(g.arity_of("X") == 2);
  CHECK(g.arity_of("Bot") == 0);
  CHECK(g.start == E(g, "X A B"));
  CHECK(fog_step(g, E(g, "X A B"), "l") == E(g, "X (R A) (R B)"));
  CHECK(fog_step(g, E(g, "X A B"), "a") == E(g, "A"));
  CHECK(fog_step(g, E(g, "Bot"), "a") == std::nullopt);
  CHECK(fog_step(g, E(g, "R (R A)"), "r") == E(g, "R A"));
  CHECK(E(g, "X (R A) (R B)").str() == "X (R A) (R B)");

  auto traces = fog_traces(g, g.start, 6);
  CHECK(traces.count({"l", "l", "a", "r", "r", "a"}));
  CHECK(traces.count({"b", "b"}));
  CHECK(!traces.count({"l", "a", "a"}));
  CHECK(!traces.count({"l", "b", "r", "a"}));

  Fog back = parse_fog(fog_to_string(g));
  CHECK(back.productions == g.productions);
  CHECK(back.start == g.start);
}

TEST_CASE("fog: parse errors") {
  CHECK_THROWS_AS(parse_fog("A a -> Bot\nA a -> A\nstart A\n"), FogError);
  CHECK_THROWS_AS(parse_fog("arity X 1\nX a -> X\nstart X Bot\n"), FogError);
  CHECK_THROWS_AS(parse_fog("arity X 1\nX a -> x2\nstart X Bot\n"), FogError);
  CHECK_THROWS_AS(parse_fog("A a -> Bot\n"), FogError);
  CHECK_THROWS_AS(parse_fog("arity X 1\nstart X x1\n"), FogError);
  try {
    parse_fog("A a -> Bot\nA a -> A\nstart A\n");
  } catch (const FogError& e) {
    CHECK(e.line() == 2);
  }
}

TEST_CASE("fog: encoding of L3") {
  Fog g = parse_fog(slurp("data/l3.fog"));
  FogEncoding enc(g);
  CHECK(enc.nonterminals().at("Bot") == rename(parse_type("{}")));
  CHECK(enc.nonterminals().at("A") == rename(parse_type("{a: {}}")));
  Type expected = rename(parse_type(
      "(mu xi:T=>T=>T. \\al:T. \\be:T. {l: xi {r: al} {r: be}, a: al, b: be}) {a: {}} {b: {}}"));
  CHECK(enc.start() == expected);
  CHECK(classify(enc.start()) == Fragment::FullMu);
  CHECK(kind_of_lenient({}, enc.start()) == Kind::functional());
  CHECK(encoded_traces(enc.start(), 10) == fog_traces(g, g.start, 10));

  Type swapped = enc.encode(E(g, "X B A"));
  Verdict v = bounded_bisim({}, enc.start(), swapped);
  REQUIRE(v.not_bisimilar());
  CHECK(trace_distinguishes({}, enc.start(), swapped, v.trace));
  CHECK(bounded_bisim({}, enc.encode(E(g, "R A")), enc.encode(E(g, "R A"))).bisimilar());
}

TEST_CASE("fog: full abstraction on random deterministic grammars") {
  std::mt19937_64 rng(2024);
  int checked = 0;
  while (checked < 60) {
    Fog g = random_fog(rng);
    CAPTURE(fog_to_string(g));
    FogEncoding enc(g);
    Type t = enc.start();
    // Nested mutual recursion can make encodings large; those only cost time.
    if (t.size() > 300) continue;
    ++checked;
    CAPTURE(to_string(t));
    CHECK(kind_of_lenient({}, t) == Kind::functional());
    CHECK(encoded_traces(t, 10) == fog_traces(g, g.start, 10));
  }
}
