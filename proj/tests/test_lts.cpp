#include <set>

#include "doctest.h"
#include "fmo/kinding.hpp"
#include "fmo/lts.hpp"
#include "fmo/parse.hpp"
#include "fmo/reduce.hpp"
#include "fmo/rename.hpp"
#include "support/gen.hpp"
#include "support/rewrite.hpp"
#include "support/print.hpp"

using namespace fmo;

namespace {
Type R(const char* s) { return rename(parse_type(s)); }
const KContext kCtx = {{VarName::user("a"), Kind::arrow(Kind::session(), Kind::session())},
                       {VarName::user("b"), Kind::session()}};
std::set<std::string> label_set(const Transitions& tr) {
  std::set<std::string> out;
  for (const auto& [l, _] : tr) out.insert(l.str());
  return out;
}
}  // namespace

TEST_CASE("label rendering and parsing") {
  std::vector<Label> labels = {
      Label::var_head(VarName::user("a"), 0),
      Label::const_head(TypeConst::choice(View::External, {"Leaf", "Node"}), 2),
      Label::const_head(TypeConst::msg(Polarity::In), 1),
      Label::end(),
      Label::abs(VarName::canonical(1), Kind::functional()),
      Label::const_head(TypeConst::semi(), 1),
      Label::const_head(TypeConst::dual(), 1),
      Label::const_head(TypeConst::record({}), 0),
      Label::const_head(TypeConst::forall(Kind::session()), 1),
      Label::const_head(TypeConst::mu(Kind::arrow(Kind::session(), Kind::session())), 0),
      Label::const_head(TypeConst::arrow(), 1),
      Label::var_head(VarName::canonical(3), 2),
      Label::const_head(TypeConst::variant({"A", "B"}), 1),
  };
  std::vector<std::string> expected = {"a_0", "&{Leaf,Node}_2", "?_1", "End", "lambda $1:T", ";_1",
                                       "Dual_1", "{}_0", "forall[S]_1", "mu[S=>S]_0", "->_1", "$3_2",
                                       "<A,B>_1"};
  for (std::size_t i = 0; i < labels.size(); ++i) {
    CHECK(labels[i].str() == expected[i]);
    CHECK(parse_label(expected[i]) == labels[i]);
  }
  CHECK(Label::const_head(TypeConst::choice(View::External, {"A"}), 1) !=
        Label::const_head(TypeConst::choice(View::External, {"A", "B"}), 1));
}

TEST_CASE("transitions: worked examples") {
  Type t = R("\\x:T. mu y:S. +{Done: End, More: !x};Dual y");
  Transitions tr = transitions({}, t);
  REQUIRE(tr.size() == 1);
  CHECK(tr.begin()->first == Label::abs(VarName::canonical(1), Kind::functional()));
  Type u = tr.begin()->second;
  Transitions tu = transitions({}, u);
  CHECK(label_set(tu) == std::set<std::string>{"+{Done,More}_1", "+{Done,More}_2"});
  CHECK(tu.at(parse_label("+{Done,More}_1")) == rename(build::seq(build::end(), build::dual(u))));
  CHECK(tu.at(parse_label("+{Done,More}_2")) ==
        rename(build::seq(build::msg(Polarity::Out, Type::var(VarName::canonical(1))), build::dual(u))));
  CHECK(transitions({}, R("Skip")).empty());
  CHECK(transitions({}, R("End")).at(Label::end()) == R("Skip"));
  CHECK(transitions({}, R("End;?Int")).at(Label::end()) == R("Skip"));
  Transitions td = transitions(kCtx, R("Dual (a End);b"));
  CHECK(label_set(td) == std::set<std::string>{"Dual_1", "Dual_2"});
  CHECK(td.at(parse_label("Dual_2")) == R("b"));
}

TEST_CASE("bounded_bisim examples") {
  CHECK(bounded_bisim({}, R("Skip;End"), R("End")).bisimilar());
  Verdict v = bounded_bisim({}, R("?Int;End"), R("!Int;End"), {1, 1000});
  REQUIRE(v.not_bisimilar());
  CHECK(v.trace.size() == 1);
  CHECK(trace_distinguishes({}, R("?Int;End"), R("!Int;End"), v.trace));
  CHECK(bounded_bisim(kCtx, R("a (!Int)"), R("a (!Int);Skip"), {2, 1000}).bisimilar());
  CHECK(bounded_bisim({}, R("mu x:S. !Int;x"), R("mu x:S. !Int;!Int;x")).bisimilar());
  Verdict w = bounded_bisim({}, R("mu x:S. !Int;x"), R("mu x:S. !Int;!Bool;x"));
  REQUIRE(w.not_bisimilar());
  CHECK(trace_distinguishes({}, R("mu x:S. !Int;x"), R("mu x:S. !Int;!Bool;x"), w.trace));
  CHECK(bounded_bisim({}, R("End"), R("Skip")).trace == std::vector<Label>{Label::end()});
  CHECK(bounded_bisim({}, R("&{Go: ?Int;b, Quit: End;b}"), R("&{Go: ?Int, Quit: End};b")).unknown() == false);
  CHECK(bounded_bisim(kCtx, R("&{Go: ?Int;b, Quit: End;b}"), R("&{Go: ?Int, Quit: End};b")).bisimilar());
  // TreeC-like: context-free, so the oracle only gets a depth-bounded answer.
  Verdict tree = bounded_bisim({}, R("mu t:S. &{Leaf: Skip, Node: t;?Int;t}"),
                               R("&{Leaf: Skip, Node: (mu t:S. &{Leaf: Skip, Node: t;?Int;t});?Int;(mu t:S. &{Leaf: Skip, Node: t;?Int;t})}"),
                               {12, 100000});
  CHECK(!tree.not_bisimilar());
}

TEST_CASE("properties: determinism, axioms, normalisation invariance") {
  testing::TypeGen gen(11);
  const KContext& ctx = gen.context();
  BisimLimits lim{64, 20000};
  int decisive = 0;
  for (int i = 0; i < 100; ++i) {
    Type t = gen.kinded_session(3);
    Type u = gen.kinded_session(3);
    Type v = gen.kinded_session(2);
    CAPTURE(to_string(t));
    CAPTURE(to_string(u));
    CAPTURE(to_string(v));
    CHECK(!bounded_bisim(ctx, build::seq(build::skip(), t), t, lim).not_bisimilar());
    CHECK(!bounded_bisim(ctx, build::seq(build::end(), t), build::end(), lim).not_bisimilar());
    Verdict assoc = bounded_bisim(ctx, build::seq(build::seq(t, u), v), build::seq(t, build::seq(u, v)), lim);
    CHECK(!assoc.not_bisimilar());
    decisive += assoc.bisimilar();
    Type n = normalize(ctx, t).type;
    CHECK(!bounded_bisim(ctx, t, n, lim).not_bisimilar());
  }
  MESSAGE("decisive associativity checks: " << decisive);
}

TEST_CASE("normal forms agree across all reduction orders, up to bisimilarity") {
  testing::TypeGen gen(23);
  const KContext& ctx = gen.context();
  for (int i = 0; i < 200; ++i) {
    Type t = gen.kinded_session(4);
    CAPTURE(to_string(t));
    NormalizeResult r = normalize(ctx, t);
    REQUIRE(!r.divergent());
    std::set<std::size_t> seen;
    std::vector<Type> frontier{t};
    int budget = 500;
    while (!frontier.empty() && budget-- > 0) {
      Type cur = frontier.back();
      frontier.pop_back();
      if (!seen.insert(cur.hash()).second) continue;
      auto next_all = testing::all_steps(cur);
      if (next_all.empty()) {
        CHECK(is_whnf(cur));
        CHECK(!bounded_bisim(ctx, cur, r.type, {32, 20000}).not_bisimilar());
      }
      for (auto& n : next_all) frontier.push_back(n);
    }
  }
}
