#include <functional>
#include <map>
#include <set>

#include "doctest.h"
#include "fmo/equivalence.hpp"
#include "fmo/fsa.hpp"
#include "fmo/grammar.hpp"
#include "fmo/kinding.hpp"
#include "fmo/lts.hpp"
#include "fmo/parse.hpp"
#include "fmo/reduce.hpp"
#include "fmo/rename.hpp"
#include "support/gen.hpp"
#include "support/grammars.hpp"
#include "support/print.hpp"
#include "support/rewrite.hpp"

using namespace fmo;
using testing::Built;
using testing::isomorphic;
using testing::labels;
using testing::make_grammar;
using testing::same_behaviour;

namespace {

Type R(const char* s) { return rename(parse_type(s)); }

const char* kTreeC = "\\a:T. mu t:S. &{Leaf: Skip, Node: t;?a;t}";
const char* kTreeInt = "mu t:S. &{Leaf: Skip, Node: t;?Int;t}";
const char* kStream = "\\a:T. mu b:S. &{Done: End, More: ?a;b}";
const char* kIntStream = "mu a:S. &{Done: End, More: ?Int;a}";

}  // namespace

TEST_CASE("word: base cases") {
  Built skip = make_grammar({}, {R("Skip")});
  CHECK(skip.words[0].empty());
  CHECK(skip.g.size() == 0);

  Built end = make_grammar({}, {R("End")});
  REQUIRE(end.words[0].size() == 1);
  NonTerm y = end.words[0][0];
  CHECK(end.g.of(y) == std::map<Label, Word>{{Label::end(), Word{kBottom}}});

  Built unit = make_grammar({}, {R("Skip;Skip;(\\x:S. x) Skip")});
  CHECK(unit.words[0].empty());
  Built seq = make_grammar({}, {R("!Int;End")});
  CHECK(seq.words[0].size() == 2);
  CHECK_THROWS_AS(make_grammar({}, {R("mu f:S=>S. \\x:S. f x")}), FragmentError);
}

TEST_CASE("word: the binary tree channel") {
  Built tree = make_grammar({}, {R(kTreeC)});
  const SimpleGrammar& g = tree.g;
  CHECK(g.production_count() == 10);
  REQUIRE(tree.words[0].size() == 1);

  // X0 -lambda-> X1; X1,X2 -&1-> eps, -&2-> X3; X3 -&1-> X4 X1, -&2-> X3 X4 X1;
  // X4 -?1-> X5 BOT, -?2-> eps; X5 -$1-> eps.
  SimpleGrammar expected;
  expected.productions.resize(6);
  Label lam = Label::abs(VarName::canonical(1), Kind::functional());
  Label leaf_l = Label::const_head(TypeConst::choice(View::External, {"Leaf", "Node"}), 1);
  Label node_l = Label::const_head(TypeConst::choice(View::External, {"Leaf", "Node"}), 2);
  Label in1 = Label::const_head(TypeConst::msg(Polarity::In), 1);
  Label in2 = Label::const_head(TypeConst::msg(Polarity::In), 2);
  Label var = Label::var_head(VarName::canonical(1), 0);
  expected.productions[0] = {{lam, {1}}};
  expected.productions[1] = {{leaf_l, {}}, {node_l, {3}}};
  expected.productions[2] = {{leaf_l, {}}, {node_l, {3}}};
  expected.productions[3] = {{leaf_l, {4, 1}}, {node_l, {3, 4, 1}}};
  expected.productions[4] = {{in1, {5, kBottom}}, {in2, {}}};
  expected.productions[5] = {{var, {}}};
  CHECK(isomorphic(g, tree.words[0][0], expected, 0));
  CHECK(g.size() == 6);

  auto n = norms(g);
  CHECK(n[5] == Norm{1});
  CHECK(n[3] == Norm{3});
  CHECK(n[0] == Norm{2});
  CHECK(n[4] == Norm{1});

  std::string dump = dump_grammar(g);
  CHECK(dump.rfind("start: X0\n", 0) == 0);
  CHECK(dump.find("X3 &{Leaf,Node}_2 -> X3 X4 X1\n") != std::string::npos);
  CHECK(dump.find("X4 ?_1 -> X5 BOT\n") != std::string::npos);
  CHECK(dump.find("X1 &{Leaf,Node}_1 -> eps\n") != std::string::npos);
}

TEST_CASE("norms") {
  SimpleGrammar g;
  Label a = parse_label("End");
  Label b = parse_label("?_2");
  g.productions = {{{a, {kBottom}}}, {{a, {1}}}, {{a, {}}, {b, {0}}}, {{a, {2, 2}}}};
  auto n = norms(g);
  CHECK(n[0] == std::nullopt);
  CHECK(n[1] == std::nullopt);
  CHECK(n[2] == Norm{1});
  CHECK(n[3] == Norm{3});
}

TEST_CASE("grammar_bisim: examples") {
  Built b = make_grammar({}, {R("Skip;End"), R("End")});
  CHECK(grammar_bisim(b.g, b.words[0], b.words[1]).bisimilar());

  SimpleGrammar g;
  Label la = parse_label("{}_0");
  Label lb = parse_label("?_2");
  g.productions = {{{la, {}}}, {{lb, {}}}};
  Verdict v = grammar_bisim(g, {0}, {1});
  REQUIRE(v.not_bisimilar());
  CHECK(v.trace.size() == 1);

  Type tree = R(kTreeInt);
  Type unfolded = rename(*step(tree));
  Built t = make_grammar({}, {tree, unfolded});
  CHECK(grammar_bisim(t.g, t.words[0], t.words[1]).bisimilar());
  CHECK(!bounded_bisim({}, tree, unfolded, {12, 100000}).not_bisimilar());

  // Context-free and infinite-state: associativity of a non-regular tail.
  Type lhs = R("(mu t:S. &{Leaf: Skip, Node: t;?Int;t}) ; (mu t:S. &{Leaf: Skip, Node: t;?Int;t}) ; !Bool");
  Type rhs = R("((mu t:S. &{Leaf: Skip, Node: t;?Int;t}) ; (mu t:S. &{Leaf: Skip, Node: t;?Int;t})) ; !Bool");
  Built as = make_grammar({}, {lhs, rhs});
  CHECK(grammar_bisim(as.g, as.words[0], as.words[1]).bisimilar());

  Type other = R("(mu t:S. &{Leaf: Skip, Node: t;?Int;t}) ; !Bool");
  Built ne = make_grammar({}, {lhs, other});
  Verdict d = grammar_bisim(ne.g, ne.words[0], ne.words[1]);
  REQUIRE(d.not_bisimilar());
  CHECK(trace_distinguishes({}, lhs, other, d.trace));
}

TEST_CASE("grammar JSON round trip") {
  Built tree = make_grammar({}, {R(kTreeC), R("End;!Int")});
  std::string json = grammar_to_json(tree.g);
  SimpleGrammar back = grammar_from_json(json);
  CHECK(back == tree.g);
  CHECK(json.find("\"schema_version\": 1") != std::string::npos);
  CHECK_THROWS(grammar_from_json("{\"schema_version\": 2, \"nonterminals\": 0, \"productions\": []}"));
  CHECK_THROWS(grammar_from_json(
      "{\"schema_version\": 1, \"nonterminals\": 1, \"productions\": ["
      "{\"lhs\": \"X0\", \"label\": \"End\", \"rhs\": []},"
      "{\"lhs\": \"X0\", \"label\": \"End\", \"rhs\": [\"BOT\"]}]}"));
}

TEST_CASE("fsa: examples") {
  Type stream_int = R((std::string("(") + kStream + ") Int").c_str());
  auto s = build_fsa({}, stream_int, 4096);
  REQUIRE(s.has_value());
  CHECK(s->size() <= 8);

  auto e = build_fsa({}, R("End"), 4096);
  REQUIRE(e.has_value());
  CHECK(e->size() == 2);

  CHECK(!build_fsa({}, R((std::string("(") + kTreeC + ") Int").c_str()), 1000).has_value());

  auto is = build_fsa({}, R(kIntStream), 4096);
  REQUIRE(is.has_value());
  CHECK(fsa_bisim(*s, *s).bisimilar());
  CHECK(fsa_bisim(*s, *is).bisimilar());
  auto skip = build_fsa({}, R("Skip"), 4096);
  Verdict v = fsa_bisim(*e, *skip);
  REQUIRE(v.not_bisimilar());
  CHECK(v.trace == std::vector<Label>{Label::end()});
}

TEST_CASE("equivalent: examples") {
  testing::TypeGen gen(5);
  const KContext& ctx = gen.context();
  for (int i = 0; i < 50; ++i) {
    Type t = gen.kinded_session(3);
    CAPTURE(to_string(t));
    CHECK(equivalent(ctx, build::seq(build::skip(), t), t).bisimilar());
  }
  CHECK(equivalent(ctx, R("&{Go: ?Int;a, Quit: End;a}"), R("&{Go: ?Int, Quit: End};a")).bisimilar());
  CHECK(equivalent(ctx, R("+{Go: !Int;!Bool, Quit: Skip;!Bool}"), R("+{Go: !Int, Quit: Skip};!Bool")).bisimilar());
  Verdict v = equivalent({}, R("End"), R("Skip"));
  CHECK(v.not_bisimilar());
  CHECK(v.trace == std::vector<Label>{Label::end()});
  CHECK_THROWS_AS(equivalent({}, R("Int;End"), R("End")), KindError);

  Type stream_int = R((std::string("(") + kStream + ") Int").c_str());
  CHECK(equivalent({}, stream_int, R(kIntStream)).bisimilar());
  for (Backend b : {Backend::Fsa, Backend::Grammar, Backend::Oracle}) {
    EquivConfig cfg;
    cfg.backend = b;
    CHECK(equivalent({}, stream_int, R(kIntStream), cfg).bisimilar());
  }
  Type full = R("(mu f:S=>S. \\x:S. !Int;f x) End");
  CHECK(classify(full) == Fragment::FullMu);
  Verdict h = equivalent({}, full, R("mu y:S. !Int;y"));
  CHECK(h.bisimilar());
}

TEST_CASE("properties: eps characterisation and full abstraction") {
  testing::TypeGen gen(41);
  const KContext& ctx = gen.context();
  for (int i = 0; i < 500; ++i) {
    Type t = gen.kinded_session(4);
    CAPTURE(to_string(t));
    Built b = make_grammar(ctx, {t});
    NormalizeResult n = normalize(ctx, t);
    Built nb = make_grammar(ctx, {n.type});
    CHECK(nb.words[0].empty() == n.type.is_const(ConstTag::Skip));
    for (std::size_t x = 0; x < b.g.size(); ++x) {
      for (const auto& [_, body] : b.g.productions[x]) {
        for (NonTerm y : body) CHECK((y == kBottom || static_cast<std::size_t>(y) < b.g.size()));
      }
    }
    CHECK(same_behaviour(ctx, b.g, t, b.words[0], 6));
  }
}

TEST_CASE("properties: backend agreement") {
  testing::TypeGen gen(77);
  const KContext& ctx = gen.context();
  int decisive = 0, equal = 0;
  for (int i = 0; i < 500; ++i) {
    auto [t, u] = testing::random_pair(gen, 3);
    CAPTURE(to_string(t));
    CAPTURE(to_string(u));
    Built b = make_grammar(ctx, {t, u});
    Verdict g = grammar_bisim(b.g, b.words[0], b.words[1]);
    REQUIRE(!g.unknown());
    if (g.not_bisimilar()) CHECK(trace_distinguishes(ctx, t, u, g.trace));
    Verdict o = bounded_bisim(ctx, t, u, {12, 100000});
    if (!o.unknown()) {
      ++decisive;
      CHECK(o.result == g.result);
    }
    equal += g.bisimilar();
  }
  MESSAGE("oracle-decisive pairs: " << decisive << ", bisimilar: " << equal);

  int closing = 0;
  gen.free_var = false;
  while (closing < 200) {
    auto [t, u] = testing::random_pair(gen, 3);
    auto a = build_fsa(ctx, t, 4096);
    auto c = build_fsa(ctx, u, 4096);
    if (!a || !c) continue;
    ++closing;
    CAPTURE(to_string(t));
    CAPTURE(to_string(u));
    Built b = make_grammar(ctx, {t, u});
    CHECK(fsa_bisim(*a, *c).result == grammar_bisim(b.g, b.words[0], b.words[1]).result);
  }
}

TEST_CASE("properties: grammar decides constructed equivalences") {
  testing::TypeGen gen(303);
  const KContext& ctx = gen.context();
  int oracle_unknown = 0;
  for (int i = 0; i < 300; ++i) {
    Type t = gen.kinded_session(4);
    Type u = testing::equivalent_variant(gen, t, 1 + gen.pick(6));
    CAPTURE(to_string(t));
    CAPTURE(to_string(u));
    Built b = make_grammar(ctx, {t, u});
    CHECK(grammar_bisim(b.g, b.words[0], b.words[1]).bisimilar());
    oracle_unknown += bounded_bisim(ctx, t, u, {12, 100000}).unknown();
  }
  MESSAGE("pairs beyond the bounded oracle: " << oracle_unknown);

  // Non-regular protocols: continuation distributed into, or pulled out of,
  // a recursive tree exchange.
  const char* tree = "(mu t:S. &{Leaf: Skip, Node: t;?Int;t})";
  std::vector<std::pair<std::string, std::string>> same = {
      {std::string(tree) + ";!Bool;End", std::string("&{Leaf: !Bool;End, Node: ") + tree + ";?Int;" + tree + ";!Bool;End}"},
      {std::string(tree) + ";" + tree, std::string("&{Leaf: ") + tree + ", Node: " + tree + ";?Int;" + tree + ";" + tree + "}"},
      {std::string(tree) + ";End", std::string(tree) + ";End;" + tree},
  };
  for (const auto& [l, r] : same) {
    CAPTURE(l);
    CAPTURE(r);
    Built b = make_grammar({}, {R(l.c_str()), R(r.c_str())});
    CHECK(grammar_bisim(b.g, b.words[0], b.words[1]).bisimilar());
  }
  std::vector<std::pair<std::string, std::string>> differ = {
      {std::string(tree) + ";!Bool", std::string(tree) + ";!Int"},
      {std::string(tree) + ";" + tree, std::string(tree)},
      {std::string(tree) + ";?Int;" + tree, std::string(tree) + ";" + tree + ";?Int"},
  };
  for (const auto& [l, r] : differ) {
    CAPTURE(l);
    CAPTURE(r);
    Type lt = R(l.c_str()), rt = R(r.c_str());
    Built b = make_grammar({}, {lt, rt});
    Verdict v = grammar_bisim(b.g, b.words[0], b.words[1]);
    REQUIRE(v.not_bisimilar());
    CHECK(trace_distinguishes({}, lt, rt, v.trace));
  }
}
