// One PASS/FAIL line per acceptance criterion. Run from the tests directory.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>

#include "fmo/equivalence.hpp"
#include "fmo/eval.hpp"
#include "fmo/fog.hpp"
#include "fmo/fsa.hpp"
#include "fmo/grammar.hpp"
#include "fmo/kinding.hpp"
#include "fmo/lts.hpp"
#include "fmo/parse.hpp"
#include "fmo/rename.hpp"
#include "fmo/term.hpp"
#include "fmo/typecheck.hpp"
#include "support/derived.hpp"
#include "support/gen.hpp"
#include "support/grammars.hpp"
#include "support/rewrite.hpp"
#include "support/terms.hpp"

using namespace fmo;

namespace {

constexpr double kGrammarSeconds = 1.0;
constexpr double kAxiomSeconds = 30.0;
constexpr int kAxiomTriples = 100;
constexpr int kDerivedInstances = 40;
constexpr int kAbstractionTypes = 500;
constexpr std::size_t kAbstractionDepth = 6;
constexpr int kAgreementPairs = 500;
constexpr std::size_t kOracleDepth = 12;
constexpr int kClosingPairs = 200;
constexpr std::size_t kFsaCap = 4096;
constexpr std::size_t kTraceDepth = 10;
constexpr std::size_t kFuel = 10000;
constexpr int kSeeds = 5;
constexpr int kPreservationTerms = 300;

struct Result {
  bool pass;
  std::string detail;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Type R(const char* s) { return rename(parse_type(s)); }

const char* kTreeC = "\\a:T. mu t:S. &{Leaf: Skip, Node: t;?a;t}";

Result tree_grammar() {
  auto start = std::chrono::steady_clock::now();
  GrammarBuilder b;
  Word w = b.word(R(kTreeC));
  b.finish();
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  SimpleGrammar expected;
  expected.productions.resize(6);
  Label lam = Label::abs(VarName::canonical(1), Kind::functional());
  TypeConst choice = TypeConst::choice(View::External, {"Leaf", "Node"});
  Label leaf = Label::const_head(choice, 1);
  Label node = Label::const_head(choice, 2);
  Label in1 = Label::const_head(TypeConst::msg(Polarity::In), 1);
  Label in2 = Label::const_head(TypeConst::msg(Polarity::In), 2);
  Label var = Label::var_head(VarName::canonical(1), 0);
  expected.productions[0] = {{lam, {1}}};
  expected.productions[1] = {{leaf, {}}, {node, {3}}};
  expected.productions[2] = {{leaf, {}}, {node, {3}}};
  expected.productions[3] = {{leaf, {4, 1}}, {node, {3, 4, 1}}};
  expected.productions[4] = {{in1, {5, kBottom}}, {in2, {}}};
  expected.productions[5] = {{var, {}}};

  const SimpleGrammar& g = b.grammar();
  bool iso = testing::isomorphic_all(g, expected) && w.size() == 1 && testing::isomorphic(g, w[0], expected, 0);
  char buf[160];
  std::snprintf(buf, sizeof buf, "%zu productions, isomorphic=%d, %.3f s (limit %.0f s)", g.production_count(),
                iso, secs, kGrammarSeconds);
  return {iso && g.production_count() == 10 && secs < kGrammarSeconds, buf};
}

Result axioms() {
  auto start = std::chrono::steady_clock::now();
  testing::TypeGen gen(1001);
  const KContext& ctx = gen.context();
  EquivConfig cfg;
  cfg.backend = Backend::Grammar;
  int holds = 0, checked = 0;
  std::string first_failure;
  for (int i = 0; i < kAxiomTriples; ++i) {
    Type t = gen.kinded_session(3);
    Type u = gen.kinded_session(3);
    Type v = gen.kinded_session(2);
    std::vector<std::pair<Type, Type>> cases = {
        {build::seq(build::skip(), t), t},
        {build::seq(build::end(), t), build::end()},
        {build::seq(build::seq(t, u), v), build::seq(t, build::seq(u, v))},
        {build::seq(build::choice(View::External, {{"A", t}, {"B", u}}), v),
         build::choice(View::External, {{"A", build::seq(t, v)}, {"B", build::seq(u, v)}})},
    };
    for (const auto& [x, y] : cases) {
      ++checked;
      Verdict r = equivalent(ctx, x, y, cfg);
      if (r.bisimilar()) {
        ++holds;
      } else if (first_failure.empty()) {
        first_failure = "; first failure " + to_string(x) + " vs " + to_string(y) + ": " + result_name(r.result);
      }
    }
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  char buf[160];
  std::snprintf(buf, sizeof buf, "%d/%d Bisimilar, %.2f s (limit %.0f s)", holds, checked, secs, kAxiomSeconds);
  return {holds == checked && secs < kAxiomSeconds, buf + first_failure};
}

Result derived_rules() {
  testing::DerivedRules rules(testing::derived_context());
  const auto& corpus = testing::derived_corpus();
  int agree = 0, positive = 0;
  std::set<int> covered;
  std::string first_failure;
  for (const auto& inst : corpus) {
    covered.insert(inst.rule);
    bool lhs = rules.eq(parse_type(inst.t), parse_type(inst.r));
    bool rhs = rules.holds(inst.rule, parse_type(inst.t), parse_type(inst.r));
    positive += lhs;
    if (lhs == rhs) {
      ++agree;
    } else if (first_failure.empty()) {
      first_failure = "; rule " + std::to_string(inst.rule) + " fails on " + inst.t + " vs " + inst.r;
    }
  }
  char buf[160];
  std::snprintf(buf, sizeof buf, "%d/%zu instances agree (%d equivalent), %zu rules covered", agree, corpus.size(),
                positive, covered.size());
  bool pass = agree == static_cast<int>(corpus.size()) && corpus.size() == kDerivedInstances && covered.size() == 15;
  return {pass, buf + first_failure};
}

Result kinding() {
  int ok = 0;
  auto non_normalising = [&](const char* s) {
    try {
      kind_of({}, parse_type(s));
    } catch (const KindError& e) {
      ok += e.reason() == KindError::Reason::NonNormalising;
    }
  };
  non_normalising("mu a:T. a");
  non_normalising("mu a:S. Skip;a");
  non_normalising("mu a:S. Dual a");
  ok += kind_of({}, parse_type(kTreeC)) == Kind::arrow(Kind::functional(), Kind::session());
  ok += kind_of({}, parse_type("(;)")) == Kind::arrow(Kind::session(), Kind::arrow(Kind::session(), Kind::session()));
  return {ok == 5, std::to_string(ok) + "/5 verdicts match"};
}

Result full_abstraction() {
  testing::TypeGen gen(505);
  const KContext& ctx = gen.context();
  int mismatches = 0, tested = 0;
  while (tested < kAbstractionTypes) {
    Type t = gen.kinded_session(4);
    if (classify(t) != Fragment::MuStarSemi) continue;
    ++tested;
    GrammarBuilder b(ctx);
    Word w = b.word(t);
    b.finish();
    mismatches += !testing::same_behaviour(ctx, b.grammar(), t, w, static_cast<int>(kAbstractionDepth));
  }
  return {mismatches == 0, std::to_string(tested) + " types, " + std::to_string(mismatches) + " mismatches"};
}

Result backend_agreement() {
  testing::TypeGen gen(606);
  const KContext& ctx = gen.context();
  int decisive = 0, disagree = 0, grammar_unknown = 0;
  for (int i = 0; i < kAgreementPairs; ++i) {
    auto [t, u] = testing::random_pair(gen, 3);
    testing::Built b = testing::make_grammar(ctx, {t, u});
    Verdict g = grammar_bisim(b.g, b.words[0], b.words[1]);
    grammar_unknown += g.unknown();
    Verdict o = bounded_bisim(ctx, t, u, {kOracleDepth, 100000});
    if (o.unknown() || g.unknown()) continue;
    ++decisive;
    disagree += o.result != g.result;
  }
  int closing = 0, fsa_disagree = 0;
  while (closing < kClosingPairs) {
    auto [t, u] = testing::random_pair(gen, 3);
    auto a = build_fsa(ctx, t, kFsaCap);
    auto c = build_fsa(ctx, u, kFsaCap);
    if (!a || !c) continue;
    ++closing;
    testing::Built b = testing::make_grammar(ctx, {t, u});
    fsa_disagree += fsa_bisim(*a, *c).result != grammar_bisim(b.g, b.words[0], b.words[1]).result;
  }
  char buf[200];
  std::snprintf(buf, sizeof buf,
                "oracle decisive on %d/%d pairs, %d disagreements, %d grammar unknown; %d closing pairs, %d "
                "disagreements",
                decisive, kAgreementPairs, disagree, grammar_unknown, closing, fsa_disagree);
  return {disagree == 0 && fsa_disagree == 0, buf};
}

Result l3_encoding() {
  Fog g = parse_fog(slurp("data/l3.fog"));
  FogEncoding enc(g);
  bool traces = encoded_traces(enc.start(), kTraceDepth) == fog_traces(g, g.start, kTraceDepth);
  Type swapped = enc.encode(parse_fog_expr(g, "X B A"));
  Verdict v = equivalent({}, enc.start(), swapped);
  bool replay = v.not_bisimilar() && trace_distinguishes({}, enc.start(), swapped, v.trace);
  std::string detail = std::string("depth-10 traces ") + (traces ? "coincide" : "differ") + "; X A B vs X B A " +
                       result_name(v.result);
  if (v.not_bisimilar()) detail += " via " + trace_string(v.trace) + (replay ? " (replayed)" : " (not replayable)");
  return {traces && replay, detail};
}

Result language_corpus() {
  std::string src = slurp("data/fold.fmo");
  bool accepted = false, rejected = false;
  try {
    auto types = typecheck_program(parse_program(src));
    accepted = equivalent({}, types.at("system"), parse_type("Bool")).bisimilar();
  } catch (const std::exception&) {
  }
  std::string variant = src;
  auto at = variant.find("in close c,");
  if (at != std::string::npos) {
    variant.replace(at, std::string("in close c,").size(), "in {},");
    try {
      typecheck_program(parse_program(variant));
    } catch (const TypeError& e) {
      rejected = e.kind() == TypeError::Kind::LinearityViolation;
    }
  }

  Program prog = parse_program(slurp("data/fold_run.fmo"));
  bool run_typed = true;
  try {
    typecheck_program(prog);
  } catch (const std::exception&) {
    run_typed = false;
  }
  Definitions defs = program_definitions(prog);
  Term boolean_true = Term::variant("True", Term::unit(), parse_type("Bool"));
  bool runs = run_typed, errors = false;
  std::optional<Term> first;
  for (int seed = 1; seed <= kSeeds; ++seed) {
    Scheduler sched(static_cast<std::uint64_t>(seed));
    Process p = Process::main(Term::var("main"));
    std::size_t steps = 0;
    for (; steps < kFuel; ++steps) {
      errors |= detect_error(p, defs).has_value();
      auto next = proc_step(p, sched, defs);
      if (!next) break;
      p = *next;
    }
    bool value = steps < kFuel && p.threads.size() == 1 && is_value(p.threads[0].term) &&
                 p.threads[0].term == boolean_true;
    if (!first && value) first = p.threads[0].term;
    runs &= value && first && *first == p.threads[0].term;
  }
  std::string detail = std::string("typechecks=") + (accepted ? "yes" : "no") +
                       ", without Done close=" + (rejected ? "LinearityViolation" : "other") +
                       ", runs to True on 5 seeds=" + (runs ? "yes" : "no") + ", runtime errors=" + (errors ? "yes" : "no");
  return {accepted && rejected && runs && !errors, detail};
}

Result preservation() {
  testing::TermGen gen(9009);
  const Globals& globals = testing::TermGen::globals();
  const Definitions& defs = testing::TermGen::definitions();
  int failures = 0;
  std::size_t steps = 0;
  for (int i = 0; i < kPreservationTerms; ++i) {
    Type ty = gen.type(2);
    Term t = gen.term(ty, 4);
    try {
      Type first = synth({}, {}, t, globals).type;
      bool ok = equivalent({}, first, ty).bisimilar();
      while (ok) {
        auto next = term_step(t, defs);
        if (!next) {
          ok = is_value(t);
          break;
        }
        t = *next;
        ++steps;
        SynthResult r = synth({}, {}, t, globals);
        ok = r.remaining.empty() && equivalent({}, r.type, first).bisimilar();
      }
      failures += !ok;
    } catch (const std::exception&) {
      ++failures;
    }
  }
  return {failures == 0, std::to_string(kPreservationTerms) + " terms, " + std::to_string(steps) + " steps, " +
                             std::to_string(failures) + " failures"};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Result()>>> criteria = {
      {"TreeC grammar reproduction", tree_grammar},
      {"Monoid and distributivity axioms", axioms},
      {"Derived rules", derived_rules},
      {"Kinding verdicts", kinding},
      {"Full abstraction sampling", full_abstraction},
      {"Backend agreement", backend_agreement},
      {"L3 encoding", l3_encoding},
      {"Language corpus", language_corpus},
      {"Preservation", preservation},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Result r;
    try {
      r = criteria[i].second();
    } catch (const std::exception& e) {
      r = {false, std::string("exception: ") + e.what()};
    }
    failed += !r.pass;
    std::printf("%s %zu %s: %s\n", r.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, r.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
