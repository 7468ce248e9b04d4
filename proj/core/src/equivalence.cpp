#include "fmo/equivalence.hpp"

#include "fmo/fsa.hpp"
#include "fmo/grammar.hpp"
#include "fmo/kinding.hpp"
#include "fmo/rename.hpp"

namespace fmo {

const char* backend_name(Backend b) {
  switch (b) {
    case Backend::Auto: return "auto";
    case Backend::Grammar: return "grammar";
    case Backend::Fsa: return "fsa";
    case Backend::Oracle: return "oracle";
  }
  return "?";
}

std::optional<Backend> parse_backend(const std::string& s) {
  for (Backend b : {Backend::Auto, Backend::Grammar, Backend::Fsa, Backend::Oracle}) {
    if (s == backend_name(b)) return b;
  }
  return std::nullopt;
}

namespace {

std::optional<Verdict> try_fsa(const KContext& ctx, const Type& t, const Type& u, const EquivConfig& config) {
  auto a = build_fsa(ctx, t, config.fsa_cap);
  if (!a) return std::nullopt;
  auto b = build_fsa(ctx, u, config.fsa_cap);
  if (!b) return std::nullopt;
  return fsa_bisim(*a, *b);
}

Verdict run_grammar(const KContext& ctx, const Type& t, const Type& u, const EquivConfig& config) {
  GrammarBuilder builder(ctx);
  Word a = builder.word(t);
  Word b = builder.word(u);
  builder.finish();
  return grammar_bisim(builder.grammar(), a, b, {config.node_cap, config.depth_cap});
}

Verdict run_oracle(const KContext& ctx, const Type& t, const Type& u, const EquivConfig& config) {
  return bounded_bisim(ctx, t, u, {config.oracle_depth, config.node_cap});
}

}  // namespace

Verdict equivalent(const KContext& ctx, const Type& t, const Type& u, const EquivConfig& config) {
  Type rt = rename(t);
  Type ru = rename(u);
  kind_of_lenient(ctx, rt);
  kind_of_lenient(ctx, ru);
  bool simple = classify(rt) == Fragment::MuStarSemi && classify(ru) == Fragment::MuStarSemi;

  switch (config.backend) {
    case Backend::Fsa:
      if (auto v = try_fsa(ctx, rt, ru, config)) return *v;
      return Verdict::maybe("fsa: open", "fsa", 0);
    case Backend::Grammar:
      if (!simple) return Verdict::maybe("grammar: recursion at arrow kind", "grammar", 0);
      return run_grammar(ctx, rt, ru, config);
    case Backend::Oracle:
      return run_oracle(ctx, rt, ru, config);
    case Backend::Auto:
      break;
  }

  if (rt == ru) return Verdict::yes("syntactic", 0);
  std::string stages = "fsa: open";
  if (auto v = try_fsa(ctx, rt, ru, config)) return *v;
  if (simple) {
    Verdict g = run_grammar(ctx, rt, ru, config);
    if (!g.unknown()) return g;
    stages += "; grammar: " + g.reason;
  } else {
    stages += "; grammar: recursion at arrow kind";
  }
  Verdict o = run_oracle(ctx, rt, ru, config);
  if (o.unknown()) o.reason = stages + "; oracle: " + o.reason;
  return o;
}

}  // namespace fmo
