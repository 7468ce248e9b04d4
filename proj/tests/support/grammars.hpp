#pragma once

// Grammar construction and comparison helpers shared by the grammar tests and
// the acceptance checks.

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <vector>

#include "fmo/grammar.hpp"
#include "fmo/lts.hpp"

namespace fmo::testing {

struct Built {
  SimpleGrammar g;
  std::vector<Word> words;
};

inline Built make_grammar(const KContext& ctx, const std::vector<Type>& types) {
  GrammarBuilder b(ctx);
  Built out;
  for (const auto& t : types) out.words.push_back(b.word(t));
  b.finish();
  out.g = b.grammar();
  return out;
}

inline std::set<Label> labels(const std::map<Label, Word>& m) {
  std::set<Label> out;
  for (const auto& [l, _] : m) out.insert(l);
  return out;
}
inline std::set<Label> labels(const Transitions& m) {
  std::set<Label> out;
  for (const auto& [l, _] : m) out.insert(l);
  return out;
}

// Grammar isomorphism from the given start symbols: a bijection of reachable
// nonterminals preserving every production.
inline bool isomorphic(const SimpleGrammar& g, NonTerm x, const SimpleGrammar& h, NonTerm y) {
  std::map<NonTerm, NonTerm> fwd, back;
  std::vector<std::pair<NonTerm, NonTerm>> todo{{x, y}};
  auto bind = [&](NonTerm a, NonTerm b) {
    auto f = fwd.find(a);
    auto r = back.find(b);
    if (f != fwd.end() || r != back.end()) return f != fwd.end() && r != back.end() && f->second == b;
    fwd[a] = b;
    back[b] = a;
    todo.emplace_back(a, b);
    return true;
  };
  fwd[x] = y;
  back[y] = x;
  while (!todo.empty()) {
    auto [a, b] = todo.back();
    todo.pop_back();
    if (a == kBottom || b == kBottom) {
      if (a != b) return false;
      continue;
    }
    const auto& pa = g.of(a);
    const auto& pb = h.of(b);
    if (labels(pa) != labels(pb)) return false;
    for (const auto& [l, wa] : pa) {
      const Word& wb = pb.at(l);
      if (wa.size() != wb.size()) return false;
      for (std::size_t i = 0; i < wa.size(); ++i) {
        if ((wa[i] == kBottom) != (wb[i] == kBottom)) return false;
        if (wa[i] != kBottom && !bind(wa[i], wb[i])) return false;
      }
    }
  }
  return true;
}

// Lockstep label-set comparison of the type LTS and the grammar LTS.
inline bool same_behaviour(const KContext& ctx, const SimpleGrammar& g, const Type& t, const Word& w, int depth) {
  Transitions tt = transitions(ctx, t);
  auto tw = g.step(w);
  if (labels(tt) != labels(tw)) return false;
  if (depth == 0) return true;
  for (const auto& [l, next] : tt) {
    if (!same_behaviour(ctx, g, next, tw.at(l), depth - 1)) return false;
  }
  return true;
}


// A bijection over every nonterminal, reachable or not, that maps each
// production of g onto a production of h. Exhaustive, for small grammars.
inline bool isomorphic_all(const SimpleGrammar& g, const SimpleGrammar& h) {
  if (g.size() != h.size() || g.production_count() != h.production_count()) return false;
  std::vector<NonTerm> perm(g.size());
  std::iota(perm.begin(), perm.end(), 0);
  auto image = [&](const Word& w) {
    Word out;
    for (NonTerm x : w) out.push_back(x == kBottom ? kBottom : perm[static_cast<std::size_t>(x)]);
    return out;
  };
  do {
    bool ok = true;
    for (std::size_t x = 0; x < g.size() && ok; ++x) {
      const auto& target = h.of(perm[x]);
      if (labels(g.of(static_cast<NonTerm>(x))) != labels(target)) ok = false;
      for (const auto& [l, w] : g.of(static_cast<NonTerm>(x))) {
        if (ok && target.at(l) != image(w)) ok = false;
      }
    }
    if (ok) return true;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return false;
}

}  // namespace fmo::testing
