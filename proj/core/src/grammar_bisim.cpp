#include <algorithm>
#include <deque>
#include <unordered_set>

#include "fmo/grammar.hpp"
#include "hashing.hpp"

namespace fmo {

namespace {

using Pair = std::pair<Word, Word>;

std::size_t word_hash(const Word& w) {
  std::size_t h = 0x77u;
  for (NonTerm x : w) h = mix(h, static_cast<std::size_t>(x + 2));
  return h;
}

struct WordHash {
  std::size_t operator()(const Word& w) const { return word_hash(w); }
};
struct PairHash {
  std::size_t operator()(const Pair& p) const { return mix(word_hash(p.first), word_hash(p.second)); }
};

constexpr std::size_t kRewriteBudget = 64;
constexpr std::uint64_t kMaxReducingPath = 4096;

class Checker {
 public:
  Checker(const SimpleGrammar& g, const GrammarLimits& limits) : g_(g), limits_(limits), norms_(norms(g)) {}

  Verdict run(const Word& a, const Word& b) {
    Word pa = prune(a), pb = prune(b);
    if (pa == pb) return Verdict::yes("grammar", 0);
    refute_nodes_.push_back({pa, pb, 0, Label{}});
    refute_seen_.insert({pa, pb});
    refute_queue_.push_back(0);
    tree_.push_back({{oriented(pa, pb)}, -1, 0, true});
    tree_queue_.push_back(0);
    while (true) {
      if (!refute_queue_.empty() && refute_nodes_.size() < limits_.node_cap) {
        if (auto v = refute_step()) return *v;
      } else if (refute_queue_.empty()) {
        return Verdict::yes("grammar", explored());
      }
      if (!tree_queue_.empty() && tree_.size() < limits_.node_cap) {
        if (tree_step()) return Verdict::yes("grammar", explored());
      }
      bool refute_done = refute_nodes_.size() >= limits_.node_cap;
      bool tree_done = tree_queue_.empty() || tree_.size() >= limits_.node_cap;
      if (refute_done && tree_done) {
        return Verdict::maybe(depth_cut_ && tree_.size() < limits_.node_cap ? "depth-cap" : "node-cap", "grammar",
                              explored());
      }
    }
  }

 private:
  struct RefuteNode {
    Word a, b;
    std::size_t parent;
    Label label;
  };
  struct TreeNode {
    std::vector<Pair> pairs;
    int parent;
    std::size_t depth;
    bool main;
  };

  std::size_t explored() const { return refute_nodes_.size() + tree_.size(); }

  bool normed(NonTerm x) const { return x != kBottom && norms_[static_cast<std::size_t>(x)].has_value(); }

  Word prune(Word w) const {
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (!normed(w[i])) {
        w.resize(i + 1);
        break;
      }
    }
    return w;
  }

  std::optional<std::uint64_t> norm(const Word& w) const {
    std::uint64_t total = 0;
    for (NonTerm x : w) {
      if (!normed(x)) return std::nullopt;
      total += *norms_[static_cast<std::size_t>(x)];
    }
    return total;
  }

  static Pair oriented(Word a, Word b) {
    if (b < a) std::swap(a, b);
    return {std::move(a), std::move(b)};
  }

  std::map<Label, Word> step(const Word& w) const {
    auto out = g_.step(w);
    for (auto& [_, next] : out) next = prune(std::move(next));
    return out;
  }

  // Breadth-first search of the product LTS: a complete refutation procedure,
  // and a proof of bisimilarity when the reachable pairs close.
  std::optional<Verdict> refute_step() {
    std::size_t idx = refute_queue_.front();
    refute_queue_.pop_front();
    const Word a = refute_nodes_[idx].a;
    const Word b = refute_nodes_[idx].b;
    if (a == b) return std::nullopt;
    auto ta = step(a);
    auto tb = step(b);
    auto ia = ta.begin();
    auto ib = tb.begin();
    while (ia != ta.end() || ib != tb.end()) {
      if (ib == tb.end() || (ia != ta.end() && ia->first < ib->first)) return refutation(idx, ia->first);
      if (ia == ta.end() || ib->first < ia->first) return refutation(idx, ib->first);
      ++ia;
      ++ib;
    }
    for (auto& [label, na] : ta) {
      Word& nb = tb.at(label);
      if (!refute_seen_.insert({na, nb}).second) continue;
      refute_nodes_.push_back({na, nb, idx, label});
      refute_queue_.push_back(refute_nodes_.size() - 1);
    }
    return std::nullopt;
  }

  Verdict refutation(std::size_t idx, const Label& last) {
    std::vector<Label> trace{last};
    while (idx != 0) {
      trace.push_back(refute_nodes_[idx].label);
      idx = refute_nodes_[idx].parent;
    }
    std::reverse(trace.begin(), trace.end());
    return Verdict::no(std::move(trace), "grammar", explored());
  }

  // Expansion tree. Returns true when some branch reaches the empty node.
  bool tree_step() {
    std::size_t idx = tree_queue_.front();
    tree_queue_.pop_front();
    const TreeNode node = tree_[idx];
    if (node.pairs.empty()) return true;
    if (node.depth >= limits_.depth_cap) {
      depth_cut_ = true;
      return false;
    }
    std::vector<Pair> children;
    for (const auto& [a, b] : node.pairs) {
      if (a.empty() != b.empty()) return false;
      auto ta = step(a);
      auto tb = step(b);
      if (ta.size() != tb.size()) return false;
      for (auto& [label, na] : ta) {
        auto it = tb.find(label);
        if (it == tb.end()) return false;
        children.push_back(oriented(std::move(na), std::move(it->second)));
      }
    }
    std::vector<const Pair*> rules;
    std::unordered_set<Pair, PairHash> rule_set;
    for (int p = static_cast<int>(idx); p >= 0; p = tree_[static_cast<std::size_t>(p)].parent) {
      for (const auto& pr : tree_[static_cast<std::size_t>(p)].pairs) {
        if (rule_set.insert(pr).second) rules.push_back(&pr);
      }
    }
    auto plain = simplify(std::move(children), rules, rule_set);
    if (!plain) return false;
    if (node.main) {
      if (auto split = bpa(*plain)) {
        if (auto s = simplify(std::move(*split), rules, rule_set)) {
          if (*s != *plain) enqueue(std::move(*s), idx, false);
        }
      }
      enqueue(std::move(*plain), idx, true);
    } else {
      auto split = bpa(*plain);
      if (!split) return false;
      auto s = simplify(std::move(*split), rules, rule_set);
      if (!s) return false;
      enqueue(std::move(*s), idx, false);
    }
    return false;
  }

  void enqueue(std::vector<Pair> pairs, std::size_t parent, bool main) {
    tree_.push_back({std::move(pairs), static_cast<int>(parent), tree_[parent].depth + 1, main});
    tree_queue_.push_back(tree_.size() - 1);
  }

  std::optional<std::vector<Pair>> simplify(std::vector<Pair> pairs, const std::vector<const Pair*>& rules,
                                            const std::unordered_set<Pair, PairHash>& rule_set) const {
    std::vector<Pair> out;
    std::unordered_set<Pair, PairHash> here;
    for (auto& p : pairs) {
      if (p.first == p.second) continue;
      if (p.first.empty() != p.second.empty()) return std::nullopt;
      auto na = norm(p.first), nb = norm(p.second);
      if (na.has_value() != nb.has_value() || (na && *na != *nb)) return std::nullopt;
      if (!here.insert(p).second) continue;
      if (rule_set.count(p) || derivable(p.first, p.second, rules)) continue;
      out.push_back(std::move(p));
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  // Bounded search of the congruence closure of the ancestor pairs:
  // substring rewriting in both directions from `a` towards `b`.
  bool derivable(const Word& a, const Word& b, const std::vector<const Pair*>& rules) const {
    if (rules.empty()) return false;
    std::unordered_set<Word, WordHash> seen{a};
    std::deque<Word> queue{a};
    while (!queue.empty() && seen.size() < kRewriteBudget) {
      Word w = std::move(queue.front());
      queue.pop_front();
      for (const Pair* r : rules) {
        for (int dir = 0; dir < 2; ++dir) {
          const Word& from = dir == 0 ? r->first : r->second;
          const Word& to = dir == 0 ? r->second : r->first;
          if (from.empty() || from.size() > w.size()) continue;
          for (std::size_t i = 0; i + from.size() <= w.size(); ++i) {
            if (!std::equal(from.begin(), from.end(), w.begin() + static_cast<std::ptrdiff_t>(i))) continue;
            Word next(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(i));
            next.insert(next.end(), to.begin(), to.end());
            next.insert(next.end(), w.begin() + static_cast<std::ptrdiff_t>(i + from.size()), w.end());
            next = prune(std::move(next));
            if (next == b) return true;
            if (seen.size() < kRewriteBudget && seen.insert(next).second) queue.push_back(std::move(next));
          }
        }
      }
    }
    return false;
  }

  const std::vector<Label>& reducing_path(NonTerm x) {
    auto it = paths_.find(x);
    if (it != paths_.end()) return it->second;
    std::vector<Label> path;
    std::uint64_t target = *norms_[static_cast<std::size_t>(x)];
    for (const auto& [label, body] : g_.of(x)) {
      auto n = norm(body);
      if (n && *n + 1 == target) {
        path.push_back(label);
        for (NonTerm y : body) {
          const auto& sub = reducing_path(y);
          path.insert(path.end(), sub.begin(), sub.end());
        }
        break;
      }
    }
    return paths_.emplace(x, std::move(path)).first->second;
  }

  // Prefix splitting: (Xg, Yd) with norm(X) <= norm(Y) becomes (Xg', Y) and
  // (g, g'd), where Y moves to g' along a norm-reducing path of X.
  std::optional<std::vector<Pair>> bpa(const std::vector<Pair>& pairs) {
    std::vector<Pair> out;
    for (const auto& p : pairs) {
      const Word* a = &p.first;
      const Word* b = &p.second;
      if (a->empty() || b->empty() || (a->size() == 1 && b->size() == 1) || !normed(a->front()) ||
          !normed(b->front())) {
        out.push_back(p);
        continue;
      }
      if (*norms_[static_cast<std::size_t>(a->front())] > *norms_[static_cast<std::size_t>(b->front())]) {
        std::swap(a, b);
      }
      NonTerm x = a->front();
      if (*norms_[static_cast<std::size_t>(x)] > kMaxReducingPath) {
        out.push_back(p);
        continue;
      }
      Word cur{b->front()};
      for (const Label& l : reducing_path(x)) {
        auto next = g_.step(cur);
        auto it = next.find(l);
        if (it == next.end()) return std::nullopt;
        cur = std::move(it->second);
      }
      Word left{x};
      left.insert(left.end(), cur.begin(), cur.end());
      Word rest_a(a->begin() + 1, a->end());
      Word rest_b = cur;
      rest_b.insert(rest_b.end(), b->begin() + 1, b->end());
      out.push_back(oriented(prune(std::move(left)), Word{b->front()}));
      out.push_back(oriented(prune(std::move(rest_a)), prune(std::move(rest_b))));
    }
    return out;
  }

  const SimpleGrammar& g_;
  GrammarLimits limits_;
  std::vector<Norm> norms_;
  std::unordered_map<NonTerm, std::vector<Label>> paths_;

  std::vector<RefuteNode> refute_nodes_;
  std::unordered_set<Pair, PairHash> refute_seen_;
  std::deque<std::size_t> refute_queue_;

  std::vector<TreeNode> tree_;
  std::deque<std::size_t> tree_queue_;
  bool depth_cut_ = false;
};

}  // namespace

Verdict grammar_bisim(const SimpleGrammar& g, const Word& a, const Word& b, const GrammarLimits& limits) {
  return Checker(g, limits).run(a, b);
}

}  // namespace fmo
