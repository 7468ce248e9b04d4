#include <algorithm>
#include <deque>
#include <numeric>
#include <unordered_map>

#include "fmo/fsa.hpp"
#include "fmo/rename.hpp"

namespace fmo {

namespace {

// States much larger than the initial type signal an unbounded unfolding.
constexpr std::size_t kGrowthFactor = 8;

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent_[a] = b;
    return true;
  }

 private:
  std::vector<std::size_t> parent_;
};

}  // namespace

std::optional<Fsa> build_fsa(const KContext& ctx, const Type& t, std::size_t cap) {
  Fsa fsa;
  std::unordered_map<Type, std::size_t, TypeHash> index;
  Type start = rename(t);
  std::size_t size_limit = kGrowthFactor * (start.size() + 1);
  fsa.states.push_back(start);
  fsa.delta.emplace_back();
  index.emplace(start, 0);
  for (std::size_t i = 0; i < fsa.states.size(); ++i) {
    Transitions next = transitions(ctx, fsa.states[i]);
    for (auto& [label, succ] : next) {
      auto it = index.find(succ);
      if (it == index.end()) {
        if (fsa.states.size() >= cap || succ.size() > size_limit) return std::nullopt;
        it = index.emplace(succ, fsa.states.size()).first;
        fsa.states.push_back(succ);
        fsa.delta.emplace_back();
      }
      fsa.delta[i].emplace(label, it->second);
    }
  }
  return fsa;
}

Verdict fsa_bisim(const Fsa& a, const Fsa& b) {
  // Hopcroft-Karp on the disjoint union; states of b are offset by a.size().
  const std::size_t off = a.size();
  UnionFind uf(a.size() + b.size());
  struct Item {
    std::size_t x, y;
    std::size_t parent;
    Label label;
  };
  std::vector<Item> items{{a.initial, b.initial, 0, Label{}}};
  std::deque<std::size_t> queue{0};
  uf.unite(a.initial, off + b.initial);
  while (!queue.empty()) {
    std::size_t idx = queue.front();
    queue.pop_front();
    const auto& da = a.delta[items[idx].x];
    const auto& db = b.delta[items[idx].y];
    auto ia = da.begin();
    auto ib = db.begin();
    std::optional<Label> odd;
    while (ia != da.end() || ib != db.end()) {
      if (ib == db.end() || (ia != da.end() && ia->first < ib->first)) {
        odd = ia->first;
        break;
      }
      if (ia == da.end() || ib->first < ia->first) {
        odd = ib->first;
        break;
      }
      ++ia;
      ++ib;
    }
    if (odd) {
      std::vector<Label> trace{*odd};
      for (std::size_t i = idx; i != 0; i = items[i].parent) trace.push_back(items[i].label);
      std::reverse(trace.begin(), trace.end());
      return Verdict::no(std::move(trace), "fsa", items.size());
    }
    for (const auto& [label, sx] : da) {
      std::size_t sy = db.at(label);
      if (!uf.unite(sx, off + sy)) continue;
      items.push_back({sx, sy, idx, label});
      queue.push_back(items.size() - 1);
    }
  }
  return Verdict::yes("fsa", items.size());
}

}  // namespace fmo
