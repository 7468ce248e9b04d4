#include <algorithm>
#include <deque>
#include <unordered_map>
#include <unordered_set>

#include "fmo/kinding.hpp"
#include "fmo/lts.hpp"
#include "fmo/rename.hpp"
#include "hashing.hpp"

namespace fmo {

Verdict Verdict::yes(std::string method, std::size_t explored) {
  Verdict v;
  v.result = Result::Bisimilar;
  v.method = std::move(method);
  v.explored = explored;
  return v;
}

Verdict Verdict::no(std::vector<Label> trace, std::string method, std::size_t explored) {
  Verdict v;
  v.result = Result::NotBisimilar;
  v.trace = std::move(trace);
  v.method = std::move(method);
  v.explored = explored;
  return v;
}

Verdict Verdict::maybe(std::string reason, std::string method, std::size_t explored) {
  Verdict v;
  v.result = Result::Unknown;
  v.reason = std::move(reason);
  v.method = std::move(method);
  v.explored = explored;
  return v;
}

const char* result_name(Verdict::Result r) {
  switch (r) {
    case Verdict::Result::Bisimilar: return "Bisimilar";
    case Verdict::Result::NotBisimilar: return "NotBisimilar";
    case Verdict::Result::Unknown: return "Unknown";
  }
  return "?";
}

std::string trace_string(const std::vector<Label>& trace) {
  std::string out;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    if (i) out += " ";
    out += trace[i].str();
  }
  return out;
}

namespace {

struct PairHash {
  std::size_t operator()(const std::pair<Type, Type>& p) const { return mix(p.first.hash(), p.second.hash()); }
};

class TransitionCache {
 public:
  explicit TransitionCache(const KContext& ctx) : ctx_(ctx) {}
  const Transitions& get(const Type& t) {
    auto it = cache_.find(t);
    if (it != cache_.end()) return it->second;
    return cache_.emplace(t, transitions(ctx_, t)).first->second;
  }

 private:
  const KContext& ctx_;
  std::unordered_map<Type, Transitions, TypeHash> cache_;
};

// First label present on exactly one side, if any.
std::optional<Label> label_difference(const Transitions& a, const Transitions& b) {
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() || ib != b.end()) {
    if (ib == b.end() || (ia != a.end() && ia->first < ib->first)) return ia->first;
    if (ia == a.end() || ib->first < ia->first) return ib->first;
    ++ia;
    ++ib;
  }
  return std::nullopt;
}

}  // namespace

Verdict bounded_bisim(const KContext& ctx, const Type& t, const Type& u, const BisimLimits& limits) {
  const char* method = "oracle";
  struct Node {
    Type left, right;
    std::size_t parent;
    Label label;
    std::size_t depth;
  };
  std::vector<Node> nodes;
  std::deque<std::size_t> queue;
  std::unordered_set<std::pair<Type, Type>, PairHash> seen;
  TransitionCache cache(ctx);
  auto trace_to = [&](std::size_t idx, std::optional<Label> last) {
    std::vector<Label> trace;
    while (idx != 0) {
      trace.push_back(nodes[idx].label);
      idx = nodes[idx].parent;
    }
    std::reverse(trace.begin(), trace.end());
    if (last) trace.push_back(*last);
    return trace;
  };
  Type a = rename(t), b = rename(u);
  nodes.push_back({a, b, 0, Label{}, 0});
  seen.insert({a, b});
  queue.push_back(0);
  bool cut = false;
  try {
    while (!queue.empty()) {
      std::size_t idx = queue.front();
      queue.pop_front();
      if (nodes[idx].left == nodes[idx].right) continue;
      const Transitions& ta = cache.get(nodes[idx].left);
      const Transitions& tb = cache.get(nodes[idx].right);
      if (auto d = label_difference(ta, tb)) return Verdict::no(trace_to(idx, d), method, nodes.size());
      if (nodes[idx].depth >= limits.depth) {
        cut = true;
        continue;
      }
      for (const auto& [label, next_a] : ta) {
        const Type& next_b = tb.at(label);
        if (!seen.insert({next_a, next_b}).second) continue;
        if (nodes.size() >= limits.node_cap) return Verdict::maybe("node-cap", method, nodes.size());
        nodes.push_back({next_a, next_b, idx, label, nodes[idx].depth + 1});
        queue.push_back(nodes.size() - 1);
      }
    }
  } catch (const KindError& e) {
    return Verdict::maybe(std::string("non-normalising state: ") + e.what(), method, nodes.size());
  }
  if (cut) return Verdict::maybe("depth-exhausted", method, nodes.size());
  return Verdict::yes(method, nodes.size());
}

std::size_t replay(const KContext& ctx, const Type& t, const std::vector<Label>& trace) {
  Type cur = rename(t);
  std::size_t taken = 0;
  for (const auto& l : trace) {
    Transitions tr = transitions(ctx, cur);
    auto it = tr.find(l);
    if (it == tr.end()) break;
    cur = it->second;
    ++taken;
  }
  return taken;
}

bool trace_distinguishes(const KContext& ctx, const Type& t, const Type& u, const std::vector<Label>& trace) {
  if (trace.empty()) return false;
  std::size_t a = replay(ctx, t, trace);
  std::size_t b = replay(ctx, u, trace);
  return std::min(a, b) == trace.size() - 1 && std::max(a, b) == trace.size();
}

}  // namespace fmo
