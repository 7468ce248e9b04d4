#include "fmo/rename.hpp"

#include <algorithm>

namespace fmo {

namespace {

// Multiset of canonical indexes that are unavailable for binders.
class Avoid {
 public:
  void add(std::uint32_t i) {
    if (i >= counts_.size()) counts_.resize(i + 1, 0);
    ++counts_[i];
  }
  void remove(std::uint32_t i) { --counts_[i]; }
  bool contains(std::uint32_t i) const { return i < counts_.size() && counts_[i] > 0; }

 private:
  std::vector<int> counts_;
};

class Renamer {
 public:
  explicit Renamer(const VarSet& avoid) {
    for (const auto& v : avoid) {
      if (v.is_canonical()) avoid_.add(v.index());
    }
  }

  void bind(VarName from, Type to) { env_.emplace_back(std::move(from), std::move(to)); }

  Type go(const Type& t) {
    if (!t.has_binders() && !touched(t)) return t;
    switch (t.tag()) {
      case Type::Tag::Const: return t;
      case Type::Tag::Var: {
        const Type* r = lookup(t.var());
        return r ? *r : t;
      }
      case Type::Tag::Abs: return go_abs(t);
      case Type::Tag::App: break;
    }
    std::vector<std::uint32_t> added;
    for_each_free_canonical(t.arg(), [&](std::uint32_t i) {
      avoid_.add(i);
      added.push_back(i);
    });
    Type f = go(t.fun());
    for (auto i : added) avoid_.remove(i);
    Type a = go(t.arg());
    if (f.same_node(t.fun()) && a.same_node(t.arg())) return t;
    return Type::app(std::move(f), std::move(a));
  }

 private:
  const Type* lookup(const VarName& v) const {
    for (auto it = env_.rbegin(); it != env_.rend(); ++it) {
      if (it->first == v) return &it->second;
    }
    return nullptr;
  }

  bool touched(const Type& t) const {
    if (env_.empty()) return false;
    for (const auto& v : t.free()) {
      if (lookup(v)) return true;
    }
    return false;
  }

  // Visits canonical indexes free in t after applying the environment.
  template <class F>
  void for_each_free_canonical(const Type& t, F&& f) const {
    for (const auto& v : t.free()) {
      const Type* r = lookup(v);
      if (!r) {
        if (v.is_canonical()) f(v.index());
        continue;
      }
      for (const auto& w : r->free()) {
        if (w.is_canonical()) f(w.index());
      }
    }
  }

  Type go_abs(const Type& t) {
    std::vector<std::uint32_t> scope;
    for_each_free_canonical(t, [&](std::uint32_t i) { scope.push_back(i); });
    std::sort(scope.begin(), scope.end());
    std::uint32_t idx = 1;
    while (avoid_.contains(idx) || std::binary_search(scope.begin(), scope.end(), idx)) ++idx;
    VarName fresh = VarName::canonical(idx);
    env_.emplace_back(t.binder(), Type::var(fresh));
    Type body = go(t.body());
    env_.pop_back();
    if (fresh == t.binder() && body.same_node(t.body())) return t;
    return Type::abs(std::move(fresh), t.kind(), std::move(body));
  }

  Avoid avoid_;
  std::vector<std::pair<VarName, Type>> env_;
};

}  // namespace

VarSet free_vars(const Type& t) { return VarSet(t.free().begin(), t.free().end()); }

VarName first_avail(const VarSet& avoid, const Type& abs) {
  std::uint32_t idx = 1;
  auto taken = [&](std::uint32_t i) {
    VarName v = VarName::canonical(i);
    return avoid.count(v) > 0 || abs.is_free(v);
  };
  while (taken(idx)) ++idx;
  return VarName::canonical(idx);
}

Type rename(const VarSet& avoid, const Type& t) { return Renamer(avoid).go(t); }

Type rename(const Type& t) {
  static const VarSet kEmpty;
  return Renamer(kEmpty).go(t);
}

Type rename_subst(const Type& t, const std::vector<std::pair<VarName, Type>>& subst) {
  static const VarSet kEmpty;
  Renamer r(kEmpty);
  for (const auto& [v, u] : subst) r.bind(v, u);
  return r.go(t);
}

Type substitute(const Type& t, const Type& u, const VarName& v) {
  if (!t.is_free(v)) return t;
  switch (t.tag()) {
    case Type::Tag::Var: return u;
    case Type::Tag::Abs: return Type::abs(t.binder(), t.kind(), substitute(t.body(), u, v));
    case Type::Tag::App:
      return Type::app(substitute(t.fun(), u, v), substitute(t.arg(), u, v));
    case Type::Tag::Const: break;
  }
  return t;
}

bool is_renamed(const Type& t) { return rename(t) == t; }

}  // namespace fmo
