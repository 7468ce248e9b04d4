#include "fmo/kinding.hpp"

#include <memory>
#include <unordered_map>

#include "fmo/reduce.hpp"
#include "fmo/rename.hpp"

namespace fmo {

KindError::KindError(Reason reason, const std::string& message, Type witness)
    : std::runtime_error(message), reason_(reason), witness_(std::move(witness)) {}

const char* reason_name(KindError::Reason r) {
  switch (r) {
    case KindError::Reason::NotPreKinded: return "NotPreKinded";
    case KindError::Reason::NonNormalising: return "NonNormalising";
    case KindError::Reason::HigherKindRecursion: return "HigherKindRecursion";
  }
  return "?";
}

const char* fragment_name(Fragment f) { return f == Fragment::MuStarSemi ? "MuStarSemi" : "FullMu"; }

namespace {

// A kind with an extra leaf standing for an unresolved proper kind.
struct Pat {
  enum class Tag { Star, S, T, Arrow } tag;
  std::shared_ptr<const Pat> dom, cod;
};
using PatPtr = std::shared_ptr<const Pat>;

PatPtr leaf(Pat::Tag t) { return std::make_shared<const Pat>(Pat{t, nullptr, nullptr}); }
PatPtr star() {
  static const PatPtr p = leaf(Pat::Tag::Star);
  return p;
}
PatPtr arrow(PatPtr d, PatPtr c) {
  return std::make_shared<const Pat>(Pat{Pat::Tag::Arrow, std::move(d), std::move(c)});
}

PatPtr from_kind(const Kind& k) {
  switch (k.tag()) {
    case Kind::Tag::Session: {
      static const PatPtr p = leaf(Pat::Tag::S);
      return p;
    }
    case Kind::Tag::Functional: {
      static const PatPtr p = leaf(Pat::Tag::T);
      return p;
    }
    case Kind::Tag::Arrow: return arrow(from_kind(k.domain()), from_kind(k.codomain()));
  }
  return nullptr;
}

Kind to_kind(const PatPtr& p) {
  switch (p->tag) {
    case Pat::Tag::S: return Kind::session();
    case Pat::Tag::Star:
    case Pat::Tag::T: return Kind::functional();
    case Pat::Tag::Arrow: return Kind::arrow(to_kind(p->dom), to_kind(p->cod));
  }
  return Kind::functional();
}

bool proper(const PatPtr& p) { return p->tag != Pat::Tag::Arrow; }

// Each star occurs once per constant, so matching needs no unification.
bool fits(const PatPtr& expected, const PatPtr& actual) {
  if (expected->tag == Pat::Tag::Star) return proper(actual);
  if (actual->tag == Pat::Tag::Star) return proper(expected);
  if (expected->tag != actual->tag) return false;
  if (expected->tag != Pat::Tag::Arrow) return true;
  return fits(expected->dom, actual->dom) && fits(expected->cod, actual->cod);
}

PatPtr const_pattern(const TypeConst& c) {
  const PatPtr s = from_kind(Kind::session());
  const PatPtr t = from_kind(Kind::functional());
  auto chain = [](std::size_t n, const PatPtr& arg, const PatPtr& res) {
    PatPtr p = res;
    for (std::size_t i = 0; i < n; ++i) p = arrow(arg, p);
    return p;
  };
  switch (c.tag) {
    case ConstTag::Arrow: return arrow(star(), arrow(star(), t));
    case ConstTag::Record:
    case ConstTag::Variant: return chain(c.labels.size(), star(), t);
    case ConstTag::Forall: {
      PatPtr k = from_kind(c.kind);
      return arrow(arrow(k, star()), t);
    }
    case ConstTag::Mu: {
      PatPtr k = from_kind(c.kind);
      return arrow(arrow(k, k), k);
    }
    case ConstTag::Skip:
    case ConstTag::End: return s;
    case ConstTag::Msg: return arrow(star(), s);
    case ConstTag::Semi: return arrow(s, arrow(s, s));
    case ConstTag::Choice: return chain(c.labels.size(), s, s);
    case ConstTag::Dual: return arrow(s, s);
  }
  return nullptr;
}

class PreKinder {
 public:
  explicit PreKinder(const KContext& ctx) : ctx_(ctx) {}

  PatPtr go(const Type& t) {
    switch (t.tag()) {
      case Type::Tag::Const: return const_pattern(t.con());
      case Type::Tag::Var: {
        for (auto it = scope_.rbegin(); it != scope_.rend(); ++it) {
          if (it->first == t.var()) return it->second;
        }
        auto it = ctx_.find(t.var());
        if (it == ctx_.end()) return nullptr;
        return from_kind(it->second);
      }
      case Type::Tag::Abs: {
        PatPtr k = from_kind(t.kind());
        scope_.emplace_back(t.binder(), k);
        PatPtr body = go(t.body());
        scope_.pop_back();
        if (!body) return nullptr;
        return arrow(k, body);
      }
      case Type::Tag::App: {
        PatPtr f = go(t.fun());
        if (!f || f->tag != Pat::Tag::Arrow) return nullptr;
        PatPtr a = go(t.arg());
        if (!a || !fits(f->dom, a)) return nullptr;
        return f->cod;
      }
    }
    return nullptr;
  }

 private:
  const KContext& ctx_;
  std::vector<std::pair<VarName, PatPtr>> scope_;
};

bool has_higher_mu(const Type& t, Type* witness) {
  switch (t.tag()) {
    case Type::Tag::Const:
      if (t.con().tag == ConstTag::Mu && !t.con().kind.is_proper()) {
        *witness = t;
        return true;
      }
      return false;
    case Type::Tag::Var: return false;
    case Type::Tag::Abs: return has_higher_mu(t.body(), witness);
    case Type::Tag::App: return has_higher_mu(t.fun(), witness) || has_higher_mu(t.arg(), witness);
  }
  return false;
}

// Every application node must normalise.
class NormalisationCheck {
 public:
  explicit NormalisationCheck(const KContext& ctx) : ctx_(ctx) {}

  void go(const Type& t) {
    switch (t.tag()) {
      case Type::Tag::Const:
      case Type::Tag::Var: return;
      case Type::Tag::Abs: go(t.body()); return;
      case Type::Tag::App: {
        go(t.fun());
        go(t.arg());
        if (is_whnf(t)) return;
        Type key = rename(t);
        auto [it, fresh] = seen_.emplace(key, true);
        if (!fresh) return;
        NormalizeResult r = normalize(ctx_, key);
        if (r.divergent()) {
          throw KindError(KindError::Reason::NonNormalising,
                          "type does not normalise: " + to_string(t), r.witness);
        }
        return;
      }
    }
  }

 private:
  const KContext& ctx_;
  std::unordered_map<Type, bool, TypeHash> seen_;
};

Kind checked_pre_kind(const KContext& ctx, const Type& t) {
  PatPtr p = PreKinder(ctx).go(t);
  if (!p) throw KindError(KindError::Reason::NotPreKinded, "ill-formed type: " + to_string(t));
  return to_kind(p);
}

}  // namespace

std::optional<Kind> pre_kind(const KContext& ctx, const Type& t) {
  PatPtr p = PreKinder(ctx).go(t);
  if (!p) return std::nullopt;
  return to_kind(p);
}

Kind kind_of(const KContext& ctx, const Type& t) {
  Kind k = checked_pre_kind(ctx, t);
  Type witness;
  if (has_higher_mu(t, &witness)) {
    throw KindError(KindError::Reason::HigherKindRecursion,
                    "recursion at a higher kind: " + to_string(witness), witness);
  }
  NormalisationCheck(ctx).go(rename(t));
  return k;
}

Kind kind_of_lenient(const KContext& ctx, const Type& t) {
  Kind k = checked_pre_kind(ctx, t);
  Type witness;
  if (has_higher_mu(t, &witness)) return k;
  NormalisationCheck(ctx).go(rename(t));
  return k;
}

Fragment classify(const Type& t) {
  Type witness;
  return has_higher_mu(t, &witness) ? Fragment::FullMu : Fragment::MuStarSemi;
}

}  // namespace fmo
