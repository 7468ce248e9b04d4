#include "fmo/typecheck.hpp"

#include <algorithm>

#include "fmo/kinding.hpp"
#include "fmo/lts.hpp"
#include "fmo/parse.hpp"
#include "fmo/rename.hpp"

namespace fmo {

const char* error_name(TypeError::Kind k) {
  switch (k) {
    case TypeError::Kind::UnboundVariable: return "UnboundVariable";
    case TypeError::Kind::LinearityViolation: return "LinearityViolation";
    case TypeError::Kind::KindError: return "KindError";
    case TypeError::Kind::EquivalenceUnknown: return "EquivalenceUnknown";
    case TypeError::Kind::LabelMismatch: return "LabelMismatch";
    case TypeError::Kind::TypeMismatch: return "TypeMismatch";
  }
  return "?";
}

namespace {
std::string error_text(TypeError::Kind kind, const std::string& detail, const std::string& binding) {
  std::string s = binding.empty() ? "" : binding + ": ";
  return s + error_name(kind) + ": " + detail;
}
}  // namespace

TypeError::TypeError(Kind kind, const std::string& message, std::string binding)
    : std::runtime_error(error_text(kind, message, binding)),
      kind_(kind),
      binding_(std::move(binding)),
      detail_(message) {}

void TContext::add(std::string name, Type type, bool linear) {
  bindings_.push_back({std::move(name), std::move(type), linear});
}

const TBinding* TContext::find(const std::string& name) const {
  for (auto it = bindings_.rbegin(); it != bindings_.rend(); ++it) {
    if (it->name == name) return &*it;
  }
  return nullptr;
}

bool TContext::has_linear() const {
  return std::any_of(bindings_.begin(), bindings_.end(), [](const TBinding& b) { return b.linear; });
}

Type const_type(ConstName c) {
  static const Type receive = parse_type("forall a:T. forall b:S. ?a;b -> {Fst: a, Snd: b}");
  static const Type send = parse_type("forall a:T. a -> forall b:S. !a;b -> b");
  static const Type close = parse_type("End -> {}");
  static const Type fork = parse_type("({} -> {}) -> {}");
  static const Type fresh = parse_type("forall a:S. {Fst: a, Snd: Dual a}");
  switch (c) {
    case ConstName::Receive: return receive;
    case ConstName::Send: return send;
    case ConstName::Close: return close;
    case ConstName::Fork: return fork;
    case ConstName::New: return fresh;
    case ConstName::Select: break;
  }
  throw std::invalid_argument("select has no closed type scheme");
}

namespace {

using Fields = std::vector<std::pair<std::string, Type>>;

struct Entry {
  std::string name;
  Type type;
  bool linear;
  bool used;
};

class Checker {
 public:
  Checker(const KContext& delta, const TContext& gamma, const Globals& globals,
          const EquivConfig& config)
      : delta_(delta), globals_(globals), config_(config) {
    for (const TBinding& b : gamma.bindings()) gamma_.push_back({b.name, b.type, b.linear, false});
  }

  TContext remaining() const {
    TContext out;
    for (const Entry& e : gamma_) {
      if (!e.linear || !e.used) out.add(e.name, e.type, e.linear);
    }
    return out;
  }

  Type synth(const Term& t) {
    switch (t.tag()) {
      case TermTag::Const: return synth_const(t);
      case TermTag::Var:
      case TermTag::Endpoint: return synth_var(t);
      case TermTag::Abs: return synth_abs(t);
      case TermTag::Rec: return synth_rec(t);
      case TermTag::TAbs: return synth_tabs(t);
      case TermTag::App: return synth_app(t);
      case TermTag::TApp: return synth_tapp(t);
      case TermTag::Record: {
        Fields fs;
        for (std::size_t i = 0; i < t.kid_count(); ++i) fs.emplace_back(t.labels()[i], synth(t.kid(i)));
        return build::record(std::move(fs));
      }
      case TermTag::LetRecord: return synth_let_record(t);
      case TermTag::Let: {
        Type a = synth(t.kid(0));
        push(t.name(), a, true);
        Type b = synth(t.kid(1));
        pop(1);
        return b;
      }
      case TermTag::Variant: return synth_variant(t);
      case TermTag::Case:
      case TermTag::Match: return synth_branches(t);
    }
    throw std::logic_error("unknown term");
  }

  void require_equiv(const Type& actual, const Type& expected, const std::string& where) {
    Verdict v = guarded([&] { return equivalent(delta_, actual, expected, config_); });
    if (v.bisimilar()) return;
    std::string detail = where + ": " + to_string(actual) + " against " + to_string(expected);
    if (v.unknown()) throw TypeError(TypeError::Kind::EquivalenceUnknown, detail + " (" + v.reason + ")");
    throw TypeError(TypeError::Kind::TypeMismatch, detail + ", distinguished by " + trace_string(v.trace));
  }

 private:
  template <class F>
  auto guarded(F f) -> decltype(f()) {
    try {
      return f();
    } catch (const KindError& e) {
      throw TypeError(TypeError::Kind::KindError, e.what());
    }
  }

  [[noreturn]] void mismatch(const std::string& expected, const Type& found) {
    throw TypeError(TypeError::Kind::TypeMismatch, "expected " + expected + ", found " + to_string(found));
  }

  Transitions view(const Type& t) {
    return guarded([&] { return transitions(delta_, t); });
  }

  // Successors of a type whose transitions all carry the constant `c`
  // with indices 1..arity, in index order.
  std::optional<std::vector<std::pair<Label, Type>>> shaped(const Type& t,
                                                            bool (*accept)(const TypeConst&)) {
    Transitions tr = view(t);
    if (tr.empty()) return std::nullopt;
    std::vector<std::pair<Label, Type>> out(tr.begin(), tr.end());
    const Label& first = out.front().first;
    if (first.tag != Label::Tag::ConstHead || !accept(first.con)) return std::nullopt;
    if (first.index == 0) {
      if (out.size() != 1 || first.con.arity() != 0) return std::nullopt;
      return std::vector<std::pair<Label, Type>>{};
    }
    for (std::size_t j = 0; j < out.size(); ++j) {
      const Label& l = out[j].first;
      if (l.tag != Label::Tag::ConstHead || !(l.con == first.con) || l.index != j + 1) return std::nullopt;
    }
    if (out.size() != first.con.arity()) return std::nullopt;
    return out;
  }

  std::pair<Type, Type> as_arrow(const Type& t) {
    auto s = shaped(t, [](const TypeConst& c) { return c.tag == ConstTag::Arrow; });
    if (!s) mismatch("a function type", t);
    return {(*s)[0].second, (*s)[1].second};
  }

  std::pair<Kind, Type> as_forall(const Type& t) {
    auto s = shaped(t, [](const TypeConst& c) { return c.tag == ConstTag::Forall; });
    if (!s) mismatch("a polymorphic type", t);
    return {(*s)[0].first.con.kind, (*s)[0].second};
  }

  Fields labelled(const Type& t, bool (*accept)(const TypeConst&), const char* what) {
    auto s = shaped(t, accept);
    if (!s) mismatch(what, t);
    Fields out;
    if (s->empty()) return out;
    const auto& labels = s->front().first.con.labels;
    for (std::size_t j = 0; j < s->size(); ++j) out.emplace_back(labels[j], (*s)[j].second);
    return out;
  }

  Fields as_record(const Type& t) {
    return labelled(t, [](const TypeConst& c) { return c.tag == ConstTag::Record; }, "a record type");
  }
  Fields as_variant(const Type& t) {
    return labelled(t, [](const TypeConst& c) { return c.tag == ConstTag::Variant; }, "a variant type");
  }
  Fields as_choice(const Type& t, View v) {
    if (v == View::External) {
      return labelled(t, [](const TypeConst& c) {
        return c.tag == ConstTag::Choice && c.view == View::External;
      }, "an external choice");
    }
    return labelled(t, [](const TypeConst& c) {
      return c.tag == ConstTag::Choice && c.view == View::Internal;
    }, "an internal choice");
  }

  Type instantiate(const Type& body, const Type& arg) {
    if (body.is_abs()) return rename_subst(body.body(), {{body.binder(), arg}});
    return Type::app(body, arg);
  }

  Kind kind_of_annotation(const Type& t) {
    return guarded([&] { return kind_of(delta_, t); });
  }

  void require_proper(const Type& t) {
    Kind k = kind_of_annotation(t);
    if (!k.is_proper()) {
      throw TypeError(TypeError::Kind::KindError, to_string(t) + " has kind " + k.str() + ", not a proper kind");
    }
  }

  void push(const std::string& name, const Type& type, bool linear) {
    gamma_.push_back({name, type, linear, false});
  }

  void pop(std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
      const Entry& e = gamma_.back();
      if (e.linear && !e.used) {
        throw TypeError(TypeError::Kind::LinearityViolation,
                        "linear variable " + e.name + " : " + to_string(e.type) + " is never used");
      }
      gamma_.pop_back();
    }
  }

  Type synth_const(const Term& t) {
    if (t.const_name() != ConstName::Select) return const_type(t.const_name());
    const Type& choice = t.type();
    Kind k = kind_of_annotation(choice);
    if (!k.is_session()) {
      throw TypeError(TypeError::Kind::KindError, "select annotation " + to_string(choice) + " is not a session type");
    }
    for (const auto& [l, cont] : as_choice(choice, View::Internal)) {
      if (l == t.name()) return build::arrow(choice, cont);
    }
    throw TypeError(TypeError::Kind::LabelMismatch, "label " + t.name() + " not offered by " + to_string(choice));
  }

  Type synth_var(const Term& t) {
    for (auto it = gamma_.rbegin(); it != gamma_.rend(); ++it) {
      if (it->name != t.name()) continue;
      if (it->linear) {
        if (it->used) {
          throw TypeError(TypeError::Kind::LinearityViolation, "linear variable " + t.name() + " used more than once");
        }
        it->used = true;
      }
      return it->type;
    }
    auto g = globals_.find(t.name());
    if (g != globals_.end()) return g->second;
    throw TypeError(TypeError::Kind::UnboundVariable, "unbound variable " + t.name());
  }

  Type synth_abs(const Term& t) {
    require_proper(t.type());
    if (t.unrestricted()) {
      bool functional = false;
      for (const auto& kv : view(t.type())) {
        const Label& l = kv.first;
        functional = l.tag == Label::Tag::ConstHead &&
                     (l.con.tag == ConstTag::Arrow || l.con.tag == ConstTag::Forall);
        break;
      }
      if (!functional) mismatch("a function type for unrestricted binder " + t.name(), t.type());
    }
    push(t.name(), t.type(), !t.unrestricted());
    Type body = synth(t.kid(0));
    pop(1);
    return build::arrow(t.type(), body);
  }

  Type synth_rec(const Term& t) {
    require_proper(t.type());
    const Term& v = t.kid(0);
    if (!v.is(TermTag::Abs) && !v.is(TermTag::TAbs)) {
      mismatch("an abstraction under rec " + t.name(), t.type());
    }
    push(t.name(), t.type(), false);
    Type body = synth(v);
    require_equiv(body, t.type(), "rec " + t.name());
    pop(1);
    return t.type();
  }

  Type synth_tabs(const Term& t) {
    VarName a = VarName::user(t.name());
    if (delta_.count(a)) {
      throw TypeError(TypeError::Kind::KindError, "type variable " + t.name() + " is already bound");
    }
    if (!is_value(t.kid(0))) mismatch("a value under Fun " + t.name(), build::var(t.name()));
    delta_[a] = t.kind();
    Type body;
    try {
      body = synth(t.kid(0));
    } catch (...) {
      delta_.erase(a);
      throw;
    }
    delta_.erase(a);
    return Type::app(Type::constant(TypeConst::forall(t.kind())), Type::abs(a, t.kind(), body));
  }

  Type synth_app(const Term& t) {
    Type f = synth(t.kid(0));
    auto [dom, cod] = as_arrow(f);
    Type a = synth(t.kid(1));
    require_equiv(a, dom, "argument of " + to_string(t.kid(0)));
    return cod;
  }

  Type synth_tapp(const Term& t) {
    Type f = synth(t.kid(0));
    auto [k, body] = as_forall(f);
    Kind ka = kind_of_annotation(t.type());
    if (!(ka == k)) {
      throw TypeError(TypeError::Kind::KindError,
                      "type argument " + to_string(t.type()) + " has kind " + ka.str() + ", expected " + k.str());
    }
    return instantiate(body, t.type());
  }

  Type synth_let_record(const Term& t) {
    Fields fs = as_record(synth(t.kid(0)));
    std::vector<std::string> want(t.labels());
    std::sort(want.begin(), want.end());
    std::vector<std::string> have;
    for (const auto& f : fs) have.push_back(f.first);
    if (want != have) {
      throw TypeError(TypeError::Kind::LabelMismatch, "record pattern does not match the fields of the scrutinee");
    }
    for (std::size_t i = 0; i < t.labels().size(); ++i) {
      auto it = std::find_if(fs.begin(), fs.end(), [&](const auto& f) { return f.first == t.labels()[i]; });
      push(t.binders()[i], it->second, true);
    }
    Type body = synth(t.kid(1));
    pop(t.labels().size());
    return body;
  }

  Type synth_variant(const Term& t) {
    require_proper(t.type());
    for (const auto& [l, field] : as_variant(t.type())) {
      if (l != t.name()) continue;
      require_equiv(synth(t.kid(0)), field, "payload of " + t.name());
      return t.type();
    }
    throw TypeError(TypeError::Kind::LabelMismatch, "label " + t.name() + " not in " + to_string(t.type()));
  }

  // Case and match: every handler starts from the same context and must
  // consume the same linear bindings.
  Type synth_branches(const Term& t) {
    bool is_match = t.is(TermTag::Match);
    Type scrutinee = synth(t.kid(0));
    Fields fs = is_match ? as_choice(scrutinee, View::External) : as_variant(scrutinee);
    std::vector<std::string> want(t.labels());
    std::sort(want.begin(), want.end());
    std::vector<std::string> have;
    for (const auto& f : fs) have.push_back(f.first);
    if (want != have) {
      throw TypeError(TypeError::Kind::LabelMismatch,
                      std::string(is_match ? "match" : "case") + " handlers do not cover exactly the labels of " +
                          to_string(scrutinee));
    }
    std::vector<bool> before = used_flags();
    std::vector<bool> after;
    Type result;
    std::string first_label;
    for (std::size_t i = 0; i < t.labels().size(); ++i) {
      const std::string& l = t.labels()[i];
      set_used(before);
      Type h = synth(t.kid(i + 1));
      auto [dom, cod] = as_arrow(h);
      auto it = std::find_if(fs.begin(), fs.end(), [&](const auto& f) { return f.first == l; });
      require_equiv(it->second, dom, "handler " + l);
      std::vector<bool> now = used_flags();
      if (i == 0) {
        result = cod;
        after = now;
        first_label = l;
        continue;
      }
      require_equiv(cod, result, "result of handler " + l);
      for (std::size_t k = 0; k < now.size(); ++k) {
        if (now[k] != after[k] && gamma_[k].linear) {
          throw TypeError(TypeError::Kind::LinearityViolation,
                          "handlers " + first_label + " and " + l + " disagree on the use of " + gamma_[k].name);
        }
      }
    }
    set_used(after);
    return result;
  }

  std::vector<bool> used_flags() const {
    std::vector<bool> out;
    for (const Entry& e : gamma_) out.push_back(e.used);
    return out;
  }

  void set_used(const std::vector<bool>& flags) {
    for (std::size_t k = 0; k < flags.size(); ++k) gamma_[k].used = flags[k];
  }

  KContext delta_;
  std::vector<Entry> gamma_;
  const Globals& globals_;
  const EquivConfig& config_;
};

}  // namespace

SynthResult synth(const KContext& delta, const TContext& gamma, const Term& t, const Globals& globals,
                  const EquivConfig& config) {
  Checker c(delta, gamma, globals, config);
  Type type = c.synth(t);
  return {type, c.remaining()};
}

TContext check(const KContext& delta, const TContext& gamma, const Term& t, const Type& expected,
               const Globals& globals, const EquivConfig& config) {
  Checker c(delta, gamma, globals, config);
  Type type = c.synth(t);
  c.require_equiv(type, expected, "term");
  return c.remaining();
}

Globals program_globals(const Program& prog) {
  Globals g;
  for (const Binding& b : prog.bindings) g[b.name] = b.type;
  return g;
}

std::map<std::string, Type> typecheck_program(const Program& prog, const EquivConfig& config) {
  Globals globals = program_globals(prog);
  std::map<std::string, Type> out;
  for (const Binding& b : prog.bindings) {
    try {
      Kind k;
      try {
        k = kind_of({}, b.type);
      } catch (const KindError& e) {
        throw TypeError(TypeError::Kind::KindError, e.what());
      }
      if (!k.is_proper()) {
        throw TypeError(TypeError::Kind::KindError, "signature has kind " + k.str() + ", not a proper kind");
      }
      if (b.body) {
        TContext rest = check({}, {}, *b.body, b.type, globals, config);
        if (rest.has_linear()) {
          throw TypeError(TypeError::Kind::LinearityViolation, "linear bindings left unused");
        }
      }
    } catch (const TypeError& e) {
      throw TypeError(e.kind(), e.detail(), b.name);
    }
    out[b.name] = b.type;
  }
  return out;
}

}  // namespace fmo
