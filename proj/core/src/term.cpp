#include "fmo/term.hpp"

#include <cassert>
#include <stdexcept>

namespace fmo {

struct Term::Node {
  TermTag tag = TermTag::Const;
  ConstName con = ConstName::Receive;
  std::string name;
  Type type;
  Kind kind;
  bool unrestricted = false;
  std::vector<Term> kids;
  std::vector<std::string> labels;
  std::vector<std::string> binders;
};

const char* const_name(ConstName c) {
  switch (c) {
    case ConstName::Receive: return "receive";
    case ConstName::Send: return "send";
    case ConstName::Select: return "select";
    case ConstName::Close: return "close";
    case ConstName::Fork: return "fork";
    case ConstName::New: return "new";
  }
  return "?";
}

namespace {
std::vector<std::string> split_fields(std::vector<std::pair<std::string, Term>>& fields,
                                      std::vector<Term>& kids) {
  std::vector<std::string> labels;
  for (auto& [l, t] : fields) {
    for (const auto& seen : labels) {
      if (seen == l) throw std::invalid_argument("duplicate label " + l);
    }
    labels.push_back(l);
    kids.push_back(std::move(t));
  }
  return labels;
}
}  // namespace

Term Term::constant(ConstName c) {
  assert(c != ConstName::Select);
  auto n = std::make_shared<Node>();
  n->tag = TermTag::Const;
  n->con = c;
  return Term(n);
}

Term Term::select(std::string label, Type choice) {
  auto n = std::make_shared<Node>();
  n->tag = TermTag::Const;
  n->con = ConstName::Select;
  n->name = std::move(label);
  n->type = std::move(choice);
  return Term(n);
}

Term Term::var(std::string name) {
  auto n = std::make_shared<Node>();
  n->tag = TermTag::Var;
  n->name = std::move(name);
  return Term(n);
}

Term Term::endpoint(std::string name) {
  auto n = std::make_shared<Node>();
  n->tag = TermTag::Endpoint;
  n->name = std::move(name);
  return Term(n);
}

Term Term::abs(std::string binder, Type type, Term body, bool unrestricted) {
  auto n = std::make_shared<Node>();
  n->tag = TermTag::Abs;
  n->name = std::move(binder);
  n->type = std::move(type);
  n->unrestricted = unrestricted;
  n->kids = {std::move(body)};
  return Term(n);
}

Term Term::rec(std::string binder, Type type, Term body) {
  auto n = std::make_shared<Node>();
  n->tag = TermTag::Rec;
  n->name = std::move(binder);
  n->type = std::move(type);
  n->kids = {std::move(body)};
  return Term(n);
}

Term Term::tabs(std::string binder, Kind kind, Term body) {
  auto n = std::make_shared<Node>();
  n->tag = TermTag::TAbs;
  n->name = std::move(binder);
  n->kind = std::move(kind);
  n->kids = {std::move(body)};
  return Term(n);
}

Term Term::app(Term fun, Term arg) {
  auto n = std::make_shared<Node>();
  n->tag = TermTag::App;
  n->kids = {std::move(fun), std::move(arg)};
  return Term(n);
}

Term Term::tapp(Term fun, Type arg) {
  auto n = std::make_shared<Node>();
  n->tag = TermTag::TApp;
  n->type = std::move(arg);
  n->kids = {std::move(fun)};
  return Term(n);
}

Term Term::record(std::vector<std::pair<std::string, Term>> fields) {
  auto n = std::make_shared<Node>();
  n->tag = TermTag::Record;
  n->labels = split_fields(fields, n->kids);
  return Term(n);
}

Term Term::pair(Term first, Term second) {
  return record({{"Fst", std::move(first)}, {"Snd", std::move(second)}});
}

Term Term::let_record(std::vector<std::pair<std::string, std::string>> binders, Term scrutinee,
                      Term body) {
  auto n = std::make_shared<Node>();
  n->tag = TermTag::LetRecord;
  for (auto& [l, x] : binders) {
    for (const auto& seen : n->labels) {
      if (seen == l) throw std::invalid_argument("duplicate label " + l);
    }
    n->labels.push_back(std::move(l));
    n->binders.push_back(std::move(x));
  }
  n->kids = {std::move(scrutinee), std::move(body)};
  return Term(n);
}

Term Term::let(std::string binder, Term bound, Term body) {
  auto n = std::make_shared<Node>();
  n->tag = TermTag::Let;
  n->name = std::move(binder);
  n->kids = {std::move(bound), std::move(body)};
  return Term(n);
}

Term Term::variant(std::string label, Term payload, Type type) {
  auto n = std::make_shared<Node>();
  n->tag = TermTag::Variant;
  n->name = std::move(label);
  n->type = std::move(type);
  n->kids = {std::move(payload)};
  return Term(n);
}

Term Term::case_of(Term scrutinee, std::vector<std::pair<std::string, Term>> handlers) {
  auto n = std::make_shared<Node>();
  n->tag = TermTag::Case;
  n->kids = {std::move(scrutinee)};
  n->labels = split_fields(handlers, n->kids);
  return Term(n);
}

Term Term::match(Term scrutinee, std::vector<std::pair<std::string, Term>> handlers) {
  Term t = case_of(std::move(scrutinee), std::move(handlers));
  auto n = std::make_shared<Node>(*t.node_);
  n->tag = TermTag::Match;
  return Term(n);
}

TermTag Term::tag() const { return node_->tag; }
ConstName Term::const_name() const { return node_->con; }
const std::string& Term::name() const { return node_->name; }
const Type& Term::type() const { return node_->type; }
const Kind& Term::kind() const { return node_->kind; }
bool Term::unrestricted() const { return node_->unrestricted; }
const Term& Term::kid(std::size_t i) const { return node_->kids.at(i); }
std::size_t Term::kid_count() const { return node_->kids.size(); }
const std::vector<std::string>& Term::labels() const { return node_->labels; }
const std::vector<std::string>& Term::binders() const { return node_->binders; }

bool Term::is_const(ConstName c) const {
  return is(TermTag::Const) && node_->con == c;
}

Term Term::with_kid(std::size_t i, Term t) const {
  auto n = std::make_shared<Node>(*node_);
  n->kids.at(i) = std::move(t);
  return Term(n);
}

Term Term::with_kids(std::vector<Term> kids) const {
  assert(kids.size() == node_->kids.size());
  auto n = std::make_shared<Node>(*node_);
  n->kids = std::move(kids);
  return Term(n);
}

Term Term::with_type(Type t) const {
  auto n = std::make_shared<Node>(*node_);
  n->type = std::move(t);
  return Term(n);
}

std::size_t Term::size() const {
  std::size_t s = 1;
  for (const Term& k : node_->kids) s += k.size();
  return s;
}

bool operator==(const Term& a, const Term& b) {
  if (a.node_ == b.node_) return true;
  if (a.is_null() || b.is_null()) return false;
  const Term::Node& x = *a.node_;
  const Term::Node& y = *b.node_;
  if (x.tag != y.tag || x.con != y.con || x.name != y.name || x.unrestricted != y.unrestricted ||
      x.labels != y.labels || x.binders != y.binders || x.kids != y.kids) {
    return false;
  }
  if (x.type.is_null() != y.type.is_null()) return false;
  if (!x.type.is_null() && !(x.type == y.type)) return false;
  if (x.tag == TermTag::TAbs && !(x.kind == y.kind)) return false;
  return true;
}

// ---------------------------------------------------------------- values

bool is_value(const Term& t) {
  switch (t.tag()) {
    case TermTag::Const:
    case TermTag::Var:
    case TermTag::Endpoint:
    case TermTag::Abs:
    case TermTag::Rec:
    case TermTag::TAbs:
      return true;
    case TermTag::Record:
      for (std::size_t i = 0; i < t.kid_count(); ++i) {
        if (!is_value(t.kid(i))) return false;
      }
      return true;
    case TermTag::Variant:
      return is_value(t.kid(0));
    case TermTag::TApp: {
      const Term& f = t.kid(0);
      if (f.is_const(ConstName::Receive) || f.is_const(ConstName::Send)) return true;
      if (f.is(TermTag::TApp) && f.kid(0).is_const(ConstName::Receive)) return true;
      return f.is(TermTag::App) && f.kid(0).is(TermTag::TApp) &&
             f.kid(0).kid(0).is_const(ConstName::Send) && is_value(f.kid(1));
    }
    case TermTag::App:
      return t.kid(0).is(TermTag::TApp) && t.kid(0).kid(0).is_const(ConstName::Send) &&
             is_value(t.kid(1));
    default:
      return false;
  }
}

// ------------------------------------------------------------- rendering

namespace {
enum Prec { kTerm = 0, kApp = 1, kArg = 2 };

std::string annotation(const Type& t) {
  std::string s = to_string(t);
  if (s.find(' ') == std::string::npos && s.find("->") == std::string::npos) return s;
  return "(" + s + ")";
}

bool is_sequence(const Term& t) {
  if (!t.is(TermTag::App)) return false;
  const Term& f = t.kid(0);
  if (!f.is(TermTag::Abs) || f.name() != "_") return false;
  const Term& b = f.kid(0);
  return b.is(TermTag::LetRecord) && b.labels().empty() && b.kid(0).is(TermTag::Var) &&
         b.kid(0).name() == "_";
}

std::string render(const Term& t, int prec);

std::string fields(const Term& t, std::size_t first) {
  std::string s = "{";
  for (std::size_t i = 0; i < t.labels().size(); ++i) {
    if (i) s += ", ";
    s += t.labels()[i] + " = " + render(t.kid(first + i), kTerm);
  }
  return s + "}";
}

std::string render(const Term& t, int prec) {
  auto wrap = [&](int level, std::string s) {
    return prec > level ? "(" + s + ")" : s;
  };
  switch (t.tag()) {
    case TermTag::Const:
      if (t.const_name() == ConstName::Select) {
        return wrap(kApp, "select " + t.name() + " [" + to_string(t.type()) + "]");
      }
      return const_name(t.const_name());
    case TermTag::Var:
      return t.name();
    case TermTag::Endpoint:
      return "@" + t.name();
    case TermTag::Abs:
      if (t.name() == "_") break;
      return wrap(kTerm, std::string("fun ") + (t.unrestricted() ? "*" : "") + t.name() + ":" +
                             annotation(t.type()) + " -> " + render(t.kid(0), kTerm));
    case TermTag::Rec:
      return wrap(kTerm, "rec " + t.name() + ":" + annotation(t.type()) + ". " +
                             render(t.kid(0), kTerm));
    case TermTag::TAbs:
      return wrap(kTerm, "Fun " + t.name() + ":" + t.kind().str() + " -> " +
                             render(t.kid(0), kTerm));
    case TermTag::App:
      if (is_sequence(t)) {
        return wrap(kTerm, render(t.kid(1), kApp) + "; " + render(t.kid(0).kid(0).kid(1), kTerm));
      }
      return wrap(kApp, render(t.kid(0), kApp) + " " + render(t.kid(1), kArg));
    case TermTag::TApp:
      return wrap(kApp, render(t.kid(0), kApp) + " [" + to_string(t.type()) + "]");
    case TermTag::Record:
      return fields(t, 0);
    case TermTag::LetRecord: {
      std::string s = "let {";
      for (std::size_t i = 0; i < t.labels().size(); ++i) {
        if (i) s += ", ";
        s += t.labels()[i] + " = " + t.binders()[i];
      }
      return wrap(kTerm, s + "} = " + render(t.kid(0), kTerm) + " in " + render(t.kid(1), kTerm));
    }
    case TermTag::Let:
      return wrap(kTerm, "let " + t.name() + " = " + render(t.kid(0), kTerm) + " in " +
                             render(t.kid(1), kTerm));
    case TermTag::Variant:
      return wrap(kTerm, "tag " + t.name() + " " + render(t.kid(0), kArg) + " as " +
                             annotation(t.type()));
    case TermTag::Case:
      return wrap(kTerm, "case " + render(t.kid(0), kTerm) + " of " + fields(t, 1));
    case TermTag::Match:
      return wrap(kTerm, "match " + render(t.kid(0), kTerm) + " with " + fields(t, 1));
  }
  // A sequencing abstraction outside its application.
  return wrap(kTerm, "fun _:" + annotation(t.type()) + " -> " + render(t.kid(0), kTerm));
}
}  // namespace

std::string to_string(const Term& t) { return render(t, kTerm); }

const Binding* Program::find(const std::string& name) const {
  for (const Binding& b : bindings) {
    if (b.name == name) return &b;
  }
  return nullptr;
}

}  // namespace fmo
