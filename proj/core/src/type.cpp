#include "fmo/type.hpp"

#include <algorithm>
#include <cassert>
#include <stdexcept>

#include "hashing.hpp"

namespace fmo {

// ---------------------------------------------------------------- VarName

VarName VarName::user(std::string name) {
  VarName v;
  v.name_ = std::move(name);
  return v;
}

VarName VarName::canonical(std::uint32_t index) {
  assert(index > 0);
  VarName v;
  v.index_ = index;
  return v;
}

std::string VarName::str() const {
  return is_canonical() ? "$" + std::to_string(index_) : name_;
}

std::size_t VarName::hash() const {
  return is_canonical() ? mix(0x5bd1e995u, index_) : mix(0x27d4eb2fu, std::hash<std::string>{}(name_));
}

std::strong_ordering operator<=>(const VarName& a, const VarName& b) {
  if (a.is_canonical() != b.is_canonical()) {
    return a.is_canonical() ? std::strong_ordering::less : std::strong_ordering::greater;
  }
  if (a.is_canonical()) return a.index_ <=> b.index_;
  int c = a.name_.compare(b.name_);
  return c < 0 ? std::strong_ordering::less
               : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
}

// ------------------------------------------------------------------- Kind

Kind Kind::arrow(Kind domain, Kind codomain) {
  Kind k(Tag::Arrow);
  k.parts_ = std::make_shared<const std::pair<Kind, Kind>>(std::move(domain), std::move(codomain));
  return k;
}

std::string Kind::str() const {
  switch (tag_) {
    case Tag::Session: return "S";
    case Tag::Functional: return "T";
    case Tag::Arrow: {
      std::string d = domain().str();
      if (domain().tag() == Tag::Arrow) d = "(" + d + ")";
      return d + "=>" + codomain().str();
    }
  }
  return "?";
}

std::size_t Kind::hash() const {
  if (tag_ != Tag::Arrow) return mix(0x9e37u, static_cast<std::size_t>(tag_));
  return mix(mix(0x7f4au, domain().hash()), codomain().hash());
}

bool operator==(const Kind& a, const Kind& b) {
  if (a.tag_ != b.tag_) return false;
  if (a.tag_ != Kind::Tag::Arrow) return true;
  if (a.parts_ == b.parts_) return true;
  return a.domain() == b.domain() && a.codomain() == b.codomain();
}

std::strong_ordering operator<=>(const Kind& a, const Kind& b) {
  if (a.tag_ != b.tag_) return a.tag_ <=> b.tag_;
  if (a.tag_ != Kind::Tag::Arrow) return std::strong_ordering::equal;
  auto c = a.domain() <=> b.domain();
  if (c != 0) return c;
  return a.codomain() <=> b.codomain();
}

// -------------------------------------------------------------- TypeConst

namespace {
TypeConst make_const(ConstTag tag) {
  TypeConst c;
  c.tag = tag;
  return c;
}

std::string label_list(const std::vector<std::string>& ls) {
  std::string out;
  for (std::size_t i = 0; i < ls.size(); ++i) {
    if (i) out += ",";
    out += ls[i];
  }
  return out;
}
}  // namespace

TypeConst TypeConst::arrow() { return make_const(ConstTag::Arrow); }
TypeConst TypeConst::record(std::vector<std::string> labels) {
  auto c = make_const(ConstTag::Record);
  c.labels = std::move(labels);
  return c;
}
TypeConst TypeConst::variant(std::vector<std::string> labels) {
  auto c = make_const(ConstTag::Variant);
  c.labels = std::move(labels);
  return c;
}
TypeConst TypeConst::forall(Kind k) {
  auto c = make_const(ConstTag::Forall);
  c.kind = std::move(k);
  return c;
}
TypeConst TypeConst::mu(Kind k) {
  auto c = make_const(ConstTag::Mu);
  c.kind = std::move(k);
  return c;
}
TypeConst TypeConst::skip() { return make_const(ConstTag::Skip); }
TypeConst TypeConst::end() { return make_const(ConstTag::End); }
TypeConst TypeConst::msg(Polarity p) {
  auto c = make_const(ConstTag::Msg);
  c.polarity = p;
  return c;
}
TypeConst TypeConst::semi() { return make_const(ConstTag::Semi); }
TypeConst TypeConst::choice(View v, std::vector<std::string> labels) {
  auto c = make_const(ConstTag::Choice);
  c.view = v;
  c.labels = std::move(labels);
  return c;
}
TypeConst TypeConst::dual() { return make_const(ConstTag::Dual); }

std::size_t TypeConst::arity() const {
  switch (tag) {
    case ConstTag::Arrow: return 2;
    case ConstTag::Record:
    case ConstTag::Variant:
    case ConstTag::Choice: return labels.size();
    case ConstTag::Forall:
    case ConstTag::Mu:
    case ConstTag::Msg:
    case ConstTag::Dual: return 1;
    case ConstTag::Skip:
    case ConstTag::End: return 0;
    case ConstTag::Semi: return 2;
  }
  return 0;
}

std::string TypeConst::str() const {
  switch (tag) {
    case ConstTag::Arrow: return "->";
    case ConstTag::Record: return "{" + label_list(labels) + "}";
    case ConstTag::Variant: return "<" + label_list(labels) + ">";
    case ConstTag::Forall: return "forall[" + kind.str() + "]";
    case ConstTag::Mu: return "mu[" + kind.str() + "]";
    case ConstTag::Skip: return "Skip";
    case ConstTag::End: return "End";
    case ConstTag::Msg: return polarity == Polarity::In ? "?" : "!";
    case ConstTag::Semi: return ";";
    case ConstTag::Choice:
      return std::string(view == View::External ? "&{" : "+{") + label_list(labels) + "}";
    case ConstTag::Dual: return "Dual";
  }
  return "?";
}

std::size_t TypeConst::hash() const {
  std::size_t h = mix(0x1234567u, static_cast<std::size_t>(tag));
  switch (tag) {
    case ConstTag::Msg: h = mix(h, static_cast<std::size_t>(polarity)); break;
    case ConstTag::Choice: h = mix(h, static_cast<std::size_t>(view)); [[fallthrough]];
    case ConstTag::Record:
    case ConstTag::Variant:
      for (const auto& l : labels) h = mix(h, std::hash<std::string>{}(l));
      break;
    case ConstTag::Forall:
    case ConstTag::Mu: h = mix(h, kind.hash()); break;
    default: break;
  }
  return h;
}

bool operator==(const TypeConst& a, const TypeConst& b) {
  return (a <=> b) == 0;
}

std::strong_ordering operator<=>(const TypeConst& a, const TypeConst& b) {
  if (a.tag != b.tag) return a.tag <=> b.tag;
  switch (a.tag) {
    case ConstTag::Msg: return a.polarity <=> b.polarity;
    case ConstTag::Choice:
      if (a.view != b.view) return a.view <=> b.view;
      [[fallthrough]];
    case ConstTag::Record:
    case ConstTag::Variant: {
      if (a.labels.size() != b.labels.size()) return a.labels.size() <=> b.labels.size();
      for (std::size_t i = 0; i < a.labels.size(); ++i) {
        int c = a.labels[i].compare(b.labels[i]);
        if (c != 0) return c < 0 ? std::strong_ordering::less : std::strong_ordering::greater;
      }
      return std::strong_ordering::equal;
    }
    case ConstTag::Forall:
    case ConstTag::Mu: return a.kind <=> b.kind;
    default: return std::strong_ordering::equal;
  }
}

// ------------------------------------------------------------------- Type

struct Type::Node {
  Tag tag;
  std::size_t hash = 0;
  std::size_t size = 1;
  bool binders = false;
  TypeConst con;
  VarName var;
  Kind kind;
  Type left;
  Type right;
  std::vector<VarName> free;
};

namespace {
std::vector<VarName> merge_free(const std::vector<VarName>& a, const std::vector<VarName>& b) {
  if (a.empty()) return b;
  if (b.empty()) return a;
  std::vector<VarName> out;
  out.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}
}  // namespace

Type Type::constant(TypeConst c) {
  auto n = std::make_shared<Node>();
  n->tag = Tag::Const;
  n->hash = mix(0x11u, c.hash());
  n->con = std::move(c);
  return Type(std::move(n));
}

Type Type::var(VarName v) {
  auto n = std::make_shared<Node>();
  n->tag = Tag::Var;
  n->hash = mix(0x22u, v.hash());
  n->free.push_back(v);
  n->var = std::move(v);
  return Type(std::move(n));
}

Type Type::abs(VarName binder, Kind kind, Type body) {
  assert(!body.is_null());
  auto n = std::make_shared<Node>();
  n->tag = Tag::Abs;
  n->hash = mix(mix(mix(0x33u, binder.hash()), kind.hash()), body.hash());
  n->size = 1 + body.size();
  n->binders = true;
  n->free = body.free();
  auto it = std::lower_bound(n->free.begin(), n->free.end(), binder);
  if (it != n->free.end() && *it == binder) n->free.erase(it);
  n->var = std::move(binder);
  n->kind = std::move(kind);
  n->left = std::move(body);
  return Type(std::move(n));
}

Type Type::app(Type fun, Type arg) {
  assert(!fun.is_null() && !arg.is_null());
  auto n = std::make_shared<Node>();
  n->tag = Tag::App;
  n->hash = mix(mix(0x44u, fun.hash()), arg.hash());
  n->size = 1 + fun.size() + arg.size();
  n->binders = fun.has_binders() || arg.has_binders();
  n->free = merge_free(fun.free(), arg.free());
  n->left = std::move(fun);
  n->right = std::move(arg);
  return Type(std::move(n));
}

Type::Tag Type::tag() const { return node_->tag; }
const TypeConst& Type::con() const { return node_->con; }
const VarName& Type::var() const { return node_->var; }
const Kind& Type::kind() const { return node_->kind; }
const Type& Type::body() const { return node_->left; }
const Type& Type::fun() const { return node_->left; }
const Type& Type::arg() const { return node_->right; }
const std::vector<VarName>& Type::free() const { return node_->free; }
bool Type::has_binders() const { return node_->binders; }
std::size_t Type::hash() const { return node_ ? node_->hash : 0; }
std::size_t Type::size() const { return node_ ? node_->size : 0; }

bool Type::is_free(const VarName& v) const {
  return std::binary_search(node_->free.begin(), node_->free.end(), v);
}

bool Type::is_const(ConstTag t) const {
  return node_ && node_->tag == Tag::Const && node_->con.tag == t;
}

bool operator==(const Type& a, const Type& b) {
  if (a.node_ == b.node_) return true;
  if (!a.node_ || !b.node_) return false;
  if (a.node_->hash != b.node_->hash || a.node_->tag != b.node_->tag ||
      a.node_->size != b.node_->size) {
    return false;
  }
  switch (a.node_->tag) {
    case Type::Tag::Const: return a.node_->con == b.node_->con;
    case Type::Tag::Var: return a.node_->var == b.node_->var;
    case Type::Tag::Abs:
      return a.node_->var == b.node_->var && a.node_->kind == b.node_->kind &&
             a.node_->left == b.node_->left;
    case Type::Tag::App:
      return a.node_->left == b.node_->left && a.node_->right == b.node_->right;
  }
  return false;
}

namespace {
int compare_types(const Type& a, const Type& b) {
  if (a.same_node(b)) return 0;
  if (a.tag() != b.tag()) return a.tag() < b.tag() ? -1 : 1;
  switch (a.tag()) {
    case Type::Tag::Const: {
      auto c = a.con() <=> b.con();
      return c < 0 ? -1 : (c > 0 ? 1 : 0);
    }
    case Type::Tag::Var: {
      auto c = a.var() <=> b.var();
      return c < 0 ? -1 : (c > 0 ? 1 : 0);
    }
    case Type::Tag::Abs: {
      auto c = a.binder() <=> b.binder();
      if (c != 0) return c < 0 ? -1 : 1;
      auto k = a.kind() <=> b.kind();
      if (k != 0) return k < 0 ? -1 : 1;
      return compare_types(a.body(), b.body());
    }
    case Type::Tag::App: {
      int c = compare_types(a.fun(), b.fun());
      if (c != 0) return c;
      return compare_types(a.arg(), b.arg());
    }
  }
  return 0;
}
}  // namespace

bool type_less(const Type& a, const Type& b) { return compare_types(a, b) < 0; }

Spine spine(const Type& t) {
  Spine s;
  Type cur = t;
  while (cur.is_app()) {
    s.args.push_back(cur.arg());
    cur = cur.fun();
  }
  std::reverse(s.args.begin(), s.args.end());
  s.head = cur;
  return s;
}

Type apply(Type head, const std::vector<Type>& args, std::size_t from) {
  for (std::size_t i = from; i < args.size(); ++i) head = Type::app(std::move(head), args[i]);
  return head;
}

// ----------------------------------------------------------------- build

namespace build {
namespace {
Type make_labelled(TypeConst (*ctor)(std::vector<std::string>),
                   std::vector<std::pair<std::string, Type>> fields) {
  std::sort(fields.begin(), fields.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i && fields[i].first == fields[i - 1].first) {
      throw std::invalid_argument("duplicate label " + fields[i].first);
    }
    labels.push_back(fields[i].first);
  }
  Type t = Type::constant(ctor(std::move(labels)));
  for (auto& f : fields) t = Type::app(t, f.second);
  return t;
}
TypeConst external_choice(std::vector<std::string> ls) {
  return TypeConst::choice(View::External, std::move(ls));
}
TypeConst internal_choice(std::vector<std::string> ls) {
  return TypeConst::choice(View::Internal, std::move(ls));
}
}  // namespace

Type skip() { return Type::constant(TypeConst::skip()); }
Type end() { return Type::constant(TypeConst::end()); }
Type dual(Type t) { return Type::app(Type::constant(TypeConst::dual()), std::move(t)); }
Type msg(Polarity p, Type payload) {
  return Type::app(Type::constant(TypeConst::msg(p)), std::move(payload));
}
Type seq(Type first, Type second) {
  return Type::app(Type::app(Type::constant(TypeConst::semi()), std::move(first)),
                   std::move(second));
}
Type arrow(Type dom, Type cod) {
  return Type::app(Type::app(Type::constant(TypeConst::arrow()), std::move(dom)), std::move(cod));
}
Type var(const std::string& name) { return Type::var(VarName::user(name)); }
Type lam(const std::string& binder, Kind k, Type body) {
  return Type::abs(VarName::user(binder), std::move(k), std::move(body));
}
Type mu(const std::string& binder, Kind k, Type body) {
  return Type::app(Type::constant(TypeConst::mu(k)), lam(binder, k, std::move(body)));
}
Type forall(const std::string& binder, Kind k, Type body) {
  return Type::app(Type::constant(TypeConst::forall(k)), lam(binder, k, std::move(body)));
}
Type choice(View v, std::vector<std::pair<std::string, Type>> fields) {
  return make_labelled(v == View::External ? external_choice : internal_choice, std::move(fields));
}
Type record(std::vector<std::pair<std::string, Type>> fields) {
  return make_labelled(TypeConst::record, std::move(fields));
}
Type variant(std::vector<std::pair<std::string, Type>> fields) {
  return make_labelled(TypeConst::variant, std::move(fields));
}
}  // namespace build

bool match_seq(const Type& t, Type* first, Type* second) {
  if (!t.is_app() || !t.fun().is_app() || !t.fun().fun().is_const(ConstTag::Semi)) return false;
  if (first) *first = t.fun().arg();
  if (second) *second = t.arg();
  return true;
}

bool match_msg(const Type& t, Polarity* p, Type* payload) {
  if (!t.is_app() || !t.fun().is_const(ConstTag::Msg)) return false;
  if (p) *p = t.fun().con().polarity;
  if (payload) *payload = t.arg();
  return true;
}

bool match_dual(const Type& t, Type* inner) {
  if (!t.is_app() || !t.fun().is_const(ConstTag::Dual)) return false;
  if (inner) *inner = t.arg();
  return true;
}

bool match_mu(const Type& t, Type* body) {
  if (!t.is_app() || !t.fun().is_const(ConstTag::Mu)) return false;
  if (body) *body = t.arg();
  return true;
}

// --------------------------------------------------------------- printing

namespace {

enum Level { kTop = 0, kSeq = 1, kApp = 2, kAtom = 3 };

std::string print(const Type& t, int level);

std::string paren(std::string s, bool need) { return need ? "(" + s + ")" : s; }

std::string print_fields(const std::vector<std::string>& labels, const std::vector<Type>& args) {
  std::string out;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (i) out += ", ";
    out += labels[i] + ": " + print(args[i], kTop);
  }
  return out;
}

std::string print_bare_const(const TypeConst& c) {
  switch (c.tag) {
    case ConstTag::Semi: return "(;)";
    case ConstTag::Arrow: return "(->)";
    case ConstTag::Msg: return c.polarity == Polarity::In ? "(?)" : "(!)";
    case ConstTag::Choice:
      if (c.labels.empty()) return c.view == View::External ? "&{}" : "+{}";
      return c.str();
    default: return c.str();
  }
}

std::string print_binder(const char* kw, const Type& abs) {
  return std::string(kw) + abs.binder().str() + ":" + abs.kind().str() + ". " +
         print(abs.body(), kTop);
}

std::string print(const Type& t, int level) {
  switch (t.tag()) {
    case Type::Tag::Var: return t.var().str();
    case Type::Tag::Const: return print_bare_const(t.con());
    case Type::Tag::Abs: return paren(print_binder("\\", t), level > kTop);
    case Type::Tag::App: break;
  }
  Spine s = spine(t);
  if (s.head.tag() == Type::Tag::Const) {
    const TypeConst& c = s.head.con();
    const std::size_t n = s.args.size();
    if (n == c.arity()) {
      switch (c.tag) {
        case ConstTag::Mu:
        case ConstTag::Forall:
          if (s.args[0].is_abs() && s.args[0].kind() == c.kind) {
            const char* kw = c.tag == ConstTag::Mu ? "mu " : "forall ";
            return paren(print_binder(kw, s.args[0]), level > kTop);
          }
          break;
        case ConstTag::Semi:
          return paren(print(s.args[0], kApp) + ";" + print(s.args[1], kSeq), level > kSeq);
        case ConstTag::Arrow:
          return paren(print(s.args[0], kSeq) + " -> " + print(s.args[1], kTop), level > kTop);
        case ConstTag::Msg:
          return std::string(c.polarity == Polarity::In ? "?" : "!") + print(s.args[0], kAtom);
        case ConstTag::Choice:
          return std::string(c.view == View::External ? "&{" : "+{") +
                 print_fields(c.labels, s.args) + "}";
        case ConstTag::Record: return "{" + print_fields(c.labels, s.args) + "}";
        case ConstTag::Variant: return "<" + print_fields(c.labels, s.args) + ">";
        default: break;
      }
    }
  }
  return paren(print(t.fun(), kApp) + " " + print(t.arg(), kAtom), level > kApp);
}

}  // namespace

std::string to_string(const Type& t) {
  if (t.is_null()) return "<null>";
  return print(t, kTop);
}

}  // namespace fmo
