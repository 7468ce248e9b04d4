#include <algorithm>

#include "type_parser.hpp"

namespace fmo {

namespace {
enum Labelled { kExternal, kInternal, kRecord, kVariant };

VarName canonical_name(const Lexer& lx, const Token& tok) {
  unsigned long n = 0;
  try {
    n = std::stoul(tok.text);
  } catch (const std::exception&) {
    lx.fail(tok, "bad canonical variable");
  }
  if (n == 0 || n > 0xffffffffUL) lx.fail(tok, "canonical variables start at $1");
  return VarName::canonical(static_cast<std::uint32_t>(n));
}

bool is_keyword(const std::string& s) {
  return s == "Skip" || s == "End" || s == "Dual" || s == "mu" || s == "forall";
}
}  // namespace

const TypeAliases& builtin_aliases() {
  static const TypeAliases aliases = [] {
    TypeAliases a;
    a["Unit"] = build::record({});
    a["Int"] = build::record({});
    a["Bool"] = build::variant({{"False", build::record({})}, {"True", build::record({})}});
    return a;
  }();
  return aliases;
}

Kind TypeParser::parse_kind() {
  Kind k = parse_kind_atom();
  if (lx_.accept_sym("=>")) return Kind::arrow(k, parse_kind());
  return k;
}

Kind TypeParser::parse_kind_atom() {
  if (lx_.accept_sym("(")) {
    Kind k = parse_kind();
    lx_.expect_sym(")");
    return k;
  }
  if (lx_.accept_word("S")) return Kind::session();
  if (lx_.accept_word("T")) return Kind::functional();
  lx_.fail("expected kind");
}

Type TypeParser::parse_type() {
  if (at_binder()) return parse_binder();
  Type left = parse_seq();
  if (lx_.accept_sym("->")) return build::arrow(left, parse_type());
  return left;
}

Type TypeParser::parse_seq_level() {
  if (at_binder()) return parse_binder();
  return parse_seq();
}

bool TypeParser::at_binder() const {
  if (lx_.peek_sym("\\")) return true;
  if (!lx_.peek_word("mu") && !lx_.peek_word("forall")) return false;
  auto k = lx_.peek(1).kind;
  return k == Token::Kind::Ident || k == Token::Kind::Canon;
}

Type TypeParser::parse_binder() {
  Token kw = lx_.next();
  VarName name;
  if (lx_.peek().kind == Token::Kind::Canon) {
    name = canonical_name(lx_, lx_.next());
  } else {
    std::string id = lx_.expect_ident("binder name");
    if (is_keyword(id)) lx_.fail(kw, "keyword used as binder");
    name = VarName::user(id);
  }
  lx_.expect_sym(":");
  Kind k = parse_kind();
  lx_.expect_sym(".");
  Type abs = Type::abs(name, k, parse_type());
  if (kw.text == "\\") return abs;
  return Type::app(Type::constant(kw.text == "mu" ? TypeConst::mu(k) : TypeConst::forall(k)), abs);
}

Type TypeParser::parse_seq() {
  Type left = parse_app_level();
  if (lx_.accept_sym(";")) return build::seq(left, parse_seq_level());
  return left;
}

bool TypeParser::starts_atom() const {
  const Token& t = lx_.peek();
  if (t.kind == Token::Kind::Canon) return true;
  if (t.kind == Token::Kind::Ident) {
    if (t.text == "mu" || t.text == "forall") return lx_.peek_sym("[", 1);
    return true;
  }
  if (t.kind != Token::Kind::Sym) return false;
  return t.text == "(" || t.text == "&{" || t.text == "+{" || t.text == "{" || t.text == "<" ||
         t.text == "?" || t.text == "!";
}

Type TypeParser::parse_app_level() {
  if (!starts_atom()) lx_.fail("expected type");
  Type t = parse_prefix();
  while (starts_atom()) t = Type::app(t, parse_prefix());
  return t;
}

Type TypeParser::parse_prefix() {
  if (lx_.accept_sym("?")) return build::msg(Polarity::In, parse_prefix());
  if (lx_.accept_sym("!")) return build::msg(Polarity::Out, parse_prefix());
  return parse_atom();
}

Type TypeParser::parse_atom() {
  const Token tok = lx_.peek();
  if (tok.kind == Token::Kind::Canon) {
    lx_.next();
    return Type::var(canonical_name(lx_, tok));
  }
  if (tok.kind == Token::Kind::Ident) {
    lx_.next();
    if (tok.text == "Skip") return build::skip();
    if (tok.text == "End") return build::end();
    if (tok.text == "Dual") return Type::constant(TypeConst::dual());
    if (tok.text == "mu" || tok.text == "forall") {
      lx_.expect_sym("[");
      Kind k = parse_kind();
      lx_.expect_sym("]");
      return Type::constant(tok.text == "mu" ? TypeConst::mu(k) : TypeConst::forall(k));
    }
    auto it = aliases_.find(tok.text);
    if (it != aliases_.end()) return it->second;
    return build::var(tok.text);
  }
  if (lx_.accept_sym("(")) {
    static const std::pair<const char*, TypeConst (*)()> kBare[] = {
        {";", TypeConst::semi},
        {"->", TypeConst::arrow},
        {"?", [] { return TypeConst::msg(Polarity::In); }},
        {"!", [] { return TypeConst::msg(Polarity::Out); }}};
    for (const auto& [sym, ctor] : kBare) {
      if (lx_.peek_sym(sym) && lx_.peek_sym(")", 1)) {
        lx_.next();
        lx_.next();
        return Type::constant(ctor());
      }
    }
    Type t = parse_type();
    lx_.expect_sym(")");
    return t;
  }
  if (lx_.accept_sym("&{")) return parse_labelled("}", kExternal);
  if (lx_.accept_sym("+{")) return parse_labelled("}", kInternal);
  if (lx_.accept_sym("{")) return parse_labelled("}", kRecord);
  if (lx_.accept_sym("<")) return parse_labelled(">", kVariant);
  lx_.fail("expected type");
}

Type TypeParser::parse_labelled(const char* close, int which) {
  std::vector<std::pair<std::string, Type>> fields;
  std::vector<Token> label_tokens;
  bool bare = false;
  if (!lx_.peek_sym(close)) {
    bare = !lx_.peek_sym(":", 1);
    do {
      label_tokens.push_back(lx_.peek());
      std::string label = lx_.expect_ident("label");
      Type t;
      if (!bare) {
        lx_.expect_sym(":");
        t = parse_type();
      }
      fields.emplace_back(std::move(label), std::move(t));
    } while (lx_.accept_sym(","));
  }
  lx_.expect_sym(close);
  if ((which == kExternal || which == kInternal) && fields.empty()) {
    lx_.fail("a choice needs at least one branch");
  }
  std::vector<std::size_t> order(fields.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return fields[a].first < fields[b].first; });
  std::vector<std::string> labels;
  for (std::size_t k = 0; k < order.size(); ++k) {
    if (k && fields[order[k]].first == fields[order[k - 1]].first) {
      lx_.fail(label_tokens[order[k]], "duplicate label " + fields[order[k]].first);
    }
    labels.push_back(fields[order[k]].first);
  }
  TypeConst c;
  switch (which) {
    case kExternal: c = TypeConst::choice(View::External, labels); break;
    case kInternal: c = TypeConst::choice(View::Internal, labels); break;
    case kRecord: c = TypeConst::record(labels); break;
    default: c = TypeConst::variant(labels); break;
  }
  Type t = Type::constant(std::move(c));
  if (bare) return t;
  for (std::size_t k : order) t = Type::app(t, fields[k].second);
  return t;
}

Type parse_type(std::string_view text) { return parse_type(text, builtin_aliases()); }

Type parse_type(std::string_view text, const TypeAliases& aliases) {
  Lexer lx(text);
  TypeParser p(lx, aliases);
  Type t = p.parse_type();
  if (!lx.at_end()) lx.fail("trailing input after type");
  return t;
}

Kind parse_kind(std::string_view text) {
  Lexer lx(text);
  TypeParser p(lx, builtin_aliases());
  Kind k = p.parse_kind();
  if (!lx.at_end()) lx.fail("trailing input after kind");
  return k;
}

KContext parse_kcontext(std::string_view text) {
  Lexer lx(text);
  TypeParser p(lx, builtin_aliases());
  KContext ctx;
  if (lx.at_end()) return ctx;
  do {
    std::string name = lx.expect_ident("variable");
    lx.expect_sym(":");
    ctx[VarName::user(name)] = p.parse_kind();
  } while (lx.accept_sym(","));
  if (!lx.at_end()) lx.fail("trailing input after context");
  return ctx;
}

}  // namespace fmo
