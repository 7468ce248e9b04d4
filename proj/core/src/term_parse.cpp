#include <algorithm>
#include <cctype>
#include <set>

#include "fmo/term.hpp"
#include "type_parser.hpp"

namespace fmo {

namespace {
const std::set<std::string>& reserved() {
  static const std::set<std::string> words = {
      "fun", "Fun", "rec", "let", "in", "case", "of", "match", "with", "tag", "as",
      "receive", "send", "select", "close", "fork", "new", "type"};
  return words;
}

class TermParser {
 public:
  TermParser(Lexer& lexer, const TypeAliases& aliases) : lx_(lexer), types_(lexer, aliases) {}

  Term parse_term() {
    if (lx_.accept_word("fun")) {
      bool unrestricted = lx_.accept_sym("*");
      std::string x = binder();
      lx_.expect_sym(":");
      Type t = types_.parse_seq_level();
      lx_.expect_sym("->");
      return Term::abs(x, t, parse_term(), unrestricted);
    }
    if (lx_.accept_word("Fun")) {
      std::string a = binder();
      lx_.expect_sym(":");
      Kind k = types_.parse_kind();
      lx_.expect_sym("->");
      return Term::tabs(a, k, parse_term());
    }
    if (lx_.accept_word("rec")) {
      std::string x = binder();
      lx_.expect_sym(":");
      Type t = types_.parse_type();
      lx_.expect_sym(".");
      return Term::rec(x, t, parse_term());
    }
    if (lx_.accept_word("let")) return parse_let();
    if (lx_.accept_word("case")) {
      Term scrutinee = parse_term();
      lx_.expect_word("of");
      return Term::case_of(scrutinee, handlers());
    }
    if (lx_.accept_word("match")) {
      Term scrutinee = parse_term();
      lx_.expect_word("with");
      return Term::match(scrutinee, handlers());
    }
    Term first = parse_app();
    if (!lx_.accept_sym(";")) return first;
    Term rest = parse_term();
    Term consume = Term::let_record({}, Term::var("_"), rest);
    return Term::app(Term::abs("_", build::record({}), consume), first);
  }

 private:
  std::string binder() {
    const Token tok = lx_.peek();
    std::string x = lx_.expect_ident("binder");
    if (reserved().count(x)) lx_.fail(tok, "reserved word used as binder");
    return x;
  }

  std::string label() { return lx_.expect_ident("label"); }

  Term parse_let() {
    const Token at = lx_.peek();
    std::vector<std::pair<std::string, std::string>> pattern;
    std::string single;
    if (lx_.accept_sym("{")) {
      if (!lx_.accept_sym("}")) {
        do {
          std::string l = label();
          lx_.expect_sym("=");
          pattern.emplace_back(l, binder());
        } while (lx_.accept_sym(","));
        lx_.expect_sym("}");
      }
    } else if (lx_.accept_sym("(")) {
      std::string x = binder();
      lx_.expect_sym(",");
      std::string y = binder();
      lx_.expect_sym(")");
      pattern = {{"Fst", x}, {"Snd", y}};
    } else {
      single = binder();
    }
    lx_.expect_sym("=");
    Term bound = parse_term();
    lx_.expect_word("in");
    Term body = parse_term();
    if (!single.empty()) return Term::let(single, bound, body);
    try {
      return Term::let_record(pattern, bound, body);
    } catch (const std::invalid_argument& e) {
      lx_.fail(at, e.what());
    }
  }

  std::vector<std::pair<std::string, Term>> fields() {
    std::vector<std::pair<std::string, Term>> out;
    lx_.expect_sym("{");
    if (lx_.accept_sym("}")) return out;
    do {
      const Token at = lx_.peek();
      std::string l = label();
      for (const auto& f : out) {
        if (f.first == l) lx_.fail(at, "duplicate label " + l);
      }
      lx_.expect_sym("=");
      out.emplace_back(l, parse_term());
    } while (lx_.accept_sym(","));
    lx_.expect_sym("}");
    return out;
  }

  std::vector<std::pair<std::string, Term>> handlers() {
    auto hs = fields();
    if (hs.empty()) lx_.fail("expected at least one handler");
    return hs;
  }

  bool starts_atom() const {
    const Token& t = lx_.peek();
    if (t.kind == Token::Kind::Ident) {
      if (!reserved().count(t.text)) return true;
      return t.text == "tag" || t.text == "select" || t.text == "receive" || t.text == "send" ||
             t.text == "close" || t.text == "fork" || t.text == "new";
    }
    return lx_.peek_sym("(") || lx_.peek_sym("{");
  }

  Term parse_app() {
    Term f = parse_atom();
    for (;;) {
      if (lx_.accept_sym("[")) {
        Type t = types_.parse_type();
        lx_.expect_sym("]");
        f = Term::tapp(f, t);
      } else if (starts_atom()) {
        f = Term::app(f, parse_atom());
      } else {
        return f;
      }
    }
  }

  Term parse_atom() {
    static const std::pair<const char*, ConstName> kConsts[] = {
        {"receive", ConstName::Receive}, {"send", ConstName::Send}, {"close", ConstName::Close},
        {"fork", ConstName::Fork},       {"new", ConstName::New}};
    for (const auto& [word, c] : kConsts) {
      if (lx_.accept_word(word)) return Term::constant(c);
    }
    if (lx_.accept_word("tag")) {
      std::string l = label();
      Term payload = parse_atom();
      lx_.expect_word("as");
      return Term::variant(l, payload, types_.parse_prefix());
    }
    if (lx_.accept_word("select")) {
      std::string l = label();
      lx_.expect_sym("[");
      Type t = types_.parse_type();
      lx_.expect_sym("]");
      return Term::select(l, t);
    }
    if (lx_.accept_sym("(")) {
      Term t = parse_term();
      if (lx_.accept_sym(",")) {
        Term u = parse_term();
        lx_.expect_sym(")");
        return Term::pair(t, u);
      }
      lx_.expect_sym(")");
      return t;
    }
    if (lx_.peek_sym("{")) return Term::record(fields());
    const Token& tok = lx_.peek();
    if (tok.kind == Token::Kind::Ident && !reserved().count(tok.text)) {
      return Term::var(lx_.next().text);
    }
    lx_.fail("expected term");
  }

  Lexer& lx_;
  TypeParser types_;
};

struct Chunk {
  int line;
  std::string text;
};

// Splits at lines that start a declaration in column 1.
std::vector<Chunk> declarations(std::string_view text) {
  std::vector<Chunk> out;
  int line = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view row = text.substr(pos, end - pos);
    ++line;
    bool starts = !row.empty() && !std::isspace(static_cast<unsigned char>(row[0])) &&
                  row.substr(0, 2) != "--";
    if (starts || out.empty()) {
      out.push_back({line, std::string(line - 1, '\n')});
    }
    out.back().text.append(row);
    out.back().text.push_back('\n');
    pos = end + 1;
  }
  return out;
}
}  // namespace

Program parse_program(std::string_view text) {
  Program prog;
  prog.aliases = builtin_aliases();
  struct Pending {
    std::string name;
    Term body;
    int line;
    int column;
  };
  std::vector<Pending> bodies;
  for (const Chunk& chunk : declarations(text)) {
    Lexer lx(chunk.text);
    if (lx.at_end()) continue;
    TypeParser types(lx, prog.aliases);
    if (lx.accept_word("type")) {
      const Token at = lx.peek();
      std::string name = lx.expect_ident("type name");
      lx.expect_sym("=");
      Type t = types.parse_type();
      if (!lx.at_end()) lx.fail("trailing input after type declaration");
      if (prog.aliases.count(name) && !builtin_aliases().count(name)) {
        lx.fail(at, "duplicate type declaration " + name);
      }
      prog.aliases[name] = t;
      continue;
    }
    const Token at = lx.peek();
    std::string name = lx.expect_ident("declaration");
    if (reserved().count(name)) lx.fail(at, "reserved word used as a name");
    if (lx.accept_sym(":")) {
      Type t = types.parse_type();
      if (!lx.at_end()) lx.fail("trailing input after signature");
      if (prog.find(name)) lx.fail(at, "duplicate signature for " + name);
      prog.bindings.push_back({name, t, std::nullopt, at.line});
      continue;
    }
    lx.expect_sym("=");
    TermParser terms(lx, prog.aliases);
    Term body = terms.parse_term();
    if (!lx.at_end()) lx.fail("trailing input after term");
    for (const Pending& p : bodies) {
      if (p.name == name) lx.fail(at, "duplicate definition of " + name);
    }
    bodies.push_back({name, body, at.line, at.column});
  }
  for (Pending& p : bodies) {
    auto it = std::find_if(prog.bindings.begin(), prog.bindings.end(),
                           [&](const Binding& b) { return b.name == p.name; });
    if (it == prog.bindings.end()) {
      throw ParseError(p.line, p.column, "missing signature for " + p.name);
    }
    it->body = std::move(p.body);
  }
  return prog;
}

Term parse_term(std::string_view text) { return parse_term(text, builtin_aliases()); }

Term parse_term(std::string_view text, const TypeAliases& aliases) {
  Lexer lx(text);
  TermParser p(lx, aliases);
  Term t = p.parse_term();
  if (!lx.at_end()) lx.fail("trailing input after term");
  return t;
}

}  // namespace fmo
