#include "fmo/fog.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <sstream>

#include "fmo/rename.hpp"

namespace fmo {

namespace {

std::vector<std::string> tokenize(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) out.push_back(std::move(cur));
    cur.clear();
  };
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (c == '#') break;
    if (std::isspace(static_cast<unsigned char>(c))) {
      flush();
    } else if (c == '(' || c == ')') {
      flush();
      out.emplace_back(1, c);
    } else if (c == '-' && i + 1 < line.size() && line[i + 1] == '>') {
      flush();
      out.emplace_back("->");
      ++i;
    } else {
      cur += c;
    }
  }
  flush();
  return out;
}

// Index of a formal `x<i>`, or 0.
std::size_t formal_index(const std::string& s) {
  if (s.size() < 2 || s[0] != 'x' || !std::all_of(s.begin() + 1, s.end(), ::isdigit) || s[1] == '0') return 0;
  return std::stoul(s.substr(1));
}

bool is_name(const std::string& s) {
  return !s.empty() && s != "(" && s != ")" && s != "->";
}

class ExprParser {
 public:
  ExprParser(const std::vector<std::string>& toks, std::size_t pos, std::size_t line,
             std::function<std::size_t(const std::string&)> arity, std::size_t formals)
      : toks_(toks), pos_(pos), line_(line), arity_(std::move(arity)), formals_(formals) {}

  FogExpr parse_all() {
    FogExpr e = parse_expr();
    if (pos_ != toks_.size()) throw FogError(line_, "unexpected '" + toks_[pos_] + "'");
    return e;
  }

 private:
  FogExpr parse_expr() {
    if (pos_ >= toks_.size()) throw FogError(line_, "expected an expression");
    if (toks_[pos_] == "(") return parse_atom();
    std::string name = toks_[pos_++];
    if (!is_name(name)) throw FogError(line_, "expected a name, found '" + name + "'");
    if (formal_index(name)) return formal(name);
    std::vector<FogExpr> args;
    while (pos_ < toks_.size() && toks_[pos_] != ")") args.push_back(parse_atom());
    return checked(std::move(name), std::move(args));
  }

  FogExpr parse_atom() {
    if (pos_ >= toks_.size()) throw FogError(line_, "expected an expression");
    if (toks_[pos_] == "(") {
      ++pos_;
      FogExpr e = parse_expr();
      if (pos_ >= toks_.size() || toks_[pos_] != ")") throw FogError(line_, "expected ')'");
      ++pos_;
      return e;
    }
    std::string name = toks_[pos_++];
    if (!is_name(name)) throw FogError(line_, "expected a name, found '" + name + "'");
    if (formal_index(name)) return formal(name);
    return checked(std::move(name), {});
  }

  FogExpr formal(const std::string& name) const {
    if (formal_index(name) > formals_) throw FogError(line_, "formal " + name + " out of range");
    return FogExpr::variable(name);
  }

  FogExpr checked(std::string name, std::vector<FogExpr> args) const {
    std::size_t n = arity_(name);
    if (args.size() != n) {
      throw FogError(line_, name + " expects " + std::to_string(n) + " arguments, got " + std::to_string(args.size()));
    }
    return FogExpr::apply(std::move(name), std::move(args));
  }

  const std::vector<std::string>& toks_;
  std::size_t pos_;
  std::size_t line_;
  std::function<std::size_t(const std::string&)> arity_;
  std::size_t formals_;
};

FogExpr instantiate(const FogExpr& body, const std::vector<FogExpr>& actuals) {
  if (body.is_var()) return actuals[formal_index(body.var) - 1];
  std::vector<FogExpr> args;
  args.reserve(body.args.size());
  for (const auto& a : body.args) args.push_back(instantiate(a, actuals));
  return FogExpr::apply(body.head, std::move(args));
}

void collect(const FogExpr& e, std::set<std::string>& out) {
  if (e.is_var()) return;
  out.insert(e.head);
  for (const auto& a : e.args) collect(a, out);
}

Kind arrow_kind(std::size_t arity) {
  Kind k = Kind::functional();
  for (std::size_t i = 0; i < arity; ++i) k = Kind::arrow(Kind::functional(), k);
  return k;
}

VarName formal_var(std::size_t i) { return VarName::user("x" + std::to_string(i)); }

}  // namespace

bool FogExpr::closed() const {
  if (is_var()) return false;
  return std::all_of(args.begin(), args.end(), [](const FogExpr& a) { return a.closed(); });
}

std::string FogExpr::str() const {
  if (is_var()) return var;
  std::string out = head;
  for (const auto& a : args) {
    std::string s = a.str();
    out += " " + (a.is_var() || a.args.empty() ? s : "(" + s + ")");
  }
  return out;
}

FogError::FogError(std::size_t line, const std::string& message)
    : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line) {}

std::size_t Fog::arity_of(const std::string& x) const {
  auto it = arity.find(x);
  return it == arity.end() ? 0 : it->second;
}

Fog parse_fog(const std::string& text) {
  Fog g;
  struct Pending {
    std::size_t line;
    std::vector<std::string> toks;
  };
  std::vector<Pending> rules;
  std::optional<Pending> start;
  std::istringstream in(text);
  std::string line;
  for (std::size_t n = 1; std::getline(in, line); ++n) {
    auto toks = tokenize(line);
    if (toks.empty()) continue;
    if (toks[0] == "arity") {
      if (toks.size() != 3 || !is_name(toks[1]) || formal_index(toks[1])) throw FogError(n, "expected 'arity <name> <n>'");
      std::size_t k = 0;
      try {
        k = std::stoul(toks[2]);
      } catch (const std::exception&) {
        throw FogError(n, "bad arity '" + toks[2] + "'");
      }
      if (!g.arity.emplace(toks[1], k).second) throw FogError(n, "arity of " + toks[1] + " declared twice");
    } else if (toks[0] == "start") {
      if (start) throw FogError(n, "start declared twice");
      start = Pending{n, std::move(toks)};
    } else {
      rules.push_back({n, std::move(toks)});
    }
  }
  auto arity = [&g](const std::string& x) { return g.arity_of(x); };
  for (const auto& r : rules) {
    const auto& t = r.toks;
    if (t.size() < 4 || t[2] != "->" || !is_name(t[0]) || !is_name(t[1]) || formal_index(t[0])) {
      throw FogError(r.line, "expected '<nonterminal> <terminal> -> <expression>'");
    }
    FogExpr body = ExprParser(t, 3, r.line, arity, g.arity_of(t[0])).parse_all();
    if (!g.productions[t[0]].emplace(t[1], std::move(body)).second) {
      throw FogError(r.line, "grammar is not deterministic: " + t[0] + " has two " + t[1] + "-productions");
    }
  }
  if (!start) throw FogError(0, "missing 'start' line");
  g.start = ExprParser(start->toks, 1, start->line, arity, 0).parse_all();
  return g;
}

FogExpr parse_fog_expr(const Fog& g, const std::string& text) {
  auto toks = tokenize(text);
  return ExprParser(toks, 0, 1, [&g](const std::string& x) { return g.arity_of(x); }, 0).parse_all();
}

std::string fog_to_string(const Fog& g) {
  std::ostringstream out;
  for (const auto& [x, n] : g.arity) {
    if (n) out << "arity " << x << " " << n << "\n";
  }
  for (const auto& [x, rules] : g.productions) {
    for (const auto& [a, body] : rules) out << x << " " << a << " -> " << body.str() << "\n";
  }
  out << "start " << g.start.str() << "\n";
  return out.str();
}

std::map<std::string, FogExpr> fog_transitions(const Fog& g, const FogExpr& e) {
  std::map<std::string, FogExpr> out;
  if (e.is_var()) return out;
  auto it = g.productions.find(e.head);
  if (it == g.productions.end()) return out;
  for (const auto& [a, body] : it->second) out.emplace(a, instantiate(body, e.args));
  return out;
}

std::optional<FogExpr> fog_step(const Fog& g, const FogExpr& e, const std::string& terminal) {
  if (e.is_var()) return std::nullopt;
  auto it = g.productions.find(e.head);
  if (it == g.productions.end()) return std::nullopt;
  auto rule = it->second.find(terminal);
  if (rule == it->second.end()) return std::nullopt;
  return instantiate(rule->second, e.args);
}

std::set<std::vector<std::string>> fog_traces(const Fog& g, const FogExpr& e, std::size_t depth) {
  std::set<std::vector<std::string>> out;
  std::vector<std::string> path;
  std::function<void(const FogExpr&)> walk = [&](const FogExpr& cur) {
    out.insert(path);
    if (path.size() == depth) return;
    for (const auto& [a, next] : fog_transitions(g, cur)) {
      path.push_back(a);
      walk(next);
      path.pop_back();
    }
  };
  walk(e);
  return out;
}

std::set<std::vector<std::string>> encoded_traces(const Type& t, std::size_t depth) {
  std::set<std::vector<std::string>> out;
  std::vector<std::string> path;
  std::function<void(const Type&)> walk = [&](const Type& cur) {
    out.insert(path);
    if (path.size() == depth) return;
    for (const auto& [label, next] : transitions({}, cur)) {
      bool record = label.tag == Label::Tag::ConstHead && label.con.tag == ConstTag::Record;
      if (record && label.index == 0 && label.con.labels.empty()) continue;
      if (record && label.index >= 1 && label.index <= label.con.labels.size()) {
        path.push_back(label.con.labels[label.index - 1]);
      } else {
        path.push_back("?" + label.str());
      }
      walk(next);
      path.pop_back();
    }
  };
  walk(t);
  return out;
}

FogEncoding::FogEncoding(const Fog& g) : grammar_(g) {
  std::set<std::string> names;
  for (const auto& [x, _] : g.arity) names.insert(x);
  for (const auto& [x, rules] : g.productions) {
    names.insert(x);
    for (const auto& [_, body] : rules) collect(body, names);
  }
  collect(g.start, names);

  auto callees = [&](const std::string& x) {
    std::set<std::string> out;
    auto it = g.productions.find(x);
    if (it != g.productions.end()) {
      for (const auto& [_, body] : it->second) collect(body, out);
    }
    return out;
  };

  // Tarjan's algorithm; components come out callees first.
  std::map<std::string, int> index, low;
  std::vector<std::string> stack;
  std::set<std::string> on_stack;
  std::vector<std::vector<std::string>> components;
  int counter = 0;
  std::function<void(const std::string&)> visit = [&](const std::string& x) {
    index[x] = low[x] = counter++;
    stack.push_back(x);
    on_stack.insert(x);
    for (const auto& y : callees(x)) {
      if (!index.count(y)) {
        visit(y);
        low[x] = std::min(low[x], low[y]);
      } else if (on_stack.count(y)) {
        low[x] = std::min(low[x], index[y]);
      }
    }
    if (low[x] == index[x]) {
      std::vector<std::string> comp;
      std::string y;
      do {
        y = stack.back();
        stack.pop_back();
        on_stack.erase(y);
        comp.push_back(y);
      } while (y != x);
      std::sort(comp.begin(), comp.end());
      components.push_back(std::move(comp));
    }
  };
  for (const auto& x : names) {
    if (!index.count(x)) visit(x);
  }

  for (std::size_t c = 0; c < components.size(); ++c) {
    for (const auto& x : components[c]) {
      component_[x] = static_cast<int>(c);
      recursive_[x] = components[c].size() > 1 || callees(x).count(x);
    }
    for (const auto& x : components[c]) {
      Type t;
      if (recursive_[x]) {
        t = close_group(x, {});
      } else {
        t = body(x, {});
        for (std::size_t i = grammar_.arity_of(x); i > 0; --i) t = Type::abs(formal_var(i), Kind::functional(), t);
      }
      closed_[x] = rename(t);
    }
  }
}

Type FogEncoding::close_group(const std::string& x, std::map<std::string, VarName> bound) const {
  VarName self = VarName::user("self_" + x);
  bound.emplace(x, self);
  Type t = body(x, bound);
  std::size_t m = grammar_.arity_of(x);
  for (std::size_t i = m; i > 0; --i) t = Type::abs(formal_var(i), Kind::functional(), t);
  Type mu = Type::constant(TypeConst::mu(arrow_kind(m)));
  return Type::app(mu, Type::abs(self, arrow_kind(m), t));
}

Type FogEncoding::body(const std::string& x, const std::map<std::string, VarName>& bound) const {
  std::vector<std::pair<std::string, Type>> fields;
  auto it = grammar_.productions.find(x);
  if (it != grammar_.productions.end()) {
    for (const auto& [a, e] : it->second) fields.emplace_back(a, expr(e, bound));
  }
  return build::record(std::move(fields));
}

Type FogEncoding::expr(const FogExpr& e, const std::map<std::string, VarName>& bound) const {
  if (e.is_var()) return Type::var(VarName::user(e.var));
  std::vector<Type> args;
  for (const auto& a : e.args) args.push_back(expr(a, bound));
  auto b = bound.find(e.head);
  if (b != bound.end()) return fmo::apply(Type::var(b->second), args);
  auto done = closed_.find(e.head);
  if (done == closed_.end()) {
    // Another member of the component being closed.
    return fmo::apply(close_group(e.head, bound), args);
  }
  if (recursive_.at(e.head)) return fmo::apply(done->second, args);
  // Non-recursive nonterminals are inlined.
  Type t = done->second;
  std::vector<std::pair<VarName, Type>> subst;
  for (const Type& a : args) {
    subst.emplace_back(t.binder(), a);
    t = t.body();
  }
  return subst.empty() ? t : rename_subst(t, subst);
}

Type FogEncoding::encode(const FogExpr& e) const {
  if (!e.closed()) throw std::invalid_argument("expression is not closed: " + e.str());
  return rename(expr(e, {}));
}

}  // namespace fmo
