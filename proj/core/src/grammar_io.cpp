#include <sstream>

#include "json.hpp"

#include "fmo/grammar.hpp"

namespace fmo {

namespace {

using nlohmann::json;

std::string symbol_name(NonTerm x) { return x == kBottom ? "BOT" : "X" + std::to_string(x); }

json word_json(const Word& w) {
  json out = json::array();
  for (NonTerm x : w) out.push_back(symbol_name(x));
  return out;
}

NonTerm parse_symbol(const std::string& s, std::size_t size) {
  if (s == "BOT") return kBottom;
  if (s.size() < 2 || s[0] != 'X') throw std::invalid_argument("bad nonterminal '" + s + "'");
  std::size_t used = 0;
  unsigned long n = std::stoul(s.substr(1), &used);
  if (used != s.size() - 1 || n >= size) throw std::invalid_argument("bad nonterminal '" + s + "'");
  return static_cast<NonTerm>(n);
}

Word parse_word(const json& j, std::size_t size) {
  Word w;
  for (const auto& s : j) w.push_back(parse_symbol(s.get<std::string>(), size));
  return w;
}

}  // namespace

std::string dump_grammar(const SimpleGrammar& g) {
  std::ostringstream out;
  if (g.starts.empty()) out << "start: eps\n";
  for (const Word& s : g.starts) out << "start: " << word_string(s) << "\n";
  for (std::size_t x = 0; x < g.size(); ++x) {
    for (const auto& [label, body] : g.productions[x]) {
      out << symbol_name(static_cast<NonTerm>(x)) << " " << label.str() << " -> " << word_string(body) << "\n";
    }
  }
  return out.str();
}

std::string grammar_to_json(const SimpleGrammar& g) {
  json productions = json::array();
  for (std::size_t x = 0; x < g.size(); ++x) {
    for (const auto& [label, body] : g.productions[x]) {
      productions.push_back(
          {{"lhs", symbol_name(static_cast<NonTerm>(x))}, {"label", label.str()}, {"rhs", word_json(body)}});
    }
  }
  json starts = json::array();
  for (const Word& s : g.starts) starts.push_back(word_json(s));
  json doc = {{"schema_version", 1},
              {"nonterminals", g.size()},
              {"start", g.starts.empty() ? json::array() : word_json(g.starts.front())},
              {"starts", starts},
              {"productions", productions}};
  return doc.dump(2);
}

SimpleGrammar grammar_from_json(const std::string& text) {
  json doc = json::parse(text);
  if (doc.value("schema_version", 0) != 1) throw std::invalid_argument("unsupported grammar schema_version");
  SimpleGrammar g;
  std::size_t size = doc.at("nonterminals").get<std::size_t>();
  g.productions.resize(size);
  for (const auto& p : doc.at("productions")) {
    NonTerm lhs = parse_symbol(p.at("lhs").get<std::string>(), size);
    if (lhs == kBottom) throw std::invalid_argument("BOT has no productions");
    Label label = parse_label(p.at("label").get<std::string>());
    if (!g.productions[static_cast<std::size_t>(lhs)].emplace(label, parse_word(p.at("rhs"), size)).second) {
      throw std::invalid_argument("grammar is not simple: duplicate label " + label.str());
    }
  }
  if (doc.contains("starts")) {
    for (const auto& s : doc.at("starts")) g.starts.push_back(parse_word(s, size));
  } else if (doc.contains("start")) {
    g.starts.push_back(parse_word(doc.at("start"), size));
  }
  return g;
}

}  // namespace fmo
