#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "fmo/lts.hpp"
#include "fmo/type.hpp"

namespace fmo {

using NonTerm = int;
constexpr NonTerm kBottom = -1;
using Word = std::vector<NonTerm>;

class FragmentError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Simple grammar in Greibach normal form. Nonterminals are 0..size()-1;
// kBottom has no productions.
struct SimpleGrammar {
  std::vector<std::map<Label, Word>> productions;
  std::vector<Word> starts;

  std::size_t size() const { return productions.size(); }
  const std::map<Label, Word>& of(NonTerm x) const;
  std::size_t production_count() const;
  // Transitions of a word in the grammar LTS.
  std::map<Label, Word> step(const Word& w) const;

  friend bool operator==(const SimpleGrammar&, const SimpleGrammar&) = default;
};

// Builds word(T) for types of the mu-star fragment. Several words may share
// one builder; call finish() before reading the grammar.
class GrammarBuilder {
 public:
  explicit GrammarBuilder(KContext ctx = {});

  // Throws FragmentError for recursion at an arrow kind and KindError when
  // the type does not normalise.
  Word word(const Type& t);
  void finish();
  const SimpleGrammar& grammar() const { return grammar_; }

 private:
  struct Deferred {
    NonTerm target;
    NonTerm source;
    Word suffix;
  };

  Word translate(const Type& t);
  NonTerm fresh();
  void add(NonTerm x, Label l, Word w);
  Word cat(Word a, const Word& b) const;

  KContext ctx_;
  SimpleGrammar grammar_;
  std::unordered_map<Type, Word, TypeHash> memo_;
  std::vector<Deferred> deferred_;
  std::size_t resolved_ = 0;
  std::size_t split_threshold_ = 0;
};

// Least number of steps to the empty word; nullopt for unnormed symbols.
using Norm = std::optional<std::uint64_t>;
std::vector<Norm> norms(const SimpleGrammar& g);

struct GrammarLimits {
  std::size_t node_cap = 100000;
  std::size_t depth_cap = 1000;
};

Verdict grammar_bisim(const SimpleGrammar& g, const Word& a, const Word& b, const GrammarLimits& limits = {});

std::string word_string(const Word& w);

// Text dump: first line `start: <word>`, then `X3 &{Leaf,Node}_2 -> X3 X4 X1`.
std::string dump_grammar(const SimpleGrammar& g);
std::string grammar_to_json(const SimpleGrammar& g);
SimpleGrammar grammar_from_json(const std::string& text);

}  // namespace fmo
