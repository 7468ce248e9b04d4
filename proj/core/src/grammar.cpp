#include "fmo/grammar.hpp"

#include <algorithm>
#include <limits>

#include "fmo/kinding.hpp"
#include "fmo/reduce.hpp"
#include "fmo/rename.hpp"

namespace fmo {

namespace {
constexpr std::size_t kSplitFactor = 2;
constexpr std::size_t kSplitSlack = 16;

Type cancel_duals(const Type& t) {
  Type inner, core;
  if (match_dual(t, &inner) && match_dual(inner, &core)) return cancel_duals(core);
  switch (t.tag()) {
    case Type::Tag::Abs: {
      Type body = cancel_duals(t.body());
      return body.same_node(t.body()) ? t : Type::abs(t.binder(), t.kind(), body);
    }
    case Type::Tag::App: {
      Type f = cancel_duals(t.fun());
      Type a = cancel_duals(t.arg());
      return f.same_node(t.fun()) && a.same_node(t.arg()) ? t : Type::app(f, a);
    }
    default: return t;
  }
}
}  // namespace

const std::map<Label, Word>& SimpleGrammar::of(NonTerm x) const {
  static const std::map<Label, Word> kNone;
  if (x == kBottom) return kNone;
  return productions.at(static_cast<std::size_t>(x));
}

std::size_t SimpleGrammar::production_count() const {
  std::size_t n = 0;
  for (const auto& p : productions) n += p.size();
  return n;
}

std::map<Label, Word> SimpleGrammar::step(const Word& w) const {
  std::map<Label, Word> out;
  if (w.empty()) return out;
  for (const auto& [label, body] : of(w.front())) {
    Word next = body;
    next.insert(next.end(), w.begin() + 1, w.end());
    out.emplace(label, std::move(next));
  }
  return out;
}

std::string word_string(const Word& w) {
  if (w.empty()) return "eps";
  std::string out;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i) out += " ";
    out += w[i] == kBottom ? "BOT" : "X" + std::to_string(w[i]);
  }
  return out;
}

GrammarBuilder::GrammarBuilder(KContext ctx) : ctx_(std::move(ctx)) {}

NonTerm GrammarBuilder::fresh() {
  grammar_.productions.emplace_back();
  return static_cast<NonTerm>(grammar_.productions.size() - 1);
}

void GrammarBuilder::add(NonTerm x, Label l, Word w) {
  auto [it, inserted] = grammar_.productions[static_cast<std::size_t>(x)].emplace(l, std::move(w));
  if (!inserted) {
    throw std::logic_error("grammar is not simple: two productions for X" + std::to_string(x) + " " + l.str());
  }
}

Word GrammarBuilder::cat(Word a, const Word& b) const {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

Word GrammarBuilder::word(const Type& t) {
  if (classify(t) == Fragment::FullMu) {
    throw FragmentError("recursion at an arrow kind is outside the grammar fragment: " + to_string(t));
  }
  Type r = rename(t);
  split_threshold_ = std::max(split_threshold_, kSplitFactor * r.size() + kSplitSlack);
  Word w = translate(r);
  grammar_.starts.push_back(w);
  return w;
}

void GrammarBuilder::finish() {
  for (; resolved_ < deferred_.size(); ++resolved_) {
    const Deferred& d = deferred_[resolved_];
    for (const auto& [label, body] : grammar_.of(d.source)) add(d.target, label, cat(body, d.suffix));
  }
}

Word GrammarBuilder::translate(const Type& t) {
  auto hit = memo_.find(t);
  if (hit != memo_.end()) return hit->second;
  const Word bottom{kBottom};
  auto single = [&](NonTerm y) {
    Word w{y};
    memo_.emplace(t, w);
    return y;
  };
  auto sub = [&](const Type& u) { return translate(rename(u)); };

  if (!is_whnf(t)) {
    // Duplicating abstractions and stacked duals can make successive normal
    // forms grow without bound. Past the threshold, compositions are
    // translated piecewise and double duals cancel; both yield bisimilar words.
    if (t.size() > split_threshold_) {
      Type first, second;
      if (match_seq(t, &first, &second)) return cat(sub(first), sub(second));
      Type collapsed = cancel_duals(t);
      if (!(collapsed == t)) {
        Word w = sub(collapsed);
        memo_.emplace(t, w);
        return w;
      }
    }
    NormalizeResult r = normalize(ctx_, t);
    if (r.divergent()) {
      throw KindError(KindError::Reason::NonNormalising, "type does not normalise: " + to_string(t), r.witness);
    }
    if (r.type.is_const(ConstTag::Skip)) {
      memo_.emplace(t, Word{});
      return {};
    }
    NonTerm y = single(fresh());
    Word target = translate(r.type);
    Word suffix(target.begin() + 1, target.end());
    deferred_.push_back({y, target.front(), std::move(suffix)});
    return {y};
  }

  switch (t.tag()) {
    case Type::Tag::Var: {
      NonTerm y = single(fresh());
      add(y, Label::var_head(t.var(), 0), {});
      return {y};
    }
    case Type::Tag::Const: {
      if (t.is_const(ConstTag::Skip)) {
        memo_.emplace(t, Word{});
        return {};
      }
      NonTerm y = single(fresh());
      if (t.is_const(ConstTag::End)) {
        add(y, Label::end(), bottom);
      } else {
        add(y, Label::const_head(t.con(), 0), {});
      }
      return {y};
    }
    case Type::Tag::Abs: {
      NonTerm y = single(fresh());
      add(y, Label::abs(t.binder(), t.kind()), sub(t.body()));
      return {y};
    }
    case Type::Tag::App: break;
  }

  Spine s = spine(t);
  if (s.head.is_var()) {
    NonTerm y = single(fresh());
    add(y, Label::var_head(s.head.var(), 0), {});
    for (std::size_t j = 0; j < s.args.size(); ++j) {
      add(y, Label::var_head(s.head.var(), j + 1), cat(sub(s.args[j]), bottom));
    }
    return {y};
  }
  const TypeConst& c = s.head.con();
  if (c.tag == ConstTag::Semi && s.args.size() == 2) {
    // Concatenation is not memoised; its parts are.
    return cat(sub(s.args[0]), sub(s.args[1]));
  }
  NonTerm y = single(fresh());
  switch (c.tag) {
    case ConstTag::Arrow:
    case ConstTag::Forall:
    case ConstTag::Choice:
    case ConstTag::Record:
    case ConstTag::Variant:
      for (std::size_t j = 0; j < s.args.size(); ++j) add(y, Label::const_head(c, j + 1), sub(s.args[j]));
      break;
    case ConstTag::Msg:
      add(y, Label::const_head(c, 1), cat(sub(s.args[0]), bottom));
      add(y, Label::const_head(c, 2), {});
      break;
    case ConstTag::Semi: add(y, Label::const_head(c, 1), sub(s.args[0])); break;
    case ConstTag::Dual:
      // The trailing bottom mirrors the type LTS, where Dual_1 leaves the
      // continuation of an enclosing sequence behind.
      add(y, Label::const_head(c, 1), cat(sub(s.args[0]), bottom));
      add(y, Label::const_head(c, 2), {});
      break;
    default: throw std::logic_error("word(): unexpected weak head normal form " + to_string(t));
  }
  return {y};
}

std::vector<Norm> norms(const SimpleGrammar& g) {
  std::vector<Norm> n(g.size());
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t x = 0; x < g.size(); ++x) {
      for (const auto& [label, body] : g.productions[x]) {
        std::uint64_t total = 1;
        bool ok = true;
        for (NonTerm y : body) {
          if (y == kBottom || !n[static_cast<std::size_t>(y)]) {
            ok = false;
            break;
          }
          std::uint64_t v = *n[static_cast<std::size_t>(y)];
          total = (total > std::numeric_limits<std::uint64_t>::max() - v) ? std::numeric_limits<std::uint64_t>::max()
                                                                        : total + v;
        }
        if (ok && (!n[x] || total < *n[x])) {
          n[x] = total;
          changed = true;
        }
      }
    }
  }
  return n;
}

}  // namespace fmo
