#include "fmo/lts.hpp"

#include "fmo/kinding.hpp"
#include "fmo/parse.hpp"
#include "fmo/reduce.hpp"
#include "fmo/rename.hpp"
#include "hashing.hpp"

namespace fmo {

Label Label::var_head(VarName v, std::size_t i) {
  Label l;
  l.tag = Tag::VarHead;
  l.var = std::move(v);
  l.index = i;
  return l;
}

Label Label::const_head(TypeConst c, std::size_t i) {
  Label l;
  l.tag = Tag::ConstHead;
  l.con = std::move(c);
  l.index = i;
  return l;
}

Label Label::abs(VarName binder, Kind k) {
  Label l;
  l.tag = Tag::AbsLabel;
  l.var = std::move(binder);
  l.kind = std::move(k);
  return l;
}

std::string Label::str() const {
  switch (tag) {
    case Tag::VarHead: return var.str() + "_" + std::to_string(index);
    case Tag::AbsLabel: return "lambda " + var.str() + ":" + kind.str();
    case Tag::ConstHead:
      if (con.tag == ConstTag::End && index == 0) return "End";
      return con.str() + "_" + std::to_string(index);
  }
  return "?";
}

std::size_t Label::hash() const {
  std::size_t h = mix(0x51u, static_cast<std::size_t>(tag));
  switch (tag) {
    case Tag::VarHead: return mix(mix(h, var.hash()), index);
    case Tag::ConstHead: return mix(mix(h, con.hash()), index);
    case Tag::AbsLabel: return mix(mix(h, var.hash()), kind.hash());
  }
  return h;
}

std::strong_ordering operator<=>(const Label& a, const Label& b) {
  if (a.tag != b.tag) return a.tag <=> b.tag;
  switch (a.tag) {
    case Label::Tag::VarHead:
      if (auto c = a.var <=> b.var; c != 0) return c;
      return a.index <=> b.index;
    case Label::Tag::ConstHead:
      if (auto c = a.con <=> b.con; c != 0) return c;
      return a.index <=> b.index;
    case Label::Tag::AbsLabel:
      if (auto c = a.var <=> b.var; c != 0) return c;
      return a.kind <=> b.kind;
  }
  return std::strong_ordering::equal;
}

namespace {

[[noreturn]] void bad_label(const std::string& text) { throw ParseError(1, 1, "bad label: " + text); }

std::vector<std::string> split_labels(const std::string& inner) {
  std::vector<std::string> out;
  if (inner.empty()) return out;
  std::size_t start = 0;
  while (true) {
    std::size_t comma = inner.find(',', start);
    out.push_back(inner.substr(start, comma - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

VarName parse_var(const std::string& s) {
  if (s.empty()) bad_label(s);
  if (s[0] == '$') {
    Type t = parse_type(s);
    if (!t.is_var()) bad_label(s);
    return t.var();
  }
  return VarName::user(s);
}

}  // namespace

Label parse_label(const std::string& text) {
  if (text == "End") return Label::end();
  if (text.rfind("lambda ", 0) == 0) {
    std::string rest = text.substr(7);
    auto colon = rest.find(':');
    if (colon == std::string::npos) bad_label(text);
    return Label::abs(parse_var(rest.substr(0, colon)), parse_kind(rest.substr(colon + 1)));
  }
  auto us = text.rfind('_');
  if (us == std::string::npos || us + 1 >= text.size()) bad_label(text);
  std::size_t index = 0;
  try {
    index = std::stoul(text.substr(us + 1));
  } catch (const std::exception&) {
    bad_label(text);
  }
  std::string head = text.substr(0, us);
  auto bracketed = [&](const std::string& open, char close) -> std::optional<std::string> {
    if (head.size() >= open.size() + 1 && head.rfind(open, 0) == 0 && head.back() == close) {
      return head.substr(open.size(), head.size() - open.size() - 1);
    }
    return std::nullopt;
  };
  if (head == "->") return Label::const_head(TypeConst::arrow(), index);
  if (head == ";") return Label::const_head(TypeConst::semi(), index);
  if (head == "?") return Label::const_head(TypeConst::msg(Polarity::In), index);
  if (head == "!") return Label::const_head(TypeConst::msg(Polarity::Out), index);
  if (head == "Dual") return Label::const_head(TypeConst::dual(), index);
  if (head == "End") return Label::const_head(TypeConst::end(), index);
  if (auto k = bracketed("forall[", ']')) return Label::const_head(TypeConst::forall(parse_kind(*k)), index);
  if (auto k = bracketed("mu[", ']')) return Label::const_head(TypeConst::mu(parse_kind(*k)), index);
  if (auto ls = bracketed("&{", '}')) {
    return Label::const_head(TypeConst::choice(View::External, split_labels(*ls)), index);
  }
  if (auto ls = bracketed("+{", '}')) {
    return Label::const_head(TypeConst::choice(View::Internal, split_labels(*ls)), index);
  }
  if (auto ls = bracketed("{", '}')) return Label::const_head(TypeConst::record(split_labels(*ls)), index);
  if (auto ls = bracketed("<", '>')) return Label::const_head(TypeConst::variant(split_labels(*ls)), index);
  return Label::var_head(parse_var(head), index);
}

namespace {

bool var_headed(const Type& t, Spine* s) {
  *s = spine(t);
  return s->head.is_var();
}

}  // namespace

Transitions transitions(const KContext& ctx, const Type& t) {
  NormalizeResult r = normalize(ctx, t);
  if (r.divergent()) {
    throw KindError(KindError::Reason::NonNormalising, "type does not normalise: " + to_string(t), r.witness);
  }
  const Type& w = r.type;
  Transitions out;
  auto add = [&](Label l, const Type& next) { out.emplace(std::move(l), rename(next)); };
  const Type skip = build::skip();
  switch (w.tag()) {
    case Type::Tag::Var: add(Label::var_head(w.var(), 0), skip); return out;
    case Type::Tag::Const:
      if (!w.is_const(ConstTag::Skip)) add(Label::const_head(w.con(), 0), skip);
      return out;
    case Type::Tag::Abs: add(Label::abs(w.binder(), w.kind()), w.body()); return out;
    case Type::Tag::App: break;
  }
  Spine s = spine(w);
  const std::size_t m = s.args.size();
  if (s.head.is_var()) {
    add(Label::var_head(s.head.var(), 0), skip);
    for (std::size_t j = 0; j < m; ++j) add(Label::var_head(s.head.var(), j + 1), s.args[j]);
    return out;
  }
  if (s.head.tag() != Type::Tag::Const) return out;
  const TypeConst& c = s.head.con();
  switch (c.tag) {
    case ConstTag::Arrow:
    case ConstTag::Forall:
    case ConstTag::Choice:
    case ConstTag::Record:
    case ConstTag::Variant:
      for (std::size_t j = 0; j < m; ++j) add(Label::const_head(c, j + 1), s.args[j]);
      return out;
    case ConstTag::Msg:
      if (m == 1) {
        add(Label::const_head(c, 1), s.args[0]);
        add(Label::const_head(c, 2), skip);
      }
      return out;
    case ConstTag::Dual: {
      Spine inner;
      if (m == 1 && var_headed(s.args[0], &inner)) {
        add(Label::const_head(c, 1), s.args[0]);
        add(Label::const_head(c, 2), skip);
      }
      return out;
    }
    case ConstTag::Semi: break;
    default: return out;
  }
  if (m == 1) {
    add(Label::const_head(c, 1), s.args[0]);
    return out;
  }
  if (m != 2) return out;
  const Type& first = s.args[0];
  const Type& rest = s.args[1];
  Spine fs;
  if (var_headed(first, &fs)) {
    add(Label::var_head(fs.head.var(), 0), rest);
    for (std::size_t j = 0; j < fs.args.size(); ++j) add(Label::var_head(fs.head.var(), j + 1), fs.args[j]);
    return out;
  }
  if (first.is_const(ConstTag::End)) {
    add(Label::end(), skip);
    return out;
  }
  if (fs.head.tag() != Type::Tag::Const) return out;
  const TypeConst& fc = fs.head.con();
  if (fc.tag == ConstTag::Msg && fs.args.size() == 1) {
    add(Label::const_head(fc, 1), fs.args[0]);
    add(Label::const_head(fc, 2), rest);
  } else if (fc.tag == ConstTag::Choice && fs.args.size() == fc.arity()) {
    for (std::size_t j = 0; j < fs.args.size(); ++j) {
      add(Label::const_head(fc, j + 1), build::seq(fs.args[j], rest));
    }
  } else if (fc.tag == ConstTag::Dual && fs.args.size() == 1) {
    Spine inner;
    if (var_headed(fs.args[0], &inner)) {
      add(Label::const_head(fc, 1), fs.args[0]);
      add(Label::const_head(fc, 2), rest);
    }
  }
  return out;
}

}  // namespace fmo
