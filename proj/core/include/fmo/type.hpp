#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace fmo {

// A type variable: either a user identifier or a canonical `$i`.
class VarName {
 public:
  VarName() = default;

  static VarName user(std::string name);
  static VarName canonical(std::uint32_t index);

  bool is_canonical() const { return index_ != 0; }
  std::uint32_t index() const { return index_; }
  const std::string& name() const { return name_; }
  std::string str() const;
  std::size_t hash() const;

  friend bool operator==(const VarName& a, const VarName& b) {
    return a.index_ == b.index_ && a.name_ == b.name_;
  }
  friend std::strong_ordering operator<=>(const VarName& a, const VarName& b);

 private:
  std::uint32_t index_ = 0;
  std::string name_;
};

using VarSet = std::set<VarName>;

class Kind {
 public:
  enum class Tag : std::uint8_t { Session, Functional, Arrow };

  Kind() = default;
  static Kind session() { return Kind(Tag::Session); }
  static Kind functional() { return Kind(Tag::Functional); }
  static Kind arrow(Kind domain, Kind codomain);

  Tag tag() const { return tag_; }
  bool is_proper() const { return tag_ != Tag::Arrow; }
  bool is_session() const { return tag_ == Tag::Session; }
  const Kind& domain() const { return parts_->first; }
  const Kind& codomain() const { return parts_->second; }
  std::string str() const;
  std::size_t hash() const;

  friend bool operator==(const Kind& a, const Kind& b);
  friend std::strong_ordering operator<=>(const Kind& a, const Kind& b);

 private:
  explicit Kind(Tag tag) : tag_(tag) {}
  Tag tag_ = Tag::Session;
  std::shared_ptr<const std::pair<Kind, Kind>> parts_;
};

enum class ConstTag : std::uint8_t {
  Arrow, Record, Variant, Forall, Mu, Skip, End, Msg, Semi, Choice, Dual
};
enum class Polarity : std::uint8_t { In, Out };
enum class View : std::uint8_t { External, Internal };

struct TypeConst {
  ConstTag tag = ConstTag::Skip;
  Polarity polarity = Polarity::In;
  View view = View::External;
  Kind kind;
  std::vector<std::string> labels;

  static TypeConst arrow();
  static TypeConst record(std::vector<std::string> labels);
  static TypeConst variant(std::vector<std::string> labels);
  static TypeConst forall(Kind k);
  static TypeConst mu(Kind k);
  static TypeConst skip();
  static TypeConst end();
  static TypeConst msg(Polarity p);
  static TypeConst semi();
  static TypeConst choice(View v, std::vector<std::string> labels);
  static TypeConst dual();

  // Number of arguments of a saturated application.
  std::size_t arity() const;
  std::string str() const;
  std::size_t hash() const;

  friend bool operator==(const TypeConst& a, const TypeConst& b);
  friend std::strong_ordering operator<=>(const TypeConst& a, const TypeConst& b);
};

// Immutable, structurally shared type tree. Hash and free variables are
// computed once at construction.
class Type {
 public:
  enum class Tag : std::uint8_t { Const, Var, Abs, App };

  Type() = default;

  static Type constant(TypeConst c);
  static Type var(VarName v);
  static Type abs(VarName binder, Kind kind, Type body);
  static Type app(Type fun, Type arg);

  bool is_null() const { return node_ == nullptr; }
  Tag tag() const;
  const TypeConst& con() const;
  const VarName& var() const;
  const VarName& binder() const { return var(); }
  const Kind& kind() const;
  const Type& body() const;
  const Type& fun() const;
  const Type& arg() const;

  // Sorted free variables.
  const std::vector<VarName>& free() const;
  bool is_free(const VarName& v) const;
  bool has_binders() const;
  std::size_t hash() const;
  std::size_t size() const;
  bool same_node(const Type& o) const { return node_ == o.node_; }

  bool is_const(ConstTag t) const;
  bool is_var() const { return tag() == Tag::Var; }
  bool is_abs() const { return tag() == Tag::Abs; }
  bool is_app() const { return tag() == Tag::App; }

  friend bool operator==(const Type& a, const Type& b);

 private:
  struct Node;
  explicit Type(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

struct TypeHash {
  std::size_t operator()(const Type& t) const { return t.hash(); }
};

// Total order on types, used for deterministic containers.
bool type_less(const Type& a, const Type& b);

// Head and arguments of an application spine.
struct Spine {
  Type head;
  std::vector<Type> args;
};
Spine spine(const Type& t);
Type apply(Type head, const std::vector<Type>& args, std::size_t from = 0);

using KContext = std::map<VarName, Kind>;

namespace build {
Type skip();
Type end();
Type dual(Type t);
Type msg(Polarity p, Type payload);
Type seq(Type first, Type second);
Type arrow(Type dom, Type cod);
Type var(const std::string& name);
Type lam(const std::string& binder, Kind k, Type body);
Type mu(const std::string& binder, Kind k, Type body);
Type forall(const std::string& binder, Kind k, Type body);
Type choice(View v, std::vector<std::pair<std::string, Type>> fields);
Type record(std::vector<std::pair<std::string, Type>> fields);
Type variant(std::vector<std::pair<std::string, Type>> fields);
}  // namespace build

// Recognisers for saturated constant applications.
bool match_seq(const Type& t, Type* first = nullptr, Type* second = nullptr);
bool match_msg(const Type& t, Polarity* p = nullptr, Type* payload = nullptr);
bool match_dual(const Type& t, Type* inner = nullptr);
bool match_mu(const Type& t, Type* body = nullptr);

// Surface rendering; the output parses back to an equal type.
std::string to_string(const Type& t);

}  // namespace fmo

template <>
struct std::hash<fmo::Type> {
  std::size_t operator()(const fmo::Type& t) const { return t.hash(); }
};
