#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace fmo {

struct Token {
  enum class Kind { Ident, Canon, Number, Sym, Eof };
  Kind kind = Kind::Eof;
  std::string text;
  int line = 1;
  int column = 1;
  // True when the token is the first on its line and starts at column 1.
  bool line_start = false;
};

class Lexer {
 public:
  explicit Lexer(std::string_view source);

  const Token& peek(std::size_t ahead = 0) const;
  Token next();
  bool at_end() const { return peek().kind == Token::Kind::Eof; }

  bool peek_sym(std::string_view s, std::size_t ahead = 0) const;
  bool peek_word(std::string_view w, std::size_t ahead = 0) const;
  bool accept_sym(std::string_view s);
  bool accept_word(std::string_view w);
  void expect_sym(std::string_view s);
  void expect_word(std::string_view w);
  std::string expect_ident(const char* what);

  std::size_t position() const { return pos_; }
  void reset(std::size_t pos) { pos_ = pos; }

  [[noreturn]] void fail(const Token& at, const std::string& message) const;
  [[noreturn]] void fail(const std::string& message) const { fail(peek(), message); }

 private:
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

}  // namespace fmo
