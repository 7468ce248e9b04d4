#include "lexer.hpp"

#include <cctype>

#include "fmo/parse.hpp"

namespace fmo {

namespace {
bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }
bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_';
}
}  // namespace

ParseError::ParseError(int line, int column, const std::string& message)
    : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
      line_(line),
      column_(column) {}

Lexer::Lexer(std::string_view src) {
  static const char* const kSymbols[] = {"&{", "+{", "=>", "->", "\\", ":", ".", ";", "(", ")",
                                         "{",  "}",  "<",  ">",  ",",  "?", "!", "[", "]",
                                         "=",  "*",  "|"};
  int line = 1;
  int column = 1;
  bool fresh_line = true;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
      if (src[i] == '\n') {
        ++line;
        column = 1;
        fresh_line = true;
      } else {
        ++column;
      }
      ++i;
    }
  };
  while (i < src.size()) {
    char c = src[i];
    if (c == '\n' || std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '-' && i + 1 < src.size() && src[i + 1] == '-') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    Token tok;
    tok.line = line;
    tok.column = column;
    tok.line_start = fresh_line && column == 1;
    fresh_line = false;
    std::size_t start = i;
    if (ident_start(c)) {
      while (i < src.size() && ident_char(src[i])) advance(1);
      tok.kind = Token::Kind::Ident;
      tok.text = std::string(src.substr(start, i - start));
    } else if (c == '$') {
      advance(1);
      std::size_t digits = i;
      while (i < src.size() && std::isdigit(static_cast<unsigned char>(src[i]))) advance(1);
      if (digits == i || src[digits] == '0') {
        throw ParseError(tok.line, tok.column, "malformed canonical variable");
      }
      tok.kind = Token::Kind::Canon;
      tok.text = std::string(src.substr(digits, i - digits));
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      while (i < src.size() && std::isdigit(static_cast<unsigned char>(src[i]))) advance(1);
      tok.kind = Token::Kind::Number;
      tok.text = std::string(src.substr(start, i - start));
    } else {
      bool matched = false;
      for (const char* sym : kSymbols) {
        std::string_view s(sym);
        if (src.substr(i, s.size()) == s) {
          tok.kind = Token::Kind::Sym;
          tok.text = std::string(s);
          advance(s.size());
          matched = true;
          break;
        }
      }
      if (!matched) {
        throw ParseError(tok.line, tok.column, std::string("unexpected character '") + c + "'");
      }
    }
    tokens_.push_back(std::move(tok));
  }
  Token eof;
  eof.kind = Token::Kind::Eof;
  eof.line = line;
  eof.column = column;
  eof.line_start = true;
  tokens_.push_back(eof);
}

const Token& Lexer::peek(std::size_t ahead) const {
  std::size_t k = pos_ + ahead;
  return k < tokens_.size() ? tokens_[k] : tokens_.back();
}

Token Lexer::next() {
  Token t = peek();
  if (pos_ < tokens_.size() - 1) ++pos_;
  return t;
}

bool Lexer::peek_sym(std::string_view s, std::size_t ahead) const {
  const Token& t = peek(ahead);
  return t.kind == Token::Kind::Sym && t.text == s;
}

bool Lexer::peek_word(std::string_view w, std::size_t ahead) const {
  const Token& t = peek(ahead);
  return t.kind == Token::Kind::Ident && t.text == w;
}

bool Lexer::accept_sym(std::string_view s) {
  if (!peek_sym(s)) return false;
  next();
  return true;
}

bool Lexer::accept_word(std::string_view w) {
  if (!peek_word(w)) return false;
  next();
  return true;
}

void Lexer::expect_sym(std::string_view s) {
  if (!accept_sym(s)) fail("expected '" + std::string(s) + "'");
}

void Lexer::expect_word(std::string_view w) {
  if (!accept_word(w)) fail("expected '" + std::string(w) + "'");
}

std::string Lexer::expect_ident(const char* what) {
  if (peek().kind != Token::Kind::Ident) fail(std::string("expected ") + what);
  return next().text;
}

void Lexer::fail(const Token& at, const std::string& message) const {
  std::string found = at.kind == Token::Kind::Eof ? "end of input" : "'" + at.text + "'";
  throw ParseError(at.line, at.column, message + " (found " + found + ")");
}

}  // namespace fmo
