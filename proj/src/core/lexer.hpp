#pragma once

#include <string>
#include <string_view>

#include "lam/error.hpp"

namespace lam::detail {

enum class Tok { Ident, Not, Dot, Arrow, LParen, RParen, LBrace, RBrace, Pipe, Comma, End };

inline const char* describe(Tok t) {
  switch (t) {
    case Tok::Ident: return "identifier";
    case Tok::Not: return "'not'";
    case Tok::Dot: return "'.'";
    case Tok::Arrow: return "'=>'";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::LBrace: return "'{'";
    case Tok::RBrace: return "'}'";
    case Tok::Pipe: return "'|'";
    case Tok::Comma: return "','";
    case Tok::End: return "end of input";
  }
  return "?";
}

struct Token {
  Tok kind = Tok::End;
  std::string text;
  SourceSpan span;
};

// Spans count code points, not bytes.
class Lexer {
public:
  explicit Lexer(std::string_view text) : text_(text) { advance(); }

  const Token& peek() const { return current_; }

  Token take() {
    Token t = current_;
    advance();
    return t;
  }

  std::size_t length() const { return char_pos_ + count_chars(pos_, text_.size()); }

private:
  static bool ident_start(char c) {
    return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_';
  }
  static bool ident_char(char c) { return ident_start(c) || (c >= '0' && c <= '9'); }

  std::size_t count_chars(std::size_t from, std::size_t to) const {
    std::size_t n = 0;
    for (std::size_t i = from; i < to; ++i) {
      if ((static_cast<unsigned char>(text_[i]) & 0xC0) != 0x80) ++n;
    }
    return n;
  }

  std::size_t seq_len(std::size_t at) const {
    auto c = static_cast<unsigned char>(text_[at]);
    if (c < 0x80) return 1;
    if ((c >> 5) == 0x6) return 2;
    if ((c >> 4) == 0xE) return 3;
    return 4;
  }

  bool starts_with(std::string_view s) const { return text_.substr(pos_).starts_with(s); }

  void advance() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t' ||
                                   text_[pos_] == '\n' || text_[pos_] == '\r')) {
      ++pos_;
      ++char_pos_;
    }
    const std::size_t begin = pos_;
    const std::size_t begin_char = char_pos_;
    auto emit = [&](Tok kind, std::size_t bytes) {
      const std::size_t chars = count_chars(pos_, pos_ + bytes);
      pos_ += bytes;
      char_pos_ += chars;
      current_ = Token{kind, std::string(text_.substr(begin, bytes)),
                       SourceSpan{begin_char, begin_char + chars}};
    };
    if (pos_ >= text_.size()) {
      current_ = Token{Tok::End, "", SourceSpan{begin_char, begin_char}};
      return;
    }
    const char c = text_[pos_];
    if (ident_start(c)) {
      std::size_t end = pos_;
      while (end < text_.size() && ident_char(text_[end])) ++end;
      emit(text_.substr(begin, end - begin) == "not" ? Tok::Not : Tok::Ident, end - begin);
      return;
    }
    if (starts_with("\xC2\xAC")) return emit(Tok::Not, 2);     // ¬
    if (starts_with("=>")) return emit(Tok::Arrow, 2);
    if (starts_with("\xE2\x87\x92")) return emit(Tok::Arrow, 3);  // ⇒
    switch (c) {
      case '.': return emit(Tok::Dot, 1);
      case '(': return emit(Tok::LParen, 1);
      case ')': return emit(Tok::RParen, 1);
      case '{': return emit(Tok::LBrace, 1);
      case '}': return emit(Tok::RBrace, 1);
      case '|': return emit(Tok::Pipe, 1);
      case ',': return emit(Tok::Comma, 1);
      default: break;
    }
    const std::size_t bytes = std::min(seq_len(pos_), text_.size() - pos_);
    throw ParseError(SourceSpan{begin_char, begin_char + 1},
                     "unexpected character '" + std::string(text_.substr(begin, bytes)) + "'");
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t char_pos_ = 0;
  Token current_;
};

}  // namespace lam::detail
