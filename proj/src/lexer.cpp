#include "dj/lexer.hpp"

#include <array>
#include <cctype>

namespace dj {

namespace {

constexpr std::array kKeywords = {
    "insert", "delete", "update", "populate", "make", "with", "U", "And", "Not", "master", "null", "in",
    "int", "unsigned", "decimal", "char", "varchar", "date", "datetime", "year", "enum", "double",
    "count", "sum", "min", "max", "avg", "median", "percentile", "stddev", "var",
};

constexpr std::array kAggregates = {"count", "sum", "min", "max", "avg", "median", "percentile", "stddev", "var"};

// Longest symbols first so that maximal munch works by linear scan.
constexpr std::array kSymbols = {"...", "---", "::", "->", "==", "!=", "<>", "<=", ">=", ":", "=", "<", ">",
                                 "+",   "-",   "*",  "/",  "&",  "\\", "(",  ")",  "[",  "]", "{", "}",
                                 ",",   ".",   ";"};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool digit(char c) { return c >= '0' && c <= '9'; }

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    while (true) {
      skip_space();
      if (pos_ >= src_.size()) break;
      const char c = src_[pos_];
      if (c == '#') {
        lex_comment();
      } else if (c == '"' || c == '\'') {
        lex_string(c);
      } else if (digit(c) || (c == '.' && pos_ + 1 < src_.size() && digit(src_[pos_ + 1]))) {
        lex_number_or_date(false);
      } else if (c == '-' && pos_ + 1 < src_.size() && digit(src_[pos_ + 1]) && !previous_ends_operand() &&
                 !starts_with("---")) {
        lex_number_or_date(true);
      } else if (ident_start(c)) {
        lex_word();
      } else if (!lex_symbol()) {
        throw LexError({line_, column_}, std::string("illegal character '") + c + "'");
      }
    }
    Token end;
    end.kind = TokenKind::End;
    end.line = line_;
    end.column = column_;
    end.offset = end.end = src_.size();
    tokens_.push_back(end);
    return std::move(tokens_);
  }

 private:
  bool starts_with(std::string_view s) const { return src_.substr(pos_, s.size()) == s; }

  bool previous_ends_operand() const {
    for (auto it = tokens_.rbegin(); it != tokens_.rend(); ++it) {
      if (it->kind == TokenKind::Comment) continue;
      if (it->line != line_) return false;
      switch (it->kind) {
        case TokenKind::Identifier:
        case TokenKind::Number:
        case TokenKind::String:
          return true;
        case TokenKind::Keyword:
          return it->text == "null";
        case TokenKind::Symbol:
          return it->text == ")" || it->text == "]" || it->text == "}";
        default:
          return false;
      }
    }
    return false;
  }

  void advance(std::size_t n = 1) {
    for (std::size_t i = 0; i < n && pos_ < src_.size(); ++i) {
      if (src_[pos_] == '\n') {
        ++line_;
        column_ = 1;
      } else {
        ++column_;
      }
      ++pos_;
    }
  }

  void skip_space() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) advance();
  }

  Token begin(TokenKind kind) const {
    Token t;
    t.kind = kind;
    t.line = line_;
    t.column = column_;
    t.offset = pos_;
    return t;
  }

  void finish(Token t) {
    t.end = pos_;
    tokens_.push_back(std::move(t));
  }

  void lex_comment() {
    Token t = begin(TokenKind::Comment);
    advance();
    std::size_t start = pos_;
    while (pos_ < src_.size() && src_[pos_] != '\n') advance();
    std::string_view body = src_.substr(start, pos_ - start);
    while (!body.empty() && std::isspace(static_cast<unsigned char>(body.front()))) body.remove_prefix(1);
    while (!body.empty() && std::isspace(static_cast<unsigned char>(body.back()))) body.remove_suffix(1);
    t.text = std::string(body);
    finish(std::move(t));
  }

  void lex_string(char quote) {
    Token t = begin(TokenKind::String);
    advance();
    std::string value;
    while (true) {
      if (pos_ >= src_.size() || src_[pos_] == '\n') {
        throw LexError(t.pos(), "unterminated string literal");
      }
      const char c = src_[pos_];
      if (c == quote) {
        advance();
        break;
      }
      if (c == '\\' && pos_ + 1 < src_.size()) {
        const char n = src_[pos_ + 1];
        advance(2);
        switch (n) {
          case 'n': value += '\n'; break;
          case 't': value += '\t'; break;
          default: value += n; break;
        }
        continue;
      }
      value += c;
      advance();
    }
    t.text = std::move(value);
    finish(std::move(t));
  }

  bool date_at(std::size_t p) const {
    if (p + 10 > src_.size()) return false;
    for (std::size_t i = 0; i < 10; ++i) {
      const char c = src_[p + i];
      if (i == 4 || i == 7) {
        if (c != '-') return false;
      } else if (!digit(c)) {
        return false;
      }
    }
    return p + 10 == src_.size() || !ident_char(src_[p + 10]);
  }

  void lex_number_or_date(bool negative) {
    if (!negative && date_at(pos_)) {
      Token t = begin(TokenKind::String);
      t.text = std::string(src_.substr(pos_, 10));
      advance(10);
      finish(std::move(t));
      return;
    }
    Token t = begin(TokenKind::Number);
    std::size_t start = pos_;
    if (negative) advance();
    while (pos_ < src_.size() && digit(src_[pos_])) advance();
    if (pos_ < src_.size() && src_[pos_] == '.' && !starts_with("...")) {
      advance();
      while (pos_ < src_.size() && digit(src_[pos_])) advance();
    }
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t save = pos_;
      int line = line_, col = column_;
      advance();
      if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) advance();
      if (pos_ < src_.size() && digit(src_[pos_])) {
        while (pos_ < src_.size() && digit(src_[pos_])) advance();
      } else {
        pos_ = save;
        line_ = line;
        column_ = col;
      }
    }
    if (pos_ < src_.size() && ident_start(src_[pos_])) {
      throw LexError({line_, column_}, "malformed number");
    }
    t.text = std::string(src_.substr(start, pos_ - start));
    finish(std::move(t));
  }

  void lex_word() {
    Token t = begin(TokenKind::Identifier);
    std::size_t start = pos_;
    while (pos_ < src_.size() && ident_char(src_[pos_])) advance();
    t.text = std::string(src_.substr(start, pos_ - start));
    if (is_keyword(t.text)) t.kind = TokenKind::Keyword;
    finish(std::move(t));
  }

  bool lex_symbol() {
    for (std::string_view sym : kSymbols) {
      if (starts_with(sym)) {
        Token t = begin(TokenKind::Symbol);
        t.text = std::string(sym);
        advance(sym.size());
        // a divider may be drawn longer than three dashes
        if (sym == "---") {
          while (pos_ < src_.size() && src_[pos_] == '-') advance();
        }
        finish(std::move(t));
        return true;
      }
    }
    return false;
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int column_ = 1;
  std::vector<Token> tokens_;
};

}  // namespace

std::string_view to_string(TokenKind kind) {
  switch (kind) {
    case TokenKind::Identifier: return "identifier";
    case TokenKind::Number: return "number";
    case TokenKind::String: return "string";
    case TokenKind::Symbol: return "symbol";
    case TokenKind::Comment: return "comment";
    case TokenKind::Keyword: return "keyword";
    case TokenKind::End: return "end of input";
  }
  return "?";
}

bool is_keyword(std::string_view word) {
  for (std::string_view k : kKeywords) {
    if (k == word) return true;
  }
  return false;
}

bool is_aggregate_function(std::string_view word) {
  for (std::string_view k : kAggregates) {
    if (k == word) return true;
  }
  return false;
}

std::vector<Token> tokenize(std::string_view source) { return Lexer(source).run(); }

}  // namespace dj
