#include "dj/lexer.hpp"

#include <gtest/gtest.h>

namespace dj {
namespace {

std::vector<Token> without_end(std::string_view src) {
  auto toks = tokenize(src);
  EXPECT_EQ(toks.back().kind, TokenKind::End);
  toks.pop_back();
  return toks;
}

TEST(Lexer, EntityHeaderSplitsIntoTwoTokens) {
  auto toks = without_end("::Student");
  ASSERT_EQ(toks.size(), 2u);
  EXPECT_TRUE(toks[0].is_symbol("::"));
  EXPECT_EQ(toks[1].kind, TokenKind::Identifier);
  EXPECT_EQ(toks[1].text, "Student");
}

TEST(Lexer, AttributeLineWithComment) {
  auto toks = without_end("student_id : int unsigned   # university ID");
  ASSERT_EQ(toks.size(), 5u);
  EXPECT_EQ(toks[0].kind, TokenKind::Identifier);
  EXPECT_TRUE(toks[1].is_symbol(":"));
  EXPECT_TRUE(toks[2].is_keyword("int"));
  EXPECT_TRUE(toks[3].is_keyword("unsigned"));
  EXPECT_EQ(toks[4].kind, TokenKind::Comment);
  EXPECT_EQ(toks[4].text, "university ID");
}

TEST(Lexer, HashInsideStringIsNotAComment) {
  auto toks = without_end("x == 'a#b'");
  ASSERT_EQ(toks.size(), 3u);
  EXPECT_EQ(toks[2].kind, TokenKind::String);
  EXPECT_EQ(toks[2].text, "a#b");
}

TEST(Lexer, BareDateIsAString) {
  auto toks = without_end("(1000, 1997-09-13)");
  ASSERT_EQ(toks.size(), 5u);
  EXPECT_EQ(toks[3].kind, TokenKind::String);
  EXPECT_EQ(toks[3].text, "1997-09-13");
}

TEST(Lexer, NegativeNumbersOnlyWhereAnOperandIsExpected) {
  auto a = without_end("x > -5");
  ASSERT_EQ(a.size(), 3u);
  EXPECT_EQ(a[2].kind, TokenKind::Number);
  EXPECT_EQ(a[2].text, "-5");

  auto b = without_end("x -5");
  ASSERT_EQ(b.size(), 3u);
  EXPECT_TRUE(b[1].is_symbol("-"));
  EXPECT_EQ(b[2].text, "5");
}

TEST(Lexer, PositionsAreOneBased) {
  auto toks = without_end("A\n  & b == 1");
  EXPECT_EQ(toks[0].line, 1);
  EXPECT_EQ(toks[0].column, 1);
  EXPECT_EQ(toks[1].line, 2);
  EXPECT_EQ(toks[1].column, 3);
}

TEST(Lexer, LongDividerIsOneToken) {
  auto toks = without_end("------");
  ASSERT_EQ(toks.size(), 1u);
  EXPECT_TRUE(toks[0].is_symbol("---"));
}

TEST(Lexer, Errors) {
  try {
    tokenize("a == 'open");
    FAIL() << "expected LexError";
  } catch (const LexError& e) {
    EXPECT_EQ(e.pos().line, 1);
    EXPECT_EQ(e.pos().column, 6);
  }
  try {
    tokenize("a\n  $");
    FAIL() << "expected LexError";
  } catch (const LexError& e) {
    EXPECT_EQ(e.pos().line, 2);
    EXPECT_EQ(e.pos().column, 3);
  }
}

TEST(Lexer, TokenSpansReproduceSourceWithoutComments) {
  const std::string src = "::A  # c\nx : int\n---\ny = 'q' : varchar(3)\n";
  std::string rebuilt;
  std::size_t last = 0;
  for (const auto& t : tokenize(src)) {
    if (t.kind == TokenKind::Comment) {
      rebuilt += src.substr(last, t.offset - last);
      last = t.end;
      continue;
    }
    rebuilt += src.substr(last, t.end - last);
    last = t.end;
  }
  EXPECT_EQ(rebuilt, "::A  \nx : int\n---\ny = 'q' : varchar(3)\n");
}

}  // namespace
}  // namespace dj
