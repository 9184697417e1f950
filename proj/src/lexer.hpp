// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "dfmap/affine.hpp"
#include "dfmap/error.hpp"
#include "dfmap/rational.hpp"

namespace dfmap::detail {

enum class Tok { Ident, Int, Number, Punct, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  int line = 1;
  int column = 1;
};

// Tokenizer shared by the .hw and .tk formats. '#' starts a comment that
// runs to end of line; newlines are plain whitespace.
class Lexer {
 public:
  explicit Lexer(std::string_view text);

  const Token& peek(std::size_t ahead = 0) const;
  Token next();
  bool at_end() const { return peek().kind == Tok::End; }

  bool accept(std::string_view punct_or_keyword);
  Token expect(std::string_view punct_or_keyword);
  std::string expect_ident();
  std::int64_t expect_int();
  // Accepts decimals and a/b fractions as well as integers.
  Rational expect_rational();

  [[noreturn]] void fail(const std::string& msg) const;
  [[noreturn]] void fail_at(const Token& tok, const std::string& msg) const;

 private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

// expr := ['-'] term (('+'|'-') term)*
// term := unary (('*' unary) | ('floordiv'|'/'|'mod'|'%') INT)*
// Variables outside `allowed` are rejected when `allowed` is non-null.
AffineExpr parse_affine(Lexer& lex, const std::vector<std::string>* allowed);

Rational decimal_to_rational(const std::string& text);

}  // namespace dfmap::detail
