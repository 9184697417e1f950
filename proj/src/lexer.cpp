// SPDX-License-Identifier: Apache-2.0
#include "lexer.hpp"

#include <algorithm>
#include <cctype>

namespace dfmap::detail {

Lexer::Lexer(std::string_view text) {
  int line = 1, col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k, ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  while (i < text.size()) {
    const char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '#') {
      while (i < text.size() && text[i] != '\n') advance(1);
      continue;
    }
    Token tok;
    tok.line = line;
    tok.column = col;
    std::size_t j = i;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (j < text.size() && (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_')) ++j;
      tok.kind = Tok::Ident;
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
      tok.kind = Tok::Int;
      if (j + 1 < text.size() && text[j] == '.' && std::isdigit(static_cast<unsigned char>(text[j + 1]))) {
        ++j;
        while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
        tok.kind = Tok::Number;
      }
    } else if (c == '-' && i + 1 < text.size() && text[i + 1] == '>') {
      j = i + 2;
      tok.kind = Tok::Punct;
    } else if (std::string_view("(){}[],;=+-*/%").find(c) != std::string_view::npos) {
      j = i + 1;
      tok.kind = Tok::Punct;
    } else {
      throw ParseError(std::string("unexpected character '") + c + "'", line, col);
    }
    tok.text = std::string(text.substr(i, j - i));
    advance(j - i);
    toks_.push_back(std::move(tok));
  }
  Token end;
  end.kind = Tok::End;
  end.line = line;
  end.column = col;
  toks_.push_back(end);
}

const Token& Lexer::peek(std::size_t ahead) const { return toks_[std::min(pos_ + ahead, toks_.size() - 1)]; }

Token Lexer::next() {
  Token t = peek();
  if (pos_ < toks_.size() - 1) ++pos_;
  return t;
}

bool Lexer::accept(std::string_view word) {
  const Token& t = peek();
  if ((t.kind == Tok::Punct || t.kind == Tok::Ident) && t.text == word) {
    next();
    return true;
  }
  return false;
}

Token Lexer::expect(std::string_view word) {
  if (!accept(word)) fail("expected '" + std::string(word) + "'");
  return toks_[pos_ - 1];
}

std::string Lexer::expect_ident() {
  if (peek().kind != Tok::Ident) fail("expected identifier");
  return next().text;
}

std::int64_t Lexer::expect_int() {
  if (peek().kind != Tok::Int) fail("expected integer");
  return std::stoll(next().text);
}

Rational decimal_to_rational(const std::string& text) {
  const auto dot = text.find('.');
  if (dot == std::string::npos) return Rational(std::stoll(text));
  std::int64_t den = 1;
  for (std::size_t k = dot + 1; k < text.size(); ++k) den *= 10;
  return Rational(std::stoll(text.substr(0, dot) + text.substr(dot + 1)), den);
}

Rational Lexer::expect_rational() {
  const Token& t = peek();
  if (t.kind != Tok::Int && t.kind != Tok::Number) fail("expected number");
  Rational r = decimal_to_rational(next().text);
  if (accept("/")) {
    const Token& d = peek();
    if (d.kind != Tok::Int && d.kind != Tok::Number) fail("expected denominator");
    Rational den = decimal_to_rational(next().text);
    if (!den.positive()) fail("zero denominator");
    r = r / den;
  }
  return r;
}

void Lexer::fail(const std::string& msg) const { fail_at(peek(), msg); }

void Lexer::fail_at(const Token& tok, const std::string& msg) const {
  const std::string near = tok.kind == Tok::End ? "end of input" : "'" + tok.text + "'";
  throw ParseError(msg + " near " + near, tok.line, tok.column);
}

namespace {

AffineExpr parse_expr(Lexer& lex, const std::vector<std::string>* allowed);

AffineExpr parse_unary(Lexer& lex, const std::vector<std::string>* allowed) {
  if (lex.accept("-")) return -parse_unary(lex, allowed);
  if (lex.accept("(")) {
    AffineExpr e = parse_expr(lex, allowed);
    lex.expect(")");
    return e;
  }
  const Token& t = lex.peek();
  if (t.kind == Tok::Int) return AffineExpr(lex.expect_int());
  if (t.kind == Tok::Ident && t.text != "mod" && t.text != "floordiv") {
    if (allowed && std::find(allowed->begin(), allowed->end(), t.text) == allowed->end()) {
      lex.fail("undeclared variable '" + t.text + "'");
    }
    return AffineExpr::var(lex.next().text);
  }
  lex.fail("expected affine term");
}

AffineExpr parse_term(Lexer& lex, const std::vector<std::string>* allowed) {
  AffineExpr e = parse_unary(lex, allowed);
  for (;;) {
    const Token op = lex.peek();
    if (op.text == "*" && op.kind == Tok::Punct) {
      lex.next();
      AffineExpr rhs = parse_unary(lex, allowed);
      if (rhs.is_constant()) {
        e = e * rhs.constant();
      } else if (e.is_constant()) {
        e = rhs * e.constant();
      } else {
        lex.fail_at(op, "non-affine map expression (product of variables)");
      }
    } else if (op.text == "floordiv" || op.text == "/" || op.text == "mod" || op.text == "%") {
      lex.next();
      if (lex.peek().kind != Tok::Int) lex.fail_at(op, "non-affine map expression (divisor must be a constant)");
      const std::int64_t d = lex.expect_int();
      if (d <= 0) lex.fail_at(op, "divisor must be positive");
      e = (op.text == "floordiv" || op.text == "/") ? e.floordiv(d) : e.mod(d);
    } else {
      return e;
    }
  }
}

AffineExpr parse_expr(Lexer& lex, const std::vector<std::string>* allowed) {
  AffineExpr e = parse_term(lex, allowed);
  for (;;) {
    if (lex.accept("+")) {
      e = e + parse_term(lex, allowed);
    } else if (lex.peek().kind == Tok::Punct && lex.peek().text == "-") {
      lex.next();
      e = e - parse_term(lex, allowed);
    } else {
      return e;
    }
  }
}

}  // namespace

AffineExpr parse_affine(Lexer& lex, const std::vector<std::string>* allowed) { return parse_expr(lex, allowed); }

}  // namespace dfmap::detail
