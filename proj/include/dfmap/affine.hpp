// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace dfmap {

using Env = std::map<std::string, std::int64_t, std::less<>>;

class AffineExpr;

enum class QuasiOp { FloorDiv, Mod };

// coef * (inner floordiv divisor) or coef * (inner mod divisor).
struct QuasiTerm {
  std::int64_t coef = 1;
  QuasiOp op = QuasiOp::FloorDiv;
  std::shared_ptr<const AffineExpr> inner;
  std::int64_t divisor = 1;

  bool operator==(const QuasiTerm& other) const;
};

// Quasi-affine integer expression in canonical form: a constant, a linear
// combination of named variables, and a sorted list of floordiv/mod terms by
// positive constants. Equal expressions have equal representations.
class AffineExpr {
 public:
  AffineExpr() = default;
  AffineExpr(std::int64_t c) : constant_(c) {}  // NOLINT: implicit from literal is intended

  static AffineExpr var(std::string name, std::int64_t coef = 1);
  // Parses "x*8 + (y + 1) mod 8" style text. Throws ParseError.
  static AffineExpr parse(std::string_view text);

  std::int64_t constant() const { return constant_; }
  const std::map<std::string, std::int64_t>& coeffs() const { return coeffs_; }
  const std::vector<QuasiTerm>& quasi() const { return quasi_; }

  std::int64_t coeff(const std::string& name) const;
  bool is_constant() const { return coeffs_.empty() && quasi_.empty(); }
  bool is_linear() const { return quasi_.empty(); }

  // Every variable the value can depend on (nonzero linear coefficient or
  // mentioned inside a quasi term).
  std::set<std::string> vars() const;
  bool depends_on(const std::string& name) const;

  std::int64_t eval(const Env& env) const;
  AffineExpr substitute(const std::string& name, const AffineExpr& replacement) const;
  AffineExpr floordiv(std::int64_t divisor) const;
  AffineExpr mod(std::int64_t divisor) const;

  // Inclusive [lo, hi] bounds given inclusive bounds for each variable.
  std::pair<std::int64_t, std::int64_t> bounds(
      const std::map<std::string, std::pair<std::int64_t, std::int64_t>>& var_bounds) const;

  std::string str() const;

  friend AffineExpr operator+(const AffineExpr& a, const AffineExpr& b);
  friend AffineExpr operator-(const AffineExpr& a, const AffineExpr& b);
  friend AffineExpr operator*(const AffineExpr& a, std::int64_t k);
  friend AffineExpr operator*(std::int64_t k, const AffineExpr& a) { return a * k; }
  friend AffineExpr operator-(const AffineExpr& a) { return a * -1; }
  friend bool operator==(const AffineExpr& a, const AffineExpr& b);
  friend bool operator<(const AffineExpr& a, const AffineExpr& b) { return a.str() < b.str(); }

 private:
  void canonicalize();

  std::int64_t constant_ = 0;
  std::map<std::string, std::int64_t> coeffs_;
  std::vector<QuasiTerm> quasi_;
};

std::int64_t floor_div(std::int64_t a, std::int64_t b);
std::int64_t floor_mod(std::int64_t a, std::int64_t b);

}  // namespace dfmap
