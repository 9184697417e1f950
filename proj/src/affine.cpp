// SPDX-License-Identifier: Apache-2.0
#include "dfmap/affine.hpp"

#include <algorithm>
#include <stdexcept>

#include "lexer.hpp"

namespace dfmap {

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

std::int64_t floor_mod(std::int64_t a, std::int64_t b) { return a - floor_div(a, b) * b; }

bool QuasiTerm::operator==(const QuasiTerm& other) const {
  return coef == other.coef && op == other.op && divisor == other.divisor && *inner == *other.inner;
}

namespace {

std::string quasi_key(const QuasiTerm& q) {
  return (q.op == QuasiOp::FloorDiv ? "d" : "m") + std::to_string(q.divisor) + ":" + q.inner->str();
}

}  // namespace

AffineExpr AffineExpr::var(std::string name, std::int64_t coef) {
  AffineExpr e;
  if (coef != 0) e.coeffs_.emplace(std::move(name), coef);
  return e;
}

AffineExpr AffineExpr::parse(std::string_view text) {
  detail::Lexer lex(text);
  AffineExpr e = detail::parse_affine(lex, nullptr);
  if (!lex.at_end()) lex.fail("trailing input after expression");
  return e;
}

void AffineExpr::canonicalize() {
  for (auto it = coeffs_.begin(); it != coeffs_.end();) {
    it = it->second == 0 ? coeffs_.erase(it) : std::next(it);
  }
  // Fold constant quasi terms, then merge equal ones.
  std::vector<std::pair<std::string, QuasiTerm>> keyed;
  for (auto& q : quasi_) {
    if (q.inner->is_constant()) {
      const std::int64_t v = q.inner->constant();
      constant_ += q.coef * (q.op == QuasiOp::FloorDiv ? floor_div(v, q.divisor) : floor_mod(v, q.divisor));
      continue;
    }
    std::string key = quasi_key(q);
    auto found = std::find_if(keyed.begin(), keyed.end(), [&](const auto& kv) { return kv.first == key; });
    if (found != keyed.end()) {
      found->second.coef += q.coef;
    } else {
      keyed.emplace_back(std::move(key), q);
    }
  }
  std::sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  quasi_.clear();
  for (auto& [key, q] : keyed) {
    if (q.coef != 0) quasi_.push_back(std::move(q));
  }
}

std::int64_t AffineExpr::coeff(const std::string& name) const {
  auto it = coeffs_.find(name);
  return it == coeffs_.end() ? 0 : it->second;
}

std::set<std::string> AffineExpr::vars() const {
  std::set<std::string> out;
  for (const auto& [name, c] : coeffs_) out.insert(name);
  for (const auto& q : quasi_) {
    auto inner = q.inner->vars();
    out.insert(inner.begin(), inner.end());
  }
  return out;
}

bool AffineExpr::depends_on(const std::string& name) const {
  if (coeffs_.count(name)) return true;
  return std::any_of(quasi_.begin(), quasi_.end(), [&](const QuasiTerm& q) { return q.inner->depends_on(name); });
}

std::int64_t AffineExpr::eval(const Env& env) const {
  std::int64_t v = constant_;
  for (const auto& [name, c] : coeffs_) {
    auto it = env.find(name);
    if (it == env.end()) throw std::out_of_range("unbound variable '" + name + "'");
    v += c * it->second;
  }
  for (const auto& q : quasi_) {
    const std::int64_t inner = q.inner->eval(env);
    v += q.coef * (q.op == QuasiOp::FloorDiv ? floor_div(inner, q.divisor) : floor_mod(inner, q.divisor));
  }
  return v;
}

AffineExpr AffineExpr::substitute(const std::string& name, const AffineExpr& replacement) const {
  AffineExpr out(constant_);
  for (const auto& [n, c] : coeffs_) {
    out = out + (n == name ? replacement * c : AffineExpr::var(n, c));
  }
  for (const auto& q : quasi_) {
    AffineExpr inner = q.inner->substitute(name, replacement);
    out = out + (q.op == QuasiOp::FloorDiv ? inner.floordiv(q.divisor) : inner.mod(q.divisor)) * q.coef;
  }
  return out;
}

AffineExpr AffineExpr::floordiv(std::int64_t divisor) const {
  if (divisor <= 0) throw std::invalid_argument("floordiv by non-positive constant");
  if (divisor == 1) return *this;
  if (is_constant()) return AffineExpr(floor_div(constant_, divisor));
  if (is_linear()) {
    bool exact = constant_ % divisor == 0;
    for (const auto& [n, c] : coeffs_) exact = exact && c % divisor == 0;
    if (exact) {
      AffineExpr out(constant_ / divisor);
      for (const auto& [n, c] : coeffs_) out.coeffs_[n] = c / divisor;
      return out;
    }
  }
  AffineExpr out;
  out.quasi_.push_back({1, QuasiOp::FloorDiv, std::make_shared<const AffineExpr>(*this), divisor});
  out.canonicalize();
  return out;
}

AffineExpr AffineExpr::mod(std::int64_t divisor) const {
  if (divisor <= 0) throw std::invalid_argument("mod by non-positive constant");
  if (divisor == 1) return AffineExpr(0);
  if (is_constant()) return AffineExpr(floor_mod(constant_, divisor));
  AffineExpr out;
  out.quasi_.push_back({1, QuasiOp::Mod, std::make_shared<const AffineExpr>(*this), divisor});
  out.canonicalize();
  return out;
}

std::pair<std::int64_t, std::int64_t> AffineExpr::bounds(
    const std::map<std::string, std::pair<std::int64_t, std::int64_t>>& var_bounds) const {
  std::int64_t lo = constant_, hi = constant_;
  for (const auto& [name, c] : coeffs_) {
    auto it = var_bounds.find(name);
    if (it == var_bounds.end()) throw std::out_of_range("unbound variable '" + name + "'");
    const auto [vlo, vhi] = it->second;
    lo += c >= 0 ? c * vlo : c * vhi;
    hi += c >= 0 ? c * vhi : c * vlo;
  }
  for (const auto& q : quasi_) {
    std::int64_t qlo = 0, qhi = q.divisor - 1;
    const auto [ilo, ihi] = q.inner->bounds(var_bounds);
    if (q.op == QuasiOp::FloorDiv) {
      qlo = floor_div(ilo, q.divisor);
      qhi = floor_div(ihi, q.divisor);
    } else if (floor_div(ilo, q.divisor) == floor_div(ihi, q.divisor)) {
      qlo = floor_mod(ilo, q.divisor);
      qhi = floor_mod(ihi, q.divisor);
    }
    lo += q.coef >= 0 ? q.coef * qlo : q.coef * qhi;
    hi += q.coef >= 0 ? q.coef * qhi : q.coef * qlo;
  }
  return {lo, hi};
}

std::string AffineExpr::str() const {
  std::string out;
  auto append = [&](std::int64_t coef, const std::string& atom) {
    const std::int64_t mag = coef < 0 ? -coef : coef;
    if (out.empty()) {
      if (coef < 0) out += "-";
    } else {
      out += coef < 0 ? " - " : " + ";
    }
    out += atom;
    if (mag != 1) out += "*" + std::to_string(mag);
  };
  for (const auto& [name, c] : coeffs_) append(c, name);
  for (const auto& q : quasi_) {
    std::string inner = q.inner->str();
    const bool atomic = q.inner->constant_ == 0 && q.inner->quasi_.empty() && q.inner->coeffs_.size() == 1 &&
                        q.inner->coeffs_.begin()->second == 1;
    if (!atomic) inner = "(" + inner + ")";
    append(q.coef, "(" + inner + (q.op == QuasiOp::FloorDiv ? " floordiv " : " mod ") +
                       std::to_string(q.divisor) + ")");
  }
  if (constant_ != 0 || out.empty()) {
    if (out.empty()) {
      out = std::to_string(constant_);
    } else {
      out += constant_ < 0 ? " - " + std::to_string(-constant_) : " + " + std::to_string(constant_);
    }
  }
  return out;
}

AffineExpr operator+(const AffineExpr& a, const AffineExpr& b) {
  AffineExpr out = a;
  out.constant_ += b.constant_;
  for (const auto& [n, c] : b.coeffs_) out.coeffs_[n] += c;
  out.quasi_.insert(out.quasi_.end(), b.quasi_.begin(), b.quasi_.end());
  out.canonicalize();
  return out;
}

AffineExpr operator-(const AffineExpr& a, const AffineExpr& b) { return a + b * -1; }

AffineExpr operator*(const AffineExpr& a, std::int64_t k) {
  AffineExpr out = a;
  out.constant_ *= k;
  for (auto& [n, c] : out.coeffs_) c *= k;
  for (auto& q : out.quasi_) q.coef *= k;
  out.canonicalize();
  return out;
}

bool operator==(const AffineExpr& a, const AffineExpr& b) {
  return a.constant_ == b.constant_ && a.coeffs_ == b.coeffs_ && a.quasi_ == b.quasi_;
}

}  // namespace dfmap
