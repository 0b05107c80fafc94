#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "tamc/rational.hpp"

namespace tamc {

/// An affine expression a0 + sum(ai * pi) over parameter variables.
/// Parameters are referenced by index into the owning automaton's parameter
/// list. Coefficients are exact rationals; clearing denominators yields an
/// all-integer form (scale * expr has integer coefficients).
class LinearExpr {
 public:
  LinearExpr() = default;
  explicit LinearExpr(Rational constant) : constant_(constant) {}

  static LinearExpr param(int index, Rational coeff = Rational(1)) {
    LinearExpr e;
    e.set_coeff(index, coeff);
    return e;
  }

  const Rational& constant() const { return constant_; }
  void set_constant(Rational c) { constant_ = c; }

  /// Sparse coefficient map, keyed by parameter index, zero entries removed.
  const std::map<int, Rational>& coeffs() const { return coeffs_; }

  Rational coeff(int index) const {
    auto it = coeffs_.find(index);
    return it == coeffs_.end() ? Rational(0) : it->second;
  }

  void set_coeff(int index, Rational c) {
    if (c.is_zero())
      coeffs_.erase(index);
    else
      coeffs_[index] = c;
  }

  bool is_constant() const { return coeffs_.empty(); }

  Rational eval(std::span<const std::int64_t> params) const;

  /// Least common multiple of all denominators: scale() * (*this) has
  /// integer coefficients throughout.
  std::int64_t scale() const;

  LinearExpr operator+(const LinearExpr& o) const;
  LinearExpr operator-(const LinearExpr& o) const;
  LinearExpr operator*(const Rational& r) const;
  LinearExpr operator-() const { return *this * Rational(-1); }

  friend bool operator==(const LinearExpr& a, const LinearExpr& b) {
    return a.constant_ == b.constant_ && a.coeffs_ == b.coeffs_;
  }
  friend bool operator!=(const LinearExpr& a, const LinearExpr& b) { return !(a == b); }
  friend bool operator<(const LinearExpr& a, const LinearExpr& b);

  /// Renders with the given parameter names, e.g. "n - t + 1".
  std::string str(std::span<const std::string> param_names) const;

 private:
  Rational constant_;
  std::map<int, Rational> coeffs_;
};

}  // namespace tamc
