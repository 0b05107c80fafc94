#include "tamc/linear_expr.hpp"

#include <numeric>
#include <sstream>

namespace tamc {

Rational LinearExpr::eval(std::span<const std::int64_t> params) const {
  Rational acc = constant_;
  for (const auto& [idx, coeff] : coeffs_) {
    acc = acc + coeff * Rational(params[idx]);
  }
  return acc;
}

std::int64_t LinearExpr::scale() const {
  std::int64_t l = constant_.den();
  for (const auto& [idx, coeff] : coeffs_) {
    (void)idx;
    l = std::lcm(l, coeff.den());
  }
  return l;
}

LinearExpr LinearExpr::operator+(const LinearExpr& o) const {
  LinearExpr r = *this;
  r.constant_ = r.constant_ + o.constant_;
  for (const auto& [idx, coeff] : o.coeffs_) r.set_coeff(idx, r.coeff(idx) + coeff);
  return r;
}

LinearExpr LinearExpr::operator-(const LinearExpr& o) const { return *this + (-o); }

LinearExpr LinearExpr::operator*(const Rational& k) const {
  LinearExpr r;
  r.constant_ = constant_ * k;
  if (k.is_zero()) return r;
  for (const auto& [idx, coeff] : coeffs_) r.coeffs_[idx] = coeff * k;
  return r;
}

bool operator<(const LinearExpr& a, const LinearExpr& b) {
  if (a.constant_ != b.constant_) return a.constant_ < b.constant_;
  return std::lexicographical_compare(
      a.coeffs_.begin(), a.coeffs_.end(), b.coeffs_.begin(), b.coeffs_.end(),
      [](const auto& x, const auto& y) {
        if (x.first != y.first) return x.first < y.first;
        return x.second < y.second;
      });
}

std::string LinearExpr::str(std::span<const std::string> param_names) const {
  std::ostringstream out;
  bool first = true;
  auto emit = [&](const Rational& coeff, const std::string& sym) {
    Rational c = coeff;
    if (first) {
      if (c < Rational(0)) {
        out << "-";
        c = -c;
      }
    } else {
      out << (c < Rational(0) ? " - " : " + ");
      if (c < Rational(0)) c = -c;
    }
    if (sym.empty()) {
      out << c.str();
    } else if (c == Rational(1)) {
      out << sym;
    } else {
      out << c.str() << " * " << sym;
    }
    first = false;
  };
  for (const auto& [idx, coeff] : coeffs_) emit(coeff, param_names[idx]);
  if (!constant_.is_zero() || first) emit(constant_, "");
  return out.str();
}

}  // namespace tamc
