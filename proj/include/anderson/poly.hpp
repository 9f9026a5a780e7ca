#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace anderson {

// Dense polynomial, coefficients in ascending order: p[i] * u^i.
using Poly = std::vector<double>;

inline double poly_eval(const Poly& p, double u) {
  double acc = 0.0;
  for (std::size_t i = p.size(); i-- > 0;) acc = acc * u + p[i];
  return acc;
}

inline Poly poly_derivative(const Poly& p) {
  if (p.size() <= 1) return Poly{0.0};
  Poly d(p.size() - 1);
  for (std::size_t i = 1; i < p.size(); ++i) d[i - 1] = p[i] * static_cast<double>(i);
  return d;
}

// Antiderivative with zero constant term.
inline Poly poly_antiderivative(const Poly& p) {
  Poly a(p.size() + 1, 0.0);
  for (std::size_t i = 0; i < p.size(); ++i) a[i + 1] = p[i] / static_cast<double>(i + 1);
  return a;
}

// (c0 + c1 u) * p
inline Poly poly_mul_linear(const Poly& p, double c0, double c1) {
  Poly q(p.size() + 1, 0.0);
  for (std::size_t i = 0; i < p.size(); ++i) {
    q[i] += c0 * p[i];
    q[i + 1] += c1 * p[i];
  }
  return q;
}

// Coefficients of (1 - u^2)^p via binomial expansion. Binomial coefficients up
// to p ~ 25 are exactly representable in double.
inline Poly bump_poly(int p) {
  if (p < 0) throw std::invalid_argument("bump_poly: negative exponent");
  Poly c(static_cast<std::size_t>(2 * p) + 1, 0.0);
  double binom = 1.0;  // C(p, i)
  for (int i = 0; i <= p; ++i) {
    c[static_cast<std::size_t>(2 * i)] = (i % 2 == 0 ? binom : -binom);
    binom = binom * static_cast<double>(p - i) / static_cast<double>(i + 1);
  }
  return c;
}

}  // namespace anderson
