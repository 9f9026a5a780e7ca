#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "anderson/poly.hpp"
#include "anderson/quad.hpp"
#include "anderson/rng.hpp"

namespace anderson {

// Single-site density rho(x) = norm_const * (1 - u^2)^p on (a, b), with
// u = (2x - a - b)/(b - a) and p = m + 2, so rho is C^{m+1} with compact
// support. Everything about it is closed-form: normalization, derivatives,
// CDF, moments. Immutable.
class Ssd {
 public:
  Ssd(int m, double a, double b) : m_(m), p_(m + 2), a_(a), b_(b) {
    if (m < 0) throw std::invalid_argument("Ssd: smoothness order m must be >= 0");
    if (!(a < b)) throw std::invalid_argument("Ssd: requires a < b");
    if (m > 20) throw std::invalid_argument("Ssd: m > 20 not supported");

    // I(p) = int_{-1}^{1} (1-u^2)^p du as an exact rational via
    // I(p) = I(p-1) * 2p/(2p+1).
    std::int64_t num = 2, den = 1;
    for (int q = 1; q <= p_; ++q) {
      num *= 2 * static_cast<std::int64_t>(q);
      den *= 2 * static_cast<std::int64_t>(q) + 1;
      const std::int64_t g = std::gcd(num, den);
      num /= g;
      den /= g;
    }
    bump_integral_ = static_cast<double>(num) / static_cast<double>(den);
    norm_const_ = 2.0 / ((b_ - a_) * bump_integral_);

    deriv_polys_.reserve(static_cast<std::size_t>(m_) + 2);
    deriv_polys_.push_back(bump_poly(p_));
    for (int k = 1; k <= m_ + 1; ++k) deriv_polys_.push_back(poly_derivative(deriv_polys_.back()));
    cdf_poly_ = poly_antiderivative(deriv_polys_.front());
  }

  int smoothness() const { return m_; }
  int bump_exponent() const { return p_; }
  double support_min() const { return a_; }
  double support_max() const { return b_; }
  double norm_const() const { return norm_const_; }
  // M = max{|a|, |b|}
  double max_abs_support() const { return std::max(std::abs(a_), std::abs(b_)); }

  double density(double x) const { return density_derivative(0, x); }

  // k-th derivative of the density; exact polynomial inside (a,b), zero
  // outside. Valid for 0 <= k <= m+1.
  double density_derivative(int k, double x) const {
    if (k < 0 || k > m_ + 1) throw std::invalid_argument("density_derivative: k out of range");
    if (x <= a_ || x >= b_) return 0.0;
    const double scale = 2.0 / (b_ - a_);
    const double u = scale * x - (a_ + b_) / (b_ - a_);
    return norm_const_ * std::pow(scale, k) * poly_eval(deriv_polys_[static_cast<std::size_t>(k)], u);
  }

  double cdf(double x) const {
    if (x <= a_) return 0.0;
    if (x >= b_) return 1.0;
    const double u = (2.0 * x - a_ - b_) / (b_ - a_);
    return (poly_eval(cdf_poly_, u) - poly_eval(cdf_poly_, -1.0)) / bump_integral_;
  }

  // Grid sup of |rho^{(k)}| over [a, b]; enough resolution for these
  // low-degree polynomials.
  double sup_derivative_norm(int k, int grid_points = 8193) const {
    double sup = 0.0;
    for (int i = 0; i < grid_points; ++i) {
      const double x = a_ + (b_ - a_) * static_cast<double>(i) / static_cast<double>(grid_points - 1);
      sup = std::max(sup, std::abs(density_derivative(k, x)));
    }
    return sup;
  }

  // Rejection sampling under the flat envelope of height norm_const. The
  // acceptance rate is bump_integral_/2 (>= ~0.2 for every supported m); the
  // iteration cap only guards against a broken stream.
  double sample_one(RandomStream& stream) const {
    for (int attempt = 0; attempt < 10000; ++attempt) {
      const double x = stream.uniform(a_, b_);
      const double y = stream.next_double() * norm_const_;
      if (y <= density(x)) return x;
    }
    throw std::runtime_error("Ssd::sample_one: rejection cap exceeded");
  }

  std::vector<double> sample(RandomStream& stream, int n) const {
    if (n < 1) throw std::invalid_argument("Ssd::sample: n must be >= 1");
    std::vector<double> draws(static_cast<std::size_t>(n));
    for (auto& d : draws) d = sample_one(stream);
    return draws;
  }

  // E|omega| by exact piecewise-polynomial integration, split at 0 when the
  // support straddles it.
  double abs_moment() const {
    const double c0 = 0.5 * (a_ + b_);
    const double c1 = 0.5 * (b_ - a_);  // x(u) = c0 + c1 u, c1 > 0
    const Poly x_times_bump = poly_mul_linear(deriv_polys_.front(), c0, c1);
    const Poly anti = poly_antiderivative(x_times_bump);
    const double u0 = -c0 / c1;  // where x(u) = 0
    double integral;             // int_{-1}^{1} |x(u)| (1-u^2)^p du
    if (u0 <= -1.0) {
      integral = poly_eval(anti, 1.0) - poly_eval(anti, -1.0);
    } else if (u0 >= 1.0) {
      integral = -(poly_eval(anti, 1.0) - poly_eval(anti, -1.0));
    } else {
      integral = (poly_eval(anti, 1.0) - poly_eval(anti, u0)) - (poly_eval(anti, u0) - poly_eval(anti, -1.0));
    }
    return norm_const_ * c1 * integral;
  }

 private:
  int m_;
  int p_;
  double a_;
  double b_;
  double bump_integral_;
  double norm_const_;
  std::vector<Poly> deriv_polys_;  // d^k/du^k (1-u^2)^p for k = 0..m+1
  Poly cdf_poly_;
};

inline Ssd make_bump_ssd(int m, double a, double b) { return Ssd(m, a, b); }

// CDF of the law of lambda * omega for omega ~ ssd, lambda > 0.
inline double scaled_cdf(const Ssd& ssd, double lambda, double x) {
  if (!(lambda > 0.0)) throw std::invalid_argument("scaled_cdf: lambda must be > 0");
  return ssd.cdf(x / lambda);
}

// Kantorovich-Rubinstein (Wasserstein-1) distance between the laws of
// lambda1*omega and lambda2*omega, via the one-dimensional CDF-difference
// integral. The sorted scale breakpoints (and 0, where the two CDFs cross for
// straddling supports) bound the adaptive panels.
inline double kr_distance_scaled(const Ssd& ssd, double lambda1, double lambda2) {
  if (!(lambda1 > 0.0) || !(lambda2 > 0.0))
    throw std::invalid_argument("kr_distance_scaled: lambdas must be > 0");
  if (lambda1 == lambda2) return 0.0;

  const double a = ssd.support_min();
  const double b = ssd.support_max();
  std::vector<double> cuts = {lambda1 * a, lambda2 * a, lambda1 * b, lambda2 * b};
  const double lo = *std::min_element(cuts.begin(), cuts.end());
  const double hi = *std::max_element(cuts.begin(), cuts.end());
  if (lo < 0.0 && 0.0 < hi) cuts.push_back(0.0);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  const auto integrand = [&](double x) {
    return std::abs(scaled_cdf(ssd, lambda1, x) - scaled_cdf(ssd, lambda2, x));
  };
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
    total += adaptive_simpson(integrand, cuts[i], cuts[i + 1], 1e-11);
  return total;
}

}  // namespace anderson
