#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "anderson/quad.hpp"
#include "anderson/rng.hpp"
#include "anderson/ssd.hpp"

namespace {

using namespace anderson;

// Independent oracle for int_{-1}^{1} (1-u^2)^p du: expand (1-u^2)^p by the
// binomial theorem and integrate term by term with exact rational arithmetic.
// Returns the value as numerator/denominator.
double bump_integral_oracle(int p) {
  long double acc = 0.0L;
  long double binom = 1.0L;  // C(p, i)
  for (int i = 0; i <= p; ++i) {
    const long double term = binom * 2.0L / static_cast<long double>(2 * i + 1);
    acc += (i % 2 == 0) ? term : -term;
    binom = binom * static_cast<long double>(p - i) / static_cast<long double>(i + 1);
  }
  return static_cast<double>(acc);
}

TEST(MakeBumpSsd, FrozenNormalizationConstants) {
  // oracle: integral for p=4 is 256/315, for p=2 is 16/15
  EXPECT_NEAR(bump_integral_oracle(4), 256.0 / 315.0, 1e-15);
  EXPECT_NEAR(bump_integral_oracle(2), 16.0 / 15.0, 1e-15);

  Ssd s2 = make_bump_ssd(2, -1.0, 1.0);
  EXPECT_EQ(s2.bump_exponent(), 4);
  EXPECT_NEAR(s2.norm_const(), 315.0 / 256.0, 1e-14);

  Ssd s0 = make_bump_ssd(0, -1.0, 1.0);
  EXPECT_EQ(s0.bump_exponent(), 2);
  EXPECT_NEAR(s0.norm_const(), 15.0 / 16.0, 1e-14);

  // general support: norm_const = 2 / ((b-a) * I(p))
  Ssd s = make_bump_ssd(3, 2.0, 5.0);
  EXPECT_NEAR(s.norm_const(), 2.0 / (3.0 * bump_integral_oracle(5)), 1e-14);
}

TEST(MakeBumpSsd, RejectsBadSupport) {
  EXPECT_THROW(make_bump_ssd(2, 1.0, 1.0), std::invalid_argument);
  EXPECT_THROW(make_bump_ssd(2, 2.0, -1.0), std::invalid_argument);
  EXPECT_THROW(make_bump_ssd(-1, 0.0, 1.0), std::invalid_argument);
}

TEST(SsdInvariants, NormalizationAndPositivity) {
  for (int m = 0; m <= 8; ++m) {
    Ssd s = make_bump_ssd(m, -1.5, 2.0);
    const double mass =
        adaptive_simpson([&](double x) { return s.density(x); }, s.support_min(), s.support_max(),
                         1e-14);
    EXPECT_NEAR(mass, 1.0, 1e-12) << "m=" << m;
    for (double x : {-2.0, -1.5, -0.7, 0.0, 1.3, 2.0, 3.0})
      EXPECT_GE(s.density(x), 0.0);
    EXPECT_DOUBLE_EQ(s.density(-10.0), 0.0);
    EXPECT_DOUBLE_EQ(s.density(10.0), 0.0);
  }
}

TEST(SsdInvariants, BoundaryDerivativesVanish) {
  for (int m = 0; m <= 8; ++m) {
    Ssd s = make_bump_ssd(m, -1.0, 3.0);
    const double w = s.support_max() - s.support_min();
    for (int k = 0; k <= m + 1; ++k) {
      EXPECT_DOUBLE_EQ(s.density_derivative(k, s.support_min()), 0.0);
      EXPECT_DOUBLE_EQ(s.density_derivative(k, s.support_max()), 0.0);
      // rho^(k) has a zero of order p - k >= 1 at each endpoint, so shrinking
      // the offset by 1e-3 shrinks the value by at least that factor. The
      // floor covers Horner rounding noise once the true value is negligible.
      const double noise_floor = 1e-12 * std::max(1.0, s.sup_derivative_norm(k));
      for (double x0 : {s.support_min(), s.support_max()}) {
        const double dir = (x0 == s.support_min()) ? 1.0 : -1.0;
        const double coarse = std::abs(s.density_derivative(k, x0 + dir * 1e-3 * w));
        const double fine = std::abs(s.density_derivative(k, x0 + dir * 1e-6 * w));
        EXPECT_LE(fine, 2e-3 * coarse + noise_floor) << "m=" << m << " k=" << k;
      }
    }
    EXPECT_LT(s.sup_derivative_norm(m + 1), std::numeric_limits<double>::infinity());
    EXPECT_THROW(s.density_derivative(m + 2, 0.0), std::invalid_argument);
  }
}

TEST(DensityDerivative, MidpointValues) {
  Ssd s = make_bump_ssd(2, -1.0, 1.0);
  EXPECT_NEAR(s.density_derivative(0, 0.0), s.norm_const(), 1e-14);  // (1-0)^4 = 1
  EXPECT_NEAR(s.density_derivative(1, 0.0), 0.0, 1e-14);             // symmetry
  EXPECT_DOUBLE_EQ(s.density_derivative(3, -1.0), 0.0);              // boundary, C^3
}

TEST(DensityDerivative, MatchesFiniteDifferences) {
  // central differences of rho^(k-1) reproduce rho^(k) to 1e-6 relative
  for (int m : {2, 5}) {
    Ssd s = make_bump_ssd(m, -0.5, 1.5);
    const double h = 1e-5;
    for (int k = 1; k <= m + 1; ++k) {
      for (double frac : {0.15, 0.35, 0.52, 0.71, 0.88}) {
        const double x = s.support_min() + frac * (s.support_max() - s.support_min());
        const double fd =
            (s.density_derivative(k - 1, x + h) - s.density_derivative(k - 1, x - h)) / (2 * h);
        const double exact = s.density_derivative(k, x);
        const double scale = std::max(std::abs(exact), s.sup_derivative_norm(k) * 1e-3);
        EXPECT_NEAR(fd, exact, 1e-6 * scale) << "m=" << m << " k=" << k << " x=" << x;
      }
    }
  }
}

TEST(Cdf, EndpointsAndMonotone) {
  Ssd s = make_bump_ssd(3, -2.0, 1.0);
  EXPECT_DOUBLE_EQ(s.cdf(-2.0), 0.0);
  EXPECT_DOUBLE_EQ(s.cdf(1.0), 1.0);
  EXPECT_NEAR(s.cdf(-0.5), 0.5, 1e-13);  // symmetry about the midpoint
  double prev = -1.0;
  for (int i = 0; i <= 100; ++i) {
    const double x = -2.2 + 3.4 * i / 100.0;
    const double c = s.cdf(x);
    EXPECT_GE(c, prev);
    prev = c;
  }
  // CDF derivative is the density
  const double h = 1e-6;
  EXPECT_NEAR((s.cdf(0.3 + h) - s.cdf(0.3 - h)) / (2 * h), s.density(0.3), 1e-7);
}

TEST(Sample, DeterministicGivenStream) {
  Ssd s = make_bump_ssd(2, -1.0, 1.0);
  RandomStream a = RandomStream::keyed(99, 0);
  RandomStream b = RandomStream::keyed(99, 0);
  const auto da = s.sample(a, 1000);
  const auto db = s.sample(b, 1000);
  EXPECT_EQ(da, db);
}

TEST(Sample, SupportAndSymmetry) {
  Ssd s = make_bump_ssd(2, -1.0, 1.0);
  RandomStream stream(7);
  const int n = 1000000;
  double sum = 0.0, sumsq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = s.sample_one(stream);
    ASSERT_GE(x, -1.0);
    ASSERT_LE(x, 1.0);
    sum += x;
    sumsq += x * x;
  }
  const double mean = sum / n;
  const double sd = std::sqrt(sumsq / n - mean * mean);
  EXPECT_LT(std::abs(mean), 3.0 * sd / std::sqrt(static_cast<double>(n)));
}

TEST(Sample, KolmogorovSmirnovAgainstExactCdf) {
  Ssd s = make_bump_ssd(4, -1.0, 2.0);
  RandomStream stream(1234);
  const int n = 100000;
  std::vector<double> draws = s.sample(stream, n);
  std::sort(draws.begin(), draws.end());
  double ks = 0.0;
  for (int i = 0; i < n; ++i) {
    const double f = s.cdf(draws[static_cast<std::size_t>(i)]);
    ks = std::max(ks, std::abs(f - static_cast<double>(i + 1) / n));
    ks = std::max(ks, std::abs(f - static_cast<double>(i) / n));
  }
  // 1% critical value of the Kolmogorov statistic
  EXPECT_LT(ks, 1.628 / std::sqrt(static_cast<double>(n)));
}

TEST(AbsMoment, FrozenClosedForm) {
  // oracle: 2 * (315/256) * int_0^1 u (1-u^2)^4 du = 2 * (315/256) * (1/10)
  Ssd s = make_bump_ssd(2, -1.0, 1.0);
  EXPECT_NEAR(s.abs_moment(), 63.0 / 256.0, 1e-15);

  // quadrature cross-check
  const double quad = adaptive_simpson([&](double x) { return std::abs(x) * s.density(x); },
                                       -1.0, 1.0, 1e-13);
  EXPECT_NEAR(s.abs_moment(), quad, 1e-10);
}

TEST(AbsMoment, PositiveSupportEqualsMean) {
  Ssd s = make_bump_ssd(3, 2.0, 3.0);
  const double mean =
      adaptive_simpson([&](double x) { return x * s.density(x); }, 2.0, 3.0, 1e-13);
  EXPECT_NEAR(s.abs_moment(), mean, 1e-11);
  EXPECT_NEAR(s.abs_moment(), 2.5, 1e-12);  // symmetric density on [2,3]
}

TEST(AbsMoment, BoundedBySupportRadius) {
  for (int m : {0, 2, 6}) {
    for (auto [a, b] : std::vector<std::pair<double, double>>{{-1, 1}, {-3, 0.5}, {0.2, 4}}) {
      Ssd s = make_bump_ssd(m, a, b);
      EXPECT_LE(s.abs_moment(), s.max_abs_support() + 1e-12);
    }
  }
}

TEST(KrDistance, EqualScalesGiveZero) {
  Ssd s = make_bump_ssd(2, -1.0, 1.0);
  EXPECT_DOUBLE_EQ(kr_distance_scaled(s, 2.5, 2.5), 0.0);
}

TEST(KrDistance, MonotoneCouplingEquality) {
  // In one dimension the monotone coupling is optimal, so
  // d_KR = |l1 - l2| * E|omega| exactly; the CDF quadrature must reproduce it.
  Ssd s = make_bump_ssd(2, -1.0, 1.0);
  EXPECT_NEAR(kr_distance_scaled(s, 2.0, 3.0), 63.0 / 256.0, 1e-8);

  for (auto [l1, l2] : std::vector<std::pair<double, double>>{
           {1.0, 1.5}, {16.0, 24.0}, {0.3, 7.0}, {5.0, 5.001}}) {
    EXPECT_NEAR(kr_distance_scaled(s, l1, l2), std::abs(l1 - l2) * s.abs_moment(), 1e-8);
  }

  // asymmetric support, including one that straddles zero
  Ssd t = make_bump_ssd(4, -0.5, 2.0);
  for (auto [l1, l2] : std::vector<std::pair<double, double>>{{1.0, 2.0}, {3.0, 3.7}})
    EXPECT_NEAR(kr_distance_scaled(t, l1, l2), std::abs(l1 - l2) * t.abs_moment(), 1e-8);

  // positive support
  Ssd u = make_bump_ssd(1, 1.0, 2.0);
  EXPECT_NEAR(kr_distance_scaled(u, 2.0, 5.0), 3.0 * u.abs_moment(), 1e-8);
}

TEST(KrDistance, SatisfiesTheMomentBound) {
  Ssd s = make_bump_ssd(3, -2.0, 1.0);
  for (auto [l1, l2] : std::vector<std::pair<double, double>>{{1, 4}, {2, 2.2}, {0.1, 9}})
    EXPECT_LE(kr_distance_scaled(s, l1, l2), std::abs(l1 - l2) * s.abs_moment() + 1e-10);
}

TEST(KrDistance, RejectsNonpositiveScales) {
  Ssd s = make_bump_ssd(2, -1.0, 1.0);
  EXPECT_THROW(kr_distance_scaled(s, 0.0, 1.0), std::invalid_argument);
  EXPECT_THROW(kr_distance_scaled(s, 1.0, -2.0), std::invalid_argument);
}

}  // namespace
