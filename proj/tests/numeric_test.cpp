#include <gtest/gtest.h>

#include <atomic>
#include <cmath>
#include <vector>

#include "anderson/fit.hpp"
#include "anderson/parallel.hpp"
#include "anderson/poly.hpp"
#include "anderson/quad.hpp"
#include "anderson/rng.hpp"

namespace {

using namespace anderson;

TEST(Poly, EvalAndCalculus) {
  // p(u) = 1 + 2u + 3u^2
  Poly p{1.0, 2.0, 3.0};
  EXPECT_DOUBLE_EQ(poly_eval(p, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(poly_eval(p, 2.0), 17.0);

  Poly dp = poly_derivative(p);  // 2 + 6u
  EXPECT_DOUBLE_EQ(poly_eval(dp, 1.5), 11.0);

  Poly ip = poly_antiderivative(p);  // u + u^2 + u^3
  EXPECT_DOUBLE_EQ(poly_eval(ip, 1.0) - poly_eval(ip, -1.0), 4.0);

  Poly q = poly_mul_linear(p, 1.0, -1.0);  // (1 - u) p
  EXPECT_DOUBLE_EQ(poly_eval(q, 0.5), 0.5 * poly_eval(p, 0.5));
}

TEST(Poly, BumpExpansion) {
  // (1 - u^2)^2 = 1 - 2u^2 + u^4
  Poly b2 = bump_poly(2);
  ASSERT_EQ(b2.size(), 5u);
  EXPECT_DOUBLE_EQ(b2[0], 1.0);
  EXPECT_DOUBLE_EQ(b2[2], -2.0);
  EXPECT_DOUBLE_EQ(b2[4], 1.0);
  EXPECT_DOUBLE_EQ(b2[1], 0.0);
  for (int p = 0; p <= 10; ++p) {
    Poly b = bump_poly(p);
    EXPECT_NEAR(poly_eval(b, 0.3), std::pow(1.0 - 0.09, p), 1e-14);
    EXPECT_DOUBLE_EQ(poly_eval(b, 1.0), p == 0 ? 1.0 : 0.0);
  }
}

TEST(Quad, AdaptiveSimpson) {
  EXPECT_NEAR(adaptive_simpson([](double x) { return x * x; }, 0.0, 1.0), 1.0 / 3.0, 1e-13);
  EXPECT_NEAR(adaptive_simpson([](double x) { return std::exp(x); }, 0.0, 2.0),
              std::exp(2.0) - 1.0, 1e-11);
  // kink at 0
  EXPECT_NEAR(adaptive_simpson([](double x) { return std::abs(x); }, -1.0, 2.0, 1e-12), 2.5,
              1e-10);
}

TEST(Quad, GaussLegendreExactForPolynomials) {
  for (int n : {2, 5, 16, 32}) {
    QuadratureRule rule = gauss_legendre(n);
    double wsum = 0.0;
    for (double w : rule.weights) wsum += w;
    EXPECT_NEAR(wsum, 2.0, 1e-13);
    // degree 2n-1 polynomial integrated exactly: use u^(2n-2)
    double acc = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i)
      acc += rule.weights[i] * std::pow(rule.nodes[i], 2 * n - 2);
    EXPECT_NEAR(acc, 2.0 / (2.0 * n - 1.0), 1e-12);
  }
}

TEST(Quad, MappedRule) {
  QuadratureRule rule = gauss_legendre_on(8, 1.0, 3.0);
  double acc = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i)
    acc += rule.weights[i] * rule.nodes[i] * rule.nodes[i];
  EXPECT_NEAR(acc, (27.0 - 1.0) / 3.0, 1e-12);
}

TEST(Fit, RecoversExactLine) {
  std::vector<double> x{0, 1, 2, 3, 4};
  std::vector<double> y;
  for (double xi : x) y.push_back(3.0 - 2.0 * xi);
  LinearFit fit = linear_fit(x, y);
  EXPECT_NEAR(fit.slope, -2.0, 1e-12);
  EXPECT_NEAR(fit.intercept, 3.0, 1e-12);
  EXPECT_NEAR(fit.r2, 1.0, 1e-12);
  EXPECT_NEAR(fit.slope_se, 0.0, 1e-10);
}

TEST(Fit, WeightsDownweightNoisyPoints) {
  // Third point is off the line but carries a huge sigma.
  std::vector<double> x{0, 1, 2, 3};
  std::vector<double> y{1, 2, 100, 4};
  std::vector<double> sigma{0.01, 0.01, 1000.0, 0.01};
  LinearFit fit = weighted_linear_fit(x, y, sigma);
  EXPECT_NEAR(fit.slope, 1.0, 1e-3);
  EXPECT_NEAR(fit.intercept, 1.0, 1e-2);
}

TEST(Fit, OneSidedTrendTest) {
  std::vector<double> x{1, 2, 3, 4, 5, 6};
  std::vector<double> up{1, 2, 3, 4, 5, 6};
  std::vector<double> flat{1.0, 0.9, 1.1, 1.0, 0.95, 1.05};
  EXPECT_TRUE(linear_fit(x, up).slope_significantly_positive());
  EXPECT_FALSE(linear_fit(x, flat).slope_significantly_positive());
}

TEST(Fit, MeanAccumulator) {
  MeanAccumulator acc;
  for (double v : {1.0, 2.0, 3.0, 4.0}) acc.add(v);
  EXPECT_DOUBLE_EQ(acc.mean, 2.5);
  EXPECT_NEAR(acc.variance(), 5.0 / 3.0, 1e-14);
  EXPECT_NEAR(acc.std_error(), std::sqrt(5.0 / 12.0), 1e-14);
}

TEST(Rng, KeyedStreamsAreDeterministic) {
  RandomStream a = RandomStream::keyed(42, 7);
  RandomStream b = RandomStream::keyed(42, 7);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.next_u64(), b.next_u64());

  RandomStream c = RandomStream::keyed(42, 8);
  bool differs = false;
  RandomStream a2 = RandomStream::keyed(42, 7);
  for (int i = 0; i < 10; ++i) differs |= (a2.next_u64() != c.next_u64());
  EXPECT_TRUE(differs);
}

TEST(Rng, UniformDoubles) {
  RandomStream s(123);
  double sum = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double v = s.next_double();
    ASSERT_GE(v, 0.0);
    ASSERT_LT(v, 1.0);
    sum += v;
  }
  // standard error of the mean ~ 1/sqrt(12 n)
  EXPECT_NEAR(sum / n, 0.5, 4.0 / std::sqrt(12.0 * n));
}

TEST(Parallel, MatchesSerialAndPropagatesErrors) {
  const int n = 1000;
  std::vector<double> out(n, 0.0);
  parallel_for(n, 4, [&](int i) { out[static_cast<std::size_t>(i)] = std::sqrt(i); });
  for (int i = 0; i < n; ++i) EXPECT_DOUBLE_EQ(out[static_cast<std::size_t>(i)], std::sqrt(i));

  EXPECT_THROW(
      parallel_for(100, 4,
                   [&](int i) {
                     if (i == 57) throw std::runtime_error("task failure");
                   }),
      std::runtime_error);
}

}  // namespace
