#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace anderson {

// Student-t quantiles for the two confidence levels used in reports.
// Values beyond the table fall back to the normal quantile.
inline double student_t_975(int df) {
  static const double table[] = {12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365, 2.306,
                                 2.262,  2.228, 2.201, 2.179, 2.160, 2.145, 2.131, 2.120,
                                 2.110,  2.101, 2.093, 2.086, 2.080, 2.074, 2.069, 2.064,
                                 2.060,  2.056, 2.052, 2.048, 2.045, 2.042};
  if (df < 1) throw std::invalid_argument("student_t_975: df < 1");
  if (df <= 30) return table[df - 1];
  return 1.960;
}

inline double student_t_95(int df) {
  static const double table[] = {6.314, 2.920, 2.353, 2.132, 2.015, 1.943, 1.895, 1.860,
                                 1.833, 1.812, 1.796, 1.782, 1.771, 1.761, 1.753, 1.746,
                                 1.740, 1.734, 1.729, 1.725, 1.721, 1.717, 1.714, 1.711,
                                 1.708, 1.706, 1.703, 1.701, 1.699, 1.697};
  if (df < 1) throw std::invalid_argument("student_t_95: df < 1");
  if (df <= 30) return table[df - 1];
  return 1.645;
}

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_se = 0.0;
  double intercept_se = 0.0;
  double r2 = 0.0;
  int n = 0;

  int dof() const { return n - 2; }
  // Half-width of the two-sided 95% confidence interval on the slope.
  double slope_ci95() const { return dof() >= 1 ? student_t_975(dof()) * slope_se : 0.0; }
  // One-sided test at 95%: is the slope significantly positive?
  bool slope_significantly_positive() const {
    return dof() >= 1 && slope > student_t_95(dof()) * slope_se;
  }
};

// Weighted least squares y = intercept + slope * x with per-point standard
// deviations sigma (w = 1/sigma^2). Pass an empty sigma vector for OLS.
inline LinearFit weighted_linear_fit(const std::vector<double>& x, const std::vector<double>& y,
                                     const std::vector<double>& sigma = {}) {
  const std::size_t n = x.size();
  if (y.size() != n) throw std::invalid_argument("weighted_linear_fit: size mismatch");
  if (n < 2) throw std::invalid_argument("weighted_linear_fit: need at least 2 points");
  if (!sigma.empty() && sigma.size() != n)
    throw std::invalid_argument("weighted_linear_fit: sigma size mismatch");

  std::vector<double> w(n, 1.0);
  if (!sigma.empty()) {
    for (std::size_t i = 0; i < n; ++i) {
      if (!(sigma[i] > 0.0)) throw std::invalid_argument("weighted_linear_fit: sigma <= 0");
      w[i] = 1.0 / (sigma[i] * sigma[i]);
    }
  }

  double sw = 0, swx = 0, swy = 0, swxx = 0, swxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sw += w[i];
    swx += w[i] * x[i];
    swy += w[i] * y[i];
    swxx += w[i] * x[i] * x[i];
    swxy += w[i] * x[i] * y[i];
  }
  const double denom = sw * swxx - swx * swx;
  if (denom == 0.0) throw std::invalid_argument("weighted_linear_fit: degenerate abscissae");

  LinearFit fit;
  fit.n = static_cast<int>(n);
  fit.slope = (sw * swxy - swx * swy) / denom;
  fit.intercept = (swxx * swy - swx * swxy) / denom;

  const double ybar = swy / sw;
  double ss_res = 0, ss_tot = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - (fit.intercept + fit.slope * x[i]);
    ss_res += w[i] * r * r;
    ss_tot += w[i] * (y[i] - ybar) * (y[i] - ybar);
  }
  fit.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;

  // Residual-scaled parameter errors; reduces to the textbook OLS formula for
  // unit weights and stays honest when the supplied sigmas are optimistic.
  const double dof = static_cast<double>(n) - 2.0;
  const double scale = dof > 0.0 ? ss_res / dof : 0.0;
  fit.slope_se = std::sqrt(scale * sw / denom);
  fit.intercept_se = std::sqrt(scale * swxx / denom);
  return fit;
}

inline LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
  return weighted_linear_fit(x, y);
}

struct MeanAccumulator {
  std::size_t count = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double v) {
    ++count;
    const double d = v - mean;
    mean += d / static_cast<double>(count);
    m2 += d * (v - mean);
  }
  double variance() const { return count > 1 ? m2 / static_cast<double>(count - 1) : 0.0; }
  double std_error() const {
    return count > 1 ? std::sqrt(variance() / static_cast<double>(count)) : 0.0;
  }
};

}  // namespace anderson
