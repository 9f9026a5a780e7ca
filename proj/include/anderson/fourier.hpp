#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "anderson/fit.hpp"
#include "anderson/eig.hpp"
#include "anderson/parallel.hpp"
#include "anderson/quad.hpp"
#include "anderson/spectral.hpp"

namespace anderson {

inline constexpr double kPi = 3.14159265358979323846;

// Characteristic function of the ensemble-averaged local spectral measure,
// nu_hat(t) = E[ sum_j w_j e^{-i t E_j} ], on a symmetric uniform t grid.
struct CharFunctionSamples {
  Eigen::VectorXd t;        // ascending, symmetric about 0, uniform spacing
  Eigen::VectorXcd values;  // nu_hat(t)
  double lambda = 0.0;
  std::uint64_t seed = 0;
  int n_realizations = 0;

  double dt() const { return t.size() > 1 ? t[1] - t[0] : 0.0; }
  double t_max() const { return t.size() ? t[t.size() - 1] : 0.0; }
};

// t_p = p * dt for p in [-P, P], with P = round(T / dt).
inline Eigen::VectorXd symmetric_t_grid(double t_max, double dt) {
  if (!(t_max > 0.0) || !(dt > 0.0))
    throw std::invalid_argument("symmetric_t_grid: need positive T and dt");
  const int half = std::max(1, static_cast<int>(std::lround(t_max / dt)));
  Eigen::VectorXd t(2 * half + 1);
  for (int p = -half; p <= half; ++p) t[p + half] = p * dt;
  return t;
}

namespace detail {

inline void check_symmetric_uniform(const Eigen::VectorXd& t) {
  const int n = static_cast<int>(t.size());
  if (n < 3 || n % 2 == 0)
    throw std::invalid_argument("char_function: t grid must be symmetric with odd point count");
  const double dt = t[1] - t[0];
  for (int i = 0; i + 1 < n; ++i)
    if (std::abs((t[i + 1] - t[i]) - dt) > 1e-12 * std::max(1.0, std::abs(dt)))
      throw std::invalid_argument("char_function: t grid must be uniform");
  if (std::abs(t[n / 2]) > 1e-12) throw std::invalid_argument("char_function: t grid must contain 0");
}

}  // namespace detail

inline CharFunctionSamples char_function(const EnsembleData& data, const Eigen::VectorXd& t_grid,
                                         int threads = 0) {
  detail::check_symmetric_uniform(t_grid);
  if (data.samples.empty()) throw std::invalid_argument("char_function: empty ensemble");
  const int half = static_cast<int>(t_grid.size()) / 2;
  const double dt = t_grid[1] - t_grid[0];
  const int n_real = static_cast<int>(data.samples.size());

  // one phase recurrence per eigenvalue over the nonnegative half-grid;
  // negative t follows by conjugation (the measure is real)
  std::vector<Eigen::VectorXcd> slots(static_cast<std::size_t>(n_real));
  parallel_for(n_real, threads, [&](int r) {
    const auto& s = data.samples[static_cast<std::size_t>(r)];
    Eigen::VectorXcd acc = Eigen::VectorXcd::Zero(half + 1);
    for (int j = 0; j < s.eigenvalues.size(); ++j) {
      const std::complex<double> step = std::polar(1.0, -dt * s.eigenvalues[j]);
      std::complex<double> cur = s.weights[j];
      for (int p = 0; p <= half; ++p) {
        acc[p] += cur;
        cur *= step;
      }
    }
    slots[static_cast<std::size_t>(r)] = std::move(acc);
  });

  Eigen::VectorXcd mean = Eigen::VectorXcd::Zero(half + 1);
  for (const auto& s : slots) mean += s;
  mean /= static_cast<double>(n_real);

  CharFunctionSamples out;
  out.t = t_grid;
  out.values.resize(t_grid.size());
  for (int p = 0; p <= half; ++p) {
    out.values[half + p] = mean[p];
    out.values[half - p] = std::conj(mean[p]);
  }
  out.lambda = data.spec.lambda;
  out.seed = data.spec.master_seed;
  out.n_realizations = n_real;
  return out;
}

// Monte-Carlo floor of |nu_hat|: at large t the per-realization phases are
// incoherent, leaving fluctuations of size sqrt(E[sum_j w_j^2] / n).
inline double char_noise_floor(const EnsembleData& data) {
  if (data.samples.empty()) throw std::invalid_argument("char_noise_floor: empty ensemble");
  double mean_sq = 0.0;
  for (const auto& s : data.samples) mean_sq += s.weights.squaredNorm();
  mean_sq /= static_cast<double>(data.samples.size());
  return std::sqrt(mean_sq / static_cast<double>(data.samples.size()));
}

// ---------------------------------------------------------------------------
// Duhamel difference bound
// ---------------------------------------------------------------------------

struct DuhamelBoundReport {
  double gap = 0.0;        // |lambda1 - lambda2|
  double bound_m = 0.0;    // M = max{|a|, |b|}
  double max_ratio = 0.0;  // sup_t |diff| / (M gap |t|)
  double worst_t = 0.0;
  bool pass = false;
};

// |nu1_hat(t) - nu2_hat(t)| <= M |l1 - l2| |t| holds realization-wise for
// coupled ensembles (same omega, different lambda), so the check is a hard
// assertion, not a statistical one.
inline DuhamelBoundReport duhamel_bound_check(const CharFunctionSamples& chf1,
                                              const CharFunctionSamples& chf2, double bound_m) {
  if (chf1.seed != chf2.seed || chf1.n_realizations != chf2.n_realizations)
    throw std::invalid_argument("duhamel_bound_check: ensembles are not coupled");
  if (chf1.t.size() != chf2.t.size() || (chf1.t - chf2.t).cwiseAbs().maxCoeff() > 1e-12)
    throw std::invalid_argument("duhamel_bound_check: t grids differ");
  if (!(bound_m > 0.0)) throw std::invalid_argument("duhamel_bound_check: M must be > 0");

  DuhamelBoundReport report;
  report.gap = std::abs(chf1.lambda - chf2.lambda);
  report.bound_m = bound_m;
  if (report.gap == 0.0) {
    const double sup = (chf1.values - chf2.values).cwiseAbs().maxCoeff();
    report.max_ratio = sup == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    report.pass = sup == 0.0;
    return report;
  }
  for (int i = 0; i < chf1.t.size(); ++i) {
    if (chf1.t[i] == 0.0) continue;
    const double ratio = std::abs(chf1.values[i] - chf2.values[i]) /
                         (bound_m * report.gap * std::abs(chf1.t[i]));
    if (ratio > report.max_ratio) {
      report.max_ratio = ratio;
      report.worst_t = chf1.t[i];
    }
  }
  report.pass = report.max_ratio <= 1.0 + 1e-10;
  return report;
}

// ---------------------------------------------------------------------------
// Fourier decay profile
// ---------------------------------------------------------------------------

struct DecayProfile {
  double window_lo = 0.0, window_hi = 0.0;  // requested [T/4, T]
  double noise_floor = 0.0;
  double valid_t_max = 0.0;   // last usable t (above 3x the noise floor)
  int points_used = 0;
  bool window_valid = false;  // enough points survive the noise cut
  double sup_scaled = 0.0;    // sup |t|^{m-1} |nu_hat(t)| over used points
  LinearFit loglog;           // log|nu_hat| vs log t over used points
  bool decay_steep_enough = false;  // slope <= -(m-1) + 0.5
};

// Decay check |nu_hat(t)| ~ C/|t|^{m-1} over the outer window [T/4, T].
// Finite ensembles of atomic measures stop decaying at the Monte-Carlo floor,
// so points below 3x the floor are excluded and the report carries the
// window actually used.
inline DecayProfile decay_profile(const CharFunctionSamples& chf, int m,
                                  double noise_floor = 0.0) {
  if (m < 1) throw std::invalid_argument("decay_profile: m must be >= 1");
  const double t_max = chf.t_max();
  if (!(t_max > 0.0)) throw std::invalid_argument("decay_profile: empty window");

  DecayProfile profile;
  profile.window_lo = 0.25 * t_max;
  profile.window_hi = t_max;
  profile.noise_floor = noise_floor;

  std::vector<double> log_t, log_v;
  for (int i = 0; i < chf.t.size(); ++i) {
    const double t = chf.t[i];
    if (t < profile.window_lo || t > profile.window_hi) continue;
    const double v = std::abs(chf.values[i]);
    if (v < 3.0 * noise_floor || v <= 0.0) continue;
    profile.valid_t_max = std::max(profile.valid_t_max, t);
    profile.sup_scaled = std::max(profile.sup_scaled, std::pow(t, m - 1) * v);
    log_t.push_back(std::log(t));
    log_v.push_back(std::log(v));
  }
  profile.points_used = static_cast<int>(log_t.size());

  int window_points = 0;
  for (int i = 0; i < chf.t.size(); ++i)
    if (chf.t[i] >= profile.window_lo && chf.t[i] <= profile.window_hi) ++window_points;
  if (window_points == 0) throw std::invalid_argument("decay_profile: window empty");

  profile.window_valid = profile.points_used >= std::max(4, window_points / 4);
  if (profile.points_used >= 2) {
    profile.loglog = linear_fit(log_t, log_v);
    profile.decay_steep_enough = profile.loglog.slope <= -(m - 1) + 0.5;
  }
  return profile;
}

// ---------------------------------------------------------------------------
// Derivative reconstruction by the split inverse transform
// ---------------------------------------------------------------------------

struct ReconstructionResult {
  Eigen::VectorXd values;  // g1^(k) - g2^(k) on the x grid
  double sup_abs = 0.0;
  double split_point = 0.0;  // A
  double tail_bound = 0.0;   // bound on the discarded |t| > A contribution
  int n_t_points = 0;
};

// (1/2pi) int_{|t|<=A} (it)^k e^{itx} (nu1_hat - nu2_hat)(t) dt by trapezoid
// on the uniform grid; the |t| > A remainder is bounded by the measured decay
// constants and reported separately. Requires k < m - 2 so the tail exponent
// m - k - 2 is positive.
inline ReconstructionResult reconstruct_derivative(const CharFunctionSamples& chf1,
                                                   const CharFunctionSamples& chf2, int k,
                                                   const Eigen::VectorXd& x_grid, double split_a,
                                                   int m) {
  if (chf1.seed != chf2.seed || chf1.n_realizations != chf2.n_realizations)
    throw std::invalid_argument("reconstruct_derivative: ensembles are not coupled");
  if (chf1.t.size() != chf2.t.size() || (chf1.t - chf2.t).cwiseAbs().maxCoeff() > 1e-12)
    throw std::invalid_argument("reconstruct_derivative: t grids differ");
  if (k < 0 || k >= m - 2)
    throw std::invalid_argument("reconstruct_derivative: requires 0 <= k < m-2");
  if (!(split_a > 0.0) || split_a > chf1.t_max() + 1e-12)
    throw std::invalid_argument("reconstruct_derivative: split point outside the sampled window");

  const double dt = chf1.dt();
  std::vector<int> idx;
  for (int i = 0; i < chf1.t.size(); ++i)
    if (std::abs(chf1.t[i]) <= split_a + 1e-12) idx.push_back(i);

  ReconstructionResult result;
  result.split_point = split_a;
  result.n_t_points = static_cast<int>(idx.size());
  result.values.resize(x_grid.size());

  for (int xi = 0; xi < x_grid.size(); ++xi) {
    const double x = x_grid[xi];
    std::complex<double> acc = 0.0;
    for (std::size_t q = 0; q < idx.size(); ++q) {
      const int i = idx[q];
      const double t = chf1.t[i];
      const double w = (q == 0 || q + 1 == idx.size()) ? 0.5 * dt : dt;
      std::complex<double> it_k = 1.0;
      const std::complex<double> it(0.0, t);
      for (int p = 0; p < k; ++p) it_k *= it;
      acc += w * it_k * std::polar(1.0, t * x) * (chf1.values[i] - chf2.values[i]);
    }
    result.values[xi] = acc.real() / (2.0 * kPi);
  }
  result.sup_abs = result.values.cwiseAbs().maxCoeff();

  // tail: |nu_hat| <= C / t^{m-1} with C measured over the outer window
  const double probe_lo = std::min(split_a, 0.75 * chf1.t_max());
  double c_decay = 0.0;
  for (int i = 0; i < chf1.t.size(); ++i) {
    const double t = std::abs(chf1.t[i]);
    if (t < probe_lo || t == 0.0) continue;
    c_decay = std::max(c_decay, std::pow(t, m - 1) * std::abs(chf1.values[i]));
    c_decay = std::max(c_decay, std::pow(t, m - 1) * std::abs(chf2.values[i]));
  }
  result.tail_bound =
      2.0 * c_decay / (kPi * static_cast<double>(m - k - 2) * std::pow(split_a, m - k - 2));
  return result;
}

// ---------------------------------------------------------------------------
// Duhamel identity at matrix level
// ---------------------------------------------------------------------------

// e^{-i tau A} for symmetric A via eigendecomposition.
inline Eigen::MatrixXcd unitary_propagator(const EigenDecomposition& eig, double tau) {
  const int n = static_cast<int>(eig.values.size());
  Eigen::VectorXcd phases(n);
  for (int i = 0; i < n; ++i) phases[i] = std::polar(1.0, -tau * eig.values[i]);
  return eig.vectors.cast<std::complex<double>>() * phases.asDiagonal() *
         eig.vectors.transpose().cast<std::complex<double>>();
}

inline double operator_norm(const Eigen::MatrixXcd& m) {
  return m.jacobiSvd().singularValues()[0];
}

// Residual of e^{-itA} - e^{-itB} = int_0^t e^{-i(t-s)A} i(B-A) e^{-isB} ds,
// with the integral evaluated by Gauss-Legendre quadrature. The integrand is
// entire, so the residual drops geometrically in n_quad down to rounding.
inline double duhamel_identity_check(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double t,
                                     int n_quad) {
  if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows())
    throw std::invalid_argument("duhamel_identity_check: dimension mismatch");
  if (n_quad < 2) throw std::invalid_argument("duhamel_identity_check: n_quad must be >= 2");
  const double scale_a = std::max(1.0, a.cwiseAbs().maxCoeff());
  const double scale_b = std::max(1.0, b.cwiseAbs().maxCoeff());
  if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale_a ||
      (b - b.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale_b)
    throw std::invalid_argument("duhamel_identity_check: inputs must be symmetric");

  const EigenDecomposition ea = symmetric_eigen(a);
  const EigenDecomposition eb = symmetric_eigen(b);

  const Eigen::MatrixXcd lhs = unitary_propagator(ea, t) - unitary_propagator(eb, t);

  const Eigen::MatrixXcd coupling =
      std::complex<double>(0.0, 1.0) * (b - a).cast<std::complex<double>>();
  QuadratureRule rule = gauss_legendre_on(n_quad, 0.0, t);
  Eigen::MatrixXcd rhs = Eigen::MatrixXcd::Zero(a.rows(), a.cols());
  for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
    const double s = rule.nodes[q];
    rhs += rule.weights[q] * (unitary_propagator(ea, t - s) * coupling * unitary_propagator(eb, s));
  }
  return operator_norm(lhs - rhs);
}

}  // namespace anderson
