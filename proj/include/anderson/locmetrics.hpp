#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "anderson/fit.hpp"
#include "anderson/graph.hpp"
#include "anderson/parallel.hpp"
#include "anderson/spectral.hpp"

namespace anderson {

struct FracMomentRow {
  int r = 0;
  double moment = 0.0;     // E over realizations of the shell-averaged |G|^s
  double std_error = 0.0;  // over realizations
  int shell_size = 0;
};

struct FracMomentTable {
  double s = 0.0;
  std::complex<double> z;
  double lambda = 0.0;
  std::uint64_t seed = 0;
  int n_realizations = 0;
  std::vector<FracMomentRow> rows;  // ascending r
};

// E |<delta_n, (H - z)^{-1} delta_0>|^s by one resolvent column per
// realization, averaged over every vertex at distance r from the origin.
inline FracMomentTable fractional_moments(const EnsembleSpec& spec, std::complex<double> z,
                                          double s, int r_max, int threads = 0) {
  spec.validate();
  if (!(z.imag() > 0.0)) throw std::invalid_argument("fractional_moments: need Im z > 0");
  if (!(s > 0.0 && s < 1.0)) throw std::invalid_argument("fractional_moments: s must be in (0,1)");
  const auto shells = shells_from(spec.graph, spec.graph.origin, r_max);
  for (const auto& shell : shells)
    if (shell.empty())
      throw std::invalid_argument("fractional_moments: r_max exceeds the graph radius");

  const int n_rows = r_max + 1;
  Eigen::MatrixXd slots(spec.n_realizations, n_rows);
  parallel_for(spec.n_realizations, threads, [&](int i) {
    const DisorderRealization omega = realize_disorder(spec, static_cast<std::uint64_t>(i));
    const SparseOperator op = assemble(spec.graph, spec.lambda, omega);
    const ResolventSolver solver(op, z);
    Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(op.dimension());
    rhs[spec.graph.origin] = 1.0;
    const Eigen::VectorXcd column = solver.solve(rhs);
    for (int r = 0; r <= r_max; ++r) {
      double acc = 0.0;
      for (int v : shells[static_cast<std::size_t>(r)]) acc += std::pow(std::abs(column[v]), s);
      slots(i, r) = acc / static_cast<double>(shells[static_cast<std::size_t>(r)].size());
    }
  });

  FracMomentTable table;
  table.s = s;
  table.z = z;
  table.lambda = spec.lambda;
  table.seed = spec.master_seed;
  table.n_realizations = spec.n_realizations;
  table.rows.resize(static_cast<std::size_t>(n_rows));
  for (int r = 0; r <= r_max; ++r) {
    auto& row = table.rows[static_cast<std::size_t>(r)];
    row.r = r;
    row.shell_size = static_cast<int>(shells[static_cast<std::size_t>(r)].size());
    row.moment = slots.col(r).mean();
    if (spec.n_realizations > 1) {
      const double var = (slots.col(r).array() - row.moment).square().sum() /
                         (static_cast<double>(spec.n_realizations) - 1.0);
      row.std_error = std::sqrt(var / static_cast<double>(spec.n_realizations));
    }
  }
  return table;
}

struct DecayFit {
  double prefactor = 0.0;      // C_hat = exp(intercept)
  double log_prefactor = 0.0;
  double rate = 0.0;           // xi_hat = -slope of log-moment vs distance
  double rate_se = 0.0;
  double rate_ci95 = 0.0;
  double r2 = 0.0;
  int n_rows = 0;
  // rate significantly positive at 95%; a flat profile is not localization
  bool localized = false;
};

// Weighted least squares of log(moment) against distance. Rows with
// non-positive moments are unusable; at least 4 must remain.
inline DecayFit fit_decay(const FracMomentTable& table, int r_min = 0) {
  std::vector<double> xs, ys, sigmas;
  for (const auto& row : table.rows) {
    if (row.r < r_min || !(row.moment > 0.0)) continue;
    xs.push_back(static_cast<double>(row.r));
    ys.push_back(std::log(row.moment));
    // delta-method error of the log; floor keeps exact synthetic rows usable
    sigmas.push_back(std::max(row.std_error / row.moment, 1e-12));
  }
  if (xs.size() < 4) throw std::invalid_argument("fit_decay: fewer than 4 usable rows");
  const LinearFit fit = weighted_linear_fit(xs, ys, sigmas);

  DecayFit out;
  out.log_prefactor = fit.intercept;
  out.prefactor = std::exp(fit.intercept);
  out.rate = -fit.slope;
  out.rate_se = fit.slope_se;
  out.rate_ci95 = fit.slope_ci95();
  out.r2 = fit.r2;
  out.n_rows = static_cast<int>(xs.size());
  out.localized = out.rate > out.rate_ci95;
  return out;
}

struct PredictedRate {
  double xi = 0.0;                // -s ln(degree_factor * c_fit / lambda)
  double paper_prefactor = 0.0;   // (2 sqrt 2)^s / ((1-s) lambda^s)
  double degree_factor = 0.0;     // 2d for boxes, K+1 for Bethe
};

// Large-disorder decay-rate formula with the single unknown constant
// calibrated elsewhere (see calibrate_rate_constant). Throws when the
// argument of the log reaches 1, i.e. the formula leaves the localization
// regime.
inline PredictedRate predicted_rate(double s, double lambda, const GraphSpec& graph,
                                    double c_fit) {
  if (!(s > 0.0 && s < 1.0)) throw std::invalid_argument("predicted_rate: s must be in (0,1)");
  if (!(lambda > 0.0) || !(c_fit > 0.0))
    throw std::invalid_argument("predicted_rate: lambda and c_fit must be > 0");
  PredictedRate out;
  out.degree_factor = graph.kind == GraphKind::zd_box ? 2.0 * graph.dim
                                                      : static_cast<double>(graph.connectivity + 1);
  const double arg = out.degree_factor * c_fit / lambda;
  if (arg >= 1.0)
    throw std::domain_error("predicted_rate: outside the localization regime of the formula");
  out.xi = -s * std::log(arg);
  out.paper_prefactor = std::pow(2.0 * std::sqrt(2.0), s) / ((1.0 - s) * std::pow(lambda, s));
  return out;
}

// Inverts the rate formula at a reference point: given a fitted rate at
// (s, lambda_ref), returns the c_fit that reproduces it.
inline double calibrate_rate_constant(double s, double lambda_ref, double xi_ref,
                                      const GraphSpec& graph) {
  if (!(s > 0.0 && s < 1.0) || !(lambda_ref > 0.0))
    throw std::invalid_argument("calibrate_rate_constant: bad arguments");
  const double degree_factor = graph.kind == GraphKind::zd_box
                                   ? 2.0 * graph.dim
                                   : static_cast<double>(graph.connectivity + 1);
  return lambda_ref / degree_factor * std::exp(-xi_ref / s);
}

}  // namespace anderson
