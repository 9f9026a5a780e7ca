#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "anderson/eig.hpp"
#include "anderson/fit.hpp"
#include "anderson/operator.hpp"
#include "anderson/parallel.hpp"

namespace anderson {

inline constexpr int kDenseEigenBudget = 4096;
inline constexpr double kResolventResidualTol = 1e-10;

// Local spectral data of one realization at the origin: eigenvalues paired
// with weights |psi_j(origin)|^2. The weights sum to 1 (completeness of the
// eigenbasis at delta_origin).
struct SpectralSample {
  std::uint64_t index = 0;
  Eigen::VectorXd eigenvalues;  // ascending
  Eigen::VectorXd weights;
};

inline SpectralSample local_spectral_sample(const SparseOperator& op, int origin,
                                            int dense_budget = kDenseEigenBudget) {
  const int n = op.dimension();
  if (origin < 0 || origin >= n) throw std::invalid_argument("local_spectral_sample: bad origin");
  if (n > dense_budget)
    throw std::invalid_argument("local_spectral_sample: dimension exceeds the dense budget");
  EigenDecomposition eig = op.is_tridiagonal()
                               ? tridiagonal_eigen(op.diagonal(), op.off_diagonal())
                               : symmetric_eigen(op.dense());
  SpectralSample sample;
  sample.eigenvalues = std::move(eig.values);
  sample.weights = eig.vectors.row(origin).array().square();
  return sample;
}

struct EnsembleData {
  EnsembleSpec spec;
  std::vector<SpectralSample> samples;
};

// Builds all realizations of an ensemble in parallel. Each task fills its own
// slot, so the result is identical for any thread count.
inline EnsembleData sample_ensemble(const EnsembleSpec& spec, int threads = 0) {
  spec.validate();
  EnsembleData data{spec, std::vector<SpectralSample>(static_cast<std::size_t>(spec.n_realizations))};
  parallel_for(spec.n_realizations, threads, [&](int i) {
    try {
      const DisorderRealization omega = realize_disorder(spec, static_cast<std::uint64_t>(i));
      const SparseOperator op = assemble(spec.graph, spec.lambda, omega);
      data.samples[static_cast<std::size_t>(i)] = local_spectral_sample(op, spec.graph.origin);
      data.samples[static_cast<std::size_t>(i)].index = static_cast<std::uint64_t>(i);
    } catch (const std::exception& e) {
      throw std::runtime_error("realization " + std::to_string(i) + ": " + e.what());
    }
  });
  return data;
}

// Empirical IDS: average over realizations of sum_{E_j <= x} w_j. Monotone
// nondecreasing and right-continuous in x by construction.
inline double ids_empirical(const std::vector<SpectralSample>& ensemble, double x) {
  if (ensemble.empty()) throw std::invalid_argument("ids_empirical: empty ensemble");
  double acc = 0.0;
  for (const auto& s : ensemble) {
    const double* begin = s.eigenvalues.data();
    const double* end = begin + s.eigenvalues.size();
    const auto upper = std::upper_bound(begin, end, x);
    double partial = 0.0;
    for (const double* p = begin; p != upper; ++p) partial += s.weights[p - begin];
    acc += partial;
  }
  return acc / static_cast<double>(ensemble.size());
}

// Batch IDS on an ascending grid; two-pointer sweep with per-sample prefix
// sums instead of one search per point.
inline Eigen::VectorXd ids_empirical_grid(const std::vector<SpectralSample>& ensemble,
                                          const Eigen::VectorXd& xs) {
  if (ensemble.empty()) throw std::invalid_argument("ids_empirical_grid: empty ensemble");
  Eigen::VectorXd out = Eigen::VectorXd::Zero(xs.size());
  for (const auto& s : ensemble) {
    int j = 0;
    double prefix = 0.0;
    for (int i = 0; i < xs.size(); ++i) {
      while (j < s.eigenvalues.size() && s.eigenvalues[j] <= xs[i]) prefix += s.weights[j++];
      out[i] += prefix;
    }
  }
  return out / static_cast<double>(ensemble.size());
}

// ---------------------------------------------------------------------------
// Borel-transform route
// ---------------------------------------------------------------------------

// Factored (H - z) with the residual contract enforced on every solve.
// Tridiagonal operators go through the banded LAPACK factorization; general
// graphs through SparseLU.
class ResolventSolver {
 public:
  ResolventSolver(const SparseOperator& op, std::complex<double> z) {
    const int n = op.dimension();
    if (op.is_tridiagonal()) {
      lower_ = op.off_diagonal().cast<std::complex<double>>();
      upper_ = lower_;
      diag_ = op.diagonal().cast<std::complex<double>>();
      diag_.array() -= z;
      tri_ = std::make_unique<TridiagonalSolverZ>(lower_, diag_, upper_);
    } else {
      shifted_ = op.matrix.cast<std::complex<double>>();
      for (int i = 0; i < n; ++i) shifted_.coeffRef(i, i) -= z;
      shifted_.makeCompressed();
      lu_ = std::make_unique<Eigen::SparseLU<Eigen::SparseMatrix<std::complex<double>>>>();
      lu_->compute(shifted_);
      if (lu_->info() != Eigen::Success)
        throw std::runtime_error("ResolventSolver: sparse factorization failed");
    }
  }

  Eigen::VectorXcd solve(const Eigen::VectorXcd& rhs) const {
    Eigen::VectorXcd x = tri_ ? tri_->solve(rhs) : lu_->solve(rhs);
    const double rhs_norm = rhs.cwiseAbs().maxCoeff();
    const double residual = (apply(x) - rhs).cwiseAbs().maxCoeff();
    if (!(residual <= kResolventResidualTol * std::max(1.0, rhs_norm)))
      throw std::runtime_error("ResolventSolver: residual " + std::to_string(residual) +
                               " above tolerance");
    return x;
  }

 private:
  Eigen::VectorXcd apply(const Eigen::VectorXcd& x) const {
    if (!tri_) return shifted_ * x;
    const int n = static_cast<int>(diag_.size());
    Eigen::VectorXcd y(n);
    for (int i = 0; i < n; ++i) {
      std::complex<double> acc = diag_[i] * x[i];
      if (i > 0) acc += lower_[i - 1] * x[i - 1];
      if (i + 1 < n) acc += upper_[i] * x[i + 1];
      y[i] = acc;
    }
    return y;
  }

  std::unique_ptr<TridiagonalSolverZ> tri_;
  Eigen::VectorXcd lower_, diag_, upper_;
  Eigen::SparseMatrix<std::complex<double>> shifted_;
  std::unique_ptr<Eigen::SparseLU<Eigen::SparseMatrix<std::complex<double>>>> lu_;
};

struct BorelSample {
  std::complex<double> z;
  int k = 0;
  std::complex<double> value;  // ensemble mean of d^k F / dz^k
  double std_error = 0.0;
  std::vector<std::complex<double>> per_realization;
};

// d^k F/dz^k estimated through k! <delta_0, (H-z)^{-(k+1)} delta_0>, one
// resolvent factorization and k+1 successive solves per realization.
inline BorelSample borel_derivative(const EnsembleSpec& spec, std::complex<double> z, int k,
                                    int threads = 0) {
  spec.validate();
  if (!(z.imag() > 0.0)) throw std::invalid_argument("borel_derivative: need Im z > 0");
  if (k < 0 || k > spec.ssd.smoothness())
    throw std::invalid_argument("borel_derivative: k out of range");

  BorelSample out;
  out.z = z;
  out.k = k;
  out.per_realization.resize(static_cast<std::size_t>(spec.n_realizations));

  double k_factorial = 1.0;
  for (int i = 2; i <= k; ++i) k_factorial *= i;

  parallel_for(spec.n_realizations, threads, [&](int i) {
    const DisorderRealization omega = realize_disorder(spec, static_cast<std::uint64_t>(i));
    const SparseOperator op = assemble(spec.graph, spec.lambda, omega);
    const ResolventSolver solver(op, z);
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(op.dimension());
    v[spec.graph.origin] = 1.0;
    for (int pass = 0; pass <= k; ++pass) v = solver.solve(v);
    out.per_realization[static_cast<std::size_t>(i)] = k_factorial * v[spec.graph.origin];
  });

  std::complex<double> mean = 0.0;
  for (const auto& v : out.per_realization) mean += v;
  mean /= static_cast<double>(spec.n_realizations);
  double scatter = 0.0;
  for (const auto& v : out.per_realization) scatter += std::norm(v - mean);
  const int n = spec.n_realizations;
  out.value = mean;
  out.std_error = n > 1 ? std::sqrt(scatter / (static_cast<double>(n) * (n - 1.0))) : 0.0;
  return out;
}

// ---------------------------------------------------------------------------
// Density-of-states grids
// ---------------------------------------------------------------------------

enum class DosMethod { borel, histogram, fourier };

inline const char* dos_method_name(DosMethod m) {
  switch (m) {
    case DosMethod::borel: return "borel";
    case DosMethod::histogram: return "histogram";
    case DosMethod::fourier: return "fourier";
  }
  return "?";
}

struct DosGrid {
  Eigen::VectorXd grid;
  Eigen::VectorXd values;
  Eigen::VectorXd uncertainty;
  int k = 0;
  DosMethod method = DosMethod::histogram;
  double smoothing = 0.0;
  double lambda = 0.0;
  std::uint64_t seed = 0;
  int n_realizations = 0;

  double trapezoid_integral() const {
    double acc = 0.0;
    for (int i = 0; i + 1 < grid.size(); ++i)
      acc += 0.5 * (values[i] + values[i + 1]) * (grid[i + 1] - grid[i]);
    return acc;
  }
  double sup_abs() const { return values.size() ? values.cwiseAbs().maxCoeff() : 0.0; }
};

// The energy window J = [-edge + lambda0 a, edge + lambda0_tilde b] containing
// every spectrum in the configured disorder window.
struct EnergyWindow {
  double lo = 0.0, hi = 0.0;
  double width() const { return hi - lo; }
  EnergyWindow extended(double frac) const {
    return EnergyWindow{lo - frac * width(), hi + frac * width()};
  }
};

inline EnergyWindow ids_window(const GraphSpec& g, const Ssd& ssd, double lambda0,
                               double lambda0_tilde) {
  const double edge = laplacian_edge_finite(g);
  return EnergyWindow{-edge + lambda0 * ssd.support_min(), edge + lambda0_tilde * ssd.support_max()};
}

inline Eigen::VectorXd uniform_grid(double lo, double hi, int n) {
  if (n < 2) throw std::invalid_argument("uniform_grid: n < 2");
  return Eigen::VectorXd::LinSpaced(n, lo, hi);
}

// Proxy for the mean eigenvalue spacing of the origin-weighted measure:
// finite-volume spectral width over the matrix dimension.
inline double mean_level_spacing(const EnsembleSpec& spec) {
  const SpectrumInterval iv = spectrum_interval(spec.graph, spec.lambda, spec.ssd);
  return (iv.hi - iv.lo) / std::max(1, spec.graph.vertex_count - 1);
}

inline std::vector<double> default_epsilon_schedule(const EnsembleSpec& spec,
                                                    double factor = 4.0, int levels = 4) {
  std::vector<double> schedule;
  double eps = factor * mean_level_spacing(spec);
  for (int l = 0; l < levels; ++l) {
    schedule.push_back(eps);
    eps *= 0.5;
  }
  return schedule;
}

// Single-smoothing Borel estimate of g^{(k)} on a grid:
// (1/pi) Im d^k F/dz^k at z = E + i eps. Uncertainty is the per-point
// standard error over realizations.
inline DosGrid borel_dos_at_epsilon(const EnsembleSpec& spec, int k, const Eigen::VectorXd& grid,
                                    double eps, int threads = 0) {
  spec.validate();
  if (!(eps > 0.0)) throw std::invalid_argument("borel_dos_at_epsilon: eps must be > 0");
  if (k < 0 || k > spec.ssd.smoothness() - 1)
    throw std::invalid_argument("borel_dos_at_epsilon: k out of range");

  double k_factorial = 1.0;
  for (int i = 2; i <= k; ++i) k_factorial *= i;

  const int n_grid = static_cast<int>(grid.size());
  Eigen::MatrixXd slots(spec.n_realizations, n_grid);

  parallel_for(spec.n_realizations, threads, [&](int i) {
    const DisorderRealization omega = realize_disorder(spec, static_cast<std::uint64_t>(i));
    const SparseOperator op = assemble(spec.graph, spec.lambda, omega);
    const int n = op.dimension();
    for (int gidx = 0; gidx < n_grid; ++gidx) {
      const std::complex<double> z(grid[gidx], eps);
      const ResolventSolver solver(op, z);
      Eigen::VectorXcd v = Eigen::VectorXcd::Zero(n);
      v[spec.graph.origin] = 1.0;
      for (int pass = 0; pass <= k; ++pass) v = solver.solve(v);
      slots(i, gidx) = k_factorial * v[spec.graph.origin].imag() / 3.14159265358979323846;
    }
  });

  DosGrid out;
  out.grid = grid;
  out.k = k;
  out.method = DosMethod::borel;
  out.smoothing = eps;
  out.lambda = spec.lambda;
  out.seed = spec.master_seed;
  out.n_realizations = spec.n_realizations;
  out.values = slots.colwise().mean();
  out.uncertainty.resize(n_grid);
  const double n_real = static_cast<double>(spec.n_realizations);
  for (int gidx = 0; gidx < n_grid; ++gidx) {
    if (spec.n_realizations < 2) {
      out.uncertainty[gidx] = 0.0;
      continue;
    }
    const double var =
        (slots.col(gidx).array() - out.values[gidx]).square().sum() / (n_real - 1.0);
    out.uncertainty[gidx] = std::sqrt(var / n_real);
  }
  return out;
}

// Borel-route estimator with Richardson extrapolation in the broadening: the
// Poisson-kernel bias is analytic in eps away from atoms, so a Neville table
// over the whole schedule extrapolates it to eps -> 0. The difference between
// the last two extrapolation orders is reported as the uncertainty.
inline DosGrid g_derivative_borel(const EnsembleSpec& spec, int k, const Eigen::VectorXd& grid,
                                  const std::vector<double>& eps_schedule, int threads = 0) {
  if (eps_schedule.size() < 2)
    throw std::invalid_argument("g_derivative_borel: need at least 2 epsilon levels");
  for (std::size_t i = 0; i + 1 < eps_schedule.size(); ++i)
    if (!(eps_schedule[i] > eps_schedule[i + 1]))
      throw std::invalid_argument("g_derivative_borel: schedule must decrease");

  std::vector<DosGrid> levels;
  levels.reserve(eps_schedule.size());
  for (double eps : eps_schedule)
    levels.push_back(borel_dos_at_epsilon(spec, k, grid, eps, threads));

  const std::size_t n_levels = levels.size();
  DosGrid out = levels.back();
  std::vector<double> table(n_levels);
  for (int i = 0; i < grid.size(); ++i) {
    for (std::size_t l = 0; l < n_levels; ++l) table[l] = levels[l].values[i];
    double previous_order = table[n_levels - 1];
    // Neville evaluation at eps = 0
    for (std::size_t order = 1; order < n_levels; ++order) {
      for (std::size_t l = 0; l + order < n_levels; ++l) {
        const double e_lo = eps_schedule[l];
        const double e_hi = eps_schedule[l + order];
        table[l] = (e_lo * table[l + 1] - e_hi * table[l]) / (e_lo - e_hi);
      }
      if (order == n_levels - 2) previous_order = table[0];
    }
    out.values[i] = table[0];
    out.uncertainty[i] = std::abs(table[0] - previous_order);
  }
  out.smoothing = eps_schedule.back();
  return out;
}

// ---------------------------------------------------------------------------
// Spectral (kernel) route
// ---------------------------------------------------------------------------

// Gaussian-kernel estimate of g^{(k)}: the atoms sum w_j delta_{E_j} are
// smoothed by a Gaussian of width `bandwidth` and the derivative is taken
// analytically through the kernel (differencing noisy grids would amplify
// Monte-Carlo noise by 1/bandwidth per order).
inline DosGrid g_derivative_spectral(const EnsembleData& data, int k, const Eigen::VectorXd& grid,
                                     double bandwidth, int threads = 0) {
  if (!(bandwidth > 0.0)) throw std::invalid_argument("g_derivative_spectral: bandwidth <= 0");
  if (k < 0) throw std::invalid_argument("g_derivative_spectral: k < 0");
  const int n_grid = static_cast<int>(grid.size());
  const int n_real = static_cast<int>(data.samples.size());
  if (n_real == 0) throw std::invalid_argument("g_derivative_spectral: empty ensemble");

  const double inv_sqrt2pi = 0.3989422804014326779;
  const double cutoff = 12.0 * bandwidth;
  const double sign = (k % 2 == 0) ? 1.0 : -1.0;
  const double h_pow = std::pow(bandwidth, k + 1);

  Eigen::MatrixXd slots = Eigen::MatrixXd::Zero(n_real, n_grid);
  parallel_for(n_real, threads, [&](int r) {
    const auto& s = data.samples[static_cast<std::size_t>(r)];
    const double* ev = s.eigenvalues.data();
    const int n = static_cast<int>(s.eigenvalues.size());
    for (int gidx = 0; gidx < n_grid; ++gidx) {
      const double x = grid[gidx];
      const int lo = static_cast<int>(std::lower_bound(ev, ev + n, x - cutoff) - ev);
      const int hi = static_cast<int>(std::upper_bound(ev, ev + n, x + cutoff) - ev);
      double acc = 0.0;
      for (int j = lo; j < hi; ++j) {
        const double u = (x - ev[j]) / bandwidth;
        // probabilists' Hermite recurrence: He_0 = 1, He_1 = u
        double he_prev = 1.0, he = u;
        if (k == 0) he = 1.0;
        for (int q = 2; q <= k; ++q) {
          const double he_next = u * he - (q - 1) * he_prev;
          he_prev = he;
          he = he_next;
        }
        acc += s.weights[j] * he * std::exp(-0.5 * u * u);
      }
      slots(r, gidx) = sign * inv_sqrt2pi / h_pow * acc;
    }
  });

  DosGrid out;
  out.grid = grid;
  out.k = k;
  out.method = DosMethod::histogram;
  out.smoothing = bandwidth;
  out.lambda = data.spec.lambda;
  out.seed = data.spec.master_seed;
  out.n_realizations = n_real;
  out.values = slots.colwise().mean();
  out.uncertainty.resize(n_grid);
  for (int gidx = 0; gidx < n_grid; ++gidx) {
    if (n_real < 2) {
      out.uncertainty[gidx] = 0.0;
      continue;
    }
    const double var = (slots.col(gidx).array() - out.values[gidx]).square().sum() /
                       (static_cast<double>(n_real) - 1.0);
    out.uncertainty[gidx] = std::sqrt(var / static_cast<double>(n_real));
  }
  return out;
}

// Plain weighted histogram of the local spectral measure (k = 0 only); the
// third, assumption-free density estimate used for cross-checks.
inline DosGrid histogram_density(const EnsembleData& data, const Eigen::VectorXd& grid) {
  if (grid.size() < 2) throw std::invalid_argument("histogram_density: need >= 2 grid points");
  const int n_bins = static_cast<int>(grid.size()) - 1;
  const double lo = grid[0];
  const double dx = grid[1] - grid[0];
  Eigen::VectorXd counts = Eigen::VectorXd::Zero(n_bins);
  for (const auto& s : data.samples)
    for (int j = 0; j < s.eigenvalues.size(); ++j) {
      const int bin = static_cast<int>(std::floor((s.eigenvalues[j] - lo) / dx));
      if (bin >= 0 && bin < n_bins) counts[bin] += s.weights[j];
    }
  DosGrid out;
  out.grid.resize(n_bins);
  for (int i = 0; i < n_bins; ++i) out.grid[i] = lo + (i + 0.5) * dx;
  out.values = counts / (dx * static_cast<double>(data.samples.size()));
  out.uncertainty = Eigen::VectorXd::Zero(n_bins);
  out.k = 0;
  out.method = DosMethod::histogram;
  out.smoothing = dx;
  out.lambda = data.spec.lambda;
  out.seed = data.spec.master_seed;
  out.n_realizations = static_cast<int>(data.samples.size());
  return out;
}

// ---------------------------------------------------------------------------
// Uniform sup-norm report
// ---------------------------------------------------------------------------

struct SupnormReport {
  int k = 0;
  std::vector<double> lambdas;
  std::vector<double> sup_norms;
  double max_sup = 0.0;
  double variation = 0.0;  // (max - min)/min over the lambda grid
  bool has_trend = false;  // at least 3 lambda points
  LinearFit trend;
  bool no_increasing_trend = true;  // one-sided test at 95%
  double denominator = 0.0;         // 1 + |J|
  double implied_constant = 0.0;    // max_sup / denominator
};

inline SupnormReport supnorm_bound_report(const std::vector<DosGrid>& grids, int k,
                                          double bound_denominator) {
  if (grids.empty()) throw std::invalid_argument("supnorm_bound_report: no grids");
  SupnormReport report;
  report.k = k;
  report.denominator = bound_denominator;
  for (const auto& g : grids) {
    if (g.k != k) throw std::invalid_argument("supnorm_bound_report: mixed derivative orders");
    report.lambdas.push_back(g.lambda);
    report.sup_norms.push_back(g.sup_abs());
  }
  const double max_sup = *std::max_element(report.sup_norms.begin(), report.sup_norms.end());
  const double min_sup = *std::min_element(report.sup_norms.begin(), report.sup_norms.end());
  report.max_sup = max_sup;
  report.variation = min_sup > 0.0 ? (max_sup - min_sup) / min_sup
                                   : std::numeric_limits<double>::infinity();
  report.implied_constant = max_sup / bound_denominator;
  if (report.lambdas.size() >= 3) {
    report.has_trend = true;
    report.trend = linear_fit(report.lambdas, report.sup_norms);
    report.no_increasing_trend = !report.trend.slope_significantly_positive();
  }
  return report;
}

}  // namespace anderson
