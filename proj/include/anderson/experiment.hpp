#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "anderson/config.hpp"
#include "anderson/fourier.hpp"
#include "anderson/locmetrics.hpp"
#include "anderson/report.hpp"
#include "anderson/spectral.hpp"

namespace anderson {

// Ensembles keyed by disorder strength; pairs share the base lambda, so the
// cache roughly halves the eigensolve work, and the dos/kr runners can reuse
// the continuity ensembles outright.
class EnsembleCache {
 public:
  const EnsembleData& ensure(const GraphSpec& graph, const Ssd& ssd, double lambda,
                             const ExperimentConfig& config, double lambda_min,
                             double lambda_max) {
    auto it = store_.find(lambda);
    if (it != store_.end()) return it->second;
    EnsembleSpec spec{graph, ssd, lambda, config.n_realizations, config.master_seed, lambda_min,
                      lambda_max};
    auto [pos, inserted] = store_.emplace(lambda, sample_ensemble(spec, config.threads));
    return pos->second;
  }

 private:
  std::map<double, EnsembleData> store_;
};

// ---------------------------------------------------------------------------
// Continuity experiment (the headline run)
// ---------------------------------------------------------------------------

struct ContinuityPair {
  double lambda1 = 0, lambda2 = 0, gap = 0;
  DuhamelBoundReport duhamel;
};

struct ContinuityRow {
  int k = 0;
  double lambda1 = 0, lambda2 = 0, gap = 0;
  double split_point = 0;
  double sup_diff = 0;
  double tail_bound = 0;
};

struct ContinuityFit {
  int k = 0;
  double theoretical_exponent = 0;
  LinearFit loglog;       // log sup-difference vs log gap
  double alpha_hat = 0;   // fitted Holder exponent
  double d_hat = 0;       // largest implied constant sup / gap^theoretical
  double d_ratio = 0;     // max/min implied constant across rows
  // heuristic value of 2M/(k+2) + 4 sup|g^(m-1)| / (m-k-2), with the sup
  // estimated from the base-lambda ensemble; reported for comparison only
  double d_formula_heuristic = 0;
  int n_rows_fit = 0;
  bool bound_ok = false;  // each row below d_hat * gap^theoretical
  bool slope_ok = false;  // alpha_hat >= theoretical - slope_tolerance
  bool r2_ok = false;
  bool d_stable = false;  // d_ratio <= 10

  bool pass() const { return bound_ok && slope_ok && r2_ok && d_stable; }
};

struct ContinuityResult {
  std::vector<ContinuityPair> pairs;
  std::vector<ContinuityRow> rows;
  std::vector<ContinuityFit> fits;
  double t_max = 0, dt = 0;
  bool duhamel_all_pass = true;

  bool all_pass() const {
    if (!duhamel_all_pass) return false;
    for (const auto& f : fits)
      if (!f.pass()) return false;
    return true;
  }
};

inline ContinuityResult run_continuity_experiment(const ExperimentConfig& config,
                                                  EnsembleCache* shared_cache = nullptr) {
  config.validate_continuity();
  const GraphSpec graph = config.build_graph();
  const Ssd ssd = config.build_ssd();
  const auto pairs = config.pair_schedule();

  EnsembleCache local_cache;
  EnsembleCache& cache = shared_cache ? *shared_cache : local_cache;

  // shared t grid wide enough for the largest split point A = gap^{-1/m}
  double a_max = 0.0;
  for (const auto& [l1, l2] : pairs) {
    const double gap = std::abs(l2 - l1);
    if (gap > 0.0) a_max = std::max(a_max, std::pow(gap, -1.0 / config.m));
  }
  if (a_max == 0.0) throw std::invalid_argument("continuity: all pairs have zero gap");
  const EnergyWindow window =
      ids_window(graph, ssd, config.lambda0, config.lambda0_tilde).extended(config.grid_extension);
  const double t_max = config.t_max_factor * a_max;
  const double dt = 2.0 * kPi / (config.dt_denominator * window.width());
  const Eigen::VectorXd t_grid = symmetric_t_grid(t_max, dt);
  const Eigen::VectorXd x_grid = uniform_grid(window.lo, window.hi, config.n_grid);

  std::map<double, CharFunctionSamples> chfs;
  const auto char_for = [&](double lambda) -> const CharFunctionSamples& {
    auto it = chfs.find(lambda);
    if (it != chfs.end()) return it->second;
    const EnsembleData& data =
        cache.ensure(graph, ssd, lambda, config, config.lambda0, config.lambda0_tilde);
    return chfs.emplace(lambda, char_function(data, t_grid, config.threads)).first->second;
  };

  ContinuityResult result;
  result.t_max = t_grid[t_grid.size() - 1];
  result.dt = dt;
  const double bound_m = ssd.max_abs_support();

  for (const auto& [l1, l2] : pairs) {
    const CharFunctionSamples& c1 = char_for(l1);
    const CharFunctionSamples& c2 = char_for(l2);

    ContinuityPair pair;
    pair.lambda1 = l1;
    pair.lambda2 = l2;
    pair.gap = std::abs(l2 - l1);
    pair.duhamel = duhamel_bound_check(c1, c2, bound_m);
    result.duhamel_all_pass = result.duhamel_all_pass && pair.duhamel.pass;
    result.pairs.push_back(pair);

    for (int k : config.k_orders) {
      ContinuityRow row;
      row.k = k;
      row.lambda1 = l1;
      row.lambda2 = l2;
      row.gap = pair.gap;
      if (pair.gap == 0.0) {
        // coupled ensembles at equal lambda are bit-identical
        row.split_point = result.t_max;
        row.sup_diff = 0.0;
      } else {
        const double split = std::min(std::pow(pair.gap, -1.0 / config.m), result.t_max);
        const ReconstructionResult rec =
            reconstruct_derivative(c1, c2, k, x_grid, split, config.m);
        row.split_point = split;
        row.sup_diff = rec.sup_abs;
        row.tail_bound = rec.tail_bound;
      }
      result.rows.push_back(row);
    }
  }

  // sup of the highest DOS derivative at the base lambda, for the heuristic
  // constant comparison in the summary
  double sup_g_top = 0.0;
  {
    const double base_lambda = pairs.front().first;
    const EnsembleData& base =
        cache.ensure(graph, ssd, base_lambda, config, config.lambda0, config.lambda0_tilde);
    EnsembleSpec base_spec{graph, ssd, base_lambda, config.n_realizations, config.master_seed,
                           config.lambda0, config.lambda0_tilde};
    const double bandwidth =
        config.smoothing_factor * mean_level_spacing(base_spec) / std::sqrt(2.0);
    sup_g_top =
        g_derivative_spectral(base, config.m - 1, x_grid, bandwidth, config.threads).sup_abs();
  }

  for (int k : config.k_orders) {
    ContinuityFit fit;
    fit.k = k;
    fit.theoretical_exponent = static_cast<double>(config.m - k - 2) / config.m;
    fit.d_formula_heuristic = 2.0 * bound_m / (k + 2) +
                              4.0 * sup_g_top / static_cast<double>(config.m - k - 2);

    std::vector<double> log_gap, log_sup;
    double d_min = std::numeric_limits<double>::infinity(), d_max = 0.0;
    for (const auto& row : result.rows) {
      if (row.k != k || row.gap <= 0.0 || row.sup_diff <= 0.0) continue;  // zero-gap rows excluded
      log_gap.push_back(std::log(row.gap));
      log_sup.push_back(std::log(row.sup_diff));
      const double implied = row.sup_diff / std::pow(row.gap, fit.theoretical_exponent);
      d_min = std::min(d_min, implied);
      d_max = std::max(d_max, implied);
    }
    fit.n_rows_fit = static_cast<int>(log_gap.size());
    if (fit.n_rows_fit >= 3) {
      fit.loglog = linear_fit(log_gap, log_sup);
      fit.alpha_hat = fit.loglog.slope;
      fit.d_hat = d_max;
      fit.d_ratio = d_max / d_min;
      fit.slope_ok = fit.alpha_hat >= fit.theoretical_exponent - config.slope_tolerance;
      fit.r2_ok = fit.loglog.r2 >= config.r2_min;
      fit.d_stable = fit.d_ratio <= 10.0;
      fit.bound_ok = true;
      for (const auto& row : result.rows)
        if (row.k == k && row.gap > 0.0 &&
            row.sup_diff > fit.d_hat * std::pow(row.gap, fit.theoretical_exponent) * (1 + 1e-12))
          fit.bound_ok = false;
    }
    result.fits.push_back(fit);
  }
  return result;
}

// ---------------------------------------------------------------------------
// Kantorovich-Rubinstein / IDS experiment
// ---------------------------------------------------------------------------

struct KrRow {
  double lambda1 = 0, lambda2 = 0, gap = 0;
  double sup_ids_diff = 0;
  double d_kr = 0;
  double kr_equality_err = 0;  // |d_kr - gap * E|omega||
};

struct KrResult {
  std::vector<KrRow> rows;
  LinearFit loglog;   // log sup|N1-N2| vs log gap
  double c_hat = 0;   // largest sup / sqrt(gap)
  bool kr_equality_ok = true;
  bool slope_ok = false;
  bool bound_ok = true;

  bool all_pass() const { return kr_equality_ok && slope_ok && bound_ok; }
};

inline KrResult run_kr_experiment(const ExperimentConfig& config,
                                  EnsembleCache* shared_cache = nullptr) {
  config.validate_continuity();
  const GraphSpec graph = config.build_graph();
  const Ssd ssd = config.build_ssd();
  const auto pairs = config.pair_schedule();

  EnsembleCache local_cache;
  EnsembleCache& cache = shared_cache ? *shared_cache : local_cache;

  const EnergyWindow window =
      ids_window(graph, ssd, config.lambda0, config.lambda0_tilde).extended(config.grid_extension);
  const Eigen::VectorXd fine_grid = uniform_grid(window.lo, window.hi, 4 * config.n_grid);
  const double abs_moment = ssd.abs_moment();

  std::map<double, Eigen::VectorXd> ids_cache;
  const auto ids_for = [&](double lambda) -> const Eigen::VectorXd& {
    auto it = ids_cache.find(lambda);
    if (it != ids_cache.end()) return it->second;
    const EnsembleData& data =
        cache.ensure(graph, ssd, lambda, config, config.lambda0, config.lambda0_tilde);
    return ids_cache.emplace(lambda, ids_empirical_grid(data.samples, fine_grid)).first->second;
  };

  KrResult result;
  std::vector<double> log_gap, log_sup;
  for (const auto& [l1, l2] : pairs) {
    KrRow row;
    row.lambda1 = l1;
    row.lambda2 = l2;
    row.gap = std::abs(l2 - l1);
    row.sup_ids_diff = (ids_for(l1) - ids_for(l2)).cwiseAbs().maxCoeff();
    row.d_kr = kr_distance_scaled(ssd, l1, l2);
    row.kr_equality_err = std::abs(row.d_kr - row.gap * abs_moment);
    result.kr_equality_ok = result.kr_equality_ok && row.kr_equality_err <= 1e-8;
    result.rows.push_back(row);
    if (row.gap > 0.0 && row.sup_ids_diff > 0.0) {
      log_gap.push_back(std::log(row.gap));
      log_sup.push_back(std::log(row.sup_ids_diff));
      result.c_hat = std::max(result.c_hat, row.sup_ids_diff / std::sqrt(row.gap));
    }
  }
  if (log_gap.size() >= 3) {
    result.loglog = linear_fit(log_gap, log_sup);
    result.slope_ok = result.loglog.slope >= config.kr_slope_min;
  }
  for (const auto& row : result.rows)
    if (row.gap > 0.0 && row.sup_ids_diff > result.c_hat * std::sqrt(row.gap) * (1 + 1e-12))
      result.bound_ok = false;
  return result;
}

// ---------------------------------------------------------------------------
// Density-of-states run: sup-norm bounds, route agreement, Herglotz sweep
// ---------------------------------------------------------------------------

struct SupnormVerdict {
  SupnormReport report;
  bool variation_ok = false;
  bool pass() const { return variation_ok && report.no_increasing_trend; }
};

struct DosRunResult {
  std::vector<DosGrid> kernel_grids;  // per (lambda, k), kernel route
  std::vector<SupnormVerdict> supnorm;  // per k in {0, 1}
  double epsilon = 0;                 // matched smoothing used everywhere
  double route_rel_sup_err = 0;       // borel vs kernel, k = 0, central 80%
  bool route_ok = false;
  bool herglotz_ok = true;
  int herglotz_checks = 0;
  double bound_denominator = 0;
  struct WegnerRow {
    double lambda = 0, sup_g = 0, wegner = 0;
  };
  std::vector<WegnerRow> wegner;

  bool all_pass() const {
    if (!route_ok || !herglotz_ok) return false;
    for (const auto& v : supnorm)
      if (!v.pass()) return false;
    return true;
  }
};

inline DosRunResult run_dos_experiment(const ExperimentConfig& config,
                                       EnsembleCache* shared_cache = nullptr) {
  if (config.dos_lambdas.empty()) throw std::invalid_argument("dos: empty lambda grid");
  const GraphSpec graph = config.build_graph();
  const Ssd ssd = config.build_ssd();

  EnsembleCache local_cache;
  EnsembleCache& cache = shared_cache ? *shared_cache : local_cache;

  const EnergyWindow j_window = ids_window(graph, ssd, config.lambda0, config.lambda0_tilde);
  const EnergyWindow window = j_window.extended(config.grid_extension);
  const Eigen::VectorXd grid = uniform_grid(window.lo, window.hi, config.n_grid);

  DosRunResult result;
  result.bound_denominator = 1.0 + j_window.width();

  // matched absolute smoothing, set by the first lambda on the grid
  const double lambda_ref = config.dos_lambdas.front();
  EnsembleSpec ref_spec{graph, ssd, lambda_ref, config.n_realizations, config.master_seed,
                        std::min(config.lambda0, lambda_ref),
                        std::max(config.lambda0_tilde, lambda_ref)};
  result.epsilon = config.smoothing_factor * mean_level_spacing(ref_spec);
  const double bandwidth = result.epsilon / std::sqrt(2.0);

  for (double lambda : config.dos_lambdas) {
    const EnsembleData& data = cache.ensure(graph, ssd, lambda, config,
                                            std::min(config.lambda0, lambda),
                                            std::max(config.lambda0_tilde, lambda));
    for (int k : {0, 1}) {
      result.kernel_grids.push_back(
          g_derivative_spectral(data, k, grid, bandwidth, config.threads));
    }
    DosRunResult::WegnerRow row;
    row.lambda = lambda;
    row.sup_g = result.kernel_grids[result.kernel_grids.size() - 2].sup_abs();
    row.wegner = ssd.norm_const() / lambda;
    result.wegner.push_back(row);
  }

  for (int k : {0, 1}) {
    std::vector<DosGrid> per_k;
    for (const auto& g : result.kernel_grids)
      if (g.k == k) per_k.push_back(g);
    SupnormVerdict verdict;
    verdict.report = supnorm_bound_report(per_k, k, result.bound_denominator);
    verdict.variation_ok = per_k.size() < 2 || verdict.report.variation <= config.supnorm_variation_max;
    result.supnorm.push_back(verdict);
  }

  // route agreement at the reference lambda, k = 0, extrapolated Borel route
  {
    EnsembleSpec spec = ref_spec;
    const DosGrid borel = g_derivative_borel(
        spec, 0, grid, {4.0 * result.epsilon, 2.0 * result.epsilon, result.epsilon},
        config.threads);
    const EnsembleData& data = cache.ensure(graph, ssd, lambda_ref, config,
                                            std::min(config.lambda0, lambda_ref),
                                            std::max(config.lambda0_tilde, lambda_ref));
    const DosGrid kernel = g_derivative_spectral(data, 0, grid, bandwidth, config.threads);
    const int lo = static_cast<int>(grid.size() / 10);
    const int hi = static_cast<int>(grid.size() * 9 / 10);
    double worst = 0.0;
    for (int i = lo; i < hi; ++i)
      worst = std::max(worst, std::abs(borel.values[i] - kernel.values[i]));
    result.route_rel_sup_err = worst / kernel.sup_abs();
    result.route_ok = result.route_rel_sup_err <= config.route_agreement_tol;

    // Herglotz sweep: per-realization Im F(z) > 0 across J at two broadenings
    for (double eps : {result.epsilon, 0.25 * result.epsilon}) {
      for (int p = 0; p < 5; ++p) {
        const double re = j_window.lo + (p + 0.5) / 5.0 * j_window.width();
        const BorelSample f =
            borel_derivative(spec, std::complex<double>(re, eps), 0, config.threads);
        for (const auto& v : f.per_realization)
          if (!(v.imag() > 0.0)) result.herglotz_ok = false;
        ++result.herglotz_checks;
      }
    }
  }
  return result;
}

// ---------------------------------------------------------------------------
// Fourier decay run
// ---------------------------------------------------------------------------

struct FourierRunResult {
  CharFunctionSamples chf;  // ensemble characteristic function at lambda0
  double noise_floor = 0;
  DecayProfile ensemble_profile;
  DecayProfile toy_profile;  // quadrature transform of the bump itself
  double toy_sup_scaled = 0;

  bool all_pass() const {
    return toy_profile.window_valid && toy_profile.decay_steep_enough &&
           ensemble_profile.window_valid && ensemble_profile.decay_steep_enough;
  }
};

// Characteristic function of the bump density by direct quadrature; the
// smooth toy against which the decay profiler is validated.
inline CharFunctionSamples bump_char_function_quadrature(const Ssd& ssd,
                                                         const Eigen::VectorXd& t_grid) {
  CharFunctionSamples chf;
  chf.t = t_grid;
  chf.values.resize(t_grid.size());
  chf.n_realizations = 1;
  for (int i = 0; i < t_grid.size(); ++i) {
    const double t = t_grid[i];
    const double re =
        adaptive_simpson([&](double x) { return ssd.density(x) * std::cos(t * x); },
                         ssd.support_min(), ssd.support_max(), 1e-13);
    const double im =
        adaptive_simpson([&](double x) { return -ssd.density(x) * std::sin(t * x); },
                         ssd.support_min(), ssd.support_max(), 1e-13);
    chf.values[i] = std::complex<double>(re, im);
  }
  return chf;
}

inline FourierRunResult run_fourier_experiment(const ExperimentConfig& config,
                                               EnsembleCache* shared_cache = nullptr) {
  const GraphSpec graph = config.build_graph();
  const Ssd ssd = config.build_ssd();

  EnsembleCache local_cache;
  EnsembleCache& cache = shared_cache ? *shared_cache : local_cache;
  const EnsembleData& data = cache.ensure(graph, ssd, config.lambda0, config,
                                          config.lambda0, config.lambda0_tilde);

  const EnergyWindow window =
      ids_window(graph, ssd, config.lambda0, config.lambda0).extended(config.grid_extension);
  const double dt = 2.0 * kPi / (config.dt_denominator * window.width());
  const Eigen::VectorXd t_grid = symmetric_t_grid(config.decay_t_max, dt);

  FourierRunResult result;
  result.chf = char_function(data, t_grid, config.threads);
  result.noise_floor = char_noise_floor(data);
  result.ensemble_profile = decay_profile(result.chf, config.m, result.noise_floor);

  // toy oracle: the bump is C^{m+1}, so |rho_hat| |t|^{m+1} stays bounded;
  // profile it with smoothness argument m+2 over a wide fixed window
  const Eigen::VectorXd toy_grid = symmetric_t_grid(40.0, 0.5);
  const CharFunctionSamples toy = bump_char_function_quadrature(ssd, toy_grid);
  result.toy_profile = decay_profile(toy, config.m + 2, 0.0);
  result.toy_sup_scaled = result.toy_profile.sup_scaled;
  return result;
}

// ---------------------------------------------------------------------------
// Fractional-moment run
// ---------------------------------------------------------------------------

struct FracmomResult {
  double s = 0;
  double im_z = 0;
  struct PerLambda {
    double lambda = 0;
    double re_z = 0;
    DecayFit fit;
    FracMomentTable table;
  };
  std::vector<PerLambda> central;       // central Re z per lambda
  std::vector<PerLambda> re_z_sweep;    // sweep at the first lambda
  double c_fit = 0;                     // calibrated rate constant
  std::vector<double> predicted_xi;     // formula after calibration, per lambda
  DecayFit rez_envelope;                // fit of sup over Re z of the moments
  bool r2_ok = true;
  bool increasing_ok = true;
  bool step_ok = true;
  bool rez_bounded_ok = true;

  bool all_pass() const { return r2_ok && increasing_ok && step_ok && rez_bounded_ok; }
};

inline FracmomResult run_fracmom_experiment(const ExperimentConfig& config) {
  if (config.fracmom_lambdas.size() < 2)
    throw std::invalid_argument("fracmom: need at least two lambda values");
  const GraphSpec graph = config.build_graph();
  const Ssd ssd = config.build_ssd();

  FracmomResult result;
  result.s = config.s_exponent;
  result.im_z = config.im_z;

  for (double lambda : config.fracmom_lambdas) {
    EnsembleSpec spec{graph, ssd, lambda, config.n_realizations, config.master_seed, 0.0,
                      std::numeric_limits<double>::infinity()};
    const SpectrumInterval iv = spectrum_interval(graph, lambda, ssd);
    const double re_center = 0.5 * (iv.lo + iv.hi);
    FracmomResult::PerLambda entry;
    entry.lambda = lambda;
    entry.re_z = re_center;
    entry.table = fractional_moments(spec, std::complex<double>(re_center, config.im_z),
                                     config.s_exponent, config.r_max, config.threads);
    entry.fit = fit_decay(entry.table, config.fit_r_min);
    result.r2_ok = result.r2_ok && entry.fit.r2 >= config.fracmom_r2_min;
    result.central.push_back(entry);
  }

  for (std::size_t i = 0; i + 1 < result.central.size(); ++i) {
    const auto& lo = result.central[i];
    const auto& hi = result.central[i + 1];
    if (!(hi.fit.rate > lo.fit.rate)) result.increasing_ok = false;
    const double expected = config.s_exponent * std::log(hi.lambda / lo.lambda);
    const double tolerance = 2.0 * (lo.fit.rate_ci95 + hi.fit.rate_ci95);
    if (std::abs((hi.fit.rate - lo.fit.rate) - expected) > tolerance) result.step_ok = false;
  }

  // calibrate the unknown constant at the first lambda, then report the
  // formula's prediction across the grid
  result.c_fit = calibrate_rate_constant(config.s_exponent, result.central.front().lambda,
                                         result.central.front().fit.rate, graph);
  for (const auto& entry : result.central)
    result.predicted_xi.push_back(
        predicted_rate(config.s_exponent, entry.lambda, graph, result.c_fit).xi);

  // uniformity in Re z at the first lambda: the pointwise sup over the sweep
  // must itself decay exponentially (a uniform envelope; at spectral edges
  // the moments drop far below it, which is fine for a sup bound)
  {
    const double lambda = config.fracmom_lambdas.front();
    EnsembleSpec spec{graph, ssd, lambda, config.n_realizations, config.master_seed, 0.0,
                      std::numeric_limits<double>::infinity()};
    const SpectrumInterval iv = spectrum_interval(graph, lambda, ssd);
    for (int p = 0; p < config.re_z_points; ++p) {
      const double re =
          iv.lo + (0.1 + 0.8 * (p + 0.5) / config.re_z_points) * (iv.hi - iv.lo);
      FracmomResult::PerLambda entry;
      entry.lambda = lambda;
      entry.re_z = re;
      entry.table = fractional_moments(spec, std::complex<double>(re, config.im_z),
                                       config.s_exponent, config.r_max, config.threads);
      entry.fit = fit_decay(entry.table, config.fit_r_min);
      result.re_z_sweep.push_back(entry);
    }
    FracMomentTable envelope;
    envelope.s = config.s_exponent;
    envelope.lambda = lambda;
    envelope.n_realizations = config.n_realizations;
    for (int r = 0; r <= config.r_max; ++r) {
      FracMomentRow row;
      row.r = r;
      for (const auto& entry : result.re_z_sweep) {
        const auto& src = entry.table.rows[static_cast<std::size_t>(r)];
        if (src.moment > row.moment) {
          row.moment = src.moment;
          row.std_error = src.std_error;
        }
      }
      envelope.rows.push_back(row);
    }
    result.rez_envelope = fit_decay(envelope, config.fit_r_min);
    result.rez_bounded_ok = result.rez_envelope.localized && result.rez_envelope.r2 >= 0.9;
  }
  return result;
}

// ---------------------------------------------------------------------------
// Report emission
// ---------------------------------------------------------------------------

namespace detail {

inline std::vector<std::string> provenance_header() {
  return {"graph", "m", "a", "b", "lambda0", "lambda0_tilde", "seed", "n_realizations", "n_grid"};
}

inline std::vector<std::string> provenance_fields(const ExperimentConfig& config,
                                                  const GraphSpec& graph) {
  return {graph.label(),
          std::to_string(config.m),
          format_full(config.a),
          format_full(config.b),
          format_full(config.lambda0),
          format_full(config.lambda0_tilde),
          std::to_string(config.master_seed),
          std::to_string(config.n_realizations),
          std::to_string(config.n_grid)};
}

inline void append(std::vector<std::string>& row, std::vector<std::string> tail) {
  for (auto& t : tail) row.push_back(std::move(t));
}

inline nlohmann::json ssd_summary(const Ssd& ssd) {
  nlohmann::json j;
  j["m"] = ssd.smoothness();
  j["a"] = ssd.support_min();
  j["b"] = ssd.support_max();
  j["norm_const"] = ssd.norm_const();
  j["abs_moment"] = ssd.abs_moment();
  std::vector<double> sup_norms;
  for (int k = 0; k <= ssd.smoothness() + 1; ++k) sup_norms.push_back(ssd.sup_derivative_norm(k));
  j["sup_derivative_norms"] = sup_norms;
  return j;
}

}  // namespace detail

inline std::vector<std::string> emit_continuity_report(const ContinuityResult& result,
                                                       const ExperimentConfig& config,
                                                       const std::string& dir) {
  if (result.rows.empty()) throw std::invalid_argument("emit_continuity_report: no rows");
  ensure_directory(dir);
  const GraphSpec graph = config.build_graph();
  std::vector<std::string> written;

  {
    std::vector<std::string> header = detail::provenance_header();
    detail::append(header, {"t_max", "dt", "k", "lambda1", "lambda2", "gap", "split_A",
                            "sup_diff", "tail_bound"});
    CsvBuilder csv(header);
    for (const auto& row : result.rows) {
      std::vector<std::string> fields = detail::provenance_fields(config, graph);
      detail::append(fields,
                     {format_full(result.t_max), format_full(result.dt), std::to_string(row.k),
                      format_full(row.lambda1), format_full(row.lambda2), format_full(row.gap),
                      format_full(row.split_point), format_full(row.sup_diff),
                      format_full(row.tail_bound)});
      csv.append_row(fields);
    }
    const std::string path = dir + "/continuity_rows.csv";
    write_text_file(path, csv.str());
    written.push_back(path);
  }

  {
    CsvBuilder csv({"lambda1", "lambda2", "gap", "duhamel_max_ratio", "duhamel_worst_t",
                    "duhamel_pass"});
    for (const auto& pair : result.pairs)
      csv.append_row({format_full(pair.lambda1), format_full(pair.lambda2),
                      format_full(pair.gap), format_full(pair.duhamel.max_ratio),
                      format_full(pair.duhamel.worst_t), pair.duhamel.pass ? "1" : "0"});
    const std::string path = dir + "/continuity_pairs.csv";
    write_text_file(path, csv.str());
    written.push_back(path);
  }

  for (const auto& fit : result.fits) {
    CsvBuilder csv({"log_gap", "log_sup_diff"});
    for (const auto& row : result.rows)
      if (row.k == fit.k && row.gap > 0.0 && row.sup_diff > 0.0)
        csv.append_row({format_full(std::log(row.gap)), format_full(std::log(row.sup_diff))});
    const std::string path = dir + "/continuity_k" + std::to_string(fit.k) + "_loglog.dat";
    write_text_file(path, csv.str());
    written.push_back(path);
  }

  {
    nlohmann::json summary;
    summary["experiment"] = "continuity";
    summary["graph"] = graph.label();
    summary["m"] = config.m;
    summary["ssd"] = detail::ssd_summary(config.build_ssd());
    summary["seed"] = config.master_seed;
    summary["n_realizations"] = config.n_realizations;
    summary["t_max"] = result.t_max;
    summary["dt"] = result.dt;
    summary["duhamel_all_pass"] = result.duhamel_all_pass;
    summary["fits"] = nlohmann::json::array();
    for (const auto& fit : result.fits) {
      nlohmann::json f;
      f["k"] = fit.k;
      f["theoretical_exponent"] = fit.theoretical_exponent;
      f["alpha_hat"] = fit.alpha_hat;
      f["alpha_ci95"] = fit.loglog.slope_ci95();
      f["r2"] = fit.loglog.r2;
      f["d_hat"] = fit.d_hat;
      f["d_ratio"] = fit.d_ratio;
      f["d_formula_heuristic"] = fit.d_formula_heuristic;
      f["n_rows"] = fit.n_rows_fit;
      f["bound_ok"] = fit.bound_ok;
      f["slope_ok"] = fit.slope_ok;
      f["r2_ok"] = fit.r2_ok;
      f["d_stable"] = fit.d_stable;
      summary["fits"].push_back(f);
    }
    summary["all_pass"] = result.all_pass();
    const std::string path = dir + "/continuity_summary.json";
    write_text_file(path, summary.dump(2) + "\n");
    written.push_back(path);
  }
  return written;
}

inline std::vector<std::string> emit_kr_report(const KrResult& result,
                                               const ExperimentConfig& config,
                                               const std::string& dir) {
  if (result.rows.empty()) throw std::invalid_argument("emit_kr_report: no rows");
  ensure_directory(dir);
  const GraphSpec graph = config.build_graph();
  std::vector<std::string> written;

  {
    std::vector<std::string> header = detail::provenance_header();
    detail::append(header, {"lambda1", "lambda2", "gap", "sup_ids_diff", "d_kr",
                            "kr_equality_err"});
    CsvBuilder csv(header);
    for (const auto& row : result.rows) {
      std::vector<std::string> fields = detail::provenance_fields(config, graph);
      detail::append(fields, {format_full(row.lambda1), format_full(row.lambda2),
                              format_full(row.gap), format_full(row.sup_ids_diff),
                              format_full(row.d_kr), format_full(row.kr_equality_err)});
      csv.append_row(fields);
    }
    const std::string path = dir + "/kr_rows.csv";
    write_text_file(path, csv.str());
    written.push_back(path);
  }

  {
    CsvBuilder csv({"log_gap", "log_sup_ids_diff"});
    for (const auto& row : result.rows)
      if (row.gap > 0.0 && row.sup_ids_diff > 0.0)
        csv.append_row({format_full(std::log(row.gap)), format_full(std::log(row.sup_ids_diff))});
    const std::string path = dir + "/kr_loglog.dat";
    write_text_file(path, csv.str());
    written.push_back(path);
  }

  {
    nlohmann::json summary;
    summary["experiment"] = "kr";
    summary["graph"] = graph.label();
    summary["ssd"] = detail::ssd_summary(config.build_ssd());
    summary["seed"] = config.master_seed;
    summary["n_realizations"] = config.n_realizations;
    summary["slope"] = result.loglog.slope;
    summary["slope_ci95"] = result.loglog.slope_ci95();
    summary["r2"] = result.loglog.r2;
    summary["c_hat"] = result.c_hat;
    summary["kr_equality_ok"] = result.kr_equality_ok;
    summary["slope_ok"] = result.slope_ok;
    summary["bound_ok"] = result.bound_ok;
    summary["all_pass"] = result.all_pass();
    const std::string path = dir + "/kr_summary.json";
    write_text_file(path, summary.dump(2) + "\n");
    written.push_back(path);
  }
  return written;
}

inline std::vector<std::string> emit_dos_report(const DosRunResult& result,
                                                const ExperimentConfig& config,
                                                const std::string& dir) {
  if (result.kernel_grids.empty()) throw std::invalid_argument("emit_dos_report: no grids");
  ensure_directory(dir);
  std::vector<std::string> written;

  {
    CsvBuilder csv({"x", "value", "uncertainty", "method", "k", "smoothing", "lambda",
                    "n_realizations", "seed"});
    for (const auto& g : result.kernel_grids)
      for (int i = 0; i < g.grid.size(); ++i)
        csv.append_row({format_full(g.grid[i]), format_full(g.values[i]),
                        format_full(g.uncertainty[i]), dos_method_name(g.method),
                        std::to_string(g.k), format_full(g.smoothing), format_full(g.lambda),
                        std::to_string(g.n_realizations), std::to_string(g.seed)});
    const std::string path = dir + "/dos_grids.csv";
    write_text_file(path, csv.str());
    written.push_back(path);
  }

  {
    nlohmann::json summary;
    summary["experiment"] = "dos";
    summary["ssd"] = detail::ssd_summary(config.build_ssd());
    summary["epsilon"] = result.epsilon;
    summary["grids"] = nlohmann::json::array();
    for (const auto& g : result.kernel_grids) {
      nlohmann::json entry;
      entry["lambda"] = g.lambda;
      entry["k"] = g.k;
      entry["smoothing"] = g.smoothing;
      entry["sup_abs"] = g.sup_abs();
      // k = 0 integrates to 1 up to truncation; k >= 1 to 0
      entry["integral"] = g.trapezoid_integral();
      entry["mass_defect"] = g.k == 0 ? std::abs(g.trapezoid_integral() - 1.0)
                                      : std::abs(g.trapezoid_integral());
      summary["grids"].push_back(entry);
    }
    summary["bound_denominator"] = result.bound_denominator;
    summary["route_rel_sup_err"] = result.route_rel_sup_err;
    summary["route_ok"] = result.route_ok;
    summary["herglotz_ok"] = result.herglotz_ok;
    summary["herglotz_checks"] = result.herglotz_checks;
    summary["supnorm"] = nlohmann::json::array();
    for (const auto& v : result.supnorm) {
      nlohmann::json s;
      s["k"] = v.report.k;
      s["lambdas"] = v.report.lambdas;
      s["sup_norms"] = v.report.sup_norms;
      s["variation"] = v.report.variation;
      s["variation_ok"] = v.variation_ok;
      s["no_increasing_trend"] = v.report.no_increasing_trend;
      s["implied_constant"] = v.report.implied_constant;
      summary["supnorm"].push_back(s);
    }
    summary["wegner"] = nlohmann::json::array();
    for (const auto& w : result.wegner) {
      nlohmann::json row;
      row["lambda"] = w.lambda;
      row["sup_g"] = w.sup_g;
      row["wegner_scale"] = w.wegner;
      summary["wegner"].push_back(row);
    }
    summary["all_pass"] = result.all_pass();
    const std::string path = dir + "/dos_summary.json";
    write_text_file(path, summary.dump(2) + "\n");
    written.push_back(path);
  }
  return written;
}

inline std::vector<std::string> emit_fourier_report(const FourierRunResult& result,
                                                    const ExperimentConfig& config,
                                                    const std::string& dir) {
  ensure_directory(dir);
  std::vector<std::string> written;
  {
    CsvBuilder csv({"t", "re", "im", "abs", "lambda", "n_realizations", "seed"});
    for (int i = 0; i < result.chf.t.size(); ++i)
      csv.append_row({format_full(result.chf.t[i]), format_full(result.chf.values[i].real()),
                      format_full(result.chf.values[i].imag()),
                      format_full(std::abs(result.chf.values[i])),
                      format_full(result.chf.lambda),
                      std::to_string(result.chf.n_realizations),
                      std::to_string(result.chf.seed)});
    const std::string path = dir + "/char_function.csv";
    write_text_file(path, csv.str());
    written.push_back(path);
  }
  {
    nlohmann::json summary;
    summary["experiment"] = "fourier";
    summary["m"] = config.m;
    summary["ssd"] = detail::ssd_summary(config.build_ssd());
    summary["noise_floor"] = result.noise_floor;
    const auto profile_json = [](const DecayProfile& p) {
      nlohmann::json j;
      j["window_lo"] = p.window_lo;
      j["window_hi"] = p.window_hi;
      j["valid_t_max"] = p.valid_t_max;
      j["points_used"] = p.points_used;
      j["window_valid"] = p.window_valid;
      j["sup_scaled"] = p.sup_scaled;
      j["loglog_slope"] = p.loglog.slope;
      j["loglog_slope_ci95"] = p.loglog.slope_ci95();
      j["decay_steep_enough"] = p.decay_steep_enough;
      return j;
    };
    summary["ensemble_profile"] = profile_json(result.ensemble_profile);
    summary["toy_profile"] = profile_json(result.toy_profile);
    summary["all_pass"] = result.all_pass();
    const std::string path = dir + "/fourier_summary.json";
    write_text_file(path, summary.dump(2) + "\n");
    written.push_back(path);
  }
  return written;
}

inline std::vector<std::string> emit_fracmom_report(const FracmomResult& result,
                                                    const ExperimentConfig& config,
                                                    const std::string& dir) {
  if (result.central.empty()) throw std::invalid_argument("emit_fracmom_report: no tables");
  ensure_directory(dir);
  std::vector<std::string> written;
  {
    CsvBuilder csv({"s", "lambda", "re_z", "im_z", "r", "moment", "stderr", "shell_size"});
    const auto dump_entry = [&](const FracmomResult::PerLambda& entry) {
      for (const auto& row : entry.table.rows)
        csv.append_row({format_full(result.s), format_full(entry.lambda),
                        format_full(entry.re_z), format_full(result.im_z), std::to_string(row.r),
                        format_full(row.moment), format_full(row.std_error),
                        std::to_string(row.shell_size)});
    };
    for (const auto& entry : result.central) dump_entry(entry);
    for (const auto& entry : result.re_z_sweep) dump_entry(entry);
    const std::string path = dir + "/fracmom_rows.csv";
    write_text_file(path, csv.str());
    written.push_back(path);
  }
  {
    nlohmann::json summary;
    summary["experiment"] = "fracmom";
    summary["ssd"] = detail::ssd_summary(config.build_ssd());
    summary["s"] = result.s;
    summary["im_z"] = result.im_z;
    summary["c_fit"] = result.c_fit;
    summary["fits"] = nlohmann::json::array();
    for (std::size_t i = 0; i < result.central.size(); ++i) {
      const auto& entry = result.central[i];
      nlohmann::json f;
      f["lambda"] = entry.lambda;
      f["re_z"] = entry.re_z;
      f["rate"] = entry.fit.rate;
      f["rate_ci95"] = entry.fit.rate_ci95;
      f["prefactor"] = entry.fit.prefactor;
      f["r2"] = entry.fit.r2;
      f["localized"] = entry.fit.localized;
      f["predicted_rate"] = result.predicted_xi[i];
      summary["fits"].push_back(f);
    }
    summary["rez_envelope_rate"] = result.rez_envelope.rate;
    summary["rez_envelope_r2"] = result.rez_envelope.r2;
    summary["r2_ok"] = result.r2_ok;
    summary["increasing_ok"] = result.increasing_ok;
    summary["step_ok"] = result.step_ok;
    summary["rez_bounded_ok"] = result.rez_bounded_ok;
    summary["all_pass"] = result.all_pass();
    const std::string path = dir + "/fracmom_summary.json";
    write_text_file(path, summary.dump(2) + "\n");
    written.push_back(path);
  }
  return written;
}

}  // namespace anderson
