// Batch driver for the Anderson-ensemble experiments. Each subcommand loads
// a key=value config (defaults are the headline desk-scale setup), runs one
// experiment, writes CSV/JSON reports into --out, and exits 0 only if every
// enabled assertion passed.

#include <complex>
#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "anderson/experiment.hpp"

namespace {

using namespace anderson;

struct CommonOptions {
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int threads = -1;
};

ExperimentConfig load_config(const CommonOptions& opts) {
  ExperimentConfig config = opts.config_path.empty()
                                ? ExperimentConfig{}
                                : ExperimentConfig::from_file(opts.config_path);
  if (opts.seed_set) config.master_seed = opts.seed;
  if (!opts.out_dir.empty()) config.out_dir = opts.out_dir;
  if (opts.threads >= 0) config.threads = opts.threads;
  return config;
}

void add_common(CLI::App* cmd, CommonOptions& opts) {
  cmd->add_option("--config", opts.config_path, "key = value config file");
  cmd->add_option("--out", opts.out_dir, "output directory (overrides config)");
  cmd->add_option("--seed", opts.seed, "master seed (overrides config)")
      ->each([&opts](const std::string&) { opts.seed_set = true; });
  cmd->add_option("--threads", opts.threads, "worker threads, 0 = all cores");
}

void print_written(const std::vector<std::string>& files) {
  for (const auto& f : files) std::printf("wrote %s\n", f.c_str());
}

int run_continuity(const CommonOptions& opts) {
  ExperimentConfig config = load_config(opts);
  EnsembleCache cache;
  ContinuityResult result = run_continuity_experiment(config, &cache);
  print_written(emit_continuity_report(result, config, config.out_dir));

  std::printf("duhamel bound: %s (worst ratio %.6g)\n",
              result.duhamel_all_pass ? "PASS" : "FAIL",
              [&] {
                double worst = 0;
                for (const auto& p : result.pairs) worst = std::max(worst, p.duhamel.max_ratio);
                return worst;
              }());
  for (const auto& fit : result.fits)
    std::printf("k=%d: alpha=%.4f (>= %.4f - %.2f), R2=%.4f, D_hat=%.4g, D_ratio=%.2f -> %s\n",
                fit.k, fit.alpha_hat, fit.theoretical_exponent, config.slope_tolerance,
                fit.loglog.r2, fit.d_hat, fit.d_ratio, fit.pass() ? "PASS" : "FAIL");
  return result.all_pass() ? 0 : 1;
}

int run_kr(const CommonOptions& opts) {
  ExperimentConfig config = load_config(opts);
  KrResult result = run_kr_experiment(config);
  print_written(emit_kr_report(result, config, config.out_dir));
  std::printf("kr equality: %s, ids slope=%.4f (>= %.2f): %s, c_hat=%.4g\n",
              result.kr_equality_ok ? "PASS" : "FAIL", result.loglog.slope, config.kr_slope_min,
              result.slope_ok ? "PASS" : "FAIL", result.c_hat);
  return result.all_pass() ? 0 : 1;
}

int run_dos(const CommonOptions& opts) {
  ExperimentConfig config = load_config(opts);
  DosRunResult result = run_dos_experiment(config);
  print_written(emit_dos_report(result, config, config.out_dir));
  std::printf("herglotz: %s (%d sweeps), route agreement: %.4f (<= %.2f): %s\n",
              result.herglotz_ok ? "PASS" : "FAIL", result.herglotz_checks,
              result.route_rel_sup_err, config.route_agreement_tol,
              result.route_ok ? "PASS" : "FAIL");
  for (const auto& v : result.supnorm)
    std::printf("supnorm k=%d: variation=%.4f (<= %.2f): %s, trend: %s, C_hat=%.4g\n",
                v.report.k, v.report.variation, config.supnorm_variation_max,
                v.variation_ok ? "PASS" : "FAIL",
                v.report.no_increasing_trend ? "PASS" : "FAIL", v.report.implied_constant);
  return result.all_pass() ? 0 : 1;
}

int run_fourier(const CommonOptions& opts) {
  ExperimentConfig config = load_config(opts);
  FourierRunResult result = run_fourier_experiment(config);
  print_written(emit_fourier_report(result, config, config.out_dir));
  std::printf("toy bump: slope=%.3f, sup|t|^%d|rho_hat|=%.4g: %s\n",
              result.toy_profile.loglog.slope, config.m + 1, result.toy_sup_scaled,
              result.toy_profile.decay_steep_enough && result.toy_profile.window_valid ? "PASS"
                                                                                       : "FAIL");
  std::printf("ensemble: slope=%.3f (<= %.2f), valid window to t=%.3f, floor=%.4g: %s\n",
              result.ensemble_profile.loglog.slope, -(config.m - 1) + 0.5,
              result.ensemble_profile.valid_t_max, result.noise_floor,
              result.ensemble_profile.decay_steep_enough && result.ensemble_profile.window_valid
                  ? "PASS"
                  : "FAIL");
  return result.all_pass() ? 0 : 1;
}

int run_fracmom(const CommonOptions& opts) {
  ExperimentConfig config = load_config(opts);
  FracmomResult result = run_fracmom_experiment(config);
  print_written(emit_fracmom_report(result, config, config.out_dir));
  for (std::size_t i = 0; i < result.central.size(); ++i)
    std::printf("lambda=%g: xi=%.4f +- %.4f, R2=%.5f, formula xi=%.4f\n",
                result.central[i].lambda, result.central[i].fit.rate,
                result.central[i].fit.rate_ci95, result.central[i].fit.r2,
                result.predicted_xi[i]);
  std::printf("R2 >= %.2f: %s, increasing: %s, step s*ln(ratio): %s, Re-z envelope: %s\n",
              config.fracmom_r2_min, result.r2_ok ? "PASS" : "FAIL",
              result.increasing_ok ? "PASS" : "FAIL", result.step_ok ? "PASS" : "FAIL",
              result.rez_bounded_ok ? "PASS" : "FAIL");
  return result.all_pass() ? 0 : 1;
}

int run_duhamel_check(std::uint64_t seed, int pairs, int size, int n_quad,
                      const std::vector<double>& ts) {
  RandomStream stream(seed);
  double worst = 0.0;
  bool pass = true;
  for (int p = 0; p < pairs; ++p) {
    Eigen::MatrixXd a(size, size), b(size, size);
    for (int i = 0; i < size; ++i)
      for (int j = 0; j <= i; ++j) {
        a(i, j) = a(j, i) = stream.uniform(-1, 1);
        b(i, j) = b(j, i) = stream.uniform(-1, 1);
      }
    for (double t : ts) {
      const double res = duhamel_identity_check(a, b, t, n_quad);
      worst = std::max(worst, res);
      if (!(res <= 1e-10)) pass = false;
    }
  }
  std::printf("duhamel identity: %d pairs x %zu times, n_quad=%d, worst residual %.3g: %s\n",
              pairs, ts.size(), n_quad, worst, pass ? "PASS" : "FAIL");
  return pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical laboratory for Anderson tight-binding disorder ensembles"};
  app.require_subcommand(1);

  CommonOptions continuity_opts, kr_opts, dos_opts, fourier_opts, fracmom_opts;
  add_common(app.add_subcommand("continuity",
                                "Holder continuity of IDS derivatives in the disorder"),
             continuity_opts);
  add_common(app.add_subcommand("kr", "IDS sup-difference vs Kantorovich-Rubinstein distance"),
             kr_opts);
  add_common(app.add_subcommand("dos", "DOS grids, sup-norm report, estimator route agreement"),
             dos_opts);
  add_common(app.add_subcommand("fourier", "characteristic-function decay profile"),
             fourier_opts);
  add_common(app.add_subcommand("fracmom", "fractional-moment localization rates"),
             fracmom_opts);

  std::uint64_t dc_seed = 1;
  int dc_pairs = 20, dc_size = 8, dc_nquad = 32;
  std::vector<double> dc_times{0.5, 1.0, 2.0};
  CLI::App* dc = app.add_subcommand("duhamel-check", "matrix-level Duhamel identity residuals");
  dc->add_option("--seed", dc_seed, "stream seed for the random matrix pairs");
  dc->add_option("--pairs", dc_pairs, "number of random symmetric pairs");
  dc->add_option("--size", dc_size, "matrix dimension");
  dc->add_option("--nquad", dc_nquad, "Gauss-Legendre node count");
  dc->add_option("--t", dc_times, "evolution times");

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand("continuity")) return run_continuity(continuity_opts);
    if (app.got_subcommand("kr")) return run_kr(kr_opts);
    if (app.got_subcommand("dos")) return run_dos(dos_opts);
    if (app.got_subcommand("fourier")) return run_fourier(fourier_opts);
    if (app.got_subcommand("fracmom")) return run_fracmom(fracmom_opts);
    if (app.got_subcommand("duhamel-check"))
      return run_duhamel_check(dc_seed, dc_pairs, dc_size, dc_nquad, dc_times);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 2;
}
