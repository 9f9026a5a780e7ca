// Acceptance suite: one check per numbered criterion, each printing a single
// PASS/FAIL line. Criteria sharing heavy ensembles are grouped behind the
// --only selector so the ctest entries stay independent:
//   --only 1,3,4   fast identity / KR / spectrum-support checks
//   --only 5       Herglotz + estimator route agreement
//   --only 6       sup-norm stability across the disorder grid
//   --only 7       Fourier decay
//   --only 2,8,9   coupled continuity run (Duhamel bound, Holder fits, IDS)
//   --only 10      fractional-moment rates
// Exit code 0 only if every selected criterion passed.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstring>
#include <functional>
#include <map>
#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "anderson/experiment.hpp"

namespace {

using namespace anderson;

ExperimentConfig headline_config() {
  ExperimentConfig config;  // defaults are the headline run
  config.threads = 0;
  return config;
}

// ---------------------------------------------------------------------------

bool criterion_duhamel_identity(std::string& detail) {
  RandomStream stream(7771);
  double worst = 0.0;
  bool pass = true;
  for (int p = 0; p < 20; ++p) {
    Eigen::MatrixXd a(8, 8), b(8, 8);
    for (int i = 0; i < 8; ++i)
      for (int j = 0; j <= i; ++j) {
        a(i, j) = a(j, i) = stream.uniform(-1, 1);
        b(i, j) = b(j, i) = stream.uniform(-1, 1);
      }
    for (double t : {0.5, 1.0, 2.0}) {
      const double res = duhamel_identity_check(a, b, t, 32);
      worst = std::max(worst, res);
      if (!(res <= 1e-10)) pass = false;
    }
    if (p == 0) {
      // quadrature refinement decreases the residual down to rounding
      double prev = duhamel_identity_check(a, b, 2.0, 2);
      bool hit_floor = false;
      for (int n_quad : {4, 8, 16, 32, 64}) {
        const double res = duhamel_identity_check(a, b, 2.0, n_quad);
        if (!hit_floor && !(res <= prev * 1.05 + 1e-14)) pass = false;
        if (res < 1e-13) hit_floor = true;
        prev = res;
      }
      if (!hit_floor && prev > 1e-13) pass = false;
    }
  }
  std::ostringstream out;
  out << "worst residual " << worst << " (tol 1e-10, 20 pairs, t in {0.5,1,2}, n_quad 32)";
  detail = out.str();
  return pass;
}

bool criterion_kr_distance(std::string& detail) {
  const Ssd ssd = make_bump_ssd(2, -1.0, 1.0);
  bool pass = std::abs(ssd.abs_moment() - 63.0 / 256.0) <= 1e-12;
  double worst = 0.0;
  const std::vector<std::pair<double, double>> pairs = {
      {2.0, 3.0},  {16.0, 16.16}, {16.0, 24.0}, {0.5, 4.5}, {1.0, 1.001},
      {7.0, 3.0},  {32.0, 16.0},  {0.1, 0.9},   {5.0, 50.0}, {12.0, 12.0}};
  for (const auto& [l1, l2] : pairs) {
    const double err =
        std::abs(kr_distance_scaled(ssd, l1, l2) - std::abs(l1 - l2) * ssd.abs_moment());
    worst = std::max(worst, err);
    if (!(err <= 1e-8)) pass = false;
  }
  std::ostringstream out;
  out << "E|w| err " << std::abs(ssd.abs_moment() - 63.0 / 256.0) << " (tol 1e-12), worst d_KR err "
      << worst << " (tol 1e-8, 10 pairs)";
  detail = out.str();
  return pass;
}

bool criterion_spectrum_support(std::string& detail) {
  ExperimentConfig config = headline_config();
  const GraphSpec graph = config.build_graph();
  const Ssd ssd = config.build_ssd();
  EnsembleSpec spec{graph, ssd, config.lambda0, 100, config.master_seed, config.lambda0,
                    config.lambda0_tilde};
  double worst = std::numeric_limits<double>::infinity();
  bool pass = true;
  for (int i = 0; i < spec.n_realizations; ++i) {
    const SparseOperator op =
        assemble(graph, spec.lambda, realize_disorder(spec, static_cast<std::uint64_t>(i)));
    const Eigen::VectorXd evals = tridiagonal_eigenvalues(op.diagonal(), op.off_diagonal());
    const SupportCheckResult check = spectrum_support_check(spec, evals);
    worst = std::min(worst, check.worst_margin);
    if (!check.pass) pass = false;
  }
  std::ostringstream out;
  out << "100 realizations, worst margin " << worst << " (tol -1e-10), window [-2d+la, 2d+lb]";
  detail = out.str();
  return pass;
}

bool criterion_routes(std::string& detail) {
  ExperimentConfig config = headline_config();
  config.dos_lambdas = {config.lambda0};
  // single-lambda estimator validation: the disorder window is [l0, l0], so
  // J is the actual spectrum window and its central 80% stays inside the
  // spectrum (outside the edge the two kernel shapes diverge on nothing)
  config.lambda0_tilde = config.lambda0;
  config.smoothing_factor = 12.0;
  config.route_agreement_tol = 0.05;
  const DosRunResult result = run_dos_experiment(config);
  std::ostringstream out;
  out << "herglotz " << (result.herglotz_ok ? "ok" : "VIOLATED") << " ("
      << result.herglotz_checks << " z samples x 400 realizations), route rel sup err "
      << result.route_rel_sup_err << " (tol 0.05, central 80% of J)";
  detail = out.str();
  return result.herglotz_ok && result.route_ok;
}

bool criterion_supnorm(std::string& detail) {
  ExperimentConfig config = headline_config();
  config.dos_lambdas = {16.0, 20.0, 24.0, 28.0, 32.0};
  config.smoothing_factor = 12.0;
  config.supnorm_variation_max = 0.20;
  const DosRunResult result = run_dos_experiment(config);
  bool pass = true;
  std::ostringstream out;
  for (const auto& v : result.supnorm) {
    out << "k=" << v.report.k << ": variation " << v.report.variation
        << (v.variation_ok ? " <= 0.2" : " > 0.2 VIOLATED") << ", trend "
        << (v.report.no_increasing_trend ? "not increasing" : "INCREASING") << "; ";
    if (!v.pass()) pass = false;
  }
  out << "(sup g tracks ||rho||_inf / lambda here, so flat variation is not achievable;"
      << " see README)";
  detail = out.str();
  return pass;
}

bool criterion_fourier_decay(std::string& detail) {
  ExperimentConfig config = headline_config();
  config.side = 101;
  config.m = 4;
  config.n_realizations = 10000;
  config.decay_t_max = 0.8;
  const FourierRunResult result = run_fourier_experiment(config);
  const bool toy_ok = result.toy_profile.window_valid && result.toy_profile.decay_steep_enough;
  const bool ens_ok =
      result.ensemble_profile.window_valid && result.ensemble_profile.decay_steep_enough;
  std::ostringstream out;
  out << "toy sup|t|^" << config.m + 1 << "|rho_hat| = " << result.toy_sup_scaled
      << " bounded, ensemble slope " << result.ensemble_profile.loglog.slope << " (need <= "
      << -(config.m - 1) + 0.5 << ", valid window to t=" << result.ensemble_profile.valid_t_max
      << ")";
  detail = out.str();
  return toy_ok && ens_ok;
}

// the continuity group: one coupled run feeds criteria 2, 8 and 9
struct ContinuityGroup {
  ContinuityResult continuity;
  KrResult kr;
  ExperimentConfig config;
};

const ContinuityGroup& continuity_group() {
  static std::unique_ptr<ContinuityGroup> cached;
  if (!cached) {
    cached = std::make_unique<ContinuityGroup>();
    cached->config = headline_config();
    EnsembleCache cache;
    cached->continuity = run_continuity_experiment(cached->config, &cache);
    cached->kr = run_kr_experiment(cached->config, &cache);
  }
  return *cached;
}

bool criterion_duhamel_bound(std::string& detail) {
  const ContinuityGroup& group = continuity_group();
  double worst = 0.0;
  for (const auto& p : group.continuity.pairs) worst = std::max(worst, p.duhamel.max_ratio);
  std::ostringstream out;
  out << "sup ratio |nu1-nu2| / (M gap |t|) = " << worst
      << " (hard tol 1 + 1e-10 over all pairs and grid times)";
  detail = out.str();
  return group.continuity.duhamel_all_pass;
}

bool criterion_continuity(std::string& detail) {
  const ContinuityGroup& group = continuity_group();
  bool pass = true;
  std::ostringstream out;
  for (const auto& fit : group.continuity.fits) {
    out << "k=" << fit.k << ": alpha " << fit.alpha_hat << " (need >= "
        << fit.theoretical_exponent - 0.15 << "), R2 " << fit.loglog.r2
        << " (>= 0.85), D_ratio " << fit.d_ratio << " (<= 10); ";
    if (!fit.pass()) pass = false;
  }
  detail = out.str();
  return pass;
}

bool criterion_ids_continuity(std::string& detail) {
  const ContinuityGroup& group = continuity_group();
  std::ostringstream out;
  out << "sup|N1-N2| slope " << group.kr.loglog.slope << " (need >= 0.4), KR equality "
      << (group.kr.kr_equality_ok ? "ok" : "VIOLATED");
  detail = out.str();
  return group.kr.all_pass();
}

bool criterion_fracmom(std::string& detail) {
  ExperimentConfig config = headline_config();
  config.fracmom_lambdas = {16.0, 32.0, 64.0};
  config.r_max = 24;
  const FracmomResult result = run_fracmom_experiment(config);
  std::ostringstream out;
  out << "R2: ";
  for (const auto& e : result.central) out << e.fit.r2 << " ";
  out << "(>= 0.9 " << (result.r2_ok ? "ok" : "VIOLATED") << "), increasing "
      << (result.increasing_ok ? "ok" : "VIOLATED") << ", steps ";
  for (std::size_t i = 0; i + 1 < result.central.size(); ++i)
    out << result.central[i + 1].fit.rate - result.central[i].fit.rate << " ";
  out << "vs s ln2 = " << config.s_exponent * std::log(2.0) << " +- 2CI "
      << (result.step_ok ? "ok" : "VIOLATED (finite-lambda deficit; see README)");
  detail = out.str();
  return result.all_pass();
}

struct Criterion {
  int id;
  const char* name;
  std::function<bool(std::string&)> run;
};

}  // namespace

int main(int argc, char** argv) {
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) {
      std::stringstream stream(argv[++i]);
      std::string item;
      while (std::getline(stream, item, ',')) selected.insert(std::stoi(item));
    }
  }

  const std::vector<Criterion> criteria = {
      {1, "duhamel identity residuals", criterion_duhamel_identity},
      {2, "duhamel difference bound", criterion_duhamel_bound},
      {3, "kr distance equality", criterion_kr_distance},
      {4, "spectrum support window", criterion_spectrum_support},
      {5, "herglotz + route agreement", criterion_routes},
      {6, "uniform derivative sup-norms", criterion_supnorm},
      {7, "fourier decay profile", criterion_fourier_decay},
      {8, "holder continuity exponents", criterion_continuity},
      {9, "ids continuity exponent", criterion_ids_continuity},
      {10, "fractional moment rates", criterion_fracmom},
  };

  bool all_pass = true;
  for (const auto& criterion : criteria) {
    if (!selected.empty() && !selected.count(criterion.id)) continue;
    std::string detail;
    bool ok = false;
    try {
      ok = criterion.run(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    std::printf("criterion %2d [%-30s] %s  %s\n", criterion.id, criterion.name,
                ok ? "PASS" : "FAIL", detail.c_str());
    std::fflush(stdout);
    all_pass = all_pass && ok;
  }
  return all_pass ? 0 : 1;
}
