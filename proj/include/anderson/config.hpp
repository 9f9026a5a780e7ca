#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "anderson/graph.hpp"
#include "anderson/ssd.hpp"

namespace anderson {

// Flat `key = value` text config with '#' comments. Unknown keys are an
// error (catches typos); missing keys fall back to the built-in defaults.
class KeyValueConfig {
 public:
  static KeyValueConfig parse_string(const std::string& text) {
    KeyValueConfig config;
    std::istringstream stream(text);
    std::string line;
    int line_no = 0;
    while (std::getline(stream, line)) {
      ++line_no;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      const std::string trimmed = trim(line);
      if (trimmed.empty()) continue;
      const auto eq = trimmed.find('=');
      if (eq == std::string::npos)
        throw std::invalid_argument("config line " + std::to_string(line_no) + ": expected key = value");
      const std::string key = trim(trimmed.substr(0, eq));
      const std::string value = trim(trimmed.substr(eq + 1));
      if (key.empty()) throw std::invalid_argument("config line " + std::to_string(line_no) + ": empty key");
      config.values_[key] = value;
    }
    return config;
  }

  static KeyValueConfig parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_string(buffer.str());
  }

  bool has(const std::string& key) const { return values_.count(key) > 0; }

  std::string get_string(const std::string& key, const std::string& fallback) const {
    consumed_.insert(key);
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
  }

  double get_double(const std::string& key, double fallback) const {
    consumed_.insert(key);
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    return parse_double(it->second, key);
  }

  int get_int(const std::string& key, int fallback) const {
    const double v = get_double(key, static_cast<double>(fallback));
    if (v != std::floor(v)) throw std::invalid_argument("config key " + key + ": expected an integer");
    return static_cast<int>(v);
  }

  std::uint64_t get_uint64(const std::string& key, std::uint64_t fallback) const {
    consumed_.insert(key);
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    try {
      return std::stoull(it->second);
    } catch (...) {
      throw std::invalid_argument("config key " + key + ": expected an unsigned integer");
    }
  }

  std::vector<double> get_double_list(const std::string& key, std::vector<double> fallback) const {
    consumed_.insert(key);
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    std::vector<double> out;
    for (const std::string& item : split(it->second, ',')) out.push_back(parse_double(item, key));
    return out;
  }

  std::vector<int> get_int_list(const std::string& key, std::vector<int> fallback) const {
    std::vector<double> values = get_double_list(key, {});
    if (values.empty() && !has(key)) return fallback;
    std::vector<int> out;
    for (double v : values) {
      if (v != std::floor(v)) throw std::invalid_argument("config key " + key + ": expected integers");
      out.push_back(static_cast<int>(v));
    }
    return out;
  }

  // "l1:l2, l1:l2, ..." pairs
  std::vector<std::pair<double, double>> get_pair_list(
      const std::string& key, std::vector<std::pair<double, double>> fallback) const {
    consumed_.insert(key);
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    std::vector<std::pair<double, double>> out;
    for (const std::string& item : split(it->second, ',')) {
      const auto colon = item.find(':');
      if (colon == std::string::npos)
        throw std::invalid_argument("config key " + key + ": expected l1:l2 pairs");
      out.emplace_back(parse_double(item.substr(0, colon), key),
                       parse_double(item.substr(colon + 1), key));
    }
    return out;
  }

  void ensure_all_consumed() const {
    for (const auto& [key, value] : values_)
      if (!consumed_.count(key)) throw std::invalid_argument("config: unknown key '" + key + "'");
  }

 private:
  static std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
  }

  static std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream stream(s);
    while (std::getline(stream, item, sep)) {
      const std::string t = trim(item);
      if (!t.empty()) out.push_back(t);
    }
    return out;
  }

  static double parse_double(const std::string& s, const std::string& key) {
    try {
      std::size_t used = 0;
      const double v = std::stod(s, &used);
      if (used != trim(s).size() && used != s.size())
        throw std::invalid_argument("trailing characters");
      return v;
    } catch (...) {
      throw std::invalid_argument("config key " + key + ": cannot parse number '" + s + "'");
    }
  }

  std::map<std::string, std::string> values_;
  mutable std::set<std::string> consumed_;
};

// Everything an experiment run needs, with defaults for the desk-scale
// headline setup: 1-D chain of 1001 sites, m = 6 bump on [-1, 1],
// lambda window [16, 32], 400 realizations, 8 log-spaced pairs.
struct ExperimentConfig {
  // graph
  std::string graph_kind = "zd_box";
  int dim = 1;
  int side = 1001;
  int connectivity = 2;
  int depth = 9;
  // single-site density
  int m = 6;
  double a = -1.0;
  double b = 1.0;
  // disorder window and pair schedule
  double lambda0 = 16.0;
  double lambda0_tilde = 32.0;
  std::vector<std::pair<double, double>> lambda_pairs;  // empty: derived below
  double pair_gap_min_frac = 0.01;  // of lambda0
  double pair_gap_max_frac = 0.5;
  int n_pairs = 8;
  // orders and ensemble
  std::vector<int> k_orders = {0, 1, 2};
  int n_realizations = 400;
  std::uint64_t master_seed = 20270831;
  // grids and smoothing
  int n_grid = 512;
  double grid_extension = 0.05;
  double smoothing_factor = 4.0;
  int smoothing_levels = 4;
  // t grid
  double t_max_factor = 4.0;
  double dt_denominator = 8.0;
  // fit gates
  double slope_tolerance = 0.15;
  double r2_min = 0.85;
  double kr_slope_min = 0.4;  // 0.5 - 0.1
  // density-of-states run
  std::vector<double> dos_lambdas = {16.0, 20.0, 24.0, 28.0, 32.0};
  double supnorm_variation_max = 0.20;
  double route_agreement_tol = 0.05;
  // fractional moments
  double s_exponent = 0.5;
  std::vector<double> fracmom_lambdas = {16.0, 32.0, 64.0};
  double im_z = 1e-3;
  int re_z_points = 5;
  double decay_t_max = 1.0;
  int r_max = 24;
  double fracmom_r2_min = 0.9;
  int fit_r_min = 2;  // drop the short-distance transient from decay fits
  // execution
  int threads = 0;  // 0: hardware concurrency
  std::string out_dir = "out";

  static ExperimentConfig from_kv(const KeyValueConfig& kv) {
    ExperimentConfig c;
    c.graph_kind = kv.get_string("graph", c.graph_kind);
    c.dim = kv.get_int("dim", c.dim);
    c.side = kv.get_int("side", c.side);
    c.connectivity = kv.get_int("connectivity", c.connectivity);
    c.depth = kv.get_int("depth", c.depth);
    c.m = kv.get_int("m", c.m);
    c.a = kv.get_double("a", c.a);
    c.b = kv.get_double("b", c.b);
    c.lambda0 = kv.get_double("lambda0", c.lambda0);
    c.lambda0_tilde = kv.get_double("lambda0_tilde", c.lambda0_tilde);
    c.lambda_pairs = kv.get_pair_list("lambda_pairs", {});
    c.pair_gap_min_frac = kv.get_double("pair_gap_min_frac", c.pair_gap_min_frac);
    c.pair_gap_max_frac = kv.get_double("pair_gap_max_frac", c.pair_gap_max_frac);
    c.n_pairs = kv.get_int("n_pairs", c.n_pairs);
    c.k_orders = kv.get_int_list("k_orders", c.k_orders);
    c.n_realizations = kv.get_int("n_realizations", c.n_realizations);
    c.master_seed = kv.get_uint64("master_seed", c.master_seed);
    c.n_grid = kv.get_int("n_grid", c.n_grid);
    c.grid_extension = kv.get_double("grid_extension", c.grid_extension);
    c.smoothing_factor = kv.get_double("smoothing_factor", c.smoothing_factor);
    c.smoothing_levels = kv.get_int("smoothing_levels", c.smoothing_levels);
    c.t_max_factor = kv.get_double("t_max_factor", c.t_max_factor);
    c.dt_denominator = kv.get_double("dt_denominator", c.dt_denominator);
    c.slope_tolerance = kv.get_double("slope_tolerance", c.slope_tolerance);
    c.r2_min = kv.get_double("r2_min", c.r2_min);
    c.kr_slope_min = kv.get_double("kr_slope_min", c.kr_slope_min);
    c.dos_lambdas = kv.get_double_list("dos_lambdas", c.dos_lambdas);
    c.supnorm_variation_max = kv.get_double("supnorm_variation_max", c.supnorm_variation_max);
    c.route_agreement_tol = kv.get_double("route_agreement_tol", c.route_agreement_tol);
    c.s_exponent = kv.get_double("s_exponent", c.s_exponent);
    c.fracmom_lambdas = kv.get_double_list("fracmom_lambdas", c.fracmom_lambdas);
    c.im_z = kv.get_double("im_z", c.im_z);
    c.re_z_points = kv.get_int("re_z_points", c.re_z_points);
    c.decay_t_max = kv.get_double("decay_t_max", c.decay_t_max);
    c.r_max = kv.get_int("r_max", c.r_max);
    c.fracmom_r2_min = kv.get_double("fracmom_r2_min", c.fracmom_r2_min);
    c.fit_r_min = kv.get_int("fit_r_min", c.fit_r_min);
    c.threads = kv.get_int("threads", c.threads);
    c.out_dir = kv.get_string("out_dir", c.out_dir);
    kv.ensure_all_consumed();
    return c;
  }

  static ExperimentConfig from_file(const std::string& path) {
    return from_kv(KeyValueConfig::parse_file(path));
  }

  GraphSpec build_graph() const {
    if (graph_kind == "zd_box") return build_box(dim, side);
    if (graph_kind == "bethe") return build_bethe(connectivity, depth);
    throw std::invalid_argument("config: graph must be 'zd_box' or 'bethe'");
  }

  Ssd build_ssd() const { return make_bump_ssd(m, a, b); }

  // Pair schedule: lambda0 coupled against lambda0 + gap with gaps spaced
  // logarithmically in [gap_min_frac, gap_max_frac] * lambda0.
  std::vector<std::pair<double, double>> pair_schedule() const {
    if (!lambda_pairs.empty()) return lambda_pairs;
    std::vector<std::pair<double, double>> pairs;
    const double lo = pair_gap_min_frac * lambda0;
    const double hi = pair_gap_max_frac * lambda0;
    for (int i = 0; i < n_pairs; ++i) {
      const double f = n_pairs > 1 ? static_cast<double>(i) / (n_pairs - 1) : 0.0;
      pairs.emplace_back(lambda0, lambda0 + lo * std::pow(hi / lo, f));
    }
    return pairs;
  }

  void validate_continuity() const {
    if (!(lambda0 < lambda0_tilde)) throw std::invalid_argument("config: requires lambda0 < lambda0_tilde");
    if (n_realizations < 100)
      throw std::invalid_argument("config: statistical runs need n_realizations >= 100");
    for (int k : k_orders)
      if (k < 0 || k >= m - 2)
        throw std::invalid_argument("config: continuity orders require 0 <= k < m-2");
    for (const auto& [l1, l2] : pair_schedule()) {
      if (l1 < lambda0 || l1 > lambda0_tilde || l2 < lambda0 || l2 > lambda0_tilde)
        throw std::invalid_argument("config: lambda pair outside [lambda0, lambda0_tilde]");
    }
    if (pair_schedule().empty()) throw std::invalid_argument("config: empty pair schedule");
  }
};

}  // namespace anderson
