#include <gtest/gtest.h>

#include <cstdio>
#include <fstream>

#include "anderson/config.hpp"
#include "anderson/report.hpp"

namespace {

using namespace anderson;

TEST(KeyValueConfig, ParsesTypesAndComments) {
  const std::string text = R"(
# experiment setup
side = 101        # inline comment
lambda0 = 8.5
graph = bethe
k_orders = 0, 1, 2
lambda_pairs = 16:16.5, 16:18
master_seed = 987654321
)";
  KeyValueConfig kv = KeyValueConfig::parse_string(text);
  EXPECT_EQ(kv.get_int("side", 0), 101);
  EXPECT_DOUBLE_EQ(kv.get_double("lambda0", 0), 8.5);
  EXPECT_EQ(kv.get_string("graph", ""), "bethe");
  EXPECT_EQ(kv.get_int_list("k_orders", {}), (std::vector<int>{0, 1, 2}));
  const auto pairs = kv.get_pair_list("lambda_pairs", {});
  ASSERT_EQ(pairs.size(), 2u);
  EXPECT_DOUBLE_EQ(pairs[1].second, 18.0);
  EXPECT_EQ(kv.get_uint64("master_seed", 0), 987654321ull);
  EXPECT_NO_THROW(kv.ensure_all_consumed());
}

TEST(KeyValueConfig, Rejections) {
  EXPECT_THROW(KeyValueConfig::parse_string("side 101"), std::invalid_argument);
  EXPECT_THROW(KeyValueConfig::parse_string("= 3"), std::invalid_argument);
  KeyValueConfig kv = KeyValueConfig::parse_string("side = abc");
  EXPECT_THROW(kv.get_int("side", 0), std::invalid_argument);
  KeyValueConfig frac = KeyValueConfig::parse_string("side = 3.5");
  EXPECT_THROW(frac.get_int("side", 0), std::invalid_argument);
  KeyValueConfig unknown = KeyValueConfig::parse_string("sied = 3");
  unknown.get_int("side", 0);
  EXPECT_THROW(unknown.ensure_all_consumed(), std::invalid_argument);
  KeyValueConfig badpair = KeyValueConfig::parse_string("lambda_pairs = 16-17");
  EXPECT_THROW(badpair.get_pair_list("lambda_pairs", {}), std::invalid_argument);
}

TEST(ExperimentConfig, DefaultsMatchHeadlineSetup) {
  ExperimentConfig c = ExperimentConfig::from_kv(KeyValueConfig::parse_string(""));
  EXPECT_EQ(c.side, 1001);
  EXPECT_EQ(c.m, 6);
  EXPECT_DOUBLE_EQ(c.lambda0, 16.0);
  EXPECT_DOUBLE_EQ(c.lambda0_tilde, 32.0);
  EXPECT_EQ(c.n_realizations, 400);
  EXPECT_EQ(c.k_orders, (std::vector<int>{0, 1, 2}));
  EXPECT_EQ(c.n_grid, 512);
  EXPECT_NO_THROW(c.validate_continuity());
}

TEST(ExperimentConfig, UnknownKeyRejected) {
  EXPECT_THROW(ExperimentConfig::from_kv(KeyValueConfig::parse_string("sid = 11")),
               std::invalid_argument);
}

TEST(ExperimentConfig, PairScheduleLogSpacedWithinWindow) {
  ExperimentConfig c;
  const auto pairs = c.pair_schedule();
  ASSERT_EQ(pairs.size(), 8u);
  EXPECT_NEAR(pairs.front().second - pairs.front().first, 0.01 * 16.0, 1e-12);
  EXPECT_NEAR(pairs.back().second - pairs.back().first, 0.5 * 16.0, 1e-12);
  // log spacing: constant gap ratio
  const double ratio0 = (pairs[1].second - pairs[1].first) / (pairs[0].second - pairs[0].first);
  for (std::size_t i = 1; i + 1 < pairs.size(); ++i) {
    const double r = (pairs[i + 1].second - pairs[i + 1].first) /
                     (pairs[i].second - pairs[i].first);
    EXPECT_NEAR(r, ratio0, 1e-9);
  }
  for (const auto& [l1, l2] : pairs) {
    EXPECT_GE(l1, c.lambda0);
    EXPECT_LE(l2, c.lambda0_tilde);
  }
}

TEST(ExperimentConfig, ContinuityValidation) {
  ExperimentConfig c;
  c.k_orders = {0, 4};  // k = 4 >= m - 2 with m = 6
  EXPECT_THROW(c.validate_continuity(), std::invalid_argument);

  ExperimentConfig small;
  small.n_realizations = 50;
  EXPECT_THROW(small.validate_continuity(), std::invalid_argument);

  ExperimentConfig outside;
  outside.lambda_pairs = {{16.0, 40.0}};  // above lambda0_tilde
  EXPECT_THROW(outside.validate_continuity(), std::invalid_argument);

  ExperimentConfig inverted;
  inverted.lambda0_tilde = 8.0;
  EXPECT_THROW(inverted.validate_continuity(), std::invalid_argument);
}

TEST(ExperimentConfig, FromFileRoundTrip) {
  const std::string path = "config_test_tmp.cfg";
  write_text_file(path, "side = 11\nn_realizations = 128\nmaster_seed = 31\n");
  ExperimentConfig c = ExperimentConfig::from_file(path);
  EXPECT_EQ(c.side, 11);
  EXPECT_EQ(c.n_realizations, 128);
  EXPECT_EQ(c.master_seed, 31u);
  std::remove(path.c_str());
  EXPECT_THROW(ExperimentConfig::from_file("does_not_exist.cfg"), std::runtime_error);
}

TEST(ExperimentConfig, BuildsGraphAndSsd) {
  ExperimentConfig c;
  c.graph_kind = "bethe";
  c.connectivity = 3;
  c.depth = 2;
  GraphSpec g = c.build_graph();
  EXPECT_EQ(g.kind, GraphKind::bethe);
  EXPECT_EQ(g.vertex_count, 1 + 4 * (9 - 1) / 2);
  c.graph_kind = "triangular";
  EXPECT_THROW(c.build_graph(), std::invalid_argument);
  Ssd ssd = c.build_ssd();
  EXPECT_EQ(ssd.smoothness(), 6);
}

TEST(Report, FullPrecisionRoundTrip) {
  const double values[] = {0.1, 1.0 / 3.0, 6.02214076e23, -1.7976931348623157e308, 2.2e-308};
  for (double v : values) {
    const std::string s = format_full(v);
    EXPECT_EQ(std::strtod(s.c_str(), nullptr), v) << s;
  }
}

TEST(Report, CsvWriteAndRead) {
  const std::string path = "report_test_tmp.csv";
  CsvBuilder csv({"x", "y"});
  csv.append_row({format_full(1.5), format_full(2.5)});
  csv.append_row({format_full(-0.25), format_full(1e-17)});
  write_text_file(path, csv.str());
  CsvTable table = read_csv(path);
  ASSERT_EQ(table.rows.size(), 2u);
  EXPECT_EQ(table.column("y"), 1);
  EXPECT_DOUBLE_EQ(std::stod(table.rows[1][table.column("y")]), 1e-17);
  EXPECT_THROW(table.column("z"), std::invalid_argument);
  std::remove(path.c_str());
}

}  // namespace
