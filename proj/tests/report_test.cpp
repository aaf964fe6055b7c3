#include "sortition/report.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "oracles.hpp"
#include "sortition/error.hpp"

namespace {

using sortition::Instance;
using sortition::SolveConfig;

SolveConfig with(const std::string& spec) {
  SolveConfig cfg;
  cfg.objective = sortition::EqualityObjective::parse(spec);
  return cfg;
}

TEST(Report, E2RatioTable) {
  const Instance e2 = oracle::load_fixture("e2", 4);
  const auto t = sortition::table_maxes_mins(e2, {"goldilocks:1"}, SolveConfig{});
  ASSERT_EQ(t.rows.size(), 3u);
  EXPECT_EQ(t.rows[0].objective, "maximin");
  EXPECT_NEAR(t.rows[0].ratio_min, 1.0, 1e-6);
  EXPECT_NEAR(t.rows[0].ratio_max, 1.5, 1e-6);
  EXPECT_NEAR(t.rows[1].ratio_min, 2.0 / 3, 1e-6);
  EXPECT_NEAR(t.rows[1].ratio_max, 1.0, 1e-6);
  EXPECT_NEAR(t.rows[2].ratio_min, std::sqrt(3.0) / 2, 1e-4);
  EXPECT_NEAR(t.rows[2].ratio_max, 3 * std::sqrt(3.0) / 4, 1e-4);
  const std::string csv = sortition::ratio_table_csv(t);
  EXPECT_NE(csv.find("goldilocks:1,0.288675,0.866025,0.866025,1.299038"), std::string::npos) << csv;
}

TEST(Report, UniformFeasibleTableIsAllOnes) {
  const Instance t1 = oracle::load_fixture("t1", 2);
  const auto t = sortition::table_maxes_mins(t1, {"goldilocks:1", "nash", "leximin"}, SolveConfig{});
  for (const auto& row : t.rows) {
    EXPECT_NEAR(row.ratio_min, 1.0, 1e-6) << row.objective;
    EXPECT_NEAR(row.ratio_max, 1.0, 1e-6) << row.objective;
  }
}

TEST(Report, FeatureDropSweep) {
  const Instance e2 = oracle::load_fixture("e2", 4);
  const auto rows = sortition::feature_drop_sweep(e2, {"goldilocks:1"}, 2, SolveConfig{});
  ASSERT_EQ(rows.size(), 9u);
  for (const auto& r : rows) {
    if (r.drops == 2) {
      EXPECT_NEAR(r.min, 0.5, 1e-6);
      EXPECT_NEAR(r.max, 0.5, 1e-6);
    }
    EXPECT_LE(r.min, r.min_opt + 1e-6);
    EXPECT_GE(r.max, r.max_opt - 1e-6);
  }
  EXPECT_THROW(sortition::feature_drop_sweep(e2, {}, 3, SolveConfig{}), sortition::Error);
}

// Property: baseline envelope widens toward k/n as quotas are dropped.
TEST(ReportProperty, DropMonotonicity) {
  for (std::uint64_t seed = 1; seed <= 15; ++seed) {
    const Instance inst = oracle::random_instance(seed, {.max_features = 3});
    const int nf = inst.scheme().num_features();
    const auto rows = sortition::feature_drop_sweep(inst, {"goldilocks:1"}, nf, SolveConfig{});
    double prev_min = -1.0;
    double prev_max = 2.0;
    for (const auto& r : rows) {
      if (r.objective != "maximin") continue;
      EXPECT_GE(r.min_opt, prev_min - 1e-6) << "seed " << seed;
      EXPECT_LE(r.max_opt, prev_max + 1e-6) << "seed " << seed;
      prev_min = r.min_opt;
      prev_max = r.max_opt;
    }
    for (const auto& r : rows) {
      EXPECT_LE(r.min, r.min_opt + 1e-6);
      EXPECT_GE(r.max, r.max_opt - 1e-6);
    }
  }
}

TEST(Report, RoundingReportOnT1) {
  const Instance t1 = oracle::load_fixture("t1", 2);
  const auto s = sortition::rounding_report(t1, with("goldilocks:1"), 1000, 1000, 42);
  EXPECT_NEAR(s.mean_min, 0.5, 1e-9);
  EXPECT_NEAR(s.mean_max, 0.5, 1e-9);
  EXPECT_LE(s.std_min, 0.0015);
  EXPECT_NEAR(s.b1, 0.002, 1e-15);
  EXPECT_THROW(sortition::rounding_report(t1, with("maximin"), 1000, 0, 42), sortition::Error);
}

TEST(Report, RoundingReportOnE2) {
  const Instance e2 = oracle::load_fixture("e2", 4);
  const auto s = sortition::rounding_report(e2, with("goldilocks:1"), 1000, 1000, 7);
  EXPECT_LE(s.std_min, 0.0015);
  EXPECT_LE(s.std_max, 0.0015);
  for (int i = 0; i < e2.n(); ++i) {
    EXPECT_NEAR(s.mean_pi[i], s.pi[i], 3 * s.std_err[i] + 1e-12) << e2.agent(i).id;
  }
}

TEST(Report, RunRecordValidates) {
  const Instance e2 = oracle::load_fixture("e2", 4);
  auto r = sortition::solve(e2, with("goldilocks:1"));
  const auto rec = sortition::make_run_record("e2", e2, r, 0.01);
  EXPECT_EQ(rec.w_count, 4);
  EXPECT_EQ(rec.n_min, 1);
  EXPECT_NEAR(rec.min, std::sqrt(3.0) / 6, 1e-5);
  EXPECT_LE(rec.min, 0.5 + 1e-9);
  EXPECT_GE(rec.max, 0.5 - 1e-9);
  r.pi.pi[0] += 0.1;
  EXPECT_THROW(sortition::make_run_record("bad", e2, r, 0.01), sortition::Error);
  r.pi.pi[0] -= 0.1;
  r.pi.pi[2] += 0.05;
  r.pi.pi[3] -= 0.05;
  EXPECT_THROW(sortition::make_run_record("bad", e2, r, 0.01), sortition::Error);
}

TEST(Report, Formatting) {
  EXPECT_EQ(sortition::format_real(1.0 / 3), "0.333333");
  EXPECT_EQ(sortition::format_real(std::nan("")), "NaN");
  EXPECT_EQ(sortition::format_real(-1e-12), "0.000000");
  EXPECT_TRUE(sortition::json_real(std::numeric_limits<double>::quiet_NaN()).is_null());
  EXPECT_EQ(sortition::json_real(2.0 / 3).get<double>(), 0.666667);
  const std::string csv = sortition::run_records_csv({});
  EXPECT_EQ(csv, "label,objective,n,k,w_count,n_min,min,max,gini,objective_value,converged,wall_ms\n");
}

TEST(Report, ManipCsv) {
  const Instance e1 = oracle::load_fixture("e1", 3);
  sortition::ExhaustiveOptions o;
  o.strict = false;
  const auto r = sortition::manip_metric_exhaustive(e1, with("maximin"), 1, sortition::ManipMetric::kExt, o);
  const std::string csv = sortition::manip_csv(e1, {{r, 1, 1}});
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "metric,c,search,value,witness_coalition,witness_vectors,copies");
  EXPECT_NE(csv.find("ext,1,exhaustive,0.166667,b,1,1"), std::string::npos) << csv;
}

}  // namespace
