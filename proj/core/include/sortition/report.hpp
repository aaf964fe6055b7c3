#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "sortition/adversary.hpp"
#include "sortition/model.hpp"
#include "sortition/solver.hpp"

namespace sortition {

struct RunRecord {
  std::string label;
  std::string objective;
  int n = 0;
  int k = 0;
  int w_count = 0;
  int n_min = 0;
  double min = 0.0;
  double max = 0.0;
  double gini = 0.0;
  double objective_value = 0.0;
  bool converged = false;
  double wall_ms = 0.0;
};

// Re-validates sum(pi) = k and group anonymity (within tau_anon) first; throws DOMAIN.
RunRecord make_run_record(const std::string& label, const Instance& instance,
                          const SolveResult& result, double tau_anon, double wall_ms = 0.0);

struct RatioRow {
  std::string objective;
  double min = 0.0;
  double max = 0.0;
  double ratio_min = 0.0;  // NaN when the optimal minimum is 0
  double ratio_max = 0.0;
};

struct RatioTable {
  double min_opt = 0.0;
  double max_opt = 0.0;
  std::vector<RatioRow> rows;
};

// maximin and minimax are prepended when absent; they define the normalizers.
RatioTable table_maxes_mins(const Instance& instance, const std::vector<std::string>& objectives,
                            const SolveConfig& config);

struct DropRow {
  int drops = 0;
  std::string objective;
  double min = 0.0;
  double max = 0.0;
  double min_opt = 0.0;
  double max_opt = 0.0;
};

// Drop levels 0..max_drop, each solving every objective plus both baselines.
std::vector<DropRow> feature_drop_sweep(const Instance& instance,
                                        const std::vector<std::string>& objectives, int max_drop,
                                        const SolveConfig& config);

struct RoundingSummary {
  int m = 0;
  int runs = 0;
  double mean_min = 0.0;
  double std_min = 0.0;
  double mean_max = 0.0;
  double std_max = 0.0;
  double b1 = 0.0;
  double b2 = 0.0;  // NaN when |W| < 2
  // Largest per-run |pi_bar_i - pi_i| over all runs and agents.
  double max_deviation = 0.0;
  std::vector<double> pi;
  std::vector<double> mean_pi;
  std::vector<double> std_err;
};

RoundingSummary rounding_report(const Instance& instance, const SolveResult& result, int m,
                                int runs, std::uint64_t seed);
RoundingSummary rounding_report(const Instance& instance, const SolveConfig& config, int m,
                                int runs, std::uint64_t seed);

// Six decimal places; "NaN" for non-finite values.
std::string format_real(double x);
// Rounded to six decimals; null for non-finite values.
nlohmann::ordered_json json_real(double x);

std::string run_records_csv(const std::vector<RunRecord>& records);
nlohmann::ordered_json run_records_json(const std::vector<RunRecord>& records);
std::string ratio_table_csv(const RatioTable& table);
nlohmann::ordered_json ratio_table_json(const RatioTable& table);
std::string drop_rows_csv(const std::vector<DropRow>& rows);
nlohmann::ordered_json drop_rows_json(const std::vector<DropRow>& rows);
std::string rounding_csv(const RoundingSummary& summary);
nlohmann::ordered_json rounding_json(const RoundingSummary& summary);

struct ManipRow {
  ManipReport report;
  int c = 0;
  int copies = 1;
};

// metric,c,search,value,witness_coalition,witness_vectors,copies
std::string manip_csv(const Instance& instance, const std::vector<ManipRow>& rows);
nlohmann::ordered_json manip_json(const Instance& instance, const std::vector<ManipRow>& rows);

}  // namespace sortition
