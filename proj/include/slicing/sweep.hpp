#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "slicing/engine.hpp"

namespace slicing {

enum class SweepAxis {
  fake_rate,
  rb_count,
  ue_count,
  snr_band,
  sensing_error,
  weight_policy,
  scheme,
  attack_strategy
};

std::string_view to_string(SweepAxis axis);
/// Throws std::invalid_argument for unknown names.
SweepAxis sweep_axis_from_string(std::string_view name);

/// True for axes that only touch the attack, so one no-attack reference per
/// seed serves every value.
bool is_attack_axis(SweepAxis axis);

/// Sets `axis` to `value` in `cfg`. A sensing_error value is either one
/// probability used for both error kinds or "p_false_alarm:p_misdetect".
/// Throws std::invalid_argument naming the axis on a bad value.
void apply_axis(SimConfig& cfg, SweepAxis axis, const std::string& value);

struct SweepSpec {
  SweepAxis axis = SweepAxis::fake_rate;
  std::vector<std::string> values;
  std::vector<std::uint64_t> seeds;
  SimConfig base;

  /// Throws std::invalid_argument on empty lists or a value the axis rejects.
  void validate() const;
};

struct ResultRow {
  SweepAxis axis = SweepAxis::fake_rate;
  std::string value;
  std::uint64_t seed = 0;
  double total_reward = 0.0;
  double real_reward = 0.0;
  double fake_reward = 0.0;
  std::optional<double> ratio_percent;
  /// Total reward of the paired no-attack run.
  double reference_total = 0.0;
  double wall_seconds = 0.0;
};

/// Runs every (value, seed) pair plus the no-attack references on up to
/// `jobs` threads (0 means hardware concurrency). Rows come back value-major,
/// then seed, in the order given, whatever order the runs finish in.
/// A failing run aborts the sweep with a message naming its value and seed.
std::vector<ResultRow> run_sweep(const SweepSpec& spec, unsigned jobs = 0);

inline constexpr std::string_view kCsvHeader =
    "axis,value,seed,total_reward,real_reward,fake_reward,ratio_percent,reference_total,"
    "wall_seconds";

void write_csv_header(std::ostream& out);
void write_csv_rows(std::ostream& out, const std::vector<ResultRow>& rows);

/// Per-value medians over seeds, in first-seen value order.
struct ValueSummary {
  std::string value;
  double total_reward = 0.0;
  double real_reward = 0.0;
  double ratio_percent = 0.0;
  double reference_total = 0.0;
};
std::vector<ValueSummary> summarize(const std::vector<ResultRow>& rows);

/// Median; the mean of the middle pair for even sizes. Throws on empty input.
double median(std::vector<double> xs);

/// The sweeps behind results table 1-6 or 9, on `base`.
/// Throws std::invalid_argument for other numbers.
std::vector<SweepSpec> table_sweeps(int table, const SimConfig& base,
                                    const std::vector<std::uint64_t>& seeds);

struct TableCheck {
  std::string name;
  bool passed = false;
};

/// Checks the RDW table against uniform targets and the RDLW table against
/// 0.5 on the two largest weights.
std::vector<TableCheck> validate_tables(const AttackConfig& attack, int max_weight,
                                        double tol = 1e-9);

}  // namespace slicing
