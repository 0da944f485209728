#include "slicing/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace slicing {

std::string_view to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::fake_rate: return "fake_rate";
    case SweepAxis::rb_count: return "rb_count";
    case SweepAxis::ue_count: return "ue_count";
    case SweepAxis::snr_band: return "snr_band";
    case SweepAxis::sensing_error: return "sensing_error";
    case SweepAxis::weight_policy: return "weight_policy";
    case SweepAxis::scheme: return "scheme";
    case SweepAxis::attack_strategy: return "attack_strategy";
  }
  return "?";
}

SweepAxis sweep_axis_from_string(std::string_view name) {
  for (auto axis : {SweepAxis::fake_rate, SweepAxis::rb_count, SweepAxis::ue_count,
                    SweepAxis::snr_band, SweepAxis::sensing_error, SweepAxis::weight_policy,
                    SweepAxis::scheme, SweepAxis::attack_strategy}) {
    if (to_string(axis) == name) return axis;
  }
  throw std::invalid_argument("unknown sweep axis '" + std::string(name) + "'");
}

bool is_attack_axis(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::fake_rate:
    case SweepAxis::sensing_error:
    case SweepAxis::weight_policy:
    case SweepAxis::attack_strategy: return true;
    default: return false;
  }
}

namespace {

double parse_double(const std::string& s) {
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw std::invalid_argument("trailing characters");
  return v;
}

int parse_int(const std::string& s) {
  std::size_t used = 0;
  const int v = std::stoi(s, &used);
  if (used != s.size()) throw std::invalid_argument("trailing characters");
  return v;
}

}  // namespace

void apply_axis(SimConfig& cfg, SweepAxis axis, const std::string& value) {
  try {
    switch (axis) {
      case SweepAxis::fake_rate: cfg.attack.fake_rate = parse_double(value); break;
      case SweepAxis::rb_count: cfg.link.rb_count = parse_int(value); break;
      case SweepAxis::ue_count: cfg.traffic.ue_count = parse_int(value); break;
      case SweepAxis::snr_band: cfg.traffic.snr_range = snr_band_range(snr_band_from_string(value)); break;
      case SweepAxis::sensing_error: {
        const auto colon = value.find(':');
        if (colon == std::string::npos) {
          cfg.attack.sensing.p_false_alarm = cfg.attack.sensing.p_misdetect = parse_double(value);
        } else {
          cfg.attack.sensing.p_false_alarm = parse_double(value.substr(0, colon));
          cfg.attack.sensing.p_misdetect = parse_double(value.substr(colon + 1));
        }
        break;
      }
      case SweepAxis::weight_policy: cfg.attack.weight_policy = weight_policy_from_string(value); break;
      case SweepAxis::scheme: cfg.scheme = scheme_from_string(value); break;
      case SweepAxis::attack_strategy: cfg.attack.strategy = attack_strategy_from_string(value); break;
    }
  } catch (const std::logic_error& e) {
    // std::stod and friends throw invalid_argument/out_of_range with terse texts.
    throw std::invalid_argument(std::string(to_string(axis)) + ": bad value '" + value + "' (" +
                                e.what() + ")");
  }
}

void SweepSpec::validate() const {
  if (values.empty()) throw std::invalid_argument("sweep: no values");
  if (seeds.empty()) throw std::invalid_argument("sweep: no seeds");
  for (const auto& v : values) {
    SimConfig cfg = base;
    apply_axis(cfg, axis, v);
    try {
      cfg.validate();
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument(std::string(to_string(axis)) + "=" + v + ": " + e.what());
    }
  }
}

std::vector<ResultRow> run_sweep(const SweepSpec& spec, unsigned jobs) {
  spec.validate();

  struct Job {
    Job(SimConfig c, std::string l) : cfg(std::move(c)), label(std::move(l)) {}
    SimConfig cfg;
    std::string label;
    MetricsReport report;
    double seconds = 0.0;
    std::exception_ptr error;
  };
  std::vector<Job> work;
  const std::size_t n_values = spec.values.size();
  const std::size_t n_seeds = spec.seeds.size();
  work.reserve(n_values * n_seeds * 2);

  // Attack runs first, value-major; then the references.
  for (const auto& v : spec.values) {
    for (auto seed : spec.seeds) {
      SimConfig cfg = spec.base;
      apply_axis(cfg, spec.axis, v);
      cfg.seed = seed;
      work.emplace_back(cfg, std::string(to_string(spec.axis)) + "=" + v + " seed " +
                                 std::to_string(seed));
    }
  }
  const bool shared_reference = is_attack_axis(spec.axis);
  const std::size_t n_refs = shared_reference ? n_seeds : n_values * n_seeds;
  for (std::size_t r = 0; r < n_refs; ++r) {
    SimConfig cfg = shared_reference ? spec.base : work[r].cfg;
    cfg.seed = spec.seeds[r % n_seeds];
    const std::string label = shared_reference ? "seed " + std::to_string(cfg.seed) : work[r].label;
    work.emplace_back(without_attack(cfg), "no-attack reference, " + label);
  }

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < work.size(); i = next++) {
      auto& job = work[i];
      const auto start = std::chrono::steady_clock::now();
      try {
        job.report = run(job.cfg);
      } catch (...) {
        job.error = std::current_exception();
      }
      job.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
  };
  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, work.size()));
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < jobs; ++t) pool.emplace_back(worker);
  }

  for (const auto& job : work) {
    if (!job.error) continue;
    try {
      std::rethrow_exception(job.error);
    } catch (const std::exception& e) {
      throw std::runtime_error(job.label + ": " + e.what());
    }
  }

  std::vector<ResultRow> rows;
  rows.reserve(n_values * n_seeds);
  const std::size_t ref_base = n_values * n_seeds;
  for (std::size_t i = 0; i < ref_base; ++i) {
    const auto& job = work[i];
    const auto& ref = work[ref_base + (shared_reference ? i % n_seeds : i)].report;
    ResultRow row;
    row.axis = spec.axis;
    row.value = spec.values[i / n_seeds];
    row.seed = spec.seeds[i % n_seeds];
    row.total_reward = job.report.total_reward;
    row.real_reward = job.report.real_reward;
    row.fake_reward = job.report.fake_reward;
    row.reference_total = ref.total_reward;
    if (ref.total_reward > 0.0) row.ratio_percent = compute_ratio(job.report, ref);
    row.wall_seconds = job.seconds;
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_csv_header(std::ostream& out) { out << kCsvHeader << '\n'; }

void write_csv_rows(std::ostream& out, const std::vector<ResultRow>& rows) {
  std::ostringstream line;
  line.imbue(std::locale::classic());
  line << std::setprecision(10);
  for (const auto& r : rows) {
    line.str({});
    line << to_string(r.axis) << ',' << r.value << ',' << r.seed << ',' << r.total_reward << ','
         << r.real_reward << ',' << r.fake_reward << ',';
    if (r.ratio_percent) line << *r.ratio_percent;
    line << ',' << r.reference_total << ',' << std::fixed << std::setprecision(4)
         << r.wall_seconds << std::defaultfloat << std::setprecision(10) << '\n';
    out << line.str();
  }
}

double median(std::vector<double> xs) {
  if (xs.empty()) throw std::invalid_argument("median of nothing");
  std::sort(xs.begin(), xs.end());
  const std::size_t mid = xs.size() / 2;
  return xs.size() % 2 == 1 ? xs[mid] : 0.5 * (xs[mid - 1] + xs[mid]);
}

std::vector<ValueSummary> summarize(const std::vector<ResultRow>& rows) {
  std::vector<std::string> order;
  for (const auto& r : rows) {
    if (std::find(order.begin(), order.end(), r.value) == order.end()) order.push_back(r.value);
  }
  std::vector<ValueSummary> out;
  for (const auto& v : order) {
    std::vector<double> total, real, ratio, ref;
    for (const auto& r : rows) {
      if (r.value != v) continue;
      total.push_back(r.total_reward);
      real.push_back(r.real_reward);
      ref.push_back(r.reference_total);
      if (r.ratio_percent) ratio.push_back(*r.ratio_percent);
    }
    out.push_back({v, median(total), median(real), ratio.empty() ? 0.0 : median(ratio),
                   median(ref)});
  }
  return out;
}

std::vector<SweepSpec> table_sweeps(int table, const SimConfig& base,
                                    const std::vector<std::uint64_t>& seeds) {
  auto spec = [&](SweepAxis axis, std::vector<std::string> values) {
    return SweepSpec{axis, std::move(values), seeds, base};
  };
  switch (table) {
    case 1: return {spec(SweepAxis::attack_strategy, {"qlearning", "minres", "random", "none"})};
    case 2: return {spec(SweepAxis::scheme, {"qlearning", "myopic", "fcfs", "random"})};
    case 3:
      return {spec(SweepAxis::fake_rate,
                   {"0", "0.1", "0.2", "0.3", "0.4", "0.5", "0.6", "0.7", "0.8", "0.9", "1"})};
    case 4: {
      std::vector<std::string> rbs;
      for (int n = 5; n <= 15; ++n) rbs.push_back(std::to_string(n));
      return {spec(SweepAxis::rb_count, rbs)};
    }
    case 5:
      return {spec(SweepAxis::ue_count, {"3", "4", "5", "6", "7", "8", "9", "10", "20", "50"})};
    case 6: return {spec(SweepAxis::snr_band, {"low", "medium", "high"})};
    case 9: {
      std::vector<std::string> policies;
      for (auto p : kAllWeightPolicies) policies.emplace_back(to_string(p));
      return {spec(SweepAxis::weight_policy, policies)};
    }
    default:
      throw std::invalid_argument("no replication for table " + std::to_string(table) +
                                  " (choose 1, 2, 3, 4, 5, 6 or 9)");
  }
}

std::vector<TableCheck> validate_tables(const AttackConfig& attack, int max_weight, double tol) {
  return {
      {"RDW", validate_weight_table(attack.rdw_table, uniform_weight_targets(max_weight), tol)},
      {"RDLW", validate_weight_table(attack.rdlw_table, large_weight_targets(max_weight), tol)},
  };
}

}  // namespace slicing
