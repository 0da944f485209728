// slicesim: run, sweep and replicate RAN-slicing flooding-attack experiments.

#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "slicing/config.hpp"
#include "slicing/sweep.hpp"

namespace {

using namespace slicing;

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  for (std::string item; std::getline(in, item, ',');) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<std::uint64_t> parse_seeds(const std::string& s) {
  std::vector<std::uint64_t> seeds;
  for (const auto& item : split(s)) {
    // "1-5" is shorthand for 1,2,3,4,5.
    const auto dash = item.find('-');
    if (dash != std::string::npos && dash > 0) {
      const auto lo = std::stoull(item.substr(0, dash));
      const auto hi = std::stoull(item.substr(dash + 1));
      if (hi < lo) throw std::invalid_argument("seeds: empty range " + item);
      for (auto x = lo; x <= hi; ++x) seeds.push_back(x);
    } else {
      seeds.push_back(std::stoull(item));
    }
  }
  return seeds;
}

void print_report(std::ostream& out, const MetricsReport& r) {
  out << "total_reward " << r.total_reward << "\nreal_reward " << r.real_reward
      << "\nfake_reward " << r.fake_reward << "\nrequested_real_reward "
      << r.requested_real_reward << "\nrequested_fake_reward " << r.requested_fake_reward
      << "\nserved_real " << r.served_real << "\nserved_fake " << r.served_fake;
  if (r.ratio_percent) out << "\nratio_percent " << std::setprecision(4) << *r.ratio_percent;
  out << "\nfake_weight_histogram";
  for (auto n : r.fake_weight_histogram) out << ' ' << n;
  out << '\n';
}

void print_summary(std::ostream& out, const std::vector<ResultRow>& rows) {
  out << std::left << std::setw(12) << "value" << std::right << std::setw(12) << "no_attack"
      << std::setw(12) << "total" << std::setw(12) << "real" << std::setw(10) << "ratio%"
      << "   (medians)\n";
  for (const auto& s : summarize(rows)) {
    out << std::left << std::setw(12) << s.value << std::right << std::fixed
        << std::setprecision(1) << std::setw(12) << s.reference_total << std::setw(12)
        << s.total_reward << std::setw(12) << s.real_reward << std::setprecision(2)
        << std::setw(10) << s.ratio_percent << '\n'
        << std::defaultfloat;
  }
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  return out;
}

int cmd_run(const std::string& config_path, std::optional<std::uint64_t> seed,
            const std::string& out_path, const std::string& events_path) {
  SimConfig cfg = load_config(config_path);
  if (seed) cfg.seed = *seed;

  std::ofstream events;
  if (!events_path.empty()) events = open_out(events_path);
  MetricsReport report = run(cfg, events_path.empty() ? nullptr : &events);
  if (cfg.attack.strategy != AttackStrategy::none) {
    const MetricsReport ref = run(without_attack(cfg));
    if (ref.total_reward > 0.0) report.ratio_percent = compute_ratio(report, ref);
  }
  print_report(std::cout, report);
  if (!out_path.empty()) {
    auto out = open_out(out_path);
    out << report_to_json(report).dump(2) << '\n';
  }
  return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& axis, const std::string& values,
              const std::string& seeds, const std::string& out_path, unsigned jobs) {
  SweepSpec spec;
  spec.base = load_config(config_path);
  spec.axis = sweep_axis_from_string(axis);
  spec.values = split(values);
  spec.seeds = parse_seeds(seeds);
  const auto rows = run_sweep(spec, jobs);
  auto out = open_out(out_path);
  write_csv_header(out);
  write_csv_rows(out, rows);
  print_summary(std::cout, rows);
  return 0;
}

int cmd_validate(const std::string& table_path, const std::string& kind) {
  if (table_path.empty()) {
    const AttackConfig attack;
    bool ok = true;
    for (const auto& c : validate_tables(attack, TrafficConfig{}.max_weight())) {
      std::cout << c.name << ": " << (c.passed ? "pass" : "FAIL") << '\n';
      ok = ok && c.passed;
    }
    return ok ? 0 : 1;
  }
  const WeightTable t = WeightTable::load(table_path);
  const auto targets =
      kind == "rdlw" ? large_weight_targets(t.weights()) : uniform_weight_targets(t.weights());
  const bool ok = validate_weight_table(t, targets);
  std::cout << table_path << " (" << kind << "): " << (ok ? "pass" : "FAIL") << '\n';
  return ok ? 0 : 1;
}

int cmd_replicate(int table, const std::string& config_path, const std::string& seeds,
                  const std::string& out_path, unsigned jobs) {
  const SimConfig base = config_path.empty() ? SimConfig{} : load_config(config_path);
  auto out = open_out(out_path);
  write_csv_header(out);
  for (const auto& spec : table_sweeps(table, base, parse_seeds(seeds))) {
    const auto rows = run_sweep(spec, jobs);
    write_csv_rows(out, rows);
    std::cout << "axis " << to_string(spec.axis) << '\n';
    print_summary(std::cout, rows);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"RAN slicing simulator with a Q-learning flooding adversary"};
  app.require_subcommand(1);

  std::string config_path, out_path, events_path, axis, values, seeds = "1-5", table_path;
  std::string kind = "rdw";
  std::optional<std::uint64_t> seed;
  unsigned jobs = 0;
  int table = 1;

  auto* run_cmd = app.add_subcommand("run", "Run one configuration and print its metrics");
  run_cmd->add_option("--config", config_path, "JSON config")->required()->check(CLI::ExistingFile);
  run_cmd->add_option("--seed", seed, "Override the config seed");
  run_cmd->add_option("--out", out_path, "Write the report as JSON");
  run_cmd->add_option("--events", events_path, "Write the per-slot event log");

  auto* sweep_cmd = app.add_subcommand("sweep", "Sweep one axis over several seeds");
  sweep_cmd->add_option("--config", config_path, "Base JSON config")
      ->required()
      ->check(CLI::ExistingFile);
  sweep_cmd->add_option("--axis", axis,
                        "fake_rate, rb_count, ue_count, snr_band, sensing_error, weight_policy, "
                        "scheme or attack_strategy")
      ->required();
  sweep_cmd->add_option("--values", values, "Comma-separated values")->required();
  sweep_cmd->add_option("--seeds", seeds, "Comma-separated seeds or ranges like 1-5")
      ->capture_default_str();
  sweep_cmd->add_option("--out", out_path, "CSV output")->required();
  sweep_cmd->add_option("--jobs", jobs, "Concurrent runs (0: one per core)")->capture_default_str();

  auto* validate_cmd = app.add_subcommand("validate-dist", "Check weight tables");
  validate_cmd->add_option("--table", table_path, "Table file; the built-in tables if omitted")
      ->check(CLI::ExistingFile);
  validate_cmd->add_option("--kind", kind, "Targets for --table: rdw or rdlw")
      ->check(CLI::IsMember({"rdw", "rdlw"}))
      ->capture_default_str();

  auto* replicate_cmd = app.add_subcommand("replicate", "Rerun the sweep behind a results table");
  replicate_cmd->add_option("--table", table, "1, 2, 3, 4, 5, 6 or 9")
      ->required()
      ->check(CLI::IsMember({1, 2, 3, 4, 5, 6, 9}));
  replicate_cmd->add_option("--out", out_path, "CSV output")->required();
  replicate_cmd->add_option("--config", config_path, "Base JSON config (defaults if omitted)")
      ->check(CLI::ExistingFile);
  replicate_cmd->add_option("--seeds", seeds, "Comma-separated seeds or ranges")
      ->capture_default_str();
  replicate_cmd->add_option("--jobs", jobs, "Concurrent runs (0: one per core)")
      ->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) return cmd_run(config_path, seed, out_path, events_path);
    if (*sweep_cmd) return cmd_sweep(config_path, axis, values, seeds, out_path, jobs);
    if (*validate_cmd) return cmd_validate(table_path, kind);
    if (*replicate_cmd) return cmd_replicate(table, config_path, seeds, out_path, jobs);
  } catch (const std::exception& e) {
    std::cerr << "slicesim: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
