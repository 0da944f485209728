#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

#include "slicing/attacker.hpp"
#include "slicing/core_model.hpp"
#include "slicing/rl.hpp"
#include "slicing/schemes.hpp"
#include "slicing/traffic.hpp"

namespace slicing {

/// Named SNR bands for real traffic.
enum class SnrBand { low, medium, high };
Range<double> snr_band_range(SnrBand band);
SnrBand snr_band_from_string(std::string_view name);
std::string_view to_string(SnrBand band);

struct SimConfig {
  TrafficConfig traffic;
  AttackConfig attack;
  SchemeKind scheme = SchemeKind::qlearning;
  QHyperparams gnb_hp;
  QHyperparams attacker_hp;
  std::int64_t total_slots = 10000;
  std::int64_t measure_window = 1000;
  LinkParams link;
  std::uint64_t seed = 1;

  /// Throws std::invalid_argument whose message starts with the field path.
  void validate() const;
  std::int64_t window_start() const { return total_slots - measure_window; }
};

/// Rewards over the measurement window.
struct MetricsReport {
  double total_reward = 0.0;
  double real_reward = 0.0;
  double fake_reward = 0.0;
  double requested_real_reward = 0.0;
  double requested_fake_reward = 0.0;
  std::optional<double> ratio_percent;
  /// Emitted fakes per weight; index 0 is weight 1.
  std::vector<std::int64_t> fake_weight_histogram;
  std::int64_t served_real = 0;
  std::int64_t served_fake = 0;

  friend bool operator==(const MetricsReport&, const MetricsReport&) = default;
};

/// 100 * attack.real_reward / no_attack.total_reward.
/// Throws std::domain_error if the reference total is zero.
double compute_ratio(const MetricsReport& attack, const MetricsReport& no_attack);

/// Per-slot event kinds written to the optional log.
enum class EventKind { arrival, fake, expire, admit, release };

/// A slot-stepped run. `step()` advances exactly one slot.
class Simulation {
 public:
  using ArrivalSource = std::function<std::vector<Request>(Slot, RequestIds&)>;

  explicit Simulation(SimConfig cfg, std::ostream* event_log = nullptr);

  /// Replaces the random real-traffic generator, e.g. with a scripted trace.
  void set_arrival_source(ArrivalSource source) { arrivals_ = std::move(source); }

  void step();
  bool done() const { return slot_ >= cfg_.total_slots; }

  Slot slot() const { return slot_; }
  const SimConfig& config() const { return cfg_; }
  const ResourcePool& pool() const { return pool_; }
  const ActiveSet& active() const { return active_; }
  const std::vector<ActiveGrant>& grants() const { return grants_; }
  const MetricsReport& report() const { return report_; }
  const Attacker& attacker() const { return attacker_; }
  Scheme& scheme() { return scheme_; }

  /// Every request id ever admitted, in admission order.
  const std::vector<RequestId>& served_ids() const { return served_ids_; }

 private:
  void log(EventKind kind, RequestId id, int rbs, double processing, double comm);
  bool in_window() const { return slot_ >= cfg_.window_start(); }

  SimConfig cfg_;
  std::ostream* event_log_;
  Rng traffic_rng_;
  Rng attack_rng_;
  Rng scheme_rng_;
  RequestIds ids_;
  ArrivalSource arrivals_;
  Scheme scheme_;
  Attacker attacker_;
  ResourcePool pool_;
  ActiveSet active_;
  std::vector<ActiveGrant> grants_;
  MetricsReport report_;
  std::vector<RequestId> served_ids_;
  Slot slot_ = 0;
};

/// Runs every slot of `cfg` and returns the window metrics.
MetricsReport run(const SimConfig& cfg, std::ostream* event_log = nullptr);

/// `cfg` with the attack switched off, for ratio references.
SimConfig without_attack(SimConfig cfg);

}  // namespace slicing
