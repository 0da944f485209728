#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "slicing/core_model.hpp"
#include "slicing/rl.hpp"
#include "slicing/traffic.hpp"

namespace slicing {

enum class AttackStrategy { none, qlearning, minres, random };
enum class WeightPolicy { LW, UW, ULW, RDW, RDLW, AW1, AW2, AW3 };
enum class AttackerRewardMode { count, weight };

std::string_view to_string(AttackStrategy s);
std::string_view to_string(WeightPolicy p);
std::string_view to_string(AttackerRewardMode m);
AttackStrategy attack_strategy_from_string(std::string_view name);
WeightPolicy weight_policy_from_string(std::string_view name);
AttackerRewardMode reward_mode_from_string(std::string_view name);

inline constexpr WeightPolicy kAllWeightPolicies[] = {
    WeightPolicy::LW,   WeightPolicy::UW,  WeightPolicy::ULW, WeightPolicy::RDW,
    WeightPolicy::RDLW, WeightPolicy::AW1, WeightPolicy::AW2, WeightPolicy::AW3};

struct SensingError {
  double p_false_alarm = 0.0;  // free RB reported busy
  double p_misdetect = 0.0;    // busy RB reported free
  friend bool operator==(const SensingError&, const SensingError&) = default;
};

/// Probability of each weight conditioned on the number of remaining RBs.
///
/// Stored as probs[state - 1][weight - 1] for state in 1..F, weight in 1..W.
class WeightTable {
 public:
  WeightTable() = default;
  /// `rows[j][i]` is P(weight j+1 | i+1 remaining RBs), the file layout.
  static WeightTable from_rows(const std::vector<std::vector<double>>& rows);
  /// Whitespace-separated decimals, one row per weight. Throws std::runtime_error.
  static WeightTable parse(std::istream& in);
  static WeightTable load(const std::string& path);

  /// The resource-dependent table with a uniform overall weight mix.
  static WeightTable default_rdw();
  /// The resource-dependent table restricted to weights 4 and 5.
  static WeightTable default_rdlw();

  int states() const { return static_cast<int>(probs_.size()); }
  int weights() const { return probs_.empty() ? 0 : static_cast<int>(probs_.front().size()); }
  double prob(int state, int weight) const;
  /// Distribution over weights 1..W given `state` remaining RBs.
  std::span<const double> column(int state) const;

 private:
  std::vector<std::vector<double>> probs_;
};

/// True iff every state's column sums to one and each weight's mean
/// probability over states equals `target_mean_prob[weight - 1]`, both within
/// `tol`. Throws std::invalid_argument if the target length differs from W.
bool validate_weight_table(const WeightTable& t, std::span<const double> target_mean_prob,
                           double tol = 1e-9);

/// Per-weight mean targets: 1/W everywhere.
std::vector<double> uniform_weight_targets(int max_weight);
/// Per-weight mean targets: 0.5 on the two largest weights, 0 elsewhere.
std::vector<double> large_weight_targets(int max_weight);

struct AttackConfig {
  AttackStrategy strategy = AttackStrategy::qlearning;
  double fake_rate = 0.5;
  WeightPolicy weight_policy = WeightPolicy::LW;
  double aw3_decrease_prob = 0.4;
  SensingError sensing;
  AttackerRewardMode reward_mode = AttackerRewardMode::weight;
  WeightTable rdw_table = WeightTable::default_rdw();
  WeightTable rdlw_table = WeightTable::default_rdlw();

  void validate() const;
};

/// Fake requests emitted versus slots elapsed.
struct RateLimiter {
  std::int64_t emitted_count = 0;
  std::int64_t elapsed_slots = 0;
};

/// True iff emitted / elapsed is strictly below `fake_rate`.
bool should_emit(const RateLimiter& limiter, double fake_rate);

struct AwState {
  int current_weight = 5;
};

/// Counts the RBs the adversary believes are free. Each free RB is seen with
/// probability 1 - p_fa; each busy RB is mistaken for free with probability p_md.
int observe_free_rbs(std::span<const bool> rb_is_free, const SensingError& sensing, Rng& rng);
int observe_free_rbs(const ResourcePool& pool, const SensingError& sensing, Rng& rng);

/// Q(i, 0) = 0 and Q(i, a) = 1 for 1 <= a <= i, for every state i in [0, total_rbs].
QTable init_attacker_table(int total_rbs);

/// Epsilon-greedy RB demand in [0, observed_free]; 0 means stay silent.
/// Greedy ties go to the largest demand.
int choose_rb_demand(const QTable& table, int observed_free, double epsilon, Rng& rng);

int weight_from_policy(WeightPolicy policy, int remaining_rbs, const AwState& aw,
                       const AttackConfig& cfg, int max_weight, Rng& rng);

AwState update_aw(AwState aw, bool was_selected, WeightPolicy variant, double decrease_prob,
                  int max_weight, Rng& rng);

/// Request-building inputs that do not change within a run.
struct FakeRequestContext {
  const AttackConfig* attack = nullptr;
  const TrafficConfig* traffic = nullptr;
  double rate_constant = kDefaultRateConstant;
};

/// The RB demand for one emission opportunity under the configured strategy.
int rb_demand_for_strategy(const AttackConfig& cfg, int observed_free, const QTable& table,
                           double epsilon, Rng& rng);

/// Builds a fake needing exactly `rb_demand` RBs at the traffic's minimum
/// processing and comm power. Empty if rb_demand or observed_free is zero.
std::optional<Request> craft_fake_request(const FakeRequestContext& ctx, int rb_demand,
                                          int observed_free, Slot slot, const AwState& aw,
                                          Rng& rng, RequestIds& ids);

/// Reward for the served fakes of one slot under the configured mode.
double attacker_reward(std::span<const int> served_fake_weights, AttackerRewardMode mode);

void attacker_feedback(QTable& table, std::span<const int> served_fake_weights,
                       AttackerRewardMode mode, int prev_state, int action, int new_state,
                       const QHyperparams& hp);

/// Per-run adversary: owns its table, limiter and weight-adjustment state.
class Attacker {
 public:
  Attacker(AttackConfig cfg, const TrafficConfig& traffic, QHyperparams hp, int total_rbs,
           double rate_constant);

  /// Senses, rate-limits and possibly emits one fake for `slot`.
  std::optional<Request> act(Slot slot, const ResourcePool& pool, Rng& rng, RequestIds& ids);

  /// Learns from the slot's outcome. `served_fakes` are all fakes admitted
  /// this slot; `pool_after` is the pool once scheduling finished.
  void observe_outcome(std::span<const ActiveGrant> served_fakes, const ResourcePool& pool_after,
                       Rng& rng);

  const QTable& table() const { return table_; }
  const RateLimiter& limiter() const { return limiter_; }
  const AwState& aw_state() const { return aw_; }
  const AttackConfig& config() const { return cfg_; }

 private:
  struct Choice {
    int state = 0;
    int action = 0;
    std::optional<RequestId> emitted;
  };

  AttackConfig cfg_;
  TrafficConfig traffic_;
  QHyperparams hp_;
  int total_rbs_;
  double rate_constant_;
  QTable table_;
  RateLimiter limiter_;
  AwState aw_;
  std::optional<Choice> last_;
};

}  // namespace slicing
