#include "slicing/attacker.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <memory>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace slicing {

std::string_view to_string(AttackStrategy s) {
  switch (s) {
    case AttackStrategy::none: return "none";
    case AttackStrategy::qlearning: return "qlearning";
    case AttackStrategy::minres: return "minres";
    case AttackStrategy::random: return "random";
  }
  return "?";
}

std::string_view to_string(WeightPolicy p) {
  switch (p) {
    case WeightPolicy::LW: return "LW";
    case WeightPolicy::UW: return "UW";
    case WeightPolicy::ULW: return "ULW";
    case WeightPolicy::RDW: return "RDW";
    case WeightPolicy::RDLW: return "RDLW";
    case WeightPolicy::AW1: return "AW1";
    case WeightPolicy::AW2: return "AW2";
    case WeightPolicy::AW3: return "AW3";
  }
  return "?";
}

std::string_view to_string(AttackerRewardMode m) {
  return m == AttackerRewardMode::count ? "count" : "weight";
}

AttackStrategy attack_strategy_from_string(std::string_view name) {
  for (auto s : {AttackStrategy::none, AttackStrategy::qlearning, AttackStrategy::minres,
                 AttackStrategy::random}) {
    if (name == to_string(s)) return s;
  }
  throw std::invalid_argument("unknown attack strategy '" + std::string(name) + "'");
}

WeightPolicy weight_policy_from_string(std::string_view name) {
  for (auto p : kAllWeightPolicies) {
    if (name == to_string(p)) return p;
  }
  throw std::invalid_argument("unknown weight policy '" + std::string(name) + "'");
}

AttackerRewardMode reward_mode_from_string(std::string_view name) {
  if (name == "count") return AttackerRewardMode::count;
  if (name == "weight") return AttackerRewardMode::weight;
  throw std::invalid_argument("unknown attacker reward mode '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------
// Weight tables

WeightTable WeightTable::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty() || rows.front().empty()) throw std::invalid_argument("empty weight table");
  const std::size_t states = rows.front().size();
  for (const auto& r : rows) {
    if (r.size() != states) throw std::invalid_argument("ragged weight table");
  }
  WeightTable t;
  t.probs_.assign(states, std::vector<double>(rows.size()));
  for (std::size_t j = 0; j < rows.size(); ++j) {
    for (std::size_t i = 0; i < states; ++i) {
      if (!(rows[j][i] >= 0.0)) throw std::invalid_argument("negative weight probability");
      t.probs_[i][j] = rows[j][i];
    }
  }
  return t;
}

WeightTable WeightTable::parse(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::vector<double> row;
    std::string tok;
    while (ls >> tok) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(tok, &used));
        if (used != tok.size()) throw std::invalid_argument(tok);
      } catch (const std::exception&) {
        throw std::runtime_error("weight table line " + std::to_string(line_no) +
                                 ": not a number: '" + tok + "'");
      }
    }
    if (!row.empty()) rows.push_back(std::move(row));
  }
  try {
    return from_rows(rows);
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(std::string("weight table: ") + e.what());
  }
}

WeightTable WeightTable::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open weight table '" + path + "'");
  return parse(in);
}

namespace {

// Expands grouped columns (e.g. "1,2") into one identical column per state.
std::vector<std::vector<double>> expand(const std::vector<std::vector<double>>& grouped,
                                        const std::vector<int>& group_sizes) {
  std::vector<std::vector<double>> rows;
  for (const auto& g : grouped) {
    std::vector<double> r;
    for (std::size_t c = 0; c < g.size(); ++c) r.insert(r.end(), group_sizes[c], g[c]);
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace

WeightTable WeightTable::default_rdw() {
  // States: 1,2 | 3,4 | 5 | 6 | 7 | 8,9 | 10,11
  return from_rows(expand({{0.5, 0.4, 0.2, 0.2, 0.0, 0.0, 0.0},
                           {0.4, 0.4, 0.3, 0.2, 0.1, 0.0, 0.0},
                           {0.1, 0.2, 0.4, 0.2, 0.4, 0.2, 0.1},
                           {0.0, 0.0, 0.1, 0.2, 0.3, 0.4, 0.4},
                           {0.0, 0.0, 0.0, 0.2, 0.2, 0.4, 0.5}},
                          {2, 2, 1, 1, 1, 2, 2}));
}

WeightTable WeightTable::default_rdlw() {
  // States: 1 | 2,3 | 4,5 | 6 | 7,8 | 9,10 | 11
  return from_rows(expand({{0, 0, 0, 0, 0, 0, 0},
                           {0, 0, 0, 0, 0, 0, 0},
                           {0, 0, 0, 0, 0, 0, 0},
                           {1.0, 0.9, 0.8, 0.5, 0.2, 0.1, 0.0},
                           {0.0, 0.1, 0.2, 0.5, 0.8, 0.9, 1.0}},
                          {1, 2, 2, 1, 2, 2, 1}));
}

double WeightTable::prob(int state, int weight) const {
  return column(state)[static_cast<std::size_t>(weight - 1)];
}

std::span<const double> WeightTable::column(int state) const {
  if (state < 1 || state > states()) {
    throw std::out_of_range("weight table has no column for " + std::to_string(state) +
                            " remaining RBs");
  }
  return probs_[static_cast<std::size_t>(state - 1)];
}

bool validate_weight_table(const WeightTable& t, std::span<const double> target_mean_prob,
                           double tol) {
  if (static_cast<int>(target_mean_prob.size()) != t.weights()) {
    throw std::invalid_argument("validate_weight_table: target has " +
                                std::to_string(target_mean_prob.size()) + " weights, table has " +
                                std::to_string(t.weights()));
  }
  for (int i = 1; i <= t.states(); ++i) {
    const auto col = t.column(i);
    if (std::abs(std::accumulate(col.begin(), col.end(), 0.0) - 1.0) > tol) return false;
  }
  for (int j = 1; j <= t.weights(); ++j) {
    double sum = 0.0;
    for (int i = 1; i <= t.states(); ++i) sum += t.prob(i, j);
    const double mean = sum / static_cast<double>(t.states());
    if (std::abs(mean - target_mean_prob[static_cast<std::size_t>(j - 1)]) > tol) return false;
  }
  return true;
}

std::vector<double> uniform_weight_targets(int max_weight) {
  return std::vector<double>(static_cast<std::size_t>(max_weight),
                             1.0 / static_cast<double>(max_weight));
}

std::vector<double> large_weight_targets(int max_weight) {
  std::vector<double> t(static_cast<std::size_t>(max_weight), 0.0);
  if (max_weight >= 2) t[static_cast<std::size_t>(max_weight - 2)] = 0.5;
  t[static_cast<std::size_t>(max_weight - 1)] += 0.5;
  return t;
}

void AttackConfig::validate() const {
  if (!(fake_rate >= 0.0)) throw std::invalid_argument("attack.fake_rate: must be >= 0");
  auto prob = [](double p, const char* name) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw std::invalid_argument(std::string("attack.") + name + ": must be in [0, 1]");
    }
  };
  prob(aw3_decrease_prob, "aw3_decrease_prob");
  prob(sensing.p_false_alarm, "sensing.p_false_alarm");
  prob(sensing.p_misdetect, "sensing.p_misdetect");
}

// ---------------------------------------------------------------------------
// Sensing, rate limiting, demand choice

bool should_emit(const RateLimiter& limiter, double fake_rate) {
  if (limiter.elapsed_slots < 1) throw std::logic_error("should_emit: no slot elapsed yet");
  return static_cast<double>(limiter.emitted_count) <
         fake_rate * static_cast<double>(limiter.elapsed_slots);
}

int observe_free_rbs(std::span<const bool> rb_is_free, const SensingError& sensing, Rng& rng) {
  if (sensing.p_false_alarm == 0.0 && sensing.p_misdetect == 0.0) {
    return static_cast<int>(std::count(rb_is_free.begin(), rb_is_free.end(), true));
  }
  std::bernoulli_distribution keep_free(1.0 - sensing.p_false_alarm);
  std::bernoulli_distribution miss_busy(sensing.p_misdetect);
  int seen = 0;
  for (bool is_free : rb_is_free) {
    if (is_free ? keep_free(rng) : miss_busy(rng)) ++seen;
  }
  return seen;
}

int observe_free_rbs(const ResourcePool& pool, const SensingError& sensing, Rng& rng) {
  // Which RBs are busy does not matter for the count, only how many.
  const auto n = static_cast<std::size_t>(pool.total_rbs);
  auto rb_is_free = std::make_unique<bool[]>(n);
  std::fill_n(rb_is_free.get(), pool.free_rbs, true);
  return observe_free_rbs(std::span<const bool>(rb_is_free.get(), n), sensing, rng);
}

QTable init_attacker_table(int total_rbs) {
  if (total_rbs < 1) throw std::invalid_argument("init_attacker_table: total_rbs must be >= 1");
  return QTable([](StateKey state) {
    std::vector<double> values(static_cast<std::size_t>(state) + 1, 1.0);
    values[0] = 0.0;
    return values;
  });
}

int choose_rb_demand(const QTable& table, int observed_free, double epsilon, Rng& rng) {
  if (observed_free < 0) throw std::invalid_argument("choose_rb_demand: negative observation");
  if (observed_free == 0) return 0;
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  if (coin(rng) < epsilon) return std::uniform_int_distribution<int>(0, observed_free)(rng);
  // Ties go to the largest demand.
  const auto values = table.row(static_cast<StateKey>(observed_free));
  const auto best = std::max_element(values.rbegin(), values.rend());
  return static_cast<int>(std::distance(best, values.rend())) - 1;
}

int rb_demand_for_strategy(const AttackConfig& cfg, int observed_free, const QTable& table,
                           double epsilon, Rng& rng) {
  if (observed_free <= 0) return 0;
  switch (cfg.strategy) {
    case AttackStrategy::none: return 0;
    case AttackStrategy::qlearning: return choose_rb_demand(table, observed_free, epsilon, rng);
    case AttackStrategy::minres: return 1;
    case AttackStrategy::random:
      return std::uniform_int_distribution<int>(1, observed_free)(rng);
  }
  return 0;
}

// ---------------------------------------------------------------------------
// Weights

int weight_from_policy(WeightPolicy policy, int remaining_rbs, const AwState& aw,
                       const AttackConfig& cfg, int max_weight, Rng& rng) {
  switch (policy) {
    case WeightPolicy::LW: return max_weight;
    case WeightPolicy::UW: return std::uniform_int_distribution<int>(1, max_weight)(rng);
    case WeightPolicy::ULW:
      return std::uniform_int_distribution<int>(std::max(1, max_weight - 1), max_weight)(rng);
    case WeightPolicy::RDW:
    case WeightPolicy::RDLW: {
      const auto& table = policy == WeightPolicy::RDW ? cfg.rdw_table : cfg.rdlw_table;
      if (table.weights() != max_weight) {
        throw std::invalid_argument("weight table has " + std::to_string(table.weights()) +
                                    " weights, expected " + std::to_string(max_weight));
      }
      const auto col = table.column(remaining_rbs);  // throws outside 1..F
      std::discrete_distribution<int> pick(col.begin(), col.end());
      return pick(rng) + 1;
    }
    case WeightPolicy::AW1:
    case WeightPolicy::AW2:
    case WeightPolicy::AW3: return aw.current_weight;
  }
  throw std::logic_error("unhandled weight policy");
}

AwState update_aw(AwState aw, bool was_selected, WeightPolicy variant, double decrease_prob,
                  int max_weight, Rng& rng) {
  const int w = aw.current_weight;
  switch (variant) {
    case WeightPolicy::AW1:
      aw.current_weight = was_selected ? std::min(w + 1, max_weight) : std::max(w - 1, 1);
      break;
    case WeightPolicy::AW2:
      aw.current_weight = was_selected ? max_weight : std::max(w - 1, 1);
      break;
    case WeightPolicy::AW3:
      if (was_selected) {
        aw.current_weight = max_weight;
      } else if (std::bernoulli_distribution(decrease_prob)(rng)) {
        aw.current_weight = std::max(w - 1, 1);
      }
      break;
    default: throw std::invalid_argument("update_aw: not an adjusted-weight policy");
  }
  return aw;
}

// ---------------------------------------------------------------------------
// Fake requests and feedback

std::optional<Request> craft_fake_request(const FakeRequestContext& ctx, int rb_demand,
                                          int observed_free, Slot slot, const AwState& aw,
                                          Rng& rng, RequestIds& ids) {
  if (rb_demand <= 0 || observed_free <= 0) return std::nullopt;
  const auto& traffic = *ctx.traffic;
  Request req;
  req.id = ids.next();
  req.is_fake = true;
  req.arrival_slot = slot;
  req.weight = weight_from_policy(ctx.attack->weight_policy, observed_free, aw, *ctx.attack,
                                  traffic.max_weight(), rng);
  const Timing timing = sample_timing(slot, traffic, rng);
  req.lifetime = timing.lifetime;
  req.deadline_slot = timing.deadline_slot;
  const auto& snr = traffic.snr_range;
  req.snr = snr.low == snr.high ? snr.low
                                : std::uniform_real_distribution<double>(snr.low, snr.high)(rng);
  req.min_rate = achievable_rate(rb_demand, ber_from_snr(req.snr), ctx.rate_constant);
  req.min_processing = traffic.processing_range.low;
  req.min_comm_power = traffic.comm_power_range.low;
  return req;
}

double attacker_reward(std::span<const int> served_fake_weights, AttackerRewardMode mode) {
  if (mode == AttackerRewardMode::count) return static_cast<double>(served_fake_weights.size());
  return std::accumulate(served_fake_weights.begin(), served_fake_weights.end(), 0.0);
}

void attacker_feedback(QTable& table, std::span<const int> served_fake_weights,
                       AttackerRewardMode mode, int prev_state, int action, int new_state,
                       const QHyperparams& hp) {
  q_update(table, static_cast<StateKey>(prev_state), action,
           attacker_reward(served_fake_weights, mode), static_cast<StateKey>(new_state), hp);
}

Attacker::Attacker(AttackConfig cfg, const TrafficConfig& traffic, QHyperparams hp,
                   int total_rbs, double rate_constant)
    : cfg_(std::move(cfg)),
      traffic_(traffic),
      hp_(hp),
      total_rbs_(total_rbs),
      rate_constant_(rate_constant),
      table_(init_attacker_table(total_rbs)) {
  cfg_.validate();
  hp_.validate();
  aw_.current_weight = traffic_.max_weight();
}

std::optional<Request> Attacker::act(Slot slot, const ResourcePool& pool, Rng& rng,
                                     RequestIds& ids) {
  ++limiter_.elapsed_slots;
  last_.reset();
  if (cfg_.strategy == AttackStrategy::none) return std::nullopt;
  if (!should_emit(limiter_, cfg_.fake_rate)) return std::nullopt;

  const int observed = observe_free_rbs(pool, cfg_.sensing, rng);
  const int demand = rb_demand_for_strategy(cfg_, observed, table_, epsilon_at(slot, hp_), rng);
  last_ = Choice{observed, demand, std::nullopt};

  const FakeRequestContext ctx{&cfg_, &traffic_, rate_constant_};
  auto fake = craft_fake_request(ctx, demand, observed, slot, aw_, rng, ids);
  if (fake) {
    ++limiter_.emitted_count;
    last_->emitted = fake->id;
  }
  return fake;
}

void Attacker::observe_outcome(std::span<const ActiveGrant> served_fakes,
                               const ResourcePool& pool_after, Rng& rng) {
  if (!last_) return;
  if (cfg_.strategy == AttackStrategy::qlearning) {
    std::vector<int> weights;
    weights.reserve(served_fakes.size());
    for (const auto& g : served_fakes) weights.push_back(g.weight);
    const int new_state = observe_free_rbs(pool_after, cfg_.sensing, rng);
    attacker_feedback(table_, weights, cfg_.reward_mode, last_->state, last_->action, new_state,
                      hp_);
  }
  const auto p = cfg_.weight_policy;
  if (last_->emitted &&
      (p == WeightPolicy::AW1 || p == WeightPolicy::AW2 || p == WeightPolicy::AW3)) {
    const bool selected = std::any_of(served_fakes.begin(), served_fakes.end(), [&](const auto& g) {
      return g.request_id == *last_->emitted;
    });
    aw_ = update_aw(aw_, selected, p, cfg_.aw3_decrease_prob, traffic_.max_weight(), rng);
  }
}

}  // namespace slicing
