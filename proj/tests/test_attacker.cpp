#include <doctest.h>

#include <array>
#include <cmath>
#include <numeric>
#include <sstream>
#include <vector>

#include "slicing/attacker.hpp"

using namespace slicing;

namespace {

// The published tables with their grouped columns, before expansion.
// RDW columns: states 1-2, 3-4, 5, 6, 7, 8-9, 10-11.
constexpr std::array<std::array<double, 7>, 5> kRdwGrouped{{
    {0.5, 0.4, 0.2, 0.2, 0.0, 0.0, 0.0},
    {0.4, 0.4, 0.3, 0.2, 0.1, 0.0, 0.0},
    {0.1, 0.2, 0.4, 0.2, 0.4, 0.2, 0.1},
    {0.0, 0.0, 0.1, 0.2, 0.3, 0.4, 0.4},
    {0.0, 0.0, 0.0, 0.2, 0.2, 0.4, 0.5},
}};
constexpr std::array<int, 7> kRdwSpan{2, 2, 1, 1, 1, 2, 2};
// RDLW columns: states 1, 2-3, 4-5, 6, 7-8, 9-10, 11.
constexpr std::array<double, 7> kRdlwW4{1.0, 0.9, 0.8, 0.5, 0.2, 0.1, 0.0};
constexpr std::array<int, 7> kRdlwSpan{1, 2, 2, 1, 2, 2, 1};

double grouped_mean(std::span<const double> row, std::span<const int> span) {
  double sum = 0;
  int states = 0;
  for (std::size_t k = 0; k < row.size(); ++k) {
    sum += row[k] * span[k];
    states += span[k];
  }
  return sum / states;
}

AttackConfig config(WeightPolicy p = WeightPolicy::LW) {
  AttackConfig a;
  a.weight_policy = p;
  return a;
}

}  // namespace

TEST_CASE("published weight tables, summed by hand") {
  CHECK(grouped_mean(kRdwGrouped[2], kRdwSpan) == doctest::Approx(0.2).epsilon(1e-12));
  for (const auto& row : kRdwGrouped) CHECK(grouped_mean(row, kRdwSpan) == doctest::Approx(0.2));
  CHECK(grouped_mean(kRdlwW4, kRdlwSpan) == doctest::Approx(0.5).epsilon(1e-12));

  const auto rdw = WeightTable::default_rdw();
  REQUIRE(rdw.states() == 11);
  REQUIRE(rdw.weights() == 5);
  int state = 1;
  for (std::size_t g = 0; g < kRdwSpan.size(); ++g) {
    for (int k = 0; k < kRdwSpan[g]; ++k, ++state) {
      for (int w = 1; w <= 5; ++w) CHECK(rdw.prob(state, w) == kRdwGrouped[static_cast<std::size_t>(w - 1)][g]);
    }
  }
  const auto rdlw = WeightTable::default_rdlw();
  state = 1;
  for (std::size_t g = 0; g < kRdlwSpan.size(); ++g) {
    for (int k = 0; k < kRdlwSpan[g]; ++k, ++state) CHECK(rdlw.prob(state, 4) == kRdlwW4[g]);
  }
}

TEST_CASE("validate_weight_table") {
  CHECK(validate_weight_table(WeightTable::default_rdw(), uniform_weight_targets(5)));
  CHECK(validate_weight_table(WeightTable::default_rdlw(), large_weight_targets(5)));
  CHECK_FALSE(validate_weight_table(WeightTable::default_rdlw(), uniform_weight_targets(5)));

  // One entry moved by 0.1: its column no longer sums to 1.
  auto rows = std::vector<std::vector<double>>(5, std::vector<double>(11));
  const auto rdw = WeightTable::default_rdw();
  for (int w = 1; w <= 5; ++w)
    for (int i = 1; i <= 11; ++i) rows[static_cast<std::size_t>(w - 1)][static_cast<std::size_t>(i - 1)] = rdw.prob(i, w);
  rows[2][4] += 0.1;
  CHECK_FALSE(validate_weight_table(WeightTable::from_rows(rows), uniform_weight_targets(5)));

  // Columns sum to 1 but the weight means are off.
  const auto skewed = WeightTable::from_rows({{1, 1}, {0, 0}});
  CHECK_FALSE(validate_weight_table(skewed, uniform_weight_targets(2)));
  CHECK(large_weight_targets(5) == std::vector<double>{0, 0, 0, 0.5, 0.5});
  CHECK_THROWS_AS(validate_weight_table(skewed, uniform_weight_targets(3)), std::invalid_argument);
}

TEST_CASE("weight table files") {
  std::istringstream ok("# weights 1..2, states 1..3\n0.5 1 0  # w1\n\n0.5 0 1\n");
  const auto t = WeightTable::parse(ok);
  CHECK(t.states() == 3);
  CHECK(t.weights() == 2);
  CHECK(t.prob(2, 1) == 1.0);
  CHECK_THROWS_AS(t.column(0), std::out_of_range);
  CHECK_THROWS_AS(t.column(4), std::out_of_range);

  std::istringstream bad("0.5 0.5\n0.5 x\n");
  CHECK_THROWS_WITH_AS(WeightTable::parse(bad), doctest::Contains("line 2"), std::runtime_error);
  std::istringstream ragged("0.5 0.5\n0.5\n");
  CHECK_THROWS_AS(WeightTable::parse(ragged), std::runtime_error);
}

TEST_CASE("observe_free_rbs") {
  Rng rng(1);
  std::array<bool, 11> rbs{};
  std::fill_n(rbs.begin(), 6, true);
  CHECK(observe_free_rbs(rbs, {}, rng) == 6);
  CHECK(observe_free_rbs(rbs, {1.0, 0.0}, rng) == 0);
  CHECK(observe_free_rbs(rbs, {0.0, 1.0}, rng) == 11);

  const int trials = 100000;
  double sum = 0;
  for (int i = 0; i < trials; ++i) sum += observe_free_rbs(rbs, {0.2, 0.2}, rng);
  CHECK(std::abs(sum / trials - 5.8) < 0.05);

  auto pool = ResourcePool::full(11);
  pool.free_rbs = 4;
  CHECK(observe_free_rbs(pool, {}, rng) == 4);
}

TEST_CASE("should_emit") {
  CHECK_FALSE(should_emit({50, 100}, 0.5));
  CHECK(should_emit({0, 1}, 0.5));
  CHECK_FALSE(should_emit({0, 1}, 0.0));

  for (double rf : {0.1, 0.3, 0.5, 0.7, 1.0}) {
    RateLimiter lim;
    for (int t = 0; t < 10000; ++t) {
      ++lim.elapsed_slots;
      if (should_emit(lim, rf)) ++lim.emitted_count;
      REQUIRE(lim.emitted_count <= rf * lim.elapsed_slots + 1);
    }
    CHECK(std::abs(static_cast<double>(lim.emitted_count) / 10000 - rf) < 0.01);
  }
}

TEST_CASE("init_attacker_table") {
  const QTable t = init_attacker_table(11);
  CHECK(t.value(5, 0) == 0.0);
  CHECK(t.value(5, 3) == 1.0);
  CHECK(t.value(5, 5) == 1.0);
  CHECK(t.action_count(5) == 6);
  CHECK(t.action_count(0) == 1);
  CHECK(t.value(0, 0) == 0.0);
}

TEST_CASE("choose_rb_demand") {
  Rng rng(4);
  QTable t = init_attacker_table(11);
  CHECK(choose_rb_demand(t, 0, 0.5, rng) == 0);
  // Fresh table: every request is worth 1 and silence 0, so the greedy choice asks.
  const int d = choose_rb_demand(t, 7, 0.0, rng);
  CHECK(d >= 1);
  CHECK(d == 7);

  SUBCASE("exploration covers every action") {
    std::array<int, 8> seen{};
    for (int i = 0; i < 20000; ++i) ++seen[static_cast<std::size_t>(choose_rb_demand(t, 7, 1.0, rng))];
    for (int k : seen) CHECK(k > 2000);
  }
  SUBCASE("learns the only demand that pays") {
    QHyperparams hp;
    QTable learn = init_attacker_table(11);
    const int state = 8;
    for (int i = 0; i < 20000; ++i) {
      const int a = choose_rb_demand(learn, state, 0.2, rng);
      const std::vector<int> served = a == 6 ? std::vector<int>{5} : std::vector<int>{};
      attacker_feedback(learn, served, AttackerRewardMode::weight, state, a, state, hp);
    }
    CHECK(choose_rb_demand(learn, state, 0.0, rng) == 6);
  }
}

TEST_CASE("weight_from_policy") {
  Rng rng(8);
  const AwState aw{3};
  for (int i = 0; i < 100; ++i) {
    CHECK(weight_from_policy(WeightPolicy::LW, 4, aw, config(), 5, rng) == 5);
    const int ulw = weight_from_policy(WeightPolicy::ULW, 4, aw, config(), 5, rng);
    CHECK((ulw == 4 || ulw == 5));
    CHECK(weight_from_policy(WeightPolicy::RDLW, 11, aw, config(), 5, rng) == 5);
    CHECK(weight_from_policy(WeightPolicy::AW2, 4, aw, config(), 5, rng) == 3);
  }
  const auto cfg = config();
  CHECK(cfg.rdw_table.prob(1, 1) == 0.5);
  CHECK(cfg.rdw_table.prob(2, 2) == 0.4);
  CHECK(cfg.rdw_table.prob(2, 3) == 0.1);
  CHECK_THROWS_AS(weight_from_policy(WeightPolicy::RDW, 12, aw, cfg, 5, rng), std::out_of_range);
  CHECK_THROWS_AS(weight_from_policy(WeightPolicy::RDW, 3, aw, cfg, 4, rng), std::invalid_argument);
}

TEST_CASE("RDW sampling follows each column") {
  Rng rng(12);
  const auto cfg = config();
  const int n = 100000;
  for (int state = 1; state <= 11; ++state) {
    std::array<int, 5> counts{};
    for (int i = 0; i < n; ++i) {
      ++counts[static_cast<std::size_t>(weight_from_policy(WeightPolicy::RDW, state, {}, cfg, 5, rng) - 1)];
    }
    for (int w = 1; w <= 5; ++w) {
      CHECK(std::abs(static_cast<double>(counts[static_cast<std::size_t>(w - 1)]) / n -
                     cfg.rdw_table.prob(state, w)) < 0.02);
    }
  }
}

TEST_CASE("update_aw") {
  Rng rng(2);
  CHECK(update_aw({3}, true, WeightPolicy::AW1, 0.4, 5, rng).current_weight == 4);
  CHECK(update_aw({5}, true, WeightPolicy::AW1, 0.4, 5, rng).current_weight == 5);
  CHECK(update_aw({3}, false, WeightPolicy::AW1, 0.4, 5, rng).current_weight == 2);
  CHECK(update_aw({1}, false, WeightPolicy::AW1, 0.4, 5, rng).current_weight == 1);
  CHECK(update_aw({2}, true, WeightPolicy::AW2, 0.4, 5, rng).current_weight == 5);
  CHECK(update_aw({2}, false, WeightPolicy::AW2, 0.4, 5, rng).current_weight == 1);
  CHECK(update_aw({2}, true, WeightPolicy::AW3, 0.4, 5, rng).current_weight == 5);
  CHECK(update_aw({4}, false, WeightPolicy::AW3, 1.0, 5, rng).current_weight == 3);
  CHECK(update_aw({4}, false, WeightPolicy::AW3, 0.0, 5, rng).current_weight == 4);
  CHECK_THROWS_AS(update_aw({4}, false, WeightPolicy::LW, 0.4, 5, rng), std::invalid_argument);

  SUBCASE("AW3 decreases with the configured probability") {
    int down = 0;
    for (int i = 0; i < 10000; ++i) down += update_aw({4}, false, WeightPolicy::AW3, 0.4, 5, rng).current_weight == 3;
    CHECK(std::abs(down / 10000.0 - 0.4) < 0.02);
  }
  SUBCASE("never leaves [1, W]") {
    std::bernoulli_distribution coin(0.5);
    for (auto p : {WeightPolicy::AW1, WeightPolicy::AW2, WeightPolicy::AW3}) {
      AwState aw{5};
      for (int i = 0; i < 5000; ++i) {
        aw = update_aw(aw, coin(rng), p, 0.4, 5, rng);
        REQUIRE(aw.current_weight >= 1);
        REQUIRE(aw.current_weight <= 5);
      }
    }
  }
}

TEST_CASE("craft_fake_request") {
  Rng rng(6);
  RequestIds ids;
  TrafficConfig traffic;
  AttackConfig attack = config(WeightPolicy::UW);
  const FakeRequestContext ctx{&attack, &traffic, kDefaultRateConstant};

  CHECK_FALSE(craft_fake_request(ctx, 3, 0, 0, {}, rng, ids));
  CHECK_FALSE(craft_fake_request(ctx, 0, 5, 0, {}, rng, ids));

  for (int i = 0; i < 2000; ++i) {
    const int observed = 1 + i % 11;
    const int demand = 1 + i % observed;
    const auto fake = craft_fake_request(ctx, demand, observed, 50, {}, rng, ids);
    REQUIRE(fake);
    CHECK(fake->is_fake);
    CHECK_FALSE(fake->ue.has_value());
    CHECK(required_rbs(*fake) == demand);
    CHECK(fake->min_processing == traffic.processing_range.low);
    CHECK(fake->min_comm_power == traffic.comm_power_range.low);
    CHECK(fake->arrival_slot == 50);
    CHECK_NOTHROW(validate(*fake, 5));
  }

  SUBCASE("minres always needs one RB") {
    AttackConfig minres = attack;
    minres.strategy = AttackStrategy::minres;
    const FakeRequestContext mctx{&minres, &traffic, kDefaultRateConstant};
    const QTable table = init_attacker_table(11);
    for (int observed = 1; observed <= 11; ++observed) {
      const int demand = rb_demand_for_strategy(minres, observed, table, 0.1, rng);
      const auto fake = craft_fake_request(mctx, demand, observed, 0, {}, rng, ids);
      REQUIRE(fake);
      CHECK(required_rbs(*fake) == 1);
    }
  }
  SUBCASE("random demand stays within what is seen free") {
    AttackConfig random = attack;
    random.strategy = AttackStrategy::random;
    const QTable table = init_attacker_table(11);
    for (int i = 0; i < 1000; ++i) {
      const int d = rb_demand_for_strategy(random, 4, table, 0.0, rng);
      CHECK(d >= 1);
      CHECK(d <= 4);
    }
  }
  SUBCASE("qlearning demand is the table argmax at epsilon 0") {
    AttackConfig ql = attack;
    QTable table = init_attacker_table(11);
    table.set(9, 2, 4.0);
    CHECK(rb_demand_for_strategy(ql, 9, table, 0.0, rng) == 2);
  }
}

TEST_CASE("attacker reward and feedback") {
  const std::vector<int> none, one{5}, two{2, 4};
  CHECK(attacker_reward(none, AttackerRewardMode::weight) == 0.0);
  CHECK(attacker_reward(one, AttackerRewardMode::weight) == 5.0);
  CHECK(attacker_reward(two, AttackerRewardMode::count) == 2.0);
  CHECK(attacker_reward(two, AttackerRewardMode::weight) == 6.0);

  QHyperparams hp;
  hp.alpha = 1.0;
  hp.gamma = 0.0;
  QTable t = init_attacker_table(11);
  attacker_feedback(t, one, AttackerRewardMode::weight, 4, 2, 3, hp);
  CHECK(t.value(4, 2) == 5.0);
  attacker_feedback(t, none, AttackerRewardMode::weight, 4, 3, 3, hp);
  CHECK(t.value(4, 3) == 0.0);
}

TEST_CASE("strategy and policy names round-trip") {
  for (auto s : {AttackStrategy::none, AttackStrategy::qlearning, AttackStrategy::minres,
                 AttackStrategy::random}) {
    CHECK(attack_strategy_from_string(to_string(s)) == s);
  }
  for (auto p : kAllWeightPolicies) CHECK(weight_policy_from_string(to_string(p)) == p);
  CHECK_THROWS_AS(weight_policy_from_string("XW"), std::invalid_argument);
}
