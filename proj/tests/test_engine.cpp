#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "slicing/engine.hpp"
#include "slicing/sweep.hpp"
#include "support.hpp"

using namespace slicing;

namespace {

constexpr double c = kDefaultRateConstant;

Request scripted(RequestId id, Slot arrival, int weight, int rbs, int lifetime, Slot deadline) {
  Request r;
  r.id = id;
  r.ue = 0;
  r.weight = weight;
  r.min_rate = c * rbs;
  r.snr = 1e6;  // zero BER: needs exactly `rbs`
  r.min_processing = 0.1;
  r.min_comm_power = 0.1;
  r.lifetime = lifetime;
  r.deadline_slot = deadline;
  r.arrival_slot = arrival;
  return r;
}

// Feeds a fixed list of requests, each at its arrival slot.
Simulation::ArrivalSource trace(std::vector<Request> reqs) {
  return [reqs = std::move(reqs)](Slot t, RequestIds& ids) {
    std::vector<Request> out;
    for (auto r : reqs) {
      if (r.arrival_slot != t) continue;
      r.id = ids.next();
      out.push_back(r);
    }
    return out;
  };
}

SimConfig quiet(int slots, SchemeKind scheme = SchemeKind::fcfs) {
  SimConfig cfg;
  cfg.attack.strategy = AttackStrategy::none;
  cfg.scheme = scheme;
  cfg.total_slots = slots;
  cfg.measure_window = slots;
  return cfg;
}

}  // namespace

TEST_CASE("compute_ratio") {
  MetricsReport attack, reference;
  attack.real_reward = 523;
  reference.total_reward = 1783;
  CHECK(compute_ratio(attack, reference) == doctest::Approx(29.33).epsilon(1e-4));
  attack.real_reward = 858;
  reference.total_reward = 1526;
  CHECK(compute_ratio(attack, reference) == doctest::Approx(56.23).epsilon(1e-4));
  attack.real_reward = reference.total_reward;
  CHECK(compute_ratio(attack, reference) == 100.0);
  reference.total_reward = 0;
  CHECK_THROWS_AS(compute_ratio(attack, reference), std::domain_error);
}

TEST_CASE("run edge cases") {
  SimConfig cfg;
  cfg.total_slots = 0;
  cfg.measure_window = 0;
  const auto r = run(cfg);
  CHECK(r.total_reward == 0);
  CHECK(r.requested_real_reward == 0);
  CHECK(std::all_of(r.fake_weight_histogram.begin(), r.fake_weight_histogram.end(),
                    [](auto n) { return n == 0; }));

  SimConfig none;
  none.attack.strategy = AttackStrategy::none;
  none.total_slots = 2000;
  const auto n = run(none);
  CHECK(n.total_reward > 0);
  CHECK(n.real_reward == n.total_reward);
  CHECK(n.fake_reward == 0);
}

TEST_CASE("scripted three-slot run") {
  Simulation sim(quiet(3));
  sim.set_arrival_source(trace({scripted(0, 0, 3, 2, 1, 2)}));
  sim.step();
  CHECK(sim.pool().free_rbs == 9);
  sim.step();
  CHECK(sim.pool().free_rbs == 11);  // lifetime 1 ends at slot 1
  sim.step();
  CHECK(sim.done());
  CHECK(sim.report().total_reward == 3);
  CHECK(sim.report().real_reward == 3);
  CHECK(sim.report().served_real == 1);
}

TEST_CASE("phase ordering") {
  SUBCASE("a grant ending at t frees its RBs for t") {
    Simulation sim(quiet(3));
    sim.set_arrival_source(trace({scripted(0, 0, 1, 11, 2, 0), scripted(0, 2, 5, 11, 1, 2)}));
    sim.step();
    sim.step();
    CHECK(sim.pool().free_rbs == 0);
    sim.step();
    CHECK(sim.served_ids().size() == 2);
    CHECK(sim.report().total_reward == 6);
  }
  SUBCASE("a request past its deadline leaves the waiting list") {
    Simulation sim(quiet(3));
    // Needs 12 RBs of 11, so it can only wait.
    sim.set_arrival_source(trace({scripted(0, 0, 2, 12, 1, 1)}));
    sim.step();
    CHECK(sim.active().size() == 1);
    sim.step();
    CHECK(sim.active().size() == 1);  // deadline 1 may still start at 1
    sim.step();
    CHECK(sim.active().empty());
  }
  SUBCASE("an idle slot changes nothing but the clock") {
    Simulation sim(quiet(5));
    sim.set_arrival_source(trace({}));
    const auto before = sim.pool();
    sim.step();
    CHECK(sim.pool() == before);
    CHECK(sim.active().empty());
    CHECK(sim.grants().empty());
    CHECK(sim.slot() == 1);
  }
  SUBCASE("arrivals are served in their own slot") {
    Simulation sim(quiet(1));
    sim.set_arrival_source(trace({scripted(0, 0, 4, 1, 3, 0)}));
    sim.step();
    CHECK(sim.report().total_reward == 4);
  }
}

TEST_CASE("stepping past the end is a bug") {
  Simulation sim(quiet(1));
  sim.step();
  CHECK_THROWS_AS(sim.step(), std::logic_error);
}

TEST_CASE("only the window counts") {
  auto cfg = quiet(10);
  cfg.measure_window = 5;
  Simulation sim(cfg);
  sim.set_arrival_source(trace({scripted(0, 2, 5, 1, 1, 2), scripted(0, 7, 3, 1, 1, 7)}));
  while (!sim.done()) sim.step();
  CHECK(sim.report().total_reward == 3);
  CHECK(sim.report().requested_real_reward == 3);
}

TEST_CASE("determinism and the null attack") {
  SimConfig cfg;
  cfg.total_slots = 3000;
  cfg.seed = 77;
  const auto a = run(cfg);
  CHECK(a == run(cfg));
  CHECK(a.fake_reward > 0);

  SimConfig zero = cfg;
  zero.attack.fake_rate = 0.0;
  const auto z = run(zero);
  CHECK(z == run(without_attack(cfg)));
  CHECK(z.fake_reward == 0);
  CHECK(z.requested_fake_reward == 0);

  SimConfig other = cfg;
  other.seed = 78;
  CHECK_FALSE(run(other) == a);
}

TEST_CASE("emission rate and fake shape over a run") {
  for (double rf : {0.1, 0.5, 1.0}) {
    SimConfig cfg;
    cfg.total_slots = 4000;
    cfg.attack.fake_rate = rf;
    cfg.attack.strategy = AttackStrategy::random;
    std::ostringstream log;
    Simulation sim(cfg, &log);
    while (!sim.done()) sim.step();
    const auto& lim = sim.attacker().limiter();
    CHECK(static_cast<double>(lim.emitted_count) <= rf * 4000 + 1);

    std::istringstream in(log.str());
    std::map<Slot, int> fakes_per_slot;
    Slot slot;
    std::string kind;
    RequestId id;
    int rbs;
    double proc, comm;
    while (in >> slot >> kind >> id >> rbs >> proc >> comm) {
      if (kind != "fake") continue;
      ++fakes_per_slot[slot];
      CHECK(proc == cfg.traffic.processing_range.low);
      CHECK(comm == cfg.traffic.comm_power_range.low);
    }
    for (const auto& [s, n] : fakes_per_slot) CHECK(n == 1);
  }
}

TEST_CASE("event log lines") {
  std::ostringstream log;
  Simulation logged(quiet(2), &log);
  logged.set_arrival_source(trace({scripted(0, 0, 3, 2, 1, 0)}));
  logged.step();
  logged.step();
  CHECK(log.str() == "0 arrival 1 2 0.1 0.1\n0 admit 1 2 0.1 0.1\n1 release 1 2 0.1 0.1\n");
}

TEST_CASE("config validation names the field") {
  SimConfig cfg;
  cfg.measure_window = cfg.total_slots + 1;
  CHECK(invalid_argument_message([&] { cfg.validate(); }).starts_with("measure_window: "));
  CHECK(invalid_argument_message([&] { run(cfg); }).starts_with("measure_window: "));

  cfg = {};
  cfg.link.rb_count = 12;
  cfg.attack.weight_policy = WeightPolicy::RDW;
  CHECK(invalid_argument_message([&] { cfg.validate(); }).starts_with("attack.weight_policy: "));
  cfg.attack.strategy = AttackStrategy::none;
  CHECK_NOTHROW(cfg.validate());

  cfg = {};
  cfg.gnb_hp.gamma = 2;
  CHECK(invalid_argument_message([&] { cfg.validate(); }).starts_with("gnb_hp.gamma"));
}

TEST_CASE("SNR bands") {
  CHECK(snr_band_range(SnrBand::medium).low == 1.5);
  CHECK(snr_band_range(SnrBand::medium).high == 3.0);
  CHECK(snr_band_range(SnrBand::low).high == snr_band_range(SnrBand::medium).low);
  CHECK(snr_band_range(SnrBand::high).low == snr_band_range(SnrBand::medium).high);
  CHECK(snr_band_from_string("high") == SnrBand::high);
  CHECK_THROWS_AS(snr_band_from_string("ultra"), std::invalid_argument);
}

TEST_CASE("no-attack scheme ordering over five seeds") {
  std::map<SchemeKind, std::vector<double>> rewards;
  for (auto scheme : {SchemeKind::qlearning, SchemeKind::myopic, SchemeKind::fcfs, SchemeKind::random}) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      SimConfig cfg;
      cfg.attack.strategy = AttackStrategy::none;
      cfg.scheme = scheme;
      cfg.seed = seed;
      rewards[scheme].push_back(run(cfg).total_reward);
    }
  }
  const double ql = median(rewards[SchemeKind::qlearning]);
  const double my = median(rewards[SchemeKind::myopic]);
  const double fc = median(rewards[SchemeKind::fcfs]);
  const double rn = median(rewards[SchemeKind::random]);
  MESSAGE("medians: qlearning " << ql << ", myopic " << my << ", fcfs " << fc << ", random " << rn);
  CHECK(ql >= my);
  CHECK(my >= fc);
  CHECK(fc >= rn);
}
