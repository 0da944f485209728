#include "slicing/engine.hpp"

#include <algorithm>
#include <memory>
#include <ostream>
#include <stdexcept>
#include <string>

namespace slicing {

Range<double> snr_band_range(SnrBand band) {
  switch (band) {
    case SnrBand::low: return {0.5, 1.5};
    case SnrBand::medium: return {1.5, 3.0};
    case SnrBand::high: return {3.0, 6.0};
  }
  throw std::logic_error("unhandled SNR band");
}

SnrBand snr_band_from_string(std::string_view name) {
  if (name == "low") return SnrBand::low;
  if (name == "medium") return SnrBand::medium;
  if (name == "high") return SnrBand::high;
  throw std::invalid_argument("unknown SNR band '" + std::string(name) + "'");
}

std::string_view to_string(SnrBand band) {
  switch (band) {
    case SnrBand::low: return "low";
    case SnrBand::medium: return "medium";
    case SnrBand::high: return "high";
  }
  return "?";
}

void SimConfig::validate() const {
  auto prefixed = [](const char* prefix, auto&& fn) {
    try {
      fn();
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument(std::string(prefix) + e.what());
    }
  };
  traffic.validate();
  attack.validate();
  prefixed("gnb_hp.", [&] { gnb_hp.validate(); });
  prefixed("attacker_hp.", [&] { attacker_hp.validate(); });
  if (total_slots < 0) throw std::invalid_argument("total_slots: must be >= 0");
  if (measure_window < 0) throw std::invalid_argument("measure_window: must be >= 0");
  if (measure_window > total_slots) {
    throw std::invalid_argument("measure_window: must not exceed total_slots");
  }
  if (link.rb_count < 1) throw std::invalid_argument("link.rb_count: must be >= 1");
  if (!(link.rate_constant > 0.0)) throw std::invalid_argument("link.rate_constant: must be > 0");
  const auto& p = attack.weight_policy;
  if (attack.strategy != AttackStrategy::none &&
      (p == WeightPolicy::RDW || p == WeightPolicy::RDLW)) {
    const auto& t = p == WeightPolicy::RDW ? attack.rdw_table : attack.rdlw_table;
    if (t.states() < link.rb_count) {
      throw std::invalid_argument("attack.weight_policy: weight table covers " +
                                  std::to_string(t.states()) + " RB states but link.rb_count is " +
                                  std::to_string(link.rb_count));
    }
    if (t.weights() != traffic.max_weight()) {
      throw std::invalid_argument("attack.weight_policy: weight table has " +
                                  std::to_string(t.weights()) + " weights, traffic uses " +
                                  std::to_string(traffic.max_weight()));
    }
  }
}

double compute_ratio(const MetricsReport& attack, const MetricsReport& no_attack) {
  if (no_attack.total_reward == 0.0) {
    throw std::domain_error("compute_ratio: reference run has zero reward");
  }
  return 100.0 * attack.real_reward / no_attack.total_reward;
}

namespace {

// Independent streams so that, for a fixed seed, real traffic is identical
// whatever the attacker or scheme do with their own randomness.
Rng make_stream(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream)};
  return Rng(seq);
}

const char* event_name(EventKind k) {
  switch (k) {
    case EventKind::arrival: return "arrival";
    case EventKind::fake: return "fake";
    case EventKind::expire: return "expire";
    case EventKind::admit: return "admit";
    case EventKind::release: return "release";
  }
  return "?";
}

const SimConfig& validated(const SimConfig& cfg) {
  cfg.validate();
  return cfg;
}

}  // namespace

Simulation::Simulation(SimConfig cfg, std::ostream* event_log)
    : cfg_(validated(cfg)),
      event_log_(event_log),
      traffic_rng_(make_stream(cfg_.seed, 1)),
      attack_rng_(make_stream(cfg_.seed, 2)),
      scheme_rng_(make_stream(cfg_.seed, 3)),
      scheme_(cfg_.scheme, cfg_.gnb_hp, cfg_.link.rb_count, cfg_.traffic.max_weight()),
      attacker_(cfg_.attack, cfg_.traffic, cfg_.attacker_hp, cfg_.link.rb_count,
                cfg_.link.rate_constant),
      pool_(ResourcePool::full(cfg_.link.rb_count)),
      active_(cfg_.link.rate_constant) {
  report_.fake_weight_histogram.assign(static_cast<std::size_t>(cfg_.traffic.max_weight()), 0);
  arrivals_ = [this](Slot t, RequestIds& ids) {
    return generate_arrivals(t, cfg_.traffic, traffic_rng_, ids);
  };
}

void Simulation::log(EventKind kind, RequestId id, int rbs, double processing, double comm) {
  if (event_log_ == nullptr) return;
  *event_log_ << slot_ << ' ' << event_name(kind) << ' ' << id << ' ' << rbs << ' ' << processing
              << ' ' << comm << '\n';
}

void Simulation::step() {
  if (done()) throw std::logic_error("Simulation::step past total_slots");
  const Slot t = slot_;
  const bool measuring = in_window();

  // 1. Grants whose lifetime ends now return their resources.
  {
    auto ending = std::stable_partition(grants_.begin(), grants_.end(),
                                        [t](const ActiveGrant& g) { return g.end_slot != t; });
    if (ending != grants_.end()) {
      const std::span<const ActiveGrant> released(std::to_address(ending),
                                                  static_cast<std::size_t>(grants_.end() - ending));
      for (const auto& g : released) {
        log(EventKind::release, g.request_id, g.rbs_assigned, g.processing_assigned,
            g.comm_power_assigned);
      }
      pool_ = release(pool_, released);
      grants_.erase(ending, grants_.end());
    }
  }

  // 2. Waiting requests past their deadline leave the list.
  if (event_log_ != nullptr) {
    for (const auto& p : active_.entries()) {
      if (p.request.deadline_slot < t) log(EventKind::expire, p.request.id, p.needed_rbs, 0, 0);
    }
  }
  active_.expire(t);

  // 3. Real arrivals.
  for (auto& req : arrivals_(t, ids_)) {
    validate(req, cfg_.traffic.max_weight());
    if (req.arrival_slot != t) throw std::logic_error("arrival stamped with the wrong slot");
    if (measuring) report_.requested_real_reward += req.weight;
    log(EventKind::arrival, req.id, required_rbs(req, cfg_.link.rate_constant), req.min_processing,
        req.min_comm_power);
    active_.add(std::move(req));
  }

  // 4. The adversary senses the pool and may add one fake.
  if (auto fake = attacker_.act(t, pool_, attack_rng_, ids_)) {
    validate(*fake, cfg_.traffic.max_weight());
    if (measuring) {
      report_.requested_fake_reward += fake->weight;
      ++report_.fake_weight_histogram[static_cast<std::size_t>(fake->weight - 1)];
    }
    log(EventKind::fake, fake->id, required_rbs(*fake, cfg_.link.rate_constant),
        fake->min_processing, fake->min_comm_power);
    active_.add(std::move(*fake));
  }

  // 5. The scheme admits; replay each grant against the live pool.
  const Decision decision = scheme_.decide(active_, pool_, t, scheme_rng_);
  std::vector<RequestId> admitted_ids;
  std::vector<ActiveGrant> served_fakes;
  for (const auto& a : decision.admitted) {
    const auto& entries = active_.entries();
    auto it = std::find_if(entries.begin(), entries.end(),
                           [&](const PendingRequest& p) { return p.request.id == a.request_id; });
    if (it == entries.end()) {
      throw AccountingError("scheme admitted request " + std::to_string(a.request_id) +
                            " that is not waiting");
    }
    const Request& req = it->request;
    if (req.arrival_slot > t || req.deadline_slot < t) {
      throw AccountingError("request " + std::to_string(req.id) + " served outside its window");
    }
    auto [next, grant] = allocate(pool_, req, t, cfg_.link.rate_constant);
    pool_ = next;
    grants_.push_back(grant);
    admitted_ids.push_back(req.id);
    served_ids_.push_back(req.id);
    log(EventKind::admit, req.id, grant.rbs_assigned, grant.processing_assigned,
        grant.comm_power_assigned);
    if (req.is_fake) served_fakes.push_back(grant);
    if (measuring) {
      report_.total_reward += req.weight;
      if (req.is_fake) {
        report_.fake_reward += req.weight;
        ++report_.served_fake;
      } else {
        report_.real_reward += req.weight;
        ++report_.served_real;
      }
    }
  }
  if (!(pool_ == decision.pool_after)) {
    throw AccountingError("scheme pool " + to_string(decision.pool_after) +
                          " disagrees with replay " + to_string(pool_));
  }
  active_.remove(admitted_ids);

  // 6. The adversary learns from the slot's outcome.
  attacker_.observe_outcome(served_fakes, pool_, attack_rng_);

  check_conservation(pool_, grants_);
  ++slot_;
}

MetricsReport run(const SimConfig& cfg, std::ostream* event_log) {
  Simulation sim(cfg, event_log);
  while (!sim.done()) sim.step();
  return sim.report();
}

SimConfig without_attack(SimConfig cfg) {
  cfg.attack.strategy = AttackStrategy::none;
  return cfg;
}

}  // namespace slicing
