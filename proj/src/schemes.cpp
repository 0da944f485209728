#include "slicing/schemes.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace slicing {

void ActiveSet::add(Request req) {
  if (!ids_.insert(req.id).second) {
    throw std::invalid_argument("ActiveSet: duplicate request id " + std::to_string(req.id));
  }
  const int needed = required_rbs(req, rate_constant_);
  entries_.push_back(PendingRequest{std::move(req), needed});
}

std::size_t ActiveSet::expire(Slot slot) {
  const auto before = entries_.size();
  std::erase_if(entries_, [&](const PendingRequest& p) {
    if (p.request.deadline_slot < slot) {
      ids_.erase(p.request.id);
      return true;
    }
    return false;
  });
  return before - entries_.size();
}

void ActiveSet::remove(std::span<const RequestId> ids) {
  if (ids.empty()) return;
  std::unordered_set<RequestId> drop(ids.begin(), ids.end());
  std::erase_if(entries_, [&](const PendingRequest& p) { return drop.count(p.request.id) != 0; });
  for (RequestId id : ids) ids_.erase(id);
}

int budget_bin(double free_fraction) {
  const int bin = static_cast<int>(free_fraction * kBudgetBins + kBudgetEpsilon);
  return std::clamp(bin, 0, kBudgetBins - 1);
}

GnbState make_gnb_state(const ResourcePool& pool, const PendingRequest* req) {
  GnbState s;
  s.free_rbs = pool.free_rbs;
  s.processing_bin = budget_bin(pool.free_processing);
  s.comm_bin = budget_bin(pool.free_comm_power);
  if (req != nullptr) {
    s.weight = req->request.weight;
    s.needed_rbs = std::min(req->needed_rbs, pool.total_rbs);
  }
  return s;
}

StateKey encode(const GnbState& s, int total_rbs, int max_weight) {
  const auto rb_radix = static_cast<StateKey>(total_rbs + 1);
  StateKey key = static_cast<StateKey>(s.free_rbs);
  key = key * kBudgetBins + static_cast<StateKey>(s.processing_bin);
  key = key * kBudgetBins + static_cast<StateKey>(s.comm_bin);
  key = key * static_cast<StateKey>(max_weight + 1) + static_cast<StateKey>(s.weight);
  key = key * rb_radix + static_cast<StateKey>(s.needed_rbs);
  return key;
}

std::string_view to_string(SchemeKind kind) {
  switch (kind) {
    case SchemeKind::qlearning: return "qlearning";
    case SchemeKind::myopic: return "myopic";
    case SchemeKind::fcfs: return "fcfs";
    case SchemeKind::random: return "random";
  }
  return "?";
}

SchemeKind scheme_from_string(std::string_view name) {
  if (name == "qlearning") return SchemeKind::qlearning;
  if (name == "myopic") return SchemeKind::myopic;
  if (name == "fcfs") return SchemeKind::fcfs;
  if (name == "random") return SchemeKind::random;
  throw std::invalid_argument("unknown scheme '" + std::string(name) + "'");
}

namespace {

// Admits in the given order, skipping whatever no longer fits.
Decision admit_in_order(const ActiveSet& active, ResourcePool pool, Slot slot,
                        std::span<const std::size_t> order) {
  Decision d;
  const auto& entries = active.entries();
  for (std::size_t idx : order) {
    const auto& p = entries[idx];
    if (!feasible(pool, p.request, p.needed_rbs)) continue;
    auto [next, grant] = allocate(pool, p.request, slot, active.rate_constant());
    pool = next;
    d.admitted.push_back(Admission{p.request.id, grant});
  }
  d.pool_after = pool;
  return d;
}

std::vector<std::size_t> arrival_order(const ActiveSet& active) {
  std::vector<std::size_t> order(active.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  return order;
}

}  // namespace

Decision decide_myopic(const ActiveSet& active, const ResourcePool& pool, Slot slot) {
  auto order = arrival_order(active);
  const auto& e = active.entries();
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (e[a].request.weight != e[b].request.weight) {
      return e[a].request.weight > e[b].request.weight;
    }
    return e[a].needed_rbs < e[b].needed_rbs;
  });
  return admit_in_order(active, pool, slot, order);
}

Decision decide_fcfs(const ActiveSet& active, const ResourcePool& pool, Slot slot) {
  const auto order = arrival_order(active);
  return admit_in_order(active, pool, slot, order);
}

Decision decide_random(const ActiveSet& active, const ResourcePool& pool, Slot slot, Rng& rng) {
  auto order = arrival_order(active);
  std::shuffle(order.begin(), order.end(), rng);
  return admit_in_order(active, pool, slot, order);
}

QLearningScheme::QLearningScheme(QHyperparams hp, int total_rbs, int max_weight)
    : hp_(hp), total_rbs_(total_rbs), max_weight_(max_weight), table_(2) {
  hp_.validate();
}

Decision QLearningScheme::decide(const ActiveSet& active, const ResourcePool& pool, Slot slot,
                                 Rng& rng) {
  Decision d;
  d.pool_after = pool;
  if (active.empty()) return d;

  auto order = arrival_order(active);
  const auto& e = active.entries();
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (e[a].request.weight != e[b].request.weight) {
      return e[a].request.weight > e[b].request.weight;
    }
    return e[a].request.deadline_slot < e[b].request.deadline_slot;
  });

  const double epsilon = epsilon_at(slot, hp_);
  ResourcePool current = pool;
  for (std::size_t idx : order) {
    const auto& p = e[idx];
    const StateKey state = encode(make_gnb_state(current, &p), total_rbs_, max_weight_);
    if (pending_) {
      q_update(table_, pending_->state, pending_->action, pending_->reward, state, hp_);
    }

    int action = select_action(table_, state, epsilon, rng);
    if (action == kAdmit && !feasible(current, p.request, p.needed_rbs)) action = kSkip;

    double reward = 0.0;
    if (action == kAdmit) {
      auto [next, grant] = allocate(current, p.request, slot, active.rate_constant());
      current = next;
      d.admitted.push_back(Admission{p.request.id, grant});
      reward = static_cast<double>(p.request.weight);
    }
    pending_ = Pending{state, action, reward};
  }
  d.pool_after = current;
  return d;
}

Scheme::Scheme(SchemeKind kind, QHyperparams hp, int total_rbs, int max_weight) : kind_(kind) {
  if (kind == SchemeKind::qlearning) ql_.emplace(hp, total_rbs, max_weight);
}

Decision Scheme::decide(const ActiveSet& active, const ResourcePool& pool, Slot slot, Rng& rng) {
  switch (kind_) {
    case SchemeKind::qlearning: return ql_->decide(active, pool, slot, rng);
    case SchemeKind::myopic: return decide_myopic(active, pool, slot);
    case SchemeKind::fcfs: return decide_fcfs(active, pool, slot);
    case SchemeKind::random: return decide_random(active, pool, slot, rng);
  }
  throw std::logic_error("unhandled scheme");
}

}  // namespace slicing
