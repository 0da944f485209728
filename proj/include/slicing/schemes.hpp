#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "slicing/core_model.hpp"
#include "slicing/rl.hpp"

namespace slicing {

/// A waiting request together with the RB count it needs.
struct PendingRequest {
  Request request;
  int needed_rbs = 0;
};

/// Requests waiting for service, A(t), kept in arrival order.
class ActiveSet {
 public:
  explicit ActiveSet(double rate_constant = kDefaultRateConstant)
      : rate_constant_(rate_constant) {}

  /// Throws std::invalid_argument on a duplicate id.
  void add(Request req);
  /// Drops every request whose deadline_slot < slot; returns how many left.
  std::size_t expire(Slot slot);
  void remove(std::span<const RequestId> ids);

  const std::vector<PendingRequest>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }
  std::size_t size() const { return entries_.size(); }
  bool contains(RequestId id) const { return ids_.count(id) != 0; }
  double rate_constant() const { return rate_constant_; }

 private:
  double rate_constant_;
  std::vector<PendingRequest> entries_;
  std::unordered_set<RequestId> ids_;
};

struct Admission {
  RequestId request_id = 0;
  ActiveGrant grant;
};

struct Decision {
  std::vector<Admission> admitted;
  ResourcePool pool_after;
};

/// Discretized view of the pool plus the features of one request.
struct GnbState {
  int free_rbs = 0;
  int processing_bin = 0;
  int comm_bin = 0;
  int weight = 0;      // 0 when no request is under consideration
  int needed_rbs = 0;  // capped at total RBs
};

inline constexpr int kBudgetBins = 10;
inline constexpr int kAdmit = 0;
inline constexpr int kSkip = 1;

int budget_bin(double free_fraction);
GnbState make_gnb_state(const ResourcePool& pool, const PendingRequest* req);
/// Mixed-radix encoding; injective for fixed total_rbs and max_weight.
StateKey encode(const GnbState& s, int total_rbs, int max_weight);

enum class SchemeKind { qlearning, myopic, fcfs, random };

std::string_view to_string(SchemeKind kind);
/// Throws std::invalid_argument for unknown names.
SchemeKind scheme_from_string(std::string_view name);

Decision decide_myopic(const ActiveSet& active, const ResourcePool& pool, Slot slot);
Decision decide_fcfs(const ActiveSet& active, const ResourcePool& pool, Slot slot);
Decision decide_random(const ActiveSet& active, const ResourcePool& pool, Slot slot, Rng& rng);

/// Q-learning admission. Owns the gNodeB table.
///
/// Requests are visited by weight, heaviest first, ties by earliest
/// deadline, and each gets an admit/skip choice; the reward of admitting is the request's weight. The
/// successor of the last choice in a slot is the first choice of the next
/// slot that has any request, so the table learns across slot boundaries.
class QLearningScheme {
 public:
  QLearningScheme(QHyperparams hp, int total_rbs, int max_weight);

  Decision decide(const ActiveSet& active, const ResourcePool& pool, Slot slot, Rng& rng);

  QTable& table() { return table_; }
  const QTable& table() const { return table_; }

 private:
  struct Pending {
    StateKey state;
    int action;
    double reward;
  };

  QHyperparams hp_;
  int total_rbs_;
  int max_weight_;
  QTable table_;
  std::optional<Pending> pending_;
};

/// Runtime-selected scheme.
class Scheme {
 public:
  Scheme(SchemeKind kind, QHyperparams hp, int total_rbs, int max_weight);

  Decision decide(const ActiveSet& active, const ResourcePool& pool, Slot slot, Rng& rng);
  SchemeKind kind() const { return kind_; }
  QLearningScheme* qlearning() { return ql_ ? &*ql_ : nullptr; }

 private:
  SchemeKind kind_;
  std::optional<QLearningScheme> ql_;
};

}  // namespace slicing
