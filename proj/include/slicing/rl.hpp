#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <random>
#include <unordered_map>
#include <vector>

namespace slicing {

using Rng = std::mt19937_64;
using StateKey = std::uint64_t;

/// Learning rate, discount and a linearly annealed exploration schedule.
struct QHyperparams {
  double alpha = 0.1;
  double gamma = 0.9;
  double epsilon_start = 0.1;
  double epsilon_end = 0.01;
  std::int64_t epsilon_decay_slots = 5000;

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
};

/// Tabular action values keyed by an opaque state encoding.
///
/// States are materialized on first touch by the owner's initializer, which
/// fixes both the number of actions and their starting values for that state.
class QTable {
 public:
  using Initializer = std::function<std::vector<double>(StateKey)>;

  /// Every state gets `action_count` actions initialized to zero.
  explicit QTable(int action_count);
  explicit QTable(Initializer init);

  /// Values of `state` (materialized if new). Never empty.
  std::vector<double>& row(StateKey state);
  /// Read-only view; for a state never touched, the initializer's values.
  std::vector<double> row(StateKey state) const;

  double value(StateKey state, int action) const;
  void set(StateKey state, int action, double v);
  int action_count(StateKey state) const;
  double max_value(StateKey state) const;

  std::size_t materialized_states() const { return entries_.size(); }

  /// One `state action value` line per entry, states ascending.
  void dump(std::ostream& os) const;

 private:
  Initializer init_;
  std::unordered_map<StateKey, std::vector<double>> entries_;
};

/// Q(s,a) <- (1-alpha) Q(s,a) + alpha (r + gamma max_a' Q(s_next, a')).
void q_update(QTable& table, StateKey state, int action, double reward, StateKey next_state,
              const QHyperparams& hp);

/// Same update with no successor (bootstrap term is zero).
void q_update_terminal(QTable& table, StateKey state, int action, double reward,
                       const QHyperparams& hp);

/// Argmax over the state's actions, ties to the lowest index.
int greedy_action(const QTable& table, StateKey state);

/// With probability epsilon a uniform action, otherwise greedy_action.
int select_action(const QTable& table, StateKey state, double epsilon, Rng& rng);

double epsilon_at(std::int64_t slot, const QHyperparams& hp);

}  // namespace slicing
