#include "slicing/rl.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace slicing {

void QHyperparams::validate() const {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha: must be in (0, 1]");
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw std::invalid_argument("gamma: must be in [0, 1]");
  if (!(epsilon_end >= 0.0 && epsilon_end <= epsilon_start && epsilon_start <= 1.0)) {
    throw std::invalid_argument("epsilon_end: must satisfy 0 <= epsilon_end <= epsilon_start <= 1");
  }
  if (epsilon_decay_slots < 0) throw std::invalid_argument("epsilon_decay_slots: must be >= 0");
}

QTable::QTable(int action_count)
    : init_([action_count](StateKey) {
        return std::vector<double>(static_cast<std::size_t>(action_count), 0.0);
      }) {
  if (action_count < 1) throw std::invalid_argument("QTable needs at least one action");
}

QTable::QTable(Initializer init) : init_(std::move(init)) {}

std::vector<double>& QTable::row(StateKey state) {
  auto it = entries_.find(state);
  if (it == entries_.end()) {
    auto values = init_(state);
    if (values.empty()) throw std::logic_error("QTable initializer produced no actions");
    it = entries_.emplace(state, std::move(values)).first;
  }
  return it->second;
}

std::vector<double> QTable::row(StateKey state) const {
  auto it = entries_.find(state);
  if (it != entries_.end()) return it->second;
  auto values = init_(state);
  if (values.empty()) throw std::logic_error("QTable initializer produced no actions");
  return values;
}

double QTable::value(StateKey state, int action) const {
  auto it = entries_.find(state);
  if (it != entries_.end()) return it->second.at(static_cast<std::size_t>(action));
  return row(state).at(static_cast<std::size_t>(action));
}

void QTable::set(StateKey state, int action, double v) {
  if (!std::isfinite(v)) throw std::domain_error("QTable values must be finite");
  row(state).at(static_cast<std::size_t>(action)) = v;
}

int QTable::action_count(StateKey state) const {
  auto it = entries_.find(state);
  if (it != entries_.end()) return static_cast<int>(it->second.size());
  return static_cast<int>(row(state).size());
}

double QTable::max_value(StateKey state) const {
  auto it = entries_.find(state);
  if (it != entries_.end()) return *std::max_element(it->second.begin(), it->second.end());
  const auto values = row(state);
  return *std::max_element(values.begin(), values.end());
}

void QTable::dump(std::ostream& os) const {
  std::vector<StateKey> keys;
  keys.reserve(entries_.size());
  for (const auto& [k, _] : entries_) keys.push_back(k);
  std::sort(keys.begin(), keys.end());
  for (StateKey k : keys) {
    const auto& values = entries_.at(k);
    for (std::size_t a = 0; a < values.size(); ++a) {
      os << k << ' ' << a << ' ' << values[a] << '\n';
    }
  }
}

void q_update(QTable& table, StateKey state, int action, double reward, StateKey next_state,
              const QHyperparams& hp) {
  const double target = reward + hp.gamma * table.max_value(next_state);
  auto& values = table.row(state);
  double& q = values.at(static_cast<std::size_t>(action));
  q = (1.0 - hp.alpha) * q + hp.alpha * target;
}

void q_update_terminal(QTable& table, StateKey state, int action, double reward,
                       const QHyperparams& hp) {
  auto& values = table.row(state);
  double& q = values.at(static_cast<std::size_t>(action));
  q = (1.0 - hp.alpha) * q + hp.alpha * reward;
}

int greedy_action(const QTable& table, StateKey state) {
  const auto values = table.row(state);
  // max_element returns the first maximum, i.e. the lowest index on ties.
  return static_cast<int>(std::max_element(values.begin(), values.end()) - values.begin());
}

int select_action(const QTable& table, StateKey state, double epsilon, Rng& rng) {
  const int n = table.action_count(state);
  if (n < 1) throw std::logic_error("select_action: state has no actions");
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  if (coin(rng) < epsilon) {
    std::uniform_int_distribution<int> pick(0, n - 1);
    return pick(rng);
  }
  return greedy_action(table, state);
}

double epsilon_at(std::int64_t slot, const QHyperparams& hp) {
  if (slot < 0) throw std::invalid_argument("epsilon_at: negative slot");
  if (hp.epsilon_decay_slots <= 0 || slot >= hp.epsilon_decay_slots) return hp.epsilon_end;
  const double frac = static_cast<double>(slot) / static_cast<double>(hp.epsilon_decay_slots);
  return hp.epsilon_start + (hp.epsilon_end - hp.epsilon_start) * frac;
}

}  // namespace slicing
