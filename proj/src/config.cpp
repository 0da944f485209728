#include "slicing/config.hpp"

#include <algorithm>
#include <fstream>
#include <initializer_list>
#include <stdexcept>
#include <string_view>
#include <vector>

namespace slicing {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw std::invalid_argument(path + ": " + what);
}

// One JSON object plus its dotted path, for error messages.
class Section {
 public:
  Section(const json& j, std::string path, std::initializer_list<std::string_view> known)
      : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail(path_.empty() ? "config" : path_, "expected an object");
    for (const auto& [key, value] : j_.items()) {
      if (std::find(known.begin(), known.end(), key) == known.end()) {
        fail(field(key), "unknown key");
      }
    }
  }

  std::string field(std::string_view key) const {
    return path_.empty() ? std::string(key) : path_ + "." + std::string(key);
  }

  const json* find(std::string_view key) const {
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  Section sub(std::string_view key, std::initializer_list<std::string_view> known) const {
    return Section(j_.at(key), field(key), known);
  }
  bool has(std::string_view key) const { return find(key) != nullptr; }

  void read(std::string_view key, double& out) const {
    if (const json* v = find(key)) {
      if (!v->is_number()) fail(field(key), "expected a number");
      out = v->get<double>();
    }
  }

  template <class Int>
    requires std::is_integral_v<Int>
  void read(std::string_view key, Int& out) const {
    if (const json* v = find(key)) {
      if (!v->is_number_integer()) fail(field(key), "expected an integer");
      if constexpr (std::is_unsigned_v<Int>) {
        if (v->is_number_unsigned()) {
          out = v->get<Int>();
          return;
        }
        fail(field(key), "expected a non-negative integer");
      }
      out = v->get<Int>();
    }
  }

  template <class T>
  void read(std::string_view key, Range<T>& out) const {
    if (const json* v = find(key)) {
      if (!v->is_array() || v->size() != 2) fail(field(key), "expected [low, high]");
      for (const auto& x : *v) {
        if (std::is_integral_v<T> ? !x.is_number_integer() : !x.is_number()) {
          fail(field(key), std::is_integral_v<T> ? "expected integers" : "expected numbers");
        }
      }
      out = {(*v)[0].get<T>(), (*v)[1].get<T>()};
    }
  }

  template <class Enum, class Parse>
  void read_enum(std::string_view key, Enum& out, Parse parse) const {
    if (const json* v = find(key)) {
      if (!v->is_string()) fail(field(key), "expected a string");
      try {
        out = parse(v->get<std::string>());
      } catch (const std::invalid_argument& e) {
        fail(field(key), e.what());
      }
    }
  }

 private:
  const json& j_;
  std::string path_;
};

void read_hp(const Section& parent, std::string_view key, QHyperparams& hp) {
  if (!parent.has(key)) return;
  const Section s = parent.sub(
      key, {"alpha", "gamma", "epsilon_start", "epsilon_end", "epsilon_decay_slots"});
  s.read("alpha", hp.alpha);
  s.read("gamma", hp.gamma);
  s.read("epsilon_start", hp.epsilon_start);
  s.read("epsilon_end", hp.epsilon_end);
  s.read("epsilon_decay_slots", hp.epsilon_decay_slots);
}

void read_table(const Section& s, std::string_view key, const std::filesystem::path& base_dir,
                WeightTable& out) {
  const json* v = s.find(key);
  if (v == nullptr) return;
  try {
    if (v->is_string()) {
      std::filesystem::path p = v->get<std::string>();
      if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
      out = WeightTable::load(p.string());
    } else if (v->is_array()) {
      out = WeightTable::from_rows(v->get<std::vector<std::vector<double>>>());
    } else {
      fail(s.field(key), "expected a file path or an array of rows");
    }
  } catch (const json::exception& e) {
    fail(s.field(key), e.what());
  } catch (const std::runtime_error& e) {
    fail(s.field(key), e.what());
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    if (msg.starts_with(s.field(key))) throw;
    fail(s.field(key), msg);
  }
}

void read_traffic(const Section& root, TrafficConfig& t) {
  if (!root.has("traffic")) return;
  const Section s = root.sub("traffic", {"ue_count", "arrival_prob", "weight_range",
                                         "lifetime_range", "deadline_offset_range", "snr_range",
                                         "snr_band", "rate_demand_range", "processing_range",
                                         "comm_power_range"});
  s.read("ue_count", t.ue_count);
  s.read("arrival_prob", t.arrival_prob);
  s.read("weight_range", t.weight_range);
  s.read("lifetime_range", t.lifetime_range);
  s.read("deadline_offset_range", t.deadline_offset_range);
  if (s.has("snr_band") && s.has("snr_range")) {
    fail(s.field("snr_band"), "give either snr_band or snr_range, not both");
  }
  s.read("snr_range", t.snr_range);
  SnrBand band{};
  if (s.has("snr_band")) {
    s.read_enum("snr_band", band, snr_band_from_string);
    t.snr_range = snr_band_range(band);
  }
  s.read("rate_demand_range", t.rate_demand_range);
  s.read("processing_range", t.processing_range);
  s.read("comm_power_range", t.comm_power_range);
}

void read_attack(const Section& root, const std::filesystem::path& base_dir, AttackConfig& a) {
  if (!root.has("attack")) return;
  const Section s =
      root.sub("attack", {"strategy", "fake_rate", "weight_policy", "aw3_decrease_prob",
                          "sensing", "reward_mode", "rdw_table", "rdlw_table"});
  s.read_enum("strategy", a.strategy, attack_strategy_from_string);
  s.read("fake_rate", a.fake_rate);
  s.read_enum("weight_policy", a.weight_policy, weight_policy_from_string);
  s.read("aw3_decrease_prob", a.aw3_decrease_prob);
  if (s.has("sensing")) {
    const Section se = s.sub("sensing", {"p_false_alarm", "p_misdetect"});
    se.read("p_false_alarm", a.sensing.p_false_alarm);
    se.read("p_misdetect", a.sensing.p_misdetect);
  }
  s.read_enum("reward_mode", a.reward_mode, reward_mode_from_string);
  read_table(s, "rdw_table", base_dir, a.rdw_table);
  read_table(s, "rdlw_table", base_dir, a.rdlw_table);
}

json table_rows(const WeightTable& t) {
  json rows = json::array();
  for (int w = 1; w <= t.weights(); ++w) {
    json row = json::array();
    for (int i = 1; i <= t.states(); ++i) row.push_back(t.prob(i, w));
    rows.push_back(std::move(row));
  }
  return rows;
}

template <class T>
json range(const Range<T>& r) {
  return json::array({r.low, r.high});
}

json hp_json(const QHyperparams& hp) {
  return {{"alpha", hp.alpha},
          {"gamma", hp.gamma},
          {"epsilon_start", hp.epsilon_start},
          {"epsilon_end", hp.epsilon_end},
          {"epsilon_decay_slots", hp.epsilon_decay_slots}};
}

}  // namespace

SimConfig config_from_json(const json& j, const std::filesystem::path& base_dir) {
  SimConfig cfg;
  const Section root(j, "", {"traffic", "attack", "scheme", "gnb_hp", "attacker_hp",
                             "total_slots", "measure_window", "link", "seed"});
  read_traffic(root, cfg.traffic);
  read_attack(root, base_dir, cfg.attack);
  root.read_enum("scheme", cfg.scheme, scheme_from_string);
  read_hp(root, "gnb_hp", cfg.gnb_hp);
  read_hp(root, "attacker_hp", cfg.attacker_hp);
  root.read("total_slots", cfg.total_slots);
  root.read("measure_window", cfg.measure_window);
  if (root.has("link")) {
    const Section s = root.sub("link", {"rate_constant", "rb_count"});
    s.read("rate_constant", cfg.link.rate_constant);
    s.read("rb_count", cfg.link.rb_count);
  }
  root.read("seed", cfg.seed);
  cfg.validate();
  return cfg;
}

SimConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(path.string() + ": " + e.what());
  }
  return config_from_json(j, path.parent_path());
}

json config_to_json(const SimConfig& cfg) {
  const auto& t = cfg.traffic;
  const auto& a = cfg.attack;
  return {
      {"traffic",
       {{"ue_count", t.ue_count},
        {"arrival_prob", t.arrival_prob},
        {"weight_range", range(t.weight_range)},
        {"lifetime_range", range(t.lifetime_range)},
        {"deadline_offset_range", range(t.deadline_offset_range)},
        {"snr_range", range(t.snr_range)},
        {"rate_demand_range", range(t.rate_demand_range)},
        {"processing_range", range(t.processing_range)},
        {"comm_power_range", range(t.comm_power_range)}}},
      {"attack",
       {{"strategy", to_string(a.strategy)},
        {"fake_rate", a.fake_rate},
        {"weight_policy", to_string(a.weight_policy)},
        {"aw3_decrease_prob", a.aw3_decrease_prob},
        {"sensing",
         {{"p_false_alarm", a.sensing.p_false_alarm}, {"p_misdetect", a.sensing.p_misdetect}}},
        {"reward_mode", to_string(a.reward_mode)},
        {"rdw_table", table_rows(a.rdw_table)},
        {"rdlw_table", table_rows(a.rdlw_table)}}},
      {"scheme", to_string(cfg.scheme)},
      {"gnb_hp", hp_json(cfg.gnb_hp)},
      {"attacker_hp", hp_json(cfg.attacker_hp)},
      {"total_slots", cfg.total_slots},
      {"measure_window", cfg.measure_window},
      {"link", {{"rate_constant", cfg.link.rate_constant}, {"rb_count", cfg.link.rb_count}}},
      {"seed", cfg.seed},
  };
}

json report_to_json(const MetricsReport& r) {
  json j = {
      {"total_reward", r.total_reward},
      {"real_reward", r.real_reward},
      {"fake_reward", r.fake_reward},
      {"requested_real_reward", r.requested_real_reward},
      {"requested_fake_reward", r.requested_fake_reward},
      {"ratio_percent", nullptr},
      {"fake_weight_histogram", r.fake_weight_histogram},
      {"served_real", r.served_real},
      {"served_fake", r.served_fake},
  };
  if (r.ratio_percent) j["ratio_percent"] = *r.ratio_percent;
  return j;
}

}  // namespace slicing
