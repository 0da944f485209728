#include "slicing/traffic.hpp"

#include <stdexcept>
#include <string>

namespace slicing {

namespace {

template <typename T>
void require_range(const Range<T>& r, const char* name) {
  if (!r.valid()) throw std::invalid_argument(std::string("traffic.") + name + ": low > high");
}

int uniform_int(Rng& rng, Range<int> r) {
  return std::uniform_int_distribution<int>(r.low, r.high)(rng);
}

double uniform_real(Rng& rng, Range<double> r) {
  if (r.low == r.high) return r.low;
  return std::uniform_real_distribution<double>(r.low, r.high)(rng);
}

}  // namespace

void TrafficConfig::validate() const {
  if (ue_count < 0) throw std::invalid_argument("traffic.ue_count: must be >= 0");
  if (!(arrival_prob >= 0.0 && arrival_prob <= 1.0)) {
    throw std::invalid_argument("traffic.arrival_prob: must be in [0, 1]");
  }
  require_range(weight_range, "weight_range");
  require_range(lifetime_range, "lifetime_range");
  require_range(deadline_offset_range, "deadline_offset_range");
  require_range(snr_range, "snr_range");
  require_range(rate_demand_range, "rate_demand_range");
  require_range(processing_range, "processing_range");
  require_range(comm_power_range, "comm_power_range");
  if (weight_range.low < 1) throw std::invalid_argument("traffic.weight_range: low must be >= 1");
  if (lifetime_range.low < 1) {
    throw std::invalid_argument("traffic.lifetime_range: low must be >= 1");
  }
  if (deadline_offset_range.low < 0) {
    throw std::invalid_argument("traffic.deadline_offset_range: low must be >= 0");
  }
  if (!(snr_range.low > 0.0)) throw std::invalid_argument("traffic.snr_range: low must be > 0");
  if (!(rate_demand_range.low > 0.0)) {
    throw std::invalid_argument("traffic.rate_demand_range: low must be > 0");
  }
  if (!(processing_range.low > 0.0 && processing_range.high <= 1.0)) {
    throw std::invalid_argument("traffic.processing_range: must lie in (0, 1]");
  }
  if (!(comm_power_range.low > 0.0 && comm_power_range.high <= 1.0)) {
    throw std::invalid_argument("traffic.comm_power_range: must lie in (0, 1]");
  }
}

Timing sample_timing(Slot slot, const TrafficConfig& cfg, Rng& rng) {
  Timing t;
  t.lifetime = uniform_int(rng, cfg.lifetime_range);
  t.deadline_slot = slot + uniform_int(rng, cfg.deadline_offset_range);
  return t;
}

Request sample_request(int ue, Slot slot, const TrafficConfig& cfg, Rng& rng, RequestIds& ids) {
  if (ue < 0 || ue >= cfg.ue_count) throw std::out_of_range("sample_request: UE index out of range");
  Request req;
  req.id = ids.next();
  req.ue = ue;
  req.is_fake = false;
  req.arrival_slot = slot;
  // Draw order is part of the reproducibility contract; do not reorder.
  req.weight = uniform_int(rng, cfg.weight_range);
  const Timing timing = sample_timing(slot, cfg, rng);
  req.lifetime = timing.lifetime;
  req.deadline_slot = timing.deadline_slot;
  req.snr = uniform_real(rng, cfg.snr_range);
  req.min_rate = uniform_real(rng, cfg.rate_demand_range);
  req.min_processing = uniform_real(rng, cfg.processing_range);
  req.min_comm_power = uniform_real(rng, cfg.comm_power_range);
  return req;
}

std::vector<Request> generate_arrivals(Slot slot, const TrafficConfig& cfg, Rng& rng,
                                       RequestIds& ids) {
  if (slot < 0) throw std::invalid_argument("generate_arrivals: negative slot");
  std::vector<Request> out;
  std::bernoulli_distribution arrives(cfg.arrival_prob);
  for (int ue = 0; ue < cfg.ue_count; ++ue) {
    if (arrives(rng)) out.push_back(sample_request(ue, slot, cfg, rng, ids));
  }
  return out;
}

}  // namespace slicing
