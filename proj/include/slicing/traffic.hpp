#pragma once

#include <vector>

#include "slicing/core_model.hpp"
#include "slicing/rl.hpp"

namespace slicing {

template <typename T>
struct Range {
  T low{};
  T high{};

  bool valid() const { return low <= high; }
  friend bool operator==(const Range&, const Range&) = default;
};

/// Real-UE request distributions. Every field is sampled uniformly.
struct TrafficConfig {
  int ue_count = 3;
  double arrival_prob = 0.5;
  Range<int> weight_range{1, 5};
  Range<int> lifetime_range{1, 10};
  Range<int> deadline_offset_range{1, 20};
  Range<double> snr_range{1.5, 3.0};
  Range<double> rate_demand_range{0.5 * kDefaultRateConstant, 3.0 * kDefaultRateConstant};
  Range<double> processing_range{0.05, 0.25};
  Range<double> comm_power_range{0.05, 0.25};

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
  int max_weight() const { return weight_range.high; }
};

/// Monotonic id source shared by real and fake requests of one run.
class RequestIds {
 public:
  RequestId next() { return next_++; }

 private:
  RequestId next_ = 1;
};

Request sample_request(int ue, Slot slot, const TrafficConfig& cfg, Rng& rng, RequestIds& ids);

/// One Bernoulli(arrival_prob) draw per UE, in UE order.
std::vector<Request> generate_arrivals(Slot slot, const TrafficConfig& cfg, Rng& rng,
                                       RequestIds& ids);

/// Lifetime and deadline drawn the way real requests draw them.
struct Timing {
  int lifetime = 1;
  Slot deadline_slot = 0;
};
Timing sample_timing(Slot slot, const TrafficConfig& cfg, Rng& rng);

}  // namespace slicing
