#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>

namespace slicing {

using Slot = std::int64_t;
using RequestId = std::uint64_t;

/// Bits per second carried by one RB with QPSK, 60 kHz spacing, 10 MHz band.
inline constexpr double kDefaultRateConstant = 12.59e6;

/// Slack for comparisons on fractional (processing / power) budgets.
inline constexpr double kBudgetEpsilon = 1e-9;

/// Thrown when a pool would leave its [0, total] bounds.
class AccountingError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Thrown when an operation is called with its precondition violated.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// A slicing request, real or fake.
///
/// `ue` is empty for requests crafted by the adversary. `is_fake` is ground
/// truth and only metrics may look at it; schemes must not branch on it.
struct Request {
  RequestId id = 0;
  std::optional<int> ue;
  bool is_fake = false;
  int weight = 1;
  double min_rate = 0.0;        // bps
  double min_processing = 0.0;  // fraction of CPU
  double min_comm_power = 0.0;  // fraction of transmit power
  double snr = 1.0;             // linear
  int lifetime = 1;             // slots
  Slot deadline_slot = 0;       // last slot at which service may start
  Slot arrival_slot = 0;

  friend bool operator==(const Request&, const Request&) = default;
};

/// Checks the field invariants of a request; throws std::invalid_argument.
void validate(const Request& req, int max_weight);

struct ResourcePool {
  int total_rbs = 0;
  int free_rbs = 0;
  double free_processing = 1.0;
  double free_comm_power = 1.0;

  static ResourcePool full(int total_rbs) {
    return ResourcePool{total_rbs, total_rbs, 1.0, 1.0};
  }

  friend bool operator==(const ResourcePool&, const ResourcePool&) = default;
};

/// Resources held by an admitted request until `end_slot`.
struct ActiveGrant {
  RequestId request_id = 0;
  int rbs_assigned = 0;
  double processing_assigned = 0.0;
  double comm_power_assigned = 0.0;
  Slot end_slot = 0;
  bool is_fake = false;
  int weight = 0;

  friend bool operator==(const ActiveGrant&, const ActiveGrant&) = default;
};

struct LinkParams {
  double rate_constant = kDefaultRateConstant;
  int rb_count = 11;
};

/// Per-bit error probability of coherent QPSK: 0.5 * erfc(sqrt(snr)).
/// Throws std::domain_error for snr <= 0.
double ber_from_snr(double snr);

/// c * k * (1 - ber). Throws std::domain_error for ber outside [0, 1) or k < 0.
double achievable_rate(int k, double ber, double rate_constant = kDefaultRateConstant);

/// Smallest k with achievable_rate(k, ber) >= rate.
int min_rbs_for_rate(double rate, double ber, double rate_constant = kDefaultRateConstant);

/// RBs a request needs under the minimal-grant rule.
int required_rbs(const Request& req, double rate_constant = kDefaultRateConstant);

bool feasible(const ResourcePool& pool, const Request& req,
              double rate_constant = kDefaultRateConstant);

/// Same test with the RB need already known.
bool feasible(const ResourcePool& pool, const Request& req, int needed_rbs);

/// Grants exactly the request's minima. Throws ContractViolation if infeasible.
std::pair<ResourcePool, ActiveGrant> allocate(const ResourcePool& pool, const Request& req,
                                              Slot slot,
                                              double rate_constant = kDefaultRateConstant);

/// Returns every dimension of the grants to the pool. Throws AccountingError
/// if the result would exceed the pool's totals.
ResourcePool release(const ResourcePool& pool, std::span<const ActiveGrant> grants_ending);

/// Throws AccountingError unless the pool is within its bounds.
void check_bounds(const ResourcePool& pool);

/// Throws AccountingError unless free + held == total for all three budgets.
void check_conservation(const ResourcePool& pool, std::span<const ActiveGrant> active);

std::string to_string(const ResourcePool& pool);

}  // namespace slicing
