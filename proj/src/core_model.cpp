#include "slicing/core_model.hpp"

#include <cmath>
#include <sstream>

namespace slicing {

void validate(const Request& req, int max_weight) {
  if (req.weight < 1 || req.weight > max_weight) {
    throw std::invalid_argument("request weight out of [1, W]");
  }
  if (req.lifetime < 1) throw std::invalid_argument("request lifetime < 1");
  if (req.deadline_slot < req.arrival_slot) {
    throw std::invalid_argument("request deadline before arrival");
  }
  if (!(req.min_processing > 0.0 && req.min_processing <= 1.0)) {
    throw std::invalid_argument("request min_processing outside (0, 1]");
  }
  if (!(req.min_comm_power > 0.0 && req.min_comm_power <= 1.0)) {
    throw std::invalid_argument("request min_comm_power outside (0, 1]");
  }
  if (!(req.min_rate > 0.0)) throw std::invalid_argument("request min_rate <= 0");
  if (!(req.snr > 0.0)) throw std::invalid_argument("request snr <= 0");
}

double ber_from_snr(double snr) {
  if (!(snr > 0.0)) throw std::domain_error("ber_from_snr: snr must be positive");
  return 0.5 * std::erfc(std::sqrt(snr));
}

double achievable_rate(int k, double ber, double rate_constant) {
  if (!(ber >= 0.0 && ber < 1.0)) throw std::domain_error("achievable_rate: ber outside [0, 1)");
  if (k < 0) throw std::domain_error("achievable_rate: negative RB count");
  return rate_constant * static_cast<double>(k) * (1.0 - ber);
}

int min_rbs_for_rate(double rate, double ber, double rate_constant) {
  if (!(rate > 0.0)) throw std::domain_error("min_rbs_for_rate: rate must be positive");
  if (!(ber >= 0.0 && ber < 1.0)) throw std::domain_error("min_rbs_for_rate: ber outside [0, 1)");
  // The closed form can be off by one in floating point when rate is an exact
  // multiple of the per-RB rate; settle it against achievable_rate itself.
  int k = static_cast<int>(std::ceil(rate / (rate_constant * (1.0 - ber))));
  k = std::max(k, 1);
  while (k > 1 && achievable_rate(k - 1, ber, rate_constant) >= rate) --k;
  while (achievable_rate(k, ber, rate_constant) < rate) ++k;
  return k;
}

int required_rbs(const Request& req, double rate_constant) {
  return min_rbs_for_rate(req.min_rate, ber_from_snr(req.snr), rate_constant);
}

bool feasible(const ResourcePool& pool, const Request& req, int needed_rbs) {
  return needed_rbs <= pool.free_rbs &&
         req.min_processing <= pool.free_processing + kBudgetEpsilon &&
         req.min_comm_power <= pool.free_comm_power + kBudgetEpsilon;
}

bool feasible(const ResourcePool& pool, const Request& req, double rate_constant) {
  return feasible(pool, req, required_rbs(req, rate_constant));
}

namespace {

// Snap values within the comparison slack back onto the bounds so rounding
// noise cannot accumulate across thousands of allocate/release cycles.
double snap(double v) {
  if (std::abs(v) < kBudgetEpsilon) return 0.0;
  if (std::abs(v - 1.0) < kBudgetEpsilon) return 1.0;
  return v;
}

}  // namespace

std::pair<ResourcePool, ActiveGrant> allocate(const ResourcePool& pool, const Request& req,
                                              Slot slot, double rate_constant) {
  const int needed = required_rbs(req, rate_constant);
  if (!feasible(pool, req, needed)) {
    throw ContractViolation("allocate: request " + std::to_string(req.id) +
                            " is infeasible against " + to_string(pool));
  }
  ResourcePool next = pool;
  next.free_rbs -= needed;
  next.free_processing = snap(std::max(0.0, next.free_processing - req.min_processing));
  next.free_comm_power = snap(std::max(0.0, next.free_comm_power - req.min_comm_power));

  ActiveGrant grant;
  grant.request_id = req.id;
  grant.rbs_assigned = needed;
  grant.processing_assigned = req.min_processing;
  grant.comm_power_assigned = req.min_comm_power;
  grant.end_slot = slot + req.lifetime;
  grant.is_fake = req.is_fake;
  grant.weight = req.weight;
  return {next, grant};
}

ResourcePool release(const ResourcePool& pool, std::span<const ActiveGrant> grants_ending) {
  ResourcePool next = pool;
  for (const auto& g : grants_ending) {
    next.free_rbs += g.rbs_assigned;
    next.free_processing += g.processing_assigned;
    next.free_comm_power += g.comm_power_assigned;
  }
  next.free_processing = snap(next.free_processing);
  next.free_comm_power = snap(next.free_comm_power);
  check_bounds(next);
  return next;
}

void check_bounds(const ResourcePool& pool) {
  if (pool.free_rbs < 0 || pool.free_rbs > pool.total_rbs ||
      pool.free_processing < -kBudgetEpsilon || pool.free_processing > 1.0 + kBudgetEpsilon ||
      pool.free_comm_power < -kBudgetEpsilon || pool.free_comm_power > 1.0 + kBudgetEpsilon) {
    throw AccountingError("pool out of bounds: " + to_string(pool));
  }
}

void check_conservation(const ResourcePool& pool, std::span<const ActiveGrant> active) {
  check_bounds(pool);
  int rbs = pool.free_rbs;
  double processing = pool.free_processing;
  double comm = pool.free_comm_power;
  for (const auto& g : active) {
    rbs += g.rbs_assigned;
    processing += g.processing_assigned;
    comm += g.comm_power_assigned;
  }
  // Looser than kBudgetEpsilon: the sums carry one rounding error per grant.
  constexpr double tol = 1e-7;
  if (rbs != pool.total_rbs || std::abs(processing - 1.0) > tol || std::abs(comm - 1.0) > tol) {
    std::ostringstream os;
    os << "conservation violated: rbs " << rbs << "/" << pool.total_rbs << ", processing "
       << processing << ", comm " << comm;
    throw AccountingError(os.str());
  }
}

std::string to_string(const ResourcePool& pool) {
  std::ostringstream os;
  os << "{rbs " << pool.free_rbs << "/" << pool.total_rbs << ", processing "
     << pool.free_processing << ", comm " << pool.free_comm_power << "}";
  return os.str();
}

}  // namespace slicing
