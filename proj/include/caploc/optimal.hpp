#pragma once

#include <optional>
#include <string>

#include "caploc/core.hpp"
#include "caploc/mechanisms.hpp"

namespace caploc {

class GuardExceeded : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

struct OptResult {
  Objective objective;
  Rational value;
  Solution witness;
};

inline constexpr std::size_t kMaxDpFacilities = 5;
inline constexpr std::size_t kMaxBruteForceAgents = 8;

/// Exact optimum over contiguous blocks of the sorted agents, one block per
/// facility (blocks may be empty), trying every facility-to-block order.
/// O(m! * m * n^2).
OptResult opt_dp(const Instance& inst, Objective obj);

/// Enumerates every capacity-feasible assignment (crossing ones included) and
/// places each facility optimally for its group. n <= 8.
OptResult opt_bruteforce(const Instance& inst, Objective obj);

struct RatioRecord {
  std::string mechanism;
  std::string instance;
  Objective objective = Objective::Total;
  Rational mechanism_welfare;
  Rational optimal_welfare;
  std::optional<Rational> ratio;  // nullopt: opt = 0 < mechanism welfare

  bool unbounded() const { return !ratio.has_value(); }
};

/// welfare(mechanism) / opt. 0/0 is recorded as 1.
RatioRecord opt_welfare_ratio(const Instance& inst, const MechanismId& mech, Objective obj,
                              std::string instance_id = {});

/// Ratio from two welfare values, following the same conventions.
std::optional<Rational> welfare_ratio(const Rational& mechanism_welfare, const Rational& optimal_welfare);

}  // namespace caploc
