#pragma once

#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "caploc/core.hpp"

namespace caploc {

/// How capacitated Percentile/jLeftkRight map facilities onto location slots.
enum class CapacityOrder {
  Ascending,   // smallest capacity on the left, ties by facility index
  Descending,  // largest capacity on the left, ties by facility index
};

/// Uncapacitated variants assign every agent to its nearest facility (ties to
/// the lower facility index) and require non-binding capacities.
struct Allocation {
  bool capacitated = false;
  CapacityOrder order = CapacityOrder::Ascending;
  friend bool operator==(const Allocation&, const Allocation&) = default;
};

struct Percentile {
  std::vector<Rational> p;  // 0 <= p_1 <= ... <= p_m <= 1
  Allocation allocation;
  friend bool operator==(const Percentile&, const Percentile&) = default;
};

struct JLeftKRight {
  int left = 1;
  int right = 1;
  Allocation allocation;
  friend bool operator==(const JLeftKRight&, const JLeftKRight&) = default;
};

struct InnerPoint {
  friend bool operator==(const InnerPoint&, const InnerPoint&) = default;
};

struct ExtendedEndPoint {
  friend bool operator==(const ExtendedEndPoint&, const ExtendedEndPoint&) = default;
};

/// Capacitated serial dictatorship; `order` lists agent ids (0-based).
struct CapSD {
  std::vector<AgentId> order;
  friend bool operator==(const CapSD&, const CapSD&) = default;
};

// Three-agent fixtures with capacities (1,2): the small facility sits at x1
// serving agent 1 and the large one follows one of the rules below.

/// Large facility at x3.
struct FixtureB {
  friend bool operator==(const FixtureB&, const FixtureB&) = default;
};

/// Large facility at min(x3, x2 + threshold).
struct FixtureC {
  Rational threshold{1, 4};
  friend bool operator==(const FixtureC&, const FixtureC&) = default;
};

/// Large facility at x2 + g(x3 - x2) where g passes through (a, c) and (b, a),
/// c < a < b, lagging strictly behind the rightmost agent.
struct FixtureD {
  Rational a{1, 2};
  Rational b{3, 4};
  Rational c{1, 4};
  friend bool operator==(const FixtureD&, const FixtureD&) = default;
};

using MechanismId = std::variant<Percentile, JLeftKRight, InnerPoint, ExtendedEndPoint, CapSD,
                                 FixtureB, FixtureC, FixtureD>;

/// Checks the parameter invariants; throws std::invalid_argument.
void validate_mechanism(const MechanismId& mech);

/// Canonical strings:
///   percentile:uncap:1/2   percentile:cap:1/4,3/4   percentile:capdesc:0,1
///   jlkr:uncap:2,0         jlkr:cap:1,1             jlkr:capdesc:1,1
///   innerpoint   extendedendpoint   capsd:4,3,2,1 (1-based agent ids)
///   fixture-b   fixture-c:1/4   fixture-d:1/2,3/4,1/4
/// `parse_mechanism` also accepts the aliases median, leftmost, endpoint,
/// twoleftpeaks, tworightpeaks, threeleftpeaks, threerightpeaks, each with an
/// optional ":cap" / ":capdesc" suffix.
std::string to_string(const MechanismId& mech);
MechanismId parse_mechanism(std::string_view text);

/// Number of facilities the mechanism places, when it is fixed by its parameters.
std::optional<std::size_t> facility_count(const MechanismId& mech);

/// Whether `run_mechanism` accepts this instance (shape preconditions only).
bool applicable(const MechanismId& mech, const Instance& inst);

// Individual mechanisms. Each returns a solution feasible for `inst`.
Solution run_percentile(const Instance& inst, const Percentile& params);
Solution run_jleftkright(const Instance& inst, const JLeftKRight& params);
Solution run_innerpoint(const Instance& inst);
Solution run_extended_endpoint(const Instance& inst);
Solution run_capsd(const Instance& inst, const CapSD& params);
Solution run_fixture(const Instance& inst, const FixtureB&);
Solution run_fixture(const Instance& inst, const FixtureC& params);
Solution run_fixture(const Instance& inst, const FixtureD& params);

/// Dispatches and checks the global solution invariants on the result.
Solution run_mechanism(const MechanismId& mech, const Instance& inst);

/// Which ExtendedEndPoint branch fired.
struct EndPointCase {
  int number = 1;        // 1, 2 or 3
  bool mirrored = false; // |X1| < |X2|
};
EndPointCase extended_endpoint_case(const Instance& inst);

/// Facility slot permutation used by capacitated allocation: slot t (t-th
/// location from the left) is occupied by facility result[t].
std::vector<FacilityIndex> allocation_order(std::span<const int> capacities, CapacityOrder order);

/// Solution for facilities at `slots` (non-decreasing) under `allocation`.
Solution place_and_assign(const Instance& inst, std::vector<Rational> slots, const Allocation& allocation);

}  // namespace caploc
