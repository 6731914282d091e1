#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "caploc/rational.hpp"

namespace caploc {

using AgentId = std::size_t;
using FacilityIndex = std::size_t;

class InvalidInstance : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Thrown by mechanisms whose preconditions on (n, capacities) do not hold.
class UnsupportedInstance : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

enum class Objective { Total, Max };

std::string_view to_string(Objective obj);
Objective parse_objective(std::string_view text);

/// Agents sorted by (location, id) plus the facility capacity vector.
///
/// Position i in the sorted order is "agent i" of the welfare formulas; id(i)
/// recovers the identity the agent was reported under.
class Instance {
public:
  /// `locations[k]` is the report of agent id k.
  Instance(std::vector<Rational> locations, std::vector<int> capacities);

  std::size_t num_agents() const { return locations_.size(); }
  std::size_t num_facilities() const { return capacities_.size(); }

  const Rational& location(std::size_t pos) const { return locations_[pos]; }
  AgentId id(std::size_t pos) const { return ids_[pos]; }
  std::size_t position_of(AgentId id) const { return positions_[id]; }

  std::span<const Rational> locations() const { return locations_; }
  std::span<const AgentId> ids() const { return ids_; }
  std::span<const int> capacities() const { return capacities_; }
  int capacity(FacilityIndex j) const { return capacities_[j]; }
  long total_capacity() const;
  long spare_capacity() const { return total_capacity() - static_cast<long>(num_agents()); }

  /// Reports indexed by agent id (the order the instance was built from).
  std::vector<Rational> reports_by_id() const;

  /// Copy with agent `id` reporting `report` instead.
  Instance with_report(AgentId id, const Rational& report) const;
  Instance with_reports(std::span<const AgentId> ids, const Rational& report) const;

  const Rational& leftmost() const { return locations_.front(); }
  const Rational& rightmost() const { return locations_.back(); }

  friend bool operator==(const Instance&, const Instance&) = default;

private:
  std::vector<Rational> locations_;  // sorted
  std::vector<AgentId> ids_;         // ids_[pos]
  std::vector<std::size_t> positions_;  // positions_[id]
  std::vector<int> capacities_;
};

/// Facility locations plus the facility serving each agent, by sorted position.
struct Solution {
  std::vector<Rational> locations;
  std::vector<FacilityIndex> assignment;

  const Rational& serving_location(std::size_t pos) const { return locations[assignment[pos]]; }

  friend bool operator==(const Solution&, const Solution&) = default;
};

struct Violation {
  enum class Kind { LocationCount, AssignmentLength, FacilityOutOfRange, CapacityExceeded };
  Kind kind;
  std::optional<FacilityIndex> facility;
  std::string message;
};

class InfeasibleSolution : public std::invalid_argument {
public:
  explicit InfeasibleSolution(Violation v)
      : std::invalid_argument(v.message), violation_(std::move(v)) {}
  const Violation& violation() const { return violation_; }

private:
  Violation violation_;
};

std::optional<Violation> validate_solution(const Instance& inst, const Solution& sol);

/// Distance of the agent at sorted position `pos` to its serving facility.
Rational agent_distance(const Instance& inst, const Solution& sol, std::size_t pos);
std::vector<Rational> agent_distances(const Instance& inst, const Solution& sol);

Rational total_distance(const Instance& inst, const Solution& sol);
Rational max_distance(const Instance& inst, const Solution& sol);
Rational welfare(const Instance& inst, const Solution& sol, Objective obj);

/// Validates `sol` and the max <= total <= n * max sandwich, counting every
/// call. Throws InfeasibleSolution or std::logic_error.
void check_solution_invariants(const Instance& inst, const Solution& sol);

struct InvariantCounters {
  std::uint64_t checked = 0;
  std::uint64_t violations = 0;
};
InvariantCounters invariant_counters();

// Instance documents: {"agents": ["p/q", ...], "capacities": [c, ...]}
Instance parse_instance(std::string_view json_text);
std::string serialize_instance(const Instance& inst);

/// "0,1/2,1" -> locations; used for inline CLI instances.
std::vector<Rational> parse_rational_list(std::string_view text);
std::vector<int> parse_int_list(std::string_view text);
std::string format_rationals(std::span<const Rational> values);

/// One-line human readable description "(0,1/2,1) c=(2,2)".
std::string describe(const Instance& inst);

// ---------------------------------------------------------------- generation

struct GeneratorSpec {
  std::string family = "uniform";
  int n = 4;
  std::vector<int> capacities{2, 2};
  int k = 2;            // ratio-total-k, thm7-family
  int c = 3;            // thm6-spare facility capacity
  int count = 1;        // instances to draw for random families
  int resolution = 8;   // random locations are multiples of 1/resolution in [0,1]
};

struct NamedInstance {
  std::string id;
  Instance instance;
};

/// Families: uniform, clustered, random-capacities, plus the named families
/// thm6-spare, ratio-total-k, thm5-3fac, thm8-unequal, thm1-percentile,
/// thm7-family. Deterministic given the seed.
std::vector<NamedInstance> gen_instances(const GeneratorSpec& spec, std::uint64_t seed);

std::vector<std::string> generator_families();

}  // namespace caploc
