#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "caploc/core.hpp"
#include "caploc/mechanisms.hpp"

namespace caploc {

enum class Axiom { Anonymity, ParetoOptimality, StrategyProofness, PartialGroupStrategyProofness };
enum class Verdict { HoldsOnSearchSpace, Counterexample };

std::string_view to_string(Axiom axiom);
std::string_view to_string(Verdict verdict);
Axiom parse_axiom(std::string_view text);

/// Candidate misreports: every reported location, every pairwise midpoint,
/// every reflection 2y - x of a facility y in the truthful outcome, and a
/// uniform grid over [min - range, max + range] with step resolution * range
/// (range = max - min, or 1 when all agents coincide). Sorted and distinct.
struct DeviationGrid {
  std::vector<Rational> points;

  static DeviationGrid build(const Instance& inst, const Solution& truthful,
                             const Rational& resolution = default_resolution());
  static Rational default_resolution() { return Rational(1, 64); }
};

struct AnonymityWitness {
  std::vector<AgentId> permutation;  // agent id k reports the location of id permutation[k]
  Instance permuted;
  Solution original_solution;
  Solution permuted_solution;
};

struct ParetoWitness {
  Solution dominating;
  std::size_t improved_position;  // sorted position of the strictly better-off agent
};

struct DeviationWitness {
  std::vector<AgentId> deviators;
  Rational misreport;
  std::vector<Rational> before;  // true distances, truthful profile
  std::vector<Rational> after;   // true distances after the misreport
};

using Witness = std::variant<std::monostate, AnonymityWitness, ParetoWitness, DeviationWitness>;

struct AxiomReport {
  Axiom axiom;
  Verdict verdict = Verdict::HoldsOnSearchSpace;
  std::string mechanism;
  Instance instance;
  Solution solution;      // truthful outcome
  Witness witness;
  std::uint64_t explored = 0;  // candidate profiles examined

  bool holds() const { return verdict == Verdict::HoldsOnSearchSpace; }
};

struct AnonymityMode {
  bool exhaustive = true;
  std::uint64_t seed = 0;
  std::size_t samples = 200;
};

inline constexpr std::size_t kMaxExhaustiveAnonymityAgents = 7;
inline constexpr std::size_t kMaxParetoAgents = 10;

AxiomReport check_anonymity(const MechanismId& mech, const Instance& inst, const AnonymityMode& mode = {});

/// Searches for a feasible solution that is weakly better for every agent and
/// strictly better for one. n <= 10.
std::optional<ParetoWitness> is_pareto_optimal(const Instance& inst, const Solution& sol);

AxiomReport check_pareto(const MechanismId& mech, const Instance& inst);

AxiomReport find_sp_violation(const MechanismId& mech, const Instance& inst,
                              const Rational& resolution = DeviationGrid::default_resolution());

/// Subsets of co-located agents misreporting one common location; a
/// counterexample needs every deviator to gain strictly.
AxiomReport check_partial_group_sp(const MechanismId& mech, const Instance& inst,
                                   const Rational& resolution = DeviationGrid::default_resolution());

/// Re-executes the witness through the mechanism. True when the recorded
/// violation is reproduced exactly (vacuously true for holds reports).
bool replay(const AxiomReport& report, const MechanismId& mech);

/// Multiset of facility locations and of (reported, serving) location pairs.
bool same_outcome(const Instance& a, const Solution& sa, const Instance& b, const Solution& sb);

std::string to_json(const AxiomReport& report);

/// One-line human summary; agent ids are printed 1-based.
std::string describe(const AxiomReport& report);

}  // namespace caploc
