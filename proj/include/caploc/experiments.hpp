#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "caploc/axioms.hpp"
#include "caploc/core.hpp"
#include "caploc/mechanisms.hpp"
#include "caploc/optimal.hpp"

namespace caploc {

// ---------------------------------------------------------------- ratio sweeps

struct SweepRecord {
  RatioRecord record;
  std::string family;
  std::size_t num_agents = 0;
};

/// One record per (size, instance, applicable mechanism, objective). For the
/// named families "ratio-total-k" and "thm7-family" the size is k; otherwise it
/// is the agent count n. Records come back in (mechanism, family, size) order.
std::vector<SweepRecord> run_ratio_sweep(const std::vector<MechanismId>& mechs, const GeneratorSpec& family,
                                         const std::vector<int>& sizes, std::uint64_t seed,
                                         const std::vector<Objective>& objectives = {Objective::Total,
                                                                                     Objective::Max});

// ---------------------------------------------------------------- reports

enum class ReportFormat { Text, Csv, Structured };
ReportFormat parse_report_format(std::string_view text);

/// CSV header: mechanism,instance,objective,mech_welfare,opt_welfare,ratio
/// (plus ratio_decimal when `decimal`). Unbounded ratios render as "inf".
std::string emit_report(const std::vector<RatioRecord>& records, ReportFormat format, bool decimal = false);

/// Writes `content` to `path`; throws std::runtime_error when the sink is unwritable.
void write_document(const std::string& path, const std::string& content);

// ---------------------------------------------------------------- scenarios

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct AuditReport {
  std::string scenario;
  std::string claim;
  bool pass = false;
  std::vector<CheckResult> checks;
};

struct Scenario {
  std::string name;
  std::string claim;
  std::function<std::vector<CheckResult>(std::uint64_t seed)> run;
};

const std::vector<Scenario>& scenario_registry();
std::vector<std::string> scenario_names();

/// Runs a registered scenario; throws std::invalid_argument for unknown names.
AuditReport run_theorem_audit(const std::string& name, std::uint64_t seed = 1);

std::string emit_audit(const AuditReport& report, ReportFormat format);

/// Result of making every agent in `deviators` report `misreport`.
DeviationWitness evaluate_deviation(const MechanismId& mech, const Instance& inst,
                                    const std::vector<AgentId>& deviators, const Rational& misreport);

/// Checks Pareto, then SP, then anonymity (exhaustive for n <= 7, sampled
/// otherwise); returns the first failing report or nullopt when all hold.
std::optional<AxiomReport> first_axiom_failure(const MechanismId& mech, const Instance& inst,
                                               std::uint64_t seed = 1);

/// Every sorted multiset of `n` points drawn from `grid`.
std::vector<Instance> grid_instances(const std::vector<Rational>& grid, std::size_t n,
                                     const std::vector<int>& capacities);

}  // namespace caploc
