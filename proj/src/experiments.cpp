#include "caploc/experiments.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace caploc {

// ---------------------------------------------------------------- sweeps

std::vector<SweepRecord> run_ratio_sweep(const std::vector<MechanismId>& mechs, const GeneratorSpec& family,
                                         const std::vector<int>& sizes, std::uint64_t seed,
                                         const std::vector<Objective>& objectives) {
  std::vector<SweepRecord> out;
  const bool size_is_k = family.family == "ratio-total-k" || family.family == "thm7-family";
  for (int size : sizes) {
    GeneratorSpec spec = family;
    if (size_is_k)
      spec.k = size;
    else
      spec.n = size;
    for (const auto& [id, inst] : gen_instances(spec, seed)) {
      for (const auto& mech : mechs) {
        if (!applicable(mech, inst)) continue;
        for (Objective obj : objectives)
          out.push_back({opt_welfare_ratio(inst, mech, obj, id), family.family, inst.num_agents()});
      }
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const SweepRecord& a, const SweepRecord& b) {
    return std::tie(a.record.mechanism, a.family, a.num_agents) < std::tie(b.record.mechanism, b.family, b.num_agents);
  });
  return out;
}

// ---------------------------------------------------------------- helpers

DeviationWitness evaluate_deviation(const MechanismId& mech, const Instance& inst,
                                    const std::vector<AgentId>& deviators, const Rational& misreport) {
  const Solution truthful = run_mechanism(mech, inst);
  const Instance deviated = inst.with_reports(deviators, misreport);
  const Solution sol = run_mechanism(mech, deviated);
  DeviationWitness w{deviators, misreport, {}, {}};
  for (AgentId id : deviators) {
    const Rational& truth = inst.location(inst.position_of(id));
    w.before.push_back(abs_diff(truth, truthful.serving_location(inst.position_of(id))));
    w.after.push_back(abs_diff(truth, sol.serving_location(deviated.position_of(id))));
  }
  return w;
}

std::optional<AxiomReport> first_axiom_failure(const MechanismId& mech, const Instance& inst, std::uint64_t seed) {
  if (auto r = check_pareto(mech, inst); !r.holds()) return r;
  if (auto r = find_sp_violation(mech, inst); !r.holds()) return r;
  AnonymityMode mode;
  mode.exhaustive = inst.num_agents() <= kMaxExhaustiveAnonymityAgents;
  mode.seed = seed;
  if (auto r = check_anonymity(mech, inst, mode); !r.holds()) return r;
  return std::nullopt;
}

std::vector<Instance> grid_instances(const std::vector<Rational>& grid, std::size_t n,
                                     const std::vector<int>& capacities) {
  std::vector<Instance> out;
  std::vector<std::size_t> idx(n, 0);
  while (true) {
    std::vector<Rational> agents;
    for (auto i : idx) agents.push_back(grid[i]);
    out.emplace_back(std::move(agents), capacities);
    // next non-decreasing index tuple
    std::size_t pos = n;
    while (pos > 0 && idx[pos - 1] + 1 == grid.size()) --pos;
    if (pos == 0) break;
    ++idx[pos - 1];
    for (std::size_t k = pos; k < n; ++k) idx[k] = idx[pos - 1];
  }
  return out;
}

namespace {

std::string ratio_text(const std::optional<Rational>& r) { return r ? r->to_short_string() : "inf"; }

// Each mechanism must fail at least one axiom on at least one instance, with
// a witness that replays.
std::vector<CheckResult> every_mechanism_fails(const std::vector<MechanismId>& mechs,
                                               const std::vector<Instance>& family, std::uint64_t seed) {
  std::vector<CheckResult> checks;
  for (const auto& mech : mechs) {
    CheckResult c{to_string(mech) + " fails an axiom", false, "no counterexample on the search space"};
    std::size_t tried = 0;
    for (const auto& inst : family) {
      if (!applicable(mech, inst)) continue;
      ++tried;
      if (auto failure = first_axiom_failure(mech, inst, seed)) {
        c.pass = replay(*failure, mech);
        c.detail = describe(*failure) + (c.pass ? "" : " (replay FAILED)");
        break;
      }
    }
    if (tried == 0) c.detail = "mechanism not applicable to any instance";
    checks.push_back(std::move(c));
  }
  return checks;
}

CheckResult check(std::string name, bool pass, std::string detail = {}) {
  return CheckResult{std::move(name), pass, std::move(detail)};
}

Percentile cap_percentile(std::vector<Rational> p) { return Percentile{std::move(p), {true, CapacityOrder::Ascending}}; }
JLeftKRight cap_jlkr(int j, int k) { return JLeftKRight{j, k, {true, CapacityOrder::Ascending}}; }

CapSD identity_order(std::size_t n, bool reversed = false) {
  CapSD sd;
  for (std::size_t i = 0; i < n; ++i) sd.order.push_back(reversed ? n - 1 - i : i);
  return sd;
}

std::vector<MechanismId> two_facility_catalog(std::size_t n) {
  return {cap_percentile({0, 1}),
          cap_percentile({Rational(1, 2), Rational(1, 2)}),
          cap_percentile({Rational(1, 4), Rational(3, 4)}),
          cap_percentile({0, 0}),
          Percentile{{0, 1}, {true, CapacityOrder::Descending}},
          cap_jlkr(1, 1),
          cap_jlkr(2, 0),
          cap_jlkr(0, 2),
          ExtendedEndPoint{},
          InnerPoint{},
          identity_order(n),
          identity_order(n, true)};
}

// ---------------------------------------------------------------- scenarios

std::vector<CheckResult> scenario_thm1(std::uint64_t) {
  std::vector<CheckResult> checks;
  const Instance two({0, 1}, {2, 2});
  const Instance six({0, 1, 1, 1, 1, 1}, {6, 6});
  const MechanismId same{Percentile{{0, 0}, {}}};
  const MechanismId spread{Percentile{{Rational(1, 4), Rational(3, 4)}, {}}};

  const auto r1 = opt_welfare_ratio(two, same, Objective::Max, "thm1-percentile:two");
  checks.push_back(check("p=(0,0) on (0,1): max ratio unbounded", r1.unbounded(),
                         "mech " + r1.mechanism_welfare.to_short_string() + " / opt " + r1.optimal_welfare.to_short_string()));
  const auto sol = run_mechanism(spread, six);
  checks.push_back(check("p=(1/4,3/4) on (0,1,1,1,1,1): both facilities at 1",
                         sol.locations == std::vector<Rational>{1, 1}, format_rationals(sol.locations)));
  const auto r2 = opt_welfare_ratio(six, spread, Objective::Max, "thm1-percentile:six");
  checks.push_back(check("p=(1/4,3/4) on (0,1,1,1,1,1): max ratio unbounded", r2.unbounded(),
                         "mech " + r2.mechanism_welfare.to_short_string() + " / opt " + r2.optimal_welfare.to_short_string()));
  const MechanismId endpoint{JLeftKRight{1, 1, {}}};
  const bool bounded = !opt_welfare_ratio(two, endpoint, Objective::Max).unbounded() &&
                       !opt_welfare_ratio(six, endpoint, Objective::Max).unbounded();
  checks.push_back(check("EndPoint stays bounded on both instances", bounded));
  return checks;
}

std::vector<CheckResult> scenario_thm4(std::uint64_t seed) {
  std::vector<CheckResult> checks;
  const std::vector<Rational> points{0, Rational(1, 4), Rational(1, 2), Rational(3, 4), 1};
  const auto family = grid_instances(points, 4, {2, 2});

  const MechanismId inner{InnerPoint{}};
  std::size_t failures = 0;
  std::string first_failure;
  for (const auto& inst : family) {
    for (const auto& r : {check_anonymity(inner, inst), check_pareto(inner, inst), find_sp_violation(inner, inst)}) {
      if (!r.holds()) {
        if (failures++ == 0) first_failure = describe(r);
      }
    }
  }
  checks.push_back(check("innerpoint: anonymous, Pareto optimal and SP on all " + std::to_string(family.size()) +
                             " grid instances",
                         failures == 0, failures ? first_failure : "no counterexample"));

  const std::vector<MechanismId> rivals{cap_jlkr(1, 1), cap_jlkr(2, 0), cap_jlkr(0, 2), identity_order(4)};
  for (auto& c : every_mechanism_fails(rivals, family, seed)) checks.push_back(std::move(c));

  const Instance fixture({Rational(1, 5), Rational(2, 5), 1}, {1, 2});
  const MechanismId b{FixtureB{}};
  const auto found = find_sp_violation(b, fixture);
  checks.push_back(check("fixture-b: SP counterexample found and replays", !found.holds() && replay(found, b),
                         found.holds() ? "none" : describe(found)));
  const auto dev = evaluate_deviation(b, fixture, {1}, 0);
  checks.push_back(check("fixture-b: middle agent misreporting 0 gains 3/5 -> 2/5",
                         dev.before.front() == Rational(3, 5) && dev.after.front() == Rational(2, 5),
                         dev.before.front().to_short_string() + " -> " + dev.after.front().to_short_string()));
  return checks;
}

// Base profile plus every single-agent relocation to a point of `moves`.
std::vector<Instance> relocations(const Instance& base, const std::vector<Rational>& moves) {
  std::vector<Instance> out{base};
  for (AgentId id = 0; id < base.num_agents(); ++id)
    for (const auto& z : moves)
      if (z != base.location(base.position_of(id))) out.push_back(base.with_report(id, z));
  return out;
}

std::vector<CheckResult> scenario_thm5(std::uint64_t seed) {
  std::vector<CheckResult> checks;
  const Instance base({0, 0, 10, 10, 20, 20}, {2, 2, 2});
  const auto opt = opt_dp(base, Objective::Total);
  auto locs = opt.witness.locations;
  std::sort(locs.begin(), locs.end());
  checks.push_back(check("unique zero-cost solution places facilities at 0, 10, 20",
                         opt.value.is_zero() && locs == std::vector<Rational>{0, 10, 20}, format_rationals(locs)));

  const auto family = relocations(base, {-5, 0, 5, 10, 11, 15, 20, 25});
  const std::vector<MechanismId> mechs{
      cap_percentile({0, 0, 0}),
      cap_percentile({0, Rational(1, 2), 1}),
      cap_percentile({Rational(1, 4), Rational(1, 2), Rational(3, 4)}),
      cap_percentile({0, 0, 1}),
      cap_percentile({0, 1, 1}),
      cap_percentile({1, 1, 1}),
      cap_jlkr(3, 0),
      cap_jlkr(2, 1),
      cap_jlkr(1, 2),
      cap_jlkr(0, 3),
      identity_order(6),
      identity_order(6, true),
      CapSD{{2, 3, 0, 1, 4, 5}},
  };
  for (auto& c : every_mechanism_fails(mechs, family, seed)) checks.push_back(std::move(c));
  return checks;
}

std::vector<CheckResult> spare_or_unequal(const std::vector<int>& caps, std::uint64_t seed) {
  auto family = grid_instances({0, Rational(1, 2), 1}, 5, caps);
  std::vector<MechanismId> mechs;
  for (auto& m : two_facility_catalog(5))
    if (std::any_of(family.begin(), family.end(), [&](const Instance& inst) { return applicable(m, inst); }))
      mechs.push_back(std::move(m));
  return every_mechanism_fails(mechs, family, seed);
}

std::vector<CheckResult> scenario_thm6(std::uint64_t seed) {
  std::vector<CheckResult> checks;
  GeneratorSpec spec;
  spec.family = "thm6-spare";
  spec.c = 3;
  const Instance base = gen_instances(spec, seed).front().instance;
  checks.push_back(check("base instance is (0,0,0,1,1) with capacities (3,3)",
                         describe(base) == "(0,0,0,1,1) c=(3,3)", describe(base)));
  for (const auto& inst : {base, Instance({0, 0, 1, 1, 1}, {3, 3})}) {
    const auto opt = opt_dp(inst, Objective::Total);
    auto locs = opt.witness.locations;
    std::sort(locs.begin(), locs.end());
    checks.push_back(check("Pareto optimum of " + describe(inst) + " places facilities at 0 and 1",
                           opt.value.is_zero() && locs == std::vector<Rational>{0, 1}, format_rationals(locs)));
  }
  const auto reduced = run_innerpoint(Instance({0, 1, 1, 1}, {2, 2}));
  checks.push_back(check("innerpoint on the reduced four-agent problem puts both facilities at 1",
                         reduced.locations == std::vector<Rational>{1, 1}, format_rationals(reduced.locations)));
  checks.push_back(check("innerpoint does not apply with spare capacity", !applicable(InnerPoint{}, base)));
  for (auto& c : spare_or_unequal({3, 3}, seed)) checks.push_back(std::move(c));
  return checks;
}

std::vector<CheckResult> scenario_thm8(std::uint64_t seed) {
  std::vector<CheckResult> checks;
  const Instance a({0, 0, 0, 1, 1}, {3, 2});
  const Instance b({0, 0, 1, 1, 1}, {3, 2});
  const auto oa = opt_dp(a, Objective::Total);
  checks.push_back(check("(0,0,0,1,1): capacity-3 facility at 0, capacity-2 at 1",
                         oa.value.is_zero() && oa.witness.locations == std::vector<Rational>{0, 1},
                         format_rationals(oa.witness.locations)));
  const auto ob = opt_dp(b, Objective::Total);
  checks.push_back(check("(0,0,1,1,1): capacity-2 facility at 0, capacity-3 at 1",
                         ob.value.is_zero() && ob.witness.locations == std::vector<Rational>{1, 0},
                         format_rationals(ob.witness.locations)));
  for (auto& c : spare_or_unequal({3, 2}, seed)) checks.push_back(std::move(c));
  return checks;
}

std::vector<CheckResult> scenario_thm7(std::uint64_t seed) {
  std::vector<CheckResult> checks;
  const std::vector<MechanismId> mechs{cap_jlkr(1, 1), ExtendedEndPoint{}};
  for (int n = 3; n <= 7; ++n) {
    for (int k = 1; 2 * k <= n; ++k) {
      GeneratorSpec spec;
      spec.family = "thm7-family";
      spec.n = n;
      spec.k = k;
      const auto family = gen_instances(spec, seed);
      for (const auto& mech : mechs) {
        std::optional<Rational> worst = Rational(0);  // nullopt = unbounded
        for (const auto& [id, inst] : family) {
          const auto r = opt_welfare_ratio(inst, mech, Objective::Total, id);
          if (!r.ratio)
            worst = std::nullopt;
          else if (worst && *r.ratio > *worst)
            worst = r.ratio;
        }
        const Rational bound(n - k - 1);
        checks.push_back(check(to_string(mech) + " n=" + std::to_string(n) + " k=" + std::to_string(k) +
                                   ": worst total ratio >= " + bound.to_short_string(),
                               !worst || *worst >= bound, "worst " + ratio_text(worst)));
      }
    }
  }
  return checks;
}

std::vector<CheckResult> scenario_ratio_total_k(std::uint64_t seed) {
  std::vector<CheckResult> checks;
  GeneratorSpec spec;
  spec.family = "ratio-total-k";
  const auto records = run_ratio_sweep({InnerPoint{}}, spec, {2, 3, 4, 5, 6}, seed, {Objective::Total});
  for (const auto& s : records) {
    const Rational expected(static_cast<long>(s.num_agents / 2) - 1);
    checks.push_back(check("innerpoint " + s.record.instance + ": total ratio = " + expected.to_short_string(),
                           s.record.ratio && *s.record.ratio == expected, "ratio " + ratio_text(s.record.ratio)));
  }
  return checks;
}

std::vector<CheckResult> scenario_innerpoint_max(std::uint64_t seed) {
  std::vector<CheckResult> checks;
  std::size_t total = 0;
  std::size_t violations = 0;
  std::optional<Rational> worst = Rational(0);
  for (int k = 1; k <= 5; ++k) {
    GeneratorSpec spec;
    spec.family = "uniform";
    spec.n = 2 * k;
    spec.capacities = {k, k};
    spec.count = 2000;
    spec.resolution = 16;
    for (const auto& [id, inst] : gen_instances(spec, seed + static_cast<std::uint64_t>(k))) {
      const auto r = opt_welfare_ratio(inst, InnerPoint{}, Objective::Max, id);
      ++total;
      if (!r.ratio || *r.ratio > Rational(2)) ++violations;
      if (!r.ratio)
        worst = std::nullopt;
      else if (worst && *r.ratio > *worst)
        worst = r.ratio;
    }
  }
  checks.push_back(check("innerpoint max ratio <= 2 on " + std::to_string(total) + " random no-spare instances",
                         violations == 0, "worst " + ratio_text(worst)));
  const auto tight = opt_welfare_ratio(Instance({0, Rational(1, 2), Rational(1, 2), 1}, {2, 2}), InnerPoint{}, Objective::Max);
  checks.push_back(check("innerpoint max ratio = 2 on (0,1/2,1/2,1)", tight.ratio && *tight.ratio == Rational(2),
                         "ratio " + ratio_text(tight.ratio)));
  return checks;
}

std::vector<CheckResult> scenario_extended_endpoint(std::uint64_t seed) {
  GeneratorSpec spec;
  spec.family = "random-capacities";
  spec.n = 8;
  spec.count = 10000;
  spec.resolution = 16;

  struct Tally {
    std::size_t instances = 0;
    std::size_t violations = 0;
    std::string first;
  };
  // [objective][equal capacities?]
  Tally tally[2][2];
  std::size_t spare = 0;
  for (const auto& [id, inst] : gen_instances(spec, seed)) {
    if (inst.spare_capacity() > 0) ++spare;
    const bool equal = inst.capacity(0) == inst.capacity(1);
    for (Objective obj : {Objective::Total, Objective::Max}) {
      const Rational bound = obj == Objective::Total ? Rational(3 * static_cast<long>(inst.num_agents()), 2) : Rational(4);
      const auto r = opt_welfare_ratio(inst, ExtendedEndPoint{}, obj, id);
      Tally& t = tally[obj == Objective::Max][equal];
      ++t.instances;
      if (r.ratio && *r.ratio <= bound) continue;
      if (t.violations++ == 0)
        t.first = describe(inst) + " ratio " + ratio_text(r.ratio) + " > " + bound.to_short_string();
    }
  }

  std::vector<CheckResult> checks;
  for (Objective obj : {Objective::Total, Objective::Max}) {
    for (bool equal : {true, false}) {
      const Tally& t = tally[obj == Objective::Max][equal];
      checks.push_back(check(std::string("extendedendpoint ") + std::string(to_string(obj)) + " ratio <= " +
                                 (obj == Objective::Total ? "3n/2" : "4") + " on " + std::to_string(t.instances) +
                                 (equal ? " equal-capacity" : " unequal-capacity") + " instances",
                             t.violations == 0,
                             t.violations ? std::to_string(t.violations) + " violations, first " + t.first : "no violation"));
    }
  }
  checks.push_back(check("sample includes spare capacity", spare > 0, std::to_string(spare) + " spare instances"));
  return checks;
}

}  // namespace

const std::vector<Scenario>& scenario_registry() {
  static const std::vector<Scenario> registry{
      {"thm1-percentile", "two uncapacitated facilities: Percentile with p != (0,1) has unbounded max ratio",
       scenario_thm1},
      {"thm4-grid", "two facilities of capacity k, 2k agents: anonymous + Pareto + SP iff InnerPoint", scenario_thm4},
      {"thm5-3fac", "three facilities of capacity 2: no anonymous, Pareto optimal and SP mechanism", scenario_thm5},
      {"thm6-spare", "two facilities with spare capacity: no anonymous, Pareto optimal and SP mechanism",
       scenario_thm6},
      {"thm7-family", "spare capacity: SP mechanisms have total ratio at least n-k-1", scenario_thm7},
      {"thm8-unequal", "unequal capacities: no anonymous, Pareto optimal and SP mechanism", scenario_thm8},
      {"ratio-total-k", "InnerPoint total ratio is exactly k-1 on k-1 agents at 0 and k+1 at 1",
       scenario_ratio_total_k},
      {"innerpoint-max", "InnerPoint max ratio is at most 2 and the bound is attained", scenario_innerpoint_max},
      {"extendedendpoint-bounds", "ExtendedEndPoint total ratio <= 3n/2 and max ratio <= 4",
       scenario_extended_endpoint},
  };
  return registry;
}

std::vector<std::string> scenario_names() {
  std::vector<std::string> names;
  for (const auto& s : scenario_registry()) names.push_back(s.name);
  return names;
}

AuditReport run_theorem_audit(const std::string& name, std::uint64_t seed) {
  for (const auto& s : scenario_registry()) {
    if (s.name != name) continue;
    AuditReport report{s.name, s.claim, true, s.run(seed)};
    for (const auto& c : report.checks) report.pass = report.pass && c.pass;
    return report;
  }
  throw std::invalid_argument("unknown scenario '" + name + "'");
}

}  // namespace caploc
