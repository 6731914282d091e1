#include "caploc/axioms.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <sstream>

#include "json.hpp"
#include "caploc/optimal.hpp"

namespace caploc {

std::string_view to_string(Axiom axiom) {
  switch (axiom) {
    case Axiom::Anonymity: return "anonymity";
    case Axiom::ParetoOptimality: return "pareto";
    case Axiom::StrategyProofness: return "sp";
    case Axiom::PartialGroupStrategyProofness: return "group-sp";
  }
  return "?";
}

std::string_view to_string(Verdict verdict) {
  return verdict == Verdict::HoldsOnSearchSpace ? "holds-on-search-space" : "counterexample";
}

Axiom parse_axiom(std::string_view text) {
  for (Axiom a : {Axiom::Anonymity, Axiom::ParetoOptimality, Axiom::StrategyProofness,
                  Axiom::PartialGroupStrategyProofness})
    if (to_string(a) == text) return a;
  throw ParseError("unknown axiom '" + std::string(text) + "' (expected anonymity|pareto|sp|group-sp)");
}

// ---------------------------------------------------------------- grid

DeviationGrid DeviationGrid::build(const Instance& inst, const Solution& truthful, const Rational& resolution) {
  if (resolution.sign() <= 0) throw std::invalid_argument("grid resolution must be positive");
  std::vector<Rational> pts;
  const auto x = inst.locations();
  for (std::size_t i = 0; i < x.size(); ++i) {
    pts.push_back(x[i]);
    for (std::size_t k = i + 1; k < x.size(); ++k) pts.push_back((x[i] + x[k]) / Rational(2));
  }
  for (const auto& y : truthful.locations)
    for (const auto& xi : x) pts.push_back(Rational(2) * y - xi);

  Rational range = inst.rightmost() - inst.leftmost();
  if (range.is_zero()) range = Rational(1);
  const Rational lo = inst.leftmost() - range;
  const Rational hi = inst.rightmost() + range;
  const Rational step = resolution * range;
  for (Rational p = lo; p <= hi; p += step) pts.push_back(p);

  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return DeviationGrid{std::move(pts)};
}

// ---------------------------------------------------------------- anonymity

bool same_outcome(const Instance& a, const Solution& sa, const Instance& b, const Solution& sb) {
  auto sorted_locations = [](const Solution& s) {
    auto v = s.locations;
    std::sort(v.begin(), v.end());
    return v;
  };
  auto served_pairs = [](const Instance& inst, const Solution& s) {
    std::vector<std::pair<Rational, Rational>> v;
    for (std::size_t i = 0; i < inst.num_agents(); ++i) v.emplace_back(inst.location(i), s.serving_location(i));
    std::sort(v.begin(), v.end());
    return v;
  };
  return sorted_locations(sa) == sorted_locations(sb) && served_pairs(a, sa) == served_pairs(b, sb);
}

namespace {

Instance permute_reports(const Instance& inst, const std::vector<AgentId>& perm) {
  const auto reports = inst.reports_by_id();
  std::vector<Rational> permuted(reports.size());
  for (std::size_t k = 0; k < perm.size(); ++k) permuted[k] = reports[perm[k]];
  return Instance(std::move(permuted), std::vector<int>(inst.capacities().begin(), inst.capacities().end()));
}

AxiomReport base_report(Axiom axiom, const MechanismId& mech, const Instance& inst, Solution sol) {
  return AxiomReport{axiom, Verdict::HoldsOnSearchSpace, to_string(mech), inst, std::move(sol), {}, 0};
}

}  // namespace

AxiomReport check_anonymity(const MechanismId& mech, const Instance& inst, const AnonymityMode& mode) {
  const std::size_t n = inst.num_agents();
  AxiomReport report = base_report(Axiom::Anonymity, mech, inst, run_mechanism(mech, inst));

  auto try_permutation = [&](const std::vector<AgentId>& perm) {
    ++report.explored;
    Instance permuted = permute_reports(inst, perm);
    Solution psol = run_mechanism(mech, permuted);
    if (same_outcome(inst, report.solution, permuted, psol)) return false;
    report.verdict = Verdict::Counterexample;
    report.witness = AnonymityWitness{perm, std::move(permuted), report.solution, std::move(psol)};
    return true;
  };

  std::vector<AgentId> perm(n);
  std::iota(perm.begin(), perm.end(), AgentId{0});
  if (mode.exhaustive) {
    if (n > kMaxExhaustiveAnonymityAgents) throw GuardExceeded("exhaustive anonymity check supports n <= 7");
    while (std::next_permutation(perm.begin(), perm.end()))
      if (try_permutation(perm)) break;
  } else {
    std::mt19937_64 rng(mode.seed);
    for (std::size_t s = 0; s < mode.samples; ++s) {
      for (std::size_t i = n; i > 1; --i) std::swap(perm[i - 1], perm[rng() % i]);
      if (try_permutation(perm)) break;
    }
  }
  return report;
}

// ---------------------------------------------------------------- pareto

std::optional<ParetoWitness> is_pareto_optimal(const Instance& inst, const Solution& sol) {
  const std::size_t n = inst.num_agents();
  const std::size_t m = inst.num_facilities();
  if (n > kMaxParetoAgents) throw GuardExceeded("pareto check supports n <= 10");
  const std::vector<Rational> d = agent_distances(inst, sol);

  std::vector<FacilityIndex> a(n, 0);
  std::vector<int> load(m, 0);
  std::optional<ParetoWitness> found;

  // Interval [lo, hi] each facility must stay in so nobody is worse off;
  // unset when the facility serves nobody.
  struct Region {
    std::optional<Rational> lo, hi;
    void add(const Rational& l, const Rational& h) {
      lo = lo ? max(*lo, l) : l;
      hi = hi ? min(*hi, h) : h;
    }
    bool empty() const { return lo && *lo > *hi; }
  };

  auto examine = [&]() -> bool {
    std::vector<Region> region(m);
    for (std::size_t i = 0; i < n; ++i) region[a[i]].add(inst.location(i) - d[i], inst.location(i) + d[i]);
    for (const auto& r : region)
      if (r.empty()) return false;
    for (std::size_t star = 0; star < n; ++star) {
      if (d[star].is_zero()) continue;
      const FacilityIndex j = a[star];
      Region others;
      for (std::size_t i = 0; i < n; ++i)
        if (i != star && a[i] == j) others.add(inst.location(i) - d[i], inst.location(i) + d[i]);
      const Rational& x = inst.location(star);
      // others' closed region must meet the open interval (x - d, x + d)
      if (others.lo && !(*others.lo < x + d[star] && *others.hi > x - d[star])) continue;

      Solution better{sol.locations, a};
      for (FacilityIndex f = 0; f < m; ++f)
        if (region[f].lo) better.locations[f] = *region[f].lo;
      Rational target = x;
      if (others.lo) target = min(max(x, *others.lo), *others.hi);
      better.locations[j] = target;
      found = ParetoWitness{std::move(better), star};
      return true;
    }
    return false;
  };

  auto recurse = [&](auto& self, std::size_t i) -> bool {
    if (i == n) return examine();
    for (FacilityIndex j = 0; j < m; ++j) {
      if (load[j] >= inst.capacity(j)) continue;
      ++load[j];
      a[i] = j;
      const bool done = self(self, i + 1);
      --load[j];
      if (done) return true;
    }
    return false;
  };
  recurse(recurse, 0);
  if (found) check_solution_invariants(inst, found->dominating);
  return found;
}

AxiomReport check_pareto(const MechanismId& mech, const Instance& inst) {
  AxiomReport report = base_report(Axiom::ParetoOptimality, mech, inst, run_mechanism(mech, inst));
  report.explored = 1;
  if (auto w = is_pareto_optimal(inst, report.solution)) {
    report.verdict = Verdict::Counterexample;
    report.witness = std::move(*w);
  }
  return report;
}

// ---------------------------------------------------------------- strategy proofness

namespace {

Rational true_distance(const Instance& deviated, const Solution& sol, AgentId id, const Rational& truth) {
  return abs_diff(truth, sol.serving_location(deviated.position_of(id)));
}

// Tries `deviators` jointly reporting each grid point; first success wins.
bool search_group(const MechanismId& mech, AxiomReport& report, const std::vector<AgentId>& deviators,
                  const Rational& truth, const DeviationGrid& grid) {
  const Instance& inst = report.instance;
  std::vector<Rational> before;
  for (AgentId id : deviators) before.push_back(true_distance(inst, report.solution, id, truth));
  for (const auto& z : grid.points) {
    if (z == truth) continue;
    ++report.explored;
    const Instance deviated = inst.with_reports(deviators, z);
    const Solution sol = run_mechanism(mech, deviated);
    std::vector<Rational> after;
    bool all_gain = true;
    for (std::size_t k = 0; k < deviators.size() && all_gain; ++k) {
      after.push_back(true_distance(deviated, sol, deviators[k], truth));
      all_gain = after.back() < before[k];
    }
    if (all_gain) {
      report.verdict = Verdict::Counterexample;
      report.witness = DeviationWitness{deviators, z, before, std::move(after)};
      return true;
    }
  }
  return false;
}

}  // namespace

AxiomReport find_sp_violation(const MechanismId& mech, const Instance& inst, const Rational& resolution) {
  AxiomReport report = base_report(Axiom::StrategyProofness, mech, inst, run_mechanism(mech, inst));
  const DeviationGrid grid = DeviationGrid::build(inst, report.solution, resolution);
  for (AgentId id = 0; id < inst.num_agents(); ++id)
    if (search_group(mech, report, {id}, inst.location(inst.position_of(id)), grid)) break;
  return report;
}

AxiomReport check_partial_group_sp(const MechanismId& mech, const Instance& inst, const Rational& resolution) {
  AxiomReport report = base_report(Axiom::PartialGroupStrategyProofness, mech, inst, run_mechanism(mech, inst));
  const DeviationGrid grid = DeviationGrid::build(inst, report.solution, resolution);
  const std::size_t n = inst.num_agents();
  for (std::size_t start = 0; start < n;) {
    std::size_t end = start;
    while (end < n && inst.location(end) == inst.location(start)) ++end;
    std::vector<AgentId> cluster;
    for (std::size_t pos = start; pos < end; ++pos) cluster.push_back(inst.id(pos));
    std::sort(cluster.begin(), cluster.end());
    if (cluster.size() > 16) throw GuardExceeded("co-located group larger than 16 agents");
    const std::uint32_t subsets = 1u << cluster.size();
    for (std::uint32_t mask = 1; mask < subsets; ++mask) {
      std::vector<AgentId> group;
      for (std::size_t b = 0; b < cluster.size(); ++b)
        if (mask & (1u << b)) group.push_back(cluster[b]);
      if (search_group(mech, report, group, inst.location(start), grid)) return report;
    }
    start = end;
  }
  return report;
}

// ---------------------------------------------------------------- replay

bool replay(const AxiomReport& report, const MechanismId& mech) {
  if (report.holds()) return true;
  const Instance& inst = report.instance;
  const Solution truthful = run_mechanism(mech, inst);
  if (truthful != report.solution) return false;

  if (const auto* w = std::get_if<AnonymityWitness>(&report.witness)) {
    const Instance permuted = permute_reports(inst, w->permutation);
    const Solution psol = run_mechanism(mech, permuted);
    return permuted == w->permuted && psol == w->permuted_solution && !same_outcome(inst, truthful, permuted, psol);
  }
  if (const auto* w = std::get_if<ParetoWitness>(&report.witness)) {
    if (validate_solution(inst, w->dominating)) return false;
    const auto before = agent_distances(inst, truthful);
    const auto after = agent_distances(inst, w->dominating);
    for (std::size_t i = 0; i < before.size(); ++i)
      if (after[i] > before[i]) return false;
    return after[w->improved_position] < before[w->improved_position];
  }
  if (const auto* w = std::get_if<DeviationWitness>(&report.witness)) {
    const Instance deviated = inst.with_reports(w->deviators, w->misreport);
    const Solution sol = run_mechanism(mech, deviated);
    for (std::size_t k = 0; k < w->deviators.size(); ++k) {
      const AgentId id = w->deviators[k];
      const Rational& truth = inst.location(inst.position_of(id));
      if (true_distance(inst, truthful, id, truth) != w->before[k]) return false;
      if (true_distance(deviated, sol, id, truth) != w->after[k]) return false;
      if (!(w->after[k] < w->before[k])) return false;
    }
    return true;
  }
  return false;
}

// ---------------------------------------------------------------- serialization

namespace {

nlohmann::json solution_json(const Solution& sol) {
  nlohmann::json j;
  j["locations"] = nlohmann::json::array();
  for (const auto& y : sol.locations) j["locations"].push_back(y.to_string());
  j["assignment"] = sol.assignment;
  return j;
}

nlohmann::json rationals_json(const std::vector<Rational>& v) {
  auto j = nlohmann::json::array();
  for (const auto& r : v) j.push_back(r.to_string());
  return j;
}

}  // namespace

std::string to_json(const AxiomReport& report) {
  nlohmann::json j;
  j["axiom"] = std::string(to_string(report.axiom));
  j["verdict"] = std::string(to_string(report.verdict));
  j["mechanism"] = report.mechanism;
  j["instance"] = nlohmann::json::parse(serialize_instance(report.instance));
  j["solution"] = solution_json(report.solution);
  j["explored"] = report.explored;
  std::visit(
      [&](const auto& w) {
        using W = std::decay_t<decltype(w)>;
        if constexpr (std::is_same_v<W, AnonymityWitness>) {
          j["witness"] = {{"kind", "permutation"},
                          {"permutation", w.permutation},
                          {"permuted_instance", nlohmann::json::parse(serialize_instance(w.permuted))},
                          {"permuted_solution", solution_json(w.permuted_solution)}};
        } else if constexpr (std::is_same_v<W, ParetoWitness>) {
          j["witness"] = {{"kind", "dominating-solution"},
                          {"solution", solution_json(w.dominating)},
                          {"improved_position", w.improved_position}};
        } else if constexpr (std::is_same_v<W, DeviationWitness>) {
          j["witness"] = {{"kind", "misreport"},
                          {"deviators", w.deviators},
                          {"misreport", w.misreport.to_string()},
                          {"before", rationals_json(w.before)},
                          {"after", rationals_json(w.after)}};
        } else {
          j["witness"] = nullptr;
        }
      },
      report.witness);
  return j.dump();
}

std::string describe(const AxiomReport& r) {
  std::ostringstream os;
  os << to_string(r.axiom) << ' ' << to_string(r.verdict) << " on " << describe(r.instance);
  if (const auto* w = std::get_if<DeviationWitness>(&r.witness)) {
    os << ": agent";
    if (w->deviators.size() > 1) os << 's';
    for (std::size_t i = 0; i < w->deviators.size(); ++i) os << (i ? "," : " ") << w->deviators[i] + 1;
    os << " misreport " << w->misreport << ", distance " << w->before.front() << " -> " << w->after.front();
  } else if (const auto* w = std::get_if<ParetoWitness>(&r.witness)) {
    os << ": dominated by y=" << format_rationals(w->dominating.locations);
  } else if (const auto* w = std::get_if<AnonymityWitness>(&r.witness)) {
    os << ": permuted reports " << format_rationals(w->permuted.reports_by_id()) << " give y="
       << format_rationals(w->permuted_solution.locations) << " instead of y="
       << format_rationals(w->original_solution.locations);
  }
  return os.str();
}

}  // namespace caploc
