#include "caploc/core.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "json.hpp"

namespace caploc {

namespace {
std::atomic<std::uint64_t> g_checked{0};
std::atomic<std::uint64_t> g_violations{0};
}  // namespace

std::string_view to_string(Objective obj) { return obj == Objective::Total ? "total" : "max"; }

Objective parse_objective(std::string_view text) {
  if (text == "total") return Objective::Total;
  if (text == "max") return Objective::Max;
  throw ParseError("unknown objective '" + std::string(text) + "' (expected total|max)");
}

Instance::Instance(std::vector<Rational> locations, std::vector<int> capacities)
    : capacities_(std::move(capacities)) {
  if (locations.empty()) throw InvalidInstance("instance has no agents");
  if (capacities_.empty()) throw InvalidInstance("instance has no facilities");
  for (std::size_t j = 0; j < capacities_.size(); ++j)
    if (capacities_[j] <= 0)
      throw InvalidInstance("capacity of facility " + std::to_string(j + 1) + " is not positive");
  if (total_capacity() < static_cast<long>(locations.size()))
    throw InvalidInstance("total capacity " + std::to_string(total_capacity()) + " < " +
                          std::to_string(locations.size()) + " agents");

  const std::size_t n = locations.size();
  ids_.resize(n);
  std::iota(ids_.begin(), ids_.end(), AgentId{0});
  std::stable_sort(ids_.begin(), ids_.end(),
                   [&](AgentId a, AgentId b) { return locations[a] < locations[b]; });
  positions_.resize(n);
  locations_.reserve(n);
  for (std::size_t pos = 0; pos < n; ++pos) {
    positions_[ids_[pos]] = pos;
    locations_.push_back(locations[ids_[pos]]);
  }
}

long Instance::total_capacity() const {
  return std::accumulate(capacities_.begin(), capacities_.end(), 0L);
}

std::vector<Rational> Instance::reports_by_id() const {
  std::vector<Rational> out(num_agents());
  for (std::size_t pos = 0; pos < num_agents(); ++pos) out[ids_[pos]] = locations_[pos];
  return out;
}

Instance Instance::with_report(AgentId id, const Rational& report) const {
  auto reports = reports_by_id();
  reports.at(id) = report;
  return Instance(std::move(reports), capacities_);
}

Instance Instance::with_reports(std::span<const AgentId> ids, const Rational& report) const {
  auto reports = reports_by_id();
  for (AgentId id : ids) reports.at(id) = report;
  return Instance(std::move(reports), capacities_);
}

std::optional<Violation> validate_solution(const Instance& inst, const Solution& sol) {
  const std::size_t m = inst.num_facilities();
  if (sol.locations.size() != m)
    return Violation{Violation::Kind::LocationCount, std::nullopt,
                     "location count " + std::to_string(sol.locations.size()) + " != " +
                         std::to_string(m) + " facilities"};
  if (sol.assignment.size() != inst.num_agents())
    return Violation{Violation::Kind::AssignmentLength, std::nullopt,
                     "assignment length " + std::to_string(sol.assignment.size()) + " != " +
                         std::to_string(inst.num_agents()) + " agents"};
  std::vector<int> load(m, 0);
  for (std::size_t i = 0; i < sol.assignment.size(); ++i) {
    const FacilityIndex j = sol.assignment[i];
    if (j >= m)
      return Violation{Violation::Kind::FacilityOutOfRange, j,
                       "agent " + std::to_string(i + 1) + " assigned to facility " +
                           std::to_string(j + 1) + " of " + std::to_string(m)};
    ++load[j];
  }
  for (std::size_t j = 0; j < m; ++j)
    if (load[j] > inst.capacity(j))
      return Violation{Violation::Kind::CapacityExceeded, j,
                       "facility " + std::to_string(j + 1) + " serves " + std::to_string(load[j]) +
                           " agents but has capacity " + std::to_string(inst.capacity(j))};
  return std::nullopt;
}

namespace {
void require_feasible(const Instance& inst, const Solution& sol) {
  if (auto v = validate_solution(inst, sol)) throw InfeasibleSolution(std::move(*v));
}
}  // namespace

Rational agent_distance(const Instance& inst, const Solution& sol, std::size_t pos) {
  return abs_diff(inst.location(pos), sol.serving_location(pos));
}

std::vector<Rational> agent_distances(const Instance& inst, const Solution& sol) {
  require_feasible(inst, sol);
  std::vector<Rational> out;
  out.reserve(inst.num_agents());
  for (std::size_t i = 0; i < inst.num_agents(); ++i) out.push_back(agent_distance(inst, sol, i));
  return out;
}

Rational total_distance(const Instance& inst, const Solution& sol) {
  require_feasible(inst, sol);
  Rational sum;
  for (std::size_t i = 0; i < inst.num_agents(); ++i) sum += agent_distance(inst, sol, i);
  return sum;
}

Rational max_distance(const Instance& inst, const Solution& sol) {
  require_feasible(inst, sol);
  Rational worst;
  for (std::size_t i = 0; i < inst.num_agents(); ++i) worst = max(worst, agent_distance(inst, sol, i));
  return worst;
}

Rational welfare(const Instance& inst, const Solution& sol, Objective obj) {
  return obj == Objective::Total ? total_distance(inst, sol) : max_distance(inst, sol);
}

void check_solution_invariants(const Instance& inst, const Solution& sol) {
  ++g_checked;
  if (auto v = validate_solution(inst, sol)) {
    ++g_violations;
    throw InfeasibleSolution(std::move(*v));
  }
  const Rational total = total_distance(inst, sol);
  const Rational worst = max_distance(inst, sol);
  const Rational n(static_cast<long>(inst.num_agents()));
  if (!(worst <= total && total <= n * worst)) {
    ++g_violations;
    throw std::logic_error("welfare sandwich violated: max=" + worst.to_string() +
                           " total=" + total.to_string());
  }
}

InvariantCounters invariant_counters() { return {g_checked.load(), g_violations.load()}; }

// ------------------------------------------------------------------ documents

Instance parse_instance(std::string_view json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("instance document: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("agents") || !doc.contains("capacities"))
    throw ParseError("instance document needs 'agents' and 'capacities'");
  const auto& agents = doc["agents"];
  const auto& caps = doc["capacities"];
  if (!agents.is_array() || !caps.is_array())
    throw ParseError("'agents' and 'capacities' must be arrays");

  std::vector<Rational> locations;
  for (const auto& a : agents) {
    if (a.is_string())
      locations.push_back(Rational::parse(a.get<std::string>()));
    else if (a.is_number_integer())
      locations.emplace_back(a.get<long>());
    else
      throw ParseError("agent locations must be rational strings");
  }
  std::vector<int> capacities;
  for (const auto& c : caps) {
    if (!c.is_number_integer()) throw ParseError("capacities must be integers");
    capacities.push_back(c.get<int>());
  }
  return Instance(std::move(locations), std::move(capacities));
}

std::string serialize_instance(const Instance& inst) {
  nlohmann::json doc;
  doc["agents"] = nlohmann::json::array();
  for (const auto& r : inst.reports_by_id()) doc["agents"].push_back(r.to_string());
  doc["capacities"] = std::vector<int>(inst.capacities().begin(), inst.capacities().end());
  return doc.dump();
}

namespace {
std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> out;
  if (text.empty()) return out;
  std::size_t start = 0;
  while (true) {
    const auto next = text.find(sep, start);
    out.push_back(text.substr(start, next - start));
    if (next == std::string_view::npos) break;
    start = next + 1;
  }
  return out;
}
}  // namespace

std::vector<Rational> parse_rational_list(std::string_view text) {
  std::vector<Rational> out;
  for (auto piece : split(text, ',')) out.push_back(Rational::parse(piece));
  return out;
}

std::vector<int> parse_int_list(std::string_view text) {
  std::vector<int> out;
  for (auto piece : split(text, ',')) {
    const Rational r = Rational::parse(piece);
    if (!r.is_integer()) throw ParseError("expected integer, got '" + std::string(piece) + "'");
    out.push_back(static_cast<int>(r.floor()));
  }
  return out;
}

std::string format_rationals(std::span<const Rational> values) {
  std::string out = "(";
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ",";
    out += values[i].to_short_string();
  }
  return out + ")";
}

std::string describe(const Instance& inst) {
  std::ostringstream os;
  os << format_rationals(inst.locations()) << " c=(";
  for (std::size_t j = 0; j < inst.num_facilities(); ++j) os << (j ? "," : "") << inst.capacity(j);
  os << ")";
  return os.str();
}

}  // namespace caploc
