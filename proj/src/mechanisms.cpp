#include "caploc/mechanisms.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>

namespace caploc {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

[[noreturn]] void unsupported(const std::string& what) { throw UnsupportedInstance(what); }

void require_facilities(const Instance& inst, std::size_t m, const char* name) {
  if (inst.num_facilities() != m)
    unsupported(std::string(name) + " places " + std::to_string(m) + " facilities but the instance has " +
                std::to_string(inst.num_facilities()));
}

void require_non_binding(const Instance& inst, const char* name) {
  const auto n = static_cast<int>(inst.num_agents());
  for (int c : inst.capacities())
    if (c < n)
      unsupported(std::string(name) + " (uncapacitated) needs every capacity >= n = " + std::to_string(n));
}

std::vector<Rational> distinct_locations(const Instance& inst) {
  std::vector<Rational> out;
  for (const auto& x : inst.locations())
    if (out.empty() || out.back() != x) out.push_back(x);
  return out;
}

}  // namespace

// ---------------------------------------------------------------- allocation

std::vector<FacilityIndex> allocation_order(std::span<const int> capacities, CapacityOrder order) {
  std::vector<FacilityIndex> slots(capacities.size());
  std::iota(slots.begin(), slots.end(), FacilityIndex{0});
  std::stable_sort(slots.begin(), slots.end(), [&](FacilityIndex a, FacilityIndex b) {
    return order == CapacityOrder::Ascending ? capacities[a] < capacities[b] : capacities[a] > capacities[b];
  });
  return slots;
}

Solution place_and_assign(const Instance& inst, std::vector<Rational> slots, const Allocation& allocation) {
  const std::size_t m = inst.num_facilities();
  const std::size_t n = inst.num_agents();
  if (slots.size() != m) unsupported("slot count does not match facility count");
  Solution sol;
  sol.assignment.resize(n);

  if (!allocation.capacitated) {
    require_non_binding(inst, "mechanism");
    sol.locations = std::move(slots);
    for (std::size_t i = 0; i < n; ++i) {
      FacilityIndex best = 0;
      Rational best_d = abs_diff(inst.location(i), sol.locations[0]);
      for (FacilityIndex j = 1; j < m; ++j) {
        Rational d = abs_diff(inst.location(i), sol.locations[j]);
        if (d < best_d) {
          best_d = std::move(d);
          best = j;
        }
      }
      sol.assignment[i] = best;
    }
    return sol;
  }

  const auto order = allocation_order(inst.capacities(), allocation.order);
  sol.locations.resize(m);
  std::size_t next = 0;
  for (std::size_t t = 0; t < m; ++t) {
    const FacilityIndex j = order[t];
    sol.locations[j] = slots[t];
    for (int filled = 0; filled < inst.capacity(j) && next < n; ++filled) sol.assignment[next++] = j;
  }
  return sol;
}

// ---------------------------------------------------------------- mechanisms

Solution run_percentile(const Instance& inst, const Percentile& params) {
  validate_mechanism(params);
  require_facilities(inst, params.p.size(), "percentile");
  const long last = static_cast<long>(inst.num_agents()) - 1;
  std::vector<Rational> slots;
  for (const auto& p : params.p) slots.push_back(inst.location(static_cast<std::size_t>((p * Rational(last)).floor())));
  return place_and_assign(inst, std::move(slots), params.allocation);
}

Solution run_jleftkright(const Instance& inst, const JLeftKRight& params) {
  validate_mechanism(params);
  require_facilities(inst, static_cast<std::size_t>(params.left + params.right), "jlkr");
  const auto distinct = distinct_locations(inst);
  const auto d = distinct.size();
  std::vector<Rational> slots;
  for (std::size_t t = 0; t < static_cast<std::size_t>(params.left); ++t)
    slots.push_back(t < d ? distinct[t] : distinct.front());
  for (std::size_t t = 0; t < static_cast<std::size_t>(params.right); ++t)
    slots.push_back(t < d ? distinct[d - 1 - t] : distinct.back());
  std::sort(slots.begin(), slots.end());
  return place_and_assign(inst, std::move(slots), params.allocation);
}

Solution run_innerpoint(const Instance& inst) {
  require_facilities(inst, 2, "innerpoint");
  const auto c1 = static_cast<std::size_t>(inst.capacity(0));
  if (inst.spare_capacity() != 0) unsupported("innerpoint needs c1 + c2 = n (no spare capacity)");
  Solution sol;
  sol.locations = {inst.location(c1 - 1), inst.location(c1)};
  sol.assignment.resize(inst.num_agents());
  for (std::size_t i = 0; i < inst.num_agents(); ++i) sol.assignment[i] = i < c1 ? 0 : 1;
  return sol;
}

namespace {

struct EndPointResult {
  Rational f1, f2;
  std::vector<FacilityIndex> assignment;
  int case_number = 1;
};

// Cases 1-3 for sorted `x` with facility 1 on the left.
EndPointResult endpoint_cases(const std::vector<Rational>& x, std::size_t c1, std::size_t c2) {
  const std::size_t n = x.size();
  const Rational half_range = (x.back() - x.front()) / Rational(2);
  std::size_t left_count = 0;  // |X1|; X1 is a prefix of the sorted agents
  while (left_count < n && x[left_count] - x.front() <= half_range) ++left_count;
  const std::size_t right_count = n - left_count;

  EndPointResult r;
  std::size_t split = 0;  // positions < split go to facility 1
  if (left_count <= c1 && right_count <= c2) {
    r.case_number = 1;
    r.f1 = x.front();
    r.f2 = x.back();
    split = left_count;
  } else if (left_count > c1) {
    r.case_number = 2;
    r.f1 = Rational(2) * x[c1] - x.back();
    r.f2 = x.back();
    split = c1;
  } else {
    r.case_number = 3;
    r.f1 = x.front();
    r.f2 = Rational(2) * x[n - c2 - 1] - x.front();
    split = n - c2;
  }
  r.assignment.resize(n);
  for (std::size_t i = 0; i < n; ++i) r.assignment[i] = i < split ? 0 : 1;
  return r;
}

std::pair<EndPointResult, bool> extended_endpoint_impl(const Instance& inst) {
  require_facilities(inst, 2, "extendedendpoint");
  const std::size_t n = inst.num_agents();
  const auto c1 = static_cast<std::size_t>(inst.capacity(0));
  const auto c2 = static_cast<std::size_t>(inst.capacity(1));
  std::vector<Rational> x(inst.locations().begin(), inst.locations().end());

  const Rational half_range = (x.back() - x.front()) / Rational(2);
  std::size_t left_count = 0;
  for (const auto& v : x)
    if (v - x.front() <= half_range) ++left_count;
  if (2 * left_count >= n) return {endpoint_cases(x, c1, c2), false};

  // Role switch: reflect the line so facility 2 plays facility 1's part.
  std::vector<Rational> mirrored(n);
  for (std::size_t i = 0; i < n; ++i) mirrored[i] = -x[n - 1 - i];
  const auto m = endpoint_cases(mirrored, c2, c1);
  EndPointResult r;
  r.case_number = m.case_number;
  r.f1 = -m.f2;
  r.f2 = -m.f1;
  r.assignment.resize(n);
  for (std::size_t i = 0; i < n; ++i) r.assignment[n - 1 - i] = m.assignment[i] == 0 ? 1 : 0;
  return {std::move(r), true};
}

}  // namespace

EndPointCase extended_endpoint_case(const Instance& inst) {
  auto [r, mirrored] = extended_endpoint_impl(inst);
  return {r.case_number, mirrored};
}

Solution run_extended_endpoint(const Instance& inst) {
  auto [r, mirrored] = extended_endpoint_impl(inst);
  return Solution{{r.f1, r.f2}, std::move(r.assignment)};
}

Solution run_capsd(const Instance& inst, const CapSD& params) {
  validate_mechanism(params);
  const std::size_t n = inst.num_agents();
  const std::size_t m = inst.num_facilities();
  if (params.order.size() != n) unsupported("capsd order has " + std::to_string(params.order.size()) + " agents, instance has " + std::to_string(n));

  std::vector<Rational> loc(m);
  std::vector<int> load(m, 0);
  std::size_t opened = 0;
  Solution sol;
  sol.assignment.assign(n, 0);
  auto assign = [&](AgentId id, FacilityIndex j) {
    sol.assignment[inst.position_of(id)] = j;
    ++load[j];
  };
  auto has_room = [&](FacilityIndex j) { return load[j] < inst.capacity(j); };

  // Opening phase: dictators claim facilities at their own location.
  std::size_t k = 0;
  for (; k < n && opened < m; ++k) {
    const AgentId id = params.order[k];
    const Rational& x = inst.location(inst.position_of(id));
    bool joined = false;
    for (FacilityIndex j = 0; j < opened && !joined; ++j)
      if (loc[j] == x && has_room(j)) {
        assign(id, j);
        joined = true;
      }
    if (joined) continue;
    loc[opened] = x;
    assign(id, opened++);
  }
  for (FacilityIndex j = opened; j < m; ++j) loc[j] = loc[opened - 1];

  auto nearest_with_room = [&](const Rational& x) {
    std::vector<FacilityIndex> best;
    Rational best_d;
    for (FacilityIndex j = 0; j < m; ++j) {
      if (!has_room(j)) continue;
      Rational d = abs_diff(x, loc[j]);
      if (best.empty() || d < best_d) {
        best = {j};
        best_d = std::move(d);
      } else if (d == best_d) {
        best.push_back(j);
      }
    }
    return best;
  };

  std::vector<AgentId> deferred;
  for (; k < n; ++k) {
    const AgentId id = params.order[k];
    const auto best = nearest_with_room(inst.location(inst.position_of(id)));
    if (best.size() > 1)
      deferred.push_back(id);
    else
      assign(id, best.front());
  }
  for (AgentId id : deferred) assign(id, nearest_with_room(inst.location(inst.position_of(id))).front());

  sol.locations = std::move(loc);
  return sol;
}

namespace {
void require_fixture_shape(const Instance& inst) {
  if (inst.num_agents() != 3 || inst.num_facilities() != 2 || inst.capacity(0) != 1 || inst.capacity(1) != 2)
    unsupported("fixture mechanisms need 3 agents and capacities (1,2)");
}

Solution fixture_solution(const Instance& inst, Rational large) {
  return Solution{{inst.location(0), std::move(large)}, {0, 1, 1}};
}
}  // namespace

Solution run_fixture(const Instance& inst, const FixtureB&) {
  require_fixture_shape(inst);
  return fixture_solution(inst, inst.location(2));
}

Solution run_fixture(const Instance& inst, const FixtureC& params) {
  validate_mechanism(params);
  require_fixture_shape(inst);
  return fixture_solution(inst, min(inst.location(2), inst.location(1) + params.threshold));
}

Solution run_fixture(const Instance& inst, const FixtureD& params) {
  validate_mechanism(params);
  require_fixture_shape(inst);
  const auto& [a, b, c] = params;
  const Rational gap = inst.location(2) - inst.location(1);
  Rational lag;
  if (gap <= a)
    lag = c * gap / a;
  else if (gap <= b)
    lag = c + (a - c) * (gap - a) / (b - a);
  else
    lag = a + (gap - b);
  return fixture_solution(inst, inst.location(1) + lag);
}

Solution run_mechanism(const MechanismId& mech, const Instance& inst) {
  Solution sol = std::visit(
      overloaded{
          [&](const Percentile& p) { return run_percentile(inst, p); },
          [&](const JLeftKRight& p) { return run_jleftkright(inst, p); },
          [&](const InnerPoint&) { return run_innerpoint(inst); },
          [&](const ExtendedEndPoint&) { return run_extended_endpoint(inst); },
          [&](const CapSD& p) { return run_capsd(inst, p); },
          [&](const auto& fixture) { return run_fixture(inst, fixture); },
      },
      mech);
  check_solution_invariants(inst, sol);
  return sol;
}

bool applicable(const MechanismId& mech, const Instance& inst) {
  try {
    std::visit(overloaded{
                   [&](const Percentile& p) {
                     require_facilities(inst, p.p.size(), "percentile");
                     if (!p.allocation.capacitated) require_non_binding(inst, "percentile");
                   },
                   [&](const JLeftKRight& p) {
                     require_facilities(inst, static_cast<std::size_t>(p.left + p.right), "jlkr");
                     if (!p.allocation.capacitated) require_non_binding(inst, "jlkr");
                   },
                   [&](const InnerPoint&) {
                     require_facilities(inst, 2, "innerpoint");
                     if (inst.spare_capacity() != 0) unsupported("spare capacity");
                   },
                   [&](const ExtendedEndPoint&) { require_facilities(inst, 2, "extendedendpoint"); },
                   [&](const CapSD& p) {
                     if (p.order.size() != inst.num_agents()) unsupported("order length");
                   },
                   [&](const auto&) { require_fixture_shape(inst); },
               },
               mech);
  } catch (const UnsupportedInstance&) {
    return false;
  }
  return true;
}

std::optional<std::size_t> facility_count(const MechanismId& mech) {
  return std::visit(overloaded{
                        [](const Percentile& p) -> std::optional<std::size_t> { return p.p.size(); },
                        [](const JLeftKRight& p) -> std::optional<std::size_t> {
                          return static_cast<std::size_t>(p.left + p.right);
                        },
                        [](const CapSD&) -> std::optional<std::size_t> { return std::nullopt; },
                        [](const auto&) -> std::optional<std::size_t> { return 2; },
                    },
                    mech);
}

// ---------------------------------------------------------------- parameters

void validate_mechanism(const MechanismId& mech) {
  std::visit(overloaded{
                 [](const Percentile& p) {
                   if (p.p.empty()) throw std::invalid_argument("percentile needs at least one parameter");
                   for (std::size_t j = 0; j < p.p.size(); ++j) {
                     if (p.p[j] < Rational(0) || p.p[j] > Rational(1))
                       throw std::invalid_argument("percentile parameter outside [0,1]");
                     if (j > 0 && p.p[j] < p.p[j - 1])
                       throw std::invalid_argument("percentile parameters must be non-decreasing");
                   }
                 },
                 [](const JLeftKRight& p) {
                   if (p.left < 0 || p.right < 0 || p.left + p.right < 1)
                     throw std::invalid_argument("jlkr needs j, k >= 0 and j + k >= 1");
                 },
                 [](const CapSD& p) {
                   std::vector<AgentId> sorted = p.order;
                   std::sort(sorted.begin(), sorted.end());
                   for (std::size_t i = 0; i < sorted.size(); ++i)
                     if (sorted[i] != i) throw std::invalid_argument("capsd order is not a permutation");
                   if (sorted.empty()) throw std::invalid_argument("capsd order is empty");
                 },
                 [](const FixtureC& p) {
                   if (p.threshold.sign() < 0) throw std::invalid_argument("fixture-c threshold must be >= 0");
                 },
                 [](const FixtureD& p) {
                   if (!(Rational(0) <= p.c && p.c < p.a && p.a < p.b))
                     throw std::invalid_argument("fixture-d needs 0 <= c < a < b");
                 },
                 [](const auto&) {},
             },
             mech);
}

namespace {

std::string allocation_tag(const Allocation& a) {
  if (!a.capacitated) return "uncap";
  return a.order == CapacityOrder::Ascending ? "cap" : "capdesc";
}

Allocation parse_allocation_tag(std::string_view tag) {
  if (tag == "uncap") return {false, CapacityOrder::Ascending};
  if (tag == "cap") return {true, CapacityOrder::Ascending};
  if (tag == "capdesc") return {true, CapacityOrder::Descending};
  throw ParseError("unknown allocation tag '" + std::string(tag) + "' (expected uncap|cap|capdesc)");
}

std::vector<std::string_view> split_colon(std::string_view text) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto next = text.find(':', start);
    parts.push_back(text.substr(start, next - start));
    if (next == std::string_view::npos) break;
    start = next + 1;
  }
  return parts;
}

}  // namespace

std::string to_string(const MechanismId& mech) {
  return std::visit(
      overloaded{
          [](const Percentile& p) {
            std::string s = "percentile:" + allocation_tag(p.allocation) + ":";
            for (std::size_t j = 0; j < p.p.size(); ++j) s += (j ? "," : "") + p.p[j].to_short_string();
            return s;
          },
          [](const JLeftKRight& p) {
            return "jlkr:" + allocation_tag(p.allocation) + ":" + std::to_string(p.left) + "," + std::to_string(p.right);
          },
          [](const InnerPoint&) { return std::string("innerpoint"); },
          [](const ExtendedEndPoint&) { return std::string("extendedendpoint"); },
          [](const CapSD& p) {
            std::string s = "capsd:";
            for (std::size_t i = 0; i < p.order.size(); ++i) s += (i ? "," : "") + std::to_string(p.order[i] + 1);
            return s;
          },
          [](const FixtureB&) { return std::string("fixture-b"); },
          [](const FixtureC& p) { return "fixture-c:" + p.threshold.to_short_string(); },
          [](const FixtureD& p) {
            return "fixture-d:" + p.a.to_short_string() + "," + p.b.to_short_string() + "," + p.c.to_short_string();
          },
      },
      mech);
}

MechanismId parse_mechanism(std::string_view text) {
  const auto parts = split_colon(text);
  const std::string_view head = parts.front();
  auto fail = [&](const std::string& why) {
    return ParseError("mechanism '" + std::string(text) + "': " + why);
  };
  auto alloc_suffix = [&](std::size_t index) -> Allocation {
    if (parts.size() <= index) return {};
    if (parts.size() > index + 1) throw fail("too many fields");
    return parse_allocation_tag(parts[index]);
  };

  MechanismId mech;
  if (head == "percentile") {
    if (parts.size() == 2) {
      mech = Percentile{parse_rational_list(parts[1]), {}};
    } else if (parts.size() == 3) {
      mech = Percentile{parse_rational_list(parts[2]), parse_allocation_tag(parts[1])};
    } else {
      throw fail("expected percentile:<uncap|cap|capdesc>:<p1,...,pm>");
    }
  } else if (head == "jlkr") {
    std::vector<int> jk;
    Allocation alloc;
    if (parts.size() == 2) {
      jk = parse_int_list(parts[1]);
    } else if (parts.size() == 3) {
      alloc = parse_allocation_tag(parts[1]);
      jk = parse_int_list(parts[2]);
    } else {
      throw fail("expected jlkr:<uncap|cap|capdesc>:<j>,<k>");
    }
    if (jk.size() != 2) throw fail("expected two counts j,k");
    mech = JLeftKRight{jk[0], jk[1], alloc};
  } else if (head == "median" || head == "leftmost") {
    mech = Percentile{{head == "median" ? Rational(1, 2) : Rational(0)}, alloc_suffix(1)};
  } else if (head == "endpoint") {
    mech = JLeftKRight{1, 1, alloc_suffix(1)};
  } else if (head == "twoleftpeaks") {
    mech = JLeftKRight{2, 0, alloc_suffix(1)};
  } else if (head == "tworightpeaks") {
    mech = JLeftKRight{0, 2, alloc_suffix(1)};
  } else if (head == "threeleftpeaks") {
    mech = JLeftKRight{3, 0, alloc_suffix(1)};
  } else if (head == "threerightpeaks") {
    mech = JLeftKRight{0, 3, alloc_suffix(1)};
  } else if (head == "innerpoint" && parts.size() == 1) {
    mech = InnerPoint{};
  } else if (head == "extendedendpoint" && parts.size() == 1) {
    mech = ExtendedEndPoint{};
  } else if (head == "capsd" && parts.size() == 2) {
    CapSD sd;
    for (int id : parse_int_list(parts[1])) {
      if (id < 1) throw fail("capsd ids are 1-based");
      sd.order.push_back(static_cast<AgentId>(id - 1));
    }
    mech = std::move(sd);
  } else if (head == "fixture-b" && parts.size() == 1) {
    mech = FixtureB{};
  } else if (head == "fixture-c" && parts.size() <= 2) {
    FixtureC c;
    if (parts.size() == 2) c.threshold = Rational::parse(parts[1]);
    mech = c;
  } else if (head == "fixture-d" && parts.size() <= 2) {
    FixtureD d;
    if (parts.size() == 2) {
      auto abc = parse_rational_list(parts[1]);
      if (abc.size() != 3) throw fail("expected a,b,c");
      d = FixtureD{abc[0], abc[1], abc[2]};
    }
    mech = d;
  } else {
    throw fail("unknown mechanism");
  }
  try {
    validate_mechanism(mech);
  } catch (const std::invalid_argument& e) {
    throw fail(e.what());
  }
  return mech;
}

}  // namespace caploc
