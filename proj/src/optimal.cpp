#include "caploc/optimal.hpp"

#include <algorithm>
#include <numeric>

namespace caploc {

namespace {

void require_capacity(const Instance& inst) {
  // Instance already enforces sum c >= n; kept for callers building odd inputs.
  if (inst.total_capacity() < static_cast<long>(inst.num_agents()))
    throw InvalidInstance("infeasible capacities");
}

// Cost of serving sorted agents [lo, hi) from one facility, plus its location.
struct Block {
  Rational cost;
  Rational location;
};

Block block(std::span<const Rational> x, std::size_t lo, std::size_t hi, Objective obj) {
  if (obj == Objective::Max) return {(x[hi - 1] - x[lo]) / Rational(2), (x[lo] + x[hi - 1]) / Rational(2)};
  const std::size_t len = hi - lo;
  const Rational& median = x[lo + (len - 1) / 2];  // lower median
  Rational cost;
  for (std::size_t i = lo; i < hi; ++i) cost += abs_diff(x[i], median);
  return {std::move(cost), median};
}

Rational combine(const Rational& acc, const Rational& cost, Objective obj) {
  return obj == Objective::Total ? acc + cost : max(acc, cost);
}

struct DpPlan {
  Rational value;
  std::vector<std::size_t> sizes;  // block sizes in left-to-right order
};

// Best split of the n sorted agents into blocks for facilities in `order`.
std::optional<DpPlan> best_split(std::span<const Rational> x, std::span<const int> capacities,
                                 std::span<const FacilityIndex> order, Objective obj,
                                 const std::vector<std::vector<Rational>>& cost) {
  const std::size_t n = x.size();
  const std::size_t m = order.size();
  // best[t][i]: first i agents served by the first t facilities in `order`.
  std::vector<std::vector<std::optional<Rational>>> best(m + 1, std::vector<std::optional<Rational>>(n + 1));
  std::vector<std::vector<std::size_t>> from(m + 1, std::vector<std::size_t>(n + 1, 0));
  best[0][0] = Rational(0);
  for (std::size_t t = 1; t <= m; ++t) {
    const auto cap = static_cast<std::size_t>(capacities[order[t - 1]]);
    for (std::size_t i = 0; i <= n; ++i) {
      const std::size_t lo_start = i > cap ? i - cap : 0;
      for (std::size_t start = lo_start; start <= i; ++start) {
        if (!best[t - 1][start]) continue;
        Rational candidate = start == i ? *best[t - 1][start] : combine(*best[t - 1][start], cost[start][i], obj);
        if (!best[t][i] || candidate < *best[t][i]) {
          best[t][i] = std::move(candidate);
          from[t][i] = start;
        }
      }
    }
  }
  if (!best[m][n]) return std::nullopt;
  DpPlan plan{*best[m][n], std::vector<std::size_t>(m)};
  std::size_t i = n;
  for (std::size_t t = m; t >= 1; --t) {
    plan.sizes[t - 1] = i - from[t][i];
    i = from[t][i];
  }
  return plan;
}

}  // namespace

OptResult opt_dp(const Instance& inst, Objective obj) {
  require_capacity(inst);
  const std::size_t n = inst.num_agents();
  const std::size_t m = inst.num_facilities();
  if (m > kMaxDpFacilities) throw GuardExceeded("opt_dp supports at most 5 facilities");
  const auto x = inst.locations();

  std::vector<std::vector<Rational>> cost(n + 1, std::vector<Rational>(n + 1));
  for (std::size_t lo = 0; lo < n; ++lo)
    for (std::size_t hi = lo + 1; hi <= n; ++hi) cost[lo][hi] = block(x, lo, hi, obj).cost;

  std::vector<FacilityIndex> order(m);
  std::iota(order.begin(), order.end(), FacilityIndex{0});
  std::optional<DpPlan> best;
  std::vector<FacilityIndex> best_order;
  do {
    auto plan = best_split(x, inst.capacities(), order, obj, cost);
    if (plan && (!best || plan->value < best->value)) {
      best = std::move(plan);
      best_order = order;
    }
  } while (std::next_permutation(order.begin(), order.end()));
  if (!best) throw InvalidInstance("no feasible assignment");

  // Witness: occupied blocks get their optimal location; idle facilities copy
  // the nearest occupied block in the left-to-right order (left wins ties).
  OptResult result{obj, best->value, Solution{std::vector<Rational>(m), std::vector<FacilityIndex>(n)}};
  std::vector<std::optional<Rational>> slot_location(m);
  std::size_t start = 0;
  for (std::size_t t = 0; t < m; ++t) {
    const std::size_t size = best->sizes[t];
    if (size > 0) {
      slot_location[t] = block(x, start, start + size, obj).location;
      for (std::size_t i = start; i < start + size; ++i) result.witness.assignment[i] = best_order[t];
    }
    start += size;
  }
  for (std::size_t t = 0; t < m; ++t) {
    if (slot_location[t]) {
      result.witness.locations[best_order[t]] = *slot_location[t];
      continue;
    }
    for (std::size_t dist = 1; dist < m; ++dist) {
      if (t >= dist && slot_location[t - dist]) {
        result.witness.locations[best_order[t]] = *slot_location[t - dist];
        break;
      }
      if (t + dist < m && slot_location[t + dist]) {
        result.witness.locations[best_order[t]] = *slot_location[t + dist];
        break;
      }
    }
  }
  check_solution_invariants(inst, result.witness);
  return result;
}

OptResult opt_bruteforce(const Instance& inst, Objective obj) {
  require_capacity(inst);
  const std::size_t n = inst.num_agents();
  const std::size_t m = inst.num_facilities();
  if (n > kMaxBruteForceAgents) throw GuardExceeded("opt_bruteforce supports at most 8 agents");

  std::vector<FacilityIndex> assignment(n, 0);
  std::vector<int> load(m, 0);
  std::optional<OptResult> best;

  // Evaluates one complete assignment from scratch.
  auto evaluate = [&]() {
    Solution sol{std::vector<Rational>(m), assignment};
    Rational value;
    for (FacilityIndex j = 0; j < m; ++j) {
      std::vector<Rational> group;
      for (std::size_t i = 0; i < n; ++i)
        if (assignment[i] == j) group.push_back(inst.location(i));
      if (group.empty()) continue;
      std::sort(group.begin(), group.end());
      Rational cost;
      if (obj == Objective::Total) {
        sol.locations[j] = group[(group.size() - 1) / 2];
        for (const auto& g : group) cost += abs_diff(g, sol.locations[j]);
        value += cost;
      } else {
        sol.locations[j] = (group.front() + group.back()) / Rational(2);
        cost = (group.back() - group.front()) / Rational(2);
        value = max(value, cost);
      }
    }
    if (!best || value < best->value) best = OptResult{obj, std::move(value), std::move(sol)};
  };

  // depth-first over a_i in lexicographic order
  auto recurse = [&](auto& self, std::size_t i) -> void {
    if (i == n) {
      evaluate();
      return;
    }
    for (FacilityIndex j = 0; j < m; ++j) {
      if (load[j] >= inst.capacity(j)) continue;
      ++load[j];
      assignment[i] = j;
      self(self, i + 1);
      --load[j];
    }
  };
  recurse(recurse, 0);
  if (!best) throw InvalidInstance("no feasible assignment");
  check_solution_invariants(inst, best->witness);
  return *best;
}

std::optional<Rational> welfare_ratio(const Rational& mechanism_welfare, const Rational& optimal_welfare) {
  if (optimal_welfare.is_zero()) {
    if (mechanism_welfare.is_zero()) return Rational(1);
    return std::nullopt;
  }
  return mechanism_welfare / optimal_welfare;
}

RatioRecord opt_welfare_ratio(const Instance& inst, const MechanismId& mech, Objective obj,
                              std::string instance_id) {
  const Solution sol = run_mechanism(mech, inst);
  RatioRecord rec;
  rec.mechanism = to_string(mech);
  rec.instance = instance_id.empty() ? describe(inst) : std::move(instance_id);
  rec.objective = obj;
  rec.mechanism_welfare = welfare(inst, sol, obj);
  rec.optimal_welfare = opt_dp(inst, obj).value;
  rec.ratio = welfare_ratio(rec.mechanism_welfare, rec.optimal_welfare);
  return rec;
}

}  // namespace caploc
