#include <algorithm>
#include <random>

#include "caploc/core.hpp"

namespace caploc {

namespace {

std::vector<Rational> repeat(const Rational& x, int count) {
  return std::vector<Rational>(static_cast<std::size_t>(std::max(count, 0)), x);
}

void append(std::vector<Rational>& dst, const std::vector<Rational>& src) {
  dst.insert(dst.end(), src.begin(), src.end());
}

// Distribution results are produced from raw engine output so streams are
// reproducible across standard libraries.
long uniform_int(std::mt19937_64& rng, long lo, long hi) {
  const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
  return lo + static_cast<long>(rng() % span);
}

Rational grid_point(std::mt19937_64& rng, int resolution) {
  return Rational(uniform_int(rng, 0, resolution), resolution);
}

std::string numbered(const std::string& family, std::size_t index) {
  return family + "#" + std::to_string(index);
}

}  // namespace

std::vector<std::string> generator_families() {
  return {"uniform",      "clustered",    "random-capacities", "thm6-spare",  "ratio-total-k",
          "thm5-3fac",    "thm8-unequal", "thm1-percentile",   "thm7-family"};
}

std::vector<NamedInstance> gen_instances(const GeneratorSpec& spec, std::uint64_t seed) {
  std::vector<NamedInstance> out;
  std::mt19937_64 rng(seed);
  const std::string& family = spec.family;
  if (spec.resolution <= 0) throw std::invalid_argument("resolution must be positive");

  if (family == "uniform") {
    for (int t = 0; t < spec.count; ++t) {
      std::vector<Rational> agents;
      for (int i = 0; i < spec.n; ++i) agents.push_back(grid_point(rng, spec.resolution));
      out.push_back({numbered(family, out.size()), Instance(std::move(agents), spec.capacities)});
    }
  } else if (family == "clustered") {
    const auto m = static_cast<int>(spec.capacities.size());
    for (int t = 0; t < spec.count; ++t) {
      std::vector<Rational> centers;
      for (int j = 0; j < m; ++j) centers.emplace_back(uniform_int(rng, 0, 10L * m));
      std::vector<Rational> agents;
      for (int i = 0; i < spec.n; ++i) {
        const auto& center = centers[static_cast<std::size_t>(uniform_int(rng, 0, m - 1))];
        agents.push_back(center + Rational(uniform_int(rng, -spec.resolution, spec.resolution),
                                           spec.resolution));
      }
      out.push_back({numbered(family, out.size()), Instance(std::move(agents), spec.capacities)});
    }
  } else if (family == "random-capacities") {
    // two facilities, n in [2, spec.n], spare and unequal capacities allowed
    for (int t = 0; t < spec.count; ++t) {
      const int n = static_cast<int>(uniform_int(rng, 2, std::max(2, spec.n)));
      const int c1 = static_cast<int>(uniform_int(rng, 1, n));
      const int c2 = static_cast<int>(uniform_int(rng, std::max(1, n - c1), n));
      std::vector<Rational> agents;
      for (int i = 0; i < n; ++i) agents.push_back(grid_point(rng, spec.resolution));
      out.push_back({numbered(family, out.size()), Instance(std::move(agents), {c1, c2})});
    }
  } else if (family == "thm6-spare") {
    // c agents at 0, c-1 at 1, two facilities of capacity c (spare capacity 1)
    auto agents = repeat(Rational(0), spec.c);
    append(agents, repeat(Rational(1), spec.c - 1));
    out.push_back({family, Instance(std::move(agents), {spec.c, spec.c})});
  } else if (family == "ratio-total-k") {
    auto agents = repeat(Rational(0), spec.k - 1);
    append(agents, repeat(Rational(1), spec.k + 1));
    out.push_back({family + ":k=" + std::to_string(spec.k), Instance(std::move(agents), {spec.k, spec.k})});
  } else if (family == "thm5-3fac") {
    out.push_back({family, Instance({0, 0, 10, 10, 20, 20}, {2, 2, 2})});
  } else if (family == "thm8-unequal") {
    out.push_back({family, Instance({0, 0, 0, 1, 1}, {3, 2})});
  } else if (family == "thm1-percentile") {
    out.push_back({family + ":two", Instance({0, 1}, {2, 2})});
    out.push_back({family + ":six", Instance({0, 1, 1, 1, 1, 1}, {6, 6})});
  } else if (family == "thm7-family") {
    // k agents at -n^2, n-k-1 at 0, one agent sweeping x >= 0
    const int n = spec.n;
    const int k = spec.k;
    if (n <= 2 || k < 1 || 2 * k > n) throw std::invalid_argument("thm7-family needs n > 2 and 1 <= k <= n/2");
    const Rational far = -Rational(static_cast<long>(n) * n);
    const std::vector<Rational> sweep{Rational(0), Rational(1, 2), Rational(1), Rational(2),
                                      Rational(n), Rational(static_cast<long>(n) * n)};
    for (const auto& x : sweep) {
      auto agents = repeat(far, k);
      append(agents, repeat(Rational(0), n - k - 1));
      agents.push_back(x);
      out.push_back({family + ":n=" + std::to_string(n) + ",k=" + std::to_string(k) + ",x=" + x.to_short_string(),
                     Instance(std::move(agents), {n - k, n - k})});
    }
  } else {
    throw std::invalid_argument("unknown instance family '" + family + "'");
  }
  return out;
}

}  // namespace caploc
