#include <gtest/gtest.h>

#include <random>

#include "caploc/mechanisms.hpp"
#include "support.hpp"

using namespace caploc;
using caploc::testing::make;
using caploc::testing::q;
using caploc::testing::qs;

namespace {

const Allocation kCap{true, CapacityOrder::Ascending};

Rational distance_of(const Instance& inst, const Solution& sol, AgentId id) {
  return agent_distance(inst, sol, inst.position_of(id));
}

}  // namespace

TEST(Percentile, MedianOfThree) {
  const Solution sol = run_mechanism(Percentile{{q("1/2")}, {}}, make({"0", "1/5", "1"}, {3}));
  EXPECT_EQ(sol.locations, qs({"1/5"}));
}

TEST(Percentile, SameParameterStacksFacilities) {
  const Instance inst = make({"0", "1"}, {2, 2});
  const Solution sol = run_mechanism(Percentile{{0, 0}, {}}, inst);
  EXPECT_EQ(sol.locations, qs({"0", "0"}));
  EXPECT_EQ(max_distance(inst, sol), Rational(1));
}

TEST(Percentile, QuartilesOnFiveOnes) {
  const Solution sol = run_mechanism(Percentile{qs({"1/4", "3/4"}), {}}, make({"0", "1", "1", "1", "1", "1"}, {6, 6}));
  EXPECT_EQ(sol.locations, qs({"1", "1"}));
}

TEST(Percentile, SlotIsFloorOfPTimesNMinusOne) {
  // n = 5: p = 1/3 -> floor(4/3) = 1, p = 3/4 -> 3
  const Solution sol = run_mechanism(Percentile{qs({"1/3", "3/4"}), {}}, make({"0", "1", "2", "3", "4"}, {5, 5}));
  EXPECT_EQ(sol.locations, qs({"1", "3"}));
}

TEST(Percentile, CapacitatedFillsLeftToRight) {
  const Instance inst = make({"0", "0", "0", "1"}, {2, 2});
  const Solution sol = run_mechanism(Percentile{{0, 1}, kCap}, inst);
  EXPECT_EQ(sol.locations, qs({"0", "1"}));
  EXPECT_EQ(sol.assignment, (std::vector<FacilityIndex>{0, 0, 1, 1}));
}

TEST(Percentile, CapacityOrderVariants) {
  // capacities (3,1): ascending puts the capacity-1 facility on the left slot
  const Instance inst = make({"0", "1", "2", "3"}, {3, 1});
  const Solution up = run_mechanism(Percentile{{0, 1}, {true, CapacityOrder::Ascending}}, inst);
  EXPECT_EQ(up.locations, qs({"3", "0"}));
  EXPECT_EQ(up.assignment, (std::vector<FacilityIndex>{1, 0, 0, 0}));
  const Solution down = run_mechanism(Percentile{{0, 1}, {true, CapacityOrder::Descending}}, inst);
  EXPECT_EQ(down.locations, qs({"0", "3"}));
  EXPECT_EQ(down.assignment, (std::vector<FacilityIndex>{0, 0, 0, 1}));
}

TEST(Percentile, UncapacitatedNeedsNonBindingCapacities) {
  EXPECT_THROW(run_mechanism(Percentile{{0, 1}, {}}, make({"0", "0", "1"}, {2, 2})), UnsupportedInstance);
  EXPECT_FALSE(applicable(Percentile{{0, 1}, {}}, make({"0", "0", "1"}, {2, 2})));
  EXPECT_THROW(run_mechanism(Percentile{{0, 1}, kCap}, make({"0", "1"}, {2})), UnsupportedInstance);
}

TEST(JLeftKRight, Examples) {
  const Solution two_left = run_mechanism(JLeftKRight{2, 0, {}}, make({"0", "0", "1"}, {3, 3}));
  EXPECT_EQ(two_left.locations, qs({"0", "1"}));

  const Instance three = make({"0", "1/2", "1"}, {3, 3});
  const Solution endpoint = run_mechanism(JLeftKRight{1, 1, {}}, three);
  EXPECT_EQ(endpoint.locations, qs({"0", "1"}));
  EXPECT_EQ(endpoint.assignment[1], 0u);

  const Solution stacked = run_mechanism(JLeftKRight{2, 0, {}}, make({"0", "0", "0"}, {3, 3}));
  EXPECT_EQ(stacked.locations, qs({"0", "0"}));
}

TEST(JLeftKRight, SurplusStacksAtTheEnds) {
  // each group takes its own distinct points; only a group larger than the
  // number of distinct locations stacks its surplus at its own end
  const Solution both = run_mechanism(JLeftKRight{2, 1, {}}, make({"0", "1", "1"}, {3, 3, 3}));
  EXPECT_EQ(both.locations, qs({"0", "1", "1"}));
  const Solution left = run_mechanism(JLeftKRight{3, 0, {}}, make({"0", "1", "1"}, {3, 3, 3}));
  EXPECT_EQ(left.locations, qs({"0", "0", "1"}));
  const Solution right = run_mechanism(JLeftKRight{0, 3, {}}, make({"0", "1", "1"}, {3, 3, 3}));
  EXPECT_EQ(right.locations, qs({"0", "1", "1"}));
  const Solution three = run_mechanism(JLeftKRight{3, 0, {}}, make({"0", "2", "5", "7"}, {4, 4, 4}));
  EXPECT_EQ(three.locations, qs({"0", "2", "5"}));
}

TEST(InnerPoint, Examples) {
  const Instance balanced = make({"0", "0", "1", "1"}, {2, 2});
  const Solution a = run_mechanism(InnerPoint{}, balanced);
  EXPECT_EQ(a.locations, qs({"0", "1"}));
  EXPECT_EQ(total_distance(balanced, a), Rational(0));

  const Instance skew = make({"0", "0", "0", "1"}, {2, 2});
  const Solution b = run_mechanism(InnerPoint{}, skew);
  EXPECT_EQ(b.locations, qs({"0", "0"}));
  EXPECT_EQ(b.assignment, (std::vector<FacilityIndex>{0, 0, 1, 1}));
  EXPECT_EQ(total_distance(skew, b), Rational(1));
  EXPECT_EQ(max_distance(skew, b), Rational(1));

  const Instance mid = make({"0", "1/2", "1/2", "1"}, {2, 2});
  const Solution c = run_mechanism(InnerPoint{}, mid);
  EXPECT_EQ(c.locations, qs({"1/2", "1/2"}));
  EXPECT_EQ(max_distance(mid, c), q("1/2"));
}

TEST(InnerPoint, RejectsSpareCapacityAndOtherM) {
  EXPECT_THROW(run_mechanism(InnerPoint{}, make({"0", "0", "1"}, {2, 2})), UnsupportedInstance);
  EXPECT_THROW(run_mechanism(InnerPoint{}, make({"0", "0", "1"}, {1, 1, 1})), UnsupportedInstance);
  EXPECT_NO_THROW(run_mechanism(InnerPoint{}, make({"0", "0", "1"}, {1, 2})));
}

TEST(ExtendedEndPoint, CaseOne) {
  const Instance inst = make({"0", "1"}, {1, 1});
  EXPECT_EQ(extended_endpoint_case(inst).number, 1);
  EXPECT_EQ(run_mechanism(ExtendedEndPoint{}, inst).locations, qs({"0", "1"}));
}

TEST(ExtendedEndPoint, CaseTwo) {
  const Instance inst = make({"0", "0", "0", "1"}, {2, 2});
  EXPECT_EQ(extended_endpoint_case(inst).number, 2);
  const Solution sol = run_mechanism(ExtendedEndPoint{}, inst);
  EXPECT_EQ(sol.locations, qs({"-1", "1"}));
  EXPECT_EQ(sol.assignment, (std::vector<FacilityIndex>{0, 0, 1, 1}));
  EXPECT_EQ(total_distance(inst, sol), Rational(3));
}

TEST(ExtendedEndPoint, CaseThree) {
  const Instance inst = make({"0", "1/10", "9/10", "1"}, {3, 1});
  EXPECT_EQ(extended_endpoint_case(inst).number, 3);
  const Solution sol = run_mechanism(ExtendedEndPoint{}, inst);
  EXPECT_EQ(sol.locations, qs({"0", "9/5"}));
  EXPECT_EQ(sol.assignment, (std::vector<FacilityIndex>{0, 0, 0, 1}));
}

TEST(ExtendedEndPoint, MirrorsWhenTheRightGroupIsLarger) {
  // X1 = {0}, X2 = {1,1,1}: facility 2 takes the majority role from the right.
  const Instance inst = make({"0", "1", "1", "1"}, {2, 2});
  const auto which = extended_endpoint_case(inst);
  EXPECT_TRUE(which.mirrored);
  EXPECT_EQ(which.number, 2);
  const Solution sol = run_mechanism(ExtendedEndPoint{}, inst);
  EXPECT_EQ(sol.locations, qs({"0", "2"}));
  EXPECT_EQ(sol.assignment, (std::vector<FacilityIndex>{0, 0, 1, 1}));
}

TEST(ExtendedEndPoint, NeverUndefinedOnRandomInstances) {
  GeneratorSpec spec;
  spec.family = "random-capacities";
  spec.n = 7;
  spec.count = 2000;
  for (const auto& [id, inst] : gen_instances(spec, 5)) {
    const auto which = extended_endpoint_case(inst);
    EXPECT_GE(which.number, 1);
    EXPECT_LE(which.number, 3);
    EXPECT_NO_THROW(run_mechanism(ExtendedEndPoint{}, inst)) << id;
  }
}

TEST(CapSD, Examples) {
  const Solution a = run_mechanism(CapSD{{0, 1, 2, 3}}, make({"0", "0", "1", "1"}, {2, 2}));
  EXPECT_EQ(a.locations, qs({"0", "1"}));

  const Instance inst = make({"0", "1/2", "1", "1"}, {2, 2});
  const Solution b = run_mechanism(CapSD{{0, 1, 2, 3}}, inst);
  EXPECT_EQ(b.locations, qs({"0", "1/2"}));
  EXPECT_EQ(b.assignment[inst.position_of(3)], 0u);
  EXPECT_EQ(distance_of(inst, b, 3), Rational(1));

  const Solution c = run_mechanism(CapSD{{3, 2, 1, 0}}, inst);
  EXPECT_EQ(c.locations, qs({"1", "1/2"}));
}

TEST(CapSD, DefersEquidistantAgents) {
  // facilities open at 0 and 1; the agent at 1/2 is equidistant and deferred,
  // then the final phase gives it the lower-index facility with room.
  const Instance inst = make({"0", "1", "1/2", "1"}, {2, 2});
  const Solution sol = run_mechanism(CapSD{{0, 1, 2, 3}}, inst);
  EXPECT_EQ(sol.locations, qs({"0", "1"}));
  EXPECT_EQ(sol.assignment[inst.position_of(2)], 0u);
  EXPECT_EQ(sol.assignment[inst.position_of(3)], 1u);
}

TEST(CapSD, RejectsBadOrders) {
  EXPECT_THROW(run_mechanism(CapSD{{0, 1, 2}}, make({"0", "0", "1", "1"}, {2, 2})), UnsupportedInstance);
  EXPECT_THROW(validate_mechanism(CapSD{{0, 0, 1, 2}}), std::invalid_argument);
}

TEST(Fixtures, FixtureBExamples) {
  const Instance truthful = make({"1/5", "2/5", "1"}, {1, 2});
  const Solution sol = run_mechanism(FixtureB{}, truthful);
  EXPECT_EQ(sol.locations, qs({"1/5", "1"}));
  EXPECT_EQ(distance_of(truthful, sol, 1), q("3/5"));

  const Instance deviated = truthful.with_report(1, 0);
  const Solution after = run_mechanism(FixtureB{}, deviated);
  EXPECT_EQ(after.serving_location(deviated.position_of(1)), Rational(0));
  EXPECT_EQ(caploc::abs_diff(q("2/5"), after.serving_location(deviated.position_of(1))), q("2/5"));
}

TEST(Fixtures, FixtureCFollowsUpToThreshold) {
  const FixtureC fixture{q("1/4")};
  for (const char* x : {"1/10", "1/5", "1/4"}) {
    const Rational v = q(x);
    const Solution sol = run_mechanism(fixture, Instance({v / Rational(2), v, v}, {1, 2}));
    EXPECT_EQ(sol.locations[1], v) << x;
  }
  const Solution far = run_mechanism(fixture, make({"0", "0", "1"}, {1, 2}));
  EXPECT_EQ(far.locations[1], q("1/4"));
}

TEST(Fixtures, FixtureDStaysStrictlyInside) {
  const FixtureD fixture;
  const Solution at_a = run_mechanism(fixture, make({"0", "0", "1/2"}, {1, 2}));
  EXPECT_EQ(at_a.locations[1], q("1/4"));
  const Solution at_b = run_mechanism(fixture, make({"0", "0", "3/4"}, {1, 2}));
  EXPECT_EQ(at_b.locations[1], q("1/2"));
  for (const char* x3 : {"1/10", "1/3", "2/3", "1", "3"}) {
    const Solution sol = run_mechanism(fixture, make({"0", "0", x3}, {1, 2}));
    EXPECT_GT(sol.locations[1], Rational(0)) << x3;
    EXPECT_LT(sol.locations[1], q(x3)) << x3;
  }
  EXPECT_THROW(validate_mechanism(FixtureD{q("1/2"), q("1/4"), q("1/8")}), std::invalid_argument);
}

TEST(Fixtures, RequireThreeAgentsAndCapacitiesOneTwo) {
  EXPECT_THROW(run_mechanism(FixtureB{}, make({"0", "1"}, {1, 2})), UnsupportedInstance);
  EXPECT_THROW(run_mechanism(FixtureB{}, make({"0", "1", "2"}, {2, 1})), UnsupportedInstance);
}

TEST(Canonical, RoundTrip) {
  const std::vector<MechanismId> mechs{
      Percentile{{q("1/2")}, {}},
      Percentile{qs({"1/4", "3/4"}), kCap},
      Percentile{{0, 1}, {true, CapacityOrder::Descending}},
      JLeftKRight{2, 0, {}},
      JLeftKRight{1, 1, kCap},
      InnerPoint{},
      ExtendedEndPoint{},
      CapSD{{3, 2, 1, 0}},
      FixtureB{},
      FixtureC{q("1/3")},
      FixtureD{},
  };
  for (const auto& m : mechs) EXPECT_EQ(parse_mechanism(to_string(m)), m) << to_string(m);
  EXPECT_EQ(to_string(Percentile{qs({"1/4", "3/4"}), kCap}), "percentile:cap:1/4,3/4");
  EXPECT_EQ(to_string(CapSD{{3, 2, 1, 0}}), "capsd:4,3,2,1");
  EXPECT_EQ(to_string(InnerPoint{}), "innerpoint");
}

TEST(Canonical, Aliases) {
  EXPECT_EQ(parse_mechanism("median"), MechanismId(Percentile{{q("1/2")}, {}}));
  EXPECT_EQ(parse_mechanism("endpoint:cap"), MechanismId(JLeftKRight{1, 1, kCap}));
  EXPECT_EQ(parse_mechanism("twoleftpeaks"), MechanismId(JLeftKRight{2, 0, {}}));
  EXPECT_EQ(parse_mechanism("tworightpeaks:cap"), MechanismId(JLeftKRight{0, 2, kCap}));
  EXPECT_EQ(parse_mechanism("threeleftpeaks:capdesc"),
            MechanismId(JLeftKRight{3, 0, {true, CapacityOrder::Descending}}));
  EXPECT_EQ(parse_mechanism("percentile:0,1"), MechanismId(Percentile{{0, 1}, {}}));
}

TEST(Canonical, RejectsMalformed) {
  for (const char* bad : {"", "nope", "percentile", "percentile:cap:", "percentile:cap:1/2,1/4", "percentile:cap:2",
                          "jlkr:cap:1", "jlkr:xyz:1,1", "capsd:1,1", "capsd:0,1", "fixture-d:1,1,1", "innerpoint:cap"})
    EXPECT_THROW(parse_mechanism(bad), ParseError) << bad;
}

TEST(Properties, AffineEquivariance) {
  GeneratorSpec spec;
  spec.family = "random-capacities";
  spec.n = 6;
  spec.count = 200;
  const Rational scale(5, 2);
  const Rational shift(-7, 3);
  for (const auto& [id, inst] : gen_instances(spec, 11)) {
    std::vector<Rational> moved;
    for (const auto& r : inst.reports_by_id()) moved.push_back(scale * r + shift);
    const Instance image(moved, std::vector<int>(inst.capacities().begin(), inst.capacities().end()));
    std::vector<AgentId> order;
    for (AgentId k = inst.num_agents(); k-- > 0;) order.push_back(k);
    const std::vector<MechanismId> mechs{Percentile{{0, 1}, kCap},          Percentile{qs({"1/4", "1/2"}), kCap},
                                         JLeftKRight{1, 1, kCap},           JLeftKRight{0, 2, kCap},
                                         ExtendedEndPoint{},                InnerPoint{},
                                         CapSD{order}};
    for (const auto& m : mechs) {
      if (!applicable(m, inst)) continue;
      const Solution a = run_mechanism(m, inst);
      const Solution b = run_mechanism(m, image);
      ASSERT_EQ(a.assignment, b.assignment) << to_string(m) << " " << id;
      for (std::size_t j = 0; j < a.locations.size(); ++j)
        EXPECT_EQ(scale * a.locations[j] + shift, b.locations[j]) << to_string(m) << " " << id;
    }
  }
}

TEST(Properties, FixturesAreTranslationEquivariant) {
  for (const MechanismId& m : {MechanismId(FixtureB{}), MechanismId(FixtureC{}), MechanismId(FixtureD{})}) {
    for (const char* x3 : {"1/10", "2/5", "7/10", "2"}) {
      const Instance inst = make({"0", "1/10", x3}, {1, 2});
      const Rational shift(3, 7);
      std::vector<Rational> moved;
      for (const auto& r : inst.reports_by_id()) moved.push_back(r + shift);
      const Solution a = run_mechanism(m, inst);
      const Solution b = run_mechanism(m, Instance(moved, {1, 2}));
      EXPECT_EQ(a.assignment, b.assignment);
      for (std::size_t j = 0; j < 2; ++j) EXPECT_EQ(a.locations[j] + shift, b.locations[j]);
    }
  }
}

TEST(Properties, InnerPointAssignmentIsContiguous) {
  GeneratorSpec spec;
  spec.family = "uniform";
  for (int k = 1; k <= 4; ++k) {
    spec.n = 2 * k + 1;
    spec.capacities = {k, k + 1};
    spec.count = 100;
    for (const auto& [id, inst] : gen_instances(spec, static_cast<std::uint64_t>(k))) {
      const Solution sol = run_mechanism(InnerPoint{}, inst);
      EXPECT_TRUE(std::is_sorted(sol.assignment.begin(), sol.assignment.end())) << id;
    }
  }
}

TEST(Properties, UncapacitatedOutputsIgnoreIds) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Rational> xs;
    for (int i = 0; i < 5; ++i) xs.emplace_back(static_cast<long>(rng() % 9), 4);
    std::vector<Rational> shuffled = xs;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    const Instance a(xs, {5, 5});
    const Instance b(shuffled, {5, 5});
    for (const MechanismId& m : {MechanismId(Percentile{qs({"1/4", "3/4"}), {}}), MechanismId(JLeftKRight{1, 1, {}}),
                                 MechanismId(JLeftKRight{2, 0, {}})}) {
      const Solution sa = run_mechanism(m, a);
      const Solution sb = run_mechanism(m, b);
      EXPECT_EQ(sa.locations, sb.locations);
      for (std::size_t pos = 0; pos < 5; ++pos) EXPECT_EQ(sa.serving_location(pos), sb.serving_location(pos));
    }
  }
}
