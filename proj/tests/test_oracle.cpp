#include <cmath>

#include "doctest.h"
#include "storyline/oracle.hpp"
#include "storyline/programs.hpp"
#include "storyline/solver.hpp"
#include "support.hpp"

using namespace storyline;
using storyline::testing::makeInstance;

namespace {

// Counts integral stackings by trying every vector in [0, limit)^k.
std::size_t naiveStackings(const OrderedStorylineInstance& inst, const NicenessParams& params, Step t,
                           long long limit) {
  const auto order = inst.ordering(t);
  const std::size_t k = order.size();
  if (k == 0) return 1;
  std::vector<long long> y(k, 0);
  std::size_t count = 0;
  while (true) {
    bool ok = true;
    for (std::size_t p = 0; p + 1 < k && ok; ++p) {
      const long long d = y[p + 1] - y[p];
      ok = inst.shareMeeting(t, order[p], order[p + 1]) ? d == static_cast<long long>(params.delta)
                                                        : d >= static_cast<long long>(params.deltaBar);
    }
    count += ok;
    std::size_t p = 0;
    while (p < k && ++y[p] == limit) y[p++] = 0;
    if (p == k) break;
  }
  return count;
}

}  // namespace

TEST_CASE("oracle on the crossing pair") {
  const auto inst = testing::crossingPair();
  const auto wc = bruteForceOracle(inst, {}, WiggleObjective::WC);
  CHECK(wc.optimum == 1.0);
  CHECK(computeMetrics(inst, wc.witness).wiggleCount == 1);
  CHECK(isNice(inst, wc.witness, {}).nice);
  CHECK(bruteForceOracle(inst, {}, WiggleObjective::LWH).optimum == 2.0);
  CHECK(bruteForceOracle(inst, {}, WiggleObjective::QWH).optimum == 2.0);
}

TEST_CASE("oracle on an empty instance") {
  const auto inst = makeInstance({});
  const auto r = bruteForceOracle(inst, {}, WiggleObjective::WC);
  CHECK(r.optimum == 0.0);
  CHECK(r.witness.stepCount() == 0);
}

TEST_CASE("stacking counts") {
  const auto two = makeInstance({{"a", "b"}});
  CHECK(countStackings(two, {}, 0, 4) == 6);
  const auto met = makeInstance({{"a", "b"}}, {{1, {"a", "b"}}});
  CHECK(countStackings(met, {}, 0, 4) == 3);
  testing::Rng rng(5);
  for (int i = 0; i < 60; ++i) {
    const auto inst = testing::randomInstance(rng, {1, 4, 1, 3, 2, false});
    const NicenessParams params{static_cast<double>(rng.between(1, 2)), static_cast<double>(rng.between(1, 2))};
    const long long limit = static_cast<long long>(rng.between(1, 7));
    for (Step t = 0; t < inst.stepCount(); ++t)
      CHECK(countStackings(inst, params, t, limit) == naiveStackings(inst, params, t, limit));
  }
}

TEST_CASE("oracle is independent of direction and execution") {
  testing::Rng rng(11);
  for (int i = 0; i < 40; ++i) {
    const auto inst = testing::randomInstance(rng, {1, 4, 1, 4, 2, false});
    for (auto obj : {WiggleObjective::WC, WiggleObjective::LWH, WiggleObjective::QWH}) {
      const auto fwd = bruteForceOracle(inst, {}, obj, {100'000'000, Execution::Parallel, false});
      const auto bwd = bruteForceOracle(inst, {}, obj, {100'000'000, Execution::Serial, true});
      CHECK(fwd.optimum == bwd.optimum);
      const auto m = computeMetrics(inst, fwd.witness);
      const double value = obj == WiggleObjective::WC    ? static_cast<double>(m.wiggleCount)
                           : obj == WiggleObjective::LWH ? m.linearWiggleHeight
                                                         : m.quadraticWiggleHeight;
      CHECK(value == doctest::Approx(fwd.optimum));
      CHECK(isNice(inst, fwd.witness, {}).nice);
    }
  }
}

TEST_CASE("state cap") {
  const auto inst = makeInstance({{"a", "b", "c", "d"}, {"d", "c", "b", "a"}, {"a", "b", "c", "d"}});
  CHECK_THROWS_AS(bruteForceOracle(inst, {}, WiggleObjective::WC, {1000}), StateCapExceeded);
}

TEST_CASE("programs agree with the oracle") {
  testing::Rng rng(23);
  for (int i = 0; i < 60; ++i) {
    const auto inst = testing::randomInstance(rng, {1, 3, 1, 3, 2, false});
    const auto lwh = solveLp(buildLwhProgram(inst, {}).model);
    REQUIRE(lwh.status == SolveStatus::Optimal);
    CHECK(lwh.objectiveValue == doctest::Approx(bruteForceOracle(inst, {}, WiggleObjective::LWH).optimum));
    // Extreme points of the spacing polytope are integral.
    for (double v : lwh.assignment) CHECK(std::abs(v - std::round(v)) < 1e-6);
    const auto wc = solveIlp(buildWcProgram(inst, {}).model);
    REQUIRE(wc.status == SolveStatus::Optimal);
    CHECK(std::floor(wc.objectiveValue + 1e-9) == bruteForceOracle(inst, {}, WiggleObjective::WC).optimum);
    const auto qwh = solveQp(buildQwhProgram(inst, {}).model);
    REQUIRE(qwh.status == SolveStatus::Optimal);
    CHECK(qwh.objectiveValue <= bruteForceOracle(inst, {}, WiggleObjective::QWH).optimum + 1e-6);
  }
}
