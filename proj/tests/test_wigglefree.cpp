#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "storyline/oracle.hpp"
#include "storyline/wigglefree.hpp"
#include "support.hpp"

using namespace storyline;
using storyline::testing::makeInstance;

namespace {

// Largest subset of the always-active characters that the LP can hold flat.
std::size_t exhaustiveFlatSubset(const OrderedStorylineInstance& inst, const NicenessParams& params) {
  const auto chars = inst.alwaysActive();
  std::size_t best = 0;
  for (std::size_t mask = 0; mask < (std::size_t{1} << chars.size()); ++mask) {
    std::vector<CharIndex> flat;
    for (std::size_t i = 0; i < chars.size(); ++i)
      if (mask >> i & 1) flat.push_back(chars[i]);
    if (flat.size() > best && flatRealization(inst, params, flat)) best = flat.size();
  }
  return best;
}

bool isFlat(const OrderedStorylineInstance& inst, const Coordination& coord, CharIndex c) {
  for (Step t = 0; t + 1 < inst.stepCount(); ++t)
    if (std::abs(coord(t, c) - coord(t + 1, c)) > 1e-9) return false;
  return true;
}

std::size_t lcsLength(std::span<const CharIndex> a, std::span<const CharIndex> b) {
  std::vector<std::vector<std::size_t>> L(a.size() + 1, std::vector<std::size_t>(b.size() + 1, 0));
  for (std::size_t i = 1; i <= a.size(); ++i)
    for (std::size_t j = 1; j <= b.size(); ++j)
      L[i][j] = a[i - 1] == b[j - 1] ? L[i - 1][j - 1] + 1 : std::max(L[i - 1][j], L[i][j - 1]);
  return L[a.size()][b.size()];
}

}  // namespace

TEST_CASE("span tables") {
  SUBCASE("pair meeting inside a triple") {
    const auto inst = makeInstance({{"a", "b", "c"}}, {{1, {"a", "b"}}});
    const NicenessParams params{2.0, 3.0};
    const SpanTables s(inst, params);
    CHECK(s.ccons(0, 0, 2) == 1);
    CHECK(s.ccons(0, 1, 1) == 0);
    CHECK(s.miny(0, 0, 2) == 5.0);
    CHECK(s.maxy(0, 0, 2) == kInf);
    CHECK(s.miny(0, 0, 1) == 2.0);
    CHECK(s.maxy(0, 0, 1) == 2.0);
  }
  SUBCASE("rigid block") {
    const auto inst = makeInstance({{"a", "b", "c"}}, {{1, {"a", "b", "c"}}});
    const SpanTables s(inst, {2.0, 3.0});
    CHECK(s.miny(0, 0, 2) == 4.0);
    CHECK(s.maxy(0, 0, 2) == 4.0);
  }
  SUBCASE("adjacent pair without a meeting") {
    const auto inst = makeInstance({{"a", "b"}, {"a", "b"}});
    const SpanTables s(inst, {1.0, 1.5});
    for (Step t = 0; t < 2; ++t) {
      CHECK(s.miny(t, 0, 1) == 1.5);
      CHECK(s.maxy(t, 0, 1) == kInf);
    }
    CHECK(s.ordered(0, 1));
    CHECK_FALSE(s.ordered(1, 0));
  }
  SUBCASE("ccons is monotone and matches a direct count") {
    testing::Rng rng(31);
    for (int i = 0; i < 50; ++i) {
      const auto inst = testing::randomInstance(rng, {2, 6, 1, 4, 3, true});
      const SpanTables s(inst, {});
      for (Step t = 0; t < inst.stepCount(); ++t) {
        const auto order = inst.ordering(t);
        for (std::size_t j1 = 0; j1 < order.size(); ++j1) {
          std::size_t direct = 0;
          CHECK(s.ccons(t, j1, j1) == 0);
          for (std::size_t j2 = j1 + 1; j2 < order.size(); ++j2) {
            direct += inst.shareMeeting(t, order[j2 - 1], order[j2]);
            CHECK(s.ccons(t, j1, j2) == direct);
          }
        }
      }
    }
  }
  SUBCASE("only always-active characters take part") {
    const auto inst = makeInstance({{"a", "b"}, {"a", "c", "b"}});
    const SpanTables s(inst, {});
    CHECK(s.characters() == std::vector<CharIndex>{0, 1});
  }
}

TEST_CASE("pair arcs agree between serial and parallel") {
  testing::Rng rng(37);
  for (int i = 0; i < 30; ++i) {
    const auto inst = testing::randomInstance(rng, {2, 8, 1, 5, 3, true});
    const SpanTables s(inst, {1.0, 1.0});
    const auto a = pairArcs(s, Execution::Serial);
    const auto b = pairArcs(s, Execution::Parallel);
    REQUIRE(a.size() == b.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
      CHECK(a[k].lower == b[k].lower);
      CHECK(a[k].upper == b[k].upper);
      CHECK(a[k].lo == b[k].lo);
      CHECK(a[k].hi == b[k].hi);
      CHECK(a[k].lo <= a[k].hi);
    }
  }
}

TEST_CASE("largest wiggle-free set") {
  SUBCASE("identical orderings") {
    const auto inst = makeInstance({{"a", "b", "c"}, {"a", "b", "c"}, {"a", "b", "c"}});
    CHECK(maxWiggleFreeSet(inst, {}).subset.size() == 3);
  }
  SUBCASE("crossing pair") {
    const auto r = maxWiggleFreeSet(testing::crossingPair(), {});
    CHECK(r.subset.size() == 1);
    CHECK(exhaustiveFlatSubset(testing::crossingPair(), {}) == 1);
  }
  SUBCASE("one character crosses the other two") {
    const auto inst = makeInstance({{"b", "a", "c"}, {"a", "c", "b"}});
    const auto r = maxWiggleFreeSet(inst, {});
    CHECK(r.subset == std::vector<CharIndex>{1, 2});
    CHECK(r.certificate == r.subset);
  }
  SUBCASE("exhaustive subset search") {
    testing::Rng rng(41);
    for (int i = 0; i < 80; ++i) {
      const auto inst = testing::randomInstance(rng, {1, 5, 1, 3, 2, true});
      const NicenessParams params{static_cast<double>(rng.between(1, 2)), 1.0};
      const auto r = maxWiggleFreeSet(inst, params);
      CHECK(r.subset.size() == exhaustiveFlatSubset(inst, params));
      CHECK(isNice(inst, r.coordination, params).nice);
      for (CharIndex c : r.subset) CHECK(isFlat(inst, r.coordination, c));
    }
  }
  SUBCASE("characters with partial activity are never in the subset") {
    const auto inst = makeInstance({{"a", "b"}, {"a", "b", "c"}});
    const auto r = maxWiggleFreeSet(inst, {});
    CHECK(r.subset == std::vector<CharIndex>{0, 1});
  }
}

TEST_CASE("two-step wiggle count") {
  CHECK(twoStepWcMin(testing::crossingPair(), {}).count == 1);
  CHECK(twoStepWcMin(makeInstance({{"a", "b"}, {"a", "b"}}), {}).count == 0);
  const auto three = makeInstance({{"a", "b", "c"}, {"b", "c", "a"}});
  CHECK(twoStepWcMin(three, {}).count == bruteForceOracle(three, {}, WiggleObjective::WC).optimum);
  CHECK_THROWS_AS(twoStepWcMin(makeInstance({{"a"}, {"a"}, {"a"}}), {}), std::invalid_argument);

  testing::Rng rng(43);
  for (int i = 0; i < 80; ++i) {
    const auto inst = testing::randomInstance(rng, {1, 4, 2, 2, 2, false});
    const auto r = twoStepWcMin(inst, {});
    CHECK(static_cast<double>(r.count) == bruteForceOracle(inst, {}, WiggleObjective::WC).optimum);
    CHECK(isNice(inst, r.coordination, {}).nice);
    CHECK(computeMetrics(inst, r.coordination).wiggleCount == r.count);
  }
}

TEST_CASE("unrestricted wiggle count") {
  CHECK(unrestrictedWcMin(makeInstance({{"a", "b", "c"}, {"a", "b", "c"}})).count == 0);
  CHECK(unrestrictedWcMin(makeInstance({{"a", "b", "c"}, {"c", "a", "b"}})).count == 1);
  CHECK(unrestrictedWcMin(testing::crossingPair()).count == 1);

  SUBCASE("strictly below the nice optimum") {
    const auto inst = makeInstance({{"a", "b", "c"}, {"a", "x", "b", "c"}}, {{1, {"a", "b", "c"}}});
    CHECK(unrestrictedWcMin(inst).count == 0);
    CHECK(bruteForceOracle(inst, {}, WiggleObjective::WC).optimum == 1.0);
  }
  SUBCASE("lower bound and realization") {
    testing::Rng rng(47);
    for (int i = 0; i < 100; ++i) {
      const auto inst = testing::randomInstance(rng, {1, 4, 1, 4, 2, false});
      const auto r = unrestrictedWcMin(inst);
      std::size_t expected = 0;
      for (Step t = 0; t + 1 < inst.stepCount(); ++t) {
        const auto shared = inst.sharedCharacters(t);
        const auto keep = [&](CharIndex c) { return std::find(shared.begin(), shared.end(), c) != shared.end(); };
        std::vector<CharIndex> a, b;
        for (CharIndex c : inst.ordering(t)) if (keep(c)) a.push_back(c);
        for (CharIndex c : inst.ordering(t + 1)) if (keep(c)) b.push_back(c);
        expected += shared.size() - lcsLength(a, b);
      }
      CHECK(r.count == expected);
      CHECK(isValid(inst, r.coordination));
      CHECK(computeMetrics(inst, r.coordination).wiggleCount == r.count);
      for (Step t = 0; t < inst.stepCount(); ++t)
        for (CharIndex c : inst.ordering(t)) CHECK(r.coordination(t, c) == std::round(r.coordination(t, c)));
      CHECK(static_cast<double>(r.count) <= bruteForceOracle(inst, {}, WiggleObjective::WC).optimum);
    }
  }
}

TEST_CASE("longest common subsequence") {
  const std::vector<CharIndex> a{0, 1, 2, 3}, b{2, 0, 3, 1};
  const auto l = longestCommonSubsequence(a, b);
  CHECK(l.size() == lcsLength(a, b));
  CHECK(longestCommonSubsequence(a, a) == a);
  CHECK(longestCommonSubsequence(a, {}).empty());
}
