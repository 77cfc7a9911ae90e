#include <cmath>

#include "doctest.h"
#include "storyline/model.hpp"
#include "support.hpp"

using namespace storyline;
using storyline::testing::makeInstance;
using storyline::testing::Rng;

namespace {

Coordination coordOf(const OrderedStorylineInstance& inst, const std::vector<std::vector<double>>& ys) {
  Coordination coord = Coordination::forInstance(inst);
  for (CharIndex c = 0; c < ys.size(); ++c)
    for (Step t = 0; t < ys[c].size(); ++t)
      if (inst.isActive(t, c)) coord.at(t, c) = ys[c][t];
  return coord;
}

// Random valid coordination: a positive random gap between neighbors.
Coordination randomValid(const OrderedStorylineInstance& inst, Rng& rng) {
  Coordination coord = Coordination::forInstance(inst);
  for (Step t = 0; t < inst.stepCount(); ++t) {
    double y = rng.uniform(-3, 3);
    for (CharIndex c : inst.ordering(t)) {
      coord.at(t, c) = y;
      y += rng.uniform(0.1, 3);
    }
  }
  return coord;
}

}  // namespace

TEST_CASE("neighborSets") {
  SUBCASE("meeting at the bottom") {
    const auto inst = makeInstance({{"a", "b", "c"}}, {{1, {"a", "b"}}});
    const auto s = neighborSets(inst, 0);
    CHECK(s.all == std::vector<CharPair>{{0, 1}, {1, 2}});
    CHECK(s.meeting == std::vector<CharPair>{{0, 1}});
    CHECK(s.free == std::vector<CharPair>{{1, 2}});
  }
  SUBCASE("single character") {
    const auto s = neighborSets(makeInstance({{"a"}}), 0);
    CHECK(s.all.empty());
    CHECK(s.meeting.empty());
    CHECK(s.free.empty());
  }
  SUBCASE("meeting at the top") {
    const auto inst = makeInstance({{"a", "b", "c", "d"}}, {{1, {"b", "c", "d"}}});
    const auto s = neighborSets(inst, 0);
    CHECK(s.meeting == std::vector<CharPair>{{1, 2}, {2, 3}});
    CHECK(s.free == std::vector<CharPair>{{0, 1}});
  }
  SUBCASE("step out of range") { CHECK_THROWS(neighborSets(makeInstance({{"a"}}), 1)); }
  SUBCASE("partition on random instances") {
    Rng rng(11);
    for (int i = 0; i < 100; ++i) {
      const auto inst = testing::randomInstance(rng, {1, 6, 1, 4, 3, false});
      for (Step t = 0; t < inst.stepCount(); ++t) {
        const auto s = neighborSets(inst, t);
        CHECK(s.all.size() == inst.activeCount(t) - (inst.activeCount(t) > 0 ? 1 : 0));
        CHECK(s.meeting.size() + s.free.size() == s.all.size());
        for (const auto& p : s.meeting) CHECK(std::find(s.free.begin(), s.free.end(), p) == s.free.end());
      }
    }
  }
}

TEST_CASE("isNice") {
  const NicenessParams unit{1.0, 1.0};
  SUBCASE("exact meeting spacing") {
    const auto inst = makeInstance({{"a", "b"}}, {{1, {"a", "b"}}});
    CHECK(isNice(inst, coordOf(inst, {{0}, {1}}), unit).nice);
  }
  SUBCASE("free gap below deltaBar") {
    const auto inst = makeInstance({{"a", "b"}});
    const auto rep = isNice(inst, coordOf(inst, {{0}, {0.5}}), unit);
    REQUIRE_FALSE(rep.nice);
    REQUIRE(rep.violations.size() == 1);
    CHECK(rep.violations[0].kind == NicenessViolation::Kind::FreeSpacing);
    CHECK(rep.violations[0].lower == 0);
    CHECK(rep.violations[0].upper == 1);
    CHECK(describe(rep.violations[0], inst).find("a") != std::string::npos);
  }
  SUBCASE("meeting spacing too wide") {
    const auto inst = makeInstance({{"a", "b"}}, {{1, {"a", "b"}}});
    const auto rep = isNice(inst, coordOf(inst, {{0}, {1.5}}), unit);
    REQUIRE_FALSE(rep.nice);
    CHECK(rep.violations[0].kind == NicenessViolation::Kind::MeetingSpacing);
  }
  SUBCASE("order violation") {
    const auto inst = makeInstance({{"a", "b"}});
    const auto rep = isNice(inst, coordOf(inst, {{2}, {1}}), unit);
    REQUIRE_FALSE(rep.nice);
    CHECK(rep.violations[0].kind == NicenessViolation::Kind::NotIncreasing);
    CHECK_FALSE(isValid(inst, coordOf(inst, {{2}, {1}})));
  }
  SUBCASE("stacked gaps bottom-up") {
    // Gaps: meeting spacing 2 inside each meeting, at least 3 elsewhere.
    const NicenessParams p{2.0, 3.0};
    const auto inst = makeInstance({{"a", "b", "c", "d"}, {"a", "c", "b", "d"}},
                                   {{1, {"a", "b"}}, {2, {"c", "b", "d"}}});
    const auto coord = coordOf(inst, {{0, 0}, {2, 5}, {5, 3}, {9, 7}});
    CHECK(isNice(inst, coord, p).nice);
  }
  SUBCASE("tolerance") {
    const auto inst = makeInstance({{"a", "b"}}, {{1, {"a", "b"}}});
    CHECK(isNice(inst, coordOf(inst, {{0}, {1 + 1e-8}}), unit).nice);
    CHECK_FALSE(isNice(inst, coordOf(inst, {{0}, {1 + 1e-8}}), unit, 1e-10).nice);
  }
  SUBCASE("domain mismatch") {
    const auto inst = makeInstance({{"a", "b"}});
    CHECK_THROWS_AS(isNice(inst, Coordination(1, 1), unit), DomainError);
    Coordination coord = coordOf(inst, {{0}, {1}});
    coord.at(0, 1) = std::nan("");
    CHECK_THROWS_AS(computeMetrics(inst, coord), DomainError);
  }
}

TEST_CASE("computeMetrics") {
  SUBCASE("single move") {
    const auto inst = makeInstance({{"a"}, {"a"}});
    const auto m = computeMetrics(inst, coordOf(inst, {{0, 3}}));
    CHECK(m.wiggleCount == 1);
    CHECK(m.linearWiggleHeight == 3.0);
    CHECK(m.quadraticWiggleHeight == 9.0);
    CHECK(m.totalHeight == 3.0);
  }
  SUBCASE("constant characters") {
    const auto inst = makeInstance({{"a", "b"}, {"a", "b"}, {"a", "b"}});
    const auto m = computeMetrics(inst, coordOf(inst, {{0, 0, 0}, {4, 4, 4}}));
    CHECK(m.wiggleCount == 0);
    CHECK(m.linearWiggleHeight == 0.0);
    CHECK(m.quadraticWiggleHeight == 0.0);
    CHECK(m.totalHeight == 4.0);
  }
  SUBCASE("crossing pair") {
    const auto inst = testing::crossingPair();
    const auto m = computeMetrics(inst, coordOf(inst, {{0, 1}, {1, 0}}));
    CHECK(m.wiggleCount == 2);
    CHECK(m.linearWiggleHeight == 2.0);
    CHECK(m.quadraticWiggleHeight == 2.0);
  }
  SUBCASE("only characters active on both sides count") {
    const auto inst = makeInstance({{"a", "b"}, {"a"}});
    const auto m = computeMetrics(inst, coordOf(inst, {{0, 5}, {1, 0}}));
    CHECK(m.wiggleCount == 1);
    CHECK(m.linearWiggleHeight == 5.0);
  }
  SUBCASE("empty instance") {
    const auto inst = makeInstance({});
    const auto m = computeMetrics(inst, Coordination::forInstance(inst));
    CHECK(m.wiggleCount == 0);
    CHECK(m.totalHeight == 0.0);
  }
  SUBCASE("bounds, shifts and scaling on random coordinations") {
    Rng rng(5);
    for (int i = 0; i < 200; ++i) {
      const auto inst = testing::randomInstance(rng, {1, 5, 2, 5, 0, false});
      const Coordination coord = randomValid(inst, rng);
      const auto m = computeMetrics(inst, coord);
      double widest = 0.0;
      for (Step t = 0; t + 1 < inst.stepCount(); ++t)
        for (CharIndex c : inst.sharedCharacters(t)) widest = std::max(widest, std::abs(coord(t, c) - coord(t + 1, c)));
      CHECK(m.quadraticWiggleHeight <= widest * m.linearWiggleHeight + 1e-9);
      CHECK(m.linearWiggleHeight <= widest * static_cast<double>(m.wiggleCount) + 1e-9);
      CHECK((m.wiggleCount == 0) == (m.linearWiggleHeight == 0.0));
      CHECK((m.quadraticWiggleHeight == 0.0) == (m.linearWiggleHeight == 0.0));

      const double shift = rng.uniform(-10, 10);
      const double s = rng.uniform(0.1, 5);
      Coordination shifted = coord, scaled = coord;
      for (Step t = 0; t < inst.stepCount(); ++t)
        for (CharIndex c : inst.ordering(t)) {
          shifted.at(t, c) += shift;
          scaled.at(t, c) *= s;
        }
      const auto ms = computeMetrics(inst, shifted);
      CHECK(ms.wiggleCount == m.wiggleCount);
      CHECK(ms.linearWiggleHeight == doctest::Approx(m.linearWiggleHeight));
      CHECK(ms.quadraticWiggleHeight == doctest::Approx(m.quadraticWiggleHeight));
      CHECK(ms.totalHeight == doctest::Approx(m.totalHeight));
      const auto mk = computeMetrics(inst, scaled, kDefaultZeroTol * s);
      CHECK(mk.wiggleCount == m.wiggleCount);
      CHECK(mk.linearWiggleHeight == doctest::Approx(s * m.linearWiggleHeight));
      CHECK(mk.quadraticWiggleHeight == doctest::Approx(s * s * m.quadraticWiggleHeight));
      CHECK(mk.totalHeight == doctest::Approx(s * m.totalHeight));
    }
  }
  SUBCASE("zero tolerance") {
    const auto inst = makeInstance({{"a"}, {"a"}});
    CHECK(computeMetrics(inst, coordOf(inst, {{0, 1e-12}})).wiggleCount == 0);
    CHECK(computeMetrics(inst, coordOf(inst, {{0, 1e-6}})).wiggleCount == 1);
  }
}

TEST_CASE("instance validation") {
  SUBCASE("meeting not consecutive") {
    CHECK_THROWS_WITH_AS(makeInstance({{"a", "b", "c"}}, {{1, {"a", "c"}}}),
                         doctest::Contains("meeting not consecutive"), InstanceError);
  }
  SUBCASE("member inactive") {
    StorylineInstance base;
    base.steps = 2;
    base.characters = {{"a", {0, 1}, {}}, {"b", {0, 0}, {}}};
    base.meetings = {{1, {0, 1}}};
    CHECK_THROWS_WITH_AS(OrderedStorylineInstance(base, {{0, 1}, {0}}), doctest::Contains("member b inactive"),
                         InstanceError);
  }
  SUBCASE("overlapping meetings") {
    CHECK_THROWS_AS(makeInstance({{"a", "b", "c"}}, {{1, {"a", "b"}}, {1, {"b", "c"}}}), InstanceError);
  }
  SUBCASE("missing active character") {
    StorylineInstance base;
    base.steps = 1;
    base.characters = {{"a", {0, 0}, {}}, {"b", {0, 0}, {}}};
    CHECK_THROWS_WITH_AS(OrderedStorylineInstance(base, {{0}}), doctest::Contains("active character b missing"),
                         InstanceError);
  }
  SUBCASE("duplicate id") {
    StorylineInstance base;
    base.steps = 1;
    base.characters = {{"a", {0, 0}, {}}, {"a", {0, 0}, {}}};
    CHECK_THROWS_WITH_AS(OrderedStorylineInstance(base, {{0, 1}}), doctest::Contains("duplicate id"), InstanceError);
  }
  SUBCASE("niceness parameters must be positive") {
    CHECK_THROWS_AS((NicenessParams{0.0, 1.0}).validate(), std::invalid_argument);
    CHECK_THROWS_AS((NicenessParams{1.0, -1.0}).validate(), std::invalid_argument);
    CHECK_NOTHROW((NicenessParams{0.5, 2.0}).validate());
  }
}

TEST_CASE("instance queries") {
  const auto inst = makeInstance({{"a", "b", "c"}, {"c", "b"}}, {{1, {"b", "c"}}});
  CHECK(inst.findCharacter("c") == CharIndex{2});
  CHECK_FALSE(inst.findCharacter("zz").has_value());
  CHECK(inst.position(1, 2) == 0);
  CHECK(inst.shareMeeting(0, 1, 2));
  CHECK_FALSE(inst.shareMeeting(0, 0, 1));
  CHECK(inst.sharedCharacters(0) == std::vector<CharIndex>{1, 2});
  CHECK(inst.alwaysActive() == std::vector<CharIndex>{1, 2});
  CHECK(inst.activePairCount() == 5);
}
