#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "storyline/programs.hpp"
#include "storyline/render.hpp"
#include "storyline/routing.hpp"
#include "storyline/solver.hpp"
#include "support.hpp"

using namespace storyline;
using storyline::testing::makeInstance;

namespace {

GapRouting flatGap(Step t, double dxSquared) {
  GapRouting g;
  g.t = t;
  g.dxSquared = dxSquared;
  return g;
}

std::size_t count(const std::string& s, std::string_view needle) {
  std::size_t n = 0;
  for (auto p = s.find(needle); p != std::string::npos; p = s.find(needle, p + 1)) ++n;
  return n;
}

Coordination crossingCoordination(const OrderedStorylineInstance& inst) {
  auto coord = Coordination::forInstance(inst);
  coord.at(0, 0) = 0;
  coord.at(0, 1) = 1;
  coord.at(1, 0) = 1;
  coord.at(1, 1) = 0;
  return coord;
}

std::string readFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

TEST_CASE("x positions") {
  const auto three = makeInstance({{"a"}, {"a"}, {"a"}});
  SUBCASE("zero widths with padding") {
    RenderStyle style;
    style.minGapWidth = 0;
    style.gapPadding = 10;
    CHECK(computeXPositions(three, {flatGap(0, 0), flatGap(1, 0)}, style) == std::vector<double>{0, 10, 20});
  }
  SUBCASE("minimum gap width") {
    RenderStyle style;
    style.unitScale = 1;
    style.minGapWidth = 1;
    style.gapPadding = 0;
    CHECK(computeXPositions(three, {flatGap(0, 9), flatGap(1, 0)}, style) == std::vector<double>{0, 3, 4});
  }
  SUBCASE("routings must cover every gap") {
    CHECK_THROWS_AS(computeXPositions(three, {flatGap(0, 0)}, RenderStyle{}), std::invalid_argument);
  }
  SUBCASE("crossing pair end to end") {
    const auto inst = testing::crossingPair();
    const auto r = routeAllGaps(inst, crossingCoordination(inst), 0.5);
    const auto xs = computeXPositions(inst, r, RenderStyle{});
    REQUIRE(xs.size() == 2);
    CHECK(xs[1] > xs[0]);
  }
}

TEST_CASE("style validation") {
  RenderStyle s;
  CHECK_NOTHROW(s.validate());
  s.unitScale = 0;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s = {};
  s.gapPadding = -1;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s = {};
  s.palette.clear();
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
}

TEST_CASE("svg documents") {
  SUBCASE("empty instance") {
    const auto inst = makeInstance({});
    const auto svg = renderSvg(inst, Coordination::forInstance(inst), {});
    CHECK(svg.rfind("<?xml", 0) == 0);
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.find("</svg>") != std::string::npos);
    CHECK(count(svg, "<path") == 0);
  }
  SUBCASE("single flat character") {
    const auto inst = makeInstance({{"a"}, {"a"}});
    auto coord = Coordination::forInstance(inst);
    const auto svg = renderSvg(inst, coord, routeAllGaps(inst, coord, 0.5));
    CHECK(count(svg, "<path") == 1);
    CHECK(count(svg, " A ") == 0);
  }
  SUBCASE("crossing pair") {
    const auto inst = testing::crossingPair();
    const auto coord = crossingCoordination(inst);
    const auto routings = routeAllGaps(inst, coord, 0.5);
    const auto scene = buildScene(inst, coord, routings, RenderStyle{});
    REQUIRE(scene.curves.size() == 2);
    for (const auto& c : scene.curves) CHECK(c.arcs.size() == 2);
    const auto svg = renderSvg(scene, RenderStyle{});
    CHECK(svg == renderSvg(inst, coord, routings));
    const std::string golden = std::string(STORYLINE_GOLDEN_DIR) + "/crossing_pair.svg";
    if (std::getenv("STORYLINE_UPDATE_GOLDEN")) std::ofstream(golden, std::ios::binary) << svg;
    CHECK(svg == readFile(golden));
  }
  SUBCASE("wiggle without radii is rejected") {
    const auto inst = testing::crossingPair();
    CHECK_THROWS_AS(renderSvg(inst, crossingCoordination(inst), {flatGap(0, 4)}), std::invalid_argument);
  }
}

TEST_CASE("scene geometry") {
  testing::Rng rng(53);
  for (int i = 0; i < 40; ++i) {
    const auto inst = testing::randomInstance(rng, {1, 5, 1, 4, 2, false});
    const NicenessParams params{static_cast<double>(rng.between(1, 3)), 1.0};
    const auto p = buildLwhProgram(inst, params);
    const auto coord = extractCoordination(inst, p.index, solveLp(p.model).assignment, params);
    const auto routings = routeAllGaps(inst, coord, params.delta / 2);
    RenderStyle style;
    const auto scene = buildScene(inst, coord, routings, style);
    for (const auto& curve : scene.curves) {
      std::size_t k = 0;
      for (Step t = 0; t < inst.stepCount(); ++t) {
        if (!inst.character(curve.c).activity.contains(t)) continue;
        REQUIRE(k < curve.anchors.size());
        const Point expect = toScreen(scene, style, scene.xs[t], coord(t, curve.c));
        CHECK(std::abs(curve.anchors[k].x - expect.x) < 1e-3);
        CHECK(std::abs(curve.anchors[k].y - expect.y) < 1e-3);
        ++k;
      }
      CHECK(k == curve.anchors.size());
    }
    std::size_t bars = 0;
    for (const auto& m : inst.meetings()) {
      const auto it = std::find_if(scene.bars.begin(), scene.bars.end(), [&](const SceneBar& b) { return b.t == m.step; });
      REQUIRE(it != scene.bars.end());
      ++bars;
      const double extent = static_cast<double>(m.members.size() - 1) * params.delta * style.unitScale;
      CHECK(std::any_of(scene.bars.begin(), scene.bars.end(), [&](const SceneBar& b) {
        return b.t == m.step && std::abs((b.bottom - b.top) - extent) < 1e-3;
      }));
    }
    CHECK(scene.bars.size() == bars);
    CHECK(renderSvg(inst, coord, routings, style) == renderSvg(inst, coord, routings, style));
    const auto side = nlohmann::json::parse(renderSidecar(inst, scene));
    CHECK(side.is_object());
  }
}

TEST_CASE("number formatting") {
  CHECK(formatNumber(1.0) == "1.000");
  CHECK(formatNumber(-0.0001) == "0.000");
  CHECK(formatNumber(2.34567) == "2.346");
  CHECK(formatNumber(-1.5) == "-1.500");
}
