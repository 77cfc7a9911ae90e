#pragma once

#include <map>
#include <string>
#include <vector>

#include "storyline/model.hpp"
#include "storyline/routing.hpp"

namespace storyline {

enum class LabelPlacement { Start, End, Both, None };

struct RenderStyle {
  double unitScale = 40.0;  // pixels per y unit
  double gapPadding = 20.0;
  double minGapWidth = 40.0;
  double strokeWidth = 3.0;
  double meetingBarWidth = 8.0;
  double margin = 20.0;
  double fontSize = 12.0;
  LabelPlacement labels = LabelPlacement::Start;
  std::vector<std::string> palette = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                      "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
  /// Overrides by group name, then by character id.
  std::map<std::string, std::string> groupColors;
  std::map<std::string, std::string> characterColors;
  double zeroTol = kDefaultZeroTol;

  /// Throws std::invalid_argument on nonpositive scale, negative padding,
  /// x positions that could coincide, or an empty palette.
  void validate() const;
};

/// x of every time step: x_1 = 0, x_{t+1} = x_t + max(dx_t * unitScale, minGapWidth) + gapPadding.
std::vector<double> computeXPositions(const OrderedStorylineInstance& inst, const std::vector<GapRouting>& routings,
                                      const RenderStyle& style);

struct SceneArc {
  Point center;  // screen coordinates
  double radius;
  bool sweep;    // SVG sweep flag
  Point from;
  Point to;
};

struct SceneCurve {
  CharIndex c;
  std::string color;
  std::string path;           // SVG path data
  std::vector<Point> anchors; // screen point per active step
  std::vector<SceneArc> arcs;
};

struct SceneBar {
  Step t;
  double x;
  double top;
  double bottom;
};

struct Scene {
  double width = 0.0;
  double height = 0.0;
  double originX = 0.0;  // screen x of x_1
  double maxY = 0.0;     // coordination value drawn at the top margin
  std::vector<double> xs;
  std::vector<SceneCurve> curves;
  std::vector<SceneBar> bars;
  std::vector<std::string> labels;  // SVG text elements
};

/// Lays out the drawing. Throws std::invalid_argument when a character wiggles
/// across a gap whose routing has no radii for it.
Scene buildScene(const OrderedStorylineInstance& inst, const Coordination& coord,
                 const std::vector<GapRouting>& routings, const RenderStyle& style);

/// Screen point of abstract (x offset in pixels, y) under `scene`.
Point toScreen(const Scene& scene, const RenderStyle& style, double xPixels, double y);

std::string renderSvg(const Scene& scene, const RenderStyle& style);
std::string renderSvg(const OrderedStorylineInstance& inst, const Coordination& coord,
                      const std::vector<GapRouting>& routings, const RenderStyle& style = {});

/// JSON document with the geometry of every element.
std::string renderSidecar(const OrderedStorylineInstance& inst, const Scene& scene);

/// Fixed three-decimal formatting without negative zero.
std::string formatNumber(double v);

}  // namespace storyline
