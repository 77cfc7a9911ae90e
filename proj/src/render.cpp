#include "storyline/render.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace storyline {

namespace {

std::string escapeXml(std::string_view s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += ch;
    }
  }
  return out;
}

std::string pt(Point p) { return formatNumber(p.x) + " " + formatNumber(p.y); }

double labelSpace(const OrderedStorylineInstance& inst, const RenderStyle& style, bool wanted) {
  if (!wanted) return 0.0;
  std::size_t longest = 0;
  for (CharIndex c = 0; c < inst.characterCount(); ++c) longest = std::max(longest, inst.character(c).id.size());
  return longest == 0 ? 0.0 : 0.6 * style.fontSize * static_cast<double>(longest) + 6.0;
}

std::string colorOf(const OrderedStorylineInstance& inst, const RenderStyle& style, CharIndex c,
                    const std::vector<std::string>& groups) {
  const auto& ch = inst.character(c);
  if (auto it = style.characterColors.find(ch.id); it != style.characterColors.end()) return it->second;
  if (!ch.group.empty()) {
    if (auto it = style.groupColors.find(ch.group); it != style.groupColors.end()) return it->second;
    const auto pos = std::find(groups.begin(), groups.end(), ch.group) - groups.begin();
    return style.palette[static_cast<std::size_t>(pos) % style.palette.size()];
  }
  return style.palette[c % style.palette.size()];
}

}  // namespace

std::string formatNumber(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  std::string s(buf);
  if (s == "-0.000") s = "0.000";
  return s;
}

void RenderStyle::validate() const {
  if (!(unitScale > 0.0)) throw std::invalid_argument("unitScale must be positive");
  if (!(gapPadding >= 0.0) || !(minGapWidth >= 0.0)) throw std::invalid_argument("gap widths must be nonnegative");
  if (!(gapPadding + minGapWidth > 0.0)) throw std::invalid_argument("gapPadding + minGapWidth must be positive");
  if (!(strokeWidth > 0.0) || !(meetingBarWidth >= 0.0) || !(margin >= 0.0) || !(fontSize > 0.0))
    throw std::invalid_argument("invalid stroke, bar, margin or font size");
  if (palette.empty()) throw std::invalid_argument("palette is empty");
}

std::vector<double> computeXPositions(const OrderedStorylineInstance& inst, const std::vector<GapRouting>& routings,
                                      const RenderStyle& style) {
  style.validate();
  const std::size_t steps = inst.stepCount();
  if (routings.size() + 1 != std::max<std::size_t>(steps, 1))
    throw std::invalid_argument("need one routing per gap");
  std::vector<double> xs(steps, 0.0);
  for (Step t = 0; t + 1 < steps; ++t)
    xs[t + 1] = xs[t] + std::max(routings[t].dx() * style.unitScale, style.minGapWidth) + style.gapPadding;
  return xs;
}

Point toScreen(const Scene& scene, const RenderStyle& style, double xPixels, double y) {
  return {scene.originX + xPixels, style.margin + (scene.maxY - y) * style.unitScale};
}

Scene buildScene(const OrderedStorylineInstance& inst, const Coordination& coord,
                 const std::vector<GapRouting>& routings, const RenderStyle& style) {
  checkDomain(inst, coord);
  Scene scene;
  scene.xs = computeXPositions(inst, routings, style);
  const bool startLabels = style.labels == LabelPlacement::Start || style.labels == LabelPlacement::Both;
  const bool endLabels = style.labels == LabelPlacement::End || style.labels == LabelPlacement::Both;
  const double left = labelSpace(inst, style, startLabels);
  const double right = labelSpace(inst, style, endLabels);

  double minY = 0.0;
  bool any = false;
  for (Step t = 0; t < inst.stepCount(); ++t) {
    for (CharIndex c : inst.ordering(t)) {
      minY = any ? std::min(minY, coord(t, c)) : coord(t, c);
      scene.maxY = any ? std::max(scene.maxY, coord(t, c)) : coord(t, c);
      any = true;
    }
  }
  scene.originX = style.margin + left;
  const double span = scene.xs.empty() ? 0.0 : scene.xs.back();
  scene.width = scene.originX + span + right + style.margin;
  scene.height = 2.0 * style.margin + (scene.maxY - minY) * style.unitScale;

  for (const auto& m : inst.meetings()) {
    double lo = coord(m.step, m.members.front());
    double hi = lo;
    for (CharIndex c : m.members) {
      lo = std::min(lo, coord(m.step, c));
      hi = std::max(hi, coord(m.step, c));
    }
    const Point top = toScreen(scene, style, scene.xs[m.step], hi);
    const Point bottom = toScreen(scene, style, scene.xs[m.step], lo);
    scene.bars.push_back({m.step, top.x, top.y, bottom.y});
  }
  std::stable_sort(scene.bars.begin(), scene.bars.end(),
                   [](const SceneBar& a, const SceneBar& b) { return a.t < b.t; });

  std::vector<std::string> groups;
  for (CharIndex c = 0; c < inst.characterCount(); ++c) {
    const auto& g = inst.character(c).group;
    if (!g.empty() && std::find(groups.begin(), groups.end(), g) == groups.end()) groups.push_back(g);
  }

  for (CharIndex c = 0; c < inst.characterCount(); ++c) {
    const auto& act = inst.character(c).activity;
    SceneCurve curve;
    curve.c = c;
    curve.color = colorOf(inst, style, c, groups);
    std::ostringstream d;
    Point cur = toScreen(scene, style, scene.xs[act.first], coord(act.first, c));
    curve.anchors.push_back(cur);
    d << "M " << pt(cur);
    if (act.first == act.last) d << " L " << pt(cur);
    for (Step t = act.first; t < act.last; ++t) {
      const Point next = toScreen(scene, style, scene.xs[t + 1], coord(t + 1, c));
      const double dy = coord(t + 1, c) - coord(t, c);
      if (std::abs(dy) <= style.zeroTol) {
        d << " L " << pt(next);
      } else {
        const GapRouting& r = routings[t];
        if (r.radiiOf(c) == nullptr)
          throw std::invalid_argument("character " + inst.character(c).id + " wiggles in gap " + std::to_string(t + 1) +
                                      " without radii");
        const GapCurve local = gapCurve(inst, coord, r, c);
        const ArcPair& ap = local.arcs();
        const double w = r.dx() * style.unitScale;
        const double offset = scene.xs[t] + (scene.xs[t + 1] - scene.xs[t] - w) / 2.0;
        const auto screen = [&](Point p) { return toScreen(scene, style, offset + p.x * style.unitScale, p.y); };
        const Point a0 = screen(ap.p0);
        if (a0.x > cur.x) d << " L " << pt(a0);
        for (const Arc* arc : {&ap.first, &ap.second}) {
          const Point from = screen(arc == &ap.first ? ap.p0 : ap.junction);
          const Point to = screen(arc == &ap.first ? ap.junction : ap.p1);
          const double radius = arc->radius * style.unitScale;
          // The y flip turns mathematical counterclockwise into sweep flag 0.
          const bool sweep = !arc->counterClockwise;
          d << " A " << formatNumber(radius) << " " << formatNumber(radius) << " 0 0 " << (sweep ? 1 : 0) << " "
            << pt(to);
          curve.arcs.push_back({screen(arc->center), radius, sweep, from, to});
        }
        const Point a1 = screen(ap.p1);
        if (next.x > a1.x) d << " L " << pt(next);
      }
      cur = next;
      curve.anchors.push_back(cur);
    }
    curve.path = d.str();
    scene.curves.push_back(std::move(curve));

    const std::string id = escapeXml(inst.character(c).id);
    const double baseline = style.fontSize * 0.35;
    if (startLabels) {
      const Point p = scene.curves.back().anchors.front();
      scene.labels.push_back("<text x=\"" + formatNumber(p.x - 6.0) + "\" y=\"" + formatNumber(p.y + baseline) +
                             "\" text-anchor=\"end\">" + id + "</text>");
    }
    if (endLabels) {
      const Point p = scene.curves.back().anchors.back();
      scene.labels.push_back("<text x=\"" + formatNumber(p.x + 6.0) + "\" y=\"" + formatNumber(p.y + baseline) +
                             "\" text-anchor=\"start\">" + id + "</text>");
    }
  }
  return scene;
}

std::string renderSvg(const Scene& scene, const RenderStyle& style) {
  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << formatNumber(scene.width)
      << "\" height=\"" << formatNumber(scene.height) << "\" viewBox=\"0 0 " << formatNumber(scene.width) << " "
      << formatNumber(scene.height) << "\">\n";
  out << "  <g class=\"meetings\" stroke=\"#bbbbbb\" stroke-width=\"" << formatNumber(style.meetingBarWidth)
      << "\" stroke-linecap=\"round\">\n";
  for (const auto& b : scene.bars)
    out << "    <line x1=\"" << formatNumber(b.x) << "\" y1=\"" << formatNumber(b.top) << "\" x2=\""
        << formatNumber(b.x) << "\" y2=\"" << formatNumber(b.bottom) << "\"/>\n";
  out << "  </g>\n";
  out << "  <g class=\"characters\" fill=\"none\" stroke-width=\"" << formatNumber(style.strokeWidth)
      << "\" stroke-linecap=\"round\">\n";
  for (const auto& c : scene.curves)
    out << "    <path stroke=\"" << escapeXml(c.color) << "\" d=\"" << c.path << "\"/>\n";
  out << "  </g>\n";
  if (!scene.labels.empty()) {
    out << "  <g class=\"labels\" font-family=\"sans-serif\" font-size=\"" << formatNumber(style.fontSize)
        << "\">\n";
    for (const auto& l : scene.labels) out << "    " << l << "\n";
    out << "  </g>\n";
  }
  out << "</svg>\n";
  return out.str();
}

std::string renderSvg(const OrderedStorylineInstance& inst, const Coordination& coord,
                      const std::vector<GapRouting>& routings, const RenderStyle& style) {
  return renderSvg(buildScene(inst, coord, routings, style), style);
}

std::string renderSidecar(const OrderedStorylineInstance& inst, const Scene& scene) {
  using nlohmann::ordered_json;
  const auto point = [](Point p) { return ordered_json::array({std::stod(formatNumber(p.x)), std::stod(formatNumber(p.y))}); };
  ordered_json doc;
  doc["width"] = std::stod(formatNumber(scene.width));
  doc["height"] = std::stod(formatNumber(scene.height));
  ordered_json xs = ordered_json::array();
  for (double x : scene.xs) xs.push_back(std::stod(formatNumber(scene.originX + x)));
  doc["stepX"] = xs;
  ordered_json curves = ordered_json::array();
  for (const auto& c : scene.curves) {
    ordered_json e;
    e["id"] = inst.character(c.c).id;
    e["color"] = c.color;
    e["firstStep"] = inst.character(c.c).activity.first + 1;
    ordered_json anchors = ordered_json::array();
    for (const auto& p : c.anchors) anchors.push_back(point(p));
    e["anchors"] = anchors;
    ordered_json arcs = ordered_json::array();
    for (const auto& a : c.arcs)
      arcs.push_back({{"center", point(a.center)},
                      {"radius", std::stod(formatNumber(a.radius))},
                      {"sweep", a.sweep ? 1 : 0},
                      {"from", point(a.from)},
                      {"to", point(a.to)}});
    e["arcs"] = arcs;
    e["d"] = c.path;
    curves.push_back(e);
  }
  doc["characters"] = curves;
  ordered_json bars = ordered_json::array();
  for (const auto& b : scene.bars)
    bars.push_back({{"t", b.t + 1}, {"x", std::stod(formatNumber(b.x))},
                    {"top", std::stod(formatNumber(b.top))}, {"bottom", std::stod(formatNumber(b.bottom))}});
  doc["meetings"] = bars;
  return doc.dump(2) + "\n";
}

}  // namespace storyline
