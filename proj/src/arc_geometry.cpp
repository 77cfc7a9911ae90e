#include "storyline/arc_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace storyline {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kEps = 1e-12;

double normalizeAngle(double a) {
  a = std::remainder(a, 2.0 * kPi);
  if (a <= -kPi) a += 2.0 * kPi;
  return a;
}

Point add(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
Point sub(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
Point scale(Point a, double s) { return {a.x * s, a.y * s}; }
double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }

}  // namespace

Point Arc::pointAt(double angle) const {
  return {center.x + radius * std::cos(angle), center.y + radius * std::sin(angle)};
}

double Arc::sweep() const { return normalizeAngle(endAngle - startAngle); }

double Arc::tangentAngle(double angle) const {
  return normalizeAngle(angle + (counterClockwise ? kPi / 2.0 : -kPi / 2.0));
}

std::vector<Point> ArcPair::sample(std::size_t perArc) const {
  perArc = std::max<std::size_t>(perArc, 2);
  std::vector<Point> out;
  if (straight) {
    for (std::size_t i = 0; i < perArc; ++i) {
      const double u = static_cast<double>(i) / static_cast<double>(perArc - 1);
      out.push_back({p0.x + u * (p1.x - p0.x), p0.y + u * (p1.y - p0.y)});
    }
    return out;
  }
  for (const Arc* arc : {&first, &second}) {
    const double sw = arc->sweep();
    for (std::size_t i = 0; i < perArc; ++i) {
      const double u = static_cast<double>(i) / static_cast<double>(perArc - 1);
      out.push_back(arc->pointAt(arc->startAngle + u * sw));
    }
  }
  out.front() = p0;
  out.back() = p1;
  return out;
}

double requiredWidthSquared(double dy, double r1, double r2) {
  const double h = std::abs(dy);
  return 2.0 * (r1 + r2) * h - h * h;
}

ArcPair arcGeometry(Point p0, Point p1, double r1, double r2, double relTol) {
  ArcPair pair;
  pair.p0 = p0;
  pair.p1 = p1;
  const double dx = p1.x - p0.x;
  const double dy = p1.y - p0.y;
  if (dx < 0.0) throw GeometryError("arc pair must run left to right");
  if (dy == 0.0) {
    pair.straight = true;
    pair.junction = {p0.x + dx / 2.0, p0.y};
    return pair;
  }
  if (!(r1 > 0.0) || !(r2 > 0.0)) throw GeometryError("arc radii must be positive");
  const double need = requiredWidthSquared(dy, r1, r2);
  if (std::abs(dx * dx - need) > relTol * std::max({1.0, dx * dx, need}))
    throw GeometryError("width does not match 2(r1 + r2)|dy| - dy^2");

  const double s = dy > 0.0 ? 1.0 : -1.0;
  const Point o1{p0.x, p0.y + s * r1};
  const Point o2{p1.x, p1.y - s * r2};
  // Externally tangent circles touch on the segment between the centers.
  const Point j = add(o1, scale(sub(o2, o1), r1 / (r1 + r2)));
  pair.junction = j;
  pair.first = Arc{o1, r1, -s * kPi / 2.0, std::atan2(j.y - o1.y, j.x - o1.x), s > 0.0};
  pair.second = Arc{o2, r2, std::atan2(j.y - o2.y, j.x - o2.x), s * kPi / 2.0, s < 0.0};
  return pair;
}

double GapCurve::yAt(double x) const {
  const auto& p = pair_;
  if (p.straight || x <= p.p0.x) return p.p0.y;
  if (x >= p.p1.x) return p.p1.y;
  const double s = p.p1.y > p.p0.y ? 1.0 : -1.0;
  if (x <= p.junction.x) {
    const double u = x - p.first.center.x;
    return p.first.center.y - s * std::sqrt(std::max(0.0, p.first.radius * p.first.radius - u * u));
  }
  const double u = x - p.second.center.x;
  return p.second.center.y + s * std::sqrt(std::max(0.0, p.second.radius * p.second.radius - u * u));
}

Point GapCurve::normalAt(double x) const {
  const auto& p = pair_;
  if (p.straight || x <= p.p0.x || x >= p.p1.x) return {0.0, 1.0};
  const Point at{x, yAt(x)};
  const Arc& arc = x <= p.junction.x ? p.first : p.second;
  return scale(sub(arc.center, at), 1.0 / arc.radius);
}

double GapCurve::lineDistance(Point p, Point n) const {
  const auto& c = pair_;
  double best = std::numeric_limits<double>::infinity();
  const double tol = kEps * std::max({1.0, std::abs(c.p0.x), std::abs(c.p1.x)});

  const auto ray = [&](double y, double xlo, double xhi) {
    if (std::abs(n.y) <= kEps) return;
    const double u = (y - p.y) / n.y;
    const double x = p.x + u * n.x;
    if (x >= xlo - tol && x <= xhi + tol) best = std::min(best, std::abs(u));
  };
  constexpr double inf = std::numeric_limits<double>::infinity();
  if (c.straight) {
    ray(c.p0.y, -inf, inf);
    return best;
  }
  ray(c.p0.y, -inf, c.p0.x);
  ray(c.p1.y, c.p1.x, inf);

  const double s = c.p1.y > c.p0.y ? 1.0 : -1.0;
  // First arc lies on the -s side of its center, second arc on the +s side.
  const auto circle = [&](const Arc& arc, double xlo, double xhi, double side) {
    const Point q = sub(p, arc.center);
    const double b = dot(n, q);
    const double disc = b * b - (dot(q, q) - arc.radius * arc.radius);
    if (disc < 0.0) return;
    const double root = std::sqrt(disc);
    for (double u : {-b - root, -b + root}) {
      const Point at = add(p, scale(n, u));
      if (at.x < xlo - tol || at.x > xhi + tol) continue;
      if (side * (at.y - arc.center.y) < -tol * arc.radius) continue;
      best = std::min(best, std::abs(u));
    }
  };
  circle(c.first, c.p0.x, c.junction.x, -s);
  circle(c.second, c.junction.x, c.p1.x, s);
  return best;
}

double directedRadialDistance(const GapCurve& from, const GapCurve& to, double x) {
  return to.lineDistance({x, from.yAt(x)}, from.normalAt(x));
}

double radialDistance(const GapCurve& a, const GapCurve& b, double x) {
  return std::min(directedRadialDistance(a, b, x), directedRadialDistance(b, a, x));
}

}  // namespace storyline
