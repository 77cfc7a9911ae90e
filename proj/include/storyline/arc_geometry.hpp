#pragma once

#include <stdexcept>
#include <vector>

namespace storyline {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

class GeometryError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Circular arc in mathematical orientation (y up). Angles in radians; the
/// arc runs from startAngle to endAngle, whose difference lies in (-pi, pi].
struct Arc {
  Point center;
  double radius = 0.0;
  double startAngle = 0.0;
  double endAngle = 0.0;
  bool counterClockwise = true;

  Point pointAt(double angle) const;
  Point start() const { return pointAt(startAngle); }
  Point end() const { return pointAt(endAngle); }
  /// Signed sweep endAngle - startAngle.
  double sweep() const;
  /// Unit direction of travel at `angle`, as an angle in (-pi, pi].
  double tangentAngle(double angle) const;
};

/// Two tangent arcs from p0 to p1, or a straight segment when p0.y == p1.y.
struct ArcPair {
  Point p0;
  Point p1;
  bool straight = false;
  Arc first;
  Arc second;
  Point junction;

  /// Points along the curve, `perArc` per arc (endpoints included).
  std::vector<Point> sample(std::size_t perArc) const;
};

/// Required squared width 2(r1 + r2)|dy| - dy^2.
double requiredWidthSquared(double dy, double r1, double r2);

/// Builds the arc pair between p0 and p1 (p0.x <= p1.x) with radii r1 at p0 and
/// r2 at p1; equal heights give a straight segment and ignore the radii.
/// Throws GeometryError when the width identity fails beyond `relTol` or a
/// radius is not positive.
ArcPair arcGeometry(Point p0, Point p1, double r1, double r2, double relTol = 1e-9);

/// Character curve across one gap, extended by horizontal rays on both sides.
class GapCurve {
 public:
  explicit GapCurve(ArcPair pair) : pair_(pair) {}
  const ArcPair& arcs() const noexcept { return pair_; }
  double yAt(double x) const;
  /// Unit normal at the curve point above x.
  Point normalAt(double x) const;
  /// Distance along the line p + u*n to the nearest curve point, or +inf.
  double lineDistance(Point p, Point n) const;

 private:
  ArcPair pair_;
};

/// Directed radial distance from `from` at x to `to`.
double directedRadialDistance(const GapCurve& from, const GapCurve& to, double x);
/// min of both directed distances.
double radialDistance(const GapCurve& a, const GapCurve& b, double x);

}  // namespace storyline
