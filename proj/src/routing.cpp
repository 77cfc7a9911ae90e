#include "storyline/routing.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "storyline/solver.hpp"

namespace storyline {

namespace {

struct Move {
  double y0;
  double y1;
  double dy() const { return std::abs(y1 - y0); }
  bool up() const { return y1 > y0; }
  double lo() const { return std::min(y0, y1); }
  double hi() const { return std::max(y0, y1); }
};

Move moveOf(const Coordination& coord, Step t, CharIndex c) { return {coord(t, c), coord(t + 1, c)}; }

void checkGap(const OrderedStorylineInstance& inst, Step t) {
  if (t + 1 >= inst.stepCount()) throw std::out_of_range("gap " + std::to_string(t + 1) + " out of range");
}

std::vector<CharIndex> wigglingCharacters(const OrderedStorylineInstance& inst, const Coordination& coord, Step t,
                                          double zeroTol) {
  std::vector<CharIndex> out;
  for (CharIndex c : inst.ordering(t))
    if (inst.isActive(t + 1, c) && moveOf(coord, t, c).dy() > zeroTol) out.push_back(c);
  return out;
}

double proximity(const Coordination& coord, Step t, const CharPair& p) {
  return std::min(coord(t, p.second) - coord(t, p.first), coord(t + 1, p.second) - coord(t + 1, p.first));
}

}  // namespace

std::vector<CharPair> NeighborPairSets::all() const {
  std::vector<CharPair> out;
  for (const auto* set : {&upLeft, &upRight, &downLeft, &downRight}) out.insert(out.end(), set->begin(), set->end());
  return out;
}

NeighborPairSets classifyPairs(const OrderedStorylineInstance& inst, const Coordination& coord, Step t,
                               double zeroTol) {
  checkGap(inst, t);
  checkDomain(inst, coord);
  NeighborPairSets sets;
  const auto wiggling = wigglingCharacters(inst, coord, t, zeroTol);
  for (CharIndex c : wiggling) {
    for (CharIndex h : wiggling) {
      const Move a = moveOf(coord, t, c);
      const Move b = moveOf(coord, t, h);
      if (!(a.y0 < b.y0 && a.y1 < b.y1)) continue;
      if (a.up() != b.up()) continue;
      if (a.hi() < b.lo() || b.hi() < a.lo()) continue;
      const bool widening = b.y0 - a.y0 <= b.y1 - a.y1;
      auto& set = a.up() ? (widening ? sets.upLeft : sets.upRight) : (widening ? sets.downLeft : sets.downRight);
      set.emplace_back(c, h);
    }
  }
  return sets;
}

RoutingProgram buildRoutingProgram(const OrderedStorylineInstance& inst, const Coordination& coord, Step t,
                                   double rMin, const std::vector<CharPair>& dropped, double zeroTol) {
  if (!(rMin > 0.0)) throw std::invalid_argument("rMin must be positive");
  checkGap(inst, t);
  RoutingProgram prog;
  auto& m = prog.model;
  prog.dxSquaredVar = m.addVariable("dx2", 0.0, kInf, false, 1.0);
  prog.wiggling = wigglingCharacters(inst, coord, t, zeroTol);
  std::vector<std::size_t> slot(inst.characterCount(), 0);
  double widest = 0.0;
  for (std::size_t k = 0; k < prog.wiggling.size(); ++k) {
    const CharIndex c = prog.wiggling[k];
    slot[c] = k;
    const std::string tag = std::to_string(c);
    prog.firstRadiusVar.push_back(m.addVariable("r1_" + tag, rMin, kInf));
    prog.secondRadiusVar.push_back(m.addVariable("r2_" + tag, rMin, kInf));
    const double dy = moveOf(coord, t, c).dy();
    widest = std::max(widest, dy * dy);
    m.addConstraint("r_" + tag,
                    {{prog.dxSquaredVar, 1.0}, {prog.firstRadiusVar[k], -2.0 * dy}, {prog.secondRadiusVar[k], -2.0 * dy}},
                    Relation::Equal, -dy * dy);
  }
  m.addConstraint("xm", {{prog.dxSquaredVar, 1.0}}, Relation::GreaterEqual, widest);

  const auto sets = classifyPairs(inst, coord, t, zeroTol);
  for (const auto& pair : sets.all()) {
    if (std::find(dropped.begin(), dropped.end(), pair) != dropped.end()) continue;
    const auto [c, h] = pair;
    const Move a = moveOf(coord, t, c);
    const double g0 = coord(t, h) - coord(t, c);
    const double g1 = coord(t + 1, h) - coord(t + 1, c);
    // Outer arc minus inner arc; equal to the gap for concentric arcs.
    const bool up = a.up();
    const std::size_t outer1 = prog.firstRadiusVar[slot[up ? c : h]];
    const std::size_t inner1 = prog.firstRadiusVar[slot[up ? h : c]];
    const std::size_t outer2 = prog.secondRadiusVar[slot[up ? h : c]];
    const std::size_t inner2 = prog.secondRadiusVar[slot[up ? c : h]];
    const bool widening = g0 <= g1;
    const std::string tag = std::to_string(c) + "_" + std::to_string(h);
    m.addConstraint("k1_" + tag, {{outer1, 1.0}, {inner1, -1.0}},
                    widening ? Relation::GreaterEqual : Relation::LessEqual, g0);
    m.addConstraint("k2_" + tag, {{outer2, 1.0}, {inner2, -1.0}},
                    widening ? Relation::LessEqual : Relation::GreaterEqual, g1);
  }
  return prog;
}

double GapRouting::dx() const { return std::sqrt(std::max(0.0, dxSquared)); }

const CharacterRadii* GapRouting::radiiOf(CharIndex c) const {
  for (const auto& r : radii)
    if (r.c == c) return &r;
  return nullptr;
}

GapRouting routeGap(const OrderedStorylineInstance& inst, const Coordination& coord, Step t, double rMin,
                    double zeroTol) {
  GapRouting out;
  out.t = t;
  out.pairs = classifyPairs(inst, coord, t, zeroTol);
  auto candidates = out.pairs.all();
  std::stable_sort(candidates.begin(), candidates.end(), [&](const CharPair& a, const CharPair& b) {
    return proximity(coord, t, a) < proximity(coord, t, b);
  });

  for (std::size_t drop = 0; drop <= candidates.size(); ++drop) {
    out.dropped.assign(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(drop));
    const RoutingProgram prog = buildRoutingProgram(inst, coord, t, rMin, out.dropped, zeroTol);
    const SolveResult res = solveLp(prog.model);
    if (res.status == SolveStatus::Infeasible) continue;
    if (res.status != SolveStatus::Optimal)
      throw RoutingError(t, "routing LP of gap " + std::to_string(t + 1) + " ended with " +
                                std::string(statusName(res.status)));
    out.dxSquared = std::max(0.0, res.assignment[prog.dxSquaredVar]);
    for (std::size_t k = 0; k < prog.wiggling.size(); ++k) {
      const CharIndex c = prog.wiggling[k];
      const double dy = moveOf(coord, t, c).dy();
      const double r1 = res.assignment[prog.firstRadiusVar[k]];
      // Restore the width identity exactly; the LP holds it to round-off.
      const double sum = (out.dxSquared + dy * dy) / (2.0 * dy);
      out.radii.push_back({c, r1, sum - r1});
    }
    return out;
  }
  throw RoutingError(t, "routing LP of gap " + std::to_string(t + 1) + " is infeasible without pair couplings");
}

std::vector<GapRouting> routeAllGaps(const OrderedStorylineInstance& inst, const Coordination& coord, double rMin,
                                     Execution execution, double zeroTol) {
  const std::size_t gaps = inst.stepCount() > 0 ? inst.stepCount() - 1 : 0;
  std::vector<GapRouting> out(gaps);
  std::vector<std::string> errors(gaps);
  const auto count = static_cast<std::ptrdiff_t>(gaps);
  const bool parallel = execution == Execution::Parallel;
#pragma omp parallel for schedule(dynamic) if (parallel)
  for (std::ptrdiff_t g = 0; g < count; ++g) {
    const auto t = static_cast<Step>(g);
    try {
      out[t] = routeGap(inst, coord, t, rMin, zeroTol);
    } catch (const std::exception& e) {
      errors[t] = e.what();
    }
  }
  for (Step t = 0; t < gaps; ++t)
    if (!errors[t].empty()) throw RoutingError(t, errors[t]);
  return out;
}

GapCurve gapCurve(const OrderedStorylineInstance& inst, const Coordination& coord, const GapRouting& r, CharIndex c) {
  if (!inst.isActive(r.t, c) || !inst.isActive(r.t + 1, c))
    throw std::invalid_argument("character is not active on both sides of the gap");
  const double dx = r.dx();
  const Point p0{0.0, coord(r.t, c)};
  const CharacterRadii* radii = r.radiiOf(c);
  if (radii == nullptr) return GapCurve(arcGeometry(p0, {dx, p0.y}, 1.0, 1.0));
  return GapCurve(arcGeometry(p0, {dx, coord(r.t + 1, c)}, radii->first, radii->second));
}

std::vector<double> radialProfile(const OrderedStorylineInstance& inst, const Coordination& coord,
                                  const GapRouting& r, const CharPair& pair, std::size_t samples) {
  samples = std::max<std::size_t>(samples, 2);
  const GapCurve a = gapCurve(inst, coord, r, pair.first);
  const GapCurve b = gapCurve(inst, coord, r, pair.second);
  std::vector<double> out(samples);
  const double dx = r.dx();
  for (std::size_t k = 0; k < samples; ++k)
    out[k] = radialDistance(a, b, dx * static_cast<double>(k) / static_cast<double>(samples - 1));
  return out;
}

std::vector<CharPair> nonMonotonePairs(const OrderedStorylineInstance& inst, const Coordination& coord,
                                       const GapRouting& r, std::size_t samples, double tol) {
  std::vector<CharPair> bad;
  const auto check = [&](const std::vector<CharPair>& set, bool widening) {
    for (const auto& pair : set) {
      if (std::find(r.dropped.begin(), r.dropped.end(), pair) != r.dropped.end()) continue;
      const auto rho = radialProfile(inst, coord, r, pair, samples);
      for (std::size_t k = 0; k + 1 < rho.size(); ++k) {
        const double step = widening ? rho[k + 1] - rho[k] : rho[k] - rho[k + 1];
        // inf - inf is NaN; two unbounded samples in a row are fine.
        if (std::isinf(rho[k]) && std::isinf(rho[k + 1])) continue;
        if (!(step >= -tol)) {
          bad.push_back(pair);
          break;
        }
      }
    }
  };
  check(r.pairs.upLeft, true);
  check(r.pairs.downLeft, true);
  check(r.pairs.upRight, false);
  check(r.pairs.downRight, false);
  return bad;
}

}  // namespace storyline
