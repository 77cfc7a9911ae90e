#pragma once

#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

#include "storyline/arc_geometry.hpp"
#include "storyline/execution.hpp"
#include "storyline/model.hpp"
#include "storyline/programs.hpp"

namespace storyline {

/// Pairs (lower, upper) whose radial distance must be monotone. "Left" pairs widen across
/// the gap (or keep their spacing), "right" pairs narrow.
struct NeighborPairSets {
  std::vector<CharPair> upLeft;
  std::vector<CharPair> upRight;
  std::vector<CharPair> downLeft;
  std::vector<CharPair> downRight;

  std::size_t size() const noexcept { return upLeft.size() + upRight.size() + downLeft.size() + downRight.size(); }
  std::vector<CharPair> all() const;
};

/// Pairs of characters wiggling across gap t (between steps t and t+1) that
/// keep their order, move in the same direction and have overlapping
/// vertical extents (touching counts).
NeighborPairSets classifyPairs(const OrderedStorylineInstance& inst, const Coordination& coord, Step t,
                               double zeroTol = kDefaultZeroTol);

struct RoutingProgram {
  OptimizationModel model;
  std::size_t dxSquaredVar = 0;
  /// Wiggling characters, with the variables of their two radii.
  std::vector<CharIndex> wiggling;
  std::vector<std::size_t> firstRadiusVar;
  std::vector<std::size_t> secondRadiusVar;
};

/// The per-gap LP: minimize dx^2 subject to x-monotonicity, the width identity
/// and minimum radius for every wiggling character, and the radius coupling
/// of every neighbor pair not listed in `dropped`.
RoutingProgram buildRoutingProgram(const OrderedStorylineInstance& inst, const Coordination& coord, Step t,
                                   double rMin, const std::vector<CharPair>& dropped = {},
                                   double zeroTol = kDefaultZeroTol);

struct CharacterRadii {
  CharIndex c;
  double first;
  double second;
};

struct GapRouting {
  Step t = 0;
  double dxSquared = 0.0;
  std::vector<CharacterRadii> radii;
  NeighborPairSets pairs;
  /// Pairs whose coupling was removed to make the LP feasible.
  std::vector<CharPair> dropped;

  double dx() const;
  const CharacterRadii* radiiOf(CharIndex c) const;
};

class RoutingError : public std::runtime_error {
 public:
  RoutingError(Step t, const std::string& what) : std::runtime_error(what), t_(t) {}
  Step gap() const noexcept { return t_; }

 private:
  Step t_;
};

/// Solves the LP of gap t. When it is infeasible, couplings are dropped in
/// increasing order of the pairs' vertical distance until it solves.
GapRouting routeGap(const OrderedStorylineInstance& inst, const Coordination& coord, Step t, double rMin,
                    double zeroTol = kDefaultZeroTol);

/// One routing per gap, gaps solved independently.
std::vector<GapRouting> routeAllGaps(const OrderedStorylineInstance& inst, const Coordination& coord, double rMin,
                                     Execution execution = Execution::Parallel, double zeroTol = kDefaultZeroTol);

/// Curve of character c across gap r.t in gap-local coordinates (x from 0 to dx).
GapCurve gapCurve(const OrderedStorylineInstance& inst, const Coordination& coord, const GapRouting& r, CharIndex c);

/// Radial distance of the pair sampled at `samples` evenly spaced positions
/// across the gap, endpoints included.
std::vector<double> radialProfile(const OrderedStorylineInstance& inst, const Coordination& coord,
                                  const GapRouting& r, const CharPair& pair, std::size_t samples = 100);

/// Pairs of r.pairs (not dropped) whose sampled radial distance is not
/// monotone: nondecreasing for widening pairs, nonincreasing for narrowing.
std::vector<CharPair> nonMonotonePairs(const OrderedStorylineInstance& inst, const Coordination& coord,
                                       const GapRouting& r, std::size_t samples = 100, double tol = 1e-6);

}  // namespace storyline
