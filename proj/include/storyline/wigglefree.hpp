#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "storyline/execution.hpp"
#include "storyline/model.hpp"
#include "storyline/programs.hpp"

namespace storyline {

/// Longest common subsequence of two sequences. Returns the matched elements in
/// order; ties prefer skipping in `b` first, which makes the choice unique.
std::vector<CharIndex> longestCommonSubsequence(std::span<const CharIndex> a, std::span<const CharIndex> b);

/// Per-step span bounds between characters that are active at every step.
class SpanTables {
 public:
  SpanTables() = default;
  SpanTables(const OrderedStorylineInstance& inst, const NicenessParams& params);

  /// Characters active at every step, sorted by position at the first step.
  const std::vector<CharIndex>& characters() const noexcept { return chars_; }
  std::size_t stepCount() const noexcept { return steps_; }

  /// Meeting adjacencies between positions j1 <= j2 of step i's ordering.
  std::size_t ccons(Step i, std::size_t j1, std::size_t j2) const;

  /// True when a is below b at every step (a, b index into characters()).
  bool ordered(std::size_t a, std::size_t b) const;
  /// Minimum and maximum vertical distance between characters()[a] below
  /// characters()[b] at step i. maxy is +inf without a shared meeting.
  double miny(Step i, std::size_t a, std::size_t b) const { return miny_[slot(i, a, b)]; }
  double maxy(Step i, std::size_t a, std::size_t b) const { return maxy_[slot(i, a, b)]; }

 private:
  std::size_t slot(Step i, std::size_t a, std::size_t b) const { return (i * m_ + a) * m_ + b; }

  std::size_t steps_ = 0;
  std::size_t m_ = 0;
  std::vector<CharIndex> chars_;
  // prefix_[i][j]: meeting adjacencies among positions 0..j of step i.
  std::vector<std::vector<std::size_t>> prefix_;
  std::vector<double> miny_, maxy_;
  std::vector<bool> ordered_;
};

SpanTables computeSpanTables(const OrderedStorylineInstance& inst, const NicenessParams& params);

/// Arc (a, b) of the pair DAG: a below b at every step and the span intervals
/// of all steps intersect. Indices into SpanTables::characters().
struct PairArc {
  std::size_t lower;
  std::size_t upper;
  double lo;  // intersection of the span intervals
  double hi;
};

std::vector<PairArc> pairArcs(const SpanTables& tables, Execution execution = Execution::Parallel);

struct WiggleFreeResult {
  /// Characters drawn flat, bottom to top.
  std::vector<CharIndex> subset;
  Coordination coordination;
  /// Longest path in the pair DAG, as character indices bottom to top.
  std::vector<CharIndex> certificate;
};

WiggleFreeResult maxWiggleFreeSet(const OrderedStorylineInstance& inst, const NicenessParams& params,
                                  Execution execution = Execution::Parallel);

struct WiggleCountResult {
  std::size_t count = 0;
  Coordination coordination;
};

/// Minimum wiggle count for two time steps. Throws std::invalid_argument
/// unless the instance has exactly two steps.
WiggleCountResult twoStepWcMin(const OrderedStorylineInstance& inst, const NicenessParams& params);

/// Minimum wiggle count over valid (not necessarily nice) coordinations; a
/// lower bound for nice ones. The coordination is integral.
WiggleCountResult unrestrictedWcMin(const OrderedStorylineInstance& inst);

/// Solves the linear wiggle height program with the given characters held flat.
/// Returns nullopt when that is infeasible.
std::optional<Coordination> flatRealization(const OrderedStorylineInstance& inst, const NicenessParams& params,
                                            const std::vector<CharIndex>& flat);

}  // namespace storyline
