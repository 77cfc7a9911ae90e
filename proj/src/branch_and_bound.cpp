// Depth-first LP branch and bound. Each node re-solves the relaxation from
// scratch under tightened bounds.

#include <algorithm>
#include <cmath>
#include <limits>

#include "lp_internal.hpp"

namespace storyline {

namespace {

constexpr std::size_t kRestartEvery = 10000;

struct Node {
  std::vector<double> lower;
  std::vector<double> upper;
  double parentBound;
};

}  // namespace

SolveResult solveIlp(const OptimizationModel& model, const SolverConfig& config) {
  config.validate();
  model.validate();
  if (model.hasQuadratic()) throw std::invalid_argument("solveIlp: quadratic objectives are not supported");
  const auto t0 = detail::Clock::now();
  const auto deadline = detail::deadlineFor(config, t0);
  const std::size_t n = model.variableCount();

  Node root;
  for (const auto& v : model.variables) {
    root.lower.push_back(v.integral ? std::ceil(v.lower - config.integralityTol) : v.lower);
    root.upper.push_back(v.integral ? std::floor(v.upper + config.integralityTol) : v.upper);
  }
  root.parentBound = -kInf;

  SolveResult result;
  double incumbent = kInf;
  std::vector<double> best;
  std::vector<Node> stack;
  stack.push_back(std::move(root));
  std::size_t nodes = 0;
  std::size_t lpIterations = 0;
  bool sawUnbounded = false;
  std::optional<SolveStatus> stopped;

  while (!stack.empty()) {
    if (deadline && detail::Clock::now() > *deadline) {
      stopped = SolveStatus::TimeLimit;
      break;
    }
    if (config.nodeLimit && nodes >= *config.nodeLimit) {
      stopped = SolveStatus::IterationLimit;
      break;
    }
    if (nodes > 0 && nodes % kRestartEvery == 0) {
      // Best-bound restart: continue from the most promising open node.
      auto it = std::min_element(stack.begin(), stack.end(), [](const Node& a, const Node& b) {
        return a.parentBound < b.parentBound;
      });
      std::rotate(it, it + 1, stack.end());
    }

    Node node = std::move(stack.back());
    stack.pop_back();
    if (node.parentBound >= incumbent - config.optimalityTol) continue;
    ++nodes;

    SolveResult lp = detail::simplex(model, node.lower, node.upper, config, deadline);
    lpIterations += lp.stats.iterations;
    if (lp.status == SolveStatus::TimeLimit) {
      stack.push_back(std::move(node));
      stopped = SolveStatus::TimeLimit;
      break;
    }
    if (lp.status == SolveStatus::Unbounded) {
      sawUnbounded = true;
      continue;
    }
    if (lp.status != SolveStatus::Optimal) continue;
    if (lp.objectiveValue >= incumbent - config.optimalityTol) continue;

    // Most fractional integral variable, ties by declaration order.
    std::size_t branch = n;
    double frac = config.integralityTol;
    for (std::size_t j = 0; j < n; ++j) {
      if (!model.variables[j].integral) continue;
      const double v = lp.assignment[j];
      const double f = std::abs(v - std::round(v));
      if (f > frac) {
        frac = f;
        branch = j;
      }
    }
    if (branch == n) {
      incumbent = lp.objectiveValue;
      best = std::move(lp.assignment);
      result.incumbentHistory.push_back(incumbent);
      continue;
    }

    const double v = lp.assignment[branch];
    Node up{node.lower, node.upper, lp.objectiveValue};
    up.lower[branch] = std::ceil(v);
    Node down{std::move(node.lower), std::move(node.upper), lp.objectiveValue};
    down.upper[branch] = std::floor(v);
    stack.push_back(std::move(up));
    stack.push_back(std::move(down));
  }

  result.stats.nodesExplored = nodes;
  result.stats.iterations = lpIterations;
  if (!best.empty() || (incumbent < kInf)) {
    for (std::size_t j = 0; j < n; ++j)
      if (model.variables[j].integral) best[j] = std::round(best[j]);
    result.assignment = std::move(best);
    result.objectiveValue = model.objective(result.assignment);
  }

  if (stopped) {
    result.status = *stopped;
    double bound = incumbent;
    for (const auto& node : stack) bound = std::min(bound, node.parentBound);
    result.bestBound = bound;
    if (incumbent < kInf && std::isfinite(bound))
      result.gap = std::abs(incumbent - bound) / std::max(1e-10, std::abs(incumbent));
    else
      result.gap = kInf;
  } else if (incumbent < kInf) {
    result.status = SolveStatus::Optimal;
    result.bestBound = result.objectiveValue;
    result.gap = 0.0;
  } else {
    result.status = sawUnbounded ? SolveStatus::Unbounded : SolveStatus::Infeasible;
  }
  result.stats.wallSeconds = detail::secondsSince(t0);
  return result;
}

}  // namespace storyline
