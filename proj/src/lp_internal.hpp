#pragma once

#include <chrono>
#include <optional>
#include <span>

#include "storyline/solver.hpp"

namespace storyline::detail {

using Clock = std::chrono::steady_clock;

/// Simplex on `model` with the variable bounds replaced by `lower`/`upper`.
/// The quadratic part of the objective is ignored.
SolveResult simplex(const OptimizationModel& model, std::span<const double> lower,
                    std::span<const double> upper, const SolverConfig& config,
                    std::optional<Clock::time_point> deadline);

std::optional<Clock::time_point> deadlineFor(const SolverConfig& config, Clock::time_point start);

double secondsSince(Clock::time_point start);

}  // namespace storyline::detail
