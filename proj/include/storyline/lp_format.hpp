#pragma once

#include <map>
#include <string>
#include <string_view>

#include "storyline/programs.hpp"
#include "storyline/solver.hpp"

namespace storyline {

/// CPLEX LP text: Minimize / Subject To / Bounds / General / Binary / End.
/// Quadratic terms are written as [ 2q x ^2 ] / 2.
std::string writeLpFile(const OptimizationModel& model);

/// Reads the subset of the LP format produced by writeLpFile. Throws
/// std::runtime_error with the line number on malformed input.
OptimizationModel readLpFile(std::string_view text);

/// Solution file: "# Objective value = v", optional "# Status = name", then one
/// "name value" line per variable.
std::string writeSolutionFile(const OptimizationModel& model, const SolveResult& result);

struct SolutionFile {
  std::optional<double> objective;
  std::optional<SolveStatus> status;
  std::map<std::string, double> values;
};

SolutionFile readSolutionFile(std::string_view text);

std::optional<SolveStatus> parseStatus(std::string_view name);

}  // namespace storyline
