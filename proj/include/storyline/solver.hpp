#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "storyline/programs.hpp"

namespace storyline {

enum class SolveStatus { Optimal, Infeasible, Unbounded, IterationLimit, TimeLimit };

std::string_view statusName(SolveStatus status);

struct SolveStats {
  std::size_t iterations = 0;
  std::size_t nodesExplored = 0;
  double wallSeconds = 0.0;
};

/// `assignment` is filled on Optimal, and on TimeLimit/IterationLimit from a
/// branch-and-bound run that found an incumbent.
struct SolveResult {
  SolveStatus status = SolveStatus::Infeasible;
  std::vector<double> assignment;
  double objectiveValue = 0.0;
  // Branch and bound only; equal to objectiveValue when proven optimal.
  double bestBound = 0.0;
  double gap = 0.0;
  SolveStats stats;
  // Duals on Optimal LP/QP results. Rows: >= rows nonnegative, <= rows
  // nonpositive. Bounds: positive at a lower bound, negative at an upper bound.
  std::vector<double> rowDuals;
  std::vector<double> boundDuals;
  // Incumbent objective each time branch and bound improved it.
  std::vector<double> incumbentHistory;

  bool hasAssignment() const noexcept { return !assignment.empty() || status == SolveStatus::Optimal; }
};

struct SolverConfig {
  double feasibilityTol = 1e-7;
  double optimalityTol = 1e-7;
  double integralityTol = 1e-6;
  std::optional<double> timeLimitSeconds;
  std::optional<std::size_t> nodeLimit;
  std::optional<std::size_t> iterationLimit;
  std::string backend = "builtin";

  /// Throws std::invalid_argument unless every tolerance is positive.
  void validate() const;
};

/// Bounded-variable primal simplex. Returns a basic (extreme-point) optimum.
SolveResult solveLp(const OptimizationModel& model, const SolverConfig& config = {});

/// Primal active-set method for convex separable QPs. `start`, when given,
/// must be feasible; otherwise a feasible point comes from the simplex.
SolveResult solveQp(const OptimizationModel& model, const SolverConfig& config = {},
                    std::span<const double> start = {});

/// LP-based branch and bound over the integral variables.
SolveResult solveIlp(const OptimizationModel& model, const SolverConfig& config = {});

struct KktResiduals {
  double stationarity = 0.0;
  double primal = 0.0;
  double dual = 0.0;
  double complementarity = 0.0;

  double max() const noexcept;
};

/// KKT residuals of an Optimal LP/QP result in the max norm.
KktResiduals kktResiduals(const OptimizationModel& model, const SolveResult& result);

/// Something that can solve an OptimizationModel.
class SolverBackend {
 public:
  virtual ~SolverBackend() = default;
  virtual std::string name() const = 0;
  virtual SolveResult solve(const OptimizationModel& model, const SolverConfig& config,
                            std::span<const double> start = {}) = 0;
};

/// Dispatches to solveIlp, solveQp or solveLp by model shape.
class BuiltinBackend final : public SolverBackend {
 public:
  std::string name() const override { return "builtin"; }
  SolveResult solve(const OptimizationModel& model, const SolverConfig& config,
                    std::span<const double> start = {}) override;
};

/// Writes the model as an LP file, runs a command and reads back a solution
/// file ("# Objective value = v" then "name value" lines). `{lp}` and `{sol}`
/// in the command are replaced by the file paths.
class ExternalBackend final : public SolverBackend {
 public:
  explicit ExternalBackend(std::string commandTemplate);
  std::string name() const override { return "external"; }
  SolveResult solve(const OptimizationModel& model, const SolverConfig& config,
                    std::span<const double> start = {}) override;

 private:
  std::string command_;
};

inline constexpr const char* kSolverEnv = "STORYLINE_SOLVER";
inline constexpr const char* kSolverCommandEnv = "STORYLINE_SOLVER_CMD";

/// "builtin" or "external" (command from STORYLINE_SOLVER_CMD). An empty name
/// falls back to STORYLINE_SOLVER, then to builtin.
std::unique_ptr<SolverBackend> makeBackend(std::string_view name = {});

/// Solves with the backend named in `config`.
SolveResult solve(const OptimizationModel& model, const SolverConfig& config = {},
                  std::span<const double> start = {});

}  // namespace storyline
