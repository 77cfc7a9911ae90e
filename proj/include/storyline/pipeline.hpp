#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "storyline/execution.hpp"
#include "storyline/model.hpp"
#include "storyline/render.hpp"
#include "storyline/routing.hpp"
#include "storyline/solver.hpp"

namespace storyline {

enum class Objective { WC, LWH, QWH, WiggleFree, WcUnrestricted, Baseline };

std::string_view objectiveName(Objective o);
/// Accepts wc, lwh, qwh, wigglefree, wc-unrestricted and base.
std::optional<Objective> parseObjective(std::string_view name);

struct LayoutResult {
  Objective objective = Objective::LWH;
  SolveStatus status = SolveStatus::Optimal;
  /// Empty (stepCount() == 0 on a nonempty instance) when no solution exists.
  Coordination coord;
  bool hasCoordination = false;
  double objectiveValue = 0.0;
  double bestBound = 0.0;
  double gap = 0.0;
  double solveSeconds = 0.0;
  SolveStats stats;
  /// Characters drawn flat by the wiggle-free method, bottom to top.
  std::vector<CharIndex> flatSubset;
};

/// Centers every step's minimal nice stack on a common line, then shifts the
/// drawing so the lowest value is 0.
Coordination baselineLayout(const OrderedStorylineInstance& inst, const NicenessParams& params);

/// Computes a layout for one objective. QWH starts the QP from the LWH optimum.
/// Throws std::invalid_argument for WC with non-integer spacings.
LayoutResult optimizeLayout(const OrderedStorylineInstance& inst, const NicenessParams& params, Objective objective,
                            const SolverConfig& solver = {}, Execution execution = Execution::Parallel);

struct OracleCheck {
  bool ran = false;
  std::string skipped;  // reason when !ran
  double optimum = 0.0;
  bool agrees = true;
};

/// Compares a layout with the exhaustive optimum for WC, LWH and QWH. WC and
/// LWH must match exactly (1e-9 relative), QWH may be lower by any amount and
/// higher by at most 1e-6.
OracleCheck checkAgainstOracle(const OrderedStorylineInstance& inst, const NicenessParams& params,
                               const LayoutResult& layout, std::size_t stateCap = 100'000'000,
                               Execution execution = Execution::Parallel);

struct ReportOptions {
  bool reproducible = false;  // zero every timing field
};

std::string metricsReport(const OrderedStorylineInstance& inst, const NicenessParams& params,
                          const LayoutResult& layout, const std::optional<OracleCheck>& oracle = std::nullopt,
                          const ReportOptions& options = {});
std::string routingReport(const OrderedStorylineInstance& inst, const std::vector<GapRouting>& routings, double rMin);

enum class Metric { WC, LWH, QWH, Height };

struct ComparisonRow {
  Objective method;
  LayoutResult layout;
  LayoutMetrics metrics;
  /// metric value divided by the best value in its column; 0/0 counts as 1.
  double ratio[4] = {1.0, 1.0, 1.0, 1.0};
};

struct ComparisonTable {
  std::vector<ComparisonRow> rows;
  /// Method optimizing each metric: wc, lwh, qwh, base.
  static Objective optimizerOf(Metric m);
  const ComparisonRow* row(Objective method) const;
};

/// Runs base, wc, lwh and qwh (wc only with integer spacings).
ComparisonTable compareObjectives(const OrderedStorylineInstance& inst, const NicenessParams& params,
                                  const SolverConfig& solver = {}, Execution execution = Execution::Parallel);

std::string comparisonReport(const OrderedStorylineInstance& inst, const ComparisonTable& table,
                             const ReportOptions& options = {});
std::string comparisonText(const ComparisonTable& table);

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitInput = 2,
  kExitInfeasible = 3,
  kExitLimit = 4,
  kExitOracleMismatch = 5,
};

struct RunConfig {
  std::filesystem::path inputPath;
  Objective objective = Objective::LWH;
  std::optional<double> delta;
  std::optional<double> deltaBar;
  /// Defaults to delta / 2.
  std::optional<double> rMin;
  SolverConfig solver;
  std::optional<std::filesystem::path> svgPath;
  std::optional<std::filesystem::path> metricsPath;
  std::optional<std::filesystem::path> routingReportPath;
  std::optional<std::filesystem::path> sidecarPath;
  bool oracle = false;
  std::size_t oracleStateCap = 100'000'000;
  /// Run the comparison table instead of a single objective.
  bool compare = false;
  bool reproducible = false;
  RenderStyle style;
  Execution execution = Execution::Parallel;
};

struct RunOutcome {
  int exitCode = kExitOk;
  std::string message;  // diagnostics for stderr
  std::string stdoutText;
};

/// parse -> optimize -> route -> render -> report. Never throws.
RunOutcome runPipeline(const RunConfig& config);

}  // namespace storyline
