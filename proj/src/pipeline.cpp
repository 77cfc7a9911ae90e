#include "storyline/pipeline.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "json.hpp"
#include "storyline/instance_io.hpp"
#include "storyline/oracle.hpp"
#include "storyline/programs.hpp"
#include "storyline/wigglefree.hpp"

namespace storyline {

namespace {

using nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

double secondsSince(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void fromSolve(LayoutResult& out, const SolveResult& res) {
  out.status = res.status;
  out.objectiveValue = res.objectiveValue;
  out.bestBound = res.bestBound;
  out.gap = res.gap;
  out.stats = res.stats;
}

LayoutResult solveProgram(const OrderedStorylineInstance& inst, const NicenessParams& params,
                          const BuiltProgram& program, const SolverConfig& solver, std::span<const double> start = {}) {
  LayoutResult out;
  const SolveResult res = solve(program.model, solver, start);
  fromSolve(out, res);
  if (res.hasAssignment() && !res.assignment.empty()) {
    out.coord = extractCoordination(inst, program.index, res.assignment, params);
    out.hasCoordination = true;
  }
  if (res.status == SolveStatus::Optimal) {
    out.bestBound = res.objectiveValue;
    out.gap = 0.0;
  }
  return out;
}

bool converged(SolveStatus s) { return s == SolveStatus::Optimal; }

double relativeDiff(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

ordered_json finite(double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); }

void writeFile(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

}  // namespace

std::string_view objectiveName(Objective o) {
  switch (o) {
    case Objective::WC: return "wc";
    case Objective::LWH: return "lwh";
    case Objective::QWH: return "qwh";
    case Objective::WiggleFree: return "wigglefree";
    case Objective::WcUnrestricted: return "wc-unrestricted";
    case Objective::Baseline: return "base";
  }
  return "?";
}

std::optional<Objective> parseObjective(std::string_view name) {
  for (Objective o : {Objective::WC, Objective::LWH, Objective::QWH, Objective::WiggleFree, Objective::WcUnrestricted,
                      Objective::Baseline})
    if (objectiveName(o) == name) return o;
  return std::nullopt;
}

Coordination baselineLayout(const OrderedStorylineInstance& inst, const NicenessParams& params) {
  params.validate();
  Coordination coord = Coordination::forInstance(inst);
  double lowest = std::numeric_limits<double>::infinity();
  for (Step t = 0; t < inst.stepCount(); ++t) {
    const auto order = inst.ordering(t);
    if (order.empty()) continue;
    std::vector<double> y(order.size(), 0.0);
    for (std::size_t p = 1; p < order.size(); ++p)
      y[p] = y[p - 1] + (inst.shareMeeting(t, order[p - 1], order[p]) ? params.delta : params.deltaBar);
    const double mid = y.back() / 2.0;
    for (std::size_t p = 0; p < order.size(); ++p) {
      coord.at(t, order[p]) = y[p] - mid;
      lowest = std::min(lowest, y[p] - mid);
    }
  }
  if (std::isfinite(lowest))
    for (Step t = 0; t < inst.stepCount(); ++t)
      for (CharIndex c : inst.ordering(t)) coord.at(t, c) -= lowest;
  return coord;
}

LayoutResult optimizeLayout(const OrderedStorylineInstance& inst, const NicenessParams& params, Objective objective,
                            const SolverConfig& solver, Execution execution) {
  params.validate();
  const auto start = Clock::now();
  LayoutResult out;
  switch (objective) {
    case Objective::WC:
      out = solveProgram(inst, params, buildWcProgram(inst, params), solver);
      break;
    case Objective::LWH:
      out = solveProgram(inst, params, buildLwhProgram(inst, params), solver);
      break;
    case Objective::QWH: {
      const BuiltProgram qwh = buildQwhProgram(inst, params);
      const LayoutResult lwh = solveProgram(inst, params, buildLwhProgram(inst, params), solver);
      if (!lwh.hasCoordination) {
        out = lwh;
        break;
      }
      const auto warm = assignmentFor(qwh, lwh.coord);
      out = solveProgram(inst, params, qwh, solver, warm);
      out.stats.iterations += lwh.stats.iterations;
      break;
    }
    case Objective::WiggleFree: {
      auto free = maxWiggleFreeSet(inst, params, execution);
      out.coord = std::move(free.coordination);
      out.flatSubset = std::move(free.subset);
      out.objectiveValue = static_cast<double>(out.flatSubset.size());
      out.bestBound = out.objectiveValue;
      out.hasCoordination = true;
      break;
    }
    case Objective::WcUnrestricted: {
      auto un = unrestrictedWcMin(inst);
      out.coord = std::move(un.coordination);
      out.objectiveValue = static_cast<double>(un.count);
      out.bestBound = out.objectiveValue;
      out.hasCoordination = true;
      break;
    }
    case Objective::Baseline:
      out.coord = baselineLayout(inst, params);
      out.objectiveValue = computeMetrics(inst, out.coord).totalHeight;
      out.bestBound = out.objectiveValue;
      out.hasCoordination = true;
      break;
  }
  out.objective = objective;
  out.solveSeconds = secondsSince(start);
  return out;
}

OracleCheck checkAgainstOracle(const OrderedStorylineInstance& inst, const NicenessParams& params,
                               const LayoutResult& layout, std::size_t stateCap, Execution execution) {
  OracleCheck check;
  WiggleObjective kind;
  switch (layout.objective) {
    case Objective::WC: kind = WiggleObjective::WC; break;
    case Objective::LWH: kind = WiggleObjective::LWH; break;
    case Objective::QWH: kind = WiggleObjective::QWH; break;
    default:
      check.skipped = "no oracle for objective " + std::string(objectiveName(layout.objective));
      return check;
  }
  if (!params.integral()) {
    check.skipped = "oracle needs integer spacings";
    return check;
  }
  if (!layout.hasCoordination || !converged(layout.status)) {
    check.skipped = "solver did not prove optimality";
    return check;
  }
  OracleConfig cfg;
  cfg.stateCap = stateCap;
  cfg.execution = execution;
  try {
    check.optimum = bruteForceOracle(inst, params, kind, cfg).optimum;
  } catch (const StateCapExceeded& e) {
    check.skipped = e.what();
    return check;
  }
  check.ran = true;
  const LayoutMetrics m = computeMetrics(inst, layout.coord);
  switch (kind) {
    case WiggleObjective::WC: check.agrees = static_cast<double>(m.wiggleCount) == check.optimum; break;
    case WiggleObjective::LWH: check.agrees = relativeDiff(layout.objectiveValue, check.optimum) <= 1e-9; break;
    case WiggleObjective::QWH: check.agrees = layout.objectiveValue <= check.optimum + 1e-6; break;
  }
  return check;
}

std::string metricsReport(const OrderedStorylineInstance& inst, const NicenessParams& params,
                          const LayoutResult& layout, const std::optional<OracleCheck>& oracle,
                          const ReportOptions& options) {
  ordered_json doc;
  doc["method"] = objectiveName(layout.objective);
  if (layout.hasCoordination) {
    const LayoutMetrics m = computeMetrics(inst, layout.coord);
    doc["wiggleCount"] = m.wiggleCount;
    doc["linearWiggleHeight"] = m.linearWiggleHeight;
    doc["quadraticWiggleHeight"] = m.quadraticWiggleHeight;
    doc["totalHeight"] = m.totalHeight;
    doc["nice"] = static_cast<bool>(isNice(inst, layout.coord, params));
  } else {
    for (const char* key : {"wiggleCount", "linearWiggleHeight", "quadraticWiggleHeight", "totalHeight", "nice"})
      doc[key] = nullptr;
  }
  doc["objective"] = finite(layout.objectiveValue);
  doc["solverStatus"] = statusName(layout.status);
  doc["solveSeconds"] = options.reproducible ? 0.0 : layout.solveSeconds;
  doc["bestBound"] = finite(layout.bestBound);
  doc["gap"] = finite(layout.gap);
  doc["iterations"] = layout.stats.iterations;
  doc["nodesExplored"] = layout.stats.nodesExplored;
  doc["delta"] = params.delta;
  doc["deltaBar"] = params.deltaBar;
  if (layout.objective == Objective::WiggleFree) {
    ordered_json ids = ordered_json::array();
    for (CharIndex c : layout.flatSubset) ids.push_back(inst.character(c).id);
    doc["flatCharacters"] = ids;
  }
  if (oracle) {
    doc["oracleRan"] = oracle->ran;
    if (oracle->ran) {
      doc["oracleOptimum"] = oracle->optimum;
      doc["oracleAgrees"] = oracle->agrees;
    } else {
      doc["oracleSkipped"] = oracle->skipped;
    }
  }
  return doc.dump(2) + "\n";
}

std::string routingReport(const OrderedStorylineInstance& inst, const std::vector<GapRouting>& routings, double rMin) {
  ordered_json doc;
  doc["rMin"] = rMin;
  ordered_json gaps = ordered_json::array();
  const auto idPair = [&](const CharPair& p) {
    return ordered_json::array({inst.character(p.first).id, inst.character(p.second).id});
  };
  for (const auto& r : routings) {
    ordered_json g;
    g["t"] = r.t + 1;
    g["dx"] = r.dx();
    g["dxSquared"] = r.dxSquared;
    ordered_json radii = ordered_json::array();
    for (const auto& cr : r.radii)
      radii.push_back({{"id", inst.character(cr.c).id}, {"first", cr.first}, {"second", cr.second}});
    g["radii"] = radii;
    g["neighborPairs"] = r.pairs.size();
    ordered_json dropped = ordered_json::array();
    for (const auto& p : r.dropped) dropped.push_back(idPair(p));
    g["dropped"] = dropped;
    gaps.push_back(g);
  }
  doc["gaps"] = gaps;
  return doc.dump(2) + "\n";
}

Objective ComparisonTable::optimizerOf(Metric m) {
  switch (m) {
    case Metric::WC: return Objective::WC;
    case Metric::LWH: return Objective::LWH;
    case Metric::QWH: return Objective::QWH;
    case Metric::Height: return Objective::Baseline;
  }
  return Objective::Baseline;
}

const ComparisonRow* ComparisonTable::row(Objective method) const {
  for (const auto& r : rows)
    if (r.method == method) return &r;
  return nullptr;
}

namespace {

double metricValue(const LayoutMetrics& m, Metric k) {
  switch (k) {
    case Metric::WC: return static_cast<double>(m.wiggleCount);
    case Metric::LWH: return m.linearWiggleHeight;
    case Metric::QWH: return m.quadraticWiggleHeight;
    case Metric::Height: return m.totalHeight;
  }
  return 0.0;
}

constexpr std::array<Metric, 4> kMetrics = {Metric::WC, Metric::LWH, Metric::QWH, Metric::Height};
constexpr std::array<const char*, 4> kMetricNames = {"wiggleCount", "linearWiggleHeight", "quadraticWiggleHeight",
                                                     "totalHeight"};

}  // namespace

ComparisonTable compareObjectives(const OrderedStorylineInstance& inst, const NicenessParams& params,
                                  const SolverConfig& solver, Execution execution) {
  std::vector<Objective> methods = {Objective::Baseline};
  if (params.integral()) methods.push_back(Objective::WC);
  methods.push_back(Objective::LWH);
  methods.push_back(Objective::QWH);

  ComparisonTable table;
  table.rows.resize(methods.size());
  std::vector<std::string> errors(methods.size());
  const auto count = static_cast<std::ptrdiff_t>(methods.size());
  const bool parallel = execution == Execution::Parallel;
#pragma omp parallel for schedule(dynamic) if (parallel)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    auto& row = table.rows[static_cast<std::size_t>(i)];
    row.method = methods[static_cast<std::size_t>(i)];
    try {
      row.layout = optimizeLayout(inst, params, row.method, solver, Execution::Serial);
      if (row.layout.hasCoordination) row.metrics = computeMetrics(inst, row.layout.coord);
      else errors[static_cast<std::size_t>(i)] = std::string(objectiveName(row.method)) + " found no layout";
    } catch (const std::exception& e) {
      errors[static_cast<std::size_t>(i)] = e.what();
    }
  }
  for (const auto& e : errors)
    if (!e.empty()) throw std::runtime_error("comparison failed: " + e);

  for (std::size_t k = 0; k < kMetrics.size(); ++k) {
    const ComparisonRow* best = table.row(ComparisonTable::optimizerOf(kMetrics[k]));
    if (best == nullptr) {
      double lo = std::numeric_limits<double>::infinity();
      for (const auto& r : table.rows) lo = std::min(lo, metricValue(r.metrics, kMetrics[k]));
      for (auto& r : table.rows) {
        const double v = metricValue(r.metrics, kMetrics[k]);
        r.ratio[k] = lo == 0.0 ? (v == 0.0 ? 1.0 : std::numeric_limits<double>::infinity()) : v / lo;
      }
      continue;
    }
    const double ref = metricValue(best->metrics, kMetrics[k]);
    for (auto& r : table.rows) {
      const double v = metricValue(r.metrics, kMetrics[k]);
      r.ratio[k] = ref == 0.0 ? (v == 0.0 ? 1.0 : std::numeric_limits<double>::infinity()) : v / ref;
    }
  }
  return table;
}

std::string comparisonReport(const OrderedStorylineInstance& inst, const ComparisonTable& table,
                             const ReportOptions& options) {
  (void)inst;
  ordered_json doc;
  ordered_json rows = ordered_json::array();
  for (const auto& r : table.rows) {
    ordered_json row;
    row["method"] = objectiveName(r.method);
    row["solverStatus"] = statusName(r.layout.status);
    row["solveSeconds"] = options.reproducible ? 0.0 : r.layout.solveSeconds;
    for (std::size_t k = 0; k < kMetrics.size(); ++k) row[kMetricNames[k]] = metricValue(r.metrics, kMetrics[k]);
    ordered_json ratios;
    for (std::size_t k = 0; k < kMetrics.size(); ++k) ratios[kMetricNames[k]] = finite(r.ratio[k]);
    row["ratios"] = ratios;
    rows.push_back(row);
  }
  doc["methods"] = rows;
  return doc.dump(2) + "\n";
}

std::string comparisonText(const ComparisonTable& table) {
  std::ostringstream out;
  char line[256];
  std::snprintf(line, sizeof line, "%-8s %10s %12s %12s %12s\n", "method", "WC", "LWH", "QWH", "height");
  out << line;
  for (const auto& r : table.rows) {
    std::snprintf(line, sizeof line, "%-8s %10zu %12.4f %12.4f %12.4f\n", std::string(objectiveName(r.method)).c_str(),
                  r.metrics.wiggleCount, r.metrics.linearWiggleHeight, r.metrics.quadraticWiggleHeight,
                  r.metrics.totalHeight);
    out << line;
  }
  out << "ratios to each column's optimizer\n";
  for (const auto& r : table.rows) {
    std::snprintf(line, sizeof line, "%-8s %10.4f %12.4f %12.4f %12.4f\n", std::string(objectiveName(r.method)).c_str(),
                  r.ratio[0], r.ratio[1], r.ratio[2], r.ratio[3]);
    out << line;
  }
  return out.str();
}

RunOutcome runPipeline(const RunConfig& config) {
  RunOutcome outcome;
  InstanceDocument doc;
  NicenessParams params;
  try {
    doc = loadInstance(config.inputPath);
    params = doc.paramsOrDefault();
    if (config.delta) params.delta = *config.delta;
    if (config.deltaBar) params.deltaBar = *config.deltaBar;
    params.validate();
    config.solver.validate();
    config.style.validate();
    if (config.rMin && !(*config.rMin > 0.0)) throw std::invalid_argument("rMin must be positive");
    if (config.objective == Objective::WC && !params.integral())
      throw std::invalid_argument("objective wc requires integer delta and deltaBar");
  } catch (const std::exception& e) {
    outcome.exitCode = kExitInput;
    outcome.message = config.inputPath.string() + ": " + e.what();
    return outcome;
  }
  const auto& inst = doc.instance;
  const ReportOptions reportOptions{config.reproducible};

  try {
    if (config.compare) {
      const auto table = compareObjectives(inst, params, config.solver, config.execution);
      if (config.metricsPath) writeFile(*config.metricsPath, comparisonReport(inst, table, reportOptions));
      outcome.stdoutText = comparisonText(table);
      return outcome;
    }

    const LayoutResult layout = optimizeLayout(inst, params, config.objective, config.solver, config.execution);
    std::optional<OracleCheck> oracle;
    if (config.oracle)
      oracle = checkAgainstOracle(inst, params, layout, config.oracleStateCap, config.execution);
    if (config.metricsPath) writeFile(*config.metricsPath, metricsReport(inst, params, layout, oracle, reportOptions));

    if (!layout.hasCoordination) {
      const bool limit = layout.status == SolveStatus::TimeLimit || layout.status == SolveStatus::IterationLimit;
      outcome.exitCode = limit ? kExitLimit : kExitInfeasible;
      outcome.message = "solver ended with " + std::string(statusName(layout.status)) + " and no layout";
      return outcome;
    }

    const double rMin = config.rMin.value_or(params.delta / 2.0);
    const auto routings = routeAllGaps(inst, layout.coord, rMin, config.execution);
    if (config.routingReportPath) writeFile(*config.routingReportPath, routingReport(inst, routings, rMin));
    if (config.svgPath || config.sidecarPath) {
      const Scene scene = buildScene(inst, layout.coord, routings, config.style);
      if (config.svgPath) writeFile(*config.svgPath, renderSvg(scene, config.style));
      if (config.sidecarPath) writeFile(*config.sidecarPath, renderSidecar(inst, scene));
    }

    std::ostringstream summary;
    const LayoutMetrics m = computeMetrics(inst, layout.coord);
    summary << objectiveName(layout.objective) << ": status " << statusName(layout.status) << ", WC "
            << m.wiggleCount << ", LWH " << m.linearWiggleHeight << ", QWH " << m.quadraticWiggleHeight << ", height "
            << m.totalHeight << "\n";
    std::size_t dropped = 0;
    for (const auto& r : routings) dropped += r.dropped.size();
    if (dropped > 0) summary << "routing dropped " << dropped << " pair coupling(s); see the routing report\n";
    if (oracle) {
      if (oracle->ran)
        summary << "oracle optimum " << oracle->optimum << (oracle->agrees ? " (agrees)" : " (MISMATCH)") << "\n";
      else
        summary << "oracle skipped: " << oracle->skipped << "\n";
    }
    outcome.stdoutText = summary.str();

    if (layout.status == SolveStatus::TimeLimit || layout.status == SolveStatus::IterationLimit) {
      outcome.exitCode = kExitLimit;
      outcome.message = "solver stopped at a limit; gap " + std::to_string(layout.gap);
    } else if (oracle && oracle->ran && !oracle->agrees) {
      outcome.exitCode = kExitOracleMismatch;
      outcome.message = "layout disagrees with the exhaustive optimum";
    }
  } catch (const std::exception& e) {
    outcome.exitCode = kExitFailure;
    outcome.message = e.what();
  }
  return outcome;
}

}  // namespace storyline
