#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "storyline/instance_io.hpp"
#include "storyline/lp_format.hpp"
#include "storyline/pipeline.hpp"
#include "storyline/solver.hpp"
#include "storyline/wigglefree.hpp"

using namespace storyline;

namespace {

int solveLpFile(const std::string& lpPath, const std::string& solPath, const SolverConfig& config) {
  std::ifstream in(lpPath, std::ios::binary);
  if (!in) {
    std::cerr << lpPath << ": cannot open file\n";
    return kExitInput;
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  OptimizationModel model;
  try {
    model = readLpFile(buf.str());
  } catch (const std::exception& e) {
    std::cerr << lpPath << ": " << e.what() << "\n";
    return kExitInput;
  }
  const SolveResult result = BuiltinBackend().solve(model, config);
  const std::string text = writeSolutionFile(model, result);
  if (solPath.empty() || solPath == "-") {
    std::cout << text;
  } else {
    std::ofstream out(solPath, std::ios::binary);
    out << text;
    if (!out) {
      std::cerr << solPath << ": cannot write\n";
      return kExitFailure;
    }
  }
  switch (result.status) {
    case SolveStatus::Optimal: return kExitOk;
    case SolveStatus::TimeLimit:
    case SolveStatus::IterationLimit: return kExitLimit;
    default: return kExitInfeasible;
  }
}

int wiggleFreeReport(const std::string& input, std::optional<double> delta, std::optional<double> deltaBar,
                     const std::string& output) {
  InstanceDocument doc;
  NicenessParams params;
  try {
    doc = loadInstance(input);
    params = doc.paramsOrDefault();
    if (delta) params.delta = *delta;
    if (deltaBar) params.deltaBar = *deltaBar;
    params.validate();
  } catch (const std::exception& e) {
    std::cerr << input << ": " << e.what() << "\n";
    return kExitInput;
  }
  const auto& inst = doc.instance;
  nlohmann::ordered_json rep;
  try {
    const auto tables = computeSpanTables(inst, params);
    const auto arcs = pairArcs(tables);
    const auto result = maxWiggleFreeSet(inst, params);
    const auto ids = [&](const std::vector<CharIndex>& cs) {
      nlohmann::ordered_json a = nlohmann::ordered_json::array();
      for (CharIndex c : cs) a.push_back(inst.character(c).id);
      return a;
    };
    rep["candidates"] = ids(tables.characters());
    rep["arcs"] = arcs.size();
    rep["subset"] = ids(result.subset);
    rep["certificate"] = ids(result.certificate);
    if (inst.stepCount() == 2) rep["minimumWiggleCount"] = twoStepWcMin(inst, params).count;
    rep["unrestrictedWiggleCount"] = unrestrictedWcMin(inst).count;
    nlohmann::ordered_json coords = nlohmann::ordered_json::array();
    for (Step t = 0; t < inst.stepCount(); ++t) {
      nlohmann::ordered_json step;
      for (CharIndex c : inst.ordering(t)) step[inst.character(c).id] = result.coordination(t, c);
      coords.push_back(step);
    }
    rep["coordination"] = coords;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return kExitFailure;
  }
  const std::string text = rep.dump(2) + "\n";
  if (output.empty() || output == "-") {
    std::cout << text;
    return kExitOk;
  }
  std::ofstream out(output, std::ios::binary);
  out << text;
  return out ? kExitOk : kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Storyline layout: wiggle minimization, arc routing and SVG rendering"};
  app.require_subcommand(0, 1);

  RunConfig run;
  std::string input, objective = "lwh", backend, svg, metrics, routing, sidecar;
  std::optional<double> delta, deltaBar, rMin, timeLimit;
  std::optional<std::size_t> nodeLimit;
  bool serial = false;
  std::string labels = "start";

  app.add_option("--input,-i", input, "instance document (JSON)");
  app.add_option("--objective", objective, "wc, lwh, qwh, wigglefree, wc-unrestricted or base")
      ->check(CLI::IsMember({"wc", "lwh", "qwh", "wigglefree", "wc-unrestricted", "base"}));
  app.add_option("--delta", delta, "spacing inside meetings (overrides the file)");
  app.add_option("--delta-bar", deltaBar, "minimum spacing outside meetings (overrides the file)");
  app.add_option("--rmin", rMin, "minimum arc radius, default delta/2");
  app.add_option("--svg", svg, "SVG output path");
  app.add_option("--metrics", metrics, "metrics report path (comparison table with --compare)");
  app.add_option("--routing-report", routing, "routing report path");
  app.add_option("--sidecar", sidecar, "geometry sidecar JSON path");
  app.add_option("--time-limit", timeLimit, "solver time limit in seconds");
  app.add_option("--node-limit", nodeLimit, "branch-and-bound node limit");
  app.add_flag("--oracle", run.oracle, "cross-check against exhaustive search when the instance is small");
  app.add_option("--oracle-cap", run.oracleStateCap, "state cap of the exhaustive search");
  app.add_flag("--compare", run.compare, "compare base, wc, lwh and qwh");
  app.add_flag("--reproducible", run.reproducible, "write zero timings so reports are byte-stable");
  app.add_option("--solver-backend", backend,
                 std::string("builtin or external; default from ") + kSolverEnv + ", else builtin");
  app.add_flag("--serial", serial, "disable OpenMP parallel loops");
  app.add_option("--unit-scale", run.style.unitScale, "pixels per y unit");
  app.add_option("--gap-padding", run.style.gapPadding, "pixels added to every gap");
  app.add_option("--labels", labels, "label placement")->check(CLI::IsMember({"start", "end", "both", "none"}));

  auto* solveCmd = app.add_subcommand("solve", "solve an LP file with the built-in solvers");
  std::string lpPath, solPath;
  std::optional<double> solveTimeLimit;
  solveCmd->add_option("model", lpPath, "LP file")->required();
  solveCmd->add_option("--output,-o", solPath, "solution file, default stdout");
  solveCmd->add_option("--time-limit", solveTimeLimit, "time limit in seconds");

  auto* freeCmd = app.add_subcommand("wigglefree", "report the largest wiggle-free character set");
  std::string freeInput, freeOutput;
  std::optional<double> freeDelta, freeDeltaBar;
  freeCmd->add_option("--input,-i", freeInput, "instance document")->required();
  freeCmd->add_option("--delta", freeDelta, "spacing inside meetings");
  freeCmd->add_option("--delta-bar", freeDeltaBar, "minimum spacing outside meetings");
  freeCmd->add_option("--output,-o", freeOutput, "report path, default stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInput;
  }

  if (*solveCmd) {
    SolverConfig cfg;
    cfg.timeLimitSeconds = solveTimeLimit;
    return solveLpFile(lpPath, solPath, cfg);
  }
  if (*freeCmd) return wiggleFreeReport(freeInput, freeDelta, freeDeltaBar, freeOutput);

  if (input.empty()) {
    std::cerr << "--input is required\n" << app.help();
    return kExitInput;
  }
  run.inputPath = input;
  run.objective = *parseObjective(objective);
  run.delta = delta;
  run.deltaBar = deltaBar;
  run.rMin = rMin;
  run.solver.backend = backend;
  run.solver.timeLimitSeconds = timeLimit;
  run.solver.nodeLimit = nodeLimit;
  if (!svg.empty()) run.svgPath = svg;
  if (!metrics.empty()) run.metricsPath = metrics;
  if (!routing.empty()) run.routingReportPath = routing;
  if (!sidecar.empty()) run.sidecarPath = sidecar;
  run.execution = serial ? Execution::Serial : Execution::Parallel;
  run.style.labels = labels == "none"  ? LabelPlacement::None
                     : labels == "end"  ? LabelPlacement::End
                     : labels == "both" ? LabelPlacement::Both
                                        : LabelPlacement::Start;

  const RunOutcome outcome = runPipeline(run);
  std::cout << outcome.stdoutText;
  if (!outcome.message.empty()) std::cerr << outcome.message << "\n";
  return outcome.exitCode;
}
