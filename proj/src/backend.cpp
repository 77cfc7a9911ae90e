#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unistd.h>

#include "lp_internal.hpp"
#include "storyline/lp_format.hpp"
#include "storyline/solver.hpp"

namespace storyline {

std::string_view statusName(SolveStatus status) {
  switch (status) {
    case SolveStatus::Optimal: return "Optimal";
    case SolveStatus::Infeasible: return "Infeasible";
    case SolveStatus::Unbounded: return "Unbounded";
    case SolveStatus::IterationLimit: return "IterationLimit";
    case SolveStatus::TimeLimit: return "TimeLimit";
  }
  return "Unknown";
}

void SolverConfig::validate() const {
  if (!(feasibilityTol > 0.0) || !(optimalityTol > 0.0) || !(integralityTol > 0.0))
    throw std::invalid_argument("solver tolerances must be positive");
  if (timeLimitSeconds && !(*timeLimitSeconds >= 0.0)) throw std::invalid_argument("time limit must be nonnegative");
}

SolveResult BuiltinBackend::solve(const OptimizationModel& model, const SolverConfig& config,
                                  std::span<const double> start) {
  if (model.hasIntegral()) return solveIlp(model, config);
  if (model.hasQuadratic()) return solveQp(model, config, start);
  return solveLp(model, config);
}

ExternalBackend::ExternalBackend(std::string commandTemplate) : command_(std::move(commandTemplate)) {
  if (command_.empty()) throw std::invalid_argument("external backend needs a command");
}

namespace {

std::string replaceAll(std::string s, const std::string& from, const std::string& to) {
  for (std::size_t pos = s.find(from); pos != std::string::npos; pos = s.find(from, pos + to.size()))
    s.replace(pos, from.size(), to);
  return s;
}

std::string quoted(const std::filesystem::path& p) { return "'" + replaceAll(p.string(), "'", "'\\''") + "'"; }

}  // namespace

SolveResult ExternalBackend::solve(const OptimizationModel& model, const SolverConfig& config,
                                   std::span<const double>) {
  config.validate();
  static std::atomic<unsigned> counter{0};
  const auto t0 = detail::Clock::now();
  const auto dir = std::filesystem::temp_directory_path() /
                   ("storyline-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
  std::filesystem::create_directories(dir);
  const auto lp = dir / "model.lp";
  const auto sol = dir / "model.sol";
  {
    std::ofstream out(lp, std::ios::binary);
    out << writeLpFile(model);
  }
  std::string cmd = command_;
  if (cmd.find("{lp}") == std::string::npos && cmd.find("{sol}") == std::string::npos) cmd += " {lp} {sol}";
  cmd = replaceAll(replaceAll(cmd, "{lp}", quoted(lp)), "{sol}", quoted(sol));
  const int rc = std::system(cmd.c_str());

  SolveResult result;
  std::ifstream in(sol, std::ios::binary);
  if (!in) {
    std::filesystem::remove_all(dir);
    throw std::runtime_error("external solver wrote no solution (exit status " + std::to_string(rc) + ")");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  const SolutionFile file = readSolutionFile(buf.str());
  std::filesystem::remove_all(dir);

  result.status = file.status.value_or(file.values.empty() ? SolveStatus::Infeasible : SolveStatus::Optimal);
  if (!file.values.empty()) {
    result.assignment.resize(model.variableCount());
    for (std::size_t j = 0; j < model.variableCount(); ++j) {
      auto it = file.values.find(model.variables[j].name);
      if (it == file.values.end()) throw std::runtime_error("external solution misses " + model.variables[j].name);
      result.assignment[j] = it->second;
    }
    result.objectiveValue = model.objective(result.assignment);
    result.bestBound = result.objectiveValue;
  }
  result.stats.wallSeconds = detail::secondsSince(t0);
  return result;
}

std::unique_ptr<SolverBackend> makeBackend(std::string_view name) {
  std::string chosen(name);
  if (chosen.empty()) {
    const char* env = std::getenv(kSolverEnv);
    chosen = env && *env ? env : "builtin";
  }
  if (chosen == "builtin") return std::make_unique<BuiltinBackend>();
  if (chosen == "external") {
    const char* cmd = std::getenv(kSolverCommandEnv);
    if (!cmd || !*cmd) throw std::invalid_argument(std::string("external backend requires ") + kSolverCommandEnv);
    return std::make_unique<ExternalBackend>(cmd);
  }
  throw std::invalid_argument("unknown solver backend '" + chosen + "'");
}

SolveResult solve(const OptimizationModel& model, const SolverConfig& config, std::span<const double> start) {
  auto backend = makeBackend(config.backend);
  return backend->solve(model, config, start);
}

}  // namespace storyline
