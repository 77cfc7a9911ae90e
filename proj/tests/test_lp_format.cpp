#include "doctest.h"
#include "storyline/lp_format.hpp"
#include "storyline/programs.hpp"
#include "support.hpp"

using namespace storyline;

namespace {

void checkSameModel(const OptimizationModel& a, const OptimizationModel& b) {
  REQUIRE(a.variableCount() == b.variableCount());
  REQUIRE(a.constraintCount() == b.constraintCount());
  for (std::size_t j = 0; j < a.variableCount(); ++j) {
    const auto k = b.find(a.variables[j].name);
    REQUIRE(k.has_value());
    CHECK(a.variables[j].lower == b.variables[*k].lower);
    CHECK(a.variables[j].upper == b.variables[*k].upper);
    CHECK(a.variables[j].integral == b.variables[*k].integral);
    CHECK(a.linear[j] == doctest::Approx(b.linear[*k]));
    CHECK(a.quadratic[j] == doctest::Approx(b.quadratic[*k]));
  }
}

}  // namespace

TEST_CASE("lp file round trip") {
  testing::Rng rng(9);
  for (int i = 0; i < 20; ++i) {
    const auto inst = testing::randomInstance(rng, {1, 4, 1, 4, 2, false});
    for (const auto& p : {buildLwhProgram(inst, {}), buildQwhProgram(inst, {}), buildWcProgram(inst, {})}) {
      const auto text = writeLpFile(p.model);
      const auto back = readLpFile(text);
      checkSameModel(p.model, back);
      CHECK(writeLpFile(back) == text);
      const auto a = solve(p.model);
      const auto b = solve(back);
      CHECK(a.status == b.status);
      CHECK(a.objectiveValue == doctest::Approx(b.objectiveValue).epsilon(1e-9));
    }
  }
}

TEST_CASE("lp file sections") {
  OptimizationModel m;
  const auto x = m.addVariable("x", 0, 10, true, 1.0);
  const auto y = m.addVariable("y", -kInf, kInf, false, 0.0);
  m.quadratic[y] = 1.5;
  m.addConstraint("c1", {{x, 1.0}, {y, -2.0}}, Relation::GreaterEqual, 3.0);
  const auto text = writeLpFile(m);
  for (const char* s : {"Minimize", "Subject To", "Bounds", "General", "End", "[ 3 y ^2 ] / 2", "y free"})
    CHECK_MESSAGE(text.find(s) != std::string::npos, s);
  const auto back = readLpFile(text);
  CHECK(back.quadratic[*back.find("y")] == doctest::Approx(1.5));
  CHECK(back.constraints[0].relation == Relation::GreaterEqual);
  CHECK(back.constraints[0].rhs == 3.0);
}

TEST_CASE("binary section") {
  const auto text = "Minimize\n obj: z\nSubject To\n c: z >= 0.5\nBinary\n z\nEnd\n";
  const auto m = readLpFile(text);
  REQUIRE(m.variableCount() == 1);
  CHECK(m.variables[0].integral);
  CHECK(m.variables[0].upper == 1.0);
  CHECK(solve(m).objectiveValue == doctest::Approx(1.0));
}

TEST_CASE("malformed lp files name the line") {
  CHECK_THROWS_WITH(readLpFile("x + y\n"), doctest::Contains("line 1"));
  CHECK_THROWS_WITH(readLpFile("Minimize\n obj: x\nSubject To\n c: x >= >= 1\nEnd\n"), doctest::Contains("line 4"));
}

TEST_CASE("solution files") {
  const auto p = buildLwhProgram(testing::crossingPair(), {});
  const auto r = solveLp(p.model);
  const auto sol = readSolutionFile(writeSolutionFile(p.model, r));
  REQUIRE(sol.objective.has_value());
  CHECK(*sol.objective == doctest::Approx(r.objectiveValue));
  CHECK(sol.status == SolveStatus::Optimal);
  CHECK(sol.values.size() == p.model.variableCount());
  for (std::size_t j = 0; j < p.model.variableCount(); ++j)
    CHECK(sol.values.at(p.model.variables[j].name) == doctest::Approx(r.assignment[j]));
  for (auto s : {SolveStatus::Optimal, SolveStatus::Infeasible, SolveStatus::Unbounded, SolveStatus::IterationLimit,
                 SolveStatus::TimeLimit})
    CHECK(parseStatus(statusName(s)) == s);
  CHECK_FALSE(parseStatus("nonsense").has_value());
}
