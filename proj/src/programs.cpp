#include "storyline/programs.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace storyline {

namespace {

constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

std::string varName(char prefix, Step t, CharIndex c) {
  return std::string(1, prefix) + "_" + std::to_string(t + 1) + "_" + std::to_string(c);
}

std::string pairName(const char* prefix, Step t, CharIndex a, CharIndex b) {
  return std::string(prefix) + "_" + std::to_string(t + 1) + "_" + std::to_string(a) + "_" + std::to_string(b);
}

// y variables plus the spacing constraints shared by all three programs.
BuiltProgram spacingProgram(const OrderedStorylineInstance& inst, const NicenessParams& params,
                            double yUpper, bool integral) {
  params.validate();
  BuiltProgram p;
  p.bigY = bigY(inst, params);
  p.index = VariableIndex(inst.stepCount(), inst.characterCount());
  for (Step t = 0; t < inst.stepCount(); ++t) {
    for (CharIndex c : inst.ordering(t)) {
      const auto v = p.model.addVariable(varName('y', t, c), 0.0, yUpper, integral);
      p.index.bind(v, {VarRole::Y, t, c});
    }
  }
  for (Step t = 0; t < inst.stepCount(); ++t) {
    const auto sets = neighborSets(inst, t);
    for (const auto& [lo, hi] : sets.all) {
      const bool meeting = inst.shareMeeting(t, lo, hi);
      p.model.addConstraint(pairName(meeting ? "md" : "fd", t, lo, hi),
                            {{*p.index.yVar(t, hi), 1.0}, {*p.index.yVar(t, lo), -1.0}},
                            meeting ? Relation::Equal : Relation::GreaterEqual,
                            meeting ? params.delta : params.deltaBar);
    }
  }
  return p;
}

void addFlatConstraints(BuiltProgram& p, const OrderedStorylineInstance& inst,
                        const std::vector<CharIndex>& flat) {
  for (CharIndex c : flat) {
    if (c >= inst.characterCount()) throw std::invalid_argument("flat character out of range");
    for (Step t = 0; t + 1 < inst.stepCount(); ++t) {
      if (!inst.isActive(t, c) || !inst.isActive(t + 1, c)) continue;
      p.model.addConstraint(varName('f', t, c),
                            {{*p.index.yVar(t, c), 1.0}, {*p.index.yVar(t + 1, c), -1.0}}, Relation::Equal, 0.0);
    }
  }
}

// w >= y_t - y_{t+1} and w >= y_{t+1} - y_t.
void addWiggleBounds(BuiltProgram& p, const OrderedStorylineInstance& inst, double cost, double quad) {
  for (Step t = 0; t + 1 < inst.stepCount(); ++t) {
    for (CharIndex c : inst.sharedCharacters(t)) {
      const auto w = p.model.addVariable(varName('w', t, c), 0.0, kInf, false, cost);
      p.model.quadratic[w] = quad;
      p.index.bind(w, {VarRole::W, t, c});
      const auto y0 = *p.index.yVar(t, c);
      const auto y1 = *p.index.yVar(t + 1, c);
      p.model.addConstraint(varName('a', t, c), {{y0, 1.0}, {y1, -1.0}, {w, -1.0}}, Relation::LessEqual, 0.0);
      p.model.addConstraint(varName('b', t, c), {{y1, 1.0}, {y0, -1.0}, {w, -1.0}}, Relation::LessEqual, 0.0);
    }
  }
}

}  // namespace

double Constraint::activity(std::span<const double> x) const {
  double s = 0.0;
  for (const auto& term : terms) s += term.coeff * x[term.var];
  return s;
}

std::size_t OptimizationModel::addVariable(std::string name, double lower, double upper, bool integral,
                                           double cost) {
  variables.push_back({std::move(name), lower, upper, integral});
  linear.push_back(cost);
  quadratic.push_back(0.0);
  return variables.size() - 1;
}

std::size_t OptimizationModel::addConstraint(std::string name, std::vector<Term> terms, Relation rel,
                                             double rhs) {
  constraints.push_back({std::move(name), std::move(terms), rel, rhs});
  return constraints.size() - 1;
}

bool OptimizationModel::hasIntegral() const noexcept {
  return std::any_of(variables.begin(), variables.end(), [](const Variable& v) { return v.integral; });
}

bool OptimizationModel::hasQuadratic() const noexcept {
  return std::any_of(quadratic.begin(), quadratic.end(), [](double q) { return q != 0.0; });
}

std::optional<std::size_t> OptimizationModel::find(std::string_view name) const {
  for (std::size_t j = 0; j < variables.size(); ++j)
    if (variables[j].name == name) return j;
  return std::nullopt;
}

double OptimizationModel::objective(std::span<const double> x) const {
  double s = 0.0;
  for (std::size_t j = 0; j < variables.size(); ++j) s += linear[j] * x[j] + quadratic[j] * x[j] * x[j];
  return s;
}

double OptimizationModel::maxViolation(std::span<const double> x) const {
  double worst = 0.0;
  for (std::size_t j = 0; j < variables.size(); ++j) {
    worst = std::max(worst, variables[j].lower - x[j]);
    worst = std::max(worst, x[j] - variables[j].upper);
  }
  for (const auto& con : constraints) {
    const double a = con.activity(x);
    switch (con.relation) {
      case Relation::LessEqual: worst = std::max(worst, a - con.rhs); break;
      case Relation::GreaterEqual: worst = std::max(worst, con.rhs - a); break;
      case Relation::Equal: worst = std::max(worst, std::abs(a - con.rhs)); break;
    }
  }
  return worst;
}

void OptimizationModel::validate() const {
  const std::size_t n = variables.size();
  if (linear.size() != n || quadratic.size() != n)
    throw std::invalid_argument("objective size does not match variable count");
  for (std::size_t j = 0; j < n; ++j) {
    if (quadratic[j] < 0.0) throw std::invalid_argument("negative quadratic coefficient on " + variables[j].name);
    if (variables[j].lower > variables[j].upper)
      throw std::invalid_argument("inverted bounds on " + variables[j].name);
  }
  for (const auto& con : constraints)
    for (const auto& term : con.terms)
      if (term.var >= n) throw std::invalid_argument("constraint " + con.name + " references unknown variable");
}

VariableIndex::VariableIndex(std::size_t steps, std::size_t characters)
    : steps_(steps), characters_(characters), y_(steps * characters, npos), w_(y_), z_(y_), d_(y_) {}

std::vector<std::size_t>& VariableIndex::table(VarRole role) {
  switch (role) {
    case VarRole::Y: return y_;
    case VarRole::W: return w_;
    case VarRole::Z: return z_;
    case VarRole::D: return d_;
    case VarRole::Height: break;
  }
  throw std::logic_error("no table for height");
}

void VariableIndex::bind(std::size_t var, RoleKey key) {
  if (var != roles_.size()) throw std::logic_error("variables must be bound in declaration order");
  if (key.role == VarRole::Height) {
    if (height_) throw std::logic_error("height variable bound twice");
    height_ = var;
  } else {
    auto& slot = table(key.role).at(key.t * characters_ + key.c);
    if (slot != npos) throw std::logic_error("role bound twice");
    slot = var;
  }
  roles_.push_back(key);
}

std::optional<std::size_t> VariableIndex::lookup(const std::vector<std::size_t>& table, Step t,
                                                 CharIndex c) const {
  if (t >= steps_ || c >= characters_) return std::nullopt;
  const auto v = table[t * characters_ + c];
  if (v == npos) return std::nullopt;
  return v;
}

double bigY(const OrderedStorylineInstance& inst, const NicenessParams& params) {
  return params.maxSpacing() * static_cast<double>(inst.activePairCount());
}

BuiltProgram buildLwhProgram(const OrderedStorylineInstance& inst, const NicenessParams& params,
                             const ProgramOptions& options) {
  const double Y = bigY(inst, params);
  BuiltProgram p = spacingProgram(inst, params, options.boundContinuous ? Y : kInf, false);
  addWiggleBounds(p, inst, 1.0, 0.0);
  addFlatConstraints(p, inst, options.flat);
  return p;
}

BuiltProgram buildQwhProgram(const OrderedStorylineInstance& inst, const NicenessParams& params,
                             const ProgramOptions& options) {
  const double Y = bigY(inst, params);
  BuiltProgram p = spacingProgram(inst, params, options.boundContinuous ? Y : kInf, false);
  if (options.qwhForm == QwhForm::Literal) {
    addWiggleBounds(p, inst, 0.0, 1.0);
  } else {
    for (Step t = 0; t + 1 < inst.stepCount(); ++t) {
      for (CharIndex c : inst.sharedCharacters(t)) {
        const auto d = p.model.addVariable(varName('d', t, c), -kInf, kInf);
        p.model.quadratic[d] = 1.0;
        p.index.bind(d, {VarRole::D, t, c});
        p.model.addConstraint(varName('e', t, c),
                              {{d, 1.0}, {*p.index.yVar(t, c), -1.0}, {*p.index.yVar(t + 1, c), 1.0}},
                              Relation::Equal, 0.0);
      }
    }
  }
  addFlatConstraints(p, inst, options.flat);
  return p;
}

BuiltProgram buildWcProgram(const OrderedStorylineInstance& inst, const NicenessParams& params,
                            const ProgramOptions& options) {
  params.validate();
  if (!params.integral()) throw std::invalid_argument("wiggle-count program requires integer delta and deltaBar");
  const double Y = bigY(inst, params);
  BuiltProgram p = spacingProgram(inst, params, std::max(0.0, Y - 1.0), true);
  for (Step t = 0; t + 1 < inst.stepCount(); ++t) {
    for (CharIndex c : inst.sharedCharacters(t)) {
      const auto z = p.model.addVariable(varName('z', t, c), 0.0, 1.0, true, 1.0);
      p.index.bind(z, {VarRole::Z, t, c});
      const auto y0 = *p.index.yVar(t, c);
      const auto y1 = *p.index.yVar(t + 1, c);
      p.model.addConstraint(varName('m', t, c), {{y0, 1.0}, {z, Y}, {y1, -1.0}}, Relation::GreaterEqual, 0.0);
      p.model.addConstraint(varName('n', t, c), {{y0, 1.0}, {z, -Y}, {y1, -1.0}}, Relation::LessEqual, 0.0);
    }
  }
  const double weight = options.heightWeight.value_or(Y > 0.0 ? 1.0 / Y : 0.0);
  const auto h = p.model.addVariable("h", 0.0, std::max(0.0, Y - 1.0), false, weight);
  p.index.bind(h, {VarRole::Height});
  for (Step t = 0; t < inst.stepCount(); ++t)
    for (CharIndex c : inst.ordering(t))
      p.model.addConstraint(varName('h', t, c), {{*p.index.yVar(t, c), 1.0}, {h, -1.0}}, Relation::LessEqual, 0.0);
  addFlatConstraints(p, inst, options.flat);
  return p;
}

Coordination extractCoordination(const OrderedStorylineInstance& inst, const VariableIndex& index,
                                 std::span<const double> solution, const std::optional<NicenessParams>& params,
                                 double tol) {
  if (solution.size() < index.size()) throw ExtractionError("solution does not assign every variable");
  Coordination coord(inst.stepCount(), inst.characterCount());
  for (Step t = 0; t < inst.stepCount(); ++t) {
    for (CharIndex c : inst.ordering(t)) {
      const auto v = index.yVar(t, c);
      if (!v) throw ExtractionError("no y variable for " + inst.character(c).id + " at step " + std::to_string(t + 1));
      const double y = solution[*v];
      if (!std::isfinite(y)) throw ExtractionError("missing assignment for " + inst.character(c).id);
      coord.at(t, c) = y;
    }
  }
  if (params) {
    const auto report = isNice(inst, coord, *params, tol);
    if (!report.nice) throw ExtractionError("solution is not nice: " + describe(report.violations.front(), inst));
  }
  return coord;
}

std::vector<double> assignmentFor(const BuiltProgram& program, const Coordination& coord, double zeroTol) {
  const auto& index = program.index;
  std::vector<double> x(program.model.variableCount(), 0.0);
  double top = 0.0;
  for (std::size_t v = 0; v < index.size(); ++v) {
    const RoleKey& key = index.role(v);
    switch (key.role) {
      case VarRole::Y:
        x[v] = coord(key.t, key.c);
        top = std::max(top, x[v]);
        break;
      case VarRole::W: x[v] = std::abs(coord(key.t, key.c) - coord(key.t + 1, key.c)); break;
      case VarRole::D: x[v] = coord(key.t, key.c) - coord(key.t + 1, key.c); break;
      case VarRole::Z: x[v] = std::abs(coord(key.t, key.c) - coord(key.t + 1, key.c)) > zeroTol ? 1.0 : 0.0; break;
      case VarRole::Height: break;
    }
  }
  if (auto h = index.heightVar()) x[*h] = top;
  return x;
}

}  // namespace storyline
