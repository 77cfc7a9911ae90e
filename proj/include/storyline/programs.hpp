#pragma once

#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "storyline/model.hpp"

namespace storyline {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Relation { LessEqual, Equal, GreaterEqual };

struct Variable {
  std::string name;
  double lower = 0.0;
  double upper = kInf;
  bool integral = false;
};

struct Term {
  std::size_t var;
  double coeff;
};

struct Constraint {
  std::string name;
  std::vector<Term> terms;
  Relation relation = Relation::LessEqual;
  double rhs = 0.0;

  double activity(std::span<const double> x) const;
};

/// Minimize  sum_j linear[j]*x_j + sum_j quadratic[j]*x_j^2  subject to linear
/// constraints and variable bounds.
struct OptimizationModel {
  std::vector<Variable> variables;
  std::vector<Constraint> constraints;
  std::vector<double> linear;
  std::vector<double> quadratic;

  std::size_t addVariable(std::string name, double lower, double upper, bool integral = false,
                          double cost = 0.0);
  std::size_t addConstraint(std::string name, std::vector<Term> terms, Relation rel, double rhs);

  std::size_t variableCount() const noexcept { return variables.size(); }
  std::size_t constraintCount() const noexcept { return constraints.size(); }
  bool hasIntegral() const noexcept;
  bool hasQuadratic() const noexcept;
  std::optional<std::size_t> find(std::string_view name) const;

  double objective(std::span<const double> x) const;
  /// Largest violation of any constraint or bound.
  double maxViolation(std::span<const double> x) const;

  /// Throws std::invalid_argument on dangling references, negative quadratic
  /// coefficients, or inverted bounds.
  void validate() const;
};

enum class VarRole { Y, W, Z, D, Height };

struct RoleKey {
  VarRole role;
  Step t = 0;
  CharIndex c = 0;
};

/// Bidirectional map between model variables and their roles.
class VariableIndex {
 public:
  VariableIndex() = default;
  VariableIndex(std::size_t steps, std::size_t characters);

  void bind(std::size_t var, RoleKey key);

  std::optional<std::size_t> yVar(Step t, CharIndex c) const { return lookup(y_, t, c); }
  std::optional<std::size_t> wVar(Step t, CharIndex c) const { return lookup(w_, t, c); }
  std::optional<std::size_t> zVar(Step t, CharIndex c) const { return lookup(z_, t, c); }
  std::optional<std::size_t> dVar(Step t, CharIndex c) const { return lookup(d_, t, c); }
  std::optional<std::size_t> heightVar() const { return height_; }
  const RoleKey& role(std::size_t var) const { return roles_.at(var); }

  std::size_t size() const noexcept { return roles_.size(); }
  std::size_t stepCount() const noexcept { return steps_; }
  std::size_t characterCount() const noexcept { return characters_; }

 private:
  std::optional<std::size_t> lookup(const std::vector<std::size_t>& table, Step t, CharIndex c) const;
  std::vector<std::size_t>& table(VarRole role);

  std::size_t steps_ = 0;
  std::size_t characters_ = 0;
  std::vector<std::size_t> y_, w_, z_, d_;
  std::optional<std::size_t> height_;
  std::vector<RoleKey> roles_;
};

enum class QwhForm {
  Difference,  // free d = y_t - y_{t+1}, objective sum d^2
  Literal,     // w >= +-(y_t - y_{t+1}), objective sum w^2
};

struct ProgramOptions {
  /// Impose y <= Y on the continuous programs too.
  bool boundContinuous = true;
  QwhForm qwhForm = QwhForm::Difference;
  /// Weight of the height variable in the wiggle-count program. Unset means 1/Y.
  std::optional<double> heightWeight;
  /// Characters forced flat: y_{t,c} = y_{t+1,c} on every gap.
  std::vector<CharIndex> flat;
};

struct BuiltProgram {
  OptimizationModel model;
  VariableIndex index;
  double bigY = 0.0;
};

/// Y = max(delta, deltaBar) * sum_t |A(t)|.
double bigY(const OrderedStorylineInstance& inst, const NicenessParams& params);

BuiltProgram buildLwhProgram(const OrderedStorylineInstance& inst, const NicenessParams& params,
                             const ProgramOptions& options = {});
BuiltProgram buildQwhProgram(const OrderedStorylineInstance& inst, const NicenessParams& params,
                             const ProgramOptions& options = {});
/// Throws std::invalid_argument unless delta and deltaBar are integers.
BuiltProgram buildWcProgram(const OrderedStorylineInstance& inst, const NicenessParams& params,
                            const ProgramOptions& options = {});

class ExtractionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Reads the y variables back into a coordination. With `params` given the
/// result must be nice within `tol`, otherwise ExtractionError is thrown.
Coordination extractCoordination(const OrderedStorylineInstance& inst, const VariableIndex& index,
                                 std::span<const double> solution,
                                 const std::optional<NicenessParams>& params = std::nullopt,
                                 double tol = kDefaultNicenessTol);

/// A full variable assignment for `program` matching `coord`: w = |diff|,
/// d = diff, z = [diff != 0], h = max y.
std::vector<double> assignmentFor(const BuiltProgram& program, const Coordination& coord,
                                  double zeroTol = kDefaultZeroTol);

}  // namespace storyline
