// Primal active-set method for  min sum q_j x_j^2 + c^T x  with q >= 0,
// using a null-space step on the working set.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "lp_internal.hpp"

namespace storyline {

namespace {

enum class Origin { RowGe, RowLe, RowEq, Lower, Upper, Fixed };

// n^T x >= beta, or = beta for equalities.
struct Plane {
  std::vector<Term> normal;
  double beta;
  bool equality;
  Origin origin;
  std::size_t source;  // row or variable index

  double residual(const Eigen::VectorXd& x) const {
    double s = -beta;
    for (const auto& t : normal) s += t.coeff * x(static_cast<Eigen::Index>(t.var));
    return s;
  }
  double dot(const Eigen::VectorXd& p) const {
    double s = 0.0;
    for (const auto& t : normal) s += t.coeff * p(static_cast<Eigen::Index>(t.var));
    return s;
  }
};

std::vector<Plane> planes(const OptimizationModel& model) {
  std::vector<Plane> out;
  for (std::size_t i = 0; i < model.constraintCount(); ++i) {
    const auto& con = model.constraints[i];
    switch (con.relation) {
      case Relation::GreaterEqual: out.push_back({con.terms, con.rhs, false, Origin::RowGe, i}); break;
      case Relation::Equal: out.push_back({con.terms, con.rhs, true, Origin::RowEq, i}); break;
      case Relation::LessEqual: {
        std::vector<Term> neg = con.terms;
        for (auto& t : neg) t.coeff = -t.coeff;
        out.push_back({std::move(neg), -con.rhs, false, Origin::RowLe, i});
        break;
      }
    }
  }
  for (std::size_t j = 0; j < model.variableCount(); ++j) {
    const auto& v = model.variables[j];
    if (v.lower == v.upper) {
      out.push_back({{{j, 1.0}}, v.lower, true, Origin::Fixed, j});
      continue;
    }
    if (std::isfinite(v.lower)) out.push_back({{{j, 1.0}}, v.lower, false, Origin::Lower, j});
    if (std::isfinite(v.upper)) out.push_back({{{j, -1.0}}, -v.upper, false, Origin::Upper, j});
  }
  return out;
}

class ActiveSet {
 public:
  ActiveSet(const OptimizationModel& model, const SolverConfig& config,
            std::optional<detail::Clock::time_point> deadline)
      : model_(model), config_(config), deadline_(deadline), planes_(planes(model)),
        n_(static_cast<Eigen::Index>(model.variableCount())) {
    hdiag_.resize(n_);
    c_.resize(n_);
    for (Eigen::Index j = 0; j < n_; ++j) {
      hdiag_(j) = 2.0 * model.quadratic[static_cast<std::size_t>(j)];
      c_(j) = model.linear[static_cast<std::size_t>(j)];
    }
  }

  SolveResult run(Eigen::VectorXd x) {
    SolveResult result;
    x_ = std::move(x);
    inW_.assign(planes_.size(), false);
    for (std::size_t k = 0; k < planes_.size(); ++k)
      if (planes_[k].equality) tryAdd(k);
    for (std::size_t k = 0; k < planes_.size(); ++k)
      if (!planes_[k].equality && std::abs(planes_[k].residual(x_)) <= 1e-9) tryAdd(k);

    const std::size_t limit = config_.iterationLimit.value_or(1000 + 50 * (planes_.size() + static_cast<std::size_t>(n_)));
    std::size_t iterations = 0;
    while (true) {
      if (iterations >= limit) {
        result.status = SolveStatus::IterationLimit;
        break;
      }
      if (deadline_ && detail::Clock::now() > *deadline_) {
        result.status = SolveStatus::TimeLimit;
        break;
      }
      ++iterations;
      const Eigen::VectorXd g = gradient();
      const Eigen::MatrixXd AW = workingMatrix();
      Eigen::VectorXd p = Eigen::VectorXd::Zero(n_);
      bool unboundedStep = false;

      const Eigen::Index k = AW.rows();
      if (k < n_) {
        Eigen::MatrixXd Z;
        if (k == 0) {
          Z = Eigen::MatrixXd::Identity(n_, n_);
        } else {
          Eigen::HouseholderQR<Eigen::MatrixXd> qr(AW.transpose());
          const Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(n_, n_);
          Z = Q.rightCols(n_ - k);
        }
        const Eigen::VectorXd gz = Z.transpose() * g;
        const Eigen::MatrixXd Hz = Z.transpose() * hdiag_.asDiagonal() * Z;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(Hz);
        const Eigen::VectorXd& lam = eig.eigenvalues();
        const Eigen::MatrixXd& V = eig.eigenvectors();
        const double lamMax = std::max(1.0, lam.cwiseAbs().maxCoeff());
        Eigen::VectorXd flat = Eigen::VectorXd::Zero(gz.size());
        Eigen::VectorXd newton = Eigen::VectorXd::Zero(gz.size());
        for (Eigen::Index e = 0; e < lam.size(); ++e) {
          const double proj = V.col(e).dot(gz);
          if (lam(e) <= 1e-10 * lamMax) flat += proj * V.col(e);
          else newton -= (proj / lam(e)) * V.col(e);
        }
        const double scale = 1.0 + g.cwiseAbs().maxCoeff();
        if (flat.norm() > 1e-10 * scale) {
          p = -(Z * flat);
          unboundedStep = true;
        } else {
          p = Z * newton;
        }
      }

      if (p.cwiseAbs().maxCoeff() <= 1e-12 * (1.0 + x_.cwiseAbs().maxCoeff()) || n_ == 0) {
        // Stationary on the working set: check multipliers.
        const Eigen::VectorXd lambda = multipliers(AW, g);
        const double tol = 1e-9 * (1.0 + g.cwiseAbs().maxCoeff());
        std::size_t drop = working_.size();
        double worst = -tol;
        for (std::size_t w = 0; w < working_.size(); ++w) {
          if (planes_[working_[w]].equality) continue;
          const double l = lambda(static_cast<Eigen::Index>(w));
          if (l < worst || (l == worst && drop < working_.size() && working_[w] < working_[drop])) {
            worst = l;
            drop = w;
          }
        }
        if (drop == working_.size()) {
          finish(result, lambda);
          break;
        }
        inW_[working_[drop]] = false;
        working_.erase(working_.begin() + static_cast<std::ptrdiff_t>(drop));
        continue;
      }

      double alpha = unboundedStep ? kInf : 1.0;
      std::size_t block = planes_.size();
      for (std::size_t pl = 0; pl < planes_.size(); ++pl) {
        if (inW_[pl] || planes_[pl].equality) continue;
        const double s = planes_[pl].dot(p);
        if (s >= -1e-12) continue;
        const double a = std::max(0.0, planes_[pl].residual(x_)) / -s;
        if (a < alpha) {
          alpha = a;
          block = pl;
        }
      }
      if (!std::isfinite(alpha)) {
        result.status = SolveStatus::Unbounded;
        break;
      }
      x_ += alpha * p;
      if (block < planes_.size()) {
        inW_[block] = true;
        working_.push_back(block);
      }
    }
    result.stats.iterations = iterations;
    return result;
  }

 private:
  Eigen::VectorXd gradient() const { return hdiag_.cwiseProduct(x_) + c_; }

  Eigen::MatrixXd workingMatrix() const {
    Eigen::MatrixXd AW = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(working_.size()), n_);
    for (std::size_t w = 0; w < working_.size(); ++w)
      for (const auto& t : planes_[working_[w]].normal)
        AW(static_cast<Eigen::Index>(w), static_cast<Eigen::Index>(t.var)) += t.coeff;
    return AW;
  }

  void tryAdd(std::size_t k) {
    working_.push_back(k);
    const Eigen::MatrixXd AW = workingMatrix();
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(AW.transpose());
    qr.setThreshold(1e-10);
    if (qr.rank() < AW.rows()) {
      working_.pop_back();
      return;
    }
    inW_[k] = true;
  }

  Eigen::VectorXd multipliers(const Eigen::MatrixXd& AW, const Eigen::VectorXd& g) const {
    if (AW.rows() == 0) return Eigen::VectorXd();
    return AW.transpose().colPivHouseholderQr().solve(g);
  }

  void finish(SolveResult& result, const Eigen::VectorXd& lambda) const {
    result.status = SolveStatus::Optimal;
    result.assignment.assign(x_.data(), x_.data() + n_);
    result.objectiveValue = model_.objective(result.assignment);
    result.bestBound = result.objectiveValue;
    result.rowDuals.assign(model_.constraintCount(), 0.0);
    result.boundDuals.assign(model_.variableCount(), 0.0);
    for (std::size_t w = 0; w < working_.size(); ++w) {
      const Plane& pl = planes_[working_[w]];
      const double l = lambda(static_cast<Eigen::Index>(w));
      switch (pl.origin) {
        case Origin::RowGe:
        case Origin::RowEq: result.rowDuals[pl.source] += l; break;
        case Origin::RowLe: result.rowDuals[pl.source] -= l; break;
        case Origin::Lower:
        case Origin::Fixed: result.boundDuals[pl.source] += l; break;
        case Origin::Upper: result.boundDuals[pl.source] -= l; break;
      }
    }
  }

  const OptimizationModel& model_;
  const SolverConfig& config_;
  std::optional<detail::Clock::time_point> deadline_;
  std::vector<Plane> planes_;
  Eigen::Index n_;
  Eigen::VectorXd hdiag_, c_, x_;
  std::vector<std::size_t> working_;
  std::vector<bool> inW_;
};

}  // namespace

SolveResult solveQp(const OptimizationModel& model, const SolverConfig& config, std::span<const double> start) {
  config.validate();
  model.validate();
  if (model.hasIntegral()) throw std::invalid_argument("solveQp: model has integral variables");
  const auto t0 = detail::Clock::now();
  const auto deadline = detail::deadlineFor(config, t0);
  const auto n = model.variableCount();

  std::vector<double> x0;
  std::size_t phase1Iterations = 0;
  if (start.size() == n && model.maxViolation(start) <= config.feasibilityTol) {
    x0.assign(start.begin(), start.end());
  } else {
    if (!start.empty() && start.size() != n) throw std::invalid_argument("solveQp: start point has wrong size");
    OptimizationModel feas = model;
    std::fill(feas.linear.begin(), feas.linear.end(), 0.0);
    std::vector<double> lo, hi;
    for (const auto& v : model.variables) {
      lo.push_back(v.lower);
      hi.push_back(v.upper);
    }
    SolveResult phase1 = detail::simplex(feas, lo, hi, config, deadline);
    phase1Iterations = phase1.stats.iterations;
    if (phase1.status != SolveStatus::Optimal) {
      phase1.stats.wallSeconds = detail::secondsSince(t0);
      phase1.rowDuals.clear();
      phase1.boundDuals.clear();
      phase1.assignment.clear();
      return phase1;
    }
    x0 = std::move(phase1.assignment);
  }

  ActiveSet solver(model, config, deadline);
  SolveResult result = solver.run(Eigen::Map<const Eigen::VectorXd>(x0.data(), static_cast<Eigen::Index>(n)));
  result.stats.iterations += phase1Iterations;
  result.stats.wallSeconds = detail::secondsSince(t0);
  return result;
}

double KktResiduals::max() const noexcept {
  return std::max({stationarity, primal, dual, complementarity});
}

KktResiduals kktResiduals(const OptimizationModel& model, const SolveResult& result) {
  KktResiduals r;
  const auto n = model.variableCount();
  const auto m = model.constraintCount();
  const auto& x = result.assignment;
  if (x.size() != n) throw std::invalid_argument("kktResiduals: result has no assignment");
  std::vector<double> y = result.rowDuals, mu = result.boundDuals;
  y.resize(m, 0.0);
  mu.resize(n, 0.0);

  std::vector<double> station(n);
  for (std::size_t j = 0; j < n; ++j) station[j] = model.linear[j] + 2.0 * model.quadratic[j] * x[j] - mu[j];
  for (std::size_t i = 0; i < m; ++i)
    for (const auto& t : model.constraints[i].terms) station[t.var] -= t.coeff * y[i];
  for (double s : station) r.stationarity = std::max(r.stationarity, std::abs(s));

  r.primal = model.maxViolation(x);

  for (std::size_t i = 0; i < m; ++i) {
    const auto& con = model.constraints[i];
    const double slack = con.activity(x) - con.rhs;
    switch (con.relation) {
      case Relation::GreaterEqual: r.dual = std::max(r.dual, -y[i]); break;
      case Relation::LessEqual: r.dual = std::max(r.dual, y[i]); break;
      case Relation::Equal: continue;
    }
    r.complementarity = std::max(r.complementarity, std::abs(y[i] * slack));
  }
  for (std::size_t j = 0; j < n; ++j) {
    const auto& v = model.variables[j];
    if (v.lower == v.upper) continue;
    if (mu[j] > 0.0) {
      if (!std::isfinite(v.lower)) r.dual = std::max(r.dual, mu[j]);
      else r.complementarity = std::max(r.complementarity, mu[j] * std::abs(x[j] - v.lower));
    } else if (mu[j] < 0.0) {
      if (!std::isfinite(v.upper)) r.dual = std::max(r.dual, -mu[j]);
      else r.complementarity = std::max(r.complementarity, -mu[j] * std::abs(v.upper - x[j]));
    }
  }
  return r;
}

}  // namespace storyline
