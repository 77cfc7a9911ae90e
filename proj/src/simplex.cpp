// Dense bounded-variable primal simplex.
//
// Rows a_i x = s_i with the slack s_i carrying the row's bounds. Artificials are
// added only for rows whose slack starts infeasible; phase 1 drives their sum
// to zero, after which they are fixed at 0.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "lp_internal.hpp"

namespace storyline {

namespace detail {

namespace {

constexpr double kPivotTol = 1e-9;
constexpr double kDropTol = 1e-13;
constexpr double kTieTol = 1e-12;
constexpr std::size_t kBlandAfter = 50;

enum class Status : unsigned char { Lower, Upper, Zero, Basic };

class Tableau {
 public:
  Tableau(const OptimizationModel& model, std::span<const double> lower, std::span<const double> upper,
          const SolverConfig& config, std::optional<Clock::time_point> deadline)
      : model_(model), config_(config), deadline_(deadline) {
    n_ = model.variableCount();
    m_ = model.constraintCount();
    lo_.assign(lower.begin(), lower.end());
    hi_.assign(upper.begin(), upper.end());
    cost_.assign(model.linear.begin(), model.linear.end());
    A_ = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m_), static_cast<Eigen::Index>(n_));
    for (std::size_t i = 0; i < m_; ++i) {
      const auto& con = model.constraints[i];
      for (const auto& term : con.terms) A_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(term.var)) += term.coeff;
      double l = -kInf, u = kInf;
      switch (con.relation) {
        case Relation::LessEqual: u = con.rhs; break;
        case Relation::GreaterEqual: l = con.rhs; break;
        case Relation::Equal: l = u = con.rhs; break;
      }
      lo_.push_back(l);
      hi_.push_back(u);
      cost_.push_back(0.0);
    }
  }

  SolveResult run() {
    SolveResult result;
    for (std::size_t j = 0; j < n_; ++j) {
      if (lo_[j] > hi_[j] + config_.feasibilityTol) {
        result.status = SolveStatus::Infeasible;
        return result;
      }
    }
    initialise();
    const std::size_t limit = config_.iterationLimit.value_or(1000 + 200 * (m_ + n_ + artificials_));

    if (artificials_ > 0) {
      std::vector<double> phase1(total_, 0.0);
      for (std::size_t j = n_ + m_; j < total_; ++j) phase1[j] = 1.0;
      const auto status = iterate(phase1, limit);
      result.stats.iterations = iterations_;
      if (status) {
        result.status = *status == SolveStatus::Unbounded ? SolveStatus::Infeasible : *status;
        return result;
      }
      double infeasibility = 0.0;
      for (std::size_t i = 0; i < m_; ++i)
        if (basis_[i] >= n_ + m_) infeasibility += value_[basis_[i]];
      for (std::size_t j = n_ + m_; j < total_; ++j)
        if (status_[j] != Status::Basic) infeasibility += value_[j];
      if (infeasibility > config_.feasibilityTol * std::max<double>(1.0, static_cast<double>(m_))) {
        result.status = SolveStatus::Infeasible;
        return result;
      }
      for (std::size_t j = n_ + m_; j < total_; ++j) {
        lo_[j] = hi_[j] = 0.0;
        if (status_[j] != Status::Basic) value_[j] = 0.0;
      }
    }

    const auto status = iterate(cost_, limit);
    result.stats.iterations = iterations_;
    if (status) {
      result.status = *status;
      return result;
    }
    refine();
    result.status = SolveStatus::Optimal;
    result.assignment.assign(value_.begin(), value_.begin() + static_cast<std::ptrdiff_t>(n_));
    result.objectiveValue = 0.0;
    for (std::size_t j = 0; j < n_; ++j) result.objectiveValue += model_.linear[j] * result.assignment[j];
    duals(result);
    return result;
  }

 private:
  double column(std::size_t i, std::size_t j) const {
    const auto ii = static_cast<Eigen::Index>(i);
    if (j < n_) return A_(ii, static_cast<Eigen::Index>(j));
    if (j < n_ + m_) return j - n_ == i ? -1.0 : 0.0;
    return artRow_[j - n_ - m_] == i ? artSign_[j - n_ - m_] : 0.0;
  }

  void initialise() {
    status_.assign(n_ + m_, Status::Lower);
    value_.assign(n_ + m_, 0.0);
    for (std::size_t j = 0; j < n_; ++j) placeAtBound(j);

    std::vector<double> activity(m_, 0.0);
    for (std::size_t i = 0; i < m_; ++i)
      for (std::size_t j = 0; j < n_; ++j) activity[i] += A_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) * value_[j];

    basis_.assign(m_, 0);
    for (std::size_t i = 0; i < m_; ++i) {
      const std::size_t s = n_ + i;
      const double r = activity[i];
      if (r >= lo_[s] - config_.feasibilityTol && r <= hi_[s] + config_.feasibilityTol) {
        basis_[i] = s;
        status_[s] = Status::Basic;
        value_[s] = r;
        continue;
      }
      const double target = r < lo_[s] ? lo_[s] : hi_[s];
      status_[s] = r < lo_[s] ? Status::Lower : Status::Upper;
      value_[s] = target;
      artRow_.push_back(i);
      // a_i x - s_i + sign * art = 0 with art = |target - r| >= 0.
      artSign_.push_back(target > r ? 1.0 : -1.0);
      const std::size_t art = n_ + m_ + artificials_++;
      basis_[i] = art;
      status_.push_back(Status::Basic);
      value_.push_back(std::abs(target - r));
      lo_.push_back(0.0);
      hi_.push_back(kInf);
      cost_.push_back(0.0);
    }
    total_ = n_ + m_ + artificials_;

    // T = B^{-1} [A -I art]; B is diagonal (-1 for slacks, sign for artificials).
    T_ = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m_), static_cast<Eigen::Index>(total_));
    for (std::size_t i = 0; i < m_; ++i) {
      const double scale = 1.0 / column(i, basis_[i]);
      for (std::size_t j = 0; j < total_; ++j) {
        const double v = column(i, j);
        if (v != 0.0) T_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v * scale;
      }
    }
  }

  void placeAtBound(std::size_t j) {
    if (std::isfinite(lo_[j])) {
      status_[j] = Status::Lower;
      value_[j] = lo_[j];
    } else if (std::isfinite(hi_[j])) {
      status_[j] = Status::Upper;
      value_[j] = hi_[j];
    } else {
      status_[j] = Status::Zero;
      value_[j] = 0.0;
    }
  }

  // Returns a terminal non-optimal status, or nullopt once optimal.
  std::optional<SolveStatus> iterate(const std::vector<double>& cost, std::size_t limit) {
    Eigen::VectorXd d(static_cast<Eigen::Index>(total_));
    for (std::size_t j = 0; j < total_; ++j) {
      double v = cost[j];
      for (std::size_t i = 0; i < m_; ++i) v -= cost[basis_[i]] * T_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      d(static_cast<Eigen::Index>(j)) = status_[j] == Status::Basic ? 0.0 : v;
    }
    std::vector<double> weight(total_, 1.0);
    std::size_t degenerate = 0;
    bool bland = false;

    while (true) {
      if (iterations_ >= limit) return SolveStatus::IterationLimit;
      if (deadline_ && (iterations_ & 63) == 0 && Clock::now() > *deadline_) return SolveStatus::TimeLimit;

      // Pricing.
      std::size_t q = total_;
      double best = 0.0;
      double dir = 0.0;
      for (std::size_t j = 0; j < total_; ++j) {
        if (status_[j] == Status::Basic || lo_[j] == hi_[j]) continue;
        const double dj = d(static_cast<Eigen::Index>(j));
        double sgn = 0.0;
        if (dj < -config_.optimalityTol && status_[j] != Status::Upper) sgn = 1.0;
        else if (dj > config_.optimalityTol && status_[j] != Status::Lower) sgn = -1.0;
        if (sgn == 0.0) continue;
        if (bland) {
          q = j;
          dir = sgn;
          break;
        }
        const double score = dj * dj / weight[j];
        if (score > best) {
          best = score;
          q = j;
          dir = sgn;
        }
      }
      if (q == total_) return std::nullopt;

      // Ratio test, bound flip included.
      const auto qq = static_cast<Eigen::Index>(q);
      double theta = hi_[q] - lo_[q];
      std::size_t leave = m_;
      double leaveAlpha = 0.0;
      for (std::size_t i = 0; i < m_; ++i) {
        const double alpha = T_(static_cast<Eigen::Index>(i), qq) * dir;
        if (std::abs(alpha) <= kPivotTol) continue;
        const std::size_t b = basis_[i];
        double limitI;
        if (alpha > 0.0) {
          if (!std::isfinite(lo_[b])) continue;
          limitI = (value_[b] - lo_[b]) / alpha;
        } else {
          if (!std::isfinite(hi_[b])) continue;
          limitI = (hi_[b] - value_[b]) / -alpha;
        }
        limitI = std::max(limitI, 0.0);
        bool take = false;
        if (limitI < theta - kTieTol) {
          take = true;
        } else if (limitI <= theta + kTieTol && leave < m_) {
          if (bland) take = b < basis_[leave];
          else take = std::abs(alpha) > std::abs(leaveAlpha) + kTieTol;
        }
        if (take) {
          theta = limitI;
          leave = i;
          leaveAlpha = alpha;
        }
      }
      if (!std::isfinite(theta)) return SolveStatus::Unbounded;

      ++iterations_;
      if (theta <= kTieTol) {
        if (++degenerate >= kBlandAfter) bland = true;
      } else {
        degenerate = 0;
        bland = false;
      }

      // Move the entering variable.
      for (std::size_t i = 0; i < m_; ++i) {
        const double t = T_(static_cast<Eigen::Index>(i), qq);
        if (t != 0.0) value_[basis_[i]] -= t * dir * theta;
      }
      value_[q] += dir * theta;

      if (leave == m_) {
        status_[q] = dir > 0.0 ? Status::Upper : Status::Lower;
        value_[q] = dir > 0.0 ? hi_[q] : lo_[q];
        continue;
      }

      const std::size_t out = basis_[leave];
      const auto rr = static_cast<Eigen::Index>(leave);
      const double pivot = T_(rr, qq);
      status_[out] = leaveAlpha > 0.0 ? Status::Lower : Status::Upper;
      value_[out] = leaveAlpha > 0.0 ? lo_[out] : hi_[out];
      if (out >= n_ + m_) {
        // An artificial that left never returns.
        lo_[out] = hi_[out] = 0.0;
        status_[out] = Status::Lower;
        value_[out] = 0.0;
      }

      // Devex reference weights.
      const double wq = weight[q];
      for (std::size_t j = 0; j < total_; ++j) {
        if (status_[j] == Status::Basic || j == q) continue;
        const double ratio = T_(rr, static_cast<Eigen::Index>(j)) / pivot;
        if (ratio != 0.0) weight[j] = std::max(weight[j], ratio * ratio * wq);
      }
      weight[out] = std::max(wq / (pivot * pivot), 1.0);

      T_.row(rr) /= pivot;
      for (std::size_t i = 0; i < m_; ++i) {
        if (i == leave) continue;
        const auto ii = static_cast<Eigen::Index>(i);
        const double f = T_(ii, qq);
        if (f == 0.0) continue;
        T_.row(ii) -= f * T_.row(rr);
        T_(ii, qq) = 0.0;
      }
      const double dq = d(qq);
      d -= dq * T_.row(rr).transpose();
      d(qq) = 0.0;
      for (Eigen::Index j = 0; j < T_.cols(); ++j) {
        if (std::abs(T_(rr, j)) < kDropTol) T_(rr, j) = 0.0;
      }
      basis_[leave] = q;
      status_[q] = Status::Basic;
    }
  }

  Eigen::MatrixXd basisMatrix() const {
    Eigen::MatrixXd B(static_cast<Eigen::Index>(m_), static_cast<Eigen::Index>(m_));
    for (std::size_t k = 0; k < m_; ++k)
      for (std::size_t i = 0; i < m_; ++i)
        B(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = column(i, basis_[k]);
    return B;
  }

  // Recompute basic values from the nonbasic ones with a fresh factorization.
  void refine() {
    if (m_ == 0) return;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m_));
    for (std::size_t j = 0; j < total_; ++j) {
      if (status_[j] == Status::Basic || value_[j] == 0.0) continue;
      for (std::size_t i = 0; i < m_; ++i) rhs(static_cast<Eigen::Index>(i)) -= column(i, j) * value_[j];
    }
    lu_ = Eigen::PartialPivLU<Eigen::MatrixXd>(basisMatrix());
    const Eigen::VectorXd xb = lu_.solve(rhs);
    for (std::size_t k = 0; k < m_; ++k) {
      double v = xb(static_cast<Eigen::Index>(k));
      const std::size_t b = basis_[k];
      const double drift = std::abs(v - value_[b]);
      if (std::isfinite(v) && drift <= 1e-6 * std::max(1.0, std::abs(value_[b]))) value_[b] = v;
    }
  }

  void duals(SolveResult& result) const {
    result.rowDuals.assign(m_, 0.0);
    result.boundDuals.assign(n_, 0.0);
    Eigen::VectorXd y = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m_));
    if (m_ > 0) {
      Eigen::VectorXd cb(static_cast<Eigen::Index>(m_));
      for (std::size_t k = 0; k < m_; ++k) cb(static_cast<Eigen::Index>(k)) = cost_[basis_[k]];
      y = lu_.transpose().solve(cb);
    }
    for (std::size_t i = 0; i < m_; ++i) result.rowDuals[i] = y(static_cast<Eigen::Index>(i));
    for (std::size_t j = 0; j < n_; ++j) {
      if (status_[j] == Status::Basic) continue;
      double mu = cost_[j];
      for (std::size_t i = 0; i < m_; ++i) mu -= A_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) * y(static_cast<Eigen::Index>(i));
      result.boundDuals[j] = mu;
    }
  }

  const OptimizationModel& model_;
  const SolverConfig& config_;
  std::optional<Clock::time_point> deadline_;
  std::size_t n_ = 0, m_ = 0, artificials_ = 0, total_ = 0;
  Eigen::MatrixXd A_;
  Eigen::MatrixXd T_;
  std::vector<double> lo_, hi_, cost_, value_;
  std::vector<Status> status_;
  std::vector<std::size_t> basis_;
  std::vector<std::size_t> artRow_;
  std::vector<double> artSign_;
  std::size_t iterations_ = 0;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
};

}  // namespace

std::optional<Clock::time_point> deadlineFor(const SolverConfig& config, Clock::time_point start) {
  if (!config.timeLimitSeconds) return std::nullopt;
  return start + std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(*config.timeLimitSeconds));
}

double secondsSince(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

SolveResult simplex(const OptimizationModel& model, std::span<const double> lower, std::span<const double> upper,
                    const SolverConfig& config, std::optional<Clock::time_point> deadline) {
  Tableau tableau(model, lower, upper, config, deadline);
  return tableau.run();
}

}  // namespace detail

SolveResult solveLp(const OptimizationModel& model, const SolverConfig& config) {
  config.validate();
  model.validate();
  if (model.hasIntegral()) throw std::invalid_argument("solveLp: model has integral variables");
  if (model.hasQuadratic()) throw std::invalid_argument("solveLp: model has a quadratic objective");
  const auto start = detail::Clock::now();
  std::vector<double> lo, hi;
  for (const auto& v : model.variables) {
    lo.push_back(v.lower);
    hi.push_back(v.upper);
  }
  SolveResult result = detail::simplex(model, lo, hi, config, detail::deadlineFor(config, start));
  result.bestBound = result.objectiveValue;
  result.stats.wallSeconds = detail::secondsSince(start);
  return result;
}

}  // namespace storyline
