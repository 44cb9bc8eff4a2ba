#include "blackout/linear_program.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "blackout/error.hpp"

namespace blackout {

LinearProgram::LinearProgram(std::size_t num_vars)
    : cost_(num_vars, 0.0), lower_(num_vars, 0.0), upper_(num_vars, infinity) {}

void LinearProgram::set_bounds(std::size_t var, double lo, double hi) {
  if (!(lo <= hi)) throw ValidationError("LP variable bounds must satisfy lower <= upper");
  if (std::isinf(lo) && std::isinf(hi)) throw ValidationError("LP free variables are not supported");
  lower_.at(var) = lo;
  upper_.at(var) = hi;
}

void LinearProgram::add_row(std::span<const double> coeffs, double rhs) {
  if (coeffs.size() != num_vars()) throw ValidationError("LP row width does not match variable count");
  a_.insert(a_.end(), coeffs.begin(), coeffs.end());
  rhs_.push_back(rhs);
}

const char* to_string(LpStatus status) {
  switch (status) {
    case LpStatus::optimal: return "optimal";
    case LpStatus::infeasible: return "infeasible";
    case LpStatus::unbounded: return "unbounded";
    case LpStatus::iteration_limit: return "iteration_limit";
  }
  return "unknown";
}

namespace {

constexpr double kPivotTol = 1e-9;
constexpr double kCostTol = 1e-9;
constexpr int kDegenerateRunBeforeBland = 50;

enum class VarState : unsigned char { basic, at_lower, at_upper };

class Tableau {
 public:
  explicit Tableau(const LinearProgram& lp)
      : m_(lp.num_rows()), n_(lp.num_vars()), cols_(n_ + m_),
        t_(m_ * cols_, 0.0), beta_(m_, 0.0), basis_(m_), state_(cols_, VarState::at_lower),
        lower_(cols_, 0.0), upper_(cols_, LinearProgram::infinity), d_(cols_, 0.0) {
    std::copy(lp.lower().begin(), lp.lower().end(), lower_.begin());
    std::copy(lp.upper().begin(), lp.upper().end(), upper_.begin());
    for (std::size_t j = 0; j < n_; ++j)
      state_[j] = std::isfinite(lower_[j]) ? VarState::at_lower : VarState::at_upper;

    const auto& a = lp.matrix();
    for (std::size_t i = 0; i < m_; ++i) {
      double r = lp.rhs()[i];
      for (std::size_t j = 0; j < n_; ++j) r -= a[i * n_ + j] * nonbasic_value(j);
      const double sign = r >= 0.0 ? 1.0 : -1.0;
      double* row = &t_[i * cols_];
      for (std::size_t j = 0; j < n_; ++j) row[j] = sign * a[i * n_ + j];
      row[n_ + i] = 1.0;
      beta_[i] = std::abs(r);
      basis_[i] = n_ + i;
      state_[n_ + i] = VarState::basic;
    }
  }

  /// Runs the simplex loop for the given cost vector (length n + m).
  LpStatus optimize(const std::vector<double>& c, std::size_t max_iterations, std::size_t& iterations) {
    price(c);
    int degenerate_run = 0;
    while (true) {
      if (iterations >= max_iterations) return LpStatus::iteration_limit;
      const bool bland = degenerate_run >= kDegenerateRunBeforeBland;
      const auto entering = choose_entering(bland);
      if (!entering) return LpStatus::optimal;
      const std::size_t q = *entering;
      const double dir = state_[q] == VarState::at_lower ? 1.0 : -1.0;

      // Ratio test over the basic variables, then against the entering range.
      double step = LinearProgram::infinity;
      std::size_t leave_row = m_;
      double leave_alpha = 0.0;
      for (std::size_t i = 0; i < m_; ++i) {
        const double alpha = dir * t_[i * cols_ + q];
        double limit;
        if (alpha > kPivotTol) {
          if (!std::isfinite(lower_[basis_[i]])) continue;
          limit = (beta_[i] - lower_[basis_[i]]) / alpha;
        } else if (alpha < -kPivotTol) {
          if (!std::isfinite(upper_[basis_[i]])) continue;
          limit = (upper_[basis_[i]] - beta_[i]) / -alpha;
        } else {
          continue;
        }
        limit = std::max(limit, 0.0);
        bool better = leave_row == m_ || limit < step - 1e-12;
        if (!better && limit <= step + 1e-12)
          better = bland ? basis_[i] < basis_[leave_row] : std::abs(alpha) > std::abs(leave_alpha);
        if (better) {
          step = limit;
          leave_row = i;
          leave_alpha = alpha;
        }
      }
      const double range = upper_[q] - lower_[q];
      if (range <= step) {
        step = range;
        leave_row = m_;
      }
      if (!std::isfinite(step)) return LpStatus::unbounded;
      ++iterations;
      degenerate_run = step <= 1e-12 ? degenerate_run + 1 : 0;

      for (std::size_t i = 0; i < m_; ++i) beta_[i] -= dir * t_[i * cols_ + q] * step;

      if (leave_row == m_) {
        state_[q] = state_[q] == VarState::at_lower ? VarState::at_upper : VarState::at_lower;
        continue;
      }

      const double entering_value = nonbasic_value(q) + dir * step;
      const std::size_t leaving = basis_[leave_row];
      state_[leaving] = leave_alpha > 0.0 ? VarState::at_lower : VarState::at_upper;
      pivot(leave_row, q);
      beta_[leave_row] = entering_value;
      basis_[leave_row] = q;
      state_[q] = VarState::basic;
    }
  }

  double artificial_sum() const {
    double s = 0.0;
    for (std::size_t i = 0; i < m_; ++i)
      if (basis_[i] >= n_) s += beta_[i];
    return s;
  }

  void fix_artificials() {
    for (std::size_t j = n_; j < cols_; ++j) {
      lower_[j] = 0.0;
      upper_[j] = 0.0;
      if (state_[j] == VarState::at_upper) state_[j] = VarState::at_lower;
    }
  }

  std::vector<double> structural_values() const {
    std::vector<double> x(n_);
    for (std::size_t j = 0; j < n_; ++j) x[j] = state_[j] == VarState::basic ? 0.0 : nonbasic_value(j);
    for (std::size_t i = 0; i < m_; ++i)
      if (basis_[i] < n_) x[basis_[i]] = std::clamp(beta_[i], lower_[basis_[i]], upper_[basis_[i]]);
    return x;
  }

  std::size_t columns() const { return cols_; }
  std::size_t structural() const { return n_; }

 private:
  double nonbasic_value(std::size_t j) const {
    return state_[j] == VarState::at_upper ? upper_[j] : lower_[j];
  }

  void price(const std::vector<double>& c) {
    d_ = c;
    for (std::size_t i = 0; i < m_; ++i) {
      const double cb = c[basis_[i]];
      if (cb == 0.0) continue;
      const double* row = &t_[i * cols_];
      for (std::size_t j = 0; j < cols_; ++j) d_[j] -= cb * row[j];
    }
    for (std::size_t i = 0; i < m_; ++i) d_[basis_[i]] = 0.0;
  }

  std::optional<std::size_t> choose_entering(bool bland) const {
    std::optional<std::size_t> best;
    double best_score = 0.0;
    for (std::size_t j = 0; j < cols_; ++j) {
      if (state_[j] == VarState::basic) continue;
      if (upper_[j] - lower_[j] <= 0.0) continue;
      double score = 0.0;
      if (state_[j] == VarState::at_lower && d_[j] < -kCostTol) score = -d_[j];
      else if (state_[j] == VarState::at_upper && d_[j] > kCostTol) score = d_[j];
      else continue;
      if (bland) return j;
      if (score > best_score) {
        best_score = score;
        best = j;
      }
    }
    return best;
  }

  void pivot(std::size_t r, std::size_t q) {
    double* prow = &t_[r * cols_];
    const double inv = 1.0 / prow[q];
    for (std::size_t j = 0; j < cols_; ++j) prow[j] *= inv;
    prow[q] = 1.0;
    for (std::size_t i = 0; i < m_; ++i) {
      if (i == r) continue;
      double* row = &t_[i * cols_];
      const double f = row[q];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < cols_; ++j) row[j] -= f * prow[j];
      row[q] = 0.0;
    }
    const double fd = d_[q];
    if (fd != 0.0) {
      for (std::size_t j = 0; j < cols_; ++j) d_[j] -= fd * prow[j];
      d_[q] = 0.0;
    }
  }

  std::size_t m_, n_, cols_;
  std::vector<double> t_;
  std::vector<double> beta_;
  std::vector<std::size_t> basis_;
  std::vector<VarState> state_;
  std::vector<double> lower_, upper_;
  std::vector<double> d_;
};

}  // namespace

LpSolution solve(const LinearProgram& lp) {
  LpSolution sol;
  Tableau tab(lp);
  const std::size_t n = lp.num_vars();
  const std::size_t max_iter = 50 * (tab.columns() + lp.num_rows()) + 1000;

  double scale = 1.0;
  for (double b : lp.rhs()) scale = std::max(scale, std::abs(b));

  std::vector<double> phase1(tab.columns(), 0.0);
  std::fill(phase1.begin() + static_cast<std::ptrdiff_t>(n), phase1.end(), 1.0);
  sol.status = tab.optimize(phase1, max_iter, sol.iterations);
  if (sol.status == LpStatus::iteration_limit) return sol;
  if (tab.artificial_sum() > 1e-7 * scale) {
    sol.status = LpStatus::infeasible;
    return sol;
  }

  tab.fix_artificials();
  std::vector<double> phase2(tab.columns(), 0.0);
  std::copy(lp.cost().begin(), lp.cost().end(), phase2.begin());
  sol.status = tab.optimize(phase2, max_iter, sol.iterations);
  if (sol.status != LpStatus::optimal) return sol;

  sol.x = tab.structural_values();
  sol.objective = 0.0;
  for (std::size_t j = 0; j < n; ++j) sol.objective += lp.cost()[j] * sol.x[j];
  return sol;
}

}  // namespace blackout
