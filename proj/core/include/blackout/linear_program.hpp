#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

namespace blackout {

/// Dense linear program in bounded equality form:
///
///     minimize    cost' x
///     subject to  A x = rhs,  lower <= x <= upper.
///
/// Every variable needs at least one finite bound. Sized for the per-island
/// redispatch problems (a few hundred rows and columns).
class LinearProgram {
 public:
  static constexpr double infinity = std::numeric_limits<double>::infinity();

  explicit LinearProgram(std::size_t num_vars);

  std::size_t num_vars() const { return cost_.size(); }
  std::size_t num_rows() const { return rhs_.size(); }

  void set_cost(std::size_t var, double c) { cost_.at(var) = c; }
  void set_bounds(std::size_t var, double lo, double hi);

  /// Appends the row `coeffs' x = rhs`; coeffs.size() must equal num_vars().
  void add_row(std::span<const double> coeffs, double rhs);

  const std::vector<double>& cost() const { return cost_; }
  const std::vector<double>& lower() const { return lower_; }
  const std::vector<double>& upper() const { return upper_; }
  const std::vector<double>& matrix() const { return a_; }
  const std::vector<double>& rhs() const { return rhs_; }

 private:
  std::vector<double> cost_;
  std::vector<double> lower_;
  std::vector<double> upper_;
  std::vector<double> a_;  // row-major, num_rows x num_vars
  std::vector<double> rhs_;
};

enum class LpStatus { optimal, infeasible, unbounded, iteration_limit };

const char* to_string(LpStatus status);

struct LpSolution {
  LpStatus status = LpStatus::infeasible;
  std::vector<double> x;
  double objective = 0.0;
  std::size_t iterations = 0;
};

/// Two-phase bounded-variable primal simplex on a dense tableau.
///
/// Pricing is Dantzig's rule with lowest-index tie breaking, falling back to
/// Bland's rule after a run of degenerate pivots, so the result is a pure
/// function of the input.
LpSolution solve(const LinearProgram& lp);

}  // namespace blackout
