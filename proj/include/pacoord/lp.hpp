#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace pacoord::lp {

/// Default feasibility tolerance used across the library.
inline constexpr double kDefaultTolerance = 1e-7;

/// Process-wide tolerance used when a caller does not pass one. Starts at
/// kDefaultTolerance; the command-line tool overrides it from PA_COORD_LP_TOL.
double default_tolerance() noexcept;
/// Throws std::invalid_argument unless 0 < tol < 1.
void set_default_tolerance(double tol);

/// A linear row `coeffs . v (<= | =) rhs`; the sense is given by where it is stored.
struct Constraint {
  std::vector<double> coeffs;
  double rhs = 0.0;
};

/// Dense linear program in maximization form.
///
///   maximize    objective . v
///   subject to  ineq rows: row . v <= rhs
///               eq rows:   row . v  = rhs
///               lower[j] <= v[j] <= upper[j]   (absent bound = unbounded side)
///
/// Every mutator checks row lengths against num_vars and throws
/// std::invalid_argument on mismatch, so a malformed problem never reaches the
/// solver.
class Problem {
 public:
  explicit Problem(std::size_t num_vars);

  std::size_t num_vars() const noexcept { return num_vars_; }

  const std::vector<double>& objective() const noexcept { return objective_; }
  const std::vector<Constraint>& ineq() const noexcept { return ineq_; }
  const std::vector<Constraint>& eq() const noexcept { return eq_; }
  const std::vector<std::optional<double>>& lower() const noexcept { return lower_; }
  const std::vector<std::optional<double>>& upper() const noexcept { return upper_; }

  void set_objective(std::vector<double> c);
  void set_objective_coeff(std::size_t j, double value);

  void add_le(std::vector<double> row, double rhs);
  void add_ge(std::vector<double> row, double rhs);
  void add_eq(std::vector<double> row, double rhs);

  void set_lower(std::size_t j, std::optional<double> lo);
  void set_upper(std::size_t j, std::optional<double> hi);
  void set_bounds(std::size_t j, std::optional<double> lo, std::optional<double> hi);

  /// Re-checks every dimension invariant; throws std::invalid_argument.
  void validate() const;

 private:
  void check_row(const std::vector<double>& row, const char* what) const;
  void check_index(std::size_t j) const;

  std::size_t num_vars_;
  std::vector<double> objective_;
  std::vector<Constraint> ineq_;
  std::vector<Constraint> eq_;
  std::vector<std::optional<double>> lower_;
  std::vector<std::optional<double>> upper_;
};

enum class Status { Optimal, Infeasible, Unbounded };

std::string to_string(Status s);

struct Solution {
  Status status = Status::Infeasible;
  std::vector<double> primal;    // empty unless Optimal
  double objective_value = 0.0;  // meaningful only if Optimal
  std::size_t iterations = 0;

  bool optimal() const noexcept { return status == Status::Optimal; }
};

/// Two-phase dense simplex. Deterministic: identical input gives identical
/// pivots. Throws std::runtime_error only if the iteration cap is hit.
Solution solve(const Problem& p, double tol = default_tolerance());

struct FeasibilityCheck {
  bool feasible = true;
  double worst_residual = 0.0;
};

/// Signed residuals: row.v - rhs for inequalities, |row.v - rhs| for
/// equalities, lo - v and v - hi for bounds. Reports the largest one.
FeasibilityCheck check_feasible(const Problem& p, std::span<const double> v,
                                double tol = default_tolerance());

}  // namespace pacoord::lp
