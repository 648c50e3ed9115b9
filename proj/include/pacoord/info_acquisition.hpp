#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pacoord/graph.hpp"
#include "pacoord/model.hpp"

namespace pacoord {

/// A convex cell of the belief simplex with a concave utility on it.
struct PartitionCell {
  std::string label;
  Polyhedron region;   // includes the simplex rows
  ConcavePWL utility;
};

/// Finite cover of the belief simplex; cells are closed and may overlap on
/// their boundaries.
struct Partition {
  std::size_t dim = 0;
  std::vector<PartitionCell> cells;

  /// Max over cells containing sigma of the cell utility.
  /// Throws std::domain_error when no cell contains sigma.
  double evaluate(std::span<const double> sigma, double tol = kMembershipTol) const;
};

/// Agent chooses an action after learning; utility[a][state].
struct DecisionProblem {
  std::vector<std::string> states;
  std::vector<std::string> actions;
  std::vector<std::vector<double>> utility;
  std::vector<double> prior;
};

/// Sender utility `sender[a][state]`, receiver utility `receiver[a][state]`.
struct PersuasionBase {
  std::vector<std::string> states;
  std::vector<std::string> actions;
  std::vector<std::vector<double>> sender;
  std::vector<std::vector<double>> receiver;
  std::vector<double> prior;
};

void validate(const DecisionProblem& dp);
void validate(const PersuasionBase& bp);

/// One cell per action: beliefs where the action is optimal.
Partition partition_decision_problem(const DecisionProblem& dp);

/// One cell per action: beliefs where the receiver is willing to take it, with
/// the sender's utility. Ties resolve toward the sender since the solver is
/// free to use any cell containing a posterior.
Partition partition_costly_persuasion(const PersuasionBase& bp);

/// h(sigma) = sum sigma ln sigma, with 0 ln 0 = 0.
double negative_entropy(std::span<const double> sigma);

/// Convex signal cost h on the simplex.
struct CostSpec {
  enum class Kind { Zero, PiecewiseConvex, EntropyApprox };

  Kind kind = Kind::Zero;
  std::vector<AffineForm> pieces;  // max of affine forms (empty for Zero)
  std::size_t grid = 0;            // points per axis for EntropyApprox
  double gap = 0.0;                // sup of h_exact - h_approx on a finer grid

  static CostSpec zero();
  /// Throws std::invalid_argument for an empty piece list or mixed dimensions.
  static CostSpec piecewise(std::vector<AffineForm> pieces);
  /// Tangent planes of negative_entropy at the interior points of the uniform
  /// simplex grid with denominator n. Requires n >= dim.
  static CostSpec entropy(std::size_t n, std::size_t dim);

  double operator()(std::span<const double> sigma) const;
  /// The function the approximation stands for (negative entropy or itself).
  double exact(std::span<const double> sigma) const;
};

/// Bayes-plausible distribution over posteriors.
struct Experiment {
  std::vector<std::pair<double, std::vector<double>>> signals;  // (p_i, sigma_i)
  std::vector<std::size_t> cells;  // partition cell that produced each signal
  /// sum p_i [u(sigma_i) - h(sigma_i)], excluding the constant h(f).
  double value = 0.0;
  /// sum p_i h(sigma_i) - h(f).
  double cost_term = 0.0;
  /// Approximation gap of the cost (0 unless EntropyApprox).
  double gap = 0.0;
};

/// Optimal experiment for the given partition oracle, convex cost and prior.
/// Throws std::domain_error on an empty partition or an invalid prior.
Experiment solve_info_acquisition(const Partition& part, const CostSpec& cost,
                                  std::span<const double> prior);

/// t * h(g / t) with t = sum g; 0 when t = 0. Throws std::domain_error when
/// some entry of g is negative.
double perspective_on_simplex(const std::function<double(std::span<const double>)>& h,
                              std::span<const double> g);

/// u*(sigma) = sum_i max{sigma_i - sum_j e_ij sigma_j, 0} and
/// h(sigma) = max{||sigma||_inf - 1/k, 0}.
struct ConcavificationHardness {
  std::size_t k = 0;
  std::function<double(std::span<const double>)> u_star;
  /// u* as a max of 2^k affine forms; present when k <= 12.
  std::optional<std::vector<AffineForm>> u_star_pieces;
  CostSpec cost;
};

ConcavificationHardness gen_concavification_hardness(const Graph& g);

}  // namespace pacoord
