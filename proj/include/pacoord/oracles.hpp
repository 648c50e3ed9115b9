#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "pacoord/graph.hpp"
#include "pacoord/model.hpp"

namespace pacoord {

/// Largest number of grid points any oracle will enumerate.
inline constexpr std::size_t kGridCap = 1'000'000;

/// Uniform grid: either the simplex grid {k / N} with N = round(1/step), or a
/// product grid over per-dimension boxes.
struct GridSpec {
  double step = 0.1;
  bool simplex = false;
  std::vector<std::pair<double, double>> box;  // used when !simplex

  static GridSpec on_simplex(double step);
  static GridSpec on_box(double step, std::vector<std::pair<double, double>> box);

  /// Number of points; throws std::invalid_argument for a non-positive step.
  std::size_t count(std::size_t dim) const;
};

/// Every point of the grid in lexicographic order. Throws SizeGuardError past kGridCap.
std::vector<std::vector<double>> grid_points(const GridSpec& grid, std::size_t dim);

/// Calls fn on every composition of N into d parts, scaled by 1/N.
void for_each_simplex_point(std::size_t d, std::size_t N,
                            const std::function<void(std::span<const double>)>& fn);

/// Optimal coordination value with strategies restricted to the grid points
/// inside X (points outside X are skipped). Throws SizeGuardError past the
/// cap and InfeasibleError when the discretized program is infeasible.
double myerson_grid_lp(const PAInstance& inst, const GridSpec& grid);

/// Largest ||c||_1 over every piece of every principal utility: a Lipschitz
/// constant of U in the infinity norm.
double lipschitz_bound(const PAInstance& inst);

/// Intersects X with the box [-B, B]^d.
PAInstance cap_strategy_space(const PAInstance& inst, double bound);

/// max sum_s p_s phi(s) over grid posteriors s with sum p_s s = prior and
/// sum p_s = 1. Throws std::domain_error if the prior is outside the grid hull.
double grid_concavify(const std::function<double(std::span<const double>)>& phi,
                      std::span<const double> prior, const GridSpec& grid);

/// Exact maximum independent set size. Throws SizeGuardError for more than 24 nodes.
std::size_t brute_force_mis(const Graph& g);

/// Value of the zero-sum game where the row player maximizes payoff[i][j].
double minimax_lp(const std::vector<std::vector<double>>& payoff);

}  // namespace pacoord
