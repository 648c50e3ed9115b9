#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "pacoord/lp.hpp"
#include "pacoord/model.hpp"

namespace pacoord {

/// Lifts X = { x : A x <= b, E x = e } to the closed cone slice
///   { (lambda, z) : A z <= lambda b, E z = lambda e, 0 <= lambda <= 1 },
/// the closure of { (lambda, lambda x) : x in X, lambda in [0,1] }.
/// Coordinates are ordered (lambda, z_1, ..., z_d). Its lambda = 0 slice is the
/// recession cone of X. Throws std::domain_error if X is empty.
Polyhedron homogenize(const Polyhedron& X);

/// Column layout of the closure program built by build_cp_closure.
///
/// Per (type, action) pair p = type * |A| + action the block
///   [ pi(a;theta), z^{a,theta}_1 .. z^{a,theta}_d ]
/// comes first, then one epigraph variable per pair, then one deviation
/// variable per (type, reported type != type, action).
class CpLayout {
 public:
  explicit CpLayout(const PAInstance& inst);

  std::size_t prob(std::size_t type, std::size_t action) const;
  std::size_t z(std::size_t type, std::size_t action, std::size_t k) const;
  std::size_t epigraph(std::size_t type, std::size_t action) const;
  std::size_t deviation(std::size_t type, std::size_t reported, std::size_t action) const;
  std::size_t num_vars() const noexcept { return num_vars_; }

 private:
  std::size_t nt_, na_, d_;
  std::size_t epi_base_, dev_base_, num_vars_;
};

/// The closure program: perspective-transformed objective and IC rows over
/// (pi, z), with each pair constrained to homogenize(X).
lp::Problem build_cp_closure(const PAInstance& inst);

/// Same rows as build_cp_closure; objective is the single variable pi(pair).
lp::Problem build_margin_cp(const PAInstance& inst, TypeAction pair);

/// A point of the closure program in (pi, z) coordinates.
struct TransformedSolution {
  PairTable<double> probs;
  PairTable<std::vector<double>> z;
  double objective = 0.0;
};

/// Reads pi and z out of an LP primal vector and evaluates the perspective objective.
TransformedSolution extract_transformed(const PAInstance& inst, std::span<const double> primal);

/// sum_theta f(theta) sum_a pi * U(z/pi), with the pi = 0 branch given by the
/// recession of each affine piece (c . z).
double transformed_objective(const PAInstance& inst, const TransformedSolution& sol);

/// Largest violation of the closure program's constraints at sol, using the
/// max-inside-sum IC form directly (no auxiliaries).
double closure_violation(const PAInstance& inst, const TransformedSolution& sol);

/// z = pi * x for every pair.
TransformedSolution lift(const PAInstance& inst, const SuccinctMechanism& mech);

/// (1 - w) a + w b, componentwise.
TransformedSolution blend(const PAInstance& inst, const TransformedSolution& a,
                          const TransformedSolution& b, double w);

struct SolverOptions {
  double lp_tol = lp::default_tolerance();
  double tol_p = 1e-9;  // pi at or below this counts as zero
  double tol_z = 1e-6;  // ||z||_inf at or above this counts as nonzero
};

/// Pairs with pi <= tol_p and ||z||_inf >= tol_z, in (type, action) order.
std::vector<TypeAction> find_irregular_pairs(const TransformedSolution& sol,
                                             double tol_p = 1e-9, double tol_z = 1e-6);

/// x = z / pi where pi > tol_p; pairs at or below tol_p become unused
/// (pi = 0, x = 0) and each type's probabilities are renormalized.
/// Throws std::domain_error if an irregular pair is present.
SuccinctMechanism recover_succinct(const TransformedSolution& sol, double tol_p = 1e-9,
                                   double tol_z = 1e-6);

struct RepairResult {
  TransformedSolution solution;
  std::vector<TypeAction> repaired_pairs;
  std::vector<double> margin_objectives;  // transformed objective of each margin solution
  std::size_t iterations = 0;
};

/// Perturbs a closure-optimal point off the unattainable boundary:
/// while some pair is irregular, solve its margin program, add it to S and
/// re-mix (1 - eps) M* + eps / |S| * sum_S M^s. Pairs are picked in
/// (type, action) order. Each pair enters S at most once.
RepairResult repair_irregular(const PAInstance& inst, const TransformedSolution& optimum,
                              double epsilon, const SolverOptions& opts = {});

struct MechanismResult {
  SuccinctMechanism mechanism;
  double objective = 0.0;          // eval_principal(mechanism)
  double closure_objective = 0.0;  // optimum of the closure program
  bool regular = true;
  double epsilon_used = 0.0;
  std::vector<TypeAction> repaired_pairs;
  std::size_t iterations = 0;
  /// (1 - eps) * closure + eps * mean over S of the margin objectives; the
  /// mechanism's objective is at least this by concavity.
  double guaranteed_lower_bound = 0.0;
  /// Whether objective >= (1 - eps) * closure_objective (only meaningful
  /// when closure_objective >= 0).
  bool multiplicative_bound_holds = true;
};

/// Optimal (regular) or eps-optimal (irregular) succinct mechanism.
/// Throws InfeasibleError / UnboundedError for the corresponding closure
/// program outcomes and std::invalid_argument for eps outside (0,1).
MechanismResult solve_optimal_mechanism(const PAInstance& inst, double epsilon = 1e-3,
                                        const SolverOptions& opts = {});

}  // namespace pacoord
