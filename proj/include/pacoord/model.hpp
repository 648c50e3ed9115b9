#pragma once

#include <compare>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pacoord/lp.hpp"

namespace pacoord {

/// Membership tolerance for polyhedra.
inline constexpr double kMembershipTol = 1e-7;
/// Tolerance on probability normalization.
inline constexpr double kProbabilityTol = 1e-9;

double dot(std::span<const double> a, std::span<const double> b);

/// coeffs . x + offset
struct AffineForm {
  std::vector<double> coeffs;
  double offset = 0.0;

  std::size_t dim() const noexcept { return coeffs.size(); }
  double operator()(std::span<const double> x) const;
  /// Sum of |coeffs|; the Lipschitz constant w.r.t. the infinity norm.
  double l1_norm() const;
};

/// Concave piecewise-linear function: pointwise minimum of affine pieces.
struct ConcavePWL {
  std::vector<AffineForm> pieces;

  static ConcavePWL affine(AffineForm f);
  double operator()(std::span<const double> x) const;
  std::size_t dim() const;
};

/// { y : ineq rows <= rhs, eq rows = rhs } in R^dim.
struct Polyhedron {
  std::size_t dim = 0;
  std::vector<lp::Constraint> ineq;
  std::vector<lp::Constraint> eq;

  static Polyhedron whole_space(std::size_t d);
  static Polyhedron nonnegative_orthant(std::size_t d);
  /// Probability simplex { x >= 0, sum x = 1 }.
  static Polyhedron simplex(std::size_t d);
  static Polyhedron box(std::span<const double> lo, std::span<const double> hi);
  /// The single point { p }.
  static Polyhedron point(std::span<const double> p);

  void add_le(std::vector<double> row, double rhs);
  void add_eq(std::vector<double> row, double rhs);
  /// Appends every row of `other` (same dimension).
  void intersect(const Polyhedron& other);

  /// Largest violation of any row at y (<= 0 means strictly inside or on it).
  double max_violation(std::span<const double> y) const;
  bool contains(std::span<const double> y, double tol = kMembershipTol) const;
  /// Feasibility via one LP call.
  bool is_empty(double tol = lp::default_tolerance()) const;
  /// Whether every coordinate is bounded above and below over the set (LP per coordinate).
  bool is_bounded() const;
};

struct TypeAction {
  std::size_t type = 0;
  std::size_t action = 0;
  auto operator<=>(const TypeAction&) const = default;
};

/// Dense table indexed by (type, action), stored type-major.
template <class T>
class PairTable {
 public:
  PairTable() = default;
  PairTable(std::size_t num_types, std::size_t num_actions, const T& init = T{})
      : num_types_(num_types), num_actions_(num_actions),
        data_(num_types * num_actions, init) {}

  std::size_t num_types() const noexcept { return num_types_; }
  std::size_t num_actions() const noexcept { return num_actions_; }

  T& operator()(std::size_t type, std::size_t action) {
    return data_[type * num_actions_ + action];
  }
  const T& operator()(std::size_t type, std::size_t action) const {
    return data_[type * num_actions_ + action];
  }
  T& operator[](TypeAction p) { return (*this)(p.type, p.action); }
  const T& operator[](TypeAction p) const { return (*this)(p.type, p.action); }

  auto begin() { return data_.begin(); }
  auto end() { return data_.end(); }
  auto begin() const { return data_.begin(); }
  auto end() const { return data_.end(); }

 private:
  std::size_t num_types_ = 0;
  std::size_t num_actions_ = 0;
  std::vector<T> data_;
};

/// Generalized principal-agent instance with polyhedral strategy space,
/// concave PWL principal utility and affine agent utility.
struct PAInstance {
  std::vector<std::string> types;
  std::vector<std::string> actions;
  std::vector<double> prior;
  std::size_t dim = 0;
  Polyhedron strategy_space;
  PairTable<ConcavePWL> principal_utility;  // U(., a; theta)
  PairTable<AffineForm> agent_utility;      // V(., a; theta)
  /// Either empty (no supplemental constraints) or one entry per type.
  std::vector<std::optional<Polyhedron>> supplemental;

  std::size_t num_types() const noexcept { return types.size(); }
  std::size_t num_actions() const noexcept { return actions.size(); }
  bool has_supplemental() const;
  const std::optional<Polyhedron>& supplemental_for(std::size_t type) const;
};

struct ValidationReport {
  bool ok = true;
  std::vector<std::string> issues;
};

/// Collects every structural problem instead of throwing.
ValidationReport validate_instance(const PAInstance& inst);

/// Throws std::invalid_argument listing the issues when validation fails.
void require_valid(const PAInstance& inst);

/// One strategy per (type, action) with a recommendation probability. The data
/// shape itself rules out two strategies sharing a recommendation.
struct SuccinctMechanism {
  PairTable<double> probs;
  PairTable<std::vector<double>> strategies;

  SuccinctMechanism() = default;
  SuccinctMechanism(std::size_t num_types, std::size_t num_actions, std::size_t dim);
};

/// Checks shape, normalization and X-membership of used strategies.
void require_structurally_valid(const PAInstance& inst, const SuccinctMechanism& mech,
                                double tol = kMembershipTol);

struct BestResponse {
  std::size_t action = 0;
  double value = 0.0;
};

/// Agent best response to x for `type`; ties go to the lowest action index.
/// Throws std::domain_error if x is outside X beyond kMembershipTol.
BestResponse best_response(const PAInstance& inst, std::span<const double> x,
                           std::size_t type);

/// max_a V(x, a; type) without the membership check.
double max_agent_value(const PAInstance& inst, std::span<const double> x,
                       std::size_t type);

struct ICViolation {
  std::size_t type = 0;           // true type
  std::size_t reported_type = 0;  // misreport (equal to type: obedience)
  double margin = 0.0;            // deviation payoff minus truthful payoff
};

struct ICReport {
  bool feasible = true;
  double worst_violation = 0.0;
  std::vector<ICViolation> violating_triplets;
};

ICReport check_ic(const PAInstance& inst, const SuccinctMechanism& mech, double tol);

/// Expected principal utility sum_theta f(theta) sum_a pi(a;theta) U(x^{a,theta}, a; theta).
double eval_principal(const PAInstance& inst, const SuccinctMechanism& mech);

/// Truthful-obedient agent utility of `type` under the mechanism.
double agent_truthful_value(const PAInstance& inst, const SuccinctMechanism& mech,
                            std::size_t type);

/// Largest violation of C_theta by sum_a pi(a;theta) x^{a,theta} over all types
/// (0 when there are no supplemental constraints).
double supplemental_residual(const PAInstance& inst, const SuccinctMechanism& mech);

}  // namespace pacoord
