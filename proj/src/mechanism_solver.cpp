#include "pacoord/mechanism_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "pacoord/errors.hpp"

namespace pacoord {

Polyhedron homogenize(const Polyhedron& X) {
  if (X.is_empty()) throw std::domain_error("cannot homogenize an empty polyhedron");
  const std::size_t d = X.dim;
  Polyhedron out;
  out.dim = d + 1;
  auto lift_row = [&](const lp::Constraint& c) {
    std::vector<double> row(d + 1);
    row[0] = -c.rhs;
    std::copy(c.coeffs.begin(), c.coeffs.end(), row.begin() + 1);
    return row;
  };
  for (const auto& c : X.ineq) out.add_le(lift_row(c), 0.0);
  for (const auto& c : X.eq) out.add_eq(lift_row(c), 0.0);
  std::vector<double> lam(d + 1, 0.0);
  lam[0] = -1.0;
  out.add_le(lam, 0.0);
  lam[0] = 1.0;
  out.add_le(lam, 1.0);
  return out;
}

// ---------------------------------------------------------------- layout

CpLayout::CpLayout(const PAInstance& inst)
    : nt_(inst.num_types()), na_(inst.num_actions()), d_(inst.dim) {
  epi_base_ = nt_ * na_ * (d_ + 1);
  dev_base_ = epi_base_ + nt_ * na_;
  num_vars_ = dev_base_ + nt_ * (nt_ - 1) * na_;
}

std::size_t CpLayout::prob(std::size_t type, std::size_t action) const {
  return (type * na_ + action) * (d_ + 1);
}

std::size_t CpLayout::z(std::size_t type, std::size_t action, std::size_t k) const {
  return prob(type, action) + 1 + k;
}

std::size_t CpLayout::epigraph(std::size_t type, std::size_t action) const {
  return epi_base_ + type * na_ + action;
}

std::size_t CpLayout::deviation(std::size_t type, std::size_t reported,
                                std::size_t action) const {
  if (type == reported) throw std::invalid_argument("no deviation variable on the diagonal");
  const std::size_t r = reported < type ? reported : reported - 1;
  return dev_base_ + (type * (nt_ - 1) + r) * na_ + action;
}

// ---------------------------------------------------------------- programs

namespace {

// Adds coef * (form.coeffs . z^{a,r} + form.offset * pi(a;r)) to row.
void add_perspective(std::vector<double>& row, const CpLayout& L, const AffineForm& form,
                     std::size_t r, std::size_t a, double coef) {
  row[L.prob(r, a)] += coef * form.offset;
  for (std::size_t k = 0; k < form.coeffs.size(); ++k) row[L.z(r, a, k)] += coef * form.coeffs[k];
}

lp::Problem build_rows(const PAInstance& inst) {
  require_valid(inst);
  const std::size_t nt = inst.num_types();
  const std::size_t na = inst.num_actions();
  const std::size_t d = inst.dim;
  const CpLayout L(inst);
  const std::size_t n = L.num_vars();
  lp::Problem prob(n);

  const Polyhedron hom = homogenize(inst.strategy_space);
  auto place = [&](const lp::Constraint& c, std::size_t t, std::size_t a) {
    std::vector<double> row(n, 0.0);
    for (std::size_t k = 0; k <= d; ++k) row[L.prob(t, a) + k] = c.coeffs[k];
    return row;
  };

  for (std::size_t t = 0; t < nt; ++t) {
    for (std::size_t a = 0; a < na; ++a) {
      for (const auto& c : hom.ineq) prob.add_le(place(c, t, a), c.rhs);
      for (const auto& c : hom.eq) prob.add_eq(place(c, t, a), c.rhs);
    }
  }

  for (std::size_t t = 0; t < nt; ++t) {
    std::vector<double> row(n, 0.0);
    for (std::size_t a = 0; a < na; ++a) row[L.prob(t, a)] = 1.0;
    prob.add_eq(std::move(row), 1.0);
  }

  for (std::size_t t = 0; t < nt; ++t) {
    const auto& c = inst.supplemental_for(t);
    if (!c) continue;
    auto sum_row = [&](const lp::Constraint& con) {
      std::vector<double> row(n, 0.0);
      for (std::size_t a = 0; a < na; ++a)
        for (std::size_t k = 0; k < d; ++k) row[L.z(t, a, k)] = con.coeffs[k];
      return row;
    };
    for (const auto& con : c->ineq) prob.add_le(sum_row(con), con.rhs);
    for (const auto& con : c->eq) prob.add_eq(sum_row(con), con.rhs);
  }

  for (std::size_t t = 0; t < nt; ++t) {
    for (std::size_t a = 0; a < na; ++a) {
      for (const auto& piece : inst.principal_utility(t, a).pieces) {
        std::vector<double> row(n, 0.0);
        row[L.epigraph(t, a)] = 1.0;
        add_perspective(row, L, piece, t, a, -1.0);
        prob.add_le(std::move(row), 0.0);
      }
    }
  }

  // Obedience: the diagonal max-inside-sum row holds iff every recommended
  // action is a best response to its own z.
  for (std::size_t t = 0; t < nt; ++t) {
    for (std::size_t a = 0; a < na; ++a) {
      for (std::size_t b = 0; b < na; ++b) {
        if (b == a) continue;
        std::vector<double> row(n, 0.0);
        add_perspective(row, L, inst.agent_utility(t, b), t, a, 1.0);
        add_perspective(row, L, inst.agent_utility(t, a), t, a, -1.0);
        prob.add_le(std::move(row), 0.0);
      }
    }
  }

  for (std::size_t t = 0; t < nt; ++t) {
    for (std::size_t r = 0; r < nt; ++r) {
      if (r == t) continue;
      for (std::size_t a = 0; a < na; ++a) {
        for (std::size_t b = 0; b < na; ++b) {
          std::vector<double> row(n, 0.0);
          add_perspective(row, L, inst.agent_utility(t, b), r, a, 1.0);
          row[L.deviation(t, r, a)] = -1.0;
          prob.add_le(std::move(row), 0.0);
        }
      }
      std::vector<double> row(n, 0.0);
      for (std::size_t a = 0; a < na; ++a) {
        row[L.deviation(t, r, a)] = 1.0;
        add_perspective(row, L, inst.agent_utility(t, a), t, a, -1.0);
      }
      prob.add_le(std::move(row), 0.0);
    }
  }
  return prob;
}

}  // namespace

lp::Problem build_cp_closure(const PAInstance& inst) {
  lp::Problem prob = build_rows(inst);
  const CpLayout L(inst);
  for (std::size_t t = 0; t < inst.num_types(); ++t)
    for (std::size_t a = 0; a < inst.num_actions(); ++a)
      prob.set_objective_coeff(L.epigraph(t, a), inst.prior[t]);
  return prob;
}

lp::Problem build_margin_cp(const PAInstance& inst, TypeAction pair) {
  if (pair.type >= inst.num_types() || pair.action >= inst.num_actions())
    throw std::out_of_range("pair index out of range");
  lp::Problem prob = build_rows(inst);
  prob.set_objective_coeff(CpLayout(inst).prob(pair.type, pair.action), 1.0);
  return prob;
}

// ---------------------------------------------------------------- solutions

namespace {

double perspective_value(const AffineForm& f, std::span<const double> z, double p) {
  return dot(f.coeffs, z) + f.offset * p;
}

double perspective_value(const ConcavePWL& u, std::span<const double> z, double p) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& piece : u.pieces) best = std::min(best, perspective_value(piece, z, p));
  return best;
}

TransformedSolution empty_solution(const PAInstance& inst) {
  const std::size_t nt = inst.num_types();
  const std::size_t na = inst.num_actions();
  return {PairTable<double>(nt, na, 0.0),
          PairTable<std::vector<double>>(nt, na, std::vector<double>(inst.dim, 0.0)), 0.0};
}

}  // namespace

double transformed_objective(const PAInstance& inst, const TransformedSolution& sol) {
  double total = 0.0;
  for (std::size_t t = 0; t < inst.num_types(); ++t) {
    double per_type = 0.0;
    for (std::size_t a = 0; a < inst.num_actions(); ++a)
      per_type += perspective_value(inst.principal_utility(t, a), sol.z(t, a), sol.probs(t, a));
    total += inst.prior[t] * per_type;
  }
  return total;
}

TransformedSolution extract_transformed(const PAInstance& inst, std::span<const double> primal) {
  const CpLayout L(inst);
  if (primal.size() != L.num_vars()) throw std::invalid_argument("primal has wrong length");
  TransformedSolution sol = empty_solution(inst);
  for (std::size_t t = 0; t < inst.num_types(); ++t) {
    for (std::size_t a = 0; a < inst.num_actions(); ++a) {
      sol.probs(t, a) = primal[L.prob(t, a)];
      for (std::size_t k = 0; k < inst.dim; ++k) sol.z(t, a)[k] = primal[L.z(t, a, k)];
    }
  }
  sol.objective = transformed_objective(inst, sol);
  return sol;
}

double closure_violation(const PAInstance& inst, const TransformedSolution& sol) {
  const std::size_t nt = inst.num_types();
  const std::size_t na = inst.num_actions();
  const std::size_t d = inst.dim;
  const Polyhedron hom = homogenize(inst.strategy_space);
  double worst = 0.0;
  std::vector<double> point(d + 1);
  for (std::size_t t = 0; t < nt; ++t) {
    double sum = 0.0;
    std::vector<double> zsum(d, 0.0);
    for (std::size_t a = 0; a < na; ++a) {
      point[0] = sol.probs(t, a);
      std::copy(sol.z(t, a).begin(), sol.z(t, a).end(), point.begin() + 1);
      worst = std::max(worst, hom.max_violation(point));
      sum += sol.probs(t, a);
      for (std::size_t k = 0; k < d; ++k) zsum[k] += sol.z(t, a)[k];
    }
    worst = std::max(worst, std::abs(sum - 1.0));
    if (const auto& c = inst.supplemental_for(t)) worst = std::max(worst, c->max_violation(zsum));
  }
  for (std::size_t t = 0; t < nt; ++t) {
    double truthful = 0.0;
    for (std::size_t a = 0; a < na; ++a)
      truthful += perspective_value(inst.agent_utility(t, a), sol.z(t, a), sol.probs(t, a));
    for (std::size_t r = 0; r < nt; ++r) {
      double deviation = 0.0;
      for (std::size_t a = 0; a < na; ++a) {
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t b = 0; b < na; ++b)
          best = std::max(best,
                          perspective_value(inst.agent_utility(t, b), sol.z(r, a), sol.probs(r, a)));
        deviation += best;
      }
      worst = std::max(worst, deviation - truthful);
    }
  }
  return worst;
}

TransformedSolution lift(const PAInstance& inst, const SuccinctMechanism& mech) {
  TransformedSolution sol = empty_solution(inst);
  for (std::size_t t = 0; t < inst.num_types(); ++t) {
    for (std::size_t a = 0; a < inst.num_actions(); ++a) {
      const double p = mech.probs(t, a);
      sol.probs(t, a) = p;
      for (std::size_t k = 0; k < inst.dim; ++k) sol.z(t, a)[k] = p * mech.strategies(t, a)[k];
    }
  }
  sol.objective = transformed_objective(inst, sol);
  return sol;
}

TransformedSolution blend(const PAInstance& inst, const TransformedSolution& a,
                          const TransformedSolution& b, double w) {
  TransformedSolution out = empty_solution(inst);
  for (std::size_t t = 0; t < inst.num_types(); ++t) {
    for (std::size_t j = 0; j < inst.num_actions(); ++j) {
      out.probs(t, j) = (1.0 - w) * a.probs(t, j) + w * b.probs(t, j);
      for (std::size_t k = 0; k < inst.dim; ++k)
        out.z(t, j)[k] = (1.0 - w) * a.z(t, j)[k] + w * b.z(t, j)[k];
    }
  }
  out.objective = transformed_objective(inst, out);
  return out;
}

// ---------------------------------------------------------------- regularity

namespace {

double inf_norm(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

std::vector<TypeAction> find_irregular_pairs(const TransformedSolution& sol, double tol_p,
                                             double tol_z) {
  std::vector<TypeAction> out;
  for (std::size_t t = 0; t < sol.probs.num_types(); ++t)
    for (std::size_t a = 0; a < sol.probs.num_actions(); ++a)
      if (sol.probs(t, a) <= tol_p && inf_norm(sol.z(t, a)) >= tol_z) out.push_back({t, a});
  return out;
}

SuccinctMechanism recover_succinct(const TransformedSolution& sol, double tol_p, double tol_z) {
  if (!find_irregular_pairs(sol, tol_p, tol_z).empty())
    throw std::domain_error("solution has an irregular pair; run the repair loop first");
  const std::size_t nt = sol.probs.num_types();
  const std::size_t na = sol.probs.num_actions();
  const std::size_t d = nt && na ? sol.z(0, 0).size() : 0;
  SuccinctMechanism mech(nt, na, d);
  for (std::size_t t = 0; t < nt; ++t) {
    double sum = 0.0;
    for (std::size_t a = 0; a < na; ++a) {
      const double p = sol.probs(t, a);
      if (p <= tol_p) continue;
      mech.probs(t, a) = p;
      sum += p;
      for (std::size_t k = 0; k < d; ++k) mech.strategies(t, a)[k] = sol.z(t, a)[k] / p;
    }
    if (sum <= 0.0) throw std::domain_error("type has no recommended action");
    for (std::size_t a = 0; a < na; ++a) mech.probs(t, a) /= sum;
  }
  return mech;
}

// ---------------------------------------------------------------- algorithm

RepairResult repair_irregular(const PAInstance& inst, const TransformedSolution& optimum,
                              double epsilon, const SolverOptions& opts) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::invalid_argument("epsilon must lie in (0,1)");
  RepairResult res;
  res.solution = optimum;
  std::vector<TransformedSolution> margins;
  const std::size_t cap = inst.num_types() * inst.num_actions();
  for (;;) {
    const auto irregular = find_irregular_pairs(res.solution, opts.tol_p, opts.tol_z);
    if (irregular.empty()) break;
    const TypeAction pair = irregular.front();
    if (std::find(res.repaired_pairs.begin(), res.repaired_pairs.end(), pair) !=
        res.repaired_pairs.end()) {
      throw std::runtime_error("pair (" + inst.actions[pair.action] + ", " +
                               inst.types[pair.type] +
                               ") stays irregular after repair; margin is numerically zero");
    }
    if (res.iterations >= cap) throw std::logic_error("repair loop exceeded |A||Theta| rounds");
    const lp::Solution s = lp::solve(build_margin_cp(inst, pair), opts.lp_tol);
    if (!s.optimal()) throw std::runtime_error("margin program is " + lp::to_string(s.status));
    margins.push_back(extract_transformed(inst, s.primal));
    res.repaired_pairs.push_back(pair);
    res.margin_objectives.push_back(margins.back().objective);
    ++res.iterations;

    TransformedSolution avg = margins.front();
    for (std::size_t i = 1; i < margins.size(); ++i)
      avg = blend(inst, avg, margins[i], 1.0 / static_cast<double>(i + 1));
    res.solution = blend(inst, optimum, avg, epsilon);
  }
  return res;
}

namespace {

std::string diagnose_infeasible(const PAInstance& inst) {
  for (std::size_t t = 0; t < inst.num_types(); ++t) {
    const auto& c = inst.supplemental_for(t);
    if (!c) continue;
    Polyhedron both = inst.strategy_space;
    both.intersect(*c);
    if (both.is_empty()) {
      return "no coordination mechanism exists: the supplemental set of type " + inst.types[t] +
             " does not meet the strategy space";
    }
  }
  return "no coordination mechanism exists: incentive constraints conflict with the "
         "supplemental constraints";
}

}  // namespace

MechanismResult solve_optimal_mechanism(const PAInstance& inst, double epsilon,
                                        const SolverOptions& opts) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::invalid_argument("epsilon must lie in (0,1)");
  require_valid(inst);
  const lp::Solution s = lp::solve(build_cp_closure(inst), opts.lp_tol);
  if (s.status == lp::Status::Infeasible) throw InfeasibleError(diagnose_infeasible(inst));
  if (s.status == lp::Status::Unbounded)
    throw UnboundedError("the principal's optimal utility is unbounded");

  const TransformedSolution best = extract_transformed(inst, s.primal);
  MechanismResult out;
  out.closure_objective = best.objective;

  TransformedSolution final_point = best;
  if (!find_irregular_pairs(best, opts.tol_p, opts.tol_z).empty()) {
    RepairResult rep = repair_irregular(inst, best, epsilon, opts);
    final_point = std::move(rep.solution);
    out.regular = false;
    out.epsilon_used = epsilon;
    out.repaired_pairs = std::move(rep.repaired_pairs);
    out.iterations = rep.iterations;
    double mean = 0.0;
    for (double v : rep.margin_objectives) mean += v;
    mean /= static_cast<double>(rep.margin_objectives.size());
    out.guaranteed_lower_bound = (1.0 - epsilon) * best.objective + epsilon * mean;
  } else {
    out.guaranteed_lower_bound = best.objective;
  }

  out.mechanism = recover_succinct(final_point, opts.tol_p, opts.tol_z);
  out.objective = eval_principal(inst, out.mechanism);
  out.multiplicative_bound_holds =
      out.objective >= (1.0 - out.epsilon_used) * out.closure_objective - 1e-9;
  return out;
}

}  // namespace pacoord
