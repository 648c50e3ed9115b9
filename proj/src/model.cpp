#include "pacoord/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace pacoord {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  const std::size_t n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

double AffineForm::operator()(std::span<const double> x) const {
  return dot(coeffs, x) + offset;
}

double AffineForm::l1_norm() const {
  double s = 0.0;
  for (double c : coeffs) s += std::abs(c);
  return s;
}

ConcavePWL ConcavePWL::affine(AffineForm f) { return ConcavePWL{{std::move(f)}}; }

double ConcavePWL::operator()(std::span<const double> x) const {
  double v = std::numeric_limits<double>::infinity();
  for (const auto& p : pieces) v = std::min(v, p(x));
  return v;
}

std::size_t ConcavePWL::dim() const { return pieces.empty() ? 0 : pieces.front().dim(); }

// ---------------------------------------------------------------- Polyhedron

Polyhedron Polyhedron::whole_space(std::size_t d) { return Polyhedron{d, {}, {}}; }

Polyhedron Polyhedron::nonnegative_orthant(std::size_t d) {
  Polyhedron p{d, {}, {}};
  for (std::size_t i = 0; i < d; ++i) {
    std::vector<double> row(d, 0.0);
    row[i] = -1.0;
    p.add_le(std::move(row), 0.0);
  }
  return p;
}

Polyhedron Polyhedron::simplex(std::size_t d) {
  Polyhedron p = nonnegative_orthant(d);
  p.add_eq(std::vector<double>(d, 1.0), 1.0);
  return p;
}

Polyhedron Polyhedron::box(std::span<const double> lo, std::span<const double> hi) {
  if (lo.size() != hi.size()) throw std::invalid_argument("box bounds differ in length");
  const std::size_t d = lo.size();
  Polyhedron p{d, {}, {}};
  for (std::size_t i = 0; i < d; ++i) {
    std::vector<double> up(d, 0.0), down(d, 0.0);
    up[i] = 1.0;
    down[i] = -1.0;
    p.add_le(std::move(down), -lo[i]);
    p.add_le(std::move(up), hi[i]);
  }
  return p;
}

Polyhedron Polyhedron::point(std::span<const double> pt) {
  const std::size_t d = pt.size();
  Polyhedron p{d, {}, {}};
  for (std::size_t i = 0; i < d; ++i) {
    std::vector<double> row(d, 0.0);
    row[i] = 1.0;
    p.add_eq(std::move(row), pt[i]);
  }
  return p;
}

void Polyhedron::add_le(std::vector<double> row, double rhs) {
  if (row.size() != dim) throw std::invalid_argument("polyhedron row has wrong length");
  ineq.push_back({std::move(row), rhs});
}

void Polyhedron::add_eq(std::vector<double> row, double rhs) {
  if (row.size() != dim) throw std::invalid_argument("polyhedron row has wrong length");
  eq.push_back({std::move(row), rhs});
}

void Polyhedron::intersect(const Polyhedron& other) {
  if (other.dim != dim) throw std::invalid_argument("polyhedra differ in dimension");
  ineq.insert(ineq.end(), other.ineq.begin(), other.ineq.end());
  eq.insert(eq.end(), other.eq.begin(), other.eq.end());
}

double Polyhedron::max_violation(std::span<const double> y) const {
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& c : ineq) worst = std::max(worst, dot(c.coeffs, y) - c.rhs);
  for (const auto& c : eq) worst = std::max(worst, std::abs(dot(c.coeffs, y) - c.rhs));
  return worst == -std::numeric_limits<double>::infinity() ? 0.0 : worst;
}

bool Polyhedron::contains(std::span<const double> y, double tol) const {
  return y.size() == dim && max_violation(y) <= tol;
}

namespace {

lp::Problem feasibility_problem(const Polyhedron& p) {
  lp::Problem prob(p.dim);
  for (const auto& c : p.ineq) prob.add_le(c.coeffs, c.rhs);
  for (const auto& c : p.eq) prob.add_eq(c.coeffs, c.rhs);
  return prob;
}

}  // namespace

bool Polyhedron::is_empty(double tol) const {
  return lp::solve(feasibility_problem(*this), tol).status == lp::Status::Infeasible;
}

bool Polyhedron::is_bounded() const {
  for (std::size_t i = 0; i < dim; ++i) {
    for (double sign : {1.0, -1.0}) {
      lp::Problem prob = feasibility_problem(*this);
      prob.set_objective_coeff(i, sign);
      if (lp::solve(prob).status == lp::Status::Unbounded) return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------- PAInstance

bool PAInstance::has_supplemental() const {
  return std::any_of(supplemental.begin(), supplemental.end(),
                     [](const auto& c) { return c.has_value(); });
}

const std::optional<Polyhedron>& PAInstance::supplemental_for(std::size_t type) const {
  static const std::optional<Polyhedron> none;
  return supplemental.empty() ? none : supplemental.at(type);
}

namespace {

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

void check_polyhedron(const Polyhedron& p, std::size_t d, const std::string& name,
                      std::vector<std::string>& issues) {
  if (p.dim != d) {
    issues.push_back(name + " has dimension " + std::to_string(p.dim) + ", expected " +
                     std::to_string(d));
    return;
  }
  for (const auto* rows : {&p.ineq, &p.eq}) {
    for (const auto& c : *rows) {
      if (c.coeffs.size() != d) {
        issues.push_back(name + " has a row of length " + std::to_string(c.coeffs.size()));
        return;
      }
      if (!all_finite(c.coeffs) || !std::isfinite(c.rhs)) {
        issues.push_back(name + " has a non-finite coefficient");
        return;
      }
    }
  }
}

}  // namespace

ValidationReport validate_instance(const PAInstance& inst) {
  ValidationReport report;
  auto& issues = report.issues;
  const std::size_t nt = inst.num_types();
  const std::size_t na = inst.num_actions();
  const std::size_t d = inst.dim;

  if (nt == 0) issues.push_back("instance has no types");
  if (na == 0) issues.push_back("instance has no actions");
  if (inst.prior.size() != nt) {
    issues.push_back("prior has " + std::to_string(inst.prior.size()) + " entries for " +
                     std::to_string(nt) + " types");
  } else {
    bool negative = false;
    for (double f : inst.prior) negative |= !(f >= 0.0) || !std::isfinite(f);
    if (negative) issues.push_back("prior has a negative or non-finite entry");
    const double sum = std::accumulate(inst.prior.begin(), inst.prior.end(), 0.0);
    if (std::abs(sum - 1.0) > 1e-12) {
      std::ostringstream os;
      os << "prior sums to " << sum;
      issues.push_back(os.str());
    }
  }

  const std::size_t before = issues.size();
  check_polyhedron(inst.strategy_space, d, "strategy space", issues);
  const bool space_ok = issues.size() == before;

  if (inst.principal_utility.num_types() != nt || inst.principal_utility.num_actions() != na) {
    issues.push_back("principal utility table is not types x actions");
  } else {
    for (std::size_t t = 0; t < nt; ++t) {
      for (std::size_t a = 0; a < na; ++a) {
        const auto& u = inst.principal_utility(t, a);
        if (u.pieces.empty()) {
          issues.push_back("principal utility (" + inst.actions[a] + ", " + inst.types[t] +
                           ") has no pieces");
        }
        for (const auto& piece : u.pieces) {
          if (piece.dim() != d || !all_finite(piece.coeffs) || !std::isfinite(piece.offset)) {
            issues.push_back("principal utility (" + inst.actions[a] + ", " + inst.types[t] +
                             ") has a malformed piece");
            break;
          }
        }
      }
    }
  }
  if (inst.agent_utility.num_types() != nt || inst.agent_utility.num_actions() != na) {
    issues.push_back("agent utility table is not types x actions");
  } else {
    for (std::size_t t = 0; t < nt; ++t) {
      for (std::size_t a = 0; a < na; ++a) {
        const auto& v = inst.agent_utility(t, a);
        if (v.dim() != d || !all_finite(v.coeffs) || !std::isfinite(v.offset)) {
          issues.push_back("agent utility (" + inst.actions[a] + ", " + inst.types[t] +
                           ") is malformed");
        }
      }
    }
  }

  if (!inst.supplemental.empty() && inst.supplemental.size() != nt) {
    issues.push_back("supplemental constraints given for " +
                     std::to_string(inst.supplemental.size()) + " of " + std::to_string(nt) +
                     " types");
  } else {
    for (std::size_t t = 0; t < inst.supplemental.size(); ++t) {
      if (!inst.supplemental[t]) continue;
      const std::string name = "supplemental set of type " + inst.types[t];
      const std::size_t mark = issues.size();
      check_polyhedron(*inst.supplemental[t], d, name, issues);
      if (issues.size() == mark && inst.supplemental[t]->is_empty()) {
        issues.push_back("empty " + name);
      }
    }
  }

  if (space_ok && inst.strategy_space.is_empty()) issues.push_back("empty strategy space");

  report.ok = issues.empty();
  return report;
}

void require_valid(const PAInstance& inst) {
  const ValidationReport r = validate_instance(inst);
  if (r.ok) return;
  std::string msg = "invalid instance:";
  for (const auto& issue : r.issues) msg += " " + issue + ";";
  throw std::invalid_argument(msg);
}

// ---------------------------------------------------------------- mechanisms

SuccinctMechanism::SuccinctMechanism(std::size_t num_types, std::size_t num_actions,
                                     std::size_t dim)
    : probs(num_types, num_actions, 0.0),
      strategies(num_types, num_actions, std::vector<double>(dim, 0.0)) {}

void require_structurally_valid(const PAInstance& inst, const SuccinctMechanism& mech,
                                double tol) {
  const std::size_t nt = inst.num_types();
  const std::size_t na = inst.num_actions();
  if (mech.probs.num_types() != nt || mech.probs.num_actions() != na ||
      mech.strategies.num_types() != nt || mech.strategies.num_actions() != na) {
    throw std::invalid_argument("mechanism shape does not match the instance");
  }
  for (std::size_t t = 0; t < nt; ++t) {
    double sum = 0.0;
    for (std::size_t a = 0; a < na; ++a) {
      const double p = mech.probs(t, a);
      if (!(p >= -kProbabilityTol && p <= 1.0 + kProbabilityTol)) {
        throw std::invalid_argument("recommendation probability outside [0,1]");
      }
      sum += p;
      const auto& x = mech.strategies(t, a);
      if (x.size() != inst.dim) throw std::invalid_argument("strategy has wrong dimension");
      if (p > 0.0 && !inst.strategy_space.contains(x, tol)) {
        throw std::invalid_argument("strategy for (" + inst.actions[a] + ", " + inst.types[t] +
                                    ") lies outside the strategy space");
      }
    }
    if (std::abs(sum - 1.0) > kProbabilityTol) {
      throw std::invalid_argument("probabilities of type " + inst.types[t] +
                                  " do not sum to 1");
    }
  }
}

double max_agent_value(const PAInstance& inst, std::span<const double> x, std::size_t type) {
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < inst.num_actions(); ++a) {
    best = std::max(best, inst.agent_utility(type, a)(x));
  }
  return best;
}

BestResponse best_response(const PAInstance& inst, std::span<const double> x,
                           std::size_t type) {
  if (type >= inst.num_types()) throw std::out_of_range("type index out of range");
  if (!inst.strategy_space.contains(x)) {
    throw std::domain_error("strategy lies outside the strategy space");
  }
  BestResponse br{0, inst.agent_utility(type, 0)(x)};
  for (std::size_t a = 1; a < inst.num_actions(); ++a) {
    const double v = inst.agent_utility(type, a)(x);
    if (v > br.value) br = {a, v};
  }
  return br;
}

double agent_truthful_value(const PAInstance& inst, const SuccinctMechanism& mech,
                            std::size_t type) {
  double v = 0.0;
  for (std::size_t a = 0; a < inst.num_actions(); ++a) {
    const double p = mech.probs(type, a);
    if (p != 0.0) v += p * inst.agent_utility(type, a)(mech.strategies(type, a));
  }
  return v;
}

ICReport check_ic(const PAInstance& inst, const SuccinctMechanism& mech, double tol) {
  ICReport report;
  const std::size_t nt = inst.num_types();
  const std::size_t na = inst.num_actions();
  for (std::size_t t = 0; t < nt; ++t) {
    const double truthful = agent_truthful_value(inst, mech, t);
    for (std::size_t r = 0; r < nt; ++r) {
      double deviation = 0.0;
      for (std::size_t a = 0; a < na; ++a) {
        const double p = mech.probs(r, a);
        if (p != 0.0) deviation += p * max_agent_value(inst, mech.strategies(r, a), t);
      }
      const double margin = deviation - truthful;
      report.worst_violation = std::max(report.worst_violation, margin);
      if (margin > tol) report.violating_triplets.push_back({t, r, margin});
    }
  }
  report.feasible = report.worst_violation <= tol;
  return report;
}

double eval_principal(const PAInstance& inst, const SuccinctMechanism& mech) {
  double total = 0.0;
  for (std::size_t t = 0; t < inst.num_types(); ++t) {
    double per_type = 0.0;
    for (std::size_t a = 0; a < inst.num_actions(); ++a) {
      const double p = mech.probs(t, a);
      if (p != 0.0) per_type += p * inst.principal_utility(t, a)(mech.strategies(t, a));
    }
    total += inst.prior[t] * per_type;
  }
  return total;
}

double supplemental_residual(const PAInstance& inst, const SuccinctMechanism& mech) {
  double worst = 0.0;
  for (std::size_t t = 0; t < inst.num_types(); ++t) {
    const auto& c = inst.supplemental_for(t);
    if (!c) continue;
    std::vector<double> mean(inst.dim, 0.0);
    for (std::size_t a = 0; a < inst.num_actions(); ++a) {
      const double p = mech.probs(t, a);
      for (std::size_t k = 0; k < inst.dim; ++k) mean[k] += p * mech.strategies(t, a)[k];
    }
    worst = std::max(worst, c->max_violation(mean));
  }
  return worst;
}

}  // namespace pacoord
