#include "pacoord/applications.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "pacoord/errors.hpp"
#include "pacoord/lp.hpp"
#include "pacoord/mechanism_solver.hpp"

namespace pacoord {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument(msg);
}

void check_prior(const std::vector<double>& prior, std::size_t n, const std::string& what) {
  require(prior.size() == n, what + " has wrong length");
  double sum = 0.0;
  for (double p : prior) {
    require(std::isfinite(p) && p >= 0.0, what + " has a negative or non-finite entry");
    sum += p;
  }
  require(std::abs(sum - 1.0) <= 1e-12, what + " does not sum to 1");
}

void check_table(const PairTable<std::vector<double>>& t, std::size_t nt, std::size_t na,
                 std::size_t len, const std::string& what) {
  require(t.num_types() == nt && t.num_actions() == na, what + " has wrong shape");
  for (const auto& v : t) {
    require(v.size() == len, what + " entry has wrong length");
    for (double x : v) require(std::isfinite(x), what + " has a non-finite entry");
  }
}

std::vector<double> scaled(const std::vector<double>& v, double s) {
  std::vector<double> out(v);
  for (auto& x : out) x *= s;
  return out;
}

PAInstance skeleton(const std::vector<std::string>& types, const std::vector<std::string>& actions,
                    const std::vector<double>& prior, std::size_t dim, Polyhedron X) {
  PAInstance inst;
  inst.types = types;
  inst.actions = actions;
  inst.prior = prior;
  inst.dim = dim;
  inst.strategy_space = std::move(X);
  const AffineForm zero{std::vector<double>(dim, 0.0), 0.0};
  inst.principal_utility = PairTable<ConcavePWL>(types.size(), actions.size(), ConcavePWL::affine(zero));
  inst.agent_utility = PairTable<AffineForm>(types.size(), actions.size(), zero);
  return inst;
}

}  // namespace

// ---------------------------------------------------------------- validation

void validate(const ContractInstance& c) {
  const std::size_t nt = c.types.size(), na = c.actions.size(), d = c.reward.size();
  require(nt > 0 && na > 0 && d > 0, "contract instance needs types, actions and outcomes");
  check_prior(c.prior, nt, "prior");
  for (double r : c.reward) require(std::isfinite(r), "reward is not finite");
  check_table(c.outcome_dist, nt, na, d, "outcome distribution");
  for (const auto& p : c.outcome_dist) {
    double sum = 0.0;
    for (double x : p) {
      require(x >= 0.0, "outcome distribution has a negative entry");
      sum += x;
    }
    require(std::abs(sum - 1.0) <= 1e-12, "outcome distribution does not sum to 1");
  }
  require(c.cost.num_types() == nt && c.cost.num_actions() == na, "cost table has wrong shape");
  for (double x : c.cost) require(std::isfinite(x), "cost is not finite");
}

void validate(const PersuasionInstance& p) {
  const std::size_t nt = p.types.size(), na = p.actions.size(), d = p.states.size();
  require(nt > 0 && na > 0 && d > 0, "persuasion instance needs types, actions and states");
  check_prior(p.prior, nt, "prior");
  require(p.beliefs.size() == nt, "one belief per type is required");
  for (const auto& mu : p.beliefs) check_prior(mu, d, "belief");
  check_table(p.sender, nt, na, d, "sender utility");
  check_table(p.receiver, nt, na, d, "receiver utility");
}

void validate(const StackelbergInstance& s) {
  const std::size_t nt = s.types.size(), na = s.actions.size(), d = s.leader_actions.size();
  require(nt > 0 && na > 0 && d > 0, "Stackelberg instance needs types and actions");
  check_prior(s.prior, nt, "prior");
  check_table(s.leader, nt, na, d, "leader utility");
  check_table(s.follower, nt, na, d, "follower utility");
}

void validate(const SellingInfoInstance& s) {
  const std::size_t nt = s.types.size(), na = s.actions.size(), d = s.states.size();
  require(nt > 0 && na > 0 && d > 0, "selling-information instance needs types, actions and states");
  check_prior(s.prior, nt, "prior");
  check_prior(s.belief, d, "belief");
  check_table(s.value, nt, na, d, "buyer utility");
  if (s.max_price) require(std::isfinite(*s.max_price) && *s.max_price >= 0.0, "max_price must be >= 0");
  if (s.participation) {
    require(std::find(s.types.begin(), s.types.end(), kOptOutType) == s.types.end(),
            std::string("type name ") + kOptOutType + " is reserved");
  }
}

// ---------------------------------------------------------------- reductions

PAInstance contract_to_pa(const ContractInstance& c) {
  validate(c);
  const std::size_t d = c.reward.size();
  PAInstance inst = skeleton(c.types, c.actions, c.prior, d, Polyhedron::nonnegative_orthant(d));
  for (std::size_t t = 0; t < c.types.size(); ++t) {
    for (std::size_t a = 0; a < c.actions.size(); ++a) {
      const auto& P = c.outcome_dist(t, a);
      inst.principal_utility(t, a) = ConcavePWL::affine({scaled(P, -1.0), dot(P, c.reward)});
      inst.agent_utility(t, a) = AffineForm{P, -c.cost(t, a)};
    }
  }
  return inst;
}

PAInstance persuasion_to_pa(const PersuasionInstance& p) {
  validate(p);
  const std::size_t d = p.states.size();
  PAInstance inst = skeleton(p.types, p.actions, p.prior, d, Polyhedron::simplex(d));
  for (std::size_t t = 0; t < p.types.size(); ++t) {
    for (std::size_t a = 0; a < p.actions.size(); ++a) {
      inst.principal_utility(t, a) = ConcavePWL::affine({p.sender(t, a), 0.0});
      inst.agent_utility(t, a) = AffineForm{p.receiver(t, a), 0.0};
    }
    inst.supplemental.push_back(Polyhedron::point(p.beliefs[t]));
  }
  return inst;
}

PAInstance stackelberg_to_pa(const StackelbergInstance& s) {
  validate(s);
  const std::size_t d = s.leader_actions.size();
  PAInstance inst = skeleton(s.types, s.actions, s.prior, d, Polyhedron::simplex(d));
  for (std::size_t t = 0; t < s.types.size(); ++t) {
    for (std::size_t a = 0; a < s.actions.size(); ++a) {
      inst.principal_utility(t, a) = ConcavePWL::affine({s.leader(t, a), 0.0});
      inst.agent_utility(t, a) = AffineForm{s.follower(t, a), 0.0};
    }
  }
  return inst;
}

PAInstance selling_info_to_pa(const SellingInfoInstance& s) {
  validate(s);
  const std::size_t d = s.states.size();
  const std::size_t nt = s.types.size();
  const std::size_t na = s.actions.size();

  // (x, t) with x in the simplex and t >= 0.
  Polyhedron X = Polyhedron::nonnegative_orthant(d + 1);
  std::vector<double> ones(d + 1, 1.0);
  ones[d] = 0.0;
  X.add_eq(ones, 1.0);
  if (s.max_price) {
    std::vector<double> row(d + 1, 0.0);
    row[d] = 1.0;
    X.add_le(row, *s.max_price);
  }

  std::vector<std::string> types = s.types;
  std::vector<double> prior = s.prior;
  if (s.participation) {
    types.emplace_back(kOptOutType);
    prior.push_back(0.0);
  }
  PAInstance inst = skeleton(types, s.actions, prior, d + 1, std::move(X));

  std::vector<double> price(d + 1, 0.0);
  price[d] = 1.0;
  auto belief_rows = [&](Polyhedron& c) {
    for (std::size_t k = 0; k < d; ++k) {
      std::vector<double> row(d + 1, 0.0);
      row[k] = 1.0;
      c.add_eq(row, s.belief[k]);
    }
  };
  for (std::size_t t = 0; t < types.size(); ++t) {
    for (std::size_t a = 0; a < na; ++a) {
      inst.principal_utility(t, a) = ConcavePWL::affine({price, 0.0});
      if (t < nt) {
        std::vector<double> v(s.value(t, a));
        v.push_back(-1.0);
        inst.agent_utility(t, a) = AffineForm{std::move(v), 0.0};
      }
    }
    Polyhedron c = Polyhedron::whole_space(d + 1);
    belief_rows(c);
    if (t >= nt) c.add_eq(price, 0.0);
    inst.supplemental.push_back(std::move(c));
  }
  return inst;
}

double no_information_value(const PersuasionInstance& p) {
  validate(p);
  double total = 0.0;
  for (std::size_t t = 0; t < p.types.size(); ++t) {
    const auto& mu = p.beliefs[t];
    double best_recv = -kInf;
    for (std::size_t a = 0; a < p.actions.size(); ++a)
      best_recv = std::max(best_recv, dot(mu, p.receiver(t, a)));
    double best_send = -kInf;
    for (std::size_t a = 0; a < p.actions.size(); ++a)
      if (dot(mu, p.receiver(t, a)) >= best_recv - 1e-12)
        best_send = std::max(best_send, dot(mu, p.sender(t, a)));
    total += p.prior[t] * best_send;
  }
  return total;
}

// ---------------------------------------------------------------- restricted classes

namespace {

void guard_assignments(const PAInstance& inst) {
  const double count =
      std::pow(static_cast<double>(inst.num_actions()), static_cast<double>(inst.num_types()));
  if (count > kAssignmentGuard) {
    std::ostringstream msg;
    msg << "|A|^|Theta| = " << std::fixed << std::setprecision(0) << count
        << " exceeds the enumeration guard of 1e6";
    throw SizeGuardError(msg.str());
  }
}

// Places `row` (length d) at column offset `at` of an n-vector.
std::vector<double> embed(std::size_t n, std::size_t at, const std::vector<double>& row,
                          double scale = 1.0) {
  std::vector<double> out(n, 0.0);
  for (std::size_t k = 0; k < row.size(); ++k) out[at + k] = scale * row[k];
  return out;
}

void add_polyhedron(lp::Problem& prob, const Polyhedron& P, std::size_t at) {
  const std::size_t n = prob.num_vars();
  for (const auto& c : P.ineq) prob.add_le(embed(n, at, c.coeffs), c.rhs);
  for (const auto& c : P.eq) prob.add_eq(embed(n, at, c.coeffs), c.rhs);
}

// V(x_at, b; t) - V(x_at2, a; t) <= 0 with x blocks at columns `at_b` and `at_a`.
void add_preference(lp::Problem& prob, const PAInstance& inst, std::size_t t, std::size_t b,
                    std::size_t at_b, std::size_t a, std::size_t at_a) {
  const auto& vb = inst.agent_utility(t, b);
  const auto& va = inst.agent_utility(t, a);
  std::vector<double> row = embed(prob.num_vars(), at_b, vb.coeffs);
  for (std::size_t k = 0; k < va.coeffs.size(); ++k) row[at_a + k] -= va.coeffs[k];
  prob.add_le(std::move(row), va.offset - vb.offset);
}

// u_col <= every piece of U(x_at, a; t).
void add_epigraph(lp::Problem& prob, const PAInstance& inst, std::size_t t, std::size_t a,
                  std::size_t at, std::size_t u_col) {
  for (const auto& piece : inst.principal_utility(t, a).pieces) {
    std::vector<double> row = embed(prob.num_vars(), at, piece.coeffs, -1.0);
    row[u_col] = 1.0;
    prob.add_le(std::move(row), piece.offset);
  }
}

// Action-independent program over the listed types, one strategy block per
// listed type followed by one epigraph column per listed type.
lp::Problem menu_program(const PAInstance& inst, const std::vector<std::size_t>& types,
                         const std::vector<std::size_t>& actions,
                         const std::vector<double>& weights) {
  const std::size_t m = types.size();
  const std::size_t d = inst.dim;
  const std::size_t na = inst.num_actions();
  lp::Problem prob(m * d + m);
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t t = types[i];
    const std::size_t at = i * d;
    add_polyhedron(prob, inst.strategy_space, at);
    if (const auto& c = inst.supplemental_for(t)) add_polyhedron(prob, *c, at);
    add_epigraph(prob, inst, t, actions[i], at, m * d + i);
    prob.set_objective_coeff(m * d + i, weights[i]);
    for (std::size_t j = 0; j < m; ++j)
      for (std::size_t b = 0; b < na; ++b)
        if (j != i || b != actions[i]) add_preference(prob, inst, t, b, j * d, actions[i], at);
  }
  return prob;
}

struct Search {
  double best = -kInf;
  std::vector<std::size_t> best_assignment;
  std::vector<double> best_primal;
};

}  // namespace

RestrictedResult solve_action_independent(const PAInstance& inst) {
  require_valid(inst);
  guard_assignments(inst);
  const std::size_t nt = inst.num_types();
  const std::size_t na = inst.num_actions();
  const std::size_t d = inst.dim;

  // Per-pair upper bounds on U with only the type's own constraints.
  PairTable<double> ub(nt, na, -kInf);
  for (std::size_t t = 0; t < nt; ++t) {
    for (std::size_t a = 0; a < na; ++a) {
      const auto s = lp::solve(menu_program(inst, {t}, {a}, {1.0}));
      if (s.status == lp::Status::Optimal) ub(t, a) = s.objective_value;
      if (s.status == lp::Status::Unbounded) ub(t, a) = kInf;
    }
  }
  // compatible[(t,a)][(t2,a2)] for t < t2: the two-type menu is feasible.
  std::vector<std::vector<char>> compatible(nt * na, std::vector<char>(nt * na, 1));
  for (std::size_t t = 0; t < nt; ++t)
    for (std::size_t t2 = t + 1; t2 < nt; ++t2)
      for (std::size_t a = 0; a < na; ++a)
        for (std::size_t a2 = 0; a2 < na; ++a2) {
          if (ub(t, a) == -kInf || ub(t2, a2) == -kInf) {
            compatible[t * na + a][t2 * na + a2] = 0;
            continue;
          }
          const auto s = lp::solve(menu_program(inst, {t, t2}, {a, a2}, {0.0, 0.0}));
          compatible[t * na + a][t2 * na + a2] = s.status != lp::Status::Infeasible;
        }

  std::vector<double> best_rest(nt + 1, 0.0);
  for (std::size_t t = nt; t-- > 0;) {
    double m = -kInf;
    for (std::size_t a = 0; a < na; ++a) m = std::max(m, ub(t, a));
    best_rest[t] = best_rest[t + 1] + (inst.prior[t] > 0.0 ? inst.prior[t] * m : 0.0);
  }

  std::vector<std::size_t> all_types(nt);
  std::iota(all_types.begin(), all_types.end(), 0);
  Search search;
  std::vector<std::size_t> assign(nt);
  std::function<void(std::size_t, double)> dfs = [&](std::size_t t, double bound_so_far) {
    if (t == nt) {
      const auto s = lp::solve(menu_program(inst, all_types, assign, inst.prior));
      if (s.status == lp::Status::Unbounded)
        throw UnboundedError("the principal's optimal utility is unbounded");
      if (s.optimal() && s.objective_value > search.best + 1e-12) {
        search.best = s.objective_value;
        search.best_assignment = assign;
        search.best_primal = s.primal;
      }
      return;
    }
    std::vector<std::size_t> order(na);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return ub(t, x) > ub(t, y); });
    for (std::size_t a : order) {
      if (ub(t, a) == -kInf) continue;
      bool ok = true;
      for (std::size_t s = 0; s < t && ok; ++s) ok = compatible[s * na + assign[s]][t * na + a];
      if (!ok) continue;
      const double here = inst.prior[t] > 0.0 ? inst.prior[t] * ub(t, a) : 0.0;
      const double bound = bound_so_far + here + best_rest[t + 1];
      if (bound <= search.best + 1e-9) continue;
      assign[t] = a;
      dfs(t + 1, bound_so_far + here);
    }
  };
  dfs(0, 0.0);
  if (search.best == -kInf) throw InfeasibleError("no action-independent mechanism is feasible");

  RestrictedResult out;
  out.value = search.best;
  out.assignment = search.best_assignment;
  for (std::size_t t = 0; t < nt; ++t)
    out.strategies.emplace_back(search.best_primal.begin() + t * d,
                                search.best_primal.begin() + (t + 1) * d);
  return out;
}

namespace {

// Single-strategy program over the listed types: x block, then one epigraph
// column per listed type.
lp::Problem shared_program(const PAInstance& inst, const std::vector<std::size_t>& types,
                           const std::vector<std::size_t>& actions,
                           const std::vector<double>& weights) {
  const std::size_t m = types.size();
  const std::size_t d = inst.dim;
  lp::Problem prob(d + m);
  add_polyhedron(prob, inst.strategy_space, 0);
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t t = types[i];
    for (std::size_t b = 0; b < inst.num_actions(); ++b)
      if (b != actions[i]) add_preference(prob, inst, t, b, 0, actions[i], 0);
    add_epigraph(prob, inst, t, actions[i], 0, d + i);
    prob.set_objective_coeff(d + i, weights[i]);
  }
  return prob;
}

// All response profiles whose region of X is nonempty.
std::vector<std::vector<std::size_t>> nonempty_profiles(const PAInstance& inst) {
  const std::size_t nt = inst.num_types();
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> assign(nt);
  std::function<void(std::size_t)> dfs = [&](std::size_t t) {
    if (t == nt) {
      out.push_back(assign);
      return;
    }
    for (std::size_t a = 0; a < inst.num_actions(); ++a) {
      assign[t] = a;
      const std::vector<std::size_t> prefix(assign.begin(), assign.begin() + t + 1);
      std::vector<std::size_t> types(t + 1);
      std::iota(types.begin(), types.end(), 0);
      const auto prob = shared_program(inst, types, prefix, std::vector<double>(t + 1, 0.0));
      if (lp::solve(prob).status != lp::Status::Infeasible) dfs(t + 1);
    }
  };
  dfs(0);
  return out;
}

RestrictedResult shared_lottery(const PAInstance& inst) {
  const std::size_t nt = inst.num_types();
  const std::size_t d = inst.dim;
  const auto profiles = nonempty_profiles(inst);
  if (profiles.empty()) throw InfeasibleError("no type-independent mechanism is feasible");
  const std::size_t block = 1 + d + nt;  // lambda, z, epigraph per type
  const std::size_t n = profiles.size() * block;
  lp::Problem prob(n);
  const Polyhedron hom = homogenize(inst.strategy_space);
  std::vector<double> mass(n, 0.0);
  for (std::size_t s = 0; s < profiles.size(); ++s) {
    const std::size_t at = s * block;
    add_polyhedron(prob, hom, at);
    mass[at] = 1.0;
    for (std::size_t t = 0; t < nt; ++t) {
      const std::size_t a = profiles[s][t];
      const auto& va = inst.agent_utility(t, a);
      for (std::size_t b = 0; b < inst.num_actions(); ++b) {
        if (b == a) continue;
        const auto& vb = inst.agent_utility(t, b);
        std::vector<double> row(n, 0.0);
        row[at] = vb.offset - va.offset;
        for (std::size_t k = 0; k < d; ++k) row[at + 1 + k] = vb.coeffs[k] - va.coeffs[k];
        prob.add_le(std::move(row), 0.0);
      }
      const std::size_t u = at + 1 + d + t;
      for (const auto& piece : inst.principal_utility(t, a).pieces) {
        std::vector<double> row(n, 0.0);
        row[u] = 1.0;
        row[at] = -piece.offset;
        for (std::size_t k = 0; k < d; ++k) row[at + 1 + k] = -piece.coeffs[k];
        prob.add_le(std::move(row), 0.0);
      }
      prob.set_objective_coeff(u, inst.prior[t]);
    }
  }
  prob.add_eq(mass, 1.0);
  for (std::size_t t = 0; t < nt; ++t) {
    const auto& c = inst.supplemental_for(t);
    if (!c) continue;
    auto spread = [&](const lp::Constraint& con) {
      std::vector<double> row(n, 0.0);
      for (std::size_t s = 0; s < profiles.size(); ++s)
        for (std::size_t k = 0; k < d; ++k) row[s * block + 1 + k] = con.coeffs[k];
      return row;
    };
    for (const auto& con : c->ineq) prob.add_le(spread(con), con.rhs);
    for (const auto& con : c->eq) prob.add_eq(spread(con), con.rhs);
  }
  const auto sol = lp::solve(prob);
  if (sol.status == lp::Status::Infeasible)
    throw InfeasibleError("no type-independent mechanism is feasible");
  if (sol.status == lp::Status::Unbounded)
    throw UnboundedError("the principal's optimal utility is unbounded");

  RestrictedResult out;
  out.value = sol.objective_value;
  double heaviest = -1.0;
  for (std::size_t s = 0; s < profiles.size(); ++s) {
    const double lam = sol.primal[s * block];
    if (lam <= 1e-9) continue;
    std::vector<double> x(d);
    for (std::size_t k = 0; k < d; ++k) x[k] = sol.primal[s * block + 1 + k] / lam;
    out.lottery.emplace_back(lam, x);
    if (lam > heaviest) {
      heaviest = lam;
      out.assignment = profiles[s];
    }
  }
  out.strategies.assign(nt, out.lottery.empty() ? std::vector<double>(d, 0.0)
                                                : out.lottery.front().second);
  return out;
}

}  // namespace

RestrictedResult solve_type_independent(const PAInstance& inst) {
  require_valid(inst);
  guard_assignments(inst);
  if (inst.has_supplemental()) return shared_lottery(inst);

  const std::size_t nt = inst.num_types();
  const std::size_t na = inst.num_actions();
  const std::size_t d = inst.dim;
  PairTable<double> ub(nt, na, -kInf);
  for (std::size_t t = 0; t < nt; ++t) {
    for (std::size_t a = 0; a < na; ++a) {
      const auto s = lp::solve(shared_program(inst, {t}, {a}, {1.0}));
      if (s.status == lp::Status::Optimal) ub(t, a) = s.objective_value;
      if (s.status == lp::Status::Unbounded) ub(t, a) = kInf;
    }
  }
  std::vector<std::size_t> all_types(nt);
  std::iota(all_types.begin(), all_types.end(), 0);
  std::vector<double> best_rest(nt + 1, 0.0);
  for (std::size_t t = nt; t-- > 0;) {
    double m = -kInf;
    for (std::size_t a = 0; a < na; ++a) m = std::max(m, ub(t, a));
    best_rest[t] = best_rest[t + 1] + (inst.prior[t] > 0.0 ? inst.prior[t] * m : 0.0);
  }

  Search search;
  std::vector<std::size_t> assign(nt);
  std::function<void(std::size_t, double)> dfs = [&](std::size_t t, double bound_so_far) {
    if (t == nt) {
      const auto s = lp::solve(shared_program(inst, all_types, assign, inst.prior));
      if (s.status == lp::Status::Unbounded)
        throw UnboundedError("the principal's optimal utility is unbounded");
      if (s.optimal() && s.objective_value > search.best + 1e-12) {
        search.best = s.objective_value;
        search.best_assignment = assign;
        search.best_primal = s.primal;
      }
      return;
    }
    for (std::size_t a = 0; a < na; ++a) {
      if (ub(t, a) == -kInf) continue;
      const double here = inst.prior[t] > 0.0 ? inst.prior[t] * ub(t, a) : 0.0;
      if (bound_so_far + here + best_rest[t + 1] <= search.best + 1e-9) continue;
      assign[t] = a;
      if (t + 1 < nt) {
        const std::vector<std::size_t> types(all_types.begin(), all_types.begin() + t + 1);
        const std::vector<std::size_t> prefix(assign.begin(), assign.begin() + t + 1);
        const auto partial = shared_program(inst, types, prefix, std::vector<double>(t + 1, 0.0));
        if (lp::solve(partial).status == lp::Status::Infeasible) continue;
      }
      dfs(t + 1, bound_so_far + here);
    }
  };
  dfs(0, 0.0);
  if (search.best == -kInf) throw InfeasibleError("no type-independent mechanism is feasible");

  RestrictedResult out;
  out.value = search.best;
  out.assignment = search.best_assignment;
  out.strategies.assign(nt, std::vector<double>(search.best_primal.begin(),
                                                search.best_primal.begin() + d));
  return out;
}

// ---------------------------------------------------------------- hardness

StackelbergInstance gen_stackelberg_hardness(const Graph& g) {
  const std::size_t K = g.num_nodes;
  if (K == 0) throw std::invalid_argument("graph must have at least one node");
  const auto adj = g.adjacency();
  StackelbergInstance s;
  for (std::size_t v = 0; v < K; ++v) s.leader_actions.push_back("a" + std::to_string(v));
  for (std::size_t v = 0; v < K; ++v) s.leader_actions.push_back("b" + std::to_string(v));
  for (std::size_t v = 0; v < K; ++v) s.types.push_back("theta" + std::to_string(v));
  s.actions = {"1F", "2F", "3F"};
  s.prior.assign(K, 1.0 / static_cast<double>(K));
  s.leader = PairTable<std::vector<double>>(K, 3, std::vector<double>(2 * K, 0.0));
  s.follower = PairTable<std::vector<double>>(K, 3, std::vector<double>(2 * K, 0.0));
  for (std::size_t v = 0; v < K; ++v) {
    for (std::size_t i = 0; i < 2 * K; ++i) s.leader(v, 0)[i] = 1.0;
    for (std::size_t i = 0; i < 2 * K; ++i) {
      double row[3] = {0.0, 0.0, 0.1};
      if (i == v) {
        row[0] = row[1] = row[2] = 0.1;
      } else if (i == K + v) {
        row[0] = 0.0;
        row[1] = row[2] = 1.0;
      } else if (i < K && adj[v][i]) {
        row[0] = 0.5;
        row[1] = 0.0;
        row[2] = 1.0;
      }
      for (std::size_t a = 0; a < 3; ++a) s.follower(v, a)[i] = row[a];
    }
  }
  return s;
}

}  // namespace pacoord
