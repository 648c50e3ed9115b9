#include "pacoord/info_acquisition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "pacoord/lp.hpp"
#include "pacoord/oracles.hpp"

namespace pacoord {

double Partition::evaluate(std::span<const double> sigma, double tol) const {
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& c : cells)
    if (c.region.contains(sigma, tol)) best = std::max(best, c.utility(sigma));
  if (best == -std::numeric_limits<double>::infinity())
    throw std::domain_error("belief is not covered by the partition");
  return best;
}

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument(msg);
}

void check_matrix(const std::vector<std::vector<double>>& m, std::size_t rows, std::size_t cols,
                  const std::string& what) {
  require(m.size() == rows, what + " needs one row per action");
  for (const auto& r : m) {
    require(r.size() == cols, what + " row has wrong length");
    for (double v : r) require(std::isfinite(v), what + " has a non-finite entry");
  }
}

void check_belief(std::span<const double> f, std::size_t d) {
  if (f.size() != d) throw std::domain_error("prior has wrong dimension");
  double sum = 0.0;
  for (double v : f) {
    if (!(v >= 0.0)) throw std::domain_error("prior has a negative entry");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw std::domain_error("prior does not sum to 1");
}

// Cells where action i maximizes choice . sigma, scored by score[i] . sigma.
Partition best_response_cells(const std::vector<std::string>& actions,
                              const std::vector<std::vector<double>>& choice,
                              const std::vector<std::vector<double>>& score, std::size_t d) {
  Partition part;
  part.dim = d;
  for (std::size_t i = 0; i < actions.size(); ++i) {
    Polyhedron region = Polyhedron::simplex(d);
    for (std::size_t b = 0; b < actions.size(); ++b) {
      if (b == i) continue;
      std::vector<double> row(d);
      for (std::size_t k = 0; k < d; ++k) row[k] = choice[b][k] - choice[i][k];
      region.add_le(std::move(row), 0.0);
    }
    part.cells.push_back({actions[i], std::move(region), ConcavePWL::affine({score[i], 0.0})});
  }
  return part;
}

}  // namespace

void validate(const DecisionProblem& dp) {
  require(!dp.states.empty() && !dp.actions.empty(), "decision problem needs states and actions");
  check_matrix(dp.utility, dp.actions.size(), dp.states.size(), "utility");
  if (!dp.prior.empty()) check_belief(dp.prior, dp.states.size());
}

void validate(const PersuasionBase& bp) {
  require(!bp.states.empty() && !bp.actions.empty(), "persuasion base needs states and actions");
  check_matrix(bp.sender, bp.actions.size(), bp.states.size(), "sender utility");
  check_matrix(bp.receiver, bp.actions.size(), bp.states.size(), "receiver utility");
  if (!bp.prior.empty()) check_belief(bp.prior, bp.states.size());
}

Partition partition_decision_problem(const DecisionProblem& dp) {
  validate(dp);
  return best_response_cells(dp.actions, dp.utility, dp.utility, dp.states.size());
}

Partition partition_costly_persuasion(const PersuasionBase& bp) {
  validate(bp);
  return best_response_cells(bp.actions, bp.receiver, bp.sender, bp.states.size());
}

double negative_entropy(std::span<const double> sigma) {
  double h = 0.0;
  for (double s : sigma)
    if (s > 0.0) h += s * std::log(s);
  return h;
}

// ---------------------------------------------------------------- costs

CostSpec CostSpec::zero() { return CostSpec{}; }

CostSpec CostSpec::piecewise(std::vector<AffineForm> pieces) {
  if (pieces.empty()) throw std::invalid_argument("cost not max-of-affines: no pieces");
  for (const auto& p : pieces) {
    if (p.dim() != pieces.front().dim())
      throw std::invalid_argument("cost not max-of-affines: pieces differ in dimension");
    for (double c : p.coeffs)
      if (!std::isfinite(c)) throw std::invalid_argument("cost not max-of-affines: non-finite coefficient");
    if (!std::isfinite(p.offset)) throw std::invalid_argument("cost not max-of-affines: non-finite offset");
  }
  CostSpec c;
  c.kind = Kind::PiecewiseConvex;
  c.pieces = std::move(pieces);
  return c;
}

CostSpec CostSpec::entropy(std::size_t n, std::size_t dim) {
  if (dim == 0) throw std::invalid_argument("entropy cost needs at least one state");
  if (n < dim) throw std::invalid_argument("entropy grid needs at least one point per state");
  CostSpec c;
  c.kind = Kind::EntropyApprox;
  c.grid = n;
  if (dim == 1) {
    c.pieces.push_back({{0.0}, 0.0});
    return c;
  }
  for_each_simplex_point(dim, n, [&](std::span<const double> s) {
    if (std::any_of(s.begin(), s.end(), [](double v) { return v <= 0.0; })) return;
    AffineForm tangent{std::vector<double>(dim), -1.0};
    for (std::size_t k = 0; k < dim; ++k) tangent.coeffs[k] = std::log(s[k]) + 1.0;
    c.pieces.push_back(std::move(tangent));
  });
  std::size_t fine = 4 * n;
  while (fine > n && GridSpec::on_simplex(1.0 / static_cast<double>(fine)).count(dim) > 200'000)
    fine /= 2;
  for_each_simplex_point(dim, fine, [&](std::span<const double> s) {
    c.gap = std::max(c.gap, negative_entropy(s) - c(s));
  });
  return c;
}

double CostSpec::operator()(std::span<const double> sigma) const {
  if (kind == Kind::Zero) return 0.0;
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& p : pieces) best = std::max(best, p(sigma));
  return best;
}

double CostSpec::exact(std::span<const double> sigma) const {
  return kind == Kind::EntropyApprox ? negative_entropy(sigma) : (*this)(sigma);
}

double perspective_on_simplex(const std::function<double(std::span<const double>)>& h,
                              std::span<const double> g) {
  double t = 0.0;
  for (double v : g) {
    if (v < 0.0) throw std::domain_error("perspective argument has a negative entry");
    t += v;
  }
  if (t == 0.0) return 0.0;
  std::vector<double> s(g.begin(), g.end());
  for (auto& v : s) v /= t;
  return t * h(s);
}

// ---------------------------------------------------------------- solver

Experiment solve_info_acquisition(const Partition& part, const CostSpec& cost,
                                  std::span<const double> prior) {
  if (part.cells.empty()) throw std::domain_error("partition has no cells");
  const std::size_t d = part.dim;
  check_belief(prior, d);
  const bool costly = cost.kind != CostSpec::Kind::Zero;
  if (costly)
    for (const auto& p : cost.pieces)
      if (p.dim() != d) throw std::invalid_argument("cost pieces have wrong dimension");

  // Per cell: g (d columns), utility epigraph, cost hypograph when costly.
  const std::size_t block = d + 1 + (costly ? 1 : 0);
  const std::size_t n = part.cells.size() * block;
  lp::Problem prob(n);

  // a . g + offset * sum(g) at columns starting from `at`.
  auto homogeneous = [&](const std::vector<double>& coeffs, double offset, std::size_t at, double sign) {
    std::vector<double> row(n, 0.0);
    for (std::size_t k = 0; k < d; ++k) row[at + k] = sign * (coeffs[k] + offset);
    return row;
  };

  for (std::size_t i = 0; i < part.cells.size(); ++i) {
    const auto& cell = part.cells[i];
    if (cell.region.dim != d || cell.utility.dim() != d)
      throw std::invalid_argument("partition cell has wrong dimension");
    const std::size_t at = i * block;
    for (std::size_t k = 0; k < d; ++k) prob.set_lower(at + k, 0.0);
    for (const auto& c : cell.region.ineq) prob.add_le(homogeneous(c.coeffs, -c.rhs, at, 1.0), 0.0);
    for (const auto& c : cell.region.eq) prob.add_eq(homogeneous(c.coeffs, -c.rhs, at, 1.0), 0.0);
    const std::size_t u = at + d;
    for (const auto& piece : cell.utility.pieces) {
      auto row = homogeneous(piece.coeffs, piece.offset, at, -1.0);
      row[u] = 1.0;
      prob.add_le(std::move(row), 0.0);
    }
    prob.set_objective_coeff(u, 1.0);
    if (costly) {
      const std::size_t c = at + d + 1;
      for (const auto& piece : cost.pieces) {
        auto row = homogeneous(piece.coeffs, piece.offset, at, 1.0);
        row[c] = -1.0;
        prob.add_le(std::move(row), 0.0);
      }
      prob.set_objective_coeff(c, -1.0);
    }
  }
  for (std::size_t k = 0; k < d; ++k) {
    std::vector<double> row(n, 0.0);
    for (std::size_t i = 0; i < part.cells.size(); ++i) row[i * block + k] = 1.0;
    prob.add_eq(std::move(row), prior[k]);
  }

  const auto s = lp::solve(prob);
  if (!s.optimal())
    throw std::domain_error("acquisition program is " + lp::to_string(s.status) +
                            "; the partition does not cover the prior");

  struct Signal {
    double p;
    std::vector<double> sigma;
    std::size_t cell;
  };
  std::vector<Signal> raw;
  for (std::size_t i = 0; i < part.cells.size(); ++i) {
    const std::size_t at = i * block;
    std::vector<double> g(s.primal.begin() + at, s.primal.begin() + at + d);
    for (auto& v : g) v = std::max(v, 0.0);
    double p = 0.0;
    for (double v : g) p += v;
    if (p <= 1e-12) continue;
    for (auto& v : g) v /= p;
    raw.push_back({p, std::move(g), i});
  }

  // Without a cost, a posterior in a cell with affine utility can be split
  // into the simplex corners it mixes whenever those corners lie in the same
  // cell; the value is unchanged and the experiment is more informative.
  std::vector<Signal> signals;
  for (auto& sig : raw) {
    const auto& cell = part.cells[sig.cell];
    bool split = !costly && cell.utility.pieces.size() == 1;
    for (std::size_t k = 0; k < d && split; ++k) {
      if (sig.sigma[k] <= 0.0) continue;
      std::vector<double> corner(d, 0.0);
      corner[k] = 1.0;
      split = cell.region.contains(corner);
    }
    if (!split) {
      signals.push_back(std::move(sig));
      continue;
    }
    for (std::size_t k = 0; k < d; ++k) {
      if (sig.sigma[k] <= 0.0) continue;
      std::vector<double> corner(d, 0.0);
      corner[k] = 1.0;
      signals.push_back({sig.p * sig.sigma[k], std::move(corner), sig.cell});
    }
  }
  std::vector<Signal> merged;
  for (auto& sig : signals) {
    auto same = std::find_if(merged.begin(), merged.end(), [&](const Signal& m) {
      for (std::size_t k = 0; k < d; ++k)
        if (std::abs(m.sigma[k] - sig.sigma[k]) > 1e-12) return false;
      return true;
    });
    if (same == merged.end()) merged.push_back(std::move(sig));
    else same->p += sig.p;
  }

  Experiment e;
  e.gap = cost.gap;
  double weighted_cost = 0.0;
  for (auto& sig : merged) {
    const double h = cost(sig.sigma);
    e.value += sig.p * (part.cells[sig.cell].utility(sig.sigma) - h);
    weighted_cost += sig.p * h;
    e.signals.emplace_back(sig.p, std::move(sig.sigma));
    e.cells.push_back(sig.cell);
  }
  e.cost_term = weighted_cost - cost(prior);
  return e;
}

// ---------------------------------------------------------------- hardness

ConcavificationHardness gen_concavification_hardness(const Graph& g) {
  const std::size_t k = g.num_nodes;
  if (k == 0) throw std::invalid_argument("graph must have at least one node");
  const auto adj = g.adjacency();
  // term i: sigma_i - sum_j e_ij sigma_j
  std::vector<std::vector<double>> terms(k, std::vector<double>(k, 0.0));
  for (std::size_t i = 0; i < k; ++i) {
    terms[i][i] = 1.0;
    for (std::size_t j = 0; j < k; ++j)
      if (adj[i][j]) terms[i][j] -= 1.0;
  }
  ConcavificationHardness out;
  out.k = k;
  out.u_star = [terms](std::span<const double> x) {
    double total = 0.0;
    for (const auto& t : terms) total += std::max(dot(t, x), 0.0);
    return total;
  };
  if (k <= 12) {
    std::vector<AffineForm> pieces;
    for (std::size_t mask = 0; mask < (std::size_t{1} << k); ++mask) {
      AffineForm f{std::vector<double>(k, 0.0), 0.0};
      for (std::size_t i = 0; i < k; ++i)
        if (mask >> i & 1)
          for (std::size_t j = 0; j < k; ++j) f.coeffs[j] += terms[i][j];
      pieces.push_back(std::move(f));
    }
    out.u_star_pieces = std::move(pieces);
  }
  std::vector<AffineForm> h;
  for (std::size_t i = 0; i < k; ++i) {
    AffineForm f{std::vector<double>(k, 0.0), -1.0 / static_cast<double>(k)};
    f.coeffs[i] = 1.0;
    h.push_back(std::move(f));
  }
  h.push_back({std::vector<double>(k, 0.0), 0.0});
  out.cost = CostSpec::piecewise(std::move(h));
  return out;
}

}  // namespace pacoord
