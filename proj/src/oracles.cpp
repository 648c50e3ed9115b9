#include "pacoord/oracles.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

#include "pacoord/errors.hpp"
#include "pacoord/lp.hpp"

namespace pacoord {

namespace {

std::size_t denominator(double step) {
  if (!(step > 0.0) || step > 1.0) throw std::invalid_argument("grid step must lie in (0,1]");
  const double n = std::round(1.0 / step);
  if (std::abs(n * step - 1.0) > 1e-9) throw std::invalid_argument("simplex grid step must be 1/N");
  return static_cast<std::size_t>(n);
}

// Binomial coefficient in floating point (only used against the cap).
double binom(double n, double k) {
  double r = 1.0;
  for (double i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

std::size_t axis_count(double lo, double hi, double step) {
  if (hi < lo) throw std::invalid_argument("grid box has hi < lo");
  return static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
}

}  // namespace

GridSpec GridSpec::on_simplex(double step) { return GridSpec{step, true, {}}; }

GridSpec GridSpec::on_box(double step, std::vector<std::pair<double, double>> box) {
  return GridSpec{step, false, std::move(box)};
}

std::size_t GridSpec::count(std::size_t dim) const {
  if (!(step > 0.0)) throw std::invalid_argument("grid step must be positive");
  double total;
  if (simplex) {
    const double N = static_cast<double>(denominator(step));
    total = binom(N + static_cast<double>(dim) - 1, static_cast<double>(dim) - 1);
  } else {
    if (box.size() != dim) throw std::invalid_argument("grid box has wrong dimension");
    total = 1.0;
    for (auto [lo, hi] : box) total *= static_cast<double>(axis_count(lo, hi, step));
  }
  if (total > static_cast<double>(kGridCap)) {
    throw SizeGuardError("grid has " + std::to_string(total) + " points, above the cap of 1e6");
  }
  return static_cast<std::size_t>(total);
}

void for_each_simplex_point(std::size_t d, std::size_t N,
                            const std::function<void(std::span<const double>)>& fn) {
  if (d == 0) return;
  std::vector<std::size_t> c(d, 0);
  std::vector<double> x(d);
  c[d - 1] = N;
  const double inv = 1.0 / static_cast<double>(N);
  for (;;) {
    for (std::size_t i = 0; i < d; ++i) x[i] = static_cast<double>(c[i]) * inv;
    fn(x);
    // Next composition in reverse-lexicographic order of the tail.
    std::size_t i = d - 1;
    while (i > 0 && c[i] == 0) --i;
    if (i == 0) return;
    const std::size_t tail = c[i];
    c[i] = 0;
    ++c[i - 1];
    c[d - 1] = tail - 1;
  }
}

std::vector<std::vector<double>> grid_points(const GridSpec& grid, std::size_t dim) {
  const std::size_t total = grid.count(dim);
  std::vector<std::vector<double>> out;
  out.reserve(total);
  if (grid.simplex) {
    for_each_simplex_point(dim, denominator(grid.step),
                           [&](std::span<const double> x) { out.emplace_back(x.begin(), x.end()); });
    return out;
  }
  std::vector<std::size_t> n(dim), idx(dim, 0);
  for (std::size_t k = 0; k < dim; ++k) n[k] = axis_count(grid.box[k].first, grid.box[k].second, grid.step);
  for (std::size_t p = 0; p < total; ++p) {
    std::vector<double> x(dim);
    for (std::size_t k = 0; k < dim; ++k)
      x[k] = std::min(grid.box[k].second, grid.box[k].first + static_cast<double>(idx[k]) * grid.step);
    out.push_back(std::move(x));
    for (std::size_t k = dim; k-- > 0;) {
      if (++idx[k] < n[k]) break;
      idx[k] = 0;
    }
  }
  return out;
}

double myerson_grid_lp(const PAInstance& inst, const GridSpec& grid) {
  require_valid(inst);
  std::vector<std::vector<double>> pts;
  for (auto& x : grid_points(grid, inst.dim))
    if (inst.strategy_space.contains(x)) pts.push_back(std::move(x));
  if (pts.empty()) throw InfeasibleError("no grid point lies in the strategy space");

  const std::size_t nt = inst.num_types();
  const std::size_t na = inst.num_actions();
  const std::size_t G = pts.size();
  const std::size_t n = nt * G * na;
  auto col = [&](std::size_t t, std::size_t g, std::size_t a) { return (t * G + g) * na + a; };

  lp::Problem prob(n);
  for (std::size_t j = 0; j < n; ++j) prob.set_lower(j, 0.0);
  // V(x, a; t) and max_b V(x, b; t) per grid point.
  std::vector<double> own(nt * G * na), best(nt * G);
  for (std::size_t t = 0; t < nt; ++t)
    for (std::size_t g = 0; g < G; ++g) {
      best[t * G + g] = max_agent_value(inst, pts[g], t);
      for (std::size_t a = 0; a < na; ++a) own[col(t, g, a)] = inst.agent_utility(t, a)(pts[g]);
    }

  for (std::size_t t = 0; t < nt; ++t) {
    std::vector<double> row(n, 0.0);
    for (std::size_t g = 0; g < G; ++g)
      for (std::size_t a = 0; a < na; ++a) {
        row[col(t, g, a)] = 1.0;
        prob.set_objective_coeff(col(t, g, a), inst.prior[t] * inst.principal_utility(t, a)(pts[g]));
      }
    prob.add_eq(std::move(row), 1.0);
  }
  for (std::size_t t = 0; t < nt; ++t) {
    for (std::size_t r = 0; r < nt; ++r) {
      std::vector<double> row(n, 0.0);
      for (std::size_t g = 0; g < G; ++g)
        for (std::size_t a = 0; a < na; ++a) {
          row[col(r, g, a)] += best[t * G + g];
          row[col(t, g, a)] -= own[col(t, g, a)];
        }
      prob.add_le(std::move(row), 0.0);
    }
  }
  for (std::size_t t = 0; t < nt; ++t) {
    const auto& c = inst.supplemental_for(t);
    if (!c) continue;
    auto mean_row = [&](const lp::Constraint& con) {
      std::vector<double> row(n, 0.0);
      for (std::size_t g = 0; g < G; ++g) {
        const double v = dot(con.coeffs, pts[g]);
        for (std::size_t a = 0; a < na; ++a) row[col(t, g, a)] = v;
      }
      return row;
    };
    for (const auto& con : c->ineq) prob.add_le(mean_row(con), con.rhs);
    for (const auto& con : c->eq) prob.add_eq(mean_row(con), con.rhs);
  }
  const auto s = lp::solve(prob);
  if (s.status == lp::Status::Infeasible) throw InfeasibleError("discretized program is infeasible");
  if (s.status == lp::Status::Unbounded) throw UnboundedError("discretized program is unbounded");
  return s.objective_value;
}

double lipschitz_bound(const PAInstance& inst) {
  double L = 0.0;
  for (const auto& u : inst.principal_utility)
    for (const auto& piece : u.pieces) L = std::max(L, piece.l1_norm());
  return L;
}

PAInstance cap_strategy_space(const PAInstance& inst, double bound) {
  if (!(bound > 0.0)) throw std::invalid_argument("cap must be positive");
  PAInstance out = inst;
  std::vector<double> lo(inst.dim, -bound), hi(inst.dim, bound);
  out.strategy_space.intersect(Polyhedron::box(lo, hi));
  return out;
}

double grid_concavify(const std::function<double(std::span<const double>)>& phi,
                      std::span<const double> prior, const GridSpec& grid) {
  const std::size_t d = prior.size();
  if (!grid.simplex) throw std::invalid_argument("concavification needs a simplex grid");
  const auto pts = grid_points(grid, d);
  lp::Problem prob(pts.size());
  std::vector<double> ones(pts.size(), 1.0);
  for (std::size_t s = 0; s < pts.size(); ++s) {
    prob.set_lower(s, 0.0);
    prob.set_objective_coeff(s, phi(pts[s]));
  }
  for (std::size_t k = 0; k + 1 < d; ++k) {
    std::vector<double> row(pts.size());
    for (std::size_t s = 0; s < pts.size(); ++s) row[s] = pts[s][k];
    prob.add_eq(std::move(row), prior[k]);
  }
  prob.add_eq(std::move(ones), 1.0);
  const auto s = lp::solve(prob);
  if (!s.optimal()) throw std::domain_error("prior is not in the convex hull of the grid");
  return s.objective_value;
}

std::size_t brute_force_mis(const Graph& g) {
  const std::size_t k = g.num_nodes;
  if (k > 24) throw SizeGuardError("brute-force MIS is limited to 24 nodes");
  std::vector<std::uint32_t> nbr(k, 0);
  for (auto [u, v] : g.edges) {
    nbr[u] |= 1u << v;
    nbr[v] |= 1u << u;
  }
  std::size_t best = 0;
  // candidates: nodes still allowed; picked: size so far
  auto rec = [&](auto&& self, std::uint32_t candidates, std::size_t picked) -> void {
    if (candidates == 0) {
      best = std::max(best, picked);
      return;
    }
    if (picked + static_cast<std::size_t>(std::popcount(candidates)) <= best) return;
    const int v = std::countr_zero(candidates);
    const std::uint32_t bit = 1u << v;
    self(self, candidates & ~bit & ~nbr[v], picked + 1);
    self(self, candidates & ~bit, picked);
  };
  rec(rec, k == 32 ? ~0u : (1u << k) - 1u, 0);
  return best;
}

double minimax_lp(const std::vector<std::vector<double>>& payoff) {
  if (payoff.empty() || payoff.front().empty()) throw std::invalid_argument("empty payoff matrix");
  const std::size_t m = payoff.size();
  const std::size_t n = payoff.front().size();
  for (const auto& row : payoff)
    if (row.size() != n) throw std::invalid_argument("ragged payoff matrix");
  // variables: x_1..x_m, v
  lp::Problem prob(m + 1);
  prob.set_objective_coeff(m, 1.0);
  for (std::size_t i = 0; i < m; ++i) prob.set_lower(i, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<double> row(m + 1);
    for (std::size_t i = 0; i < m; ++i) row[i] = -payoff[i][j];
    row[m] = 1.0;
    prob.add_le(std::move(row), 0.0);
  }
  std::vector<double> ones(m + 1, 1.0);
  ones[m] = 0.0;
  prob.add_eq(std::move(ones), 1.0);
  const auto s = lp::solve(prob);
  if (!s.optimal()) throw std::logic_error("minimax program is " + lp::to_string(s.status));
  return s.objective_value;
}

}  // namespace pacoord
