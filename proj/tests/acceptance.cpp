// Prints one PASS/FAIL line per acceptance criterion; exits 1 if any fails.
#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "generators.hpp"
#include "pacoord/applications.hpp"
#include "pacoord/errors.hpp"
#include "pacoord/info_acquisition.hpp"
#include "pacoord/io.hpp"
#include "pacoord/lp.hpp"
#include "pacoord/mechanism_solver.hpp"
#include "pacoord/oracles.hpp"

using namespace pacoord;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

bool is_simplex_space(const PAInstance& inst) { return !inst.strategy_space.eq.empty(); }

io::InstanceFile fixture(const std::string& name) {
  return io::load_instance(std::string(FIXTURE_DIR) + "/" + name);
}

// Instances with bounded optimum shared by several criteria.
std::vector<PAInstance> fixture_instances() {
  std::vector<PAInstance> out;
  for (const char* name : {"pa.json", "pa_trivial.json", "contract.json", "persuasion.json",
                           "stackelberg.json", "selling_info.json"})
    out.push_back(io::to_pa(fixture(name)));
  return out;
}

std::vector<PAInstance> random_instances(std::uint32_t seed, int count) {
  std::mt19937 rng(seed);
  std::vector<PAInstance> out;
  for (int i = 0; i < count; ++i) out.push_back(gen::random_compact(rng));
  return out;
}

// ---------------------------------------------------------------- 1

Outcome oracle_sandwich() {
  const auto t0 = std::chrono::steady_clock::now();
  const double step = 0.05;
  int bad = 0;
  double worst_gap = 0.0;
  for (const auto& inst : random_instances(20261017, 50)) {
    const GridSpec grid = is_simplex_space(inst)
                              ? GridSpec::on_simplex(step)
                              : GridSpec::on_box(step, std::vector<std::pair<double, double>>(inst.dim, {0.0, 1.0}));
    const double ref = myerson_grid_lp(inst, grid);
    const double got = solve_optimal_mechanism(inst).objective;
    const double tol = lipschitz_bound(inst) * step;
    worst_gap = std::max(worst_gap, got - ref);
    if (ref > got + 1e-6 || got > ref + tol + 1e-6) ++bad;
  }
  const double secs = seconds_since(t0);
  Outcome o;
  o.pass = bad == 0 && secs < 60.0;
  o.detail = fmt("%d/50 outside [grid, grid + L*step], largest gap %.4f, %.1f s", bad, worst_gap, secs);
  return o;
}

// ---------------------------------------------------------------- 2

Outcome round_trip() {
  auto instances = random_instances(20261017, 50);
  for (auto& f : fixture_instances()) instances.push_back(std::move(f));
  int solved = 0, bad = 0, irregular = 0;
  double worst = 0.0;
  for (const auto& inst : instances) {
    const auto s = lp::solve(build_cp_closure(inst));
    if (!s.optimal()) continue;
    ++solved;
    auto sol = extract_transformed(inst, s.primal);
    if (!find_irregular_pairs(sol).empty()) {
      ++irregular;
      sol = repair_irregular(inst, sol, 1e-3).solution;
    }
    const auto mech = recover_succinct(sol);
    const double diff = std::abs(eval_principal(inst, mech) - transformed_objective(inst, sol));
    worst = std::max(worst, diff);
    if (diff > 1e-8 || !check_ic(inst, mech, 1e-6).feasible) ++bad;
  }
  Outcome o;
  o.pass = bad == 0 && solved == static_cast<int>(instances.size());
  o.detail = fmt("%d/%d solved (%d repaired), %d mismatches, largest objective gap %.2e", solved,
                 static_cast<int>(instances.size()), irregular, bad, worst);
  return o;
}

// ---------------------------------------------------------------- 3

PAInstance irregular_contract() {
  PAInstance inst;
  inst.types = {"t0", "t1"};
  inst.actions = {"a0", "a1"};
  inst.prior = {0.5, 0.5};
  inst.dim = 2;
  inst.strategy_space = Polyhedron::nonnegative_orthant(2);
  inst.principal_utility = PairTable<ConcavePWL>(2, 2);
  inst.agent_utility = PairTable<AffineForm>(2, 2);
  const double P[2][2][2] = {{{0.3, 0.7}, {0.0, 1.0}}, {{1.0, 0.0}, {0.2, 0.8}}};
  const double c[2][2] = {{0.0, 0.1}, {0.0, 0.2}};
  for (int t = 0; t < 2; ++t) {
    for (int a = 0; a < 2; ++a) {
      const double p0 = P[t][a][0], p1 = P[t][a][1];
      inst.principal_utility(t, a) = ConcavePWL::affine({{-p0, -p1}, p1});
      inst.agent_utility(t, a) = AffineForm{{p0, p1}, -c[t][a]};
    }
  }
  return inst;
}

Outcome algorithm_one() {
  const auto inst = irregular_contract();
  const auto s = lp::solve(build_cp_closure(inst));
  Outcome o;
  if (!s.optimal() || find_irregular_pairs(extract_transformed(inst, s.primal)).empty()) {
    o.pass = false;
    o.detail = "fixture is not irregular";
    return o;
  }
  std::string parts;
  for (double eps : {0.1, 0.01}) {
    const auto r = solve_optimal_mechanism(inst, eps);
    const auto lifted = lift(inst, r.mechanism);
    const bool regular = find_irregular_pairs(lifted).empty();
    const bool feasible = closure_violation(inst, lifted) <= 1e-6 && check_ic(inst, r.mechanism, 1e-6).feasible;
    const bool bound = r.objective >= r.guaranteed_lower_bound - 1e-9;
    const bool iters = r.iterations <= inst.num_actions() * inst.num_types();
    o.pass = o.pass && regular && feasible && bound && iters;
    parts += fmt("%seps %g: %.6f vs closure %.6f, %zu iteration(s)", parts.empty() ? "" : "; ", eps,
                 r.objective, r.closure_objective, r.iterations);
  }
  o.detail = parts;
  return o;
}

// ---------------------------------------------------------------- 4

struct SpaceFixture {
  std::string name;
  Polyhedron X;
  // Largest constraint violation of x in X and of z in the recession cone.
  std::function<double(const std::vector<double>&)> violation;
  std::function<double(const std::vector<double>&)> recession_violation;
};

std::vector<SpaceFixture> space_fixtures() {
  auto orthant = [](const std::vector<double>& x) {
    double v = 0.0;
    for (double t : x) v = std::max(v, -t);
    return v;
  };
  auto zero = [](const std::vector<double>& x) {
    double v = 0.0;
    for (double t : x) v = std::max(v, std::abs(t));
    return v;
  };
  auto simplex = [orthant](const std::vector<double>& x) {
    return std::max(orthant(x), std::abs(std::accumulate(x.begin(), x.end(), 0.0) - 1.0));
  };
  auto box = [](const std::vector<double>& x) {
    return std::max({-x[0] - 1.0, x[0] - 2.0, -x[1], x[1] - 3.0, 0.0});
  };
  const std::vector<double> lo{-1.0, 0.0}, hi{2.0, 3.0};
  return {{"R>=0", Polyhedron::nonnegative_orthant(2), orthant, orthant},
          {"simplex", Polyhedron::simplex(3), simplex, zero},
          {"box", Polyhedron::box(lo, hi), box, zero}};
}

Outcome homogenization() {
  std::mt19937 rng(4);
  int checked = 0, bad = 0;
  for (const auto& f : space_fixtures()) {
    const auto P = homogenize(f.X);
    const std::size_t d = f.X.dim;
    for (int n = 0; n < 1000;) {
      const double r = gen::uniform(rng, 0.0, 1.0);
      double lambda = r < 0.2 ? 0.0 : r < 0.3 ? gen::uniform(rng, 1.0, 1.5) : r < 0.35 ? -0.2
                                                                                       : gen::uniform(rng, 0.0, 1.0);
      std::vector<double> x = f.name == "simplex" ? gen::random_prior(rng, d) : gen::random_vector(rng, d, -0.5, 2.5);
      if (gen::uniform(rng, 0.0, 1.0) < 0.3)
        for (auto& t : x) t += gen::uniform(rng, -0.3, 0.3);
      std::vector<double> point{lambda};
      for (double t : x) point.push_back(lambda == 0.0 ? t * (rng() % 2) : lambda * t);
      const std::vector<double> z(point.begin() + 1, point.end());
      double viol = std::max({-lambda, lambda - 1.0, 0.0});
      if (lambda > 0.0) {
        std::vector<double> xs(d);
        for (std::size_t i = 0; i < d; ++i) xs[i] = z[i] / lambda;
        viol = std::max(viol, f.violation(xs) * lambda);
      } else if (lambda == 0.0) {
        viol = std::max(viol, f.recession_violation(z));
      }
      if (viol > 1e-12 && viol < 1e-6) continue;  // too close to call
      ++n;
      ++checked;
      if (P.contains(point) != (viol <= 1e-12)) ++bad;
    }

    // pi = 0 with z != 0 is irregular whether or not (0, z) lies in the closure.
    for (int n = 0; n < 100; ++n) {
      TransformedSolution sol;
      sol.probs = PairTable<double>(1, 1, 0.0);
      auto z = gen::random_vector(rng, d, -1.0, 1.0);
      z[0] = std::copysign(std::max(std::abs(z[0]), 1e-3), z[0]);
      sol.z = PairTable<std::vector<double>>(1, 1, z);
      ++checked;
      if (find_irregular_pairs(sol).size() != 1) ++bad;
      sol.z(0, 0).assign(d, 0.0);
      ++checked;
      if (!find_irregular_pairs(sol).empty()) ++bad;
      sol.probs(0, 0) = 0.5;
      sol.z(0, 0) = z;
      ++checked;
      if (!find_irregular_pairs(sol).empty()) ++bad;
    }
  }
  Outcome o;
  o.pass = bad == 0;
  o.detail = fmt("%d/%d classifications disagree", bad, checked);
  return o;
}

// ---------------------------------------------------------------- 5

Outcome class_ordering() {
  auto instances = fixture_instances();
  for (auto& r : random_instances(5, 20)) instances.push_back(std::move(r));
  int bad = 0, compared = 0;
  for (const auto& inst : instances) {
    const double general = solve_optimal_mechanism(inst).objective;
    for (auto solve : {&solve_type_independent, &solve_action_independent}) {
      try {
        ++compared;
        if (solve(inst).value > general + 1e-6) ++bad;
      } catch (const InfeasibleError&) {
      }
    }
  }
  std::vector<PersuasionInstance> persuasion{std::get<PersuasionInstance>(fixture("persuasion.json").payload)};
  std::mt19937 rng(55);
  for (int i = 0; i < 10; ++i) persuasion.push_back(gen::random_persuasion(rng, 2 + i % 2, 1 + i % 3, 2 + i % 2));
  int ai_bad = 0;
  for (const auto& p : persuasion) {
    const auto inst = persuasion_to_pa(p);
    const double ai = solve_action_independent(inst).value;
    if (std::abs(ai - no_information_value(p)) > 1e-9) ++ai_bad;
    const double general = solve_optimal_mechanism(inst).objective;
    ++compared;
    if (ai > general + 1e-6) ++bad;
  }
  Outcome o;
  o.pass = bad == 0 && ai_bad == 0;
  o.detail = fmt("%d/%d restricted values above general; %d/%zu persuasion action-independent values differ from "
                 "no information",
                 bad, compared, ai_bad, persuasion.size());
  return o;
}

// ---------------------------------------------------------------- 6, 8

// One representative per isomorphism class of graphs on k nodes.
std::vector<Graph> graph_catalog(std::size_t k) {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t u = 0; u < k; ++u)
    for (std::size_t v = u + 1; v < k; ++v) pairs.push_back({u, v});
  std::vector<std::size_t> perm(k);
  std::vector<std::vector<std::size_t>> maps;  // pair index -> permuted pair index
  std::iota(perm.begin(), perm.end(), 0);
  do {
    std::vector<std::size_t> m;
    for (auto [u, v] : pairs) {
      auto a = std::min(perm[u], perm[v]), b = std::max(perm[u], perm[v]);
      m.push_back(std::find(pairs.begin(), pairs.end(), std::pair{a, b}) - pairs.begin());
    }
    maps.push_back(std::move(m));
  } while (std::next_permutation(perm.begin(), perm.end()));

  std::set<std::uint32_t> seen;
  std::vector<Graph> out;
  for (std::uint32_t mask = 0; mask < (1u << pairs.size()); ++mask) {
    std::uint32_t canon = ~0u;
    for (const auto& m : maps) {
      std::uint32_t image = 0;
      for (std::size_t e = 0; e < pairs.size(); ++e)
        if (mask >> e & 1) image |= 1u << m[e];
      canon = std::min(canon, image);
    }
    if (!seen.insert(canon).second) continue;
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    for (std::size_t e = 0; e < pairs.size(); ++e)
      if (mask >> e & 1) edges.push_back(pairs[e]);
    out.emplace_back(k, std::move(edges));
  }
  return out;
}

Outcome stackelberg_hardness() {
  auto graphs = graph_catalog(5);
  const std::size_t catalog = graphs.size();
  std::mt19937 rng(8);
  for (int i = 0; i < 20; ++i) graphs.push_back(gen::random_graph(rng, 8));
  int bad = 0;
  double worst = 0.0;
  for (const auto& g : graphs) {
    const auto inst = stackelberg_to_pa(gen_stackelberg_hardness(g));
    const double scaled = static_cast<double>(g.num_nodes) * solve_action_independent(inst).value;
    const double diff = std::abs(scaled - static_cast<double>(brute_force_mis(g)));
    worst = std::max(worst, diff);
    if (diff > 1e-6) ++bad;
  }
  Outcome o;
  o.pass = bad == 0 && catalog == 34;
  o.detail = fmt("%d/%zu graphs differ (%zu five-node classes, 20 random eight-node), largest gap %.2e", bad,
                 graphs.size(), catalog, worst);
  return o;
}

Outcome eq_identity() {
  int simplex_bad = 0, cube_bad = 0, total = 0;
  std::string first;
  for (std::size_t k = 1; k <= 6; ++k) {
    const std::size_t N = k <= 4 ? 60 : k == 5 ? 30 : 20;
    for (const auto& g : graph_catalog(k)) {
      ++total;
      const auto hc = gen_concavification_hardness(g);
      const double mis = static_cast<double>(brute_force_mis(g));
      double lip = 0.0;
      for (const auto& p : *hc.u_star_pieces) lip = std::max(lip, p.l1_norm());
      double lh = 0.0;
      for (const auto& p : hc.cost.pieces) lh = std::max(lh, p.l1_norm());
      const double tol = (lip + lh) / static_cast<double>(N);
      double best = -1e300;
      std::vector<double> at;
      for_each_simplex_point(k, N, [&](std::span<const double> s) {
        const double v = hc.u_star(s) - hc.cost(s);
        if (v > best) {
          best = v;
          at.assign(s.begin(), s.end());
        }
      });
      const double target = mis / static_cast<double>(k);
      if (target < best - 1e-9 || target > best + tol) {
        if (simplex_bad++ == 0) {
          first = fmt("first: %zu nodes, %zu edges, grid max %.4f vs MIS/k %.4f", k, g.edges.size(), best, target);
        }
      }
      double cube = 0.0;
      std::vector<double> x(k);
      for (std::size_t mask = 0; mask < (std::size_t{1} << k); ++mask) {
        for (std::size_t i = 0; i < k; ++i) x[i] = static_cast<double>(mask >> i & 1);
        cube = std::max(cube, hc.u_star(x));
      }
      if (cube != mis) ++cube_bad;
    }
  }
  Outcome o;
  o.pass = simplex_bad == 0 && cube_bad == 0;
  o.detail = fmt("simplex max = MIS/k fails on %d/%d graphs; cube max = MIS fails on %d/%d", simplex_bad, total,
                 cube_bad, total);
  if (!first.empty()) o.detail += "; " + first;
  return o;
}

// ---------------------------------------------------------------- 7, 9

std::vector<Experiment> g_experiments;
std::vector<std::vector<double>> g_priors;

CostSpec random_cost(std::mt19937& rng, std::size_t n) {
  std::vector<AffineForm> pieces{{std::vector<double>(n, 0.0), 0.0}};
  for (int i = 0; i < 3; ++i) pieces.push_back({gen::random_vector(rng, n, -1.0, 1.0), gen::uniform(rng, -0.8, 0.0)});
  return CostSpec::piecewise(std::move(pieces));
}

double max_l1(const std::vector<AffineForm>& pieces) {
  double l = 0.0;
  for (const auto& p : pieces) l = std::max(l, p.l1_norm());
  return l;
}

bool matches_grid(const Partition& part, const CostSpec& cost, std::span<const double> prior, std::size_t N,
                  double& gap) {
  const auto e = solve_info_acquisition(part, cost, prior);
  g_experiments.push_back(e);
  g_priors.emplace_back(prior.begin(), prior.end());
  auto phi = [&](std::span<const double> s) { return part.evaluate(s, 1e-9) - cost(s); };
  const double ref = grid_concavify(phi, prior, GridSpec::on_simplex(1.0 / static_cast<double>(N)));
  double cells = 0.0;
  for (const auto& c : part.cells) cells = std::max(cells, max_l1(c.utility.pieces));
  const double tol = (cells + max_l1(cost.pieces)) / static_cast<double>(N);
  gap = std::max(gap, e.value - ref);
  return ref <= e.value + 1e-6 && e.value <= ref + tol + 1e-6;
}

Outcome concavification() {
  std::mt19937 rng(77);
  int bad = 0, reveal_bad = 0;
  double gap = 0.0;
  for (int i = 0; i < 20; ++i) {
    const std::size_t n = 2 + i % 2;
    const auto dp = gen::random_decision(rng, n, 3, 12);
    const auto part = partition_decision_problem(dp);
    if (!matches_grid(part, random_cost(rng, n), dp.prior, n == 2 ? 840 : 60, gap)) ++bad;

    const auto e = solve_info_acquisition(part, CostSpec::zero(), dp.prior);
    g_experiments.push_back(e);
    g_priors.push_back(dp.prior);
    double full = 0.0;
    for (std::size_t s = 0; s < n; ++s) {
      double best = -1e300;
      for (const auto& row : dp.utility) best = std::max(best, row[s]);
      full += dp.prior[s] * best;
    }
    bool vertices = true;
    for (const auto& [p, sigma] : e.signals)
      if (p > 1e-12 && *std::max_element(sigma.begin(), sigma.end()) < 1.0 - 1e-9) vertices = false;
    if (!vertices || std::abs(e.value - full) > 1e-9) ++reveal_bad;
  }
  for (int i = 0; i < 10; ++i) {
    PersuasionBase bp;
    bp.states = {"w0", "w1"};
    const std::size_t na = 2 + i % 2;
    for (std::size_t a = 0; a < na; ++a) {
      bp.actions.push_back("a" + std::to_string(a));
      bp.sender.push_back(gen::random_vector(rng, 2, 0.0, 1.0));
      bp.receiver.push_back({static_cast<double>(gen::pick(rng, 0, 4)), static_cast<double>(gen::pick(rng, 0, 4))});
    }
    bp.prior = gen::grid_prior(rng, 2, 12);
    if (!matches_grid(partition_costly_persuasion(bp), random_cost(rng, 2), bp.prior, 840, gap)) ++bad;
  }
  Outcome o;
  o.pass = bad == 0 && reveal_bad == 0;
  o.detail = fmt("%d/30 outside the grid tolerance (largest gap %.4f); full revelation wrong on %d/20", bad, gap,
                 reveal_bad);
  return o;
}

Outcome plausibility() {
  int bad = 0;
  double worst = 0.0;
  for (std::size_t i = 0; i < g_experiments.size(); ++i) {
    const auto& e = g_experiments[i];
    const auto& prior = g_priors[i];
    std::vector<double> mean(prior.size(), 0.0);
    double mass = 0.0;
    bool ok = e.cost_term >= -1e-8;
    for (const auto& [p, sigma] : e.signals) {
      ok = ok && p >= -1e-8;
      mass += p;
      for (std::size_t s = 0; s < prior.size(); ++s) mean[s] += p * sigma[s];
    }
    double dev = std::abs(mass - 1.0);
    for (std::size_t s = 0; s < prior.size(); ++s) dev = std::max(dev, std::abs(mean[s] - prior[s]));
    worst = std::max(worst, dev);
    if (!ok || dev > 1e-8) ++bad;
  }
  Outcome o;
  o.pass = bad == 0 && !g_experiments.empty();
  o.detail = fmt("%d/%zu experiments violate, largest deviation %.2e", bad, g_experiments.size(), worst);
  return o;
}

}  // namespace

int main() {
  const std::array<std::pair<const char*, Outcome (*)()>, 9> criteria{{
      {"oracle sandwich", oracle_sandwich},
      {"round trip", round_trip},
      {"irregular repair", algorithm_one},
      {"homogenization", homogenization},
      {"class ordering", class_ordering},
      {"stackelberg hardness", stackelberg_hardness},
      {"concavification", concavification},
      {"simplex and cube identity", eq_identity},
      {"bayes plausibility", plausibility},
  }};
  bool all = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    all = all && o.pass;
    std::printf("%zu %-26s %s  %s\n", i + 1, criteria[i].first, o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
  }
  return all ? 0 : 1;
}
