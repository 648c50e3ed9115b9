#pragma once

#include <random>
#include <string>
#include <vector>

#include "pacoord/applications.hpp"
#include "pacoord/graph.hpp"
#include "pacoord/info_acquisition.hpp"
#include "pacoord/model.hpp"

namespace gen {

using pacoord::AffineForm;
using pacoord::ConcavePWL;
using pacoord::PAInstance;
using pacoord::PairTable;
using pacoord::Polyhedron;

inline double uniform(std::mt19937& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline std::size_t pick(std::mt19937& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

inline std::vector<double> random_vector(std::mt19937& rng, std::size_t n, double lo, double hi) {
  std::vector<double> v(n);
  for (auto& x : v) x = uniform(rng, lo, hi);
  return v;
}

// Prior with entries that are multiples of 1/denominator.
inline std::vector<double> grid_prior(std::mt19937& rng, std::size_t n, std::size_t denominator) {
  std::vector<std::size_t> counts(n, 0);
  for (std::size_t i = 0; i < denominator; ++i) ++counts[pick(rng, 0, n - 1)];
  std::vector<double> p(n);
  for (std::size_t i = 0; i < n; ++i) p[i] = static_cast<double>(counts[i]) / static_cast<double>(denominator);
  return p;
}

inline std::vector<double> random_prior(std::mt19937& rng, std::size_t n) {
  std::vector<double> p = random_vector(rng, n, 0.1, 1.0);
  double s = 0;
  for (double x : p) s += x;
  for (auto& x : p) x /= s;
  // Make the sum exact in floating point.
  double rest = 1.0;
  for (std::size_t i = 0; i + 1 < n; ++i) rest -= p[i];
  p[n - 1] = rest;
  return p;
}

// Compact X (unit box or simplex), 1-2 piece concave U, affine V.
inline PAInstance random_compact(std::mt19937& rng, std::size_t max_types = 3,
                                 std::size_t max_actions = 3, std::size_t max_dim = 3) {
  const std::size_t nt = pick(rng, 1, max_types);
  const std::size_t na = pick(rng, 1, max_actions);
  const std::size_t d = pick(rng, 1, max_dim);
  PAInstance inst;
  for (std::size_t t = 0; t < nt; ++t) inst.types.push_back("t" + std::to_string(t));
  for (std::size_t a = 0; a < na; ++a) inst.actions.push_back("a" + std::to_string(a));
  inst.prior = random_prior(rng, nt);
  inst.dim = d;
  if (d > 1 && rng() % 2) {
    inst.strategy_space = Polyhedron::simplex(d);
  } else {
    std::vector<double> lo(d, 0.0), hi(d, 1.0);
    inst.strategy_space = Polyhedron::box(lo, hi);
  }
  inst.principal_utility = PairTable<ConcavePWL>(nt, na);
  inst.agent_utility = PairTable<AffineForm>(nt, na);
  for (auto& u : inst.principal_utility) {
    const std::size_t pieces = pick(rng, 1, 2);
    for (std::size_t k = 0; k < pieces; ++k)
      u.pieces.push_back({random_vector(rng, d, -1.0, 1.0), uniform(rng, -0.5, 0.5)});
  }
  for (auto& v : inst.agent_utility) v = {random_vector(rng, d, -1.0, 1.0), uniform(rng, -0.5, 0.5)};
  return inst;
}

inline pacoord::Graph random_graph(std::mt19937& rng, std::size_t k, double density = 0.5) {
  std::vector<std::pair<std::size_t, std::size_t>> e;
  for (std::size_t u = 0; u < k; ++u)
    for (std::size_t v = u + 1; v < k; ++v)
      if (uniform(rng, 0.0, 1.0) < density) e.push_back({u, v});
  return pacoord::Graph(k, std::move(e));
}

// Integer utilities in [0, 4]; prior entries are multiples of 1/denominator.
inline pacoord::DecisionProblem random_decision(std::mt19937& rng, std::size_t states,
                                                std::size_t actions, std::size_t denominator) {
  pacoord::DecisionProblem dp;
  for (std::size_t s = 0; s < states; ++s) dp.states.push_back("w" + std::to_string(s));
  for (std::size_t a = 0; a < actions; ++a) dp.actions.push_back("a" + std::to_string(a));
  dp.utility.assign(actions, std::vector<double>(states));
  for (auto& row : dp.utility)
    for (auto& v : row) v = static_cast<double>(pick(rng, 0, 4));
  dp.prior = grid_prior(rng, states, denominator);
  return dp;
}

// All types share one belief, so revealing nothing is always incentive compatible.
inline pacoord::PersuasionInstance random_persuasion(std::mt19937& rng, std::size_t states,
                                                    std::size_t types, std::size_t actions) {
  pacoord::PersuasionInstance p;
  for (std::size_t s = 0; s < states; ++s) p.states.push_back("w" + std::to_string(s));
  for (std::size_t t = 0; t < types; ++t) p.types.push_back("t" + std::to_string(t));
  for (std::size_t a = 0; a < actions; ++a) p.actions.push_back("a" + std::to_string(a));
  p.prior = random_prior(rng, types);
  p.beliefs.assign(types, random_prior(rng, states));
  p.sender = PairTable<std::vector<double>>(types, actions);
  p.receiver = PairTable<std::vector<double>>(types, actions);
  for (auto& u : p.sender) u = random_vector(rng, states, -1.0, 1.0);
  for (auto& v : p.receiver) v = random_vector(rng, states, -1.0, 1.0);
  return p;
}

inline pacoord::ContractInstance random_contract(std::mt19937& rng, std::size_t types,
                                                 std::size_t actions, std::size_t outcomes) {
  pacoord::ContractInstance c;
  for (std::size_t t = 0; t < types; ++t) c.types.push_back("t" + std::to_string(t));
  for (std::size_t a = 0; a < actions; ++a) c.actions.push_back("a" + std::to_string(a));
  c.prior = random_prior(rng, types);
  c.reward = random_vector(rng, outcomes, 0.0, 1.0);
  c.outcome_dist = PairTable<std::vector<double>>(types, actions);
  c.cost = PairTable<double>(types, actions);
  for (auto& p : c.outcome_dist) p = random_prior(rng, outcomes);
  for (auto& x : c.cost) x = uniform(rng, 0.0, 0.3);
  return c;
}

inline pacoord::StackelbergInstance random_stackelberg(std::mt19937& rng, std::size_t leader,
                                                       std::size_t types, std::size_t actions) {
  pacoord::StackelbergInstance s;
  for (std::size_t i = 0; i < leader; ++i) s.leader_actions.push_back("l" + std::to_string(i));
  for (std::size_t t = 0; t < types; ++t) s.types.push_back("t" + std::to_string(t));
  for (std::size_t a = 0; a < actions; ++a) s.actions.push_back("f" + std::to_string(a));
  s.prior = random_prior(rng, types);
  s.leader = PairTable<std::vector<double>>(types, actions);
  s.follower = PairTable<std::vector<double>>(types, actions);
  for (auto& u : s.leader) u = random_vector(rng, leader, -1.0, 1.0);
  for (auto& v : s.follower) v = random_vector(rng, leader, -1.0, 1.0);
  return s;
}

}  // namespace gen
