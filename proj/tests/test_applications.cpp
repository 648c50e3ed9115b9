#include <random>

#include "doctest.h"
#include "generators.hpp"
#include "pacoord/applications.hpp"
#include "pacoord/errors.hpp"
#include "pacoord/mechanism_solver.hpp"
#include "pacoord/oracles.hpp"

using namespace pacoord;

namespace {

ContractInstance one_type_contract() {
  ContractInstance c;
  c.types = {"t"};
  c.actions = {"a1", "a2"};
  c.prior = {1.0};
  c.reward = {1.0, 0.0};
  c.outcome_dist = PairTable<std::vector<double>>(1, 2);
  c.outcome_dist(0, 0) = {1.0, 0.0};
  c.outcome_dist(0, 1) = {0.0, 1.0};
  c.cost = PairTable<double>(1, 2);
  c.cost(0, 0) = 0.4;
  return c;
}

// Sender wants a2 always; receiver wants a2 iff P(w2) >= 1/2.
PersuasionInstance opposed_persuasion() {
  PersuasionInstance p;
  p.states = {"w1", "w2"};
  p.types = {"r"};
  p.actions = {"a1", "a2"};
  p.prior = {1.0};
  p.beliefs = {{0.7, 0.3}};
  p.sender = PairTable<std::vector<double>>(1, 2);
  p.receiver = PairTable<std::vector<double>>(1, 2);
  p.sender(0, 0) = {0.0, 0.0};
  p.sender(0, 1) = {1.0, 1.0};
  p.receiver(0, 0) = {0.0, 0.0};
  p.receiver(0, 1) = {-1.0, 1.0};
  return p;
}

SellingInfoInstance one_buyer() {
  SellingInfoInstance s;
  s.states = {"up", "down"};
  s.types = {"buyer"};
  s.actions = {"invest", "pass"};
  s.prior = {1.0};
  s.belief = {0.5, 0.5};
  s.value = PairTable<std::vector<double>>(1, 2);
  s.value(0, 0) = {2.0, -1.0};
  s.value(0, 1) = {0.0, 0.0};
  return s;
}

}  // namespace

TEST_CASE("contract reduction") {
  const auto c = one_type_contract();
  auto half = c;
  half.outcome_dist(0, 0) = {0.5, 0.5};
  const auto inst = contract_to_pa(half);
  CHECK(inst.principal_utility(0, 0)(std::vector<double>{0.0, 0.0}) == doctest::Approx(0.5));
  CHECK(inst.principal_utility(0, 0)(std::vector<double>{1.0, 0.0}) == doctest::Approx(0.0));
  CHECK(inst.agent_utility(0, 0)(std::vector<double>{1.0, 0.0}) == doctest::Approx(0.5 - 0.4));
  CHECK_FALSE(inst.strategy_space.is_bounded());
  CHECK_FALSE(inst.has_supplemental());

  const auto pa = contract_to_pa(c);
  const auto r = solve_optimal_mechanism(pa);
  CHECK(r.regular);
  CHECK(r.objective == doctest::Approx(0.6));
  const double grid = myerson_grid_lp(pa, GridSpec::on_box(0.01, {{0.0, 1.0}, {0.0, 0.0}}));
  CHECK(grid == doctest::Approx(0.6).epsilon(1e-9));

  std::mt19937 rng(17);
  for (int trial = 0; trial < 30; ++trial) {
    const auto rc = gen::random_contract(rng, 2, 2, 3);
    const auto rp = contract_to_pa(rc);
    const auto x = gen::random_vector(rng, 3, 0.0, 2.0);
    for (std::size_t t = 0; t < 2; ++t)
      for (std::size_t a = 0; a < 2; ++a) {
        double u = 0.0, v = -rc.cost(t, a);
        for (std::size_t i = 0; i < 3; ++i) {
          u += rc.outcome_dist(t, a)[i] * (rc.reward[i] - x[i]);
          v += rc.outcome_dist(t, a)[i] * x[i];
        }
        CHECK(rp.principal_utility(t, a)(x) == doctest::Approx(u).epsilon(1e-12));
        CHECK(rp.agent_utility(t, a)(x) == doctest::Approx(v).epsilon(1e-12));
      }
  }
}

TEST_CASE("persuasion reduction") {
  const auto p = opposed_persuasion();
  const auto inst = persuasion_to_pa(p);
  REQUIRE(inst.has_supplemental());
  CHECK(inst.supplemental_for(0)->contains(std::vector<double>{0.7, 0.3}));
  const auto r = solve_optimal_mechanism(inst);
  CHECK(r.objective == doctest::Approx(0.6));
  CHECK(supplemental_residual(inst, r.mechanism) <= 1e-8);
  auto phi = [](std::span<const double> s) { return s[1] >= 0.5 - 1e-12 ? 1.0 : 0.0; };
  CHECK(grid_concavify(phi, p.beliefs[0], GridSpec::on_simplex(0.01)) == doctest::Approx(0.6));

  SUBCASE("state-independent receiver") {
    auto q = p;
    q.receiver(0, 0) = {0.2, 0.2};
    q.receiver(0, 1) = {0.1, 0.1};
    q.sender(0, 0) = {0.3, 0.9};
    CHECK(solve_optimal_mechanism(persuasion_to_pa(q)).objective ==
          doctest::Approx(0.7 * 0.3 + 0.3 * 0.9));
    CHECK(no_information_value(q) == doctest::Approx(0.7 * 0.3 + 0.3 * 0.9));
  }
}

TEST_CASE("stackelberg reduction") {
  SUBCASE("single follower action") {
    StackelbergInstance s;
    s.leader_actions = {"x", "y", "z"};
    s.types = {"t0", "t1"};
    s.actions = {"only"};
    s.prior = {0.5, 0.5};
    s.leader = PairTable<std::vector<double>>(2, 1);
    s.follower = PairTable<std::vector<double>>(2, 1, std::vector<double>{0.0, 0.0, 0.0});
    s.leader(0, 0) = {0.1, 0.9, 0.3};
    s.leader(1, 0) = {0.7, 0.2, 0.4};
    CHECK(solve_optimal_mechanism(stackelberg_to_pa(s)).objective == doctest::Approx(0.8));
  }
  SUBCASE("zero-sum games match minimax") {
    std::mt19937 rng(23);
    StackelbergInstance pennies;
    pennies.leader_actions = {"H", "T"};
    pennies.types = {"f"};
    pennies.actions = {"h", "t"};
    pennies.prior = {1.0};
    pennies.leader = PairTable<std::vector<double>>(1, 2);
    pennies.follower = PairTable<std::vector<double>>(1, 2);
    pennies.leader(0, 0) = {1.0, -1.0};
    pennies.leader(0, 1) = {-1.0, 1.0};
    pennies.follower(0, 0) = {-1.0, 1.0};
    pennies.follower(0, 1) = {1.0, -1.0};
    CHECK(solve_optimal_mechanism(stackelberg_to_pa(pennies)).objective == doctest::Approx(0.0).epsilon(1e-9));
    for (int trial = 0; trial < 20; ++trial) {
      auto g = gen::random_stackelberg(rng, 3, 1, 3);
      std::vector<std::vector<double>> payoff(3, std::vector<double>(3));
      for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t a = 0; a < 3; ++a) {
          g.follower(0, a)[i] = -g.leader(0, a)[i];
          payoff[i][a] = g.leader(0, a)[i];
        }
      CHECK(solve_optimal_mechanism(stackelberg_to_pa(g)).objective ==
            doctest::Approx(minimax_lp(payoff)).epsilon(1e-7));
    }
  }
}

TEST_CASE("selling information") {
  SUBCASE("revenue equals the value of information") {
    const auto r = solve_optimal_mechanism(selling_info_to_pa(one_buyer()));
    CHECK(r.objective == doctest::Approx(0.5));
  }
  SUBCASE("worthless information earns nothing") {
    auto s = one_buyer();
    s.value(0, 0) = {0.3, 0.3};
    CHECK(solve_optimal_mechanism(selling_info_to_pa(s)).objective == doctest::Approx(0.0).epsilon(1e-9));
  }
  SUBCASE("price capped at zero") {
    auto s = one_buyer();
    s.max_price = 0.0;
    CHECK(solve_optimal_mechanism(selling_info_to_pa(s)).objective == doctest::Approx(0.0).epsilon(1e-9));
  }
  SUBCASE("without the outside option the price is unbounded") {
    auto s = one_buyer();
    s.participation = false;
    CHECK_THROWS_AS(solve_optimal_mechanism(selling_info_to_pa(s)), UnboundedError);
  }
  SUBCASE("outside option shape") {
    const auto inst = selling_info_to_pa(one_buyer());
    CHECK(inst.num_types() == 2);
    CHECK(inst.types.back() == kOptOutType);
    CHECK(inst.prior.back() == 0.0);
    CHECK(inst.dim == 3);
  }
}

TEST_CASE("hardness values match the maximum independent set") {
  for (auto [g, v] : {std::pair{Graph(1, {}), 1.0}, {Graph(2, {{0, 1}}), 0.5},
                      {Graph(3, {{0, 1}, {1, 2}, {0, 2}}), 1.0 / 3}, {Graph(3, {{0, 1}, {1, 2}}), 2.0 / 3}}) {
    const auto s = gen_stackelberg_hardness(g);
    CHECK(s.types.size() == g.num_nodes);
    CHECK(s.leader_actions.size() == 2 * g.num_nodes);
    CHECK(s.actions.size() == 3);
    const auto inst = stackelberg_to_pa(s);
    CHECK(solve_action_independent(inst).value == doctest::Approx(v).epsilon(1e-9));
    CHECK(solve_optimal_mechanism(inst).objective >= v - 1e-6);
  }
  std::mt19937 rng(3);
  for (int i = 0; i < 3; ++i) {
    const auto g = gen::random_graph(rng, 8);
    const auto inst = stackelberg_to_pa(gen_stackelberg_hardness(g));
    const double k = 8.0;
    const double scaled = k * solve_action_independent(inst).value;
    CHECK(scaled == doctest::Approx(static_cast<double>(brute_force_mis(g))).epsilon(1e-6));
  }
}

TEST_CASE("class ordering") {
  std::mt19937 rng(41);
  for (int trial = 0; trial < 25; ++trial) {
    const auto inst = gen::random_compact(rng);
    const double general = solve_optimal_mechanism(inst).objective;
    const auto ti = solve_type_independent(inst);
    const auto ai = solve_action_independent(inst);
    CHECK(ti.value <= general + 1e-6);
    CHECK(ai.value <= general + 1e-6);
    if (inst.num_types() == 1) {
      CHECK(ti.value == doctest::Approx(general).epsilon(1e-7));
      CHECK(ai.value == doctest::Approx(ti.value).epsilon(1e-7));
    }
  }
  for (int trial = 0; trial < 15; ++trial) {
    const auto p = gen::random_persuasion(rng, 2 + trial % 2, 1 + trial % 3, 2 + trial % 2);
    const auto inst = persuasion_to_pa(p);
    const double general = solve_optimal_mechanism(inst).objective;
    const auto ai = solve_action_independent(inst);
    const auto ti = solve_type_independent(inst);
    CHECK(ai.value == doctest::Approx(no_information_value(p)).epsilon(1e-9));
    CHECK(ai.value <= general + 1e-6);
    CHECK(ti.value <= general + 1e-6);
  }
}

TEST_CASE("size guard") {
  std::mt19937 rng(1);
  const auto p = gen::random_persuasion(rng, 2, 21, 2);
  const auto inst = persuasion_to_pa(p);
  CHECK_THROWS_AS(solve_action_independent(inst), SizeGuardError);
  CHECK_THROWS_AS(solve_type_independent(inst), SizeGuardError);
}
