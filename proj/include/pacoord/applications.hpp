#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "pacoord/graph.hpp"
#include "pacoord/model.hpp"

namespace pacoord {

/// Contract design with adverse selection and moral hazard. Payments x lie in
/// R^d_{>=0}, one per outcome.
struct ContractInstance {
  std::vector<std::string> types;
  std::vector<std::string> actions;
  std::vector<double> prior;
  std::vector<double> reward;                     // r, one entry per outcome
  PairTable<std::vector<double>> outcome_dist;    // P^theta_a over outcomes
  PairTable<double> cost;                         // c^theta_a
};

/// Bayesian persuasion with privately typed receivers. Posteriors live in
/// Delta(Omega); each type holds its own prior belief.
struct PersuasionInstance {
  std::vector<std::string> states;
  std::vector<std::string> types;
  std::vector<std::string> actions;
  std::vector<double> prior;                  // f over types
  std::vector<std::vector<double>> beliefs;   // mu_theta per type
  PairTable<std::vector<double>> sender;      // u^theta(., a) over states
  PairTable<std::vector<double>> receiver;    // v^theta(., a) over states
};

/// Bayesian Stackelberg game; the leader commits to a mixed strategy over
/// leader_actions.
struct StackelbergInstance {
  std::vector<std::string> leader_actions;
  std::vector<std::string> types;
  std::vector<std::string> actions;           // follower actions
  std::vector<double> prior;
  PairTable<std::vector<double>> leader;      // u^theta(., a) over leader actions
  PairTable<std::vector<double>> follower;    // v^theta(., a) over leader actions
};

/// Selling information to a privately typed buyer. Strategy is (posterior, price).
struct SellingInfoInstance {
  std::vector<std::string> states;
  std::vector<std::string> types;
  std::vector<std::string> actions;
  std::vector<double> prior;                  // f over buyer types
  std::vector<double> belief;                 // common prior mu over states
  PairTable<std::vector<double>> value;       // v^theta(., a) over states
  /// Appends a zero-prior outside-option type that receives no information
  /// for free, so every buyer can walk away with the no-information payoff.
  bool participation = true;
  std::optional<double> max_price;
};

/// Name of the outside-option type appended by selling_info_to_pa.
inline constexpr const char* kOptOutType = "opt_out";

void validate(const ContractInstance& c);
void validate(const PersuasionInstance& p);
void validate(const StackelbergInstance& s);
void validate(const SellingInfoInstance& s);

PAInstance contract_to_pa(const ContractInstance& c);
PAInstance persuasion_to_pa(const PersuasionInstance& p);
PAInstance stackelberg_to_pa(const StackelbergInstance& s);
PAInstance selling_info_to_pa(const SellingInfoInstance& s);

/// Sender value of revealing nothing; each type best-responds to its own
/// belief with ties broken toward the sender.
double no_information_value(const PersuasionInstance& p);

/// Largest number of best-response assignments the restricted solvers enumerate.
inline constexpr double kAssignmentGuard = 1e6;

struct RestrictedResult {
  double value = 0.0;
  std::vector<std::size_t> assignment;         // recommended action per type
  std::vector<std::vector<double>> strategies; // one strategy per type
  /// Only set by the type-independent solver with supplemental constraints:
  /// the lottery over strategies shared by all types.
  std::vector<std::pair<double, std::vector<double>>> lottery;
};

/// Best single strategy shared by all types (a lottery over strategies when
/// supplemental constraints are present). Throws SizeGuardError when
/// |A|^|Theta| exceeds kAssignmentGuard, InfeasibleError if nothing is feasible.
RestrictedResult solve_type_independent(const PAInstance& inst);

/// Best menu of one deterministic strategy per type. Same errors.
RestrictedResult solve_action_independent(const PAInstance& inst);

/// Follower payoffs reward action 1F only when the leader plays a_v purely
/// and no neighbour can profitably mimic; leader earns 1 exactly on 1F.
StackelbergInstance gen_stackelberg_hardness(const Graph& g);

}  // namespace pacoord
