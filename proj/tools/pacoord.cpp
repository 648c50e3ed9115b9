// pacoord: solve, acquire and verify from instance files.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "pacoord/applications.hpp"
#include "pacoord/errors.hpp"
#include "pacoord/info_acquisition.hpp"
#include "pacoord/io.hpp"
#include "pacoord/lp.hpp"
#include "pacoord/mechanism_solver.hpp"
#include "pacoord/oracles.hpp"

namespace {

using nlohmann::json;
using namespace pacoord;

enum Exit { kOk = 0, kUsage = 1, kInfeasible = 2, kUnbounded = 3, kGuard = 4, kFail = 5 };

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Output {
  bool json = false;
  std::string path;
};

void emit(const Output& out, const json& j, const std::string& human) {
  if (!out.path.empty()) {
    std::ofstream f(out.path, std::ios::binary);
    if (!f) throw UsageError("cannot write " + out.path);
    f << io::serialize(j);
  }
  if (out.json)
    std::cout << io::serialize(j);
  else
    std::cout << human;
}

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(10);
  s << v;
  return s.str();
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Tolerance from PA_COORD_LP_TOL, applied before anything is solved.
void apply_env_tolerance(SolverOptions& opts) {
  const char* env = std::getenv("PA_COORD_LP_TOL");
  if (env == nullptr || *env == '\0') return;
  double tol = 0.0;
  try {
    std::size_t used = 0;
    tol = std::stod(env, &used);
    if (used != std::string(env).size()) throw std::invalid_argument("trailing characters");
  } catch (const std::exception&) {
    throw UsageError(std::string("PA_COORD_LP_TOL is not a number: ") + env);
  }
  try {
    lp::set_default_tolerance(tol);
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("PA_COORD_LP_TOL: ") + e.what());
  }
  opts.lp_tol = tol;
}

// Graph files solve the hardness game built from the graph.
PAInstance instance_for_solve(const io::InstanceFile& f) {
  if (f.kind == "graph") return stackelberg_to_pa(gen_stackelberg_hardness(std::get<Graph>(f.payload)));
  if (f.kind == "decision") throw UsageError("decision instances are handled by `acquire`");
  return io::to_pa(f);
}

json pair_list(const PAInstance& inst, const std::vector<TypeAction>& pairs) {
  json out = json::array();
  for (const auto& p : pairs) out.push_back({{"type", inst.types[p.type]}, {"action", inst.actions[p.action]}});
  return out;
}

struct Solved {
  json result;
  double objective = 0.0;
};

Solved solve_general(const PAInstance& inst, double epsilon, const SolverOptions& opts) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto r = solve_optimal_mechanism(inst, epsilon, opts);
  const double elapsed = seconds_since(t0);
  const auto ic = check_ic(inst, r.mechanism, 1e-6);
  json j = {{"class", "general"},
            {"objective", r.objective},
            {"closure_objective", r.closure_objective},
            {"regular", r.regular},
            {"epsilon_used", r.epsilon_used},
            {"repaired_pairs", pair_list(inst, r.repaired_pairs)},
            {"iterations", r.iterations},
            {"guaranteed_lower_bound", r.guaranteed_lower_bound},
            {"multiplicative_bound_holds", r.multiplicative_bound_holds},
            {"ic_worst_violation", ic.worst_violation},
            {"supplemental_residual", supplemental_residual(inst, r.mechanism)},
            {"mechanism", io::mechanism_json(inst, r.mechanism)},
            {"timing", {{"solve_seconds", elapsed}}}};
  return {j, r.objective};
}

Solved solve_restricted(const PAInstance& inst, bool type_independent) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto r = type_independent ? solve_type_independent(inst) : solve_action_independent(inst);
  const double elapsed = seconds_since(t0);
  json menu = json::array();
  for (std::size_t t = 0; t < inst.num_types(); ++t)
    menu.push_back({{"type", inst.types[t]},
                    {"action", inst.actions[r.assignment[t]]},
                    {"strategy", r.strategies[t]}});
  json j = {{"class", type_independent ? "type-independent" : "action-independent"},
            {"objective", r.value},
            {"menu", menu},
            {"timing", {{"solve_seconds", elapsed}}}};
  if (!r.lottery.empty()) {
    json lottery = json::array();
    for (const auto& [p, x] : r.lottery) lottery.push_back({{"prob", p}, {"strategy", x}});
    j["lottery"] = lottery;
  }
  return {j, r.value};
}

std::string solve_summary(const json& j) {
  std::string s = "class: " + j["class"].get<std::string>() + "\n";
  s += "objective: " + fmt(j["objective"].get<double>()) + "\n";
  if (j.contains("regular")) {
    s += "closure objective: " + fmt(j["closure_objective"].get<double>()) + "\n";
    s += std::string("regular: ") + (j["regular"].get<bool>() ? "yes" : "no") + "\n";
    if (!j["regular"].get<bool>()) {
      s += "epsilon: " + fmt(j["epsilon_used"].get<double>()) + "\n";
      s += "repaired pairs: " + std::to_string(j["repaired_pairs"].size()) + "\n";
      s += "guaranteed lower bound: " + fmt(j["guaranteed_lower_bound"].get<double>()) + "\n";
    }
    s += "IC worst violation: " + fmt(j["ic_worst_violation"].get<double>()) + "\n";
    for (const auto& t : j["mechanism"]) {
      for (const auto& e : t["entries"]) {
        if (!e["used"].get<bool>()) continue;
        s += "  " + t["type"].get<std::string>() + " -> " + e["action"].get<std::string>() +
             "  p=" + fmt(e["prob"].get<double>()) + "  x=" + e["strategy"].dump() + "\n";
      }
    }
  } else {
    for (const auto& m : j["menu"])
      s += "  " + m["type"].get<std::string>() + " -> " + m["action"].get<std::string>() +
           "  x=" + m["strategy"].dump() + "\n";
  }
  s += "time: " + fmt(j["timing"]["solve_seconds"].get<double>()) + " s\n";
  return s;
}

// ---------------------------------------------------------------- acquire

struct AcquireSetup {
  Partition partition;
  std::vector<std::string> states;
  std::vector<double> prior;
};

AcquireSetup acquire_setup(const io::InstanceFile& f) {
  if (f.kind == "decision") {
    const auto& dp = std::get<DecisionProblem>(f.payload);
    if (dp.prior.empty()) throw UsageError("decision instance needs a prior to acquire information");
    return {partition_decision_problem(dp), dp.states, dp.prior};
  }
  if (f.kind == "persuasion") {
    const auto& p = std::get<PersuasionInstance>(f.payload);
    if (p.types.size() != 1) throw UsageError("costly persuasion needs a single receiver type");
    PersuasionBase base{p.states, p.actions, {}, {}, p.beliefs[0]};
    for (std::size_t a = 0; a < p.actions.size(); ++a) {
      base.sender.push_back(p.sender(0, a));
      base.receiver.push_back(p.receiver(0, a));
    }
    return {partition_costly_persuasion(base), p.states, p.beliefs[0]};
  }
  throw UsageError("acquire needs a decision or single-type persuasion instance, got " + f.kind);
}

CostSpec parse_cost_flag(const std::string& flag, std::size_t dim) {
  if (flag == "zero") return CostSpec::zero();
  if (flag.rfind("pwl:", 0) == 0) {
    try {
      return io::load_cost(flag.substr(4), dim);
    } catch (const io::ParseError& e) {
      throw UsageError(flag.substr(4) + (e.line() > 0 ? ":" : ": ") + e.what());
    }
  }
  if (flag.rfind("entropy:", 0) == 0) {
    const std::string n = flag.substr(8);
    if (n.empty() || !std::all_of(n.begin(), n.end(), ::isdigit))
      throw UsageError("entropy grid must be a positive integer: " + flag);
    return CostSpec::entropy(std::stoul(n), dim);
  }
  throw UsageError("unknown cost '" + flag + "' (zero | pwl:<file> | entropy:<n>)");
}

// ---------------------------------------------------------------- verify

std::optional<std::vector<std::pair<double, double>>> bounding_box(const Polyhedron& X) {
  std::vector<std::pair<double, double>> box;
  for (std::size_t k = 0; k < X.dim; ++k) {
    double ends[2];
    for (int side = 0; side < 2; ++side) {
      lp::Problem p(X.dim);
      for (const auto& c : X.ineq) p.add_le(c.coeffs, c.rhs);
      for (const auto& c : X.eq) p.add_eq(c.coeffs, c.rhs);
      p.set_objective_coeff(k, side == 0 ? -1.0 : 1.0);
      const auto s = lp::solve(p);
      if (s.status == lp::Status::Unbounded) return std::nullopt;
      if (!s.optimal()) throw InfeasibleError("strategy space is empty");
      ends[side] = side == 0 ? -s.objective_value : s.objective_value;
    }
    box.emplace_back(ends[0], ends[1]);
  }
  return box;
}

double result_objective(const std::string& path) {
  json j;
  try {
    j = json::parse(io::read_file(path));
  } catch (const json::parse_error& e) {
    throw UsageError("result file " + path + " is not valid JSON: " + e.what());
  }
  if (!j.is_object() || !j.contains("objective") || !j["objective"].is_number())
    throw UsageError("result file " + path + " has no numeric \"objective\"");
  const double v = j["objective"].get<double>();
  if (!std::isfinite(v)) throw UsageError("result file " + path + " has a non-finite objective");
  return v;
}

struct Verdict {
  std::string oracle;
  double solver = 0.0;
  double reference = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

double parse_step(const std::string& spec) {
  const std::string s = spec.substr(5);
  double step = 0.0;
  try {
    std::size_t used = 0;
    step = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument("trailing");
  } catch (const std::exception&) {
    throw UsageError("bad grid step: " + spec);
  }
  if (!(step > 0.0 && step <= 1.0)) throw UsageError("grid step must lie in (0, 1]");
  return step;
}

Verdict verify_grid_pa(PAInstance inst, double step, std::optional<double> bound,
                       const std::optional<std::string>& result, double epsilon,
                       const SolverOptions& opts) {
  if (bound) {
    if (!(*bound > 0.0)) throw UsageError("--bound must be positive");
    inst = cap_strategy_space(inst, *bound);
  }
  const auto box = bounding_box(inst.strategy_space);
  if (!box) throw UsageError("strategy space is unbounded; pass --bound B");
  Verdict v;
  v.oracle = "grid";
  v.solver = result ? result_objective(*result) : solve_general(inst, epsilon, opts).objective;
  v.reference = myerson_grid_lp(inst, GridSpec::on_box(step, *box));
  v.tolerance = lipschitz_bound(inst) * step;
  v.pass = v.reference <= v.solver + 1e-6 && v.solver <= v.reference + v.tolerance + 1e-6;
  return v;
}

double cell_lipschitz(const Partition& part) {
  double l = 0.0;
  for (const auto& c : part.cells)
    for (const auto& p : c.utility.pieces) l = std::max(l, p.l1_norm());
  return l;
}

Verdict verify_grid_acquire(const AcquireSetup& s, const CostSpec& cost, double step) {
  const double n = std::round(1.0 / step);
  if (std::abs(n * step - 1.0) > 1e-9) throw UsageError("simplex grid step must be 1/N");
  const auto e = solve_info_acquisition(s.partition, cost, s.prior);
  auto phi = [&](std::span<const double> x) { return s.partition.evaluate(x, 1e-9) - cost(x); };
  double lh = 0.0;
  for (const auto& p : cost.pieces) lh = std::max(lh, p.l1_norm());
  Verdict v;
  v.oracle = "grid";
  v.solver = e.value;
  v.reference = grid_concavify(phi, s.prior, GridSpec::on_simplex(step));
  v.tolerance = (cell_lipschitz(s.partition) + lh) * step;
  v.pass = v.reference <= v.solver + 1e-6 && v.solver <= v.reference + v.tolerance + 1e-6;
  return v;
}

Verdict verify_mis(const io::InstanceFile& f, const std::optional<std::string>& result) {
  if (f.kind != "graph") throw UsageError("--against mis needs a graph instance");
  const auto& g = std::get<Graph>(f.payload);
  const double k = static_cast<double>(g.num_nodes);
  Verdict v;
  v.oracle = "mis";
  // The reduction concerns one leader strategy per type.
  const double value = result ? result_objective(*result)
                              : solve_action_independent(instance_for_solve(f)).value;
  v.solver = k * value;
  v.reference = static_cast<double>(brute_force_mis(g));
  v.tolerance = 1e-6;
  v.pass = std::abs(v.solver - v.reference) <= v.tolerance;
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Optimal coordination mechanisms for principal-agent problems"};
  app.require_subcommand(1);

  Output out;
  std::string path;
  double epsilon = 1e-3;
  std::string klass = "general";
  std::string cost_flag = "zero";
  std::string against;
  std::optional<double> bound;
  std::optional<std::string> result;

  auto add_output = [&](CLI::App* sub) {
    sub->add_flag("--json", out.json, "Print the JSON result on stdout");
    sub->add_option("-o,--output", out.path, "Write the JSON result to a file");
  };

  auto* solve = app.add_subcommand("solve", "Optimal mechanism for an instance");
  solve->add_option("path", path, "Instance file")->required();
  solve->add_option("--epsilon", epsilon, "Repair weight for irregular optima")->check(CLI::Range(1e-12, 1.0));
  solve->add_option("--class", klass, "Mechanism class")
      ->check(CLI::IsMember({"general", "type-independent", "action-independent"}));
  add_output(solve);

  auto* acquire = app.add_subcommand("acquire", "Optimal costly experiment");
  acquire->add_option("path", path, "Decision or persuasion instance file")->required();
  acquire->add_option("--cost", cost_flag, "zero | pwl:<file> | entropy:<n>");
  add_output(acquire);

  auto* verify = app.add_subcommand("verify", "Check a solution against an oracle");
  verify->add_option("path", path, "Instance file")->required();
  verify->add_option("--against", against, "grid:<step> | mis")->required();
  verify->add_option("--bound", bound, "Cap an unbounded strategy space at [-B, B]^d");
  verify->add_option("--result", result, "Result file from `solve` instead of solving");
  verify->add_option("--cost", cost_flag, "Cost for decision/persuasion grid checks");
  verify->add_option("--epsilon", epsilon, "Repair weight when solving")->check(CLI::Range(1e-12, 1.0));
  add_output(verify);

  auto* format = app.add_subcommand("format", "Print an instance file in canonical form");
  format->add_option("path", path, "Instance file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? kOk : kUsage;
  }

  try {
    SolverOptions opts;
    apply_env_tolerance(opts);
    const auto file = io::load_instance(path);

    if (format->parsed()) {
      std::cout << io::serialize_instance(file);
      return kOk;
    }

    if (solve->parsed()) {
      const auto inst = instance_for_solve(file);
      const auto s = klass == "general" ? solve_general(inst, epsilon, opts)
                                        : solve_restricted(inst, klass == "type-independent");
      emit(out, s.result, solve_summary(s.result));
      return kOk;
    }

    if (acquire->parsed()) {
      const auto setup = acquire_setup(file);
      const auto cost = parse_cost_flag(cost_flag, setup.prior.size());
      const auto e = solve_info_acquisition(setup.partition, cost, setup.prior);
      const json j = io::experiment_json(e, setup.states, setup.partition);
      std::string human = "value: " + fmt(e.value) + "\ncost term: " + fmt(e.cost_term) +
                          "\napproximation gap: " + fmt(e.gap) + "\ncells: " +
                          std::to_string(setup.partition.cells.size()) + "\n";
      for (std::size_t i = 0; i < e.signals.size(); ++i)
        human += "  p=" + fmt(e.signals[i].first) + "  posterior=" + json(e.signals[i].second).dump() +
                 "  cell=" + setup.partition.cells[e.cells[i]].label + "\n";
      emit(out, j, human);
      return kOk;
    }

    Verdict v;
    if (against == "mis") {
      v = verify_mis(file, result);
    } else if (against.rfind("grid:", 0) == 0) {
      const double step = parse_step(against);
      if (file.kind == "decision" || (file.kind == "persuasion" && cost_flag != "zero")) {
        const auto setup = acquire_setup(file);
        v = verify_grid_acquire(setup, parse_cost_flag(cost_flag, setup.prior.size()), step);
      } else {
        v = verify_grid_pa(instance_for_solve(file), step, bound, result, epsilon, opts);
      }
    } else {
      throw UsageError("unknown oracle '" + against + "' (grid:<step> | mis)");
    }
    const json j = {{"oracle", v.oracle},       {"solver_value", v.solver},
                    {"oracle_value", v.reference}, {"tolerance", v.tolerance},
                    {"pass", v.pass}};
    emit(out, j,
         "solver value: " + fmt(v.solver) + "\noracle value: " + fmt(v.reference) +
             "\ntolerance: " + fmt(v.tolerance) + "\n" + (v.pass ? "PASS" : "FAIL") + "\n");
    return v.pass ? kOk : kFail;
  } catch (const io::ParseError& e) {
    std::cerr << path << (e.line() > 0 ? ":" : ": ") << e.what() << "\n";
    return kUsage;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return kInfeasible;
  } catch (const UnboundedError& e) {
    std::cerr << "unbounded: " << e.what() << "\n";
    return kUnbounded;
  } catch (const SizeGuardError& e) {
    std::cerr << "too large: " << e.what() << "\n";
    return kGuard;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
}
