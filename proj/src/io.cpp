#include "pacoord/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <optional>
#include <set>
#include <sstream>

namespace pacoord::io {

using nlohmann::json;

ParseError::ParseError(const std::string& msg, std::size_t line, std::size_t column,
                       std::string where)
    : std::runtime_error(msg), line_(line), column_(column), where_(std::move(where)) {}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

namespace {

// ---------------------------------------------------------------- reading

[[noreturn]] void fail(const std::string& where, const std::string& msg) {
  throw ParseError((where.empty() ? std::string("/") : where) + ": " + msg, 0, 0, where);
}

std::string child(const std::string& where, const std::string& key) { return where + "/" + key; }
std::string child(const std::string& where, std::size_t i) { return where + "/" + std::to_string(i); }

// Object reader that rejects unknown keys once all fields are taken.
class Obj {
 public:
  Obj(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j.is_object()) fail(where_, "expected an object");
  }
  const json& at(const std::string& key) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end()) fail(where_, "missing field \"" + key + "\"");
    return *it;
  }
  const json* optional(const std::string& key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() || it->is_null() ? nullptr : &*it;
  }
  std::string path(const std::string& key) const { return child(where_, key); }
  void done() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) fail(where_, "unknown field \"" + it.key() + "\"");
  }

 private:
  const json& j_;
  std::string where_;
  std::set<std::string> seen_;
};

double number(const json& j, const std::string& where) {
  if (!j.is_number()) fail(where, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail(where, "number is not finite");
  return v;
}

std::size_t count(const json& j, const std::string& where) {
  if (!j.is_number_unsigned()) fail(where, "expected a non-negative integer");
  return j.get<std::size_t>();
}

bool boolean(const json& j, const std::string& where) {
  if (!j.is_boolean()) fail(where, "expected true or false");
  return j.get<bool>();
}

const json& array(const json& j, const std::string& where, std::optional<std::size_t> len = {}) {
  if (!j.is_array()) fail(where, "expected an array");
  if (len && j.size() != *len)
    fail(where, "expected " + std::to_string(*len) + " entries, found " + std::to_string(j.size()));
  return j;
}

std::vector<double> vec(const json& j, const std::string& where, std::optional<std::size_t> len = {}) {
  array(j, where, len);
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], child(where, i)));
  return out;
}

std::vector<std::string> labels(const json& j, const std::string& where) {
  array(j, where);
  std::vector<std::string> out;
  std::set<std::string> unique;
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_string()) fail(child(where, i), "expected a string");
    out.push_back(j[i].get<std::string>());
    if (!unique.insert(out.back()).second) fail(child(where, i), "duplicate label \"" + out.back() + "\"");
  }
  if (out.empty()) fail(where, "expected at least one label");
  return out;
}

std::vector<std::vector<double>> matrix(const json& j, const std::string& where, std::size_t rows,
                                        std::size_t cols) {
  array(j, where, rows);
  std::vector<std::vector<double>> out;
  for (std::size_t i = 0; i < rows; ++i) out.push_back(vec(j[i], child(where, i), cols));
  return out;
}

// [type][action] -> vector of length len
PairTable<std::vector<double>> pair_vectors(const json& j, const std::string& where, std::size_t nt,
                                            std::size_t na, std::size_t len) {
  array(j, where, nt);
  PairTable<std::vector<double>> out(nt, na);
  for (std::size_t t = 0; t < nt; ++t) {
    array(j[t], child(where, t), na);
    for (std::size_t a = 0; a < na; ++a) out(t, a) = vec(j[t][a], child(child(where, t), a), len);
  }
  return out;
}

AffineForm affine(const json& j, const std::string& where, std::size_t d) {
  Obj o(j, where);
  AffineForm f{vec(o.at("coeffs"), o.path("coeffs"), d), number(o.at("offset"), o.path("offset"))};
  o.done();
  return f;
}

Polyhedron polyhedron(const json& j, const std::string& where, std::size_t d) {
  Obj o(j, where);
  Polyhedron p = Polyhedron::whole_space(d);
  auto rows = [&](const char* key, bool equality) {
    const json* r = o.optional(key);
    if (!r) return;
    const std::string w = o.path(key);
    array(*r, w);
    for (std::size_t i = 0; i < r->size(); ++i) {
      Obj c((*r)[i], child(w, i));
      auto row = vec(c.at("row"), c.path("row"), d);
      const double rhs = number(c.at("rhs"), c.path("rhs"));
      c.done();
      equality ? p.add_eq(std::move(row), rhs) : p.add_le(std::move(row), rhs);
    }
  };
  rows("ineq", false);
  rows("eq", true);
  o.done();
  return p;
}

PAInstance read_pa(const json& j, const std::string& w) {
  Obj o(j, w);
  PAInstance inst;
  inst.types = labels(o.at("types"), o.path("types"));
  inst.actions = labels(o.at("actions"), o.path("actions"));
  const std::size_t nt = inst.types.size(), na = inst.actions.size();
  inst.prior = vec(o.at("prior"), o.path("prior"), nt);
  inst.dim = count(o.at("dim"), o.path("dim"));
  const std::size_t d = inst.dim;
  inst.strategy_space = polyhedron(o.at("strategy_space"), o.path("strategy_space"), d);
  inst.principal_utility = PairTable<ConcavePWL>(nt, na);
  inst.agent_utility = PairTable<AffineForm>(nt, na);
  {
    const std::string pw = o.path("principal_utility");
    const json& pu = array(o.at("principal_utility"), pw, nt);
    const std::string aw = o.path("agent_utility");
    const json& au = array(o.at("agent_utility"), aw, nt);
    for (std::size_t t = 0; t < nt; ++t) {
      array(pu[t], child(pw, t), na);
      array(au[t], child(aw, t), na);
      for (std::size_t a = 0; a < na; ++a) {
        const std::string here = child(child(pw, t), a);
        Obj u(pu[t][a], here);
        const json& pieces = array(u.at("pieces"), u.path("pieces"));
        if (pieces.empty()) fail(u.path("pieces"), "expected at least one piece");
        for (std::size_t k = 0; k < pieces.size(); ++k)
          inst.principal_utility(t, a).pieces.push_back(affine(pieces[k], child(u.path("pieces"), k), d));
        u.done();
        inst.agent_utility(t, a) = affine(au[t][a], child(child(aw, t), a), d);
      }
    }
  }
  if (const json* s = o.optional("supplemental")) {
    const std::string sw = o.path("supplemental");
    array(*s, sw, nt);
    for (std::size_t t = 0; t < nt; ++t) {
      if ((*s)[t].is_null()) inst.supplemental.emplace_back();
      else inst.supplemental.emplace_back(polyhedron((*s)[t], child(sw, t), d));
    }
  }
  o.done();
  const auto report = validate_instance(inst);
  if (!report.ok) {
    std::string msg = "invalid instance:";
    for (const auto& issue : report.issues) msg += " " + issue + ";";
    fail(w, msg);
  }
  return inst;
}

ContractInstance read_contract(const json& j, const std::string& w) {
  Obj o(j, w);
  ContractInstance c;
  c.types = labels(o.at("types"), o.path("types"));
  c.actions = labels(o.at("actions"), o.path("actions"));
  const std::size_t nt = c.types.size(), na = c.actions.size();
  c.prior = vec(o.at("prior"), o.path("prior"), nt);
  c.reward = vec(o.at("reward"), o.path("reward"));
  c.outcome_dist = pair_vectors(o.at("outcome_dist"), o.path("outcome_dist"), nt, na, c.reward.size());
  const auto cost = matrix(o.at("cost"), o.path("cost"), nt, na);
  c.cost = PairTable<double>(nt, na);
  for (std::size_t t = 0; t < nt; ++t)
    for (std::size_t a = 0; a < na; ++a) c.cost(t, a) = cost[t][a];
  o.done();
  return c;
}

PersuasionInstance read_persuasion(const json& j, const std::string& w) {
  Obj o(j, w);
  PersuasionInstance p;
  p.states = labels(o.at("states"), o.path("states"));
  p.types = labels(o.at("types"), o.path("types"));
  p.actions = labels(o.at("actions"), o.path("actions"));
  const std::size_t nt = p.types.size(), na = p.actions.size(), d = p.states.size();
  p.prior = vec(o.at("prior"), o.path("prior"), nt);
  p.beliefs = matrix(o.at("beliefs"), o.path("beliefs"), nt, d);
  p.sender = pair_vectors(o.at("sender"), o.path("sender"), nt, na, d);
  p.receiver = pair_vectors(o.at("receiver"), o.path("receiver"), nt, na, d);
  o.done();
  return p;
}

StackelbergInstance read_stackelberg(const json& j, const std::string& w) {
  Obj o(j, w);
  StackelbergInstance s;
  s.leader_actions = labels(o.at("leader_actions"), o.path("leader_actions"));
  s.types = labels(o.at("types"), o.path("types"));
  s.actions = labels(o.at("actions"), o.path("actions"));
  const std::size_t nt = s.types.size(), na = s.actions.size(), d = s.leader_actions.size();
  s.prior = vec(o.at("prior"), o.path("prior"), nt);
  s.leader = pair_vectors(o.at("leader"), o.path("leader"), nt, na, d);
  s.follower = pair_vectors(o.at("follower"), o.path("follower"), nt, na, d);
  o.done();
  return s;
}

SellingInfoInstance read_selling(const json& j, const std::string& w) {
  Obj o(j, w);
  SellingInfoInstance s;
  s.states = labels(o.at("states"), o.path("states"));
  s.types = labels(o.at("types"), o.path("types"));
  s.actions = labels(o.at("actions"), o.path("actions"));
  const std::size_t nt = s.types.size(), na = s.actions.size(), d = s.states.size();
  s.prior = vec(o.at("prior"), o.path("prior"), nt);
  s.belief = vec(o.at("belief"), o.path("belief"), d);
  s.value = pair_vectors(o.at("value"), o.path("value"), nt, na, d);
  if (const json* p = o.optional("participation")) s.participation = boolean(*p, o.path("participation"));
  if (const json* m = o.optional("max_price")) s.max_price = number(*m, o.path("max_price"));
  o.done();
  return s;
}

DecisionProblem read_decision(const json& j, const std::string& w) {
  Obj o(j, w);
  DecisionProblem dp;
  dp.states = labels(o.at("states"), o.path("states"));
  dp.actions = labels(o.at("actions"), o.path("actions"));
  dp.utility = matrix(o.at("utility"), o.path("utility"), dp.actions.size(), dp.states.size());
  dp.prior = vec(o.at("prior"), o.path("prior"), dp.states.size());
  o.done();
  return dp;
}

Graph read_graph(const json& j, const std::string& w) {
  Obj o(j, w);
  const std::size_t n = count(o.at("num_nodes"), o.path("num_nodes"));
  const std::string ew = o.path("edges");
  const json& e = array(o.at("edges"), ew);
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  std::set<std::pair<std::size_t, std::size_t>> unique;
  for (std::size_t i = 0; i < e.size(); ++i) {
    const std::string here = child(ew, i);
    array(e[i], here, 2);
    const std::size_t u = count(e[i][0], child(here, 0));
    const std::size_t v = count(e[i][1], child(here, 1));
    if (u >= n || v >= n) fail(here, "edge endpoint out of range");
    if (u == v) fail(here, "self-loop");
    if (!unique.insert({std::min(u, v), std::max(u, v)}).second) fail(here, "duplicate edge");
    edges.emplace_back(u, v);
  }
  o.done();
  if (n == 0) fail(o.path("num_nodes"), "graph needs at least one node");
  return Graph(n, std::move(edges));
}

// Runs the domain validator of a special-case instance, mapping its error to a ParseError.
template <class T>
T validated(T value, const std::string& where) {
  try {
    validate(value);
  } catch (const std::exception& e) {
    fail(where, e.what());
  }
  return value;
}

json parse_json(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    // Translate the byte offset into line and column.
    std::size_t line = 1, col = 1;
    const std::size_t stop = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t i = 0; i < stop; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    std::string what = e.what();
    const auto pos = what.find("syntax error");
    if (pos != std::string::npos) what = what.substr(pos);
    throw ParseError(std::to_string(line) + ":" + std::to_string(col) + ": " + what, line, col);
  } catch (const json::out_of_range& e) {
    throw ParseError(std::string("non-finite number: ") + e.what());
  }
}

// ---------------------------------------------------------------- writing

json affine_json(const AffineForm& f) { return {{"coeffs", f.coeffs}, {"offset", f.offset}}; }

json polyhedron_json(const Polyhedron& p) {
  json j = json::object();
  auto rows = [](const std::vector<lp::Constraint>& cs) {
    json out = json::array();
    for (const auto& c : cs) out.push_back({{"row", c.coeffs}, {"rhs", c.rhs}});
    return out;
  };
  if (!p.ineq.empty()) j["ineq"] = rows(p.ineq);
  if (!p.eq.empty()) j["eq"] = rows(p.eq);
  return j;
}

template <class T, class F>
json pair_json(const PairTable<T>& table, F&& fn) {
  json out = json::array();
  for (std::size_t t = 0; t < table.num_types(); ++t) {
    json row = json::array();
    for (std::size_t a = 0; a < table.num_actions(); ++a) row.push_back(fn(table(t, a)));
    out.push_back(std::move(row));
  }
  return out;
}

const auto identity = [](const auto& v) { return json(v); };

json payload_json(const PAInstance& p) {
  json j = {{"types", p.types},
            {"actions", p.actions},
            {"prior", p.prior},
            {"dim", p.dim},
            {"strategy_space", polyhedron_json(p.strategy_space)},
            {"principal_utility", pair_json(p.principal_utility,
                                            [](const ConcavePWL& u) {
                                              json pieces = json::array();
                                              for (const auto& f : u.pieces) pieces.push_back(affine_json(f));
                                              return json{{"pieces", pieces}};
                                            })},
            {"agent_utility", pair_json(p.agent_utility, affine_json)}};
  if (!p.supplemental.empty()) {
    json s = json::array();
    for (const auto& c : p.supplemental) s.push_back(c ? polyhedron_json(*c) : json(nullptr));
    j["supplemental"] = s;
  }
  return j;
}

json payload_json(const ContractInstance& c) {
  return {{"types", c.types},   {"actions", c.actions},
          {"prior", c.prior},   {"reward", c.reward},
          {"outcome_dist", pair_json(c.outcome_dist, identity)},
          {"cost", pair_json(c.cost, identity)}};
}

json payload_json(const PersuasionInstance& p) {
  return {{"states", p.states},   {"types", p.types},
          {"actions", p.actions}, {"prior", p.prior},
          {"beliefs", p.beliefs}, {"sender", pair_json(p.sender, identity)},
          {"receiver", pair_json(p.receiver, identity)}};
}

json payload_json(const StackelbergInstance& s) {
  return {{"leader_actions", s.leader_actions}, {"types", s.types},
          {"actions", s.actions},               {"prior", s.prior},
          {"leader", pair_json(s.leader, identity)},
          {"follower", pair_json(s.follower, identity)}};
}

json payload_json(const SellingInfoInstance& s) {
  json j = {{"states", s.states},   {"types", s.types},
            {"actions", s.actions}, {"prior", s.prior},
            {"belief", s.belief},   {"value", pair_json(s.value, identity)},
            {"participation", s.participation}};
  if (s.max_price) j["max_price"] = *s.max_price;
  return j;
}

json payload_json(const DecisionProblem& dp) {
  return {{"states", dp.states}, {"actions", dp.actions}, {"utility", dp.utility}, {"prior", dp.prior}};
}

json payload_json(const Graph& g) {
  json edges = json::array();
  for (auto [u, v] : g.edges) edges.push_back({u, v});
  return {{"num_nodes", g.num_nodes}, {"edges", edges}};
}

}  // namespace

InstanceFile parse_instance(std::string_view text) {
  const json j = parse_json(text);
  Obj o(j, "");
  const json& version = o.at("schema_version");
  if (!version.is_string() || version.get<std::string>() != kSchemaVersion)
    fail("/schema_version", std::string("expected \"") + kSchemaVersion + "\"");
  const json& kind_j = o.at("kind");
  if (!kind_j.is_string()) fail("/kind", "expected a string");
  const std::string kind = kind_j.get<std::string>();
  const json& p = o.at("payload");
  o.done();
  const std::string w = "/payload";
  InstanceFile f{kind, Graph{}};
  if (kind == "pa") f.payload = read_pa(p, w);
  else if (kind == "contract") f.payload = validated(read_contract(p, w), w);
  else if (kind == "persuasion") f.payload = validated(read_persuasion(p, w), w);
  else if (kind == "stackelberg") f.payload = validated(read_stackelberg(p, w), w);
  else if (kind == "selling_info") f.payload = validated(read_selling(p, w), w);
  else if (kind == "decision") f.payload = validated(read_decision(p, w), w);
  else if (kind == "graph") f.payload = read_graph(p, w);
  else fail("/kind", "unknown kind \"" + kind + "\"");
  return f;
}

InstanceFile load_instance(const std::string& path) { return parse_instance(read_file(path)); }

json to_json(const InstanceFile& f) {
  return {{"schema_version", kSchemaVersion},
          {"kind", f.kind},
          {"payload", std::visit([](const auto& p) { return payload_json(p); }, f.payload)}};
}

std::string serialize(const json& j) { return j.dump(2) + "\n"; }

std::string serialize_instance(const InstanceFile& f) { return serialize(to_json(f)); }

PAInstance to_pa(const InstanceFile& f) {
  return std::visit(
      [&](const auto& p) -> PAInstance {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, PAInstance>) return p;
        else if constexpr (std::is_same_v<T, ContractInstance>) return contract_to_pa(p);
        else if constexpr (std::is_same_v<T, PersuasionInstance>) return persuasion_to_pa(p);
        else if constexpr (std::is_same_v<T, StackelbergInstance>) return stackelberg_to_pa(p);
        else if constexpr (std::is_same_v<T, SellingInfoInstance>) return selling_info_to_pa(p);
        else throw ParseError("kind \"" + f.kind + "\" has no principal-agent form");
      },
      f.payload);
}

// ---------------------------------------------------------------- costs

CostSpec parse_cost(std::string_view text, std::size_t dim) {
  const json j = parse_json(text);
  Obj o(j, "");
  const json* pieces = o.optional("pieces");
  const json* points = o.optional("points");
  o.done();
  if ((pieces == nullptr) == (points == nullptr))
    fail("", "cost not max-of-affines: give exactly one of \"pieces\" or \"points\"");
  if (pieces) {
    array(*pieces, "/pieces");
    std::vector<AffineForm> out;
    for (std::size_t i = 0; i < pieces->size(); ++i) out.push_back(affine((*pieces)[i], child("/pieces", i), dim));
    try {
      return CostSpec::piecewise(std::move(out));
    } catch (const std::invalid_argument& e) {
      fail("/pieces", e.what());
    }
  }
  if (dim != 2) fail("/points", "cost not max-of-affines: \"points\" needs exactly two states");
  array(*points, "/points");
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 0; i < points->size(); ++i) {
    const auto p = vec((*points)[i], child("/points", i), 2);
    pts.emplace_back(p[0], p[1]);
  }
  if (pts.size() < 2) fail("/points", "cost not max-of-affines: need at least two points");
  if (pts.front().first != 0.0 || pts.back().first != 1.0)
    fail("/points", "cost not max-of-affines: points must run from s = 0 to s = 1");
  std::vector<AffineForm> out;
  double prev_slope = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const auto [s0, h0] = pts[i];
    const auto [s1, h1] = pts[i + 1];
    if (!(s1 > s0)) fail(child("/points", i + 1), "cost not max-of-affines: s must increase");
    const double slope = (h1 - h0) / (s1 - s0);
    if (slope < prev_slope - 1e-12)
      fail(child("/points", i + 1), "cost not max-of-affines: interpolation is not convex");
    prev_slope = slope;
    out.push_back({{slope, 0.0}, h0 - slope * s0});
  }
  return CostSpec::piecewise(std::move(out));
}

CostSpec load_cost(const std::string& path, std::size_t dim) { return parse_cost(read_file(path), dim); }

// ---------------------------------------------------------------- results

json mechanism_json(const PAInstance& inst, const SuccinctMechanism& mech) {
  json types = json::array();
  for (std::size_t t = 0; t < inst.num_types(); ++t) {
    json entries = json::array();
    for (std::size_t a = 0; a < inst.num_actions(); ++a) {
      entries.push_back({{"action", inst.actions[a]},
                         {"prob", mech.probs(t, a)},
                         {"strategy", mech.strategies(t, a)},
                         {"used", mech.probs(t, a) > 0.0}});
    }
    types.push_back({{"type", inst.types[t]}, {"entries", entries}});
  }
  return types;
}

json experiment_json(const Experiment& e, const std::vector<std::string>& states, const Partition& part) {
  json signals = json::array();
  for (std::size_t i = 0; i < e.signals.size(); ++i) {
    signals.push_back({{"prob", e.signals[i].first},
                       {"posterior", e.signals[i].second},
                       {"cell", part.cells[e.cells[i]].label}});
  }
  return {{"states", states},   {"signals", signals},   {"value", e.value},
          {"cost_term", e.cost_term}, {"approximation_gap", e.gap},
          {"cells", part.cells.size()}};
}

}  // namespace pacoord::io
