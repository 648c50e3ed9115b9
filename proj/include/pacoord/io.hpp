#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>

#include "json.hpp"
#include "pacoord/applications.hpp"
#include "pacoord/graph.hpp"
#include "pacoord/info_acquisition.hpp"
#include "pacoord/mechanism_solver.hpp"
#include "pacoord/model.hpp"

namespace pacoord::io {

inline constexpr const char* kSchemaVersion = "1";

/// Malformed input. line/column are 1-based and 0 when the problem is
/// structural rather than syntactic (then `where` holds a JSON pointer).
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& msg, std::size_t line = 0, std::size_t column = 0,
             std::string where = {});
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }
  const std::string& where() const noexcept { return where_; }

 private:
  std::size_t line_, column_;
  std::string where_;
};

using Payload = std::variant<PAInstance, ContractInstance, PersuasionInstance,
                             StackelbergInstance, SellingInfoInstance, DecisionProblem, Graph>;

struct InstanceFile {
  std::string kind;
  Payload payload;
};

/// Strict parse: unknown or missing fields, wrong types, non-finite numbers
/// and failed domain validation all raise ParseError.
InstanceFile parse_instance(std::string_view text);
InstanceFile load_instance(const std::string& path);

nlohmann::json to_json(const InstanceFile& f);
/// Canonical text: sorted keys, two-space indent, trailing newline.
std::string serialize(const nlohmann::json& j);
std::string serialize_instance(const InstanceFile& f);

/// Generalized principal-agent form of pa/contract/persuasion/stackelberg/
/// selling_info instances. Throws ParseError for other kinds.
PAInstance to_pa(const InstanceFile& f);

/// Signal costs: {"pieces": [{"coeffs": [...], "offset": x}, ...]} or, for two
/// states, {"points": [[s, h(s, 1-s)], ...]} covering s = 0..1 with convex
/// interpolation. Errors mention "cost not max-of-affines".
CostSpec parse_cost(std::string_view text, std::size_t dim);
CostSpec load_cost(const std::string& path, std::size_t dim);

nlohmann::json mechanism_json(const PAInstance& inst, const SuccinctMechanism& mech);
nlohmann::json experiment_json(const Experiment& e, const std::vector<std::string>& states,
                               const Partition& part);

std::string read_file(const std::string& path);

}  // namespace pacoord::io
