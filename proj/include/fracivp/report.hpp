#pragma once

#include <string>

#include <json.hpp>

#include "fracivp/model.hpp"
#include "fracivp/solver.hpp"

namespace fracivp::report {

using Json = nlohmann::ordered_json;

/// Fixed-order JSON object for one certificate.
Json to_json(const model::Certificate& c);
Json to_json(const model::Problem& p);

/// Number as JSON; NaN and infinities become null.
Json number(double v);

/// Two-space indented JSON with floats written as %.17g and keys in
/// insertion order. Arrays of scalars stay on one line.
std::string dump(const Json& j);

/// %.17g
std::string format_double(double v);

/// CSV with header "x,u,residual", one row per grid node.
std::string solution_csv(const solver::Solution& s);

}  // namespace fracivp::report
