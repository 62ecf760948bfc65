#include "fracivp/report.hpp"

#include <cmath>
#include <cstdio>

namespace fracivp::report {

namespace {

bool is_scalar(const Json& j) { return !j.is_array() && !j.is_object(); }

void write(const Json& j, std::string& out, int indent) {
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  const std::string inner(static_cast<std::size_t>(indent + 1) * 2, ' ');
  switch (j.type()) {
    case Json::value_t::null: out += "null"; return;
    case Json::value_t::boolean: out += j.get<bool>() ? "true" : "false"; return;
    case Json::value_t::number_integer: out += std::to_string(j.get<std::int64_t>()); return;
    case Json::value_t::number_unsigned: out += std::to_string(j.get<std::uint64_t>()); return;
    case Json::value_t::number_float: {
      const double v = j.get<double>();
      out += std::isfinite(v) ? format_double(v) : "null";
      return;
    }
    case Json::value_t::string: out += j.dump(); return;
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      const bool flat = std::all_of(j.begin(), j.end(), is_scalar);
      out += "[";
      bool first = true;
      for (const auto& e : j) {
        if (!first) out += flat ? ", " : ",";
        if (!flat) out += "\n" + inner;
        first = false;
        write(e, out, indent + 1);
      }
      out += flat ? "]" : "\n" + pad + "]";
      return;
    }
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        out += first ? "\n" : ",\n";
        first = false;
        out += inner + Json(it.key()).dump() + ": ";
        write(it.value(), out, indent + 1);
      }
      out += "\n" + pad + "}";
      return;
    }
    default: out += "null"; return;
  }
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json to_json(const model::Certificate& c) {
  Json j;
  j["kind"] = std::string(model::to_string(c.kind));
  j["passed"] = c.passed;
  j["estimate"] = number(c.estimate);
  j["threshold"] = number(c.threshold);
  j["samples"] = c.samples;
  j["tolerance"] = number(c.tolerance);
  j["notes"] = c.notes;
  return j;
}

Json to_json(const model::Problem& p) {
  Json j;
  j["a"] = number(p.a);
  j["u0"] = number(p.u0);
  j["T"] = number(p.T);
  j["h"] = p.h.text();
  return j;
}

std::string dump(const Json& j) {
  std::string out;
  write(j, out, 0);
  out += "\n";
  return out;
}

std::string solution_csv(const solver::Solution& s) {
  std::string out = "x,u,residual\n";
  const auto& x = s.u.grid();
  const auto& u = s.u.values();
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = i < s.node_residuals.size() ? s.node_residuals[i] : std::nan("");
    out += format_double(x[i]) + "," + format_double(u[i]) + "," + format_double(r) + "\n";
  }
  return out;
}

}  // namespace fracivp::report
