#pragma once

// Run configuration and serializers: key = value config text, JSON reports,
// CSV tables (header row, comma delimiter, LF, 17 significant digits).

#include <cstdint>
#include <iomanip>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "plankton/control.hpp"
#include "plankton/dynamics.hpp"
#include "plankton/equilibria.hpp"
#include "plankton/nsbif.hpp"

namespace plankton {

using Json = nlohmann::ordered_json;

inline std::string fmt17(double x) {
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

inline constexpr std::uint64_t kDefaultSeed = 20240601;

struct RunConfig {
  std::string command;
  double r = 0.5;
  double beta = 2.0;
  double theta = 0.35;
  double gamma = 1.0;
  double theta_lo = 0.01;
  double theta_hi = 2.0;
  std::size_t steps = 120;
  std::size_t n = 10000;
  double burn_in = 0.5;
  std::size_t max_samples = 200;
  State init{0.3, 0.9};
  double s1 = 0.0;
  double s2 = 0.0;
  std::string target = "ns";  // ns | E1 | E2 | E3
  bool emit_triangle = false;
  std::string set = "auto";  // auto | M1 | M2
  std::size_t samples = 100000;
  std::uint64_t seed = kDefaultSeed;
  std::string out;  // empty: stdout
  std::string format = "csv";

  Params params() const { return Params(r, beta, theta, gamma); }

  bool operator==(const RunConfig&) const = default;
};

class ConfigError : public std::invalid_argument {
public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double x = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("bad number for " + key + ": '" + v + "'");
  }
}

inline std::uint64_t parse_uint(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    if (!v.empty() && v[0] == '-') throw std::invalid_argument(v);
    const auto x = std::stoull(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("bad count for " + key + ": '" + v + "'");
  }
}

inline bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError("bad boolean for " + key + ": '" + v + "'");
}

}  // namespace detail

/// Parses "u,v".
inline State parse_state(const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) throw ConfigError("expected u,v but got '" + text + "'");
  return {detail::parse_double("init", detail::trim(text.substr(0, comma))),
          detail::parse_double("init", detail::trim(text.substr(comma + 1)))};
}

inline void set_config_key(RunConfig& c, const std::string& key, const std::string& value) {
  using namespace detail;
  if (key == "command") c.command = value;
  else if (key == "r") c.r = parse_double(key, value);
  else if (key == "beta") c.beta = parse_double(key, value);
  else if (key == "theta") c.theta = parse_double(key, value);
  else if (key == "gamma") c.gamma = parse_double(key, value);
  else if (key == "theta-lo") c.theta_lo = parse_double(key, value);
  else if (key == "theta-hi") c.theta_hi = parse_double(key, value);
  else if (key == "steps") c.steps = parse_uint(key, value);
  else if (key == "n") c.n = parse_uint(key, value);
  else if (key == "burn-in") c.burn_in = parse_double(key, value);
  else if (key == "max-samples") c.max_samples = parse_uint(key, value);
  else if (key == "init") c.init = parse_state(value);
  else if (key == "s1") c.s1 = parse_double(key, value);
  else if (key == "s2") c.s2 = parse_double(key, value);
  else if (key == "target") c.target = value;
  else if (key == "emit-triangle") c.emit_triangle = parse_bool(key, value);
  else if (key == "set") c.set = value;
  else if (key == "samples") c.samples = parse_uint(key, value);
  else if (key == "seed") c.seed = parse_uint(key, value);
  else if (key == "out") c.out = value;
  else if (key == "format") c.format = value;
  else throw ConfigError("unknown config key '" + key + "'");
}

/// Reads "key = value" lines on top of `base`; '#' starts a comment.
inline RunConfig parse_config(std::istream& in, RunConfig base = {}) {
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    set_config_key(base, detail::trim(line.substr(0, eq)), detail::trim(line.substr(eq + 1)));
  }
  return base;
}

inline RunConfig parse_config(const std::string& text, RunConfig base = {}) {
  std::istringstream in(text);
  return parse_config(in, std::move(base));
}

inline std::string emit_config(const RunConfig& c) {
  std::ostringstream os;
  const auto kv = [&os](const char* k, const std::string& v) { os << k << " = " << v << '\n'; };
  if (!c.command.empty()) kv("command", c.command);
  kv("r", fmt17(c.r));
  kv("beta", fmt17(c.beta));
  kv("theta", fmt17(c.theta));
  kv("gamma", fmt17(c.gamma));
  kv("theta-lo", fmt17(c.theta_lo));
  kv("theta-hi", fmt17(c.theta_hi));
  kv("steps", std::to_string(c.steps));
  kv("n", std::to_string(c.n));
  kv("burn-in", fmt17(c.burn_in));
  kv("max-samples", std::to_string(c.max_samples));
  kv("init", fmt17(c.init.u) + "," + fmt17(c.init.v));
  kv("s1", fmt17(c.s1));
  kv("s2", fmt17(c.s2));
  kv("target", c.target);
  kv("emit-triangle", c.emit_triangle ? "true" : "false");
  kv("set", c.set);
  kv("samples", std::to_string(c.samples));
  kv("seed", std::to_string(c.seed));
  if (!c.out.empty()) kv("out", c.out);
  kv("format", c.format);
  return os.str();
}

inline Json to_json(const RunConfig& c) {
  return Json{{"command", c.command},
              {"params", {{"r", c.r}, {"beta", c.beta}, {"theta", c.theta}, {"gamma", c.gamma}}},
              {"theta_lo", c.theta_lo},
              {"theta_hi", c.theta_hi},
              {"steps", c.steps},
              {"n", c.n},
              {"burn_in", c.burn_in},
              {"max_samples", c.max_samples},
              {"init", {c.init.u, c.init.v}},
              {"gains", {{"s1", c.s1}, {"s2", c.s2}}},
              {"target", c.target},
              {"emit_triangle", c.emit_triangle},
              {"set", c.set},
              {"samples", c.samples},
              {"seed", c.seed},
              {"out", c.out},
              {"format", c.format}};
}

inline RunConfig config_from_json(const Json& j) {
  RunConfig c;
  try {
    c.command = j.at("command").get<std::string>();
    const auto& p = j.at("params");
    c.r = p.at("r").get<double>();
    c.beta = p.at("beta").get<double>();
    c.theta = p.at("theta").get<double>();
    c.gamma = p.at("gamma").get<double>();
    c.theta_lo = j.at("theta_lo").get<double>();
    c.theta_hi = j.at("theta_hi").get<double>();
    c.steps = j.at("steps").get<std::size_t>();
    c.n = j.at("n").get<std::size_t>();
    c.burn_in = j.at("burn_in").get<double>();
    c.max_samples = j.at("max_samples").get<std::size_t>();
    c.init = {j.at("init").at(0).get<double>(), j.at("init").at(1).get<double>()};
    c.s1 = j.at("gains").at("s1").get<double>();
    c.s2 = j.at("gains").at("s2").get<double>();
    c.target = j.at("target").get<std::string>();
    c.emit_triangle = j.at("emit_triangle").get<bool>();
    c.set = j.at("set").get<std::string>();
    c.samples = j.at("samples").get<std::size_t>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.out = j.at("out").get<std::string>();
    c.format = j.at("format").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config json: ") + e.what());
  }
  return c;
}

// ---- JSON reports ----

inline Json to_json(Complex z) { return Json{{"re", z.real()}, {"im", z.imag()}}; }

inline Json to_json(const EigenPair& ev) { return Json::array({to_json(ev[0]), to_json(ev[1])}); }

inline Json to_json(const Params& p) {
  return Json{{"r", p.r()}, {"beta", p.beta()}, {"theta", p.theta()}, {"gamma", p.gamma()}};
}

inline Json to_json(const StabilityClass& s) {
  Json j{{"class", to_string(s.tag)}, {"eigenvalues", to_json(s.eigenvalues)}};
  if (s.certificates)
    j["certificates"] = {{"q", s.certificates->q},
                         {"F(1)", s.certificates->f_plus_one},
                         {"F(-1)", s.certificates->f_minus_one}};
  j["certificate_agrees"] = s.certificate_agrees;
  if (!s.diagnostic.empty()) j["diagnostic"] = s.diagnostic;
  return j;
}

inline Json to_json(const FixedPoint& fp) {
  return Json{{"kind", to_string(fp.kind)}, {"u", fp.u},        {"v", fp.v},
              {"residual", fp.residual},    {"borderline", fp.borderline}, {"stability", to_json(fp.stability)}};
}

inline Json to_json(const TaylorCoefficients& t) {
  return Json{{"a10", t.a10}, {"a01", t.a01}, {"a20", t.a20}, {"a11", t.a11}, {"a02", t.a02}, {"a30", t.a30},
              {"a21", t.a21}, {"a12", t.a12}, {"a03", t.a03}, {"b10", t.b10}, {"b01", t.b01}, {"b20", t.b20},
              {"b11", t.b11}, {"b02", t.b02}, {"b30", t.b30}, {"b21", t.b21}, {"b12", t.b12}, {"b03", t.b03}};
}

inline Json to_json(const CdCoefficients& c) {
  return Json{{"c20", c.c20}, {"c11", c.c11}, {"c02", c.c02}, {"c30", c.c30}, {"c21", c.c21},
              {"c12", c.c12}, {"c03", c.c03}, {"d20", c.d20}, {"d11", c.d11}, {"d02", c.d02},
              {"d30", c.d30}, {"d21", c.d21}, {"d12", c.d12}, {"d03", c.d03}};
}

inline Json to_json(const NSReport& r) {
  const NsVerdict v = ns_verdict(r);
  return Json{{"form", to_string(r.form)},
              {"theta0", r.theta0},
              {"u_bar", r.u_bar},
              {"v_bar", r.v_bar},
              {"kind", to_string(r.kind)},
              {"eigenvalues", to_json(r.eigenvalues)},
              {"alpha", r.alpha},
              {"m", r.m},
              {"n", r.n},
              {"taylor", to_json(r.taylor)},
              {"cd", to_json(r.cd)},
              {"L20", to_json(r.L20)},
              {"L11", to_json(r.L11)},
              {"L02", to_json(r.L02)},
              {"L21", to_json(r.L21)},
              {"L", r.L},
              {"dmod_dtheta", r.dmod_dtheta},
              {"non_resonant", non_resonant(r.eigenvalues[0])},
              {"verdict", {{"bifurcates", v.bifurcates}, {"curve", to_string(v.curve)}, {"side", to_string(v.side)}}}};
}

inline Json to_json(const GainLine& l) { return Json{{"a", l.a}, {"b", l.b}, {"c", l.c}}; }

inline Json to_json(Gains g) { return Json{{"s1", g.s1}, {"s2", g.s2}}; }

inline Json to_json(const StabilityTriangle& t) {
  Json j{{"degenerate", t.degenerate}};
  j["lines"] = Json{{"l1", to_json(t.lines[0])}, {"l2", to_json(t.lines[1])}, {"l3", to_json(t.lines[2])}};
  j["vertices"] = Json::array({to_json(t.vertices[0]), to_json(t.vertices[1]), to_json(t.vertices[2])});
  return j;
}

inline Json to_json(const AttractorSummary& s) {
  return Json{{"verdict", s.label()},
              {"final_distance", s.final_distance},
              {"angular_sweep", s.angular_sweep},
              {"tail",
               {{"u_min", s.tail.u_min},
                {"u_max", s.tail.u_max},
                {"u_mean", s.tail.u_mean},
                {"v_min", s.tail.v_min},
                {"v_max", s.tail.v_max},
                {"v_mean", s.tail.v_mean}}}};
}

inline Json to_json(const InvarianceReport& r) {
  Json viol = Json::array();
  for (const auto& v : r.violations)
    viol.push_back({{"point", {v.point.u, v.point.v}}, {"image", {v.image.u, v.image.v}}});
  return Json{{"set", to_string(r.which)}, {"samples", r.samples}, {"seed", r.seed}, {"violations", viol}};
}

// ---- CSV ----

inline void write_orbit_csv(std::ostream& os, const Orbit& o) {
  os << "step,u,v\n";
  for (std::size_t k = 0; k < o.points.size(); ++k)
    os << k << ',' << fmt17(o.points[k].u) << ',' << fmt17(o.points[k].v) << '\n';
}

/// One row per recorded u value; an escaped theta yields a single row with empty u_tail.
inline void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  os << "theta,u_tail,verdict\n";
  for (const auto& row : rows) {
    const std::string label = row.summary.label();
    if (row.u_tail.empty()) os << fmt17(row.theta) << ",," << label << '\n';
    for (const double u : row.u_tail) os << fmt17(row.theta) << ',' << fmt17(u) << ',' << label << '\n';
  }
}

/// Closed polyline through the three vertices.
inline void write_triangle_csv(std::ostream& os, const StabilityTriangle& t) {
  os << "s1,s2\n";
  for (std::size_t i = 0; i <= 3; ++i) os << fmt17(t.vertices[i % 3].s1) << ',' << fmt17(t.vertices[i % 3].s2) << '\n';
}

}  // namespace plankton
