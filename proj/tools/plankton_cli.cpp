#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "plankton/io.hpp"
#include "plankton/plankton.hpp"

namespace fs = std::filesystem;
using namespace plankton;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitNumerical = 2;

class IoError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

void write_file(const fs::path& path, const std::function<void(std::ostream&)>& body) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path.string() + " for writing");
  body(f);
  f.flush();
  if (!f) throw IoError("write failed: " + path.string());
}

/// Writes the artifact to cfg.out (plus a sidecar with the resolved config) or to stdout.
void emit(const RunConfig& cfg, const std::function<void(std::ostream&)>& body) {
  const std::string config = to_json(cfg).dump(2) + "\n";
  if (cfg.out.empty() || cfg.out == "-") {
    body(std::cout);
    std::cout.flush();
    std::cerr << config;
    return;
  }
  write_file(cfg.out, body);
  write_file(cfg.out + ".config.json", [&](std::ostream& os) { os << config; });
}

void dump(std::ostream& os, const Json& j) { os << j.dump(2) << '\n'; }

void require_format(const RunConfig& cfg) {
  if (cfg.format != "csv" && cfg.format != "json") throw ConfigError("format must be csv or json");
}

Json classify_report(const Params& p) {
  const RegionLabel label = classify_region(p);
  const FpCountPrediction pred = predict_fp_count(p);
  Json region{{"tag", to_string(label.tag)}, {"description", label.description}};
  if (label.tag == Region::Boundary)
    region["adjoining"] = {to_string(label.adjoining[0]), to_string(label.adjoining[1])};
  Json fps = Json::array();
  for (const auto& fp : find_fixed_points(p)) fps.push_back(to_json(fp));
  return Json{{"params", to_json(p)},
              {"region", region},
              {"predicted", {{"count", pred.count}, {"branch", pred.branch}}},
              {"fixed_points", fps}};
}

Json ns_report(const Params& p) {
  const auto crit = ns_critical(p);
  if (crit.empty())
    return Json{{"found", false},
                {"params", {{"r", p.r()}, {"beta", p.beta()}, {"gamma", p.gamma()}}},
                {"reason", "no positive fixed point with a complex pair on the unit circle"}};
  Json reports = Json::array();
  for (const auto& c : crit) {
    try {
      reports.push_back({{"published", to_json(normal_form(c, p, CoefficientForm::published))},
                         {"exact", to_json(normal_form(c, p, CoefficientForm::exact))}});
    } catch (const NotNsApplicable& e) {
      reports.push_back({{"theta0", c.theta0}, {"u_bar", c.u_bar}, {"skipped", e.what()}});
    }
  }
  return Json{{"found", true}, {"params", {{"r", p.r()}, {"beta", p.beta()}, {"gamma", p.gamma()}}}, {"reports", reports}};
}

int cmd_classify(const RunConfig& cfg) {
  const Json j = classify_report(cfg.params());
  emit(cfg, [&](std::ostream& os) { dump(os, j); });
  return kExitOk;
}

int cmd_ns(const RunConfig& cfg) {
  const Json j = ns_report(cfg.params());
  emit(cfg, [&](std::ostream& os) { dump(os, j); });
  return kExitOk;
}

int cmd_orbit(const RunConfig& cfg) {
  require_format(cfg);
  const Params p = cfg.params();
  const Orbit o = iterate(State::checked(cfg.init.u, cfg.init.v), cfg.n, p);
  emit(cfg, [&](std::ostream& os) {
    if (cfg.format == "csv") return write_orbit_csv(os, o);
    Json pts = Json::array();
    for (const auto& s : o.points) pts.push_back({s.u, s.v});
    dump(os, Json{{"summary", to_json(classify_attractor(o, known_fixed_points(p)))}, {"points", pts}});
  });
  return kExitOk;
}

int cmd_sweep(const RunConfig& cfg) {
  require_format(cfg);
  const auto rows = sweep_theta(cfg.params(), cfg.theta_lo, cfg.theta_hi, cfg.steps,
                                State::checked(cfg.init.u, cfg.init.v), cfg.n, {cfg.burn_in, cfg.max_samples});
  emit(cfg, [&](std::ostream& os) {
    if (cfg.format == "csv") return write_sweep_csv(os, rows);
    Json arr = Json::array();
    for (const auto& r : rows) arr.push_back({{"theta", r.theta}, {"u_tail", r.u_tail}, {"summary", to_json(r.summary)}});
    dump(os, Json{{"rows", arr}});
  });
  return kExitOk;
}

FixedPoint resolve_target(const RunConfig& cfg, const Params& p) {
  const auto pos = positive_fixed_points(p);
  if (pos.empty()) throw ConfigError("no positive fixed point to stabilize at these parameters");
  std::string want = cfg.target;
  if (want == "ns") {
    const auto crit = ns_critical(p);
    want = crit.empty() ? "E1" : to_string(crit.front().kind);
  }
  for (const auto& fp : pos)
    if (to_string(fp.kind) == want) return fp;
  if (cfg.target == "ns") return pos.front();
  throw ConfigError("target " + cfg.target + " does not exist at these parameters");
}

int cmd_control(const RunConfig& cfg) {
  require_format(cfg);
  const Params p = cfg.params();
  const FixedPoint target = resolve_target(cfg, p);
  const StabilityTriangle tri = stability_triangle(target.u, p);
  if (cfg.emit_triangle) {
    emit(cfg, [&](std::ostream& os) {
      if (cfg.format == "csv") return write_triangle_csv(os, tri);
      dump(os, to_json(tri));
    });
    return kExitOk;
  }
  const Gains g{cfg.s1, cfg.s2};
  const Orbit o = iterate(State::checked(cfg.init.u, cfg.init.v), cfg.n, p, Control{g, target.state()});
  const Json j{{"target", to_json(target)},
               {"triangle", to_json(tri)},
               {"gains", to_json(g)},
               {"inside_triangle", tri.contains(g)},
               {"stabilizing", is_stabilizing(g, target.u, p)},
               {"controlled_eigenvalues", to_json(controlled_jacobian(target.u, g, p).eigenvalues())},
               {"orbit", to_json(classify_attractor(o, {target}))}};
  emit(cfg, [&](std::ostream& os) { dump(os, j); });
  return kExitOk;
}

int cmd_invariance(const RunConfig& cfg) {
  const Params p = cfg.params();
  InvariantSet which = p.gamma() >= 2.0 ? InvariantSet::M1 : InvariantSet::M2;
  if (cfg.set == "M1") which = InvariantSet::M1;
  else if (cfg.set == "M2") which = InvariantSet::M2;
  else if (cfg.set != "auto") throw ConfigError("set must be auto, M1 or M2");
  const auto rep = invariant_set_check(p, which, cfg.samples, cfg.seed);
  emit(cfg, [&](std::ostream& os) { dump(os, to_json(rep)); });
  return kExitOk;
}

// ---- repro ----

Json thresholds(const Params& p) {
  Json crit = Json::array();
  for (const double u : critical_points_of_h(p)) crit.push_back({{"u", u}, {"psi", psi(u, p)}});
  return Json{{"params", {{"r", p.r()}, {"beta", p.beta()}, {"gamma", p.gamma()}}},
              {"psi_at_one", psi(1.0, p)},
              {"critical_points", crit}};
}

void write_branches(std::ostream& os, const Params& p, double lo, double hi, std::size_t steps) {
  os << "theta,kind,u,v,stability\n";
  for (std::size_t i = 0; i < steps; ++i) {
    const double th = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(steps - 1);
    std::vector<FixedPoint> fps;
    try {
      fps = positive_fixed_points(p.with_theta(th));
    } catch (const NumericalError&) {
      continue;  // tangency within tolerance of the grid point
    }
    for (const auto& fp : fps)
      os << fmt17(th) << ',' << to_string(fp.kind) << ',' << fmt17(fp.u) << ',' << fmt17(fp.v) << ','
         << to_string(fp.stability.tag) << '\n';
  }
}

void write_region_map(std::ostream& os, double r) {
  os << "gamma,beta,region\n";
  constexpr std::size_t ng = 200, nb = 200;
  for (std::size_t i = 1; i <= ng; ++i) {
    const double g = 3.0 * static_cast<double>(i) / ng;
    for (std::size_t k = 1; k <= nb; ++k) {
      const double b = 8.0 * static_cast<double>(k) / nb;
      os << fmt17(g) << ',' << fmt17(b) << ',' << to_string(classify_region(r, g, b).tag) << '\n';
    }
  }
}

std::string tag(double x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

int cmd_repro(const RunConfig& cfg) {
  const fs::path dir = cfg.out.empty() ? fs::path("repro") : fs::path(cfg.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  Json manifest = Json::object();
  const auto put = [&](const std::string& name, const std::string& what, const std::function<void(std::ostream&)>& body) {
    write_file(dir / name, body);
    manifest[name] = what;
  };
  const auto put_json = [&](const std::string& name, const std::string& what, const Json& j) {
    put(name, what, [&](std::ostream& os) { dump(os, j); });
  };

  const Params ex1(0.5, 2.0, 0.35, 1.0);
  const Params ex2(0.5, 4.0, 5.0, 1.0);
  const Params ex3(0.5, 3.0, 2.0, 0.1);
  const Params ex3b(0.5, 2.1, 1.1, 0.5);

  put_json("example1_ns_report.json", "NS threshold and normal form, r=0.5 beta=2 gamma=1", ns_report(ex1));
  put_json("example2_ns_report.json", "NS threshold and normal form, r=0.5 beta=4 gamma=1", ns_report(ex2));
  put_json("example2_fixed_points_theta5.json", "fixed points and stability at theta=5", classify_report(ex2));
  put_json("example2_thresholds.json", "psi at critical points of h and at u=1", thresholds(ex2));
  put_json("example3_fixed_points_theta2.json", "three positive fixed points, r=0.5 beta=3 gamma=0.1", classify_report(ex3));
  put_json("example3_second_set_fixed_points.json", "three positive fixed points, r=0.5 beta=2.1 gamma=0.5 theta=1.1",
           classify_report(ex3b));
  put_json("example3_thresholds.json", "psi at critical points of h and at u=1", thresholds(ex3));

  const std::size_t n = cfg.n;
  put("example1_bifurcation_diagram.csv", "theta sweep over [0.01, 2], 400 points, start (0.32, 0.82)",
      [&](std::ostream& os) { write_sweep_csv(os, sweep_theta(ex1, 0.01, 2.0, 400, {0.32, 0.82}, n)); });

  struct Portrait {
    const char* prefix;
    Params p;
    double theta;
    State start;
  };
  const std::vector<Portrait> portraits = {
      {"example1", ex1, 0.36, {0.32, 0.82}},  {"example1", ex1, 0.3472, {0.32, 0.82}},
      {"example1", ex1, 0.32, {0.45, 1.0}},   {"example1", ex1, 0.28, {0.34, 0.85}},
      {"example2", ex2, 5.02, {0.3, 0.9}},    {"example2", ex2, 5.0, {0.3, 0.9}},
      {"example2", ex2, 4.9, {0.31, 0.99}},   {"example2", ex2, 4.9, {0.33, 1.1}},
      {"example2", ex2, 4.5, {0.2, 0.95}},    {"example2", ex2, 4.5, {0.45, 0.87}},
  };
  Json verdicts = Json::array();
  for (const auto& pt : portraits) {
    const Params p = pt.p.with_theta(pt.theta);
    const Orbit o = iterate(pt.start, n, p);
    const auto summary = classify_attractor(o, known_fixed_points(p));
    const std::string name = std::string(pt.prefix) + "_portrait_theta" + tag(pt.theta) + "_from_" + tag(pt.start.u) +
                             "_" + tag(pt.start.v) + ".csv";
    put(name, "orbit, verdict " + summary.label(), [&](std::ostream& os) { write_orbit_csv(os, o); });
    verdicts.push_back({{"file", name}, {"theta", pt.theta}, {"start", {pt.start.u, pt.start.v}}, {"summary", to_json(summary)}});
  }
  put_json("portrait_verdicts.json", "attractor verdict for every portrait orbit", verdicts);

  put("example2_fixed_point_branches.csv", "positive fixed points over theta in [2.5, 5.5]",
      [&](std::ostream& os) { write_branches(os, ex2, 2.5, 5.5, 601); });
  put("example3_fixed_point_branches.csv", "positive fixed points over theta in [1.7, 2.4]",
      [&](std::ostream& os) { write_branches(os, ex3, 1.7, 2.4, 701); });
  put("region_map_r0.5.csv", "region label over gamma in (0, 3], beta in (0, 8]",
      [&](std::ostream& os) { write_region_map(os, 0.5); });

  const Params fig_control(1.0, 3.0, 1.2, 1.0);
  if (positive_fixed_points(fig_control).empty()) {
    put_json("control_triangle_r1_beta3_gamma1_theta1.2.json", "stability triangle (unavailable)",
             Json{{"available", false},
                  {"params", to_json(fig_control)},
                  {"reason", "no positive fixed point: psi is increasing on (0, 1] with psi(1) = " + fmt17(psi(1.0, fig_control))}});
  }
  const Params ctl = ex1.with_theta(0.32);
  const auto target = positive_fixed_points(ctl).front();
  const auto tri = stability_triangle(target.u, ctl);
  put_json("control_triangle_example1_theta0.32.json", "stability triangle around the repelling E1",
           Json{{"target", to_json(target)}, {"triangle", to_json(tri)}});
  put("control_triangle_example1_theta0.32.csv", "triangle polyline", [&](std::ostream& os) { write_triangle_csv(os, tri); });

  RunConfig resolved = cfg;
  resolved.out = dir.string();
  put_json("repro.config.json", "resolved configuration", to_json(resolved));
  write_file(dir / "manifest.json", [&](std::ostream& os) { dump(os, manifest); });
  std::cout << "wrote " << manifest.size() + 1 << " files to " << dir.string() << '\n';
  return kExitOk;
}

struct Sub {
  CLI::App* app;
  std::vector<std::pair<std::string, CLI::Option*>> opts;
  std::function<int(const RunConfig&)> run;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Phytoplankton-zooplankton map: fixed points, Neimark-Sacker analysis, control and simulation"};
  app.require_subcommand(1);

  std::map<std::string, std::string> raw;
  std::string config_path;
  bool emit_triangle = false;
  std::vector<Sub> subs;

  const auto make = [&](const char* name, const char* help, std::function<int(const RunConfig&)> run,
                        std::vector<std::pair<std::string, std::string>> extra) {
    Sub s{app.add_subcommand(name, help), {}, std::move(run)};
    s.app->add_option("--config", config_path, "key = value config file; flags override it");
    std::vector<std::pair<std::string, std::string>> all = {
        {"r", "zooplankton mortality"}, {"beta", "conversion rate"}, {"gamma", "half-saturation constant"},
        {"theta", "toxin release rate"},  {"out", "output path (default stdout)"},  {"format", "csv or json"}};
    all.insert(all.end(), extra.begin(), extra.end());
    for (const auto& [key, desc] : all) s.opts.emplace_back(key, s.app->add_option("--" + key, raw[key], desc));
    subs.push_back(std::move(s));
    return subs.back().app;
  };

  make("classify", "region, predicted count and stability of every fixed point", cmd_classify, {});
  make("ns", "Neimark-Sacker threshold and normal form (theta is solved for)", cmd_ns, {});
  make("orbit", "iterate the map and write step,u,v", cmd_orbit, {{"init", "initial state u,v"}, {"n", "number of steps"}});
  make("sweep", "bifurcation-diagram data over a theta grid", cmd_sweep,
       {{"theta-lo", "lower theta"},
        {"theta-hi", "upper theta"},
        {"steps", "grid points"},
        {"init", "initial state u,v"},
        {"n", "steps per orbit"},
        {"burn-in", "discarded fraction of each orbit"},
        {"max-samples", "recorded u values per theta"}});
  auto* control = make("control", "stability triangle and controlled orbit", cmd_control,
                       {{"s1", "gain on u"},
                        {"s2", "gain on v"},
                        {"target", "ns, E1, E2 or E3"},
                        {"init", "initial state u,v"},
                        {"n", "steps"}});
  control->add_flag("--emit-triangle", emit_triangle, "write only the triangle");
  make("invariance", "sample the invariant region and check its image", cmd_invariance,
       {{"set", "auto, M1 or M2"}, {"samples", "number of samples"}, {"seed", "random seed"}});
  make("repro", "write every worked example and figure dataset into a directory", cmd_repro, {{"n", "orbit length"}});

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    for (const auto& s : subs) {
      if (!s.app->parsed()) continue;
      RunConfig cfg;
      if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) throw IoError("cannot read config " + config_path);
        cfg = parse_config(in);
      }
      cfg.command = s.app->get_name();
      for (const auto& [key, opt] : s.opts)
        if (opt->count() > 0) set_config_key(cfg, key, raw[key]);
      if (emit_triangle) cfg.emit_triangle = true;
      // Structured reports have no tabular form.
      if (cfg.command == "classify" || cfg.command == "ns" || cfg.command == "invariance") cfg.format = "json";
      return s.run(cfg);
    }
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
