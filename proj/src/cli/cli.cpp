#include "collarkit/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "collarkit/bounds.hpp"
#include "collarkit/collar.hpp"
#include "collarkit/errors.hpp"
#include "collarkit/format.hpp"
#include "collarkit/metric_io.hpp"
#include "collarkit/sphere_ops.hpp"
#include "collarkit/verify.hpp"

namespace collarkit {

namespace fs = std::filesystem;
using nlohmann::json;

std::vector<double> SweepRange::values() const {
  std::vector<double> v;
  if (count == 1) return {start};
  for (int i = 0; i < count; ++i) v.push_back(start + (stop - start) * i / (count - 1));
  v.back() = stop;
  return v;
}

namespace {

constexpr double kCurvatureThreshold = -1e-8;

template <class T>
T get_as(const json& j, const std::string& key) {
  try {
    return j.get<T>();
  } catch (const json::exception&) {
    throw ParseError("config key '" + key + "' has the wrong type");
  }
}

double number_at(const json& j, const std::string& key) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    try {
      return number_from_json(j);
    } catch (const std::exception&) {
    }
  }
  throw ParseError("config key '" + key + "' must be a number");
}

SweepRange range_at(const json& j, const std::string& key) {
  if (!j.is_object()) throw ParseError("config key '" + key + "' must be an object {start, stop, count}");
  SweepRange r;
  for (const auto& [k, v] : j.items()) {
    if (k == "start")
      r.start = number_at(v, key + ".start");
    else if (k == "stop")
      r.stop = number_at(v, key + ".stop");
    else if (k == "count")
      r.count = get_as<int>(v, key + ".count");
    else
      throw ParseError("unknown config key '" + key + "." + k + "'");
  }
  if (r.count < 1) throw ParseError("config key '" + key + ".count' must be at least 1");
  return r;
}

json range_json(const SweepRange& r) {
  return {{"start", json_number(r.start)}, {"stop", json_number(r.stop)}, {"count", r.count}};
}

void validate(const RunConfig& c) {
  if (c.format != "json" && c.format != "csv") throw ParseError("format must be json or csv");
  if (c.family != "best" && c.family != "conformal" && c.family != "linear")
    throw ParseError("family must be best, conformal or linear");
  if (c.lmax < 2) throw ParseError("lmax must be at least 2");
  if (c.n_samples < 2) throw ParseError("n_samples must be at least 2");
  if (c.t_resolution < 2) throw ParseError("t_resolution must be at least 2");
  if (c.grid_n < 2) throw ParseError("grid_n must be at least 2");
}

// Output sink: a file under out_dir, or the caller's stream.
class Sink {
 public:
  Sink(const RunConfig& c, const std::string& name, std::ostream& fallback) {
    if (c.out_dir.empty()) {
      os_ = &fallback;
      return;
    }
    fs::create_directories(c.out_dir);
    path_ = fs::path(c.out_dir) / name;
    file_.open(path_, std::ios::binary);
    if (!file_) throw Error("cannot write " + path_.string());
    os_ = &file_;
  }
  std::ostream& stream() { return *os_; }
  bool to_file() const { return !path_.empty(); }
  const fs::path& path() const { return path_; }

 private:
  std::ofstream file_;
  fs::path path_;
  std::ostream* os_ = nullptr;
};

std::string extension(const RunConfig& c) { return c.format == "csv" ? ".csv" : ".json"; }

const std::string& single_metric(const RunConfig& c, const std::string& command) {
  if (c.metrics.size() != 1) throw DomainError(command + " takes exactly one metric file");
  return c.metrics.front();
}

ConformalMetric load_metric(const std::string& path, int lmax) {
  return to_metric(read_metric_file(path), make_grid(lmax));
}

double required(const std::optional<double>& v, const char* name) {
  if (!v) throw DomainError(std::string("missing parameter ") + name);
  return *v;
}

// Invariants of the configured family; "best" combines all families.
PathInvariants selected_invariants(const ConformalMetric& g, const RunConfig& c) {
  if (c.family == "best") return eta_kappa_best(g, c.n_samples);
  return compute_invariants(make_path(g, parse_family(c.family), c.n_samples));
}

void write_json(std::ostream& os, const json& j) { os << j.dump(2) << '\n'; }

int cmd_analyze(const RunConfig& c, std::ostream& out) {
  json reports = json::array();
  std::ostringstream csv;
  csv << "metric,family,alpha,beta,eta_lb,kappa_lb,r_o\n";
  for (const std::string& file : c.metrics) {
    const ConformalMetric g = load_metric(file, c.lmax);
    std::vector<PathInvariants> families;
    if (c.family == "best")
      families = invariants_per_family(g, c.n_samples);
    else
      families.push_back(selected_invariants(g, c));
    const PathInvariants best = best_of(families);
    const double gb = integrate(g, gauss_curvature(g)) - 4.0 * M_PI;

    json r;
    r["metric"] = fs::path(file).filename().string();
    r["lmax"] = c.lmax;
    r["n_samples"] = c.n_samples;
    r["area"] = json_number(total_area(g));
    r["r_o"] = json_number(area_radius(g));
    r["gauss_bonnet_error"] = json_number(gb);
    r["families"] = json::array();
    for (const auto& inv : families) r["families"].push_back(to_json(inv));
    r["best"] = to_json(best);
    reports.push_back(r);

    families.push_back(best);
    for (const auto& inv : families)
      csv << r["metric"].get<std::string>() << ',' << inv.family << ',' << format_double(inv.alpha) << ','
          << format_double(inv.beta) << ',' << format_double(inv.eta_lb) << ',' << format_double(inv.kappa_lb) << ','
          << format_double(inv.r_o) << '\n';
  }
  Sink sink(c, "analyze" + extension(c), out);
  if (c.format == "csv")
    sink.stream() << csv.str();
  else
    write_json(sink.stream(), reports.size() == 1 ? reports[0] : reports);
  return kExitSuccess;
}

int cmd_collar(const RunConfig& c, std::ostream& out) {
  if (c.H_o && c.k) throw DomainError("give either H_o or k, not both");
  if (!c.H_o && !c.k) throw DomainError("missing parameter H_o (or k)");
  const ConformalMetric g = load_metric(single_metric(c, "collar"), c.lmax);
  const double m = c.m.value_or(0.0);

  // the collar follows one concrete path: the chosen family, or for "best"
  // the family whose (alpha, beta) pair the best invariants report
  PathInvariants inv;
  if (c.family == "best") {
    const std::vector<PathInvariants> families = invariants_per_family(g, c.n_samples);
    inv = *std::max_element(families.begin(), families.end(),
                            [](const auto& a, const auto& b) { return a.kappa_lb < b.kappa_lb; });
  } else {
    inv = selected_invariants(g, c);
  }
  const MetricPath path = make_path(g, parse_family(inv.family), c.n_samples);
  const CollarSpec spec = c.k ? build_collar_with_k(path, inv, m, *c.k) : build_collar(path, inv, m, *c.H_o);
  const std::vector<CollarSample> rows = collar_table(spec, c.t_resolution);

  double min_R = std::numeric_limits<double>::infinity();
  for (const auto& r : rows) min_R = std::min(min_R, r.R_min);
  const bool pass = min_R >= kCurvatureThreshold;

  Sink sink(c, "collar" + extension(c), out);
  if (c.format == "csv") {
    write_collar_csv(sink.stream(), rows);
  } else {
    json j = collar_header(spec);
    j["rows"] = json::array();
    for (const auto& r : rows) j["rows"].push_back(to_json(r));
    j["verdict"] = {{"pass", pass}, {"min_R", json_number(min_R)}, {"threshold", json_number(kCurvatureThreshold)}};
    write_json(sink.stream(), j);
  }
  if (sink.to_file() || c.format == "csv")
    out << "verdict: " << (pass ? "pass" : "fail") << " min_R=" << format_double(min_R)
        << " threshold=" << format_double(kCurvatureThreshold) << '\n';
  return pass ? kExitSuccess : kExitError;
}

bool any_applicable(const std::vector<BoundReport>& rs) {
  return std::any_of(rs.begin(), rs.end(), [](const BoundReport& r) { return r.applicable; });
}

void write_reports(const RunConfig& c, const std::string& name, const std::vector<BoundReport>& rs, std::ostream& out) {
  Sink sink(c, name + extension(c), out);
  if (c.format == "csv")
    write_bounds_csv(sink.stream(), rs);
  else
    write_json(sink.stream(), reports_to_json(rs));
}

int cmd_bounds(const RunConfig& c, std::ostream& out) {
  const ConformalMetric g = load_metric(single_metric(c, "bounds"), c.lmax);
  const PathInvariants inv = selected_invariants(g, c);
  std::vector<BoundReport> rs;
  if (c.H_sweep)
    rs = sweep_mean_curvature(g, inv, c.H_sweep->values());
  else
    rs = evaluate_all(surface_data(g, required(c.H_o, "H_o")), inv);
  if (c.horizon_area) compare_horizon(rs, *c.horizon_area);
  write_reports(c, "bounds", rs, out);
  return any_applicable(rs) ? kExitSuccess : kExitInapplicable;
}

int cmd_sweep(const RunConfig& c, std::ostream& out) {
  if (!c.m_sweep) throw DomainError("missing parameter m_sweep");
  const ConformalMetric g = load_metric(single_metric(c, "sweep"), c.lmax);
  const PathInvariants inv = selected_invariants(g, c);
  const std::vector<BoundReport> rs = sweep_mass(surface_data(g, required(c.H_o, "H_o")), inv, c.m_sweep->values());
  write_reports(c, "sweep", rs, out);
  return any_applicable(rs) ? kExitSuccess : kExitInapplicable;
}

int cmd_appendix(const RunConfig& c, std::ostream& out) {
  if (c.kappa.has_value() == c.b.has_value()) throw DomainError("give exactly one of kappa and b");
  const double alpha = required(c.alpha, "alpha");
  const double W = required(c.W, "W");
  const double r_o = c.r_o;

  MinimizerResult res;
  std::function<double(double)> f;
  // b and kappa determine each other through beta = b + alpha W
  double b, kappa;
  if (c.kappa) {
    kappa = *c.kappa;
    b = kappa * (1.0 + alpha) - alpha * W;
    res = minimize_phi(kappa, alpha, r_o, W);
    f = [=](double x) { return phi(x, kappa, alpha, r_o); };
  } else {
    b = *c.b;
    kappa = (b + alpha * W) / (1.0 + alpha);
    res = minimize_psi(b, alpha, W, r_o);
    f = [=](double x) { return psi(x, b, alpha, W, r_o); };
  }
  const GridMinimum gm = grid_search_min(f, res.lo, res.hi, c.grid_n);

  json j = to_json(res);
  j["function"] = c.kappa ? "Phi" : "Psi";
  j["alpha"] = json_number(alpha);
  j["W"] = json_number(W);
  j["r_o"] = json_number(r_o);
  j["grid"] = {{"n", c.grid_n},
               {"x", json_number(gm.grid_x)},
               {"value", json_number(gm.value)},
               {"delta_x", json_number(std::abs(gm.grid_x - res.x_star))},
               {"delta_value", json_number(std::abs(gm.value - res.value))}};
  // at x = W (m = 0) both functions describe the same collar
  std::optional<double> phi_W, psi_W;
  if (b > W && W > 0.0 && kappa < 1.0) {
    phi_W = phi(W, kappa, alpha, r_o);
    psi_W = psi(W, b, alpha, W, r_o);
    j["m0_agreement"] = {{"phi_at_W", json_number(*phi_W)},
                         {"psi_at_W", json_number(*psi_W)},
                         {"delta", json_number(std::abs(*phi_W - *psi_W))}};
  }

  Sink sink(c, "appendix" + extension(c), out);
  if (c.format == "csv") {
    auto cell = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string(); };
    sink.stream() << "function,case,limit,x_star,value,x1,x2,grid_x,grid_value,delta_x,delta_value,phi_at_W,psi_at_W\n"
                  << j["function"].get<std::string>() << ',' << res.case_tag << ',' << j["limit"].get<std::string>()
                  << ',' << format_double(res.x_star) << ',' << format_double(res.value) << ',' << cell(res.x1) << ','
                  << cell(res.x2) << ',' << format_double(gm.grid_x) << ',' << format_double(gm.value) << ','
                  << format_double(std::abs(gm.grid_x - res.x_star)) << ','
                  << format_double(std::abs(gm.value - res.value)) << ',' << cell(phi_W) << ',' << cell(psi_W) << '\n';
  } else {
    write_json(sink.stream(), j);
  }
  return kExitSuccess;
}

int cmd_verify(const RunConfig& c, std::ostream& out) {
  VerifyConfig v;
  v.lmax = c.lmax;
  v.n_samples = c.n_samples;
  v.fd_step = c.fd_step;
  v.seed = c.seed;
  v.golden_path = c.golden;
  v.update_golden = c.update_golden;
  v.only = c.only;
  const std::vector<OracleResult> rs = run_suite(v);
  Sink sink(c, "verify.jsonl", out);
  write_jsonl(sink.stream(), rs);
  return all_pass(rs) ? kExitSuccess : kExitError;
}

}  // namespace

RunConfig parse_run_config(const json& j) {
  if (!j.is_object()) throw ParseError("config must be a JSON object");
  RunConfig c;
  for (const auto& [key, v] : j.items()) {
    if (key == "metrics") {
      c.metrics = get_as<std::vector<std::string>>(v, key);
    } else if (key == "out_dir") {
      c.out_dir = get_as<std::string>(v, key);
    } else if (key == "format") {
      c.format = get_as<std::string>(v, key);
    } else if (key == "lmax") {
      c.lmax = get_as<int>(v, key);
    } else if (key == "n_samples") {
      c.n_samples = get_as<int>(v, key);
    } else if (key == "t_resolution") {
      c.t_resolution = get_as<int>(v, key);
    } else if (key == "family") {
      c.family = get_as<std::string>(v, key);
    } else if (key == "m") {
      c.m = number_at(v, key);
    } else if (key == "H_o") {
      c.H_o = number_at(v, key);
    } else if (key == "k") {
      c.k = number_at(v, key);
    } else if (key == "horizon_area") {
      c.horizon_area = number_at(v, key);
    } else if (key == "H_sweep") {
      c.H_sweep = range_at(v, key);
    } else if (key == "m_sweep") {
      c.m_sweep = range_at(v, key);
    } else if (key == "kappa") {
      c.kappa = number_at(v, key);
    } else if (key == "b") {
      c.b = number_at(v, key);
    } else if (key == "alpha") {
      c.alpha = number_at(v, key);
    } else if (key == "W") {
      c.W = number_at(v, key);
    } else if (key == "r_o") {
      c.r_o = number_at(v, key);
    } else if (key == "grid_n") {
      c.grid_n = get_as<int>(v, key);
    } else if (key == "golden") {
      c.golden = get_as<std::string>(v, key);
    } else if (key == "update_golden") {
      c.update_golden = get_as<bool>(v, key);
    } else if (key == "only") {
      c.only = get_as<std::vector<std::string>>(v, key);
    } else if (key == "seed") {
      c.seed = get_as<unsigned>(v, key);
    } else if (key == "fd_step") {
      c.fd_step = number_at(v, key);
    } else {
      throw ParseError("unknown config key '" + key + "'");
    }
  }
  validate(c);
  return c;
}

json to_json(const RunConfig& c) {
  json j;
  j["metrics"] = c.metrics;
  j["out_dir"] = c.out_dir;
  j["format"] = c.format;
  j["lmax"] = c.lmax;
  j["n_samples"] = c.n_samples;
  j["t_resolution"] = c.t_resolution;
  j["family"] = c.family;
  auto opt = [&](const char* key, const std::optional<double>& v) {
    if (v) j[key] = json_number(*v);
  };
  opt("m", c.m);
  opt("H_o", c.H_o);
  opt("k", c.k);
  opt("horizon_area", c.horizon_area);
  if (c.H_sweep) j["H_sweep"] = range_json(*c.H_sweep);
  if (c.m_sweep) j["m_sweep"] = range_json(*c.m_sweep);
  opt("kappa", c.kappa);
  opt("b", c.b);
  opt("alpha", c.alpha);
  opt("W", c.W);
  j["r_o"] = json_number(c.r_o);
  j["grid_n"] = c.grid_n;
  j["golden"] = c.golden;
  j["update_golden"] = c.update_golden;
  j["only"] = c.only;
  j["seed"] = c.seed;
  j["fd_step"] = json_number(c.fd_step);
  return j;
}

void resolve_paths(RunConfig& c, const fs::path& base) {
  auto absolute = [&](const std::string& p) { return (fs::path(p).is_absolute() ? fs::path(p) : base / p).lexically_normal().string(); };
  for (std::string& m : c.metrics) {
    m = absolute(m);
    if (!fs::is_regular_file(m)) throw ParseError("metric file not found: " + m);
  }
  if (!c.golden.empty()) c.golden = absolute(c.golden);
  if (!c.out_dir.empty()) c.out_dir = absolute(c.out_dir);
}

int run_command(const std::string& command, const RunConfig& config, std::ostream& out) {
  validate(config);
  if (command == "analyze") {
    if (config.metrics.empty()) throw DomainError("analyze needs at least one metric file");
    return cmd_analyze(config, out);
  }
  if (command == "collar") return cmd_collar(config, out);
  if (command == "bounds") return cmd_bounds(config, out);
  if (command == "sweep") return cmd_sweep(config, out);
  if (command == "appendix") return cmd_appendix(config, out);
  if (command == "verify") return cmd_verify(config, out);
  throw DomainError("unknown command " + command);
}

namespace {

// Flags given on the command line; unset ones leave the config untouched.
struct Overrides {
  std::optional<int> lmax, n_samples, t_resolution, grid_n;
  std::optional<unsigned> seed;
  std::optional<std::string> out_dir, format, family, golden;
  std::optional<double> m, H_o, k, horizon_area, kappa, b, alpha, W, r_o, fd_step;
  std::vector<double> H_sweep, m_sweep;
  std::vector<std::string> metrics, only;
  bool update_golden = false;

  void apply(RunConfig& c) const {
    auto set = [](auto& dst, const auto& src) {
      if (src) dst = *src;
    };
    set(c.lmax, lmax);
    set(c.n_samples, n_samples);
    set(c.t_resolution, t_resolution);
    set(c.grid_n, grid_n);
    set(c.seed, seed);
    set(c.out_dir, out_dir);
    set(c.format, format);
    set(c.family, family);
    set(c.golden, golden);
    set(c.r_o, r_o);
    set(c.fd_step, fd_step);
    for (auto [dst, src] : {std::pair{&c.m, &m}, {&c.H_o, &H_o}, {&c.k, &k}, {&c.horizon_area, &horizon_area},
                            {&c.kappa, &kappa}, {&c.b, &b}, {&c.alpha, &alpha}, {&c.W, &W}})
      if (*src) *dst = *src;
    if (!H_sweep.empty()) c.H_sweep = range(H_sweep);
    if (!m_sweep.empty()) c.m_sweep = range(m_sweep);
    if (!metrics.empty()) c.metrics = metrics;
    if (!only.empty()) c.only = only;
    if (update_golden) c.update_golden = true;
  }

  static SweepRange range(const std::vector<double>& v) {
    const double count = v[2];
    if (!(count >= 1.0) || count != std::floor(count)) throw ParseError("sweep count must be a positive integer");
    return {v[0], v[1], static_cast<int>(count)};
  }
};

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"collarkit: collar extensions, path invariants and horizon bounds"};
  app.require_subcommand(1);
  app.fallthrough();
  Overrides o;
  std::string config_file;
  app.add_option("--config", config_file, "JSON run configuration")->check(CLI::ExistingFile);
  app.add_option("--lmax", o.lmax, "spectral band limit of the grid");
  app.add_option("--samples", o.n_samples, "path samples in t");
  app.add_option("--out-dir", o.out_dir, "write reports here instead of standard output");
  app.add_option("--format", o.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));

  auto family = [&](CLI::App* s) {
    s->add_option("--family", o.family, "best, conformal or linear")
        ->check(CLI::IsMember({"best", "conformal", "linear"}));
  };
  auto metric = [&](CLI::App* s, const char* desc) { s->add_option("metric", o.metrics, desc); };

  CLI::App* analyze = app.add_subcommand("analyze", "path invariants per family and the best of them");
  metric(analyze, "metric files");
  family(analyze);

  CLI::App* collar = app.add_subcommand("collar", "collar table and curvature verdict");
  metric(collar, "metric file");
  family(collar);
  collar->add_option("--m", o.m, "Schwarzschild mass (default 0)");
  collar->add_option("--H-o", o.H_o, "mean curvature of the boundary sphere");
  collar->add_option("--k", o.k, "collar constant k, instead of --H-o");
  collar->add_option("--t-resolution", o.t_resolution, "number of t slices");

  CLI::App* bounds = app.add_subcommand("bounds", "horizon area bounds");
  metric(bounds, "metric file");
  family(bounds);
  bounds->add_option("--H-o", o.H_o, "mean curvature of the boundary sphere");
  bounds->add_option("--horizon-area", o.horizon_area, "area of a horizon to test against the bounds");
  bounds->add_option("--H-sweep", o.H_sweep, "start stop count")->expected(3);

  CLI::App* sweep = app.add_subcommand("sweep", "mass family bounds over a range of m");
  metric(sweep, "metric file");
  family(sweep);
  sweep->add_option("--H-o", o.H_o, "mean curvature of the boundary sphere");
  sweep->add_option("--m-sweep", o.m_sweep, "start stop count")->expected(3);

  CLI::App* appendix = app.add_subcommand("appendix", "closed-form minimizers with a grid cross-check");
  appendix->add_option("--kappa", o.kappa, "minimize Phi for this kappa");
  appendix->add_option("--b", o.b, "minimize Psi for this b = beta - alpha W");
  appendix->add_option("--alpha", o.alpha, "path invariant alpha");
  appendix->add_option("--W", o.W, "W = H_o^2 r_o^2 / 4");
  appendix->add_option("--r-o", o.r_o, "area radius (default 1)");
  appendix->add_option("--grid-n", o.grid_n, "grid points of the cross-check");

  CLI::App* verify = app.add_subcommand("verify", "run the oracle suite, one JSON line per check");
  verify->add_option("--golden", o.golden, "golden value store");
  verify->add_flag("--update-golden", o.update_golden, "overwrite stored golden values");
  verify->add_option("--only", o.only, "oracle name prefixes");
  verify->add_option("--seed", o.seed, "seed for random node selection");
  verify->add_option("--fd-step", o.fd_step, "finite-difference step");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitSuccess : kExitError;
  }

  try {
    RunConfig config;
    if (!config_file.empty()) {
      std::ifstream in(config_file);
      json j;
      try {
        j = json::parse(in);
      } catch (const json::parse_error& e) {
        throw ParseError(config_file + ": " + e.what());
      }
      config = parse_run_config(j);
      resolve_paths(config, fs::absolute(config_file).parent_path());
    }
    // flag paths are relative to the working directory, config paths to the file
    o.apply(config);
    resolve_paths(config, fs::current_path());
    validate(config);
    return run_command(app.get_subcommands().front()->get_name(), config, out);
  } catch (const Inadmissible& e) {
    err << e.what() << '\n';
    return kExitInapplicable;
  } catch (const HypothesisFailed& e) {
    err << "hypothesis failed: " << e.what() << '\n';
    return kExitInapplicable;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }
}

}  // namespace collarkit
