#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "collarkit/cli.hpp"
#include "collarkit/errors.hpp"

using namespace collarkit;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const std::string kRound = std::string(COLLARKIT_DATA) + "/round.json";
const std::string kY20 = std::string(COLLARKIT_DATA) + "/y20_eps0.05.json";

struct Run {
  int code = -1;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "collarkit");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Run r;
  r.code = cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("collarkit_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("verdict:", 0) == 0) continue;
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    rows.push_back(cells);
  }
  return rows;
}

std::size_t column(const std::vector<std::string>& header, const std::string& name) {
  const auto it = std::find(header.begin(), header.end(), name);
  REQUIRE(it != header.end());
  return static_cast<std::size_t>(it - header.begin());
}

}  // namespace

TEST_CASE("sweep ranges include both ends") {
  const SweepRange r{-2.0, 0.4, 4};
  const std::vector<double> v = r.values();
  REQUIRE(v.size() == 4);
  CHECK(v.front() == -2.0);
  CHECK(v.back() == 0.4);
  CHECK(SweepRange{1.5, 9.0, 1}.values() == std::vector<double>{1.5});
}

TEST_CASE("run configuration parsing") {
  const json j = json::parse(R"({"metrics": ["a.json"], "format": "csv", "lmax": 16, "m": "-inf",
                                 "H_sweep": {"start": 0.5, "stop": 2, "count": 4}, "only": ["bounds."]})");
  const RunConfig c = parse_run_config(j);
  CHECK(c.format == "csv");
  CHECK(c.lmax == 16);
  CHECK(*c.m == -std::numeric_limits<double>::infinity());
  CHECK(c.H_sweep->count == 4);
  CHECK(c.n_samples == 32);

  // to_json is parse_run_config's inverse
  const RunConfig back = parse_run_config(to_json(c));
  CHECK(to_json(back) == to_json(c));

  CHECK_THROWS_AS(parse_run_config(json::parse(R"({"lmx": 16})")), ParseError);
  CHECK_THROWS_AS(parse_run_config(json::parse(R"({"H_sweep": {"start": 0, "stop": 1, "n": 3}})")), ParseError);
  CHECK_THROWS_AS(parse_run_config(json::parse(R"({"lmax": "many"})")), ParseError);
  CHECK_THROWS_AS(parse_run_config(json::parse(R"({"format": "xml"})")), ParseError);
  CHECK_THROWS_AS(parse_run_config(json::parse(R"([1, 2])")), ParseError);
}

TEST_CASE("paths are resolved before execution") {
  const fs::path dir = scratch_dir("resolve");
  fs::copy_file(kRound, dir / "g.json");
  RunConfig c;
  c.metrics = {"g.json"};
  c.out_dir = "out";
  resolve_paths(c, dir);
  CHECK(c.metrics[0] == (dir / "g.json").string());
  CHECK(fs::path(c.out_dir).is_absolute());
  c.metrics = {"missing.json"};
  CHECK_THROWS_AS(resolve_paths(c, dir), ParseError);
}

TEST_CASE("analyze") {
  SUBCASE("round metric reports the infinite eta sentinel") {
    const Run r = run({"analyze", kRound});
    REQUIRE(r.code == kExitSuccess);
    const json j = json::parse(r.out);
    CHECK(j["best"]["eta_lb"] == "inf");
    CHECK(j["best"]["alpha"] == 0.0);
    CHECK(j["families"].size() == 2);
    CHECK(std::abs(j["gauss_bonnet_error"].get<double>()) <= 1e-9);
  }
  SUBCASE("perturbed metric matches the stored regression values") {
    const Run r = run({"analyze", kY20});
    REQUIRE(r.code == kExitSuccess);
    const json best = json::parse(r.out)["best"];
    json golden;
    std::ifstream(std::string(COLLARKIT_TEST_DATA) + "/golden.json") >> golden;
    const json& e = golden["entries"];
    CHECK(best["alpha"].get<double>() == doctest::Approx(e["pipeline.analyze:alpha"]["value"].get<double>()).epsilon(1e-9));
    CHECK(best["beta"].get<double>() == doctest::Approx(e["pipeline.analyze:beta"]["value"].get<double>()).epsilon(1e-9));
    CHECK(best["kappa_lb"].get<double>() ==
          doctest::Approx(e["pipeline.analyze:kappa_lb"]["value"].get<double>()).epsilon(1e-9));
    CHECK(std::isfinite(best["eta_lb"].get<double>()));
  }
  SUBCASE("several files give an array; csv lists every family") {
    const Run r = run({"analyze", kRound, kY20, "--format", "csv"});
    REQUIRE(r.code == kExitSuccess);
    const auto rows = csv_rows(r.out);
    CHECK(rows[0][0] == "metric");
    CHECK(rows.size() == 1 + 2 * 3);
    CHECK(rows[3][1] == "best");
    CHECK(rows[3][4] == "inf");
  }
  SUBCASE("malformed JSON names line and column") {
    const fs::path dir = scratch_dir("malformed");
    std::ofstream(dir / "bad.json") << "{\"lmax\": 2,\n \"coefficients\": [[2, 0, 0.05 0]]}";
    const Run r = run({"analyze", (dir / "bad.json").string()});
    CHECK(r.code == kExitError);
    CHECK(r.err.find("line 2, column") != std::string::npos);
  }
}

TEST_CASE("collar") {
  SUBCASE("round metric, k = 1: Hawking mass is m on every slice") {
    const Run r = run({"collar", kRound, "--m", "0.3", "--k", "1", "--format", "csv", "--t-resolution", "17"});
    REQUIRE(r.code == kExitSuccess);
    const auto rows = csv_rows(r.out);
    REQUIRE(rows.size() == 18);
    const std::size_t h = column(rows[0], "hawking");
    for (std::size_t i = 1; i < rows.size(); ++i) CHECK(std::stod(rows[i][h]) == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(r.out.find("verdict: pass") != std::string::npos);
  }
  SUBCASE("perturbed metric, m = 0: verdict pass") {
    const Run r = run({"collar", kY20, "--m", "0", "--H-o", "1.5"});
    REQUIRE(r.code == kExitSuccess);
    const json j = json::parse(r.out);
    CHECK(j["verdict"]["pass"] == true);
    CHECK(j["verdict"]["min_R"].get<double>() >= -1e-8);
    CHECK(j["rows"].size() == 33);
  }
  SUBCASE("W beyond beta/(1+alpha) is inadmissible and names the inequality") {
    const Run r = run({"collar", kY20, "--m", "0", "--H-o", "1.95"});
    CHECK(r.code == kExitInapplicable);
    CHECK(r.err.find("beta - (1 + alpha) k^2") != std::string::npos);
  }
  SUBCASE("parameter errors") {
    CHECK(run({"collar", kY20, "--m", "0"}).code == kExitError);
    CHECK(run({"collar", kY20, "--H-o", "1", "--k", "1"}).code == kExitError);
    CHECK(run({"collar", kY20, "--m", "0.6", "--H-o", "1"}).code == kExitError);
  }
}

TEST_CASE("bounds") {
  SUBCASE("round sphere with a horizon of area pi") {
    const Run r = run({"bounds", kRound, "--H-o", "1", "--horizon-area", "3.141592653589793"});
    REQUIRE(r.code == kExitSuccess);
    const json j = json::parse(r.out);
    REQUIRE(j.size() == 8);
    CHECK(j[0]["theorem"] == "T11");
    CHECK(j[0]["rhs"].get<double>() == doctest::Approx(0.375).epsilon(1e-12));
    CHECK(j[0]["horizon_radius"].get<double>() == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(j[0]["holds"] == true);
  }
  SUBCASE("W above eta_lb makes T11 inapplicable") {
    const Run r = run({"bounds", kY20, "--H-o", "100"});
    const json j = json::parse(r.out);
    CHECK(j[0]["theorem"] == "T11");
    CHECK(j[0]["applicable"] == false);
    CHECK(j[0]["rhs"].is_null());
    CHECK(r.code == kExitInapplicable);
  }
  SUBCASE("mean curvature sweep: one row per theorem and H_o") {
    const Run r = run({"bounds", kY20, "--H-sweep", "0.5", "2", "4", "--format", "csv"});
    REQUIRE(r.code == kExitSuccess);
    const auto rows = csv_rows(r.out);
    REQUIRE(rows.size() == 1 + 8 * 4);
    const std::size_t H = column(rows[0], "H_o");
    CHECK(rows[1][H] == "0.5");
    CHECK(rows[8][H] == "0.5");
    CHECK(rows[9][H] == "1");
    CHECK(rows[32][H] == "2");
  }
}

TEST_CASE("sweep over m") {
  const Run r = run({"sweep", kY20, "--H-o", "1.5", "--m-sweep", "-2", "0.4", "4", "--format", "csv"});
  REQUIRE(r.code == kExitSuccess);
  const auto rows = csv_rows(r.out);
  REQUIRE(rows.size() == 5);
  CHECK(rows[1][0] == "T31family");
  CHECK(rows[4][0] == "T32family");
  CHECK(run({"sweep", kY20, "--H-o", "1.95", "--m-sweep", "0", "0.4", "3"}).code == kExitInapplicable);
  CHECK(run({"sweep", kY20, "--m-sweep", "0", "0.4", "3"}).code == kExitError);
}

TEST_CASE("appendix") {
  SUBCASE("kappa = 8/9 has the double root 2/3") {
    const Run r = run({"appendix", "--kappa", "0.88888888888888884", "--alpha", "0.1", "--W", "0.1"});
    REQUIRE(r.code == kExitSuccess);
    const json j = json::parse(r.out);
    CHECK(j["x1"].get<double>() == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(j["x2"].get<double>() == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  }
  SUBCASE("kappa = 0.95, W = 0.1 lists both case c candidates") {
    const Run r = run({"appendix", "--kappa", "0.95", "--alpha", "0.1", "--W", "0.1"});
    REQUIRE(r.code == kExitSuccess);
    const json j = json::parse(r.out);
    CHECK(j["case"] == "c");
    REQUIRE(j["candidates"].size() == 2);
    CHECK(j["candidates"][0]["x"] == 0.1);
    CHECK(j["grid"]["delta_value"].get<double>() <= 1e-6);
    CHECK(j["grid"]["delta_x"].get<double>() <= 2.0 * (0.95 - 0.1) / 1e5);
  }
  SUBCASE("b = 0.9, W = 0.5 is case 2c, agreeing with Phi at m = 0") {
    const Run r = run({"appendix", "--b", "0.9", "--alpha", "0.1", "--W", "0.5"});
    REQUIRE(r.code == kExitSuccess);
    const json j = json::parse(r.out);
    CHECK(j["case"] == "2c");
    CHECK(j["limit"] == "from_below");
    CHECK(j["m0_agreement"]["delta"].get<double>() <= 1e-12);
    CHECK(j["value"].get<double>() == doctest::Approx(j["m0_agreement"]["phi_at_W"].get<double>()).epsilon(1e-12));
  }
  SUBCASE("unmet hypotheses and bad input") {
    CHECK(run({"appendix", "--kappa", "0.5", "--alpha", "0.1", "--W", "0.6"}).code == kExitInapplicable);
    CHECK(run({"appendix", "--kappa", "0.5", "--b", "0.5", "--alpha", "0.1", "--W", "0.1"}).code == kExitError);
    CHECK(run({"appendix", "--kappa", "0.5", "--W", "0.1"}).code == kExitError);
  }
}

TEST_CASE("verify writes JSON lines and reports failure through the exit code") {
  const fs::path dir = scratch_dir("verify");
  fs::copy_file(std::string(COLLARKIT_TEST_DATA) + "/golden.json", dir / "golden.json");
  const Run r = run({"verify", "--only", "bounds.", "--only", "pipeline.analyze", "--golden",
                     (dir / "golden.json").string(), "--out-dir", (dir / "out").string()});
  CHECK(r.code == kExitSuccess);
  std::istringstream in(slurp(dir / "out" / "verify.jsonl"));
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    CHECK(json::parse(line)["pass"] == true);
    ++n;
  }
  CHECK(n == 11);

  json store;
  std::ifstream(dir / "golden.json") >> store;
  store["entries"]["pipeline.analyze:beta"]["value"] = 0.5;
  std::ofstream(dir / "golden.json") << store.dump();
  CHECK(run({"verify", "--only", "pipeline.analyze", "--golden", (dir / "golden.json").string()}).code == kExitError);
}

TEST_CASE("output is deterministic") {
  const fs::path dir = scratch_dir("determinism");
  for (const char* sub : {"a", "b"}) {
    CHECK(run({"--out-dir", (dir / sub).string(), "--format", "csv", "bounds", kY20, "--H-sweep", "0.5", "2", "3"})
              .code == kExitSuccess);
    CHECK(run({"--out-dir", (dir / sub).string(), "analyze", kY20}).code == kExitSuccess);
  }
  CHECK(slurp(dir / "a" / "bounds.csv") == slurp(dir / "b" / "bounds.csv"));
  CHECK(slurp(dir / "a" / "analyze.json") == slurp(dir / "b" / "analyze.json"));
  CHECK(!slurp(dir / "a" / "bounds.csv").empty());
}

TEST_CASE("config file with command-line overrides") {
  const fs::path dir = scratch_dir("config");
  fs::copy_file(kRound, dir / "round.json");
  std::ofstream(dir / "run.json") << R"({"metrics": ["round.json"], "H_o": 1, "format": "csv", "lmax": 8})";
  // the metric path is relative to the config file, not the working directory
  Run r = run({"--config", (dir / "run.json").string(), "bounds"});
  REQUIRE(r.code == kExitSuccess);
  auto rows = csv_rows(r.out);
  CHECK(rows[1][column(rows[0], "H_o")] == "1");

  r = run({"--config", (dir / "run.json").string(), "bounds", "--H-o", "2"});
  REQUIRE(r.code == kExitSuccess);
  rows = csv_rows(r.out);
  CHECK(rows[1][column(rows[0], "H_o")] == "2");

  std::ofstream(dir / "bad.json") << R"({"metrics": ["round.json"], "Ho": 1})";
  r = run({"--config", (dir / "bad.json").string(), "bounds"});
  CHECK(r.code == kExitError);
  CHECK(r.err.find("unknown config key 'Ho'") != std::string::npos);
}

TEST_CASE("command line errors") {
  CHECK(run({"--help"}).code == kExitSuccess);
  CHECK(run({}).code == kExitError);
  CHECK(run({"bounds", kRound, "--frobnicate"}).code == kExitError);
  CHECK(run({"--format", "xml", "bounds", kRound, "--H-o", "1"}).code == kExitError);
  CHECK(run({"bounds", "/nonexistent/metric.json", "--H-o", "1"}).code == kExitError);
  CHECK(run({"--lmax", "1", "bounds", kRound, "--H-o", "1"}).code == kExitError);
}
