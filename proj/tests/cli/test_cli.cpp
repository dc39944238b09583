#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

using njson = nlohmann::json;

namespace {

const std::string& work_dir() {
  static const std::string dir = [] {
    const auto d = std::filesystem::temp_directory_path() /
                   ("lfrac_cli_test_" + std::to_string(::getpid()));
    std::filesystem::create_directories(d);
    return d.string();
  }();
  return dir;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string write_text(const std::string& name, const std::string& content) {
  const std::string path = work_dir() + "/" + name;
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
  REQUIRE(out.good());
  return path;
}

struct CliResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

CliResult run_cli(const std::string& args) {
  static int counter = 0;
  const std::string tag = std::to_string(counter++);
  const std::string out_path = work_dir() + "/stdout_" + tag + ".txt";
  const std::string err_path = work_dir() + "/stderr_" + tag + ".txt";
  const std::string cmd = std::string("\"") + LFRAC_CLI_PATH + "\" " + args +
                          " > \"" + out_path + "\" 2> \"" + err_path + "\"";
  const int status = std::system(cmd.c_str());
  CliResult r;
  if (WIFEXITED(status)) r.exit_code = WEXITSTATUS(status);
  r.out = slurp(out_path);
  r.err = slurp(err_path);
  return r;
}

std::string fmt17(double v) {
  char buf[48];
  const auto res =
      std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

// value column of a CSV artifact, keyed by the leading coordinates
std::vector<std::vector<double>> csv_rows(const std::string& path) {
  const std::string text = slurp(path);
  std::vector<std::vector<double>> rows;
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::size_t start = 0;
    while (start <= line.size()) {
      const std::size_t comma = line.find(',', start);
      const std::string cell =
          line.substr(start, comma == std::string::npos ? std::string::npos
                                                        : comma - start);
      row.push_back(std::strtod(cell.c_str(), nullptr));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

// Two-piece halving system with lambda_1 = x, lambda_2 = 1 - x and the
// given constant scaling; the workhorse config of the whole suite.
std::string affine_config(double scaling, int level,
                          const std::string& extra = "") {
  std::ostringstream os;
  os << R"({
  "dimension": 1,
  "domain": {"lower": [0.0], "upper": [1.0]},
  "pieces": [
    {
      "subdomain": {"lower": [0.0], "upper": [1.0]},
      "map": {"scale": 0.5, "translate": [0.0]},
      "lambda": {"kind": "polynomial", "coefficients": [0.0, 1.0]},
      "scaling": {"kind": "constant", "value": )"
     << scaling << R"(}
    },
    {
      "subdomain": {"lower": [0.0], "upper": [1.0]},
      "map": {"scale": 0.5, "translate": [0.5]},
      "lambda": {"kind": "polynomial", "coefficients": [1.0, -1.0]},
      "scaling": {"kind": "constant", "value": )"
     << scaling << R"(}
    }
  ],
  "solver": {"level": )"
     << level << R"(, "tolerance": 1e-12, "max_iterations": 200})" << extra
     << "\n}\n";
  return os.str();
}

std::string constant_config(double lambda, double scaling,
                            const std::string& extra = "") {
  std::ostringstream os;
  os << R"({
  "dimension": 1,
  "domain": {"lower": [0.0], "upper": [1.0]},
  "pieces": [
    {
      "subdomain": {"lower": [0.0], "upper": [1.0]},
      "map": {"scale": 0.5, "translate": [0.0]},
      "lambda": {"kind": "constant", "value": )"
     << lambda << R"(},
      "scaling": {"kind": "constant", "value": )"
     << scaling << R"(}
    },
    {
      "subdomain": {"lower": [0.0], "upper": [1.0]},
      "map": {"scale": 0.5, "translate": [0.5]},
      "lambda": {"kind": "constant", "value": )"
     << lambda << R"(},
      "scaling": {"kind": "constant", "value": )"
     << scaling << R"(}
    }
  ],
  "solver": {"level": 8, "tolerance": 1e-12, "max_iterations": 200})"
     << extra << "\n}\n";
  return os.str();
}

std::string hat_csv(int level) {
  const std::size_t n = (std::size_t{1} << level) + 1;
  std::string out = "x,value\n";
  for (std::size_t i = 0; i < n; ++i) {
    const double x = double(i) / double(n - 1);
    out += fmt17(x);
    out += ',';
    out += fmt17(std::min(x, 1.0 - x));
    out += '\n';
  }
  return out;
}

}  // namespace

TEST_CASE("validate accepts a tiling partition and rejects overlaps") {
  const std::string good = write_text("v_good.json", affine_config(0.5, 6));
  CliResult r = run_cli("validate --config \"" + good + "\"");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("result: valid partition") != std::string::npos);

  const std::string overlap = write_text("v_overlap.json", R"({
  "dimension": 1,
  "domain": {"lower": [0.0], "upper": [1.0]},
  "pieces": [
    {
      "subdomain": {"lower": [0.0], "upper": [1.0]},
      "map": {"scale": 0.6, "translate": [0.0]},
      "lambda": {"kind": "constant", "value": 1.0},
      "scaling": {"kind": "constant", "value": 0.5}
    },
    {
      "subdomain": {"lower": [0.0], "upper": [1.0]},
      "map": {"scale": 0.6, "translate": [0.4]},
      "lambda": {"kind": "constant", "value": 1.0},
      "scaling": {"kind": "constant", "value": 0.5}
    }
  ]
})");
  r = run_cli("validate --config \"" + overlap + "\"");
  CHECK(r.exit_code == 1);
  // the report names the overlapping pair
  CHECK(r.out.find("pieces 1 and 2 overlap") != std::string::npos);
}

TEST_CASE("malformed and unknown-key configs map to parse and semantic exits") {
  const std::string broken =
      write_text("v_broken.json", "{\n  \"dimension\": 1,\n  \"domain\": {\n");
  CliResult r = run_cli("validate --config \"" + broken + "\"");
  CHECK(r.exit_code == 2);
  CHECK(r.err.find("line") != std::string::npos);
  CHECK(r.err.find("column") != std::string::npos);

  const std::string typo = write_text(
      "v_typo.json", affine_config(0.5, 6, ",\n  \"solvr\": {\"level\": 4}"));
  r = run_cli("validate --config \"" + typo + "\"");
  CHECK(r.exit_code == 1);
  CHECK(r.err.find("unknown key") != std::string::npos);
  CHECK(r.err.find("solvr") != std::string::npos);

  r = run_cli("validate --config \"" + work_dir() + "/does_not_exist.json\"");
  CHECK(r.exit_code == 1);
}

TEST_CASE("solve writes the fixed point with dyadic-exact anchor values") {
  const std::string cfg = write_text("s_affine.json", affine_config(0.5, 8));
  const std::string out = work_dir() + "/s_affine.csv";
  CliResult r = run_cli("solve --config \"" + cfg + "\" --out \"" + out +
                        "\"");
  REQUIRE(r.exit_code == 0);

  const njson rep = njson::parse(r.out);
  CHECK(rep["solver"]["converged"].get<bool>());
  CHECK(rep["solver"]["residual"].get<double>() < 1e-10);
  CHECK(rep["contraction"]["sup_bound"].get<double>() ==
        doctest::Approx(0.5));
  CHECK(std::filesystem::exists(out + ".meta.json"));

  const auto rows = csv_rows(out);
  REQUIRE(rows.size() == 257);
  bool found_quarter = false;
  for (const auto& row : rows) {
    if (row[0] == 0.25) {
      found_quarter = true;
      CHECK(row[1] == doctest::Approx(1.0).epsilon(1e-9));
    }
  }
  CHECK(found_quarter);
  // endpoints of the fixed point vanish
  CHECK(rows.front()[1] == doctest::Approx(0.0).epsilon(1e-10));
  CHECK(rows.back()[1] == doctest::Approx(0.0).epsilon(1e-10));
}

TEST_CASE("solve handles constant, zero-scaling and non-contractive systems") {
  const std::string cfg = write_text("s_const.json", constant_config(1.0, 0.5));
  const std::string out = work_dir() + "/s_const.csv";
  CliResult r = run_cli("solve --config \"" + cfg + "\" --out \"" + out +
                        "\"");
  REQUIRE(r.exit_code == 0);
  for (const auto& row : csv_rows(out))
    CHECK(std::abs(row[1] - 2.0) < 1e-10);

  const std::string zero = write_text("s_zero.json", affine_config(0.0, 6));
  r = run_cli("solve --config \"" + zero + "\" --out \"" + work_dir() +
              "/s_zero.csv\"");
  REQUIRE(r.exit_code == 0);
  const int iters =
      njson::parse(r.out)["solver"]["iterations"].get<int>();
  CHECK(iters >= 1);
  CHECK(iters <= 2);

  const std::string bad = write_text("s_bad.json", constant_config(1.0, 1.25));
  r = run_cli("solve --config \"" + bad + "\" --out \"" + work_dir() +
              "/s_bad.csv\"");
  CHECK(r.exit_code == 1);
  CHECK(r.err.find("not contractive") != std::string::npos);
  CHECK(r.err.find("1.25") != std::string::npos);
}

TEST_CASE("identical config and seed give byte-identical outputs") {
  const std::string cfg = write_text("d_affine.json", affine_config(0.5, 8));
  const std::string out1 = work_dir() + "/d_run1.csv";
  const std::string out2 = work_dir() + "/d_run2.csv";
  CliResult r1 = run_cli("solve --config \"" + cfg + "\" --out \"" + out1 +
                         "\" --seed 7");
  CliResult r2 = run_cli("solve --config \"" + cfg + "\" --out \"" + out2 +
                         "\" --seed 7");
  REQUIRE(r1.exit_code == 0);
  REQUIRE(r2.exit_code == 0);
  CHECK(slurp(out1) == slurp(out2));
  // report JSON differs only in the artifact paths
  njson a = njson::parse(r1.out), b = njson::parse(r2.out);
  a.erase("artifacts");
  b.erase("artifacts");
  CHECK(a.dump() == b.dump());

  CliResult c1 = run_cli("check --config \"" + cfg +
                         "\" --space \"hoelder(0.5)\" --seed 3");
  CliResult c2 = run_cli("check --config \"" + cfg +
                         "\" --space \"hoelder(0.5)\" --seed 3");
  CHECK(c1.out == c2.out);
}

TEST_CASE("check reports uniform formulas next to the general verdicts") {
  const std::string cfg = write_text(
      "c_uniform.json",
      affine_config(0.4, 6,
                    ",\n  \"spaces\": [\"sobolev(1,2)\", \"hoelder(0.5)\", "
                    "\"hardy(2)\", \"hoelder(0.5)\"]"));
  CliResult r = run_cli("check --config \"" + cfg + "\"");
  REQUIRE(r.exit_code == 0);
  const njson rep = njson::parse(r.out);
  CHECK(rep["system"]["uniform"].get<int>() == 2);

  // the duplicate hoelder query collapses: each space appears exactly once
  REQUIRE(rep["spaces"].size() == 3);

  const njson& sobolev = rep["spaces"][0];
  CHECK(sobolev["report"]["verdict"].get<std::string>() == "sufficient");
  CHECK(sobolev["specialized"]["value"].get<double>() ==
        doctest::Approx(0.64).epsilon(1e-12));
  CHECK(sobolev["specialized"]["satisfied"].get<bool>());

  const njson& hoelder = rep["spaces"][1];
  CHECK(hoelder["report"]["verdict"].get<std::string>() == "sufficient");
  CHECK(hoelder["report"]["eta_norm"].get<double>() ==
        doctest::Approx(0.4 * std::sqrt(2.0)).epsilon(1e-12));
  CHECK(hoelder["specialized"]["value"].get<double>() ==
        doctest::Approx(0.4 * std::sqrt(2.0)).epsilon(1e-12));

  const njson& hardy = rep["spaces"][2];
  CHECK(hardy["report"]["verdict"].get<std::string>() == "sufficient");
  CHECK(hardy["specialized"]["threshold"].get<double>() == 2.0);
  CHECK(hardy["specialized"]["value"].get<double>() ==
        doctest::Approx(0.32).epsilon(1e-12));
}

TEST_CASE("check records invalid space parameters per entry and continues") {
  const std::string cfg = write_text("c_err.json", affine_config(0.4, 6));
  // q = 1 pushes the smoothness threshold above s; the checker refuses
  CliResult r = run_cli("check --config \"" + cfg +
                        "\" --space \"triebel(2,1,0.75,1)\" --space "
                        "\"lp(2)\"");
  REQUIRE(r.exit_code == 0);
  const njson rep = njson::parse(r.out);
  REQUIRE(rep["spaces"].size() == 2);
  CHECK(rep["spaces"][0].contains("error"));
  CHECK_FALSE(rep["spaces"][1].contains("error"));
  CHECK(rep["spaces"][1]["report"]["verdict"].get<std::string>() ==
        "sufficient");
}

TEST_CASE("seminorm estimates the hat kink in direct-function mode") {
  const std::string csv = write_text("hat.csv", hat_csv(10));
  const std::string cfg = write_text(
      "hat.json", "{\n  \"function\": {\"csv\": \"" + csv + "\"}\n}\n");
  const std::string profile = work_dir() + "/hat_profile.csv";
  CliResult r = run_cli("seminorm --config \"" + cfg +
                        "\" --space \"hoelder(1)\" --out \"" + profile +
                        "\"");
  REQUIRE(r.exit_code == 0);
  const njson rep = njson::parse(r.out);
  CHECK(rep["fixed_point_source"].get<std::string>() == "direct");
  CHECK(rep["estimate"]["value"].get<double>() ==
        doctest::Approx(2.0).epsilon(1e-3));
  CHECK_FALSE(rep["estimate"]["divergence_flag"].get<bool>());

  // the h-profile has one row per radius, no carriage returns, and its
  // integrand stays at the kink level 2 for small h
  const std::string prof = slurp(profile);
  CHECK(prof.find('\r') == std::string::npos);
  const auto rows = csv_rows(profile);
  CHECK(rows.size() == rep["h_grid"]["radii"].get<std::size_t>());
  CHECK(rows.front()[1] == doctest::Approx(2.0).epsilon(1e-6));

  // above the kink exponent the refinement probe flags divergence
  r = run_cli("seminorm --config \"" + cfg + "\" --space \"hoelder(1.3)\"");
  REQUIRE(r.exit_code == 0);
  const njson diverging = njson::parse(r.out);
  CHECK(diverging["estimate"]["divergence_flag"].get<bool>());
  CHECK(diverging["estimate"]["refined_value"].get<double>() >
        diverging["estimate"]["value"].get<double>());

  // the same estimate through the raw Besov query agrees exactly
  CliResult raw = run_cli("seminorm --config \"" + cfg +
                          "\" --space \"besov(inf,inf,1,2)\"");
  REQUIRE(raw.exit_code == 0);
  CHECK(njson::parse(raw.out)["estimate"]["value"].get<double>() ==
        rep["estimate"]["value"].get<double>());
}

TEST_CASE("seminorm reuses a fresh solve artifact and re-solves a stale one") {
  const std::string fp = work_dir() + "/cache_fp.csv";
  const std::string cfg = write_text(
      "cache.json",
      affine_config(0.5, 8,
                    ",\n  \"seminorm\": {\"space\": \"hoelder(0.5)\", "
                    "\"fixed_point_csv\": \"" +
                        fp + "\"}"));
  CliResult solve = run_cli("solve --config \"" + cfg + "\" --out \"" + fp +
                            "\"");
  REQUIRE(solve.exit_code == 0);

  CliResult warm = run_cli("seminorm --config \"" + cfg + "\"");
  REQUIRE(warm.exit_code == 0);
  const njson warm_rep = njson::parse(warm.out);
  CHECK(warm_rep["fixed_point_source"].get<std::string>() == "cache");

  // flip one byte of the artifact: the content hash no longer matches
  std::string bytes = slurp(fp);
  bytes[bytes.size() / 2] = bytes[bytes.size() / 2] == '1' ? '2' : '1';
  write_text("cache_fp.csv", bytes);
  CliResult stale = run_cli("seminorm --config \"" + cfg + "\"");
  REQUIRE(stale.exit_code == 0);
  const njson stale_rep = njson::parse(stale.out);
  CHECK(stale_rep["fixed_point_source"].get<std::string>() == "solved");
  CHECK(stale_rep["cache_note"].get<std::string>().find("does not match") !=
        std::string::npos);

  // both routes land on the same estimate
  CHECK(warm_rep["estimate"]["value"].get<double>() ==
        doctest::Approx(stale_rep["estimate"]["value"].get<double>())
            .epsilon(1e-12));
}

TEST_CASE("seminorm splits interior and boundary contributions") {
  // zero scaling makes the fixed point piecewise linear (a doubled hat),
  // so order-2 differences vanish inside the piece images
  const std::string cfg = write_text(
      "split.json",
      affine_config(0.0, 8,
                    ",\n  \"seminorm\": {\"space\": \"besov(inf,inf,1,2)\", "
                    "\"regions\": \"pieces\"}"));
  CliResult r = run_cli("seminorm --config \"" + cfg + "\"");
  REQUIRE(r.exit_code == 0);
  const njson rep = njson::parse(r.out);
  const double full = rep["estimate"]["value"].get<double>();
  CHECK(full == doctest::Approx(4.0).epsilon(1e-9));
  CHECK(rep["regions"]["interior"].get<double>() == 0.0);
  CHECK(rep["regions"]["boundary_contribution"].get<double>() ==
        doctest::Approx(full).epsilon(1e-12));
}

TEST_CASE("h_min below the grid spacing exits with the admissible value") {
  const std::string cfg = write_text(
      "hmin.json", affine_config(0.5, 8,
                                 ",\n  \"seminorm\": {\"space\": "
                                 "\"hoelder(0.5)\", \"h_min\": 1e-6}"));
  CliResult r = run_cli("seminorm --config \"" + cfg + "\"");
  CHECK(r.exit_code == 1);
  CHECK(r.err.find("minimum admissible value") != std::string::npos);
  CHECK(r.err.find("0.00390625") != std::string::npos);
}

TEST_CASE("attractor distance sequence halves for the halving system") {
  const std::string cfg = write_text(
      "attr_base.json",
      constant_config(1.0, 0.5,
                      ",\n  \"attractor\": {\"mode\": \"base\", "
                      "\"seed_count\": 33, \"steps\": 12}"));
  const std::string out = work_dir() + "/attr_base.csv";
  CliResult r = run_cli("attractor --config \"" + cfg + "\" --out \"" + out +
                        "\"");
  REQUIRE(r.exit_code == 0);
  const njson rep = njson::parse(r.out);
  CHECK_FALSE(rep["collapsed"].get<bool>());

  const auto dist = csv_rows(rep["artifacts"]["distances_csv"]
                                 .get<std::string>());
  REQUIRE(dist.size() == 12);
  for (const auto& row : dist) {
    const double bound = std::pow(2.0, -row[0]);  // diam(K0) = 1
    CHECK(row[2] <= bound + 1e-12);
  }

  // steps=0 echoes the seed cloud
  CliResult echo = run_cli("attractor --config \"" + cfg + "\" --out \"" +
                           out + "\" --steps 0");
  REQUIRE(echo.exit_code == 0);
  CHECK(csv_rows(out).size() == 33);
}

TEST_CASE("graph-mode attractor approaches the fixed-point line") {
  // snap at 2^-10 keeps the cloud near one point per lattice cell while
  // the representatives stay exact, so the y error keeps halving
  const std::string cfg = write_text(
      "attr_graph.json",
      constant_config(1.0, 0.5,
                      ",\n  \"attractor\": {\"mode\": \"graph\", "
                      "\"seed_level\": 4, \"steps\": 25, "
                      "\"snap\": 0.0009765625}"));
  const std::string out = work_dir() + "/attr_graph.csv";
  CliResult r = run_cli("attractor --config \"" + cfg + "\" --out \"" + out +
                        "\"");
  REQUIRE(r.exit_code == 0);
  const auto rows = csv_rows(out);
  REQUIRE(!rows.empty());
  for (const auto& row : rows) CHECK(std::abs(row[1] - 2.0) < 1e-6);
}

TEST_CASE("attractor collapse exits cleanly with a warning") {
  const std::string cfg = write_text("attr_collapse.json", R"({
  "dimension": 1,
  "domain": {"lower": [0.0], "upper": [1.0]},
  "pieces": [
    {
      "subdomain": {"lower": [0.0], "upper": [0.25]},
      "map": {"scale": 0.25, "translate": [0.75]},
      "lambda": {"kind": "constant", "value": 0.0},
      "scaling": {"kind": "constant", "value": 0.5}
    }
  ],
  "attractor": {"mode": "base", "seed_count": 33, "steps": 6}
})");
  const std::string out = work_dir() + "/attr_collapse.csv";
  CliResult r = run_cli("attractor --config \"" + cfg + "\" --out \"" + out +
                        "\"");
  CHECK(r.exit_code == 0);
  CHECK(r.err.find("collapsed") != std::string::npos);
  const njson rep = njson::parse(r.out);
  CHECK(rep["collapsed"].get<bool>());
  // the point cloud file is just the header
  CHECK(csv_rows(out).empty());
}
