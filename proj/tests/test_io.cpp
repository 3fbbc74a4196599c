#include "occlab/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>

#include "occlab/errors.hpp"
#include "doctest.h"

using namespace occlab;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& tag) {
  const fs::path p = fs::temp_directory_path() / ("occlab_io_" + tag);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

}  // namespace

TEST_CASE("fmt_double is stable and normalizes special values") {
  CHECK(fmt_double(0.0) == "0");
  CHECK(fmt_double(-0.0) == "0");
  CHECK(fmt_double(1.0) == "1");
  CHECK(fmt_double(0.5) == "0.5");
  CHECK(fmt_double(1.0 / 3.0) == "0.333333333333");
  CHECK(fmt_double(1e-9) == "1e-09");
  CHECK(fmt_double(std::numeric_limits<double>::quiet_NaN()) == "nan");
  CHECK(fmt_double(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(fmt_double(-std::numeric_limits<double>::infinity()) == "-inf");
}

TEST_CASE("csv table rejects ragged rows and renders deterministically") {
  CsvTable t;
  t.header = {"a", "b"};
  t.push_row({"1", "2"});
  t.push_row({"x", "y"});
  CHECK(t.to_text() == "a,b\n1,2\nx,y\n");
  CHECK_THROWS_AS(t.push_row({"only-one"}), std::logic_error);
}

TEST_CASE("config files accept key=value lines with comments") {
  const fs::path dir = fresh_dir("cfg");
  const fs::path file = dir / "run.cfg";
  write_text_file(file,
                  "# heading comment\n"
                  "n_paths = 500\n"
                  "epsilon=0.05\n"
                  "\n"
                  "label = quadrant run  # trailing comment\n");
  const Config c = load_config_file(file);
  CHECK(config_u64(c, "n_paths", 0) == 500);
  CHECK(config_double(c, "epsilon", 0.0) == doctest::Approx(0.05));
  CHECK(config_string(c, "label", "") == "quadrant run");
}

TEST_CASE("config files accept flat json objects") {
  const fs::path dir = fresh_dir("cfgjson");
  const fs::path file = dir / "run.json";
  write_text_file(file, R"({"n_paths": 500, "epsilon": 0.05, "flag": true,
                            "deltas": [0.1, 0.2]})");
  const Config c = load_config_file(file);
  CHECK(config_u64(c, "n_paths", 0) == 500);
  CHECK(config_double(c, "epsilon", 0.0) == doctest::Approx(0.05));
  CHECK(config_bool(c, "flag", false));
  const std::vector<double> d = config_double_list(c, "deltas", {});
  REQUIRE(d.size() == 2);
  CHECK(d[0] == doctest::Approx(0.1));
  CHECK(d[1] == doctest::Approx(0.2));
}

TEST_CASE("file values and overrides canonicalize identically") {
  const fs::path dir = fresh_dir("canon");
  const fs::path file = dir / "run.json";
  write_text_file(file, R"({"epsilon": 0.05, "n": 12})");
  const Config from_file = load_config_file(file);
  Config from_override;
  apply_override(from_override, "epsilon=0.05");
  apply_override(from_override, "n=12");
  CHECK(config_hash(from_file) == config_hash(from_override));
}

TEST_CASE("override parsing rejects malformed input") {
  Config c;
  CHECK_THROWS_AS(apply_override(c, "missing-equals"), ConfigError);
  CHECK_THROWS_AS(apply_override(c, "=5"), ConfigError);
  apply_override(c, "key=a=b");  // only the first '=' splits
  CHECK(config_string(c, "key", "") == "a=b");
}

TEST_CASE("typed getters parse strictly") {
  Config c;
  apply_override(c, "good=12");
  apply_override(c, "junk=12x");
  apply_override(c, "list=0.1,0.2,0.3");
  apply_override(c, "flag=true");
  CHECK(config_int(c, "good", 0) == 12);
  CHECK(config_int(c, "absent", 7) == 7);
  CHECK_THROWS_AS(config_int(c, "junk", 0), ConfigError);
  CHECK_THROWS_AS(config_double(c, "junk", 0.0), ConfigError);
  CHECK(config_bool(c, "flag", false));
  const std::vector<double> xs = config_double_list(c, "list", {});
  REQUIRE(xs.size() == 3);
  CHECK(xs[1] == doctest::Approx(0.2));
}

TEST_CASE("unknown keys are rejected by name") {
  Config c;
  apply_override(c, "n_paths=10");
  apply_override(c, "n_stps=100");  // typo
  CHECK_THROWS_AS(require_known_keys(c, {"n_paths", "n_steps"}), ConfigError);
  Config ok;
  apply_override(ok, "n_paths=10");
  CHECK_NOTHROW(require_known_keys(ok, {"n_paths", "n_steps"}));
}

TEST_CASE("config hash is order-independent and value-sensitive") {
  Config a, b;
  apply_override(a, "x=1");
  apply_override(a, "y=2");
  apply_override(b, "y=2");
  apply_override(b, "x=1");
  CHECK(config_hash(a) == config_hash(b));
  apply_override(b, "x=3");
  CHECK(config_hash(a) != config_hash(b));
  CHECK(config_hash(a).size() == 16);
}

TEST_CASE("run outputs land in the expected layout") {
  const fs::path dir = fresh_dir("outputs");
  RunContext ctx;
  ctx.experiment = "demo";
  ctx.seed = 5;
  ctx.threads = 1;
  ctx.out_dir = dir / "run1";
  apply_override(ctx.config, "n=3");

  nlohmann::json report;
  report["experiment"] = "demo";
  CsvTable t;
  t.header = {"k", "v"};
  t.push_row({"0", "1.5"});
  write_run_outputs(ctx, report, {{"main", t}});

  CHECK(fs::exists(ctx.out_dir / "report.json"));
  CHECK(fs::exists(ctx.out_dir / "manifest.json"));
  CHECK(fs::exists(ctx.out_dir / "tables" / "main.csv"));
  CHECK(slurp(ctx.out_dir / "tables" / "main.csv") == "k,v\n0,1.5\n");

  const nlohmann::json manifest =
      nlohmann::json::parse(slurp(ctx.out_dir / "manifest.json"));
  CHECK(manifest["experiment"] == "demo");
  CHECK(manifest["seed"] == 5);
  CHECK(manifest["config_hash"] == config_hash(ctx.config));
  bool lists_table = false;
  for (const auto& a : manifest["artifacts"]) {
    if (a.get<std::string>().find("main.csv") != std::string::npos) lists_table = true;
  }
  CHECK(lists_table);
}

TEST_CASE("missing files fail loudly") {
  CHECK_THROWS_AS(load_config_file("/nonexistent/place/run.cfg"), ConfigError);
  CHECK_THROWS_AS(write_text_file("/nonexistent/place/out.txt", "x"), IoError);
}
