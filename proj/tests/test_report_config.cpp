#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "maxreg/config.hpp"
#include "maxreg/error.hpp"
#include "maxreg/lab.hpp"
#include "maxreg/report.hpp"

using namespace maxreg;

namespace {

std::string config_error_field(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.field();
  }
  return {};
}

Report sample_report() {
  Report r;
  r.command = "sample";
  r.config = {{"theta", "1"}, {"variants", "nonsymmetric, symmetric"}};
  r.checks.push_back(check_le("small", 1e-9, 1e-6, "a detail"));
  r.checks.push_back(check_ge("margin", -0.5, 0.0));
  r.checks.push_back(check_in("slope", 0.5, 0.45, 0.55));
  r.checks.push_back(check_le("undefined", std::numeric_limits<double>::quiet_NaN(), 1.0));
  r.checks.push_back(check_ge("infinite", std::numeric_limits<double>::infinity(), 1.0));
  r.tables.push_back(Table{"t", {"a", "b"}, {{"1", "2.5"}, {"3", ""}}});
  r.warnings.push_back("something to note");
  return r;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("config parsing") {
  const ExperimentConfig c = parse_config(
      "# comment line\n"
      "variant = symmetric\n"
      "shift_d = 5   # trailing comment\n"
      "eps_sweep = 1e-2, 1e-3\n"
      "theta = 0.5\n"
      "alpha = auto\n"
      "seed = 42\n");
  REQUIRE(c.variants.size() == 1);
  CHECK(c.variants[0] == Variant::symmetric);
  CHECK(c.shift_d == 5.0);
  CHECK(c.eps_sweep == std::vector<double>{1e-2, 1e-3});
  CHECK(c.theta == 0.5);
  CHECK_FALSE(c.alpha.has_value());
  CHECK(c.seed == 42);
  CHECK(c.spec(Variant::symmetric).shift_d == 5.0);

  const ExperimentConfig d = parse_config("");
  CHECK(d.n_cells == 2048);
  CHECK(d.eps_sweep.size() == 7);
  CHECK(parse_config("eps_sweep =\n").eps_sweep.empty());
}

TEST_CASE("config errors name the offending field") {
  CHECK(config_error_field("theta = 0.3\n") == "theta");
  CHECK(config_error_field("mesh_size = 10\n") == "mesh_size");
  CHECK(config_error_field("n_cells = many\n") == "n_cells");
  CHECK(config_error_field("variant = skew\n") == "variant");
  CHECK(config_error_field("eps_sweep = 1e-2, 1e-1\n") == "eps_sweep");
  CHECK(config_error_field("mass_model = heavy\n") == "mass_model");
  CHECK(config_error_field("theta 1\n") != "");
  CHECK(config_error_field("theta = 1\n") == "");
  CHECK_THROWS_AS(load_config("/nonexistent/maxreg.cfg"), Error);
}

TEST_CASE("config echo round-trips") {
  ExperimentConfig c;
  c.theta = 0.75;
  c.shift_d = 4.5;
  c.eps_sweep = {1e-3, 1e-5};
  std::string text;
  for (const auto& [k, v] : c.echo()) text += k + " = " + v + "\n";
  const ExperimentConfig back = parse_config(text);
  CHECK(back.echo() == c.echo());
  for (const auto& kv : c.echo()) CHECK(kv.first != "out_dir");
}

TEST_CASE("check verdicts") {
  CHECK(check_le("x", 1.0, 1.0).passed);
  CHECK_FALSE(check_le("x", 1.1, 1.0).passed);
  CHECK(check_ge("x", 0.0, 0.0).passed);
  CHECK(check_in("x", 0.5, 0.45, 0.55).passed);
  CHECK_FALSE(check_in("x", 0.56, 0.45, 0.55).passed);
  CHECK_FALSE(check_le("x", std::nan(""), 1.0).passed);
  CHECK_FALSE(check_true("x", false).passed);
  CHECK_FALSE(sample_report().passed());
}

TEST_CASE("JSON round trip preserves every field") {
  const Report r = sample_report();
  const Report back = report_from_json_string(to_json_string(r));
  CHECK(back.command == r.command);
  CHECK(back.config == r.config);
  CHECK(back.tables == r.tables);
  CHECK(back.warnings == r.warnings);
  REQUIRE(back.checks.size() == r.checks.size());
  for (std::size_t i = 0; i < r.checks.size(); ++i) {
    CHECK(back.checks[i].name == r.checks[i].name);
    CHECK(back.checks[i].passed == r.checks[i].passed);
    CHECK(back.checks[i].upper == r.checks[i].upper);
    if (std::isnan(r.checks[i].measured)) {
      CHECK(std::isnan(back.checks[i].measured));
    } else {
      CHECK(back.checks[i].measured == r.checks[i].measured);
    }
  }
  CHECK(to_json_string(back) == to_json_string(r));
}

TEST_CASE("CSV layout") {
  CHECK(to_csv(Table{"e", {"epsilon", "n_cells", "udot_l2h_sq", "increment"}, {}}) ==
        "epsilon,n_cells,udot_l2h_sq,increment\n");
  CHECK(to_csv(Table{"t", {"a", "b"}, {{"1", "2"}, {"3", ""}}}) == "a,b\n1,2\n3,\n");
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(format_number(std::nan("")) == "nan");
  CHECK(to_text(sample_report()).find("verdict: FAIL") != std::string::npos);
  CHECK_THROWS_AS(parse_format("xml"), ConfigError);
  CHECK(parse_format("csv") == Format::csv);
}

TEST_CASE("emit writes the documented files") {
  const auto dir = std::filesystem::temp_directory_path() / "maxreg_emit_test";
  std::filesystem::remove_all(dir);
  const Report r = sample_report();
  const auto csv = emit(r, Format::csv, dir);
  CHECK(std::filesystem::exists(dir / "sample_checks.csv"));
  CHECK(std::filesystem::exists(dir / "sample_t.csv"));
  CHECK(slurp(dir / "sample_t.csv") == to_csv(r.tables[0]));
  emit(r, Format::json, dir);
  CHECK(report_from_json_string(slurp(dir / "sample.json")).tables == r.tables);
  emit(r, Format::text, dir);
  CHECK(slurp(dir / "sample.txt") == to_text(r));
  std::filesystem::remove_all(dir);
}

TEST_CASE("mr-divergence tables: three rows give two increments, empty sweeps give headers") {
  ExperimentConfig c = parse_config("eps_sweep = 1e-2, 1e-3, 1e-4\nn_cells = 128\nsolver_min_eps = 1\n");
  const Report r = run("mr-divergence", c);
  const Table* ns = nullptr;
  for (const auto& t : r.tables)
    if (t.name == "divergence_nonsym") ns = &t;
  REQUIRE(ns != nullptr);
  CHECK(ns->header == std::vector<std::string>{"epsilon", "n_cells", "udot_l2h_sq", "increment"});
  REQUIRE(ns->rows.size() == 3);
  CHECK(ns->rows[0][3] == "");
  CHECK(ns->rows[1][3] != "");
  CHECK(ns->rows[2][3] != "");
  CHECK(r.passed());

  c.eps_sweep.clear();
  const Report e = run("mr-divergence", c);
  for (const auto& t : e.tables) CHECK(t.rows.empty());
  CHECK_THROWS_AS(run("frobnicate", c), PreconditionError);
}

TEST_CASE("runs are deterministic for a fixed seed") {
  ExperimentConfig c = parse_config("eps_sweep = 1e-2, 1e-3\nn_cells = 128\nform_cells = 64\nform_epsilon = 1e-2\n"
                                    "rayleigh_samples = 100\nholder_bases = 2\nseed = 9\n");
  for (const std::string cmd : {"conditions", "holder-fit", "verify-extension"}) {
    CHECK(to_json_string(run(cmd, c)) == to_json_string(run(cmd, c)));
  }
}
