#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "gpx/json_io.hpp"
#include "gpx/report.hpp"

using namespace gpx;
namespace fs = std::filesystem;

namespace {

int run(const std::string& args) {
  const std::string cmd = std::string(GPX_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string body(const std::string& csv) { return csv.substr(csv.find('\n') + 1); }

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "gpx_cli_tests";
  fs::create_directories(dir);
  const auto p = dir / name;
  fs::remove(p);
  return p;
}

const std::string configs = GPX_SOURCE_DIR "/configs/";
const std::string data = GPX_SOURCE_DIR "/tests/data/";

}  // namespace

TEST(Json, SpecRoundTrip) {
  for (const char* name : {"ou.json", "talagrand.json", "tp_mixed.json", "example1_beta2.json", "example2.json"}) {
    const auto j = read_json_file(configs + name);
    const auto spec = spec_from_json(j.at("spec"));
    const auto again = spec_from_json(parse_json_text(to_json(spec).dump()));
    EXPECT_EQ(to_json(spec), to_json(again)) << name;
    for (double t : {-0.4, -0.01, 0.0, 0.2}) EXPECT_EQ(eval_variance(spec, t), eval_variance(again, t)) << name;
  }
}

TEST(Json, TabulatedSpec) {
  const auto j = parse_json_text(R"({"S": 1, "variance": {"form": "tabulated", "t": [-1, 0, 1], "sigma2": [0.5, 1, 0.5]},
      "correlation": {"form": "tabulated", "lag": [0, 2], "rho": [1, 0], "alpha": 1}})");
  const auto spec = spec_from_json(j);
  EXPECT_NEAR(eval_variance(spec, 0.5), 0.75, 1e-15);
  EXPECT_NEAR(eval_correlation(spec, 1.0), 0.5, 1e-15);
}

TEST(Json, MalformedReportsPosition) {
  try {
    read_json_file(data + "malformed.json");
    FAIL();
  } catch (const SpecViolation& e) {
    EXPECT_NE(std::string(e.what()).find("malformed JSON"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find(":5:"), std::string::npos) << e.what();
  }
}

TEST(Json, FieldPathInDiagnostic) {
  try {
    spec_from_json(read_json_file(data + "bad_field.json").at("spec"));
    FAIL();
  } catch (const SpecViolation& e) {
    EXPECT_NE(std::string(e.what()).find("spec.variance.beta"), std::string::npos) << e.what();
  }
}

TEST(Json, UnknownFieldRejected) {
  const auto j = parse_json_text(R"({"S": 1, "variance": {"form": "power", "beta": 2, "gamma": 1},
      "correlation": {"form": "power_exp", "alpha": 1}})");
  EXPECT_THROW(spec_from_json(j), SpecViolation);
}

TEST(Json, InfinityAsNull) {
  const auto e = closed_form_estimate(ConstantKind::P_alpha_plus, 1.0, 2.0, 1.0, std::numeric_limits<double>::infinity());
  const auto j = to_json(e);
  EXPECT_TRUE(j.at("b_minus").is_null());
  EXPECT_NO_THROW(parse_json_text(j.dump()));
}

TEST(Csv, Format) {
  MCEstimate e;
  e.u = 3.0;
  e.p_hat = 0.1;
  e.ci_low = 0.05;
  e.ci_high = 0.15;
  e.n_paths = 10;
  e.grid_points = 64;
  e.seed = 7;
  EXPECT_EQ(csv_row(e), "3,0.10000000000000001,0.050000000000000003,0.14999999999999999,,,10,64,7");
  std::ostringstream os;
  write_csv(os, std::vector<MCEstimate>{e}, json{{"seed", 7}}, "2026-01-01T00:00:00Z");
  EXPECT_EQ(os.str().substr(0, 35), "# generated 2026-01-01T00:00:00Z; c");
  EXPECT_NE(os.str().find(std::string("\n") + csv_header() + "\n"), std::string::npos);
}

TEST(Cli, ClassifyExampleTwo) {
  const auto out = scratch("classify.json");
  ASSERT_EQ(run("classify --config " + configs + "example2.json -o " + out.string()), 0);
  const auto j = parse_json_text(slurp(out));
  EXPECT_EQ(j.at("classification").at("left"), "S");
  EXPECT_EQ(j.at("classification").at("right"), "S");
}

TEST(Cli, MalformedConfigExitsOneWithoutOutput) {
  const auto out = scratch("malformed.json");
  EXPECT_EQ(run("classify --config " + data + "malformed.json -o " + out.string()), 1);
  EXPECT_FALSE(fs::exists(out));
  EXPECT_FALSE(fs::exists(out.string() + ".tmp"));
  EXPECT_EQ(run("mc --config " + data + "bad_field.json --u 3 -o " + out.string()), 1);
  EXPECT_FALSE(fs::exists(out));
}

TEST(Cli, UnknownFlagExitsOne) { EXPECT_EQ(run("mc --bogus"), 1); }

TEST(Cli, InvalidGridExitsOne) {
  EXPECT_EQ(run("mc --config " + configs + "ou.json --u 3 --paths 10 --grid 6"), 1);
}

TEST(Cli, EveryJsonOutputReparses) {
  const std::vector<std::string> cmds = {
      "classify --config " + configs + "tp_mixed.json",
      "audit --config " + configs + "ss_power.json --grid-size 64",
      "asymptotic --config " + configs + "pp.json --u 3,4",
      "pickands --alpha 2 --T-schedule 1,2,4 --paths 200 --grid-step 0.05",
      "pickands --alpha 1 --constant P --b-plus 1 --domain plus --T-schedule 1,2 --paths 200 --grid-step 0.05",
      "mc --config " + configs + "ou.json --u 2,3 --paths 200 --grid 64 --format json",
      "validate --config " + configs + "ou.json --u 2,3 --paths 200 --grid 64 --format json",
  };
  for (std::size_t i = 0; i < cmds.size(); ++i) {
    const auto out = scratch("out" + std::to_string(i) + ".json");
    ASSERT_EQ(run(cmds[i] + " -o " + out.string()), 0) << cmds[i];
    EXPECT_NO_THROW(parse_json_text(slurp(out))) << cmds[i];
  }
}

TEST(Cli, ValidateCsvIsReproducible) {
  const auto a = scratch("val_a.csv"), b = scratch("val_b.csv");
  const std::string args = "validate --config " + configs + "ou.json --u 2,2.5 --paths 2000 --grid 64 --seed 5 -o ";
  ASSERT_EQ(run(args + a.string()), 0);
  ASSERT_EQ(run(args + b.string()), 0);
  const auto ta = slurp(a), tb = slurp(b);
  EXPECT_EQ(ta.rfind("# generated ", 0), 0u);
  EXPECT_EQ(body(ta), body(tb));
  std::istringstream lines(body(ta));
  std::string header, row;
  std::getline(lines, header);
  EXPECT_EQ(header, csv_header());
  int rows = 0;
  while (std::getline(lines, row)) {
    ++rows;
    EXPECT_EQ(std::count(row.begin(), row.end(), ','), 8);
  }
  EXPECT_EQ(rows, 2);
}
