#include <gtest/gtest.h>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"
#include "support.hpp"
#include "warpsol/report.hpp"

using namespace warpsol;
using nlohmann::json;

namespace {

std::string write_temp(const std::string& name, const std::string& text) {
  const std::string path = ::testing::TempDir() + "warpsol_report_" + name;
  std::ofstream(path) << text;
  return path;
}

RunConfig check_config(const std::string& path) {
  RunConfig cfg;
  cfg.command = Command::check;
  cfg.input = path;
  return cfg;
}

std::string bryant_spec() {
  const double s0 = 0.1, c = -1.0 / 18.0;
  json j = {{"n", 4},
            {"rho", 0.0},
            {"fibers", {{{"dim", 3}, {"k", 1.0}}}},
            {"initial",
             {{"s0", s0},
              {"h", {s0 + c * s0 * s0 * s0}},
              {"w", {1 + 3 * c * s0 * s0}},
              {"f", 9 * c * s0 * s0},
              {"fprime", 18 * c * s0}}}};
  return j.dump();
}

std::string singular_spec() {
  return R"({"n": 6, "rho": -0.5, "fibers": [{"dim": 2, "k": 1}, {"dim": 3, "k": -1}],
             "initial": {"s0": 0.5, "h": [0.7, 1.2], "w": [0.3, -0.2], "f": 0.1, "fprime": 0.4}})";
}

RunConfig integrate_config(const std::string& path, double s1) {
  RunConfig cfg;
  cfg.command = Command::integrate;
  cfg.input = path;
  cfg.s1 = s1;
  return cfg;
}

}  // namespace

TEST(RunCheck, CatalogEntriesPassWithDeclaredType) {
  for (const CatalogId& id : testing_support::catalog_ids()) {
    const std::string path = write_temp("catalog.json", spec_to_json_text(catalog_entry(id)));
    const RunResult r = run(check_config(path));
    EXPECT_EQ(r.exit_code, exit_pass) << testing_support::label(id) << "\n" << r.report;
    const json j = json::parse(r.report);
    EXPECT_EQ(j["verdict"], std::string(to_string(declared_type(id)))) << testing_support::label(id);
    EXPECT_TRUE(j["pass"].get<bool>());
    EXPECT_EQ(j["grid"], 64);
    EXPECT_FALSE(j["assumptions"].empty());
    std::remove(path.c_str());
  }
}

TEST(RunCheck, PerturbedWarpFails) {
  const SolitonSpec spec = testing_support::perturb_first_warp(catalog_entry({CatalogKind::type_iii, 6, 0, 0.0}), 0.01);
  const std::string path = write_temp("perturbed.json", spec_to_json_text(spec));
  const RunResult r = run(check_config(path));
  EXPECT_EQ(r.exit_code, exit_residual_failure);
  const json j = json::parse(r.report);
  EXPECT_FALSE(j["pass"].get<bool>());
  // Pure power warps keep the Weyl tensor harmonic; only the soliton
  // equation breaks.
  EXPECT_EQ(j["verdict"], "non_soliton");
  bool some_failure = false;
  for (const json& e : j["residuals"]) {
    if (e["status"] == "checked" && !e["pass"].get<bool>()) some_failure = true;
  }
  EXPECT_TRUE(some_failure);
  std::remove(path.c_str());
}

TEST(RunCheck, TextFormat) {
  const std::string path = write_temp("text.json", spec_to_json_text(catalog_entry({CatalogKind::type_iii, 7, 0, 0.0})));
  RunConfig cfg = check_config(path);
  cfg.format = Format::text;
  const RunResult r = run(cfg);
  EXPECT_EQ(r.exit_code, exit_pass);
  EXPECT_NE(r.report.find("verdict  type_iii"), std::string::npos) << r.report;
  EXPECT_NE(r.report.find("result  PASS"), std::string::npos);
  EXPECT_NE(r.report.find("soliton_"), std::string::npos);
  std::remove(path.c_str());
}

TEST(RunCheck, IsByteForByteDeterministic) {
  const std::string path = write_temp("det.json", spec_to_json_text(catalog_entry({CatalogKind::type_ii, 7, 3, -2.0})));
  EXPECT_EQ(run(check_config(path)).report, run(check_config(path)).report);
  std::remove(path.c_str());
}

TEST(RunCheck, InputErrors) {
  RunResult r = run(check_config("/nonexistent/warpsol.json"));
  EXPECT_EQ(r.exit_code, exit_usage);
  EXPECT_EQ(json::parse(r.report)["error"], "validation");

  std::string path = write_temp("broken.json", "{\"n\": 4, \"rho\": ");
  r = run(check_config(path));
  EXPECT_EQ(r.exit_code, exit_usage);
  EXPECT_EQ(json::parse(r.report)["error"], "parse");
  EXPECT_TRUE(json::parse(r.report).contains("position"));

  path = write_temp("badexpr.json",
                    R"j({"n": 4, "rho": 0, "fibers": [{"dim": 3, "k": 1}], "warps": ["sin(s)"], "potential": "0"})j");
  r = run(check_config(path));
  EXPECT_EQ(r.exit_code, exit_usage);
  EXPECT_EQ(json::parse(r.report)["position"], 0);

  path = write_temp("noform.json", bryant_spec());
  EXPECT_EQ(run(check_config(path)).exit_code, exit_usage);

  path = write_temp("grid.json", spec_to_json_text(catalog_entry({CatalogKind::type_iii, 6, 0, 0.0})));
  RunConfig cfg = check_config(path);
  cfg.grid = 1;
  EXPECT_EQ(run(cfg).exit_code, exit_usage);
  cfg.grid = 64;
  cfg.tol = -1.0;
  EXPECT_EQ(run(cfg).exit_code, exit_usage);
  std::remove(path.c_str());
}

TEST(RunCatalog, EmitsLoadableSpec) {
  RunConfig cfg;
  cfg.command = Command::catalog;
  cfg.catalog_id = "type_ii";
  cfg.n = 7;
  cfg.r = 3;
  cfg.rho = -2.0;
  const RunResult r = run(cfg);
  ASSERT_EQ(r.exit_code, exit_pass);
  EXPECT_EQ(r.report, spec_to_json_text(catalog_entry({CatalogKind::type_ii, 7, 3, -2.0})));
  EXPECT_EQ(spec_from_json_text(r.report).spec.n, 7);
}

TEST(RunCatalog, RejectsTypeIiiInDimensionFive) {
  RunConfig cfg;
  cfg.command = Command::catalog;
  cfg.catalog_id = "type_iii";
  cfg.n = 5;
  const RunResult r = run(cfg);
  EXPECT_EQ(r.exit_code, exit_usage);
  EXPECT_NE(json::parse(r.report)["message"].get<std::string>().find("n≠5"), std::string::npos);
  cfg.catalog_id = "bryant";
  EXPECT_EQ(run(cfg).exit_code, exit_usage);
}

TEST(RunIntegrate, BryantPasses) {
  const std::string path = write_temp("bryant.json", bryant_spec());
  RunConfig cfg = integrate_config(path, 10.0);
  const RunResult r = run(cfg);
  ASSERT_EQ(r.exit_code, exit_pass) << r.report;
  const json j = json::parse(r.report);
  EXPECT_EQ(j["method"], "dopri5");
  EXPECT_EQ(j["samples"], 201);
  EXPECT_EQ(j["verdict"], "type_iv_D_flat");
  EXPECT_EQ(j["residuals"][0]["name"], "hamilton_energy_drift");
  EXPECT_TRUE(j["residuals"][0]["pass"].get<bool>());
  std::istringstream csv(r.csv);
  std::string line;
  int lines = 0;
  while (std::getline(csv, line)) ++lines;
  EXPECT_EQ(lines, 202);
  EXPECT_EQ(r.csv.substr(0, r.csv.find('\n')), "s,h_1,w_1,f,fprime,R,C0,res_cotton_max");
  EXPECT_EQ(run(cfg).csv, r.csv);

  cfg.fixed_step = 1e-3;
  const RunResult rk = run(cfg);
  EXPECT_EQ(rk.exit_code, exit_pass);
  EXPECT_EQ(json::parse(rk.report)["method"], "rk4");
  std::remove(path.c_str());
}

TEST(RunIntegrate, SingularityIsNumericFailure) {
  const std::string path = write_temp("singular.json", singular_spec());
  const RunResult r = run(integrate_config(path, 2.0));
  EXPECT_EQ(r.exit_code, exit_numeric);
  const json j = json::parse(r.report);
  EXPECT_EQ(j["error"], "numeric");
  EXPECT_GT(j["last_valid_s"].get<double>(), 1.3);
  EXPECT_LT(j["last_valid_s"].get<double>(), 1.4);
  std::remove(path.c_str());
}

TEST(RunIntegrate, UsageErrors) {
  const std::string path = write_temp("usage.json", bryant_spec());
  RunConfig cfg = integrate_config(path, 10.0);
  cfg.s1.reset();
  EXPECT_EQ(run(cfg).exit_code, exit_usage);
  cfg = integrate_config(path, 10.0);
  cfg.points = 1;
  EXPECT_EQ(run(cfg).exit_code, exit_usage);
  cfg = integrate_config(path, 0.1);
  EXPECT_EQ(run(cfg).exit_code, exit_usage);
  const std::string closed = write_temp("closed.json", spec_to_json_text(catalog_entry({CatalogKind::type_iii, 6, 0, 0.0})));
  EXPECT_EQ(run(integrate_config(closed, 2.0)).exit_code, exit_usage);
  std::remove(path.c_str());
  std::remove(closed.c_str());
}

TEST(RunObstruction, SmallSearchFindsNothing) {
  RunConfig cfg;
  cfg.command = Command::obstruction;
  cfg.n = 6;
  cfg.rho = 1.0;
  cfg.samples = 2000;
  const RunResult r = run(cfg);
  EXPECT_EQ(r.exit_code, exit_pass);
  const json j = json::parse(r.report);
  EXPECT_EQ(j["samples"], 2000);
  EXPECT_EQ(j["feasible_count"], 0);
  EXPECT_EQ(j["seed"], 42);
  EXPECT_TRUE(j["pass"].get<bool>());
  EXPECT_EQ(run(cfg).report, r.report);

  cfg.samples = 0;
  EXPECT_EQ(run(cfg).exit_code, exit_usage);
}
