// Command-line front end: check, catalog, integrate, obstruction.

#include <cstdio>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "warpsol/report.hpp"

namespace {

bool write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  return static_cast<bool>(out);
}

}  // namespace

int main(int argc, char** argv) {
  using warpsol::Command;
  using warpsol::Format;

  warpsol::RunConfig cfg;
  CLI::App app{"Verification engine for gradient Ricci solitons on multiply warped products"};
  app.require_subcommand(1);

  std::string format = "json";
  double tol = 0.0;

  auto* check = app.add_subcommand("check", "Evaluate all residuals of a closed-form spec on a grid");
  check->add_option("spec", cfg.input, "Spec JSON file")->required();
  check->add_option("--grid", cfg.grid, "Number of grid points")->check(CLI::Range(2, 1 << 20));
  check->add_option("--tol", tol, "Residual tolerance (default 1e-9)");
  check->add_option("--format", format, "Report format")->check(CLI::IsMember({"json", "text"}));
  check->add_option("--out", cfg.out, "Write the report to this path");

  auto* catalog = app.add_subcommand("catalog", "Emit a catalog spec");
  catalog->add_option("id", cfg.catalog_id, "gaussian | einstein_product | type_ii | type_iii | round_cone")->required();
  catalog->add_option("--n", cfg.n, "Dimension");
  catalog->add_option("--r", cfg.r, "Euclidean factor rank (type_ii)");
  catalog->add_option("--rho", cfg.rho, "Soliton constant");
  catalog->add_option("--out", cfg.out, "Write the spec to this path");

  double s0 = 0.0, s1 = 0.0, fixed = 0.0;
  auto* integ = app.add_subcommand("integrate", "Integrate the soliton ODE from the spec's initial data");
  integ->add_option("spec", cfg.input, "Spec JSON file with an 'initial' block")->required();
  auto* s0_opt = integ->add_option("--s0", s0, "Start of the range");
  integ->add_option("--s1", s1, "End of the range")->required();
  integ->add_option("--tol", tol, "Integrator tolerance (default 1e-10)");
  integ->add_option("--grid", cfg.points, "Number of output samples")->check(CLI::Range(2, 1 << 24));
  auto* fixed_opt = integ->add_option("--fixed-step", fixed, "Use classical RK4 with this step");
  integ->add_option("--check-tol", cfg.check_tol, "Acceptance tolerance for trajectory residuals");
  integ->add_option("--out", cfg.out, "Write the CSV to this path (summary goes to stdout)");

  auto* obst = app.add_subcommand("obstruction", "Randomized search for three-eigenvalue counterexamples");
  obst->add_option("--n", cfg.n, "Dimension")->required();
  obst->add_option("--rho", cfg.rho, "Soliton constant")->required();
  obst->add_option("--samples", cfg.samples, "Number of samples")->required();
  obst->add_option("--seed", cfg.seed, "RNG seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : warpsol::exit_usage;
  }

  if (app.got_subcommand(check)) {
    cfg.command = Command::check;
    cfg.format = format == "text" ? Format::text : Format::json;
  } else if (app.got_subcommand(catalog)) {
    cfg.command = Command::catalog;
  } else if (app.got_subcommand(integ)) {
    cfg.command = Command::integrate;
    if (s0_opt->count() > 0) cfg.s0 = s0;
    cfg.s1 = s1;
    if (fixed_opt->count() > 0) cfg.fixed_step = fixed;
  } else {
    cfg.command = Command::obstruction;
  }
  for (auto* sub : {check, integ}) {
    if (app.got_subcommand(sub) && sub->get_option("--tol")->count() > 0) cfg.tol = tol;
  }

  const warpsol::RunResult res = warpsol::run(cfg);

  if (cfg.command == Command::integrate && !res.csv.empty()) {
    if (cfg.out.empty()) {
      std::cout << res.csv;
      std::cerr << res.report;
    } else {
      if (!write_file(cfg.out, res.csv)) {
        std::cerr << "cannot write " << cfg.out << "\n";
        return warpsol::exit_usage;
      }
      std::cout << res.report;
    }
    return res.exit_code;
  }

  const bool failed = res.exit_code == warpsol::exit_usage || res.exit_code == warpsol::exit_numeric;
  if (!cfg.out.empty() && !failed) {
    if (!write_file(cfg.out, res.report)) {
      std::cerr << "cannot write " << cfg.out << "\n";
      return warpsol::exit_usage;
    }
  } else {
    (failed ? std::cerr : std::cout) << res.report;
  }
  return res.exit_code;
}
