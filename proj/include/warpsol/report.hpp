#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "warpsol/analysis.hpp"

namespace warpsol {

enum class Command { check, catalog, integrate, obstruction };
enum class Format { json, csv, text };

struct RunConfig {
  Command command = Command::check;
  std::string input;       ///< spec path (check, integrate)
  std::string catalog_id;  ///< catalog kind name (catalog)
  int grid = 64;
  std::optional<double> tol;  ///< default 1e-9 for check, 1e-10 for integrate
  std::string out;
  Format format = Format::json;
  std::uint64_t seed = 42;

  // catalog / obstruction parameters
  int n = 6;
  int r = 2;
  double rho = 0.0;
  std::uint64_t samples = 100000;

  // integrate
  std::optional<double> s0;
  std::optional<double> s1;
  int points = 201;                  ///< output grid size
  std::optional<double> fixed_step;  ///< classical RK4 with this step
  double check_tol = 1e-6;           ///< acceptance tolerance for trajectory residuals
};

/// Throws ValidationError unless grid >= 2 and tolerances are positive.
void validate(const RunConfig& cfg);

enum ExitCode : int { exit_pass = 0, exit_residual_failure = 1, exit_usage = 2, exit_numeric = 3 };

struct RunResult {
  int exit_code = exit_pass;
  std::string report;  ///< JSON or text report
  std::string csv;     ///< trajectory CSV (integrate only)
};

RunResult run_check(const RunConfig& cfg);
RunResult run_catalog(const RunConfig& cfg);
RunResult run_integrate(const RunConfig& cfg);
RunResult run_obstruction(const RunConfig& cfg);

/// Dispatches on cfg.command and turns exceptions into exit codes with a
/// JSON error report: parse/validation errors -> 2, domain and numeric
/// failures -> 3.
RunResult run(const RunConfig& cfg);

/// Check report for an already-built spec (used by the bindings).
RunResult check_spec(const SolitonSpec& spec, const RunConfig& cfg, const std::string& source);

}  // namespace warpsol
