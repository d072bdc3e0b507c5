#include "warpsol/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "json.hpp"

#include "warpsol/errors.hpp"

namespace warpsol {

using nlohmann::json;

namespace {

json number_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

json residual_json(const Residual& r) {
  json j;
  j["name"] = r.name;
  j["status"] = std::string(to_string(r.status));
  j["s"] = number_or_null(r.s);
  if (r.status != ResidualStatus::skipped) j["value"] = number_or_null(r.value);
  if (r.status == ResidualStatus::checked) {
    j["tolerance"] = r.tolerance;
    j["pass"] = r.pass;
  }
  if (!r.note.empty()) j["note"] = r.note;
  return j;
}

std::string g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string residual_text(const Residual& r) {
  std::string line = r.name + "  ";
  switch (r.status) {
    case ResidualStatus::checked:
      line += g17(r.value) + "  tol " + g17(r.tolerance) + "  " + (r.pass ? "PASS" : "FAIL");
      break;
    case ResidualStatus::info: line += g17(r.value) + "  info"; break;
    case ResidualStatus::skipped: line += "skipped"; break;
  }
  if (std::isfinite(r.s)) line += "  at s=" + g17(r.s);
  if (!r.note.empty()) line += "  (" + r.note + ")";
  return line + "\n";
}

json residuals_json(const std::vector<Residual>& rs) {
  json arr = json::array();
  for (const Residual& r : rs) arr.push_back(residual_json(r));
  return arr;
}

const char* kFiberCottonAssumption =
    "Cotton components with all three indices tangent to the fibers are taken to vanish by frame symmetry; not verified";

}  // namespace

void validate(const RunConfig& cfg) {
  if (cfg.grid < 2) throw ValidationError("grid must have at least 2 points");
  if (cfg.tol && !(*cfg.tol > 0.0)) throw ValidationError("tolerance must be positive");
  if (!(cfg.check_tol > 0.0)) throw ValidationError("check tolerance must be positive");
}

RunResult check_spec(const SolitonSpec& raw, const RunConfig& cfg, const std::string& source) {
  validate(cfg);
  const SolitonSpec spec = build_metric(raw);
  const double tol = cfg.tol.value_or(1e-9);
  const std::vector<double> grid = uniform_grid(spec.domain, cfg.grid);
  const std::vector<FrameState> frames = spec_frames(spec, grid);

  const ResidualTable table = residual_table(frames, tol);
  const HarmonicCurvature hc = harmonic_curvature_check(frames, tol);
  std::optional<Classification> cls;
  if (frames.size() >= 16) cls = classify(frames, tol);
  const Residual* bach = table.find("bach_flat");

  RunResult res;
  res.exit_code = table.all_pass() ? exit_pass : exit_residual_failure;

  if (cfg.format == Format::text) {
    std::string out = "check " + source + "  n=" + std::to_string(spec.n) + " rho=" + g17(spec.rho) +
                      " grid=" + std::to_string(cfg.grid) + " tol=" + g17(tol) + "\n";
    for (const Residual& r : table.entries()) out += residual_text(r);
    out += "harmonic_curvature  " + std::string(hc.pass ? "holds" : "does not hold") + "\n";
    out += "verdict  " + (cls ? cls->verdict() : std::string("unclassified (grid < 16)")) + "\n";
    if (cls) {
      for (const auto& [name, value] : cls->predicates) out += "  " + name + "  " + (value ? "true" : "false") + "\n";
    }
    out += std::string("assumption  ") + kFiberCottonAssumption + "\n";
    out += std::string("result  ") + (res.exit_code == exit_pass ? "PASS" : "FAIL") + "\n";
    res.report = out;
    return res;
  }

  json j;
  j["command"] = "check";
  j["input"] = source;
  j["n"] = spec.n;
  j["rho"] = spec.rho;
  j["grid"] = cfg.grid;
  j["tol"] = tol;
  j["residuals"] = residuals_json(table.entries());
  j["verdict"] = cls ? cls->verdict() : std::string("unclassified");
  j["predicates"] = json::object();
  if (cls) {
    for (const auto& [name, value] : cls->predicates) j["predicates"][name] = value;
  }
  j["harmonic_curvature"] = {{"holds", hc.pass}, {"max_R_prime", hc.max_R_prime}, {"max_cotton", hc.max_cotton}};
  j["bach"] = {{"computed", bach && bach->status != ResidualStatus::skipped},
               {"certificate", bach ? bach->note : std::string()}};
  j["assumptions"] = json::array({kFiberCottonAssumption});
  j["pass"] = res.exit_code == exit_pass;
  res.report = j.dump(2) + "\n";
  return res;
}

RunResult run_check(const RunConfig& cfg) {
  const SpecDocument doc = load_spec_file(cfg.input);
  if (!doc.has_closed_form) throw ValidationError("check needs 'warps' and 'potential' in the spec file");
  return check_spec(doc.spec, cfg, cfg.input);
}

RunResult run_catalog(const RunConfig& cfg) {
  CatalogId id;
  id.kind = catalog_kind_from_string(cfg.catalog_id);
  id.n = cfg.n;
  id.r = cfg.r;
  id.rho = cfg.rho;
  RunResult res;
  res.report = spec_to_json_text(catalog_entry(id));
  return res;
}

RunResult run_integrate(const RunConfig& cfg) {
  validate(cfg);
  const SpecDocument doc = load_spec_file(cfg.input);
  if (!doc.initial) throw ValidationError("integrate needs an 'initial' block {s0, h, w, f, fprime}");
  const InitialData& init = *doc.initial;

  SolitonODEParams params{doc.spec.n, doc.spec.rho, doc.spec.fibers};
  validate(params);
  const std::optional<double> s0 = cfg.s0 ? cfg.s0 : init.s0;
  if (!s0) throw ValidationError("start point missing: pass --s0 or set initial.s0");
  if (!cfg.s1) throw ValidationError("end point missing: pass --s1");

  TrajectoryState start;
  start.s = *s0;
  start.h = init.h;
  start.w = init.w;
  start.f = init.f;
  start.v = init.fprime;

  IntegrateOptions opts;
  opts.tol = cfg.tol.value_or(1e-10);
  opts.samples = cfg.points;
  if (cfg.fixed_step) {
    opts.fixed_step = true;
    opts.step = *cfg.fixed_step;
  }
  const Trajectory traj = integrate(start, params, *cfg.s1, opts);
  const DriftMetrics m = monitor(traj);

  std::vector<Residual> entries;
  entries.push_back(make_residual("hamilton_energy_drift", m.C0_drift, cfg.check_tol * (1.0 + std::fabs(m.C0_initial)),
                                  traj.samples.front().s));
  entries.back().note = "max |C0(s) - C0(s0)|";
  entries.push_back(make_residual("hamilton_grad", m.hamilton_grad_jet, cfg.check_tol));
  entries.push_back(make_info("hamilton_grad_fd", m.hamilton_grad_fd));
  entries.push_back(make_info("soliton_fd", m.soliton_fd));
  entries.push_back(make_info("cotton_max", m.cotton_max));
  entries.push_back(make_info("intcond_3_11_max", m.intcond_3_11_max));

  RunResult res;
  res.exit_code = exit_pass;
  for (const Residual& r : entries) {
    if (r.status == ResidualStatus::checked && !r.pass) res.exit_code = exit_residual_failure;
  }

  json j;
  j["command"] = "integrate";
  j["input"] = cfg.input;
  j["s0"] = traj.samples.front().s;
  j["s1"] = traj.samples.back().s;
  j["tol"] = opts.tol;
  j["method"] = opts.fixed_step ? "rk4" : "dopri5";
  j["samples"] = traj.samples.size();
  j["C0_initial"] = m.C0_initial;
  j["residuals"] = residuals_json(entries);
  j["stats"] = {{"steps", traj.stats.steps},
                {"rejections", traj.stats.rejections},
                {"max_error_estimate", traj.stats.max_error_estimate}};
  if (traj.samples.size() >= 16) j["verdict"] = classify_trajectory(traj, cfg.check_tol).verdict();
  j["pass"] = res.exit_code == exit_pass;
  res.report = j.dump(2) + "\n";
  res.csv = trajectory_csv(traj);
  return res;
}

RunResult run_obstruction(const RunConfig& cfg) {
  if (cfg.samples < 1) throw ValidationError("samples must be at least 1");
  const ObstructionResult r = three_eigen_obstruction(cfg.n, cfg.rho, cfg.samples, cfg.seed);
  RunResult res;
  res.exit_code = r.tally.feasible == 0 ? exit_pass : exit_residual_failure;
  json j;
  j["command"] = "obstruction";
  j["n"] = r.n;
  j["rho"] = r.rho;
  j["seed"] = r.seed;
  j["samples"] = r.tally.samples;
  j["feasible_count"] = r.tally.feasible;
  j["rejected_degenerate"] = r.tally.rejected;
  j["worst_margin"] = number_or_null(r.tally.worst_margin);
  j["max_sum_identity_residual"] = r.tally.max_sum_identity;
  j["pass"] = res.exit_code == exit_pass;
  res.report = j.dump(2) + "\n";
  return res;
}

RunResult run(const RunConfig& cfg) {
  auto failure = [](int code, const char* kind, const std::string& msg, json extra = json::object()) {
    json j = std::move(extra);
    j["error"] = kind;
    j["message"] = msg;
    RunResult r;
    r.exit_code = code;
    r.report = j.dump(2) + "\n";
    return r;
  };
  try {
    switch (cfg.command) {
      case Command::check: return run_check(cfg);
      case Command::catalog: return run_catalog(cfg);
      case Command::integrate: return run_integrate(cfg);
      case Command::obstruction: return run_obstruction(cfg);
    }
    return failure(exit_usage, "usage", "unknown command");
  } catch (const ParseError& e) {
    return failure(exit_usage, "parse", e.what(), {{"position", e.position()}});
  } catch (const ValidationError& e) {
    return failure(exit_usage, "validation", e.what());
  } catch (const NumericError& e) {
    return failure(exit_numeric, "numeric", e.what(), {{"last_valid_s", number_or_null(e.last_valid_s())}});
  } catch (const DomainError& e) {
    return failure(exit_numeric, "domain", e.what());
  }
}

}  // namespace warpsol
