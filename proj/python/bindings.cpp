#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <array>
#include <optional>
#include <string>

#include "warpsol/analysis.hpp"
#include "warpsol/errors.hpp"
#include "warpsol/report.hpp"

namespace py = pybind11;
using namespace warpsol;

namespace {

py::dict drift_dict(const DriftMetrics& m) {
  py::dict d;
  d["C0_initial"] = m.C0_initial;
  d["C0_drift"] = m.C0_drift;
  d["hamilton_grad_fd"] = m.hamilton_grad_fd;
  d["hamilton_grad_jet"] = m.hamilton_grad_jet;
  d["cotton_max"] = m.cotton_max;
  d["intcond_3_11_max"] = m.intcond_3_11_max;
  d["soliton_fd"] = m.soliton_fd;
  return d;
}

py::dict integrate_spec(const std::string& spec_json, double s1, std::optional<double> s0, double tol, int points,
                        std::optional<double> fixed_step) {
  const SpecDocument doc = spec_from_json_text(spec_json);
  if (!doc.initial) throw ValidationError("integrate needs an 'initial' block {s0, h, w, f, fprime}");
  const SolitonODEParams params{doc.spec.n, doc.spec.rho, doc.spec.fibers};
  const InitialData& init = *doc.initial;
  const std::optional<double> start = s0 ? s0 : init.s0;
  if (!start) throw ValidationError("start point missing: pass s0 or set initial.s0");

  IntegrateOptions opts;
  opts.tol = tol;
  opts.samples = points;
  if (fixed_step) {
    opts.fixed_step = true;
    opts.step = *fixed_step;
  }
  Trajectory traj;
  {
    py::gil_scoped_release release;
    traj = integrate({*start, init.h, init.w, init.f, init.fprime}, params, s1, opts);
  }
  const std::size_t m = params.fibers.size();
  std::vector<double> s, f, v, R, C0;
  std::vector<std::vector<double>> h(m), w(m);
  for (std::size_t i = 0; i < traj.samples.size(); ++i) {
    const TrajectoryState& st = traj.samples[i];
    s.push_back(st.s);
    f.push_back(st.f);
    v.push_back(st.v);
    R.push_back(traj.diagnostics[i].R);
    C0.push_back(traj.diagnostics[i].C0);
    for (std::size_t j = 0; j < m; ++j) {
      h[j].push_back(st.h[j]);
      w[j].push_back(st.w[j]);
    }
  }
  py::dict out;
  out["s"] = s;
  out["h"] = h;
  out["w"] = w;
  out["f"] = f;
  out["fprime"] = v;
  out["R"] = R;
  out["C0"] = C0;
  out["drift"] = drift_dict(monitor(traj));
  out["steps"] = traj.stats.steps;
  out["rejections"] = traj.stats.rejections;
  if (traj.samples.size() >= 16) out["verdict"] = classify_trajectory(traj).verdict();
  out["csv"] = trajectory_csv(traj);
  return out;
}

void raise_with(const py::object& type, const char* what, const char* attr, py::object value) {
  py::object inst = type(what);
  inst.attr(attr) = std::move(value);
  PyErr_SetObject(type.ptr(), inst.ptr());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Curvature and soliton verification for multiply warped product metrics";

  PYBIND11_CONSTINIT static py::gil_safe_call_once_and_store<std::array<py::object, 4>> errors;
  errors.call_once_and_store_result([&m] {
    return std::array<py::object, 4>{
        py::exception<ParseError>(m, "ParseError", PyExc_ValueError),
        py::exception<ValidationError>(m, "ValidationError", PyExc_ValueError),
        py::exception<NumericError>(m, "NumericError", PyExc_ArithmeticError),
        py::exception<DomainError>(m, "DomainError", PyExc_ArithmeticError),
    };
  });
  py::register_exception_translator([](std::exception_ptr p) {
    const auto& types = errors.get_stored();
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ParseError& e) {
      raise_with(types[0], e.what(), "position", py::int_(e.position()));
    } catch (const ValidationError& e) {
      PyErr_SetString(types[1].ptr(), e.what());
    } catch (const NumericError& e) {
      raise_with(types[2], e.what(), "last_valid_s", py::float_(e.last_valid_s()));
    } catch (const DomainError& e) {
      PyErr_SetString(types[3].ptr(), e.what());
    }
  });

  m.def(
      "jet",
      [](const std::string& text, double s) {
        const Jet3 j = jet_eval(parse_expr(text), s);
        return py::make_tuple(j.v, j.d1, j.d2, j.d3);
      },
      py::arg("expr"), py::arg("s"), "Value and first three s-derivatives of an expression.");

  m.def(
      "derivative", [](const std::string& text) { return unparse(derivative(parse_expr(text))); }, py::arg("expr"),
      "Symbolic s-derivative, as expression text.");

  m.def(
      "catalog",
      [](const std::string& kind, int n, int r, double rho) {
        return spec_to_json_text(catalog_entry({catalog_kind_from_string(kind), n, r, rho}));
      },
      py::arg("kind"), py::arg("n") = 6, py::arg("r") = 2, py::arg("rho") = 0.0, "Catalog spec as JSON text.");

  m.def(
      "check",
      [](const std::string& spec_json, int grid, double tol) {
        const SpecDocument doc = spec_from_json_text(spec_json);
        if (!doc.has_closed_form) throw ValidationError("check needs 'warps' and 'potential'");
        RunConfig cfg;
        cfg.grid = grid;
        cfg.tol = tol;
        validate(cfg);
        const RunResult r = check_spec(doc.spec, cfg, "<python>");
        return py::make_tuple(r.exit_code, r.report);
      },
      py::arg("spec_json"), py::arg("grid") = 64, py::arg("tol") = 1e-9,
      "Residual check; returns (exit_code, JSON report).");

  m.def(
      "classify",
      [](const std::string& spec_json, int grid, double tol) {
        const SpecDocument doc = spec_from_json_text(spec_json);
        if (!doc.has_closed_form) throw ValidationError("classify needs 'warps' and 'potential'");
        const Classification c = classify_entry(doc.spec, uniform_grid(doc.spec.domain, grid), tol);
        return py::make_tuple(c.verdict(), c.predicates);
      },
      py::arg("spec_json"), py::arg("grid") = 64, py::arg("tol") = 1e-9, "Returns (verdict, predicates).");

  m.def("integrate", &integrate_spec, py::arg("spec_json"), py::arg("s1"), py::arg("s0") = py::none(),
        py::arg("tol") = 1e-10, py::arg("points") = 201, py::arg("fixed_step") = py::none(),
        "Integrates the soliton ODE from the spec's initial block.");

  m.def(
      "obstruction",
      [](int n, double rho, std::uint64_t samples, std::uint64_t seed) {
        ObstructionResult r;
        {
          py::gil_scoped_release release;
          r = three_eigen_obstruction(n, rho, samples, seed);
        }
        py::dict d;
        d["n"] = r.n;
        d["rho"] = r.rho;
        d["seed"] = r.seed;
        d["samples"] = r.tally.samples;
        d["feasible_count"] = r.tally.feasible;
        d["rejected_degenerate"] = r.tally.rejected;
        d["worst_margin"] = r.tally.worst_margin;
        d["max_sum_identity_residual"] = r.tally.max_sum_identity;
        return d;
      },
      py::arg("n"), py::arg("rho"), py::arg("samples") = 100000, py::arg("seed") = 42,
      "Seeded search for three-eigenvalue configurations.");
}
