#include "warpsol/curvature.hpp"

#include <cmath>
#include <string>

namespace warpsol {

Jet3 FiberFrame::einstein_term() const {
  if (dim <= 1 || k == 0.0) return Jet3{};
  return ((dim - 1) * k) * reciprocal(h * h);
}

FrameState make_frame_state(double s, int n, double rho, std::vector<FiberFrame> fibers, Jet3 f, Jet3 fp) {
  FrameState st;
  st.s = s;
  st.n = n;
  st.rho = rho;
  st.f = f;
  st.fp = fp;
  for (const FiberFrame& fiber : fibers) {
    st.S1 = st.S1 + static_cast<double>(fiber.dim) * fiber.xi;
    st.S2 = st.S2 + static_cast<double>(fiber.dim) * (fiber.xi * fiber.xi);
  }
  st.fibers = std::move(fibers);
  return st;
}

namespace {

// Derivative expressions are rebuilt on every call; specs are tiny so this
// is cheaper than caching them in the spec.
struct WarpJets {
  Jet3 h, xi, curv;
};

WarpJets warp_jets(const Expr& h_expr, double s) {
  const Expr dh = derivative(h_expr);
  const Expr d2h = derivative(dh);
  const Jet3 h = jet_eval(h_expr, s);
  if (!(h.v > 0.0)) throw ValidationError("warp is not positive at s = " + std::to_string(s));
  const Jet3 inv = reciprocal(h);
  return {h, jet_eval(dh, s) * inv, jet_eval(d2h, s) * inv};
}

}  // namespace

FrameState connection_state(const SolitonSpec& spec, double s) {
  const double slack = 1e-12 * (1.0 + std::fabs(spec.domain.hi));
  if (!(s >= spec.domain.lo - slack && s <= spec.domain.hi + slack)) {
    throw ValidationError("s = " + std::to_string(s) + " is outside the domain");
  }
  if (spec.warps.size() != spec.fibers.size()) throw ValidationError("expected one warp per fiber");
  std::vector<FiberFrame> fibers;
  fibers.reserve(spec.fibers.size());
  for (std::size_t j = 0; j < spec.fibers.size(); ++j) {
    const FiberSpec& fs = spec.fibers[j];
    const WarpJets w = warp_jets(spec.warps[j].expr, s);
    fibers.push_back({fs.dim, fs.k, fs.space_form, w.h, w.xi, w.curv});
  }
  const Jet3 f = jet_eval(spec.potential.expr, s);
  const Jet3 fp = jet_eval(derivative(spec.potential.expr), s);
  return make_frame_state(s, spec.n, spec.rho, std::move(fibers), f, fp);
}

const Jet3& RiemannBlocks::intra(std::size_t j) const {
  if (!intra_[j]) {
    throw ValidationError("intra-fiber Riemann block of fiber " + std::to_string(j + 1) +
                          " is not determined (fiber is not a space form or is 1-dimensional)");
  }
  return *intra_[j];
}

RiemannBlocks riemann_components(const FrameState& st) {
  RiemannBlocks b;
  const std::size_t m = st.fibers.size();
  b.m_ = m;
  b.radial_.resize(m);
  b.cross_.resize(m * m);
  b.intra_.resize(m);
  for (std::size_t j = 0; j < m; ++j) {
    const FiberFrame& fj = st.fibers[j];
    b.radial_[j] = -fj.curv;
    for (std::size_t l = 0; l < m; ++l) {
      if (l != j) b.cross_[j * m + l] = -(fj.xi * st.fibers[l].xi);
    }
    if (fj.space_form && fj.dim >= 2) {
      b.intra_[j] = fj.k * reciprocal(fj.h * fj.h) - fj.xi * fj.xi;
    }
  }
  return b;
}

RicciSpectrum ricci_spectrum(const FrameState& st) {
  RicciSpectrum sp;
  for (const FiberFrame& fiber : st.fibers) {
    sp.lambda1 = sp.lambda1 - static_cast<double>(fiber.dim) * fiber.curv;
    // -xi' - xi S1 + (r-1)k/h^2 with xi' = curv - xi^2
    sp.lambda.push_back(fiber.xi * fiber.xi - fiber.curv - fiber.xi * st.S1 + fiber.einstein_term());
    sp.multiplicity.push_back(fiber.dim);
  }
  return sp;
}

Jet3 scalar_curvature(const RicciSpectrum& spectrum) {
  Jet3 R = spectrum.lambda1;
  for (std::size_t j = 0; j < spectrum.lambda.size(); ++j) {
    R = R + static_cast<double>(spectrum.multiplicity[j]) * spectrum.lambda[j];
  }
  return R;
}

Jet3 scalar_curvature(const FrameState& st) { return scalar_curvature(ricci_spectrum(st)); }

namespace {

SchoutenEinstein schouten_from(const FrameState& st, const RicciSpectrum& sp, double R) {
  SchoutenEinstein se;
  const double shift = R / (2.0 * (st.n - 1));
  se.A11 = sp.lambda1.v - shift;
  se.E11 = sp.lambda1.v - R / 2.0;
  for (const Jet3& l : sp.lambda) {
    se.A.push_back(l.v - shift);
    se.E.push_back(l.v - R / 2.0);
  }
  return se;
}

WeylBlocks weyl_from(const FrameState& st, const RicciSpectrum& sp, const SchoutenEinstein& se,
                     const RiemannBlocks& rm) {
  const std::size_t m = st.fibers.size();
  const double nm2 = st.n - 2.0;
  WeylBlocks w;
  w.radial.resize(m);
  w.cross.assign(m, std::vector<double>(m, 0.0));
  w.intra.assign(m, 0.0);
  w.intra_determined.assign(m, true);
  for (std::size_t j = 0; j < m; ++j) {
    w.radial[j] = rm.radial(j).v - (se.A11 + se.A[j]) / nm2;
    for (std::size_t l = 0; l < m; ++l) {
      if (l != j) w.cross[j][l] = rm.cross(j, l).v - (se.A[j] + se.A[l]) / nm2;
    }
    const FiberFrame& fiber = st.fibers[j];
    if (fiber.dim < 2) continue;
    double sectional = 0.0;
    if (rm.has_intra(j)) {
      sectional = rm.intra(j).v;
    } else {
      // Mean of R_{abab} over b from the Ricci trace of fiber j.
      double rest = sp.lambda[j].v - rm.radial(j).v;
      for (std::size_t l = 0; l < m; ++l) {
        if (l != j) rest -= st.fibers[l].dim * rm.cross(j, l).v;
      }
      sectional = rest / (fiber.dim - 1);
      w.intra_determined[j] = false;
    }
    w.intra[j] = sectional - 2.0 * se.A[j] / nm2;
  }
  return w;
}

std::vector<double> cotton_from(const FrameState& st, const RicciSpectrum& sp, const Jet3& R) {
  std::vector<double> c;
  const double radial = R.d1 / (2.0 * (st.n - 1));
  for (std::size_t j = 0; j < st.fibers.size(); ++j) {
    c.push_back(sp.lambda[j].d1 - (sp.lambda1.v - sp.lambda[j].v) * st.fibers[j].xi.v - radial);
  }
  return c;
}

std::vector<double> d_from(const FrameState& st, const SchoutenEinstein& se) {
  const double nm1 = st.n - 1.0;
  const double nm2 = st.n - 2.0;
  std::vector<double> d;
  for (double a : se.A) d.push_back(-st.fp.v * (a / nm2 + se.E11 / (nm1 * nm2)));
  return d;
}

}  // namespace

bool WeylBlocks::all_determined() const {
  for (bool b : intra_determined) {
    if (!b) return false;
  }
  return true;
}

SchoutenEinstein schouten_einstein(const FrameState& st) {
  const RicciSpectrum sp = ricci_spectrum(st);
  return schouten_from(st, sp, scalar_curvature(sp).v);
}

WeylBlocks weyl_components_trace(const FrameState& st) {
  const RicciSpectrum sp = ricci_spectrum(st);
  const SchoutenEinstein se = schouten_from(st, sp, scalar_curvature(sp).v);
  return weyl_from(st, sp, se, riemann_components(st));
}

WeylBlocks weyl_components(const FrameState& st) {
  for (std::size_t j = 0; j < st.fibers.size(); ++j) {
    if (!st.fibers[j].space_form) {
      throw ValidationError("Weyl components need space-form fibers; fiber " + std::to_string(j + 1) + " is not");
    }
  }
  return weyl_components_trace(st);
}

std::vector<double> cotton_radial(const FrameState& st) {
  const RicciSpectrum sp = ricci_spectrum(st);
  return cotton_from(st, sp, scalar_curvature(sp));
}

std::vector<double> d_components(const FrameState& st) {
  const RicciSpectrum sp = ricci_spectrum(st);
  return d_from(st, schouten_from(st, sp, scalar_curvature(sp).v));
}

CurvatureReport curvature_report(const FrameState& st) {
  CurvatureReport rep;
  rep.s = st.s;
  rep.spectrum = ricci_spectrum(st);
  rep.R = scalar_curvature(rep.spectrum);
  rep.schouten = schouten_from(st, rep.spectrum, rep.R.v);
  rep.riemann = riemann_components(st);
  rep.weyl = weyl_from(st, rep.spectrum, rep.schouten, rep.riemann);
  rep.cotton = cotton_from(st, rep.spectrum, rep.R);
  rep.d_tensor = d_from(st, rep.schouten);
  return rep;
}

}  // namespace warpsol
