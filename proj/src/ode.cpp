#include "warpsol/ode.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <string>

namespace warpsol {

void validate(const SolitonODEParams& p) {
  if (p.n < 4) throw ValidationError("dimension n must be at least 4");
  if (p.fibers.empty()) throw ValidationError("at least one fiber is required");
  int total = 1;
  for (const FiberSpec& f : p.fibers) {
    if (f.dim < 1) throw ValidationError("fiber dim must be >= 1");
    if (f.dim == 1 && f.k != 0.0) throw ValidationError("1-dimensional fibers must have k = 0");
    total += f.dim;
  }
  if (total != p.n) {
    throw ValidationError("dimension mismatch: 1 + sum of fiber dims = " + std::to_string(total) +
                          " but n = " + std::to_string(p.n));
  }
}

namespace {

inline double inverse(double x) { return 1.0 / x; }
inline Jet3 inverse(const Jet3& x) { return reciprocal(x); }

// Packed state y = [h_1..h_m, w_1..w_m, f, v].
template <typename T>
void rhs_packed(const std::vector<T>& y, std::vector<T>& dy, const SolitonODEParams& p, std::vector<T>* xi_prime) {
  const std::size_t m = p.fibers.size();
  dy.assign(y.size(), T{});
  std::vector<T> xi(m), inv_h(m);
  T S1{};
  for (std::size_t j = 0; j < m; ++j) {
    inv_h[j] = inverse(y[j]);
    xi[j] = y[m + j] * inv_h[j];
    S1 = S1 + static_cast<double>(p.fibers[j].dim) * xi[j];
  }
  const T& v = y[2 * m + 1];
  T ddf = T{} + p.rho;
  for (std::size_t j = 0; j < m; ++j) {
    const FiberSpec& fiber = p.fibers[j];
    T xp = v * xi[j] - p.rho - xi[j] * S1;
    if (fiber.dim > 1 && fiber.k != 0.0) xp = xp + ((fiber.dim - 1) * fiber.k) * (inv_h[j] * inv_h[j]);
    const T curv = xp + xi[j] * xi[j];
    dy[j] = y[m + j];
    dy[m + j] = y[j] * curv;
    ddf = ddf + static_cast<double>(fiber.dim) * curv;
    if (xi_prime) (*xi_prime)[j] = xp;
  }
  dy[2 * m] = v;
  dy[2 * m + 1] = ddf;
}

std::vector<double> pack(const TrajectoryState& st) {
  std::vector<double> y;
  y.reserve(2 * st.h.size() + 2);
  y.insert(y.end(), st.h.begin(), st.h.end());
  y.insert(y.end(), st.w.begin(), st.w.end());
  y.push_back(st.f);
  y.push_back(st.v);
  return y;
}

TrajectoryState unpack(double s, const std::vector<double>& y, std::size_t m) {
  TrajectoryState st;
  st.s = s;
  st.h.assign(y.begin(), y.begin() + static_cast<long>(m));
  st.w.assign(y.begin() + static_cast<long>(m), y.begin() + static_cast<long>(2 * m));
  st.f = y[2 * m];
  st.v = y[2 * m + 1];
  return st;
}

void check_chart(const TrajectoryState& st) {
  for (std::size_t j = 0; j < st.h.size(); ++j) {
    if (!(st.h[j] > 0.0)) {
      throw NumericError("h_" + std::to_string(j + 1) + " <= 0: state left the chart", st.s);
    }
  }
}

}  // namespace

StateRate soliton_rhs(const TrajectoryState& st, const SolitonODEParams& p) {
  if (st.h.size() != p.fibers.size() || st.w.size() != p.fibers.size()) {
    throw ValidationError("state has the wrong number of fibers");
  }
  check_chart(st);
  const std::size_t m = p.fibers.size();
  std::vector<double> dy;
  StateRate rate;
  rate.xi_prime.resize(m);
  rhs_packed(pack(st), dy, p, &rate.xi_prime);
  rate.dh.assign(dy.begin(), dy.begin() + static_cast<long>(m));
  rate.dw.assign(dy.begin() + static_cast<long>(m), dy.begin() + static_cast<long>(2 * m));
  rate.df = dy[2 * m];
  rate.dv = dy[2 * m + 1];
  return rate;
}

FrameState trajectory_frame(const TrajectoryState& st, const SolitonODEParams& p) {
  check_chart(st);
  const std::size_t m = p.fibers.size();
  const std::vector<double> y0 = pack(st);
  std::vector<Jet3> y(y0.size()), dy;
  for (std::size_t i = 0; i < y0.size(); ++i) y[i] = Jet3::constant(y0[i]);
  // Each pass makes one more derivative channel of y exact.
  for (int pass = 0; pass < 3; ++pass) {
    rhs_packed(y, dy, p, static_cast<std::vector<Jet3>*>(nullptr));
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = {y0[i], dy[i].v, dy[i].d1, dy[i].d2};
  }
  rhs_packed(y, dy, p, static_cast<std::vector<Jet3>*>(nullptr));

  std::vector<FiberFrame> fibers;
  for (std::size_t j = 0; j < m; ++j) {
    const FiberSpec& fs = p.fibers[j];
    const Jet3 inv = reciprocal(y[j]);
    fibers.push_back({fs.dim, fs.k, fs.space_form, y[j], y[m + j] * inv, dy[m + j] * inv});
  }
  return make_frame_state(st.s, p.n, p.rho, std::move(fibers), y[2 * m], y[2 * m + 1]);
}

SampleDiagnostics diagnose(const TrajectoryState& st, const SolitonODEParams& p) {
  const FrameState frame = trajectory_frame(st, p);
  const CurvatureReport rep = curvature_report(frame);
  SampleDiagnostics d;
  d.R = rep.R.v;
  d.C0 = rep.R.v + st.v * st.v - 2.0 * p.rho * st.f;
  d.hamilton_grad = rep.R.d1 - 2.0 * rep.spectrum.lambda1.v * st.v;
  for (double c : rep.cotton) d.cotton_max = std::max(d.cotton_max, std::fabs(c));
  if (st.v != 0.0) {
    const double rhs = -rep.R.d1 / (2.0 * (p.n - 1) * st.v);
    for (const FiberFrame& fiber : frame.fibers) {
      d.intcond_3_11_max = std::max(d.intcond_3_11_max, std::fabs(fiber.curv.v - rhs));
    }
  }
  return d;
}

namespace {

// Dormand-Prince 5(4) tableau.
constexpr std::array<double, 7> kC = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
constexpr double kA[7][6] = {
    {},
    {1.0 / 5},
    {3.0 / 40, 9.0 / 40},
    {44.0 / 45, -56.0 / 15, 32.0 / 9},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
    {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84},
};
constexpr std::array<double, 7> kB = {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84, 0.0};
constexpr std::array<double, 7> kE = {71.0 / 57600,      0.0,         -71.0 / 16695, 71.0 / 1920,
                                      -17253.0 / 339200, 22.0 / 525, -1.0 / 40};
// Continuous extension of order 4 (Hairer's coefficients).
constexpr std::array<double, 7> kD = {-12715105075.0 / 11282082432.0, 0.0, 87487479700.0 / 32700410799.0,
                                      -10690763975.0 / 1880347072.0,  701980252875.0 / 199316789632.0,
                                      -1453857185.0 / 822651844.0,    69997945.0 / 29380423.0};

using Stages = std::array<std::vector<double>, 7>;

/// Interpolates inside an accepted step [s0, s0 + h] at fraction theta.
std::vector<double> dense_output(const std::vector<double>& y0, const std::vector<double>& y1, const Stages& k,
                                 double h, double theta) {
  std::vector<double> y(y0.size());
  const double eta = 1.0 - theta;
  for (std::size_t i = 0; i < y0.size(); ++i) {
    const double r2 = y1[i] - y0[i];
    const double r3 = h * k[0][i] - r2;
    const double r4 = r2 - h * k[6][i] - r3;
    double r5 = 0.0;
    for (int stage = 0; stage < 7; ++stage) r5 += kD[stage] * k[stage][i];
    r5 *= h;
    y[i] = y0[i] + theta * (r2 + eta * (r3 + theta * (r4 + eta * r5)));
  }
  return y;
}

class Stepper {
 public:
  explicit Stepper(const SolitonODEParams& p) : p_(p), m_(p.fibers.size()) {}

  void rhs(const std::vector<double>& y, std::vector<double>& dy) const {
    for (std::size_t j = 0; j < m_; ++j) {
      if (!(y[j] > 0.0) || !std::isfinite(y[j])) {
        dy.assign(y.size(), std::numeric_limits<double>::quiet_NaN());
        return;
      }
    }
    rhs_packed(y, dy, p_, static_cast<std::vector<double>*>(nullptr));
  }

  /// One Dormand-Prince step; returns the scaled error norm (NaN if the
  /// trial left the chart). The stages are kept for dense output; the last
  /// one is the derivative at the new point.
  double dopri(const std::vector<double>& y, double h, double tol, std::vector<double>& out, Stages& k) const {
    std::vector<double> tmp(y.size());
    rhs(y, k[0]);
    for (int stage = 1; stage < 7; ++stage) {
      for (std::size_t i = 0; i < y.size(); ++i) {
        double acc = 0.0;
        for (int prev = 0; prev < stage; ++prev) acc += kA[stage][prev] * k[prev][i];
        tmp[i] = y[i] + h * acc;
      }
      rhs(tmp, k[stage]);
    }
    out.resize(y.size());
    double err = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
      double acc = 0.0, est = 0.0;
      for (int stage = 0; stage < 7; ++stage) {
        acc += kB[stage] * k[stage][i];
        est += kE[stage] * k[stage][i];
      }
      out[i] = y[i] + h * acc;
      // Error per unit step: the accumulated error then scales with tol.
      const double scale = tol + tol * std::max(std::fabs(y[i]), std::fabs(out[i]));
      err = std::max(err, std::fabs(est) / scale);
    }
    for (std::size_t j = 0; j < m_; ++j) {
      if (!(out[j] > 0.0)) return std::numeric_limits<double>::quiet_NaN();
    }
    return err;
  }

  void rk4(const std::vector<double>& y, double h, std::vector<double>& out) const {
    std::vector<double> k1, k2, k3, k4, tmp(y.size());
    rhs(y, k1);
    for (std::size_t i = 0; i < y.size(); ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
    rhs(tmp, k2);
    for (std::size_t i = 0; i < y.size(); ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
    rhs(tmp, k3);
    for (std::size_t i = 0; i < y.size(); ++i) tmp[i] = y[i] + h * k3[i];
    rhs(tmp, k4);
    out.resize(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) out[i] = y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }

 private:
  const SolitonODEParams& p_;
  std::size_t m_;
};

bool finite_state(const std::vector<double>& y) {
  return std::all_of(y.begin(), y.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace

Trajectory integrate(const TrajectoryState& init, const SolitonODEParams& p, double s_end,
                     const IntegrateOptions& opts) {
  validate(p);
  if (init.h.size() != p.fibers.size() || init.w.size() != p.fibers.size()) {
    throw ValidationError("initial data must give h and w for every fiber");
  }
  for (std::size_t j = 0; j < init.h.size(); ++j) {
    if (!(init.h[j] > 0.0)) throw ValidationError("initial h_" + std::to_string(j + 1) + " must be positive");
  }
  if (!(opts.tol > 0.0)) throw ValidationError("tolerance must be positive");
  if (opts.samples < 2) throw ValidationError("need at least 2 output samples");
  if (!(s_end != init.s) || !std::isfinite(s_end)) throw ValidationError("empty integration range");
  if (opts.fixed_step && !(opts.step > 0.0)) throw ValidationError("fixed step must be positive");

  const std::size_t m = p.fibers.size();
  const double span = s_end - init.s;
  const double dir = span > 0.0 ? 1.0 : -1.0;
  std::vector<double> grid(static_cast<std::size_t>(opts.samples));
  for (int i = 0; i < opts.samples; ++i) grid[static_cast<std::size_t>(i)] = init.s + span * i / (opts.samples - 1);
  grid.back() = s_end;

  Trajectory traj;
  traj.params = p;
  traj.samples.push_back(init);
  traj.diagnostics.push_back(diagnose(init, p));

  Stepper stepper(p);
  std::vector<double> y = pack(init), trial;
  double s = init.s;
  double h = opts.fixed_step ? opts.step : std::min(std::fabs(span) / 100.0, 1e-3 * (1.0 + std::fabs(s)));
  double err_prev = 1e-4;
  constexpr double kSafety = 0.9, kAlpha = 0.7 / 5.0, kBeta = 0.4 / 5.0;

  auto emit = [&](double at, const std::vector<double>& state) {
    TrajectoryState st = unpack(at, state, m);
    check_chart(st);
    traj.samples.push_back(st);
    traj.diagnostics.push_back(diagnose(st, p));
  };
  auto budget = [&] {
    if (traj.stats.steps + traj.stats.rejections >= opts.max_steps) throw NumericError("step budget exhausted", s);
  };

  if (opts.fixed_step) {
    // Fixed steps land on every output point.
    for (std::size_t next = 1; next < grid.size(); ++next) {
      const double target = grid[next];
      while (dir * (target - s) > 0.0) {
        budget();
        const double remaining = std::fabs(target - s);
        const bool last = h >= remaining * (1.0 - 1e-12);
        const double step = last ? remaining : h;
        stepper.rk4(y, dir * step, trial);
        if (!finite_state(trial)) throw NumericError("non-finite state", s);
        for (std::size_t j = 0; j < m; ++j) {
          if (!(trial[j] > 0.0)) throw NumericError("h_" + std::to_string(j + 1) + " <= 0", s);
        }
        y.swap(trial);
        s = last ? target : s + dir * step;
        ++traj.stats.steps;
      }
      emit(target, y);
    }
    return traj;
  }

  // Adaptive steps run freely; output points come from the continuous
  // extension, so the grid never constrains the step size.
  Stages k;
  std::size_t next = 1;
  while (next < grid.size()) {
    budget();
    const double remaining = std::fabs(s_end - s);
    const bool last = h >= remaining * (1.0 - 1e-12);
    const double step = last ? remaining : h;
    if (step < 1e-14 * (1.0 + std::fabs(s)) && !last) throw NumericError("step underflow near a singularity", s);

    const double err = stepper.dopri(y, dir * step, opts.tol, trial, k);
    if (!std::isfinite(err) || err > 1.0) {
      ++traj.stats.rejections;
      const double shrink = std::isfinite(err) ? std::max(0.2, kSafety * std::pow(err, -0.2)) : 0.25;
      h = step * shrink;
      if (h < 1e-14 * (1.0 + std::fabs(s))) {
        if (!std::isfinite(err)) throw NumericError("h <= 0 encountered", s);
        throw NumericError("step underflow near a singularity", s);
      }
      continue;
    }
    const double s_new = last ? s_end : s + dir * step;
    while (next < grid.size() && (next + 1 == grid.size() ? last : dir * (grid[next] - s_new) <= 0.0)) {
      const double target = grid[next];
      if (target == s_new) {
        emit(target, trial);
      } else {
        emit(target, dense_output(y, trial, k, dir * step, (target - s) / (s_new - s)));
      }
      ++next;
    }
    y.swap(trial);
    s = s_new;
    ++traj.stats.steps;
    traj.stats.max_error_estimate = std::max(traj.stats.max_error_estimate, err);
    const double e = std::max(err, 1e-10);
    h = step * std::clamp(kSafety * std::pow(e, -kAlpha) * std::pow(err_prev, kBeta), 0.2, 5.0);
    err_prev = e;
  }
  return traj;
}

std::vector<double> sample_derivative(const std::vector<double>& s, const std::vector<double>& values) {
  const std::size_t N = s.size();
  std::vector<double> d(N, 0.0);
  if (N < 2) return d;
  if (N == 2) {
    d[0] = d[1] = (values[1] - values[0]) / (s[1] - s[0]);
    return d;
  }
  const double h = (s.back() - s.front()) / static_cast<double>(N - 1);
  bool uniform = N >= 5;
  for (std::size_t i = 1; uniform && i < N; ++i) {
    if (std::fabs((s[i] - s[i - 1]) - h) > 1e-9 * std::fabs(h)) uniform = false;
  }
  if (uniform) {
    const auto& f = values;
    for (std::size_t i = 2; i + 2 < N; ++i) d[i] = (f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]) / (12.0 * h);
    d[0] = (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]) / (12.0 * h);
    d[1] = (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]) / (12.0 * h);
    d[N - 1] = (25.0 * f[N - 1] - 48.0 * f[N - 2] + 36.0 * f[N - 3] - 16.0 * f[N - 4] + 3.0 * f[N - 5]) / (12.0 * h);
    d[N - 2] = (3.0 * f[N - 1] + 10.0 * f[N - 2] - 18.0 * f[N - 3] + 6.0 * f[N - 4] - f[N - 5]) / (12.0 * h);
    return d;
  }
  // Three-point formula on a non-uniform grid.
  auto three_point = [&](std::size_t i0, std::size_t at) {
    const double x0 = s[i0], x1 = s[i0 + 1], x2 = s[i0 + 2], x = s[at];
    const double l0 = ((x - x1) + (x - x2)) / ((x0 - x1) * (x0 - x2));
    const double l1 = ((x - x0) + (x - x2)) / ((x1 - x0) * (x1 - x2));
    const double l2 = ((x - x0) + (x - x1)) / ((x2 - x0) * (x2 - x1));
    return l0 * values[i0] + l1 * values[i0 + 1] + l2 * values[i0 + 2];
  };
  d[0] = three_point(0, 0);
  for (std::size_t i = 1; i + 1 < N; ++i) d[i] = three_point(i - 1, i);
  d[N - 1] = three_point(N - 3, N - 1);
  return d;
}

DriftMetrics monitor(const Trajectory& traj) {
  if (traj.samples.size() < 2) throw ValidationError("monitor needs at least two samples");
  const SolitonODEParams& p = traj.params;
  const std::size_t N = traj.samples.size();
  const std::size_t m = p.fibers.size();

  DriftMetrics out;
  out.C0_initial = traj.diagnostics.front().C0;
  std::vector<double> s(N), R(N), v(N);
  std::vector<std::vector<double>> w(m, std::vector<double>(N));
  for (std::size_t i = 0; i < N; ++i) {
    const SampleDiagnostics& d = traj.diagnostics[i];
    s[i] = traj.samples[i].s;
    R[i] = d.R;
    v[i] = traj.samples[i].v;
    for (std::size_t j = 0; j < m; ++j) w[j][i] = traj.samples[i].w[j];
    out.C0_drift = std::max(out.C0_drift, std::fabs(d.C0 - out.C0_initial));
    out.hamilton_grad_jet = std::max(out.hamilton_grad_jet, std::fabs(d.hamilton_grad));
    out.cotton_max = std::max(out.cotton_max, d.cotton_max);
    out.intcond_3_11_max = std::max(out.intcond_3_11_max, d.intcond_3_11_max);
  }

  const std::vector<double> dR = sample_derivative(s, R);
  const std::vector<double> ddf = sample_derivative(s, v);
  std::vector<std::vector<double>> ddh(m);
  for (std::size_t j = 0; j < m; ++j) ddh[j] = sample_derivative(s, w[j]);

  for (std::size_t i = 0; i < N; ++i) {
    const TrajectoryState& st = traj.samples[i];
    std::vector<double> xi(m), curv(m);
    double S1 = 0.0, lambda1 = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      xi[j] = st.w[j] / st.h[j];
      curv[j] = ddh[j][i] / st.h[j];
      S1 += p.fibers[j].dim * xi[j];
      lambda1 -= p.fibers[j].dim * curv[j];
    }
    out.hamilton_grad_fd = std::max(out.hamilton_grad_fd, std::fabs(dR[i] - 2.0 * lambda1 * st.v));
    double worst = std::fabs(lambda1 + ddf[i] - p.rho);
    for (std::size_t j = 0; j < m; ++j) {
      const FiberSpec& fiber = p.fibers[j];
      const double K = fiber.dim > 1 ? (fiber.dim - 1) * fiber.k / (st.h[j] * st.h[j]) : 0.0;
      const double lambda = xi[j] * xi[j] - curv[j] - xi[j] * S1 + K;
      worst = std::max(worst, std::fabs(lambda + st.v * xi[j] - p.rho));
    }
    out.soliton_fd = std::max(out.soliton_fd, worst);
  }
  return out;
}

std::string trajectory_csv(const Trajectory& traj) {
  const std::size_t m = traj.params.fibers.size();
  std::string out = "s";
  for (std::size_t j = 1; j <= m; ++j) out += ",h_" + std::to_string(j) + ",w_" + std::to_string(j);
  out += ",f,fprime,R,C0,res_cotton_max\n";
  char buf[40];
  auto put = [&](double x) {
    std::snprintf(buf, sizeof buf, "%.17g", x);
    out += buf;
  };
  for (std::size_t i = 0; i < traj.samples.size(); ++i) {
    const TrajectoryState& st = traj.samples[i];
    const SampleDiagnostics& d = traj.diagnostics[i];
    put(st.s);
    for (std::size_t j = 0; j < m; ++j) {
      out += ',';
      put(st.h[j]);
      out += ',';
      put(st.w[j]);
    }
    for (double x : {st.f, st.v, d.R, d.C0, d.cotton_max}) {
      out += ',';
      put(x);
    }
    out += '\n';
  }
  return out;
}

}  // namespace warpsol
