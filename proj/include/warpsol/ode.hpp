#pragma once

#include <vector>

#include "warpsol/curvature.hpp"
#include "warpsol/metric.hpp"

namespace warpsol {

struct SolitonODEParams {
  int n = 4;
  double rho = 0.0;
  std::vector<FiberSpec> fibers;
};

/// Throws ValidationError unless 1 + sum(dim) == n and n >= 4.
void validate(const SolitonODEParams& p);

/// Point on a trajectory: warps h_j, their slopes w_j = h_j', f and v = f'.
struct TrajectoryState {
  double s = 0.0;
  std::vector<double> h;
  std::vector<double> w;
  double f = 0.0;
  double v = 0.0;
};

/// d/ds of the state under the soliton system, plus the xi_j' used.
struct StateRate {
  std::vector<double> dh;
  std::vector<double> dw;
  double df = 0.0;
  double dv = 0.0;
  std::vector<double> xi_prime;
};

/// Soliton ODE right-hand side. With xi_j = w_j/h_j and S1 = sum dim_j xi_j:
///   xi_j' = f' xi_j - rho - xi_j S1 + (dim_j - 1) k_j / h_j^2
///   w_j'  = h_j (xi_j' + xi_j^2)
///   f''   = rho + sum dim_j (xi_j' + xi_j^2)
/// Throws NumericError if some h_j <= 0.
StateRate soliton_rhs(const TrajectoryState& st, const SolitonODEParams& p);

/// Frame state along the flow. All jets are exact s-derivatives of the
/// solution through the state, obtained by Taylor-mode differentiation of
/// the right-hand side.
FrameState trajectory_frame(const TrajectoryState& st, const SolitonODEParams& p);

struct SampleDiagnostics {
  double C0 = 0.0;             ///< R + f'^2 - 2 rho f
  double R = 0.0;
  double hamilton_grad = 0.0;  ///< R' - 2 lambda1 f' from jets
  double cotton_max = 0.0;     ///< max_j |c_j|
  double intcond_3_11_max = 0.0;  ///< 0 where f' = 0
};

struct IntegratorStats {
  long steps = 0;
  long rejections = 0;
  double max_error_estimate = 0.0;
};

struct Trajectory {
  SolitonODEParams params;
  std::vector<TrajectoryState> samples;
  std::vector<SampleDiagnostics> diagnostics;
  IntegratorStats stats;
};

struct IntegrateOptions {
  double tol = 1e-10;
  /// Number of uniformly spaced output points over the range (>= 2).
  int samples = 201;
  /// Fixed-step classical RK4 with this step instead of the adaptive pair.
  bool fixed_step = false;
  double step = 1e-3;
  long max_steps = 20'000'000;
};

/// Integrates from init.s to s_end (either direction). Adaptive steps run
/// independently of the output grid, whose points come from the pair's
/// fourth-order continuous extension; fixed RK4 steps land on every output
/// point. Throws ValidationError for bad input and NumericError on
/// step underflow or when some h_j reaches 0.
Trajectory integrate(const TrajectoryState& init, const SolitonODEParams& p, double s_end,
                     const IntegrateOptions& opts = {});

SampleDiagnostics diagnose(const TrajectoryState& st, const SolitonODEParams& p);

struct DriftMetrics {
  double C0_initial = 0.0;
  double C0_drift = 0.0;             ///< max |C0(s) - C0(s0)|
  double hamilton_grad_fd = 0.0;     ///< max |R'_fd - 2 lambda1 f'|
  double hamilton_grad_jet = 0.0;    ///< max |R'_jet - 2 lambda1 f'|
  double cotton_max = 0.0;
  double intcond_3_11_max = 0.0;
  double soliton_fd = 0.0;           ///< soliton residuals from FD-reconstructed h'', f''
};

/// Requires at least two samples.
DriftMetrics monitor(const Trajectory& traj);

/// Derivative of `values` sampled at `s`: fourth-order five-point stencils on
/// uniform grids with >= 5 points, second-order three-point otherwise.
std::vector<double> sample_derivative(const std::vector<double>& s, const std::vector<double>& values);

/// Trajectory CSV: s,h_1,w_1,...,f,fprime,R,C0,res_cotton_max with %.17g.
std::string trajectory_csv(const Trajectory& traj);

}  // namespace warpsol
