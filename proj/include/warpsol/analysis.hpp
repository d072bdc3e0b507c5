#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "warpsol/curvature.hpp"
#include "warpsol/metric.hpp"
#include "warpsol/ode.hpp"

namespace warpsol {

enum class ResidualStatus {
  checked,  ///< pass/fail entry; gates the overall verdict
  info,     ///< reported value only (e.g. D components, which need not vanish)
  skipped,  ///< precondition not met; `note` says why
};

std::string_view to_string(ResidualStatus st);

struct Residual {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool pass = true;
  ResidualStatus status = ResidualStatus::checked;
  double s = std::numeric_limits<double>::quiet_NaN();  ///< where the value was taken
  std::string note;
};

/// pass <=> value finite and |value| <= tolerance.
Residual make_residual(std::string name, double value, double tolerance, double s = std::numeric_limits<double>::quiet_NaN());
Residual make_info(std::string name, double value, double s = std::numeric_limits<double>::quiet_NaN());
Residual make_skipped(std::string name, std::string why, double s = std::numeric_limits<double>::quiet_NaN());

/// Named residuals in insertion order.
class ResidualTable {
 public:
  void add(Residual r);
  /// Keeps, per name, the entry with the largest |value|. Evaluated entries
  /// replace skipped ones; a skip never hides an evaluated value.
  void add_worst(Residual r);
  void append(const std::vector<Residual>& rs);
  void append_worst(const std::vector<Residual>& rs);

  const Residual* find(const std::string& name) const;
  const std::vector<Residual>& entries() const { return entries_; }
  /// True when every checked entry passes.
  bool all_pass() const;
  std::size_t size() const { return entries_.size(); }

 private:
  std::vector<Residual> entries_;
  std::map<std::string, std::size_t> index_;
};

/// Residual names use 1-based fiber suffixes.
std::string fiber_name(const std::string& base, std::size_t j);

/// soliton_11 = lambda1 + f'' - rho; soliton_jj_j = lambda_j + f' xi_j - rho.
std::vector<Residual> soliton_residual(const FrameState& st, double tol);
std::vector<Residual> soliton_residual(const SolitonSpec& spec, double s, double tol);

/// hamilton_grad = R' - 2 lambda1 f' (worst over the grid),
/// hamilton_energy_drift = max |C0 - median C0| with C0 = R + f'^2 - 2 rho f,
/// hamilton_laplacian = (R'' + R' S1) - (R' f' + 2 rho R - 2 |Ric|^2).
std::vector<Residual> hamilton_residuals(const std::vector<FrameState>& frames, double tol);
std::vector<Residual> hamilton_residuals(const SolitonSpec& spec, const std::vector<double>& grid, double tol);

/// d_tensor_j (info) and the recombination d_eq_226_j = d_j + c_j - f' W_{1a1a},
/// which is checked only at soliton points with space-form fibers.
std::vector<Residual> d_tensor(const FrameState& st, double tol);
std::vector<Residual> d_tensor(const SolitonSpec& spec, double s, double tol);

/// Bach flatness is only certified in the D = 0, C = 0 regime; otherwise it
/// is reported as not computed.
struct BachStatus {
  bool computed = false;
  bool flat = false;
  std::string certificate;
};

BachStatus bach_flat_check(const FrameState& st, double tol);
Residual bach_residual(const BachStatus& b, double tol, double s);

/// intcond_3_11_j = xi_j' + xi_j^2 + R'/(2(n-1) f') (skipped where f' = 0),
/// intcond_3_12_j = lambda_j' - (lambda1 - lambda_j) xi_j - R'/(2(n-1)),
/// cotton_j = the radial Cotton component (identical to intcond_3_12_j).
std::vector<Residual> harmonic_weyl_residuals(const FrameState& st, double tol);
std::vector<Residual> harmonic_weyl_residuals(const SolitonSpec& spec, double s, double tol);

/// Frames at the grid points (throws ValidationError outside the domain).
std::vector<FrameState> spec_frames(const SolitonSpec& spec, const std::vector<double>& grid);
/// Frames at the samples of an integrated trajectory.
std::vector<FrameState> trajectory_frames(const Trajectory& traj);

/// Full table over a set of frames: soliton, hamilton, harmonic-Weyl,
/// cotton, D and Bach entries, each reduced to its worst point.
ResidualTable residual_table(const std::vector<FrameState>& frames, double tol);

// --- two distinct eigenvalues -------------------------------------------

struct TwoEigenState {
  Jet3 X;  ///< xi of the first eigenspace
  Jet3 Y;  ///< xi of the second eigenspace
  int r1 = 1;
  int r2 = 1;
  double K1 = 0.0;  ///< (r1 - 1) k1 / h1^2
  double K2 = 0.0;  ///< (r2 - 1) k2 / h2^2
  Jet3 fprime;
  double rho = 0.0;
  int n = 4;
};

inline constexpr double kDistinctness = 1e-9;

/// State of a two-fiber frame (fibers 0 and 1).
TwoEigenState two_eigen_state(const FrameState& st);

struct TwoEigenResult {
  std::vector<Residual> residuals;  ///< lemma41_46..lemma41_412, lemma51_1..lemma51_3
  bool x_plus_y_nonzero = false;
  bool lemma52_guard = false;  ///< (n-1) XY + rho != 0
};

/// Throws ValidationError when r1 + r2 != n - 1 or |X - Y| < delta.
TwoEigenResult two_eigen_identities(const TwoEigenState& t, double tol = 1e-10, double delta = kDistinctness);

// --- three distinct eigenvalues -------------------------------------------

/// One candidate counterexample: three distinct xi values with
/// multiplicities, and the common value Q = xi' + xi^2.
struct ObstructionSample {
  double X = 0.0, Y = 0.0, Z = 0.0;
  int r1 = 1, r2 = 1, r3 = 1;
  double Q = 0.0;
};

struct SampleVerdict {
  bool rejected = false;  ///< distinctness guard tripped
  bool feasible = false;
  double margin = 0.0;  ///< normalized contradiction size
  double sum_identity = 0.0;  ///< residual of sum xi = f' after solving the triple equality
};

/// Imposes the triple equality (which forces sum xi = f'), rescales to
/// sum xi^2 = rho when rho > 0, and measures how far the derivative of that
/// relation is from holding.
SampleVerdict evaluate_obstruction_sample(ObstructionSample smp, int n, double rho, double delta = kDistinctness,
                                          double feasibility_tol = 1e-9);

/// Mergeable tally of an obstruction search.
struct ObstructionTally {
  std::uint64_t samples = 0;
  std::uint64_t feasible = 0;
  std::uint64_t rejected = 0;
  double worst_margin = std::numeric_limits<double>::infinity();  ///< min over accepted samples
  double max_sum_identity = 0.0;

  void add(const SampleVerdict& v);
  void merge(const ObstructionTally& other);
};

struct ObstructionResult {
  int n = 0;
  double rho = 0.0;
  std::uint64_t seed = 0;
  ObstructionTally tally;
};

/// Seeded randomized search; deterministic for a given (n, rho, samples,
/// seed) regardless of `threads`. Throws ValidationError for n < 4 or
/// samples < 1.
ObstructionResult three_eigen_obstruction(int n, double rho, std::uint64_t samples, std::uint64_t seed,
                                          unsigned threads = 0);

// --- classification --------------------------------------------------------

struct Classification {
  std::optional<ModelType> type;  ///< empty when no type predicate holds
  std::map<std::string, bool> predicates;
  std::string verdict() const;
};

/// Decision procedure over frames (>= 16 required): non_harmonic if Cotton
/// fails, non_soliton if the soliton equation fails, then type_i (constant
/// f), type_ii (spectrum in {0, rho}, f'' = rho, rho != 0), type_iv (one
/// fiber eigenvalue, D = 0), type_iii (rho = 0 and the R s^2 profile).
Classification classify(const std::vector<FrameState>& frames, double tol);
Classification classify_entry(const SolitonSpec& spec, const std::vector<double>& grid, double tol = 1e-9);
Classification classify_trajectory(const Trajectory& traj, double tol = 1e-6);

struct HarmonicCurvature {
  bool pass = false;
  double max_R_prime = 0.0;
  double max_cotton = 0.0;
};

HarmonicCurvature harmonic_curvature_check(const std::vector<FrameState>& frames, double tol);
HarmonicCurvature harmonic_curvature_check(const SolitonSpec& spec, const std::vector<double>& grid,
                                           double tol = 1e-9);

}  // namespace warpsol
