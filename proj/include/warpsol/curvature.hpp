#pragma once

#include <optional>
#include <vector>

#include "warpsol/jet.hpp"
#include "warpsol/metric.hpp"

namespace warpsol {

/// Per-fiber data of the adapted frame at one point.
struct FiberFrame {
  int dim = 1;
  double k = 0.0;
  bool space_form = true;
  Jet3 h;     ///< warping function
  Jet3 xi;    ///< h'/h, the connection coefficient omega_{1a} = xi omega_a
  Jet3 curv;  ///< h''/h = xi' + xi^2

  /// (dim - 1) k / h^2: fiber Einstein constant seen in the frame.
  Jet3 einstein_term() const;
};

/// Adapted-frame state at a fixed s.
struct FrameState {
  double s = 0.0;
  int n = 0;
  double rho = 0.0;
  std::vector<FiberFrame> fibers;
  Jet3 f;   ///< potential
  Jet3 fp;  ///< f' with its derivatives (f'', f''', f'''')
  Jet3 S1;  ///< sum_j dim_j xi_j
  Jet3 S2;  ///< sum_j dim_j xi_j^2
};

/// Fills S1 and S2 from the fibers.
FrameState make_frame_state(double s, int n, double rho, std::vector<FiberFrame> fibers, Jet3 f, Jet3 fp);

/// Evaluates warps and potential of a validated spec at s.
/// Throws ValidationError outside the domain or where some h_j <= 0.
FrameState connection_state(const SolitonSpec& spec, double s);

/// Frame components of the Riemann tensor, stored block-wise.
class RiemannBlocks {
 public:
  /// R_{1a1a} for a in fiber j.
  const Jet3& radial(std::size_t j) const { return radial_[j]; }
  /// R_{a alpha a alpha} for a in fiber j, alpha in fiber l (j != l).
  const Jet3& cross(std::size_t j, std::size_t l) const { return cross_[j * m_ + l]; }
  /// R_{abab} for a != b in fiber j. Throws ValidationError for fibers that
  /// are not space forms or have no second direction.
  const Jet3& intra(std::size_t j) const;
  bool has_intra(std::size_t j) const { return intra_[j].has_value(); }
  std::size_t fiber_count() const { return m_; }

 private:
  friend RiemannBlocks riemann_components(const FrameState& st);

  std::size_t m_ = 0;
  std::vector<Jet3> radial_;
  std::vector<Jet3> cross_;
  std::vector<std::optional<Jet3>> intra_;
};

RiemannBlocks riemann_components(const FrameState& st);

/// Ricci eigenvalues: lambda1 along grad f, lambda[j] with multiplicity dim_j.
struct RicciSpectrum {
  Jet3 lambda1;
  std::vector<Jet3> lambda;
  std::vector<int> multiplicity;
};

RicciSpectrum ricci_spectrum(const FrameState& st);
Jet3 scalar_curvature(const FrameState& st);
Jet3 scalar_curvature(const RicciSpectrum& spectrum);

/// Diagonal Schouten (A) and Einstein (E) tensor entries.
struct SchoutenEinstein {
  double A11 = 0.0;
  std::vector<double> A;
  double E11 = 0.0;
  std::vector<double> E;
};

SchoutenEinstein schouten_einstein(const FrameState& st);

/// Weyl frame blocks. The intra-fiber entry of a fiber that is not a space
/// form is only known modulo the fiber's own Weyl tensor; `intra` then holds
/// its trace part and `intra_determined` is false.
struct WeylBlocks {
  std::vector<double> radial;              ///< W_{1a1a}
  std::vector<std::vector<double>> cross;  ///< W_{a alpha a alpha}, j != l
  std::vector<double> intra;               ///< W_{abab}, fibers with dim >= 2
  std::vector<bool> intra_determined;

  bool all_determined() const;
};

/// Throws ValidationError if any fiber is not a space form.
WeylBlocks weyl_components(const FrameState& st);
/// Same blocks without the space-form requirement (trace parts for
/// non-space-form fibers).
WeylBlocks weyl_components_trace(const FrameState& st);

/// Radial Cotton components c_j = lambda_j' - (lambda1 - lambda_j) xi_j - R'/(2(n-1)),
/// i.e. C_{aa1} for a in fiber j.
std::vector<double> cotton_radial(const FrameState& st);

/// D_{a1a} = -f' [A_jj/(n-2) + E_11/((n-1)(n-2))] per fiber.
std::vector<double> d_components(const FrameState& st);

/// Everything above at one point.
struct CurvatureReport {
  double s = 0.0;
  RicciSpectrum spectrum;
  Jet3 R;
  SchoutenEinstein schouten;
  RiemannBlocks riemann;
  WeylBlocks weyl;
  std::vector<double> cotton;
  std::vector<double> d_tensor;
  /// C_{a alpha beta} with all indices tangent to fibers is taken to vanish
  /// by frame symmetry; never computed.
  bool fiber_cotton_assumed_zero = true;
};

CurvatureReport curvature_report(const FrameState& st);

}  // namespace warpsol
