#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "warpsol/expr.hpp"

namespace warpsol {

/// Fiber factor of a multiply warped product. The fiber metric is Einstein
/// with constant (dim - 1) * k; with `space_form` its Riemann tensor is
/// k (delta delta - delta delta).
struct FiberSpec {
  int dim = 1;
  double k = 0.0;
  bool space_form = true;

  friend bool operator==(const FiberSpec&, const FiberSpec&) = default;
};

/// Expression together with the text it was parsed from.
struct Formula {
  std::string text = "0";
  Expr expr;

  static Formula parse(std::string_view text);
};

struct Domain {
  double lo = 0.1;
  double hi = 10.0;
};

/// g = ds^2 + sum_j h_j(s)^2 g_j with potential f(s) and soliton constant rho.
struct SolitonSpec {
  int n = 4;
  double rho = 0.0;
  std::vector<FiberSpec> fibers;
  std::vector<Formula> warps;
  Formula potential;
  Domain domain;
};

/// Local types of the harmonic-Weyl classification plus the two rejections.
enum class ModelType { type_i_einstein, type_ii, type_iii, type_iv_D_flat, non_soliton, non_harmonic };

std::string_view to_string(ModelType t);

/// Checks dimension bookkeeping, fiber constraints, the domain, and that
/// every warp is strictly positive (and the potential defined) on a
/// 256-point grid. Throws ValidationError; returns the spec unchanged.
SolitonSpec build_metric(SolitonSpec spec);

/// `n` uniformly spaced points covering [lo, hi] (endpoints included).
std::vector<double> uniform_grid(const Domain& d, int n);

enum class CatalogKind { gaussian, einstein_product, type_ii, type_iii, round_cone, custom };

struct CatalogId {
  CatalogKind kind = CatalogKind::type_iii;
  int n = 6;
  /// Euclidean-factor rank for type_ii: R^{r+1} x N^{n-r-1}.
  int r = 2;
  double rho = 0.0;
};

CatalogKind catalog_kind_from_string(std::string_view name);
std::string_view to_string(CatalogKind kind);

/// Closed-form entries of the solution catalog. Throws ValidationError on
/// parameter constraint violations (e.g. type_iii with n = 5).
SolitonSpec catalog_entry(const CatalogId& id);

/// Type each catalog entry is expected to classify as.
ModelType declared_type(const CatalogId& id);

/// Initial data for the ODE integrator, as carried in spec files.
struct InitialData {
  std::optional<double> s0;
  std::vector<double> h;
  std::vector<double> w;
  double f = 0.0;
  double fprime = 0.0;
};

/// Parsed spec file. Warps and potential are optional for files that only
/// feed the integrator.
struct SpecDocument {
  SolitonSpec spec;
  bool has_closed_form = false;
  std::optional<InitialData> initial;
};

/// Parses the JSON spec file format. Throws ValidationError on schema
/// problems and ParseError on malformed expressions or JSON.
SpecDocument spec_from_json_text(std::string_view text);
SpecDocument load_spec_file(const std::string& path);
std::string spec_to_json_text(const SolitonSpec& spec);

}  // namespace warpsol
