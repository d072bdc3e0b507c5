#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "warpsol/analysis.hpp"
#include "warpsol/metric.hpp"
#include "warpsol/ode.hpp"

namespace testing_support {

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Every closed-form catalog entry exercised by the suites.
inline std::vector<warpsol::CatalogId> catalog_ids() {
  using warpsol::CatalogKind;
  std::vector<warpsol::CatalogId> ids;
  for (int n : {4, 6, 7, 10}) ids.push_back({CatalogKind::type_iii, n, 0, 0.0});
  ids.push_back({CatalogKind::type_ii, 6, 2, 1.0});
  ids.push_back({CatalogKind::type_ii, 7, 3, -2.0});
  ids.push_back({CatalogKind::type_ii, 5, 1, 1.0});
  ids.push_back({CatalogKind::gaussian, 4, 0, 1.0});
  ids.push_back({CatalogKind::gaussian, 6, 0, -0.5});
  ids.push_back({CatalogKind::einstein_product, 5, 0, 1.0});
  ids.push_back({CatalogKind::einstein_product, 5, 0, 0.0});
  ids.push_back({CatalogKind::round_cone, 4, 0, 0.0});
  ids.push_back({CatalogKind::round_cone, 5, 0, -1.0});
  return ids;
}

inline std::string label(const warpsol::CatalogId& id) {
  return std::string(warpsol::to_string(id.kind)) + " n=" + std::to_string(id.n) + " r=" + std::to_string(id.r) +
         " rho=" + std::to_string(id.rho);
}

/// Random two-fiber soliton ODE parameters and a state in the chart.
struct RandomOdePoint {
  warpsol::SolitonODEParams params;
  warpsol::TrajectoryState state;
};

inline RandomOdePoint random_two_fiber_point(std::mt19937_64& rng) {
  RandomOdePoint p;
  p.params.n = 4 + static_cast<int>(rng() % 5);
  const int r1 = 1 + static_cast<int>(rng() % static_cast<unsigned>(p.params.n - 2));
  const int r2 = p.params.n - 1 - r1;
  for (int r : {r1, r2}) {
    const double k = r == 1 ? 0.0 : static_cast<double>(static_cast<int>(rng() % 3) - 1);
    p.params.fibers.push_back({r, k, true});
  }
  p.params.rho = uniform(rng, -1.0, 1.0);
  p.state.s = uniform(rng, 0.2, 3.0);
  for (int j = 0; j < 2; ++j) {
    p.state.h.push_back(uniform(rng, 0.5, 2.0));
    p.state.w.push_back(uniform(rng, -1.0, 1.0));
  }
  p.state.f = uniform(rng, -1.0, 1.0);
  p.state.v = uniform(rng, -1.0, 1.0);
  return p;
}

/// Multiplies the first warp by s^eps.
inline warpsol::SolitonSpec perturb_first_warp(warpsol::SolitonSpec spec, double eps) {
  const std::string text = "(" + spec.warps[0].text + ")*s^" + std::to_string(eps);
  spec.warps[0] = warpsol::Formula::parse(text);
  return warpsol::build_metric(spec);
}

}  // namespace testing_support
