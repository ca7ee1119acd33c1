#pragma once

// Upper bounds for W(mu_minus, mu_plus) = min energy over fluxes between the
// two measures.

#include <algorithm>
#include <optional>
#include <vector>

#include "branchnet/chains.hpp"
#include "branchnet/construct.hpp"
#include "branchnet/costs.hpp"
#include "branchnet/energy.hpp"
#include "branchnet/optimize.hpp"

namespace branchnet {

struct WUpper {
  double value = 0.0;
  double cone = kInfinity;      // cone at the center of the grid cube
  double cascade = kInfinity;   // best cascade over the usable depths
  int cascade_depth = -1;
  double search = kInfinity;    // local_search, when enabled
};

// min of: the cone at the center of grid.q, cascade(..., K') for every
// K' <= K whose levels 0..K'+1 keep all atoms off the skeleton, and
// local_search (skipped when config.max_iters == 0).
template <TransportCost Cost>
WUpper w_upper(const Chain0& mu_minus, const Chain0& mu_plus, const Cost& cost, int K,
               const OptimizerConfig& config, const DyadicGrid& grid,
               const BetaEnvelope& beta = BetaEnvelope::power(1.0)) {
  WUpper r;
  if (!is_compatible(mu_minus, mu_plus, 1e-9 * std::max(1.0, mass(mu_minus) + mass(mu_plus))))
    throw InputError("w_upper: incompatible measures");
  const Chain0 nu = difference(mu_plus, mu_minus);
  if (nu.atoms.empty()) return r;

  Point center = grid.q.lo;
  for (double& x : center) x += 0.5 * grid.q.side;
  r.cone = energy(cone(nu, center), cost);

  const Chain0 pair[] = {mu_minus, mu_plus};
  const double clear = kDefaultEpsGeom * grid.q.side;
  for (int k = 0; k <= std::min(K, grid.k_max - 1); ++k) {
    bool usable = true;
    for (int l = 0; l <= k + 1 && usable; ++l) usable = skeleton_clearance(grid, pair, l) > clear;
    if (!usable) break;  // finer levels contain this skeleton
    const double e = cascade(mu_minus, mu_plus, grid, k, cost, beta).certificate.energy;
    if (e < r.cascade) {
      r.cascade = e;
      r.cascade_depth = k;
    }
  }
  if (config.max_iters > 0) r.search = local_search(mu_minus, mu_plus, cost, config).report.energy;
  r.value = std::min({r.cone, r.cascade, r.search});
  return r;
}

// Same, with a shifted grid placed around the bounding cube of the atoms.
template <TransportCost Cost>
WUpper w_upper(const Chain0& mu_minus, const Chain0& mu_plus, const Cost& cost, int K,
               const OptimizerConfig& config = {}) {
  const Chain0 pair[] = {mu_minus, mu_plus};
  const DyadicGrid grid = shifted_grid(bounding_cube(pair), pair, K + 1, 16, config.seed);
  return w_upper(mu_minus, mu_plus, cost, K, config, grid);
}

}  // namespace branchnet
