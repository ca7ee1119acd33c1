#pragma once

// Network constructors: cones over atomic measures, shifted dyadic grids,
// grid approximations of measures and the finite-energy dyadic cascade.

#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "branchnet/chains.hpp"
#include "branchnet/costs.hpp"
#include "branchnet/energy.hpp"

namespace branchnet {

// Cone over nu with the given vertex: one edge vertex -> p carrying w for
// each atom (p, w). divergence(cone) = chi(nu) delta_vertex - nu, so for a
// compatible difference nu = mu_plus - mu_minus the cone is a flux from
// mu_minus to mu_plus.
inline Chain1 cone(const Chain0& nu, const Point& vertex, double eps_geom = kDefaultEpsGeom) {
  if (static_cast<int>(vertex.size()) != nu.n) throw InputError("cone: vertex has wrong dimension");
  Chain1 raw{nu.n, nu.m, {}, false};
  std::vector<const Point*> pts{&vertex};
  for (const Atom& at : nu.atoms) pts.push_back(&at.position);
  const double eps = eps_geom * detail::extent_scale(pts);
  for (const Atom& at : nu.atoms)
    if (detail::dist(at.position, vertex) > eps) raw.edges.push_back({vertex, at.position, at.weight});
  return canonicalize(raw, eps_geom);
}

// Coordinate cube given by its lower corner and edge length.
struct Cube {
  Point lo;
  double side = 1.0;

  double diameter() const { return side * std::sqrt(static_cast<double>(lo.size())); }
  bool contains(std::span<const double> p) const {
    for (std::size_t i = 0; i < lo.size(); ++i)
      if (p[i] < lo[i] || p[i] > lo[i] + side) return false;
    return true;
  }
};

// Dyadic grids Lambda(Q,k): Q split into 2^{kn} equal coordinate cubes. The
// skeleton S(Q,k) is the union of the cell faces. Level-k hyperplanes are
// contained in the level-k_max ones, so clearance at k_max covers all k.
struct DyadicGrid {
  Cube q;
  int k_max = 0;
  Vec shift;  // the random offsets in [0,1] used to place q

  int n() const { return static_cast<int>(q.lo.size()); }
  double cell_side(int k) const { return std::ldexp(q.side, -k); }

  std::vector<long long> cell_index(std::span<const double> x, int k) const {
    std::vector<long long> idx(x.size());
    const long long cells = 1ll << k;
    for (std::size_t i = 0; i < x.size(); ++i) {
      long long c = static_cast<long long>(std::floor((x[i] - q.lo[i]) / cell_side(k)));
      idx[i] = std::clamp(c, 0ll, cells - 1);
    }
    return idx;
  }

  Point cell_center(const std::vector<long long>& idx, int k) const {
    Point c(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i)
      c[i] = q.lo[i] + (static_cast<double>(idx[i]) + 0.5) * cell_side(k);
    return c;
  }

  // Distance from x to the nearest hyperplane of S(Q,k).
  double skeleton_distance(std::span<const double> x, int k) const {
    double best = kInfinity;
    const double h = cell_side(k);
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double u = (x[i] - q.lo[i]) / h;
      const double frac = u - std::floor(u);
      best = std::min(best, std::min(frac, 1.0 - frac) * h);
    }
    return best;
  }
};

// Smallest distance from any atom of `measures` to S(Q,k).
inline double skeleton_clearance(const DyadicGrid& grid, std::span<const Chain0> measures, int k) {
  double best = kInfinity;
  for (const Chain0& mu : measures)
    for (const Atom& at : mu.atoms) best = std::min(best, grid.skeleton_distance(at.position, k));
  return best;
}

// Finds Q containing Q' (edge 2 side(Q')) placed by random offsets so that no
// atom lies within eps_geom * side(Q) of S(Q,k), k <= k_max. Retries with
// fresh offsets; throws InputError reporting the best clearance on failure.
inline DyadicGrid shifted_grid(const Cube& qprime, std::span<const Chain0> measures, int k_max,
                               int max_tries = 16, std::uint64_t seed = 1,
                               double eps_geom = kDefaultEpsGeom, int* tries_used = nullptr) {
  if (k_max < 0) throw InputError("shifted_grid: k_max must be >= 0");
  for (const Chain0& mu : measures)
    for (const Atom& at : mu.atoms)
      if (!qprime.contains(at.position)) throw InputError("shifted_grid: atom outside the cube Q'");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int n = static_cast<int>(qprime.lo.size());
  double best = 0.0;
  for (int attempt = 1; attempt <= max_tries; ++attempt) {
    DyadicGrid g;
    g.k_max = k_max;
    g.q.side = 2.0 * qprime.side;
    g.q.lo.resize(n);
    g.shift.resize(n);
    for (int i = 0; i < n; ++i) {
      g.shift[i] = u(rng);
      g.q.lo[i] = qprime.lo[i] - g.shift[i] * qprime.side;
    }
    const double clearance = skeleton_clearance(g, measures, k_max);
    if (clearance > eps_geom * g.q.side) {
      if (tries_used) *tries_used = attempt;
      return g;
    }
    best = std::max(best, clearance);
  }
  std::ostringstream os;
  os << "shifted_grid: no valid shift in " << max_tries << " tries (best skeleton clearance " << best << ")";
  throw InputError(os.str());
}

// Smallest cube containing all atoms (side at least `min_side`).
inline Cube bounding_cube(std::span<const Chain0> measures, double min_side = 1e-6) {
  int n = 0;
  for (const Chain0& mu : measures) n = std::max(n, mu.n);
  Point lo(n, kInfinity), hi(n, -kInfinity);
  bool any = false;
  for (const Chain0& mu : measures)
    for (const Atom& at : mu.atoms) {
      any = true;
      for (int i = 0; i < n; ++i) {
        lo[i] = std::min(lo[i], at.position[i]);
        hi[i] = std::max(hi[i], at.position[i]);
      }
    }
  if (!any) return {Point(n, 0.0), 1.0};
  double side = min_side;
  for (int i = 0; i < n; ++i) side = std::max(side, hi[i] - lo[i]);
  return {lo, side};
}

// One atom per nonempty cell of Lambda(Q,k), at the cell center, carrying the
// total weight of mu in that cell.
inline Chain0 dyadic_approx(const Chain0& mu, const DyadicGrid& grid, int k,
                            double eps_geom = kDefaultEpsGeom) {
  std::map<std::vector<long long>, Weight> cells;
  const double clear = eps_geom * grid.q.side;
  for (const Atom& at : mu.atoms) {
    if (!grid.q.contains(at.position)) throw InputError("dyadic_approx: atom outside the grid cube");
    if (grid.skeleton_distance(at.position, k) <= clear)
      throw InputError("dyadic_approx: atom on the grid skeleton (choose another shifted grid)");
    auto& w = cells[grid.cell_index(at.position, k)];
    if (w.empty()) w.assign(mu.m, 0.0);
    detail::axpy(1.0, at.weight, w);
  }
  Chain0 out{mu.n, mu.m, {}};
  for (auto& [idx, w] : cells) out.atoms.push_back({grid.cell_center(idx, k), w});
  return out;
}

// Componentwise positive and negative parts of a signed measure:
// nu = positive_part(nu) - negative_part(nu).
inline Chain0 positive_part(const Chain0& nu) {
  Chain0 out{nu.n, nu.m, {}};
  for (const Atom& at : nu.atoms) {
    Weight w(nu.m);
    for (int j = 0; j < nu.m; ++j) w[j] = std::max(at.weight[j], 0.0);
    if (detail::norm_inf(w) > 0.0) out.atoms.push_back({at.position, std::move(w)});
  }
  return out;
}

inline Chain0 negative_part(const Chain0& nu) { return positive_part(negate(nu)); }

struct CascadeResult {
  Chain1 chain;
  EnergyCertificate certificate;
  int depth = 0;
  Chain0 residual0;  // sigma^{K+1}_+ - sigma^{K+1}_- minus (mu_plus - mu_minus): what the closing cones carry
  bool beta_dominates = true;
  bool beta_admissible = true;
  double series_sum = 0.0;  // sum_{k=1}^{K+2} S^beta(n,k)
};

namespace detail {

// Tree edges of one sign: cones from every level-k cell center to its
// level-(k+1) children (k = 0..K), then cones from level-(K+1) centers to the
// atoms themselves. Divergence: sigma^0 - part.
inline void append_cascade_edges(const Chain0& part, const DyadicGrid& grid, int K, double sign,
                                 double eps, Chain1& out) {
  std::vector<Chain0> levels;
  for (int k = 0; k <= K + 1; ++k) levels.push_back(dyadic_approx(part, grid, k));
  for (int k = 0; k <= K; ++k) {
    for (const Atom& child : levels[k + 1].atoms) {
      const Point parent = grid.cell_center(grid.cell_index(child.position, k), k);
      if (dist(parent, child.position) > eps)
        out.edges.push_back({parent, child.position, scaled(child.weight, sign)});
    }
  }
  for (const Atom& at : part.atoms) {
    const Point center = grid.cell_center(grid.cell_index(at.position, K + 1), K + 1);
    if (dist(center, at.position) > eps) out.edges.push_back({center, at.position, scaled(at.weight, sign)});
  }
}

}  // namespace detail

// Flux between mu_minus and mu_plus built from dyadic cones: the positive and
// negative parts of nu = mu_plus - mu_minus are approximated independently on
// the levels 0..K+1 of `grid`, consecutive levels are joined by cones from
// parent centers, and the last level is closed exactly with cones to the true
// atoms. The certificate bound is
//   (m/2) diam(Q) (sum_{k=1}^{K+2} S^beta(n,k)) max{1, mass(nu_-) + mass(nu_+)}.
template <TransportCost Cost>
CascadeResult cascade(const Chain0& mu_minus, const Chain0& mu_plus, const DyadicGrid& grid, int K,
                      const Cost& cost, const BetaEnvelope& beta, double eps_geom = kDefaultEpsGeom) {
  if (K < 0) throw InputError("cascade: depth must be >= 0");
  if (mu_minus.n != mu_plus.n || mu_minus.m != mu_plus.m || cost.m() != mu_minus.m)
    throw InputError("cascade: dimension mismatch");
  const double tol = 1e-9 * std::max(1.0, mass(mu_minus) + mass(mu_plus));
  if (!is_compatible(mu_minus, mu_plus, tol)) throw InputError("cascade: incompatible measures");
  if (K + 1 > grid.k_max) throw InputError("cascade: grid was not cleared up to level K+1");

  const int n = mu_minus.n, m = mu_minus.m;
  const Chain0 nu = difference(mu_plus, mu_minus, eps_geom);
  const Chain0 nu_plus = positive_part(nu), nu_minus = negative_part(nu);

  Chain1 raw{n, m, {}, false};
  const double eps = eps_geom * grid.q.side;
  detail::append_cascade_edges(nu_plus, grid, K, +1.0, eps, raw);
  detail::append_cascade_edges(nu_minus, grid, K, -1.0, eps, raw);

  CascadeResult res;
  res.depth = K;
  res.chain = canonicalize(raw, eps_geom);
  res.residual0 = difference(difference(dyadic_approx(nu_plus, grid, K + 1), dyadic_approx(nu_minus, grid, K + 1)),
                             nu, eps_geom);
  res.series_sum = s_beta_series(beta, n, K + 2).partial_sum;
  res.beta_dominates = beta_dominates(cost, beta);
  res.beta_admissible = admissibility_check(beta, n).admissible;

  auto& cert = res.certificate;
  cert.kind = BoundKind::Cascade;
  cert.energy = energy(res.chain, cost);
  cert.bound = 0.5 * m * grid.q.diameter() * res.series_sum * std::max(1.0, mass(nu_minus) + mass(nu_plus));
  cert.inputs_digest = digest(mu_plus, digest(mu_minus));
  return res;
}

}  // namespace branchnet
