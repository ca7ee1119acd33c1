#pragma once

#include <random>
#include <vector>

#include "branchnet/branchnet.hpp"

namespace testing_support {

using namespace branchnet;

inline Point random_point(std::mt19937_64& rng, int n, double lo = 0.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Point p(n);
  for (double& x : p) x = u(rng);
  return p;
}

// Integer-ish multiplicities keep exact arithmetic in most sums.
inline Weight random_weight(std::mt19937_64& rng, int m, bool allow_zero = true) {
  std::uniform_int_distribution<int> d(-3, 3);
  Weight w(m);
  do {
    for (double& x : w) x = d(rng);
  } while (!allow_zero && detail::norm_inf(w) == 0.0);
  return w;
}

inline Chain1 random_chain(std::mt19937_64& rng, int n, int m, int edges) {
  Chain1 T{n, m, {}, false};
  while (static_cast<int>(T.edges.size()) < edges) {
    Point a = random_point(rng, n), b = random_point(rng, n);
    if (detail::dist(a, b) < 1e-3) continue;
    T.edges.push_back({a, b, random_weight(rng, m, false)});
  }
  return T;
}

// Random polyline graph: vertices shared between edges, so the chain has
// junctions and (usually) cycles.
inline Chain1 random_graph_chain(std::mt19937_64& rng, int n, int m, int vertices, int edges) {
  std::vector<Point> vs;
  for (int i = 0; i < vertices; ++i) vs.push_back(random_point(rng, n));
  std::uniform_int_distribution<int> pick(0, vertices - 1);
  Chain1 T{n, m, {}, false};
  while (static_cast<int>(T.edges.size()) < edges) {
    const int i = pick(rng), k = pick(rng);
    if (i == k) continue;
    T.edges.push_back({vs[i], vs[k], random_weight(rng, m, false)});
  }
  return T;
}

inline Chain0 random_measure(std::mt19937_64& rng, int n, int m, int atoms, bool positive = true) {
  Chain0 mu{n, m, {}};
  std::uniform_real_distribution<double> w(0.1, 2.0);
  for (int i = 0; i < atoms; ++i) {
    Weight wt(m);
    for (double& x : wt) x = positive ? w(rng) : (rng() % 2 ? 1 : -1) * w(rng);
    mu.atoms.push_back({random_point(rng, n), wt});
  }
  return mu;
}

// Pair with equal per-component totals: mu_plus is rescaled to match.
inline std::pair<Chain0, Chain0> random_compatible(std::mt19937_64& rng, int n, int m, int a_minus, int a_plus) {
  Chain0 mm = random_measure(rng, n, m, a_minus), mp = random_measure(rng, n, m, a_plus);
  const Weight tm = total_weight(mm), tp = total_weight(mp);
  for (Atom& at : mp.atoms)
    for (int j = 0; j < m; ++j) at.weight[j] *= tm[j] / tp[j];
  return {mm, mp};
}

}  // namespace testing_support
