#pragma once

// Energy-decreasing moves on polyhedral fluxes and a local-search solver.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "branchnet/chains.hpp"
#include "branchnet/construct.hpp"
#include "branchnet/costs.hpp"
#include "branchnet/energy.hpp"
#include "branchnet/metrics.hpp"

namespace branchnet {

// Vertex/edge view of a canonical chain. Canonical chains share bitwise
// identical endpoint coordinates, so vertices are identified exactly.
struct NetworkGraph {
  struct Arc {
    int u = 0;
    int v = 0;
    Weight theta;  // flux from u to v
    bool alive = true;
  };

  int n = 2;
  int m = 1;
  std::vector<Point> vertices;
  std::vector<Arc> arcs;
  std::vector<std::vector<int>> incident;

  static NetworkGraph from_chain(const Chain1& T) {
    NetworkGraph g;
    g.n = T.n;
    g.m = T.m;
    std::map<Point, int> ids;
    auto id = [&](const Point& p) {
      auto [it, fresh] = ids.emplace(p, static_cast<int>(g.vertices.size()));
      if (fresh) {
        g.vertices.push_back(p);
        g.incident.emplace_back();
      }
      return it->second;
    };
    for (const Edge& e : T.edges) g.add_arc(id(e.a), id(e.b), e.theta);
    return g;
  }

  int add_vertex(Point p) {
    vertices.push_back(std::move(p));
    incident.emplace_back();
    return static_cast<int>(vertices.size()) - 1;
  }

  int add_arc(int u, int v, Weight theta) {
    arcs.push_back({u, v, std::move(theta), true});
    const int e = static_cast<int>(arcs.size()) - 1;
    incident[u].push_back(e);
    if (v != u) incident[v].push_back(e);
    return e;
  }

  void kill(int e) {
    arcs[e].alive = false;
    for (int x : {arcs[e].u, arcs[e].v}) std::erase(incident[x], e);
  }

  int other(int e, int v) const { return arcs[e].u == v ? arcs[e].v : arcs[e].u; }
  double length(int e) const { return detail::dist(vertices[arcs[e].u], vertices[arcs[e].v]); }

  // Flux leaving v through e.
  Weight outflow(int e, int v) const {
    return arcs[e].u == v ? arcs[e].theta : detail::negated(arcs[e].theta);
  }

  // Net flux leaving v (= minus the boundary weight at v).
  Weight net_outflow(int v) const {
    Weight w(m, 0.0);
    for (int e : incident[v]) detail::axpy(1.0, outflow(e, v), w);
    return w;
  }

  // Zero boundary weight at v, relative to the incident multiplicities.
  bool is_free(int v) const {
    double scale = 0.0;
    for (int e : incident[v]) scale = std::max(scale, detail::norm2(arcs[e].theta));
    return !incident[v].empty() && detail::norm2(net_outflow(v)) <= 1e-9 * scale;
  }

  double diameter() const {
    if (vertices.empty()) return 0.0;
    double d2 = 0.0;
    for (int i = 0; i < n; ++i) {
      double lo = kInfinity, hi = -kInfinity;
      for (const Point& p : vertices) {
        lo = std::min(lo, p[i]);
        hi = std::max(hi, p[i]);
      }
      d2 += (hi - lo) * (hi - lo);
    }
    return std::sqrt(d2);
  }

  // Live arcs as a (non-canonical) chain; arcs shorter than min_length or with
  // zero multiplicity are left out.
  Chain1 to_chain(double min_length = 0.0) const {
    Chain1 out{n, m, {}, false};
    for (const Arc& a : arcs) {
      if (!a.alive || detail::norm_inf(a.theta) == 0.0) continue;
      if (detail::dist(vertices[a.u], vertices[a.v]) <= min_length) continue;
      out.edges.push_back({vertices[a.u], vertices[a.v], a.theta});
    }
    return out;
  }
};

namespace detail {

inline const Chain1& require_canonical(const Chain1& T, Chain1& storage) {
  if (T.canonical) return T;
  storage = canonicalize(T);
  return storage;
}

// Directed cycle in component j (arc u->v when theta_j > 0, v->u when < 0),
// returned as arc indices; empty when the component is acyclic.
inline std::vector<int> find_cycle(const NetworkGraph& g, int j) {
  const int V = static_cast<int>(g.vertices.size());
  std::vector<char> color(V, 0);
  std::vector<int> via(V, -1);
  auto head = [&](int e, int from) -> int {
    const auto& a = g.arcs[e];
    const double t = a.theta[j];
    if (t > 0.0 && a.u == from) return a.v;
    if (t < 0.0 && a.v == from) return a.u;
    return -1;
  };
  for (int root = 0; root < V; ++root) {
    if (color[root]) continue;
    std::vector<std::pair<int, std::size_t>> stack{{root, 0}};
    color[root] = 1;
    while (!stack.empty()) {
      auto& [u, pos] = stack.back();
      if (pos == g.incident[u].size()) {
        color[u] = 2;
        stack.pop_back();
        continue;
      }
      const int e = g.incident[u][pos++];
      if (!g.arcs[e].alive) continue;
      const int w = head(e, u);
      if (w < 0) continue;
      if (color[w] == 1) {
        std::vector<int> cycle{e};
        for (int x = u; x != w; x = g.other(via[x], x)) cycle.push_back(via[x]);
        return cycle;
      }
      if (color[w] == 0) {
        color[w] = 1;
        via[w] = e;
        stack.push_back({w, 0});
      }
    }
  }
  return {};
}

}  // namespace detail

// Greedy cycle canceling per component: find a directed cycle on the
// sign-consistent support of theta_j, subtract the smallest |theta_j| on it,
// repeat. The result is a piece of T with the same divergence.
inline Chain1 remove_cycles(const Chain1& T) {
  Chain1 storage;
  const Chain1& C = detail::require_canonical(T, storage);
  NetworkGraph g = NetworkGraph::from_chain(C);
  for (int j = 0; j < C.m; ++j) {
    for (;;) {
      const std::vector<int> cycle = detail::find_cycle(g, j);
      if (cycle.empty()) break;
      int arg = cycle.front();
      for (int e : cycle)
        if (std::abs(g.arcs[e].theta[j]) < std::abs(g.arcs[arg].theta[j])) arg = e;
      const double c = std::abs(g.arcs[arg].theta[j]);
      for (int e : cycle) {
        double& t = g.arcs[e].theta[j];
        t -= std::copysign(c, t);
        if (std::abs(t) <= 1e-15 * c) t = 0.0;
      }
      g.arcs[arg].theta[j] = 0.0;
    }
  }
  return canonicalize(g.to_chain());
}

inline std::vector<bool> is_acyclic_per_component(const Chain1& T) {
  Chain1 storage;
  const Chain1& C = detail::require_canonical(T, storage);
  const NetworkGraph g = NetworkGraph::from_chain(C);
  std::vector<bool> out(C.m);
  for (int j = 0; j < C.m; ++j) out[j] = detail::find_cycle(g, j).empty();
  return out;
}

struct MultiplicityBoundReport {
  bool ok = true;
  std::size_t violations = 0;
  double worst_ratio = 0.0;  // max |theta_j(e)| / (mass(boundary lift_j) / 2)
  std::vector<double> half_boundary_mass;
};

// For acyclic T: |theta_j(e)| <= mass(boundary(lift_j)) / 2 on every edge.
inline MultiplicityBoundReport check_multiplicity_bound(const Chain1& T, double rel_tol = 1e-9) {
  MultiplicityBoundReport r;
  for (int j = 0; j < T.m; ++j) {
    const Chain1 lift = component_lift(T, j);
    const double half = 0.5 * mass(boundary(lift));
    r.half_boundary_mass.push_back(half);
    for (const Edge& e : lift.edges) {
      const double t = std::abs(e.theta[j]);
      if (half > 0.0) r.worst_ratio = std::max(r.worst_ratio, t / half);
      else if (t > 0.0) r.worst_ratio = kInfinity;
      if (t > half + rel_tol * std::max(1.0, half)) {
        r.ok = false;
        ++r.violations;
      }
    }
  }
  return r;
}

// Replaces every degree-2 vertex whose two edges pass the same flux straight
// through (zero boundary there) by the chord between its neighbors.
inline Chain1 straighten(const Chain1& T) {
  Chain1 storage;
  const Chain1& C = detail::require_canonical(T, storage);
  NetworkGraph g = NetworkGraph::from_chain(C);
  bool changed = false;
  for (int v = 0; v < static_cast<int>(g.vertices.size()); ++v) {
    if (g.incident[v].size() != 2 || !g.is_free(v)) continue;
    const int e1 = g.incident[v][0], e2 = g.incident[v][1];
    const int o1 = g.other(e1, v), o2 = g.other(e2, v);
    if (o1 == o2 || o1 == v || o2 == v) continue;
    const Weight through = g.outflow(e2, v);  // flux o1 -> v -> o2
    g.kill(e1);
    g.kill(e2);
    g.add_arc(o1, o2, through);
    changed = true;
  }
  if (!changed) return C;
  return canonicalize(g.to_chain());
}

struct FermatWeberResult {
  Point x;
  double value = 0.0;
  bool at_anchor = false;
  int iterations = 0;
};

// argmin_x sum_i w_i |x - a_i|. An anchor is returned when the subgradient
// condition |sum_{a_i != a_k} w_i (a_k - a_i)/|a_k - a_i|| <= weight at a_k
// certifies it (the objective is convex, so that is a global minimum).
// Otherwise Weiszfeld iteration from `start`; on landing on an anchor the
// iterate is pushed off it by 1e-7 diam along the descent direction. The best
// iterate seen is returned.
inline FermatWeberResult fermat_weber_point(const std::vector<Point>& anchors, const std::vector<double>& w,
                                            const Point& start, int iters = 1000, double tol = 1e-13) {
  if (anchors.empty() || anchors.size() != w.size()) throw InputError("fermat_weber_point: bad anchors");
  const std::size_t A = anchors.size();
  const std::size_t n = start.size();
  auto f = [&](std::span<const double> x) {
    double s = 0.0;
    for (std::size_t i = 0; i < A; ++i) s += w[i] * detail::dist(x, anchors[i]);
    return s;
  };
  double diam = 0.0;
  for (std::size_t i = 0; i < A; ++i)
    for (std::size_t k = i + 1; k < A; ++k) diam = std::max(diam, detail::dist(anchors[i], anchors[k]));

  // pull at anchor k: sum over the other anchors of w_i (a_i - a_k)/|a_i - a_k|
  auto pull = [&](const Point& ak, double& own) {
    Vec r(n, 0.0);
    own = 0.0;
    for (std::size_t i = 0; i < A; ++i) {
      const double d = detail::dist(anchors[i], ak);
      if (d == 0.0) {
        own += w[i];
        continue;
      }
      for (std::size_t q = 0; q < n; ++q) r[q] += w[i] * (anchors[i][q] - ak[q]) / d;
    }
    return r;
  };

  FermatWeberResult best;
  best.x = start;
  best.value = f(start);
  for (std::size_t k = 0; k < A; ++k) {
    double own;
    const Vec r = pull(anchors[k], own);
    if (detail::norm2(r) <= own * (1.0 + 1e-12)) {
      const double v = f(anchors[k]);
      if (v <= best.value) {
        best.x = anchors[k];
        best.value = v;
        best.at_anchor = true;
      }
    }
  }
  if (best.at_anchor || diam == 0.0) return best;

  Point x = start;
  const double coincide = 1e-14 * diam;
  for (int it = 0; it < iters; ++it) {
    best.iterations = it + 1;
    Vec num(n, 0.0);
    double den = 0.0;
    int hit = -1;
    for (std::size_t i = 0; i < A; ++i) {
      const double d = detail::dist(x, anchors[i]);
      if (d <= coincide) {
        hit = static_cast<int>(i);
        break;
      }
      if (w[i] == 0.0) continue;
      detail::axpy(w[i] / d, anchors[i], num);
      den += w[i] / d;
    }
    Point next;
    if (hit >= 0) {
      double own;
      const Vec r = pull(anchors[hit], own);
      const double rn = detail::norm2(r);
      if (rn == 0.0) break;
      next = anchors[hit];
      detail::axpy(1e-7 * diam / rn, r, next);
    } else if (den > 0.0) {
      next = detail::scaled(num, 1.0 / den);
    } else {
      break;
    }
    const double step = detail::dist(next, x);
    x = std::move(next);
    const double v = f(x);
    if (v < best.value) {
      best.value = v;
      best.x = x;
    }
    if (hit < 0 && step <= tol * diam) break;
  }
  return best;
}

namespace detail {

// Moves one vertex of g to the Fermat-Weber point of its neighbors weighted
// by C(theta_e). Returns the displacement.
template <TransportCost Cost>
double relocate_vertex(NetworkGraph& g, int v, const Cost& cost, int iters, double tol) {
  std::vector<Point> anchors;
  std::vector<double> weights;
  for (int e : g.incident[v]) {
    anchors.push_back(g.vertices[g.other(e, v)]);
    weights.push_back(cost(g.arcs[e].theta));
  }
  if (anchors.empty()) return 0.0;
  const FermatWeberResult r = fermat_weber_point(anchors, weights, g.vertices[v], iters, tol);
  const double moved = dist(r.x, g.vertices[v]);
  g.vertices[v] = r.x;
  return moved;
}

}  // namespace detail

// Gauss-Seidel sweeps moving every vertex with zero boundary weight to the
// minimizer of sum_{e at v} C(theta_e) |v - other(e)|, until the largest
// move in a sweep is below tol * diam (at most 100 sweeps).
template <TransportCost Cost>
Chain1 relocate_branch_points(const Chain1& T, const Cost& cost, int iters = 1000, double tol = 1e-12) {
  Chain1 storage;
  const Chain1& C = detail::require_canonical(T, storage);
  NetworkGraph g = NetworkGraph::from_chain(C);
  const double diam = g.diameter();
  std::vector<int> free;
  for (int v = 0; v < static_cast<int>(g.vertices.size()); ++v)
    if (g.is_free(v)) free.push_back(v);
  if (free.empty()) return C;
  for (int sweep = 0; sweep < 100; ++sweep) {
    double biggest = 0.0;
    for (int v : free) biggest = std::max(biggest, detail::relocate_vertex(g, v, cost, iters, tol));
    if (biggest <= tol * diam) break;
  }
  return canonicalize(g.to_chain(kDefaultEpsGeom * std::max(1.0, diam)));
}

enum class Move { CycleRemoval, Straighten, Relocate, MergeSplit };

inline const char* to_string(Move m) {
  switch (m) {
    case Move::CycleRemoval: return "cycle_removal";
    case Move::Straighten: return "straighten";
    case Move::Relocate: return "relocate";
    case Move::MergeSplit: return "merge_split";
  }
  return "?";
}

enum class InitKind { Cone, Cascade };

struct OptimizerConfig {
  std::vector<Move> moves{Move::CycleRemoval, Move::Straighten, Move::Relocate, Move::MergeSplit};
  double rel_tol = 1e-9;
  int max_iters = 50;
  std::uint64_t seed = 1;
  InitKind init = InitKind::Cone;
  int cascade_depth = 3;
  double angle_deg = 30.0;  // merge_split: max angle between the two edges
  double dist_frac = 0.1;   // merge_split: offset of the new vertex, fraction of diam
  int weiszfeld_iters = 1000;

  bool uses(Move m) const { return std::find(moves.begin(), moves.end(), m) != moves.end(); }
};

// Topology move: at each vertex v, an edge and its angular nearest neighbour
// (angle <= angle_deg) are rerouted through a new vertex w joined to v by an
// edge carrying both fluxes; w is placed at the Fermat-Weber point of v and
// the two far ends. Kept iff the local energy drops by more than
// rel_tol * energy(T).
template <TransportCost Cost>
Chain1 merge_split(const Chain1& T, const Cost& cost, const OptimizerConfig& config, int* accepted = nullptr) {
  Chain1 storage;
  const Chain1& C = detail::require_canonical(T, storage);
  NetworkGraph g = NetworkGraph::from_chain(C);
  const double diam = g.diameter();
  const double E = energy(C, cost);
  const double cos_max = std::cos(config.angle_deg * M_PI / 180.0);
  int count = 0;
  const int V0 = static_cast<int>(g.vertices.size());
  for (int v = 0; v < V0; ++v) {
    bool again = true;
    for (int guard = 0; again && guard < 64; ++guard) {
      again = false;
      const std::vector<int> inc = g.incident[v];
      if (inc.size() < 2) break;
      std::vector<Vec> dir;
      for (int e : inc) {
        const double len = g.length(e);
        dir.push_back(len > 0.0 ? detail::scaled(detail::sub(g.vertices[g.other(e, v)], g.vertices[v]), 1.0 / len)
                                : Vec(g.n, 0.0));
      }
      for (std::size_t i = 0; i < inc.size() && !again; ++i) {
        std::size_t best = i;
        double best_cos = -2.0;
        for (std::size_t k = 0; k < inc.size(); ++k) {
          if (k == i) continue;
          const double c = detail::dot(dir[i], dir[k]);
          if (c > best_cos) {
            best_cos = c;
            best = k;
          }
        }
        if (best == i || best_cos < cos_max) continue;
        const int e1 = inc[i], e2 = inc[best];
        const int o1 = g.other(e1, v), o2 = g.other(e2, v);
        if (o1 == o2) continue;
        const Weight phi1 = g.outflow(e1, v), phi2 = g.outflow(e2, v);
        const Weight phi12 = detail::add(phi1, phi2);
        const double len1 = g.length(e1), len2 = g.length(e2);
        Vec bis = detail::add(dir[i], dir[best]);
        const double bn = detail::norm2(bis);
        if (bn < 1e-12) continue;
        const double d = std::min(config.dist_frac * diam, 0.5 * std::min(len1, len2));
        Point w0 = g.vertices[v];
        detail::axpy(d / bn, bis, w0);
        const std::vector<Point> anchors{g.vertices[v], g.vertices[o1], g.vertices[o2]};
        const std::vector<double> weights{cost(phi12), cost(phi1), cost(phi2)};
        const FermatWeberResult fw = fermat_weber_point(anchors, weights, w0, config.weiszfeld_iters);
        const double old_local = cost(phi1) * len1 + cost(phi2) * len2;
        if (!(old_local - fw.value > config.rel_tol * E)) continue;
        int w = -1;
        if (fw.x == g.vertices[v]) continue;
        if (fw.x == g.vertices[o1]) w = o1;
        else if (fw.x == g.vertices[o2]) w = o2;
        else w = g.add_vertex(fw.x);
        g.kill(e1);
        g.kill(e2);
        g.add_arc(v, w, phi12);
        if (w != o1) g.add_arc(w, o1, phi1);
        if (w != o2) g.add_arc(w, o2, phi2);
        ++count;
        again = true;
      }
    }
  }
  if (accepted) *accepted = count;
  if (count == 0) return C;
  return canonicalize(g.to_chain(kDefaultEpsGeom * std::max(1.0, diam)));
}

struct SolutionReport {
  double energy = 0.0;
  double mass = 0.0;
  double boundary_residual = 0.0;  // flat upper bound of divergence(T) - (mu_minus - mu_plus)
  double residual_tolerance = 0.0;
  std::vector<bool> acyclic_per_component;
  bool multiplicity_bound_ok = true;
  bool mass_bound_ok = true;
  double mass_bound_constant = 0.0;
  int iterations = 0;
  std::vector<double> energy_trace;

  bool acyclic() const {
    return std::all_of(acyclic_per_component.begin(), acyclic_per_component.end(), [](bool b) { return b; });
  }
  bool ok() const {
    return boundary_residual <= residual_tolerance && acyclic() && multiplicity_bound_ok && mass_bound_ok;
  }
};

template <TransportCost Cost>
SolutionReport verify_solution(const Chain1& T, const Chain0& mu_minus, const Chain0& mu_plus, const Cost& cost) {
  if (T.n != mu_minus.n || T.m != mu_minus.m || mu_plus.n != T.n || mu_plus.m != T.m)
    throw InputError("verify_solution: dimension mismatch");
  Chain1 storage;
  const Chain1& C = detail::require_canonical(T, storage);
  SolutionReport r;
  r.energy = energy(C, cost);
  r.mass = mass(C);
  const Chain0 target = difference(mu_minus, mu_plus);
  r.boundary_residual = flat_bounds(difference(divergence(C), target)).upper;
  r.residual_tolerance = 1e-9 * std::max(1.0, mass(mu_minus) + mass(mu_plus));
  r.acyclic_per_component = is_acyclic_per_component(C);
  r.multiplicity_bound_ok = check_multiplicity_bound(C).ok;
  const double target_mass = mass(target);
  if (target_mass > 0.0) {
    r.mass_bound_constant = mass_bound_constant(cost, target_mass).constant;
    r.mass_bound_ok = r.mass <= r.mass_bound_constant * r.energy * (1.0 + 1e-9) + 1e-12;
  } else {
    r.mass_bound_ok = r.mass == 0.0;
  }
  return r;
}

// Cone at the |w|-weighted barycenter of all atoms.
inline Chain1 barycenter_cone(const Chain0& mu_minus, const Chain0& mu_plus) {
  Point c(mu_minus.n, 0.0);
  double total = 0.0;
  for (const Chain0* mu : {&mu_minus, &mu_plus})
    for (const Atom& at : mu->atoms) {
      const double w = detail::norm2(at.weight);
      detail::axpy(w, at.position, c);
      total += w;
    }
  if (total > 0.0) c = detail::scaled(c, 1.0 / total);
  return cone(difference(mu_plus, mu_minus), c);
}

struct LocalSearchResult {
  Chain1 chain;
  SolutionReport report;
};

// Starting from a cone (or a dyadic cascade), applies the configured moves in
// a fixed order, keeping each only if the energy does not go up, until a full
// sweep gains less than rel_tol relative energy or max_iters sweeps ran.
template <TransportCost Cost>
LocalSearchResult local_search(const Chain0& mu_minus, const Chain0& mu_plus, const Cost& cost,
                               const OptimizerConfig& config = {}) {
  if (!(config.rel_tol > 0.0)) throw InputError("local_search: rel_tol must be positive");
  if (mu_minus.n != mu_plus.n || mu_minus.m != mu_plus.m || cost.m() != mu_minus.m)
    throw InputError("local_search: dimension mismatch");
  if (!is_compatible(mu_minus, mu_plus, 1e-9 * std::max(1.0, mass(mu_minus) + mass(mu_plus))))
    throw InputError("local_search: incompatible measures");

  Chain1 T;
  if (config.init == InitKind::Cascade) {
    const Chain0 pair[] = {mu_minus, mu_plus};
    const DyadicGrid grid = shifted_grid(bounding_cube(pair), pair, config.cascade_depth + 1, 16, config.seed);
    T = cascade(mu_minus, mu_plus, grid, config.cascade_depth, cost, BetaEnvelope::power(1.0)).chain;
  } else {
    T = barycenter_cone(mu_minus, mu_plus);
  }

  double E = energy(T, cost);
  LocalSearchResult out;
  out.report.energy_trace.push_back(E);
  int it = 0;
  for (; it < config.max_iters; ++it) {
    const double E0 = E;
    for (Move mv : config.moves) {
      Chain1 cand;
      switch (mv) {
        case Move::CycleRemoval: cand = remove_cycles(T); break;
        case Move::Straighten: cand = straighten(T); break;
        case Move::Relocate: cand = relocate_branch_points(T, cost, config.weiszfeld_iters); break;
        case Move::MergeSplit: cand = merge_split(T, cost, config); break;
      }
      const double Ec = energy(cand, cost);
      if (Ec <= E) {
        T = std::move(cand);
        E = Ec;
      }
    }
    out.report.energy_trace.push_back(E);
    if (E0 - E <= config.rel_tol * E0) {
      ++it;
      break;
    }
  }
  out.chain = std::move(T);
  const auto trace = std::move(out.report.energy_trace);
  out.report = verify_solution(out.chain, mu_minus, mu_plus, cost);
  out.report.energy_trace = trace;
  out.report.iterations = it;
  return out;
}

}  // namespace branchnet
