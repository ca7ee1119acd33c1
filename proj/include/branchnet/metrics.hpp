#pragma once

// Flat-norm brackets, slicing by affine functions, the coarea identity and a
// Monte Carlo check of the integral-geometric representation of the energy.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <queue>
#include <random>
#include <thread>
#include <vector>

#include "branchnet/chains.hpp"
#include "branchnet/costs.hpp"
#include "branchnet/energy.hpp"

namespace branchnet {

namespace detail {

// Successive shortest paths with Dijkstra on reduced costs. Arc costs may be
// negative only on arcs leaving the source layer of a DAG; callers provide
// feasible initial potentials.
class MinCostFlow {
 public:
  explicit MinCostFlow(int nodes) : adj_(nodes), pot_(nodes, 0.0) {}

  void add_arc(int u, int v, double cap, double cost) {
    adj_[u].push_back({v, static_cast<int>(adj_[v].size()), cap, cost});
    adj_[v].push_back({u, static_cast<int>(adj_[u].size()) - 1, 0.0, -cost});
  }

  void set_potential(int v, double p) { pot_[v] = p; }

  // Pushes flow from s to t along shortest paths while the path cost is
  // negative; returns the total cost of the pushed flow (<= 0).
  double min_cost_partial(int s, int t) {
    const int N = static_cast<int>(adj_.size());
    const double inf = std::numeric_limits<double>::infinity();
    double total = 0.0;
    std::vector<double> d(N);
    std::vector<int> prev_node(N), prev_arc(N);
    for (;;) {
      std::fill(d.begin(), d.end(), inf);
      d[s] = 0.0;
      using Item = std::pair<double, int>;
      std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
      pq.push({0.0, s});
      while (!pq.empty()) {
        auto [du, u] = pq.top();
        pq.pop();
        if (du > d[u]) continue;
        for (int i = 0; i < static_cast<int>(adj_[u].size()); ++i) {
          const Arc& a = adj_[u][i];
          if (a.cap <= 1e-15) continue;
          // reduced costs are >= 0 up to rounding
          const double nd = d[u] + std::max(0.0, a.cost + pot_[u] - pot_[a.to]);
          if (nd < d[a.to]) {
            d[a.to] = nd;
            prev_node[a.to] = u;
            prev_arc[a.to] = i;
            pq.push({nd, a.to});
          }
        }
      }
      if (d[t] == inf) break;
      for (int v = 0; v < N; ++v)
        if (d[v] < inf) pot_[v] += d[v];
      const double path_cost = pot_[t] - pot_[s];
      if (path_cost >= 0.0) break;
      double push = inf;
      for (int v = t; v != s; v = prev_node[v]) push = std::min(push, adj_[prev_node[v]][prev_arc[v]].cap);
      for (int v = t; v != s; v = prev_node[v]) {
        Arc& a = adj_[prev_node[v]][prev_arc[v]];
        a.cap -= push;
        adj_[v][a.rev].cap += push;
      }
      total += push * path_cost;
    }
    return total;
  }

 private:
  struct Arc {
    int to;
    int rev;
    double cap;
    double cost;
  };
  std::vector<std::vector<Arc>> adj_;
  std::vector<double> pot_;
};

}  // namespace detail

// Exact flat norm of the scalar 0-chain nu_j:
//   min_f sum f_pq |p - q| + (A - sum f) + (B - sum f)
// over partial transports f from positive atoms (total A) to negative atoms
// (total B). Segments between atoms are optimal fillings for a norm mass, so
// this LP is the whole story. Rewritten as A + B + min sum f_pq (|p-q| - 2).
inline double flat_norm_0chain_component(const Chain0& nu, int j) {
  if (j < 0 || j >= nu.m) throw InputError("flat_norm_0chain_component: component index out of range");
  const Chain0 c = canonicalize(component_lift(nu, j));
  std::vector<const Atom*> pos, neg;
  double A = 0.0, B = 0.0;
  for (const Atom& at : c.atoms) {
    if (at.weight[j] > 0.0) {
      pos.push_back(&at);
      A += at.weight[j];
    } else if (at.weight[j] < 0.0) {
      neg.push_back(&at);
      B -= at.weight[j];
    }
  }
  if (pos.empty() || neg.empty()) return A + B;
  const int P = static_cast<int>(pos.size()), Q = static_cast<int>(neg.size());
  const int s = P + Q, t = P + Q + 1;
  detail::MinCostFlow mcf(P + Q + 2);
  std::vector<double> nmin(Q, 0.0);
  for (int i = 0; i < P; ++i) mcf.add_arc(s, i, pos[i]->weight[j], 0.0);
  for (int i = 0; i < P; ++i)
    for (int k = 0; k < Q; ++k) {
      const double d = detail::dist(pos[i]->position, neg[k]->position);
      if (d < 2.0) {
        mcf.add_arc(i, P + k, std::numeric_limits<double>::infinity(), d - 2.0);
        nmin[k] = std::min(nmin[k], d - 2.0);
      }
    }
  double tpot = 0.0;
  for (int k = 0; k < Q; ++k) {
    mcf.add_arc(P + k, t, -neg[k]->weight[j], 0.0);
    mcf.set_potential(P + k, nmin[k]);
    tpot = std::min(tpot, nmin[k]);
  }
  mcf.set_potential(t, tpot);
  return std::max(0.0, A + B + mcf.min_cost_partial(s, t));
}

// Bracket of the flat norm. For a 0-chain the per-component values are exact;
// for a 1-chain component j is bracketed by [F(boundary of the lift), mass of
// the lift].
//   lower = max_j per_component_lower[j]
//   upper = min(mass, sum_j per_component_upper[j])
struct FlatBounds {
  double lower = 0.0;
  double upper = 0.0;
  std::vector<double> per_component_lower;
  std::vector<double> per_component_upper;
};

namespace detail {

inline FlatBounds assemble_bounds(std::vector<double> lo, std::vector<double> up, double total_mass) {
  FlatBounds b;
  b.per_component_lower = std::move(lo);
  b.per_component_upper = std::move(up);
  double sum = 0.0;
  for (double x : b.per_component_lower) b.lower = std::max(b.lower, x);
  for (double x : b.per_component_upper) sum += x;
  b.upper = std::min(total_mass, sum);
  b.lower = std::min(b.lower, b.upper);
  return b;
}

}  // namespace detail

inline FlatBounds flat_bounds(const Chain0& nu) {
  const Chain0 c = canonicalize(nu);
  std::vector<double> vals(c.m);
  for (int j = 0; j < c.m; ++j) vals[j] = flat_norm_0chain_component(c, j);
  return detail::assemble_bounds(vals, vals, mass(c));
}

inline FlatBounds flat_bounds(const Chain1& T) {
  const Chain1 c = T.canonical ? T : canonicalize(T);
  std::vector<double> lo(c.m), up(c.m);
  for (int j = 0; j < c.m; ++j) {
    const Chain1 lift = component_lift(c, j);
    up[j] = mass(lift);
    lo[j] = std::min(up[j], flat_norm_0chain_component(boundary(lift), j));
  }
  return detail::assemble_bounds(lo, up, mass(c));
}

// ---- slicing ---------------------------------------------------------------

struct SliceResult {
  Chain0 chain;
  double y_used = 0.0;
  bool perturbed = false;
};

// <T, f, y>: one atom per edge crossing {f = y}, signed +theta when f grows
// along the edge orientation. Equals boundary(T restricted to {f <= y}) minus
// (boundary T) restricted to {f <= y}. A level through a vertex is moved by
// 1e-9 (max f - min f) until it is generic.
inline SliceResult slice(const Chain1& T, const AffineFunctional& f, double y) {
  if (static_cast<int>(f.gradient.size()) != T.n) throw InputError("slice: gradient has wrong dimension");
  double fmin = kInfinity, fmax = -kInfinity;
  std::vector<double> values;
  for (const Edge& e : T.edges) {
    for (const Point* p : {&e.a, &e.b}) {
      const double v = f(*p);
      values.push_back(v);
      fmin = std::min(fmin, v);
      fmax = std::max(fmax, v);
    }
  }
  SliceResult res;
  res.y_used = y;
  const double range = values.empty() ? 0.0 : fmax - fmin;
  const double step = 1e-9 * (range > 0.0 ? range : 1.0);
  for (int guard = 0; guard < 64; ++guard) {
    bool hit = false;
    for (double v : values)
      if (v == res.y_used) {
        hit = true;
        break;
      }
    if (!hit) break;
    res.perturbed = true;
    res.y_used += step;
  }
  Chain0 raw{T.n, T.m, {}};
  for (const Edge& e : T.edges) {
    const double fa = f(e.a), fb = f(e.b);
    if ((fa - res.y_used) * (fb - res.y_used) >= 0.0) continue;
    const double t = (res.y_used - fa) / (fb - fa);
    raw.atoms.push_back({detail::lerp(e.a, e.b, t), fb > fa ? e.theta : detail::negated(e.theta)});
  }
  res.chain = canonicalize(raw);
  return res;
}

struct CoareaResult {
  double integral = 0.0;  // integral over y of mass(slice(T, f, y))
  double bound = 0.0;     // Lip(f) * mass(T)
};

inline CoareaResult coarea_check(const Chain1& T, const AffineFunctional& f) {
  CoareaResult r;
  detail::CompensatedSum s;
  for (const Edge& e : T.edges) s.add(detail::norm2(e.theta) * std::abs(f(e.b) - f(e.a)));
  r.integral = s.value();
  r.bound = f.lipschitz() * mass(T);
  return r;
}

// chi(nu) = sum of the atom weights.
inline Weight augmentation(const Chain0& nu) { return total_weight(nu); }

// ---- integral-geometric identity -------------------------------------------

// c(n,1) = 1 / E|u . v| for v uniform on the unit sphere of R^n and fixed
// unit u:  sqrt(pi) Gamma((n+1)/2) / Gamma(n/2). Equal to pi/2 for n = 2.
inline double ig_constant(int n) {
  if (n < 1) throw InputError("ig_constant: n must be >= 1");
  return std::sqrt(M_PI) * std::exp(std::lgamma(0.5 * (n + 1)) - std::lgamma(0.5 * n));
}

namespace detail {

inline int thread_budget() {
  int t = 1;
  if (const char* env = std::getenv("BRANCHNET_THREADS")) t = std::max(1, std::atoi(env));
  else t = std::max(1u, std::thread::hardware_concurrency());
  return t;
}

inline constexpr std::size_t kMcChunk = 1 << 16;

// Deterministic parallel Monte Carlo: sample s lives in chunk s / kMcChunk,
// each chunk has its own generator and partial sums are reduced in chunk
// order, so the result does not depend on the thread count.
template <class SampleSum>
double mc_mean(std::size_t samples, std::uint64_t seed, const SampleSum& chunk_sum) {
  const std::size_t chunks = (samples + kMcChunk - 1) / kMcChunk;
  std::vector<double> partial(chunks, 0.0);
  auto work = [&](std::size_t first, std::size_t stride) {
    for (std::size_t c = first; c < chunks; c += stride) {
      std::seed_seq ss{seed, static_cast<std::uint64_t>(c)};
      std::mt19937_64 rng(ss);
      const std::size_t count = std::min(kMcChunk, samples - c * kMcChunk);
      partial[c] = chunk_sum(rng, count);
    }
  };
  const std::size_t threads = std::min<std::size_t>(thread_budget(), std::max<std::size_t>(chunks, 1));
  if (threads <= 1) {
    work(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t i = 0; i < threads; ++i) pool.emplace_back(work, i, threads);
    for (auto& th : pool) th.join();
  }
  double total = 0.0;
  for (double p : partial) total += p;
  return samples ? total / static_cast<double>(samples) : 0.0;
}

inline void random_direction(std::mt19937_64& rng, int n, std::vector<double>& v) {
  if (n == 2) {
    const double phi = std::uniform_real_distribution<double>(0.0, 2.0 * M_PI)(rng);
    v[0] = std::cos(phi);
    v[1] = std::sin(phi);
    return;
  }
  v = sample_unit(n, rng);
}

}  // namespace detail

// Monte Carlo estimate of 1 / E|v_1|; should reproduce ig_constant(n).
inline double calibrate_ig_constant(int n, std::size_t samples = 1000000, std::uint64_t seed = 5) {
  const double mean = detail::mc_mean(samples, seed, [n](std::mt19937_64& rng, std::size_t count) {
    std::vector<double> v(n);
    double s = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
      detail::random_direction(rng, n, v);
      s += std::abs(v[0]);
    }
    return s;
  });
  return 1.0 / mean;
}

struct IgCheck {
  double estimate = 0.0;
  double exact = 0.0;
  double rel_err = 0.0;
};

// E(T) = c(n,1) E_v [ sum_e C(theta_e) |(b_e - a_e) . v| ]: for each sampled
// direction the integral over the slicing levels has that closed form.
template <TransportCost Cost>
IgCheck ig_identity_mc(const Chain1& T, const Cost& cost, std::size_t samples = 1000000,
                       std::uint64_t seed = 3, double c_n1 = 0.0) {
  if (T.n < 2) throw InputError("ig_identity_mc: needs n >= 2");
  IgCheck r;
  r.exact = energy(T, cost);
  if (T.edges.empty()) return r;
  const int n = T.n;
  std::vector<double> d;  // C(theta_e) (b_e - a_e), flattened
  d.reserve(T.edges.size() * n);
  for (const Edge& e : T.edges) {
    const double c = cost(e.theta);
    for (int i = 0; i < n; ++i) d.push_back(c * (e.b[i] - e.a[i]));
  }
  const std::size_t E = T.edges.size();
  const double mean = detail::mc_mean(samples, seed, [&](std::mt19937_64& rng, std::size_t count) {
    std::vector<double> v(n);
    double s = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
      detail::random_direction(rng, n, v);
      const double* p = d.data();
      for (std::size_t k = 0; k < E; ++k, p += n) {
        double dot = 0.0;
        for (int q = 0; q < n; ++q) dot += p[q] * v[q];
        s += std::abs(dot);
      }
    }
    return s;
  });
  r.estimate = (c_n1 > 0.0 ? c_n1 : ig_constant(n)) * mean;
  r.rel_err = r.exact > 0.0 ? std::abs(r.estimate - r.exact) / r.exact : std::abs(r.estimate);
  return r;
}

}  // namespace branchnet
