#pragma once

// Polyhedral 0- and 1-chains in R^n with R^m multiplicities.
//
// A Chain0 is a finite atomic measure (points carrying weight vectors); a
// Chain1 is a finite sum of oriented segments carrying multiplicity vectors.
// Canonical 1-chains have non-overlapping edges (they meet only at shared,
// snapped endpoints), each edge oriented so that `b` is the lexicographically
// larger endpoint, and no zero-multiplicity edges.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "branchnet/detail/vec.hpp"
#include "branchnet/errors.hpp"

namespace branchnet {

inline constexpr double kDefaultEpsGeom = 1e-9;
inline constexpr double kZeroMultiplicityRel = 1e-12;

struct Atom {
  Point position;
  Weight weight;
};

struct Chain0 {
  int n = 2;
  int m = 1;
  std::vector<Atom> atoms;

  bool empty() const { return atoms.empty(); }
};

struct Edge {
  Point a;
  Point b;
  Weight theta;

  double length() const { return detail::dist(a, b); }
};

struct Chain1 {
  int n = 2;
  int m = 1;
  std::vector<Edge> edges;
  bool canonical = false;

  bool empty() const { return edges.empty(); }
};

// Closed axis-aligned box.
struct Box {
  Point lo;
  Point hi;

  bool contains(std::span<const double> p) const {
    for (std::size_t i = 0; i < p.size(); ++i)
      if (p[i] < lo[i] || p[i] > hi[i]) return false;
    return true;
  }
};

// f(x) = gradient . x + offset
struct AffineFunctional {
  Vec gradient;
  double offset = 0.0;

  double operator()(std::span<const double> x) const {
    return detail::dot(gradient, x) + offset;
  }
  double lipschitz() const { return detail::norm2(gradient); }
};

namespace detail {

inline double extent_scale(const std::vector<const Point*>& pts) {
  if (pts.empty()) return 1.0;
  const std::size_t n = pts.front()->size();
  double ext = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    double lo = (*pts.front())[k], hi = lo;
    for (const Point* p : pts) {
      lo = std::min(lo, (*p)[k]);
      hi = std::max(hi, (*p)[k]);
    }
    ext = std::max(ext, hi - lo);
  }
  return std::max(1.0, ext);
}

// Clusters points within `eps` of an existing representative. The first
// point inserted in a cluster is its representative, so callers insert
// "trusted" coordinates (input endpoints) first.
class PointSnapper {
 public:
  PointSnapper(int n, double eps) : n_(n), eps_(eps) {}

  int insert(std::span<const double> p) {
    const auto base = key(p);
    std::vector<long long> probe(base.size());
    const int cells = ipow3(n_);
    for (int code = 0; code < cells; ++code) {
      int c = code;
      for (int i = 0; i < n_; ++i) {
        probe[i] = base[i] + (c % 3) - 1;
        c /= 3;
      }
      auto it = buckets_.find(probe);
      if (it == buckets_.end()) continue;
      for (int id : it->second)
        if (dist(points_[id], p) <= eps_) return id;
    }
    const int id = static_cast<int>(points_.size());
    points_.emplace_back(p.begin(), p.end());
    buckets_[base].push_back(id);
    return id;
  }

  const Point& point(int id) const { return points_[id]; }
  std::size_t size() const { return points_.size(); }

 private:
  struct KeyHash {
    std::size_t operator()(const std::vector<long long>& k) const {
      std::uint64_t h = 1469598103934665603ull;
      for (long long v : k) {
        h ^= static_cast<std::uint64_t>(v);
        h *= 1099511628211ull;
      }
      return static_cast<std::size_t>(h);
    }
  };

  static int ipow3(int n) {
    int r = 1;
    for (int i = 0; i < n; ++i) r *= 3;
    return r;
  }

  std::vector<long long> key(std::span<const double> p) const {
    std::vector<long long> k(p.size());
    for (std::size_t i = 0; i < p.size(); ++i)
      k[i] = static_cast<long long>(std::floor(p[i] / eps_));
    return k;
  }

  int n_;
  double eps_;
  std::vector<Point> points_;
  std::unordered_map<std::vector<long long>, std::vector<int>, KeyHash> buckets_;
};

struct Split {
  double t;
  Point p;
};

struct SegRef {
  const Point* a;
  const Point* b;
  const Weight* theta;
  int layer;
  Vec d;
  double len;
  Vec lo, hi;
  std::vector<Split> splits;
};

inline void add_split(SegRef& s, double t, const Point& p, double eps) {
  if (t * s.len > eps && (1.0 - t) * s.len > eps) s.splits.push_back({t, p});
}

inline double point_line_distance(std::span<const double> q, const SegRef& s) {
  const Vec r = sub(q, *s.a);
  const double t = dot(r, s.d) / (s.len * s.len);
  double acc = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double c = r[i] - t * s.d[i];
    acc += c * c;
  }
  return std::sqrt(acc);
}

// Records the mutual split points of two segments (collinear overlaps,
// T-junctions, proper crossings), all within tolerance eps.
inline void intersect_segments(SegRef& P, SegRef& Q, double eps) {
  const double a = P.len * P.len, e = Q.len * Q.len;
  const double b = dot(P.d, Q.d);
  const Vec r = sub(*P.a, *Q.a);
  const double c = dot(P.d, r), f = dot(Q.d, r);
  const double denom = a * e - b * b;

  if (denom <= 1e-12 * a * e) {
    if (point_line_distance(*Q.a, P) > eps || point_line_distance(*Q.b, P) > eps) return;
    for (const Point* q : {Q.a, Q.b})
      add_split(P, dot(sub(*q, *P.a), P.d) / a, *q, eps);
    for (const Point* q : {P.a, P.b})
      add_split(Q, dot(sub(*q, *Q.a), Q.d) / e, *q, eps);
    return;
  }

  double s = std::clamp((b * f - c * e) / denom, 0.0, 1.0);
  double t = (b * s + f) / e;
  if (t < 0.0) {
    t = 0.0;
    s = std::clamp(-c / a, 0.0, 1.0);
  } else if (t > 1.0) {
    t = 1.0;
    s = std::clamp((b - c) / a, 0.0, 1.0);
  }
  const Point p1 = lerp(*P.a, *P.b, s);
  const Point p2 = lerp(*Q.a, *Q.b, t);
  if (dist(p1, p2) > eps) return;

  const bool interior_s = s * P.len > eps && (1.0 - s) * P.len > eps;
  const bool interior_t = t * Q.len > eps && (1.0 - t) * Q.len > eps;
  if (!interior_s && !interior_t) return;
  Point x;
  if (!interior_t) {
    x = (t * Q.len <= eps) ? *Q.a : *Q.b;
  } else if (!interior_s) {
    x = (s * P.len <= eps) ? *P.a : *P.b;
  } else {
    x = lerp(p1, p2, 0.5);
  }
  if (interior_s) P.splits.push_back({s, x});
  if (interior_t) Q.splits.push_back({t, x});
}

}  // namespace detail

// Edge of a common refinement of several chains: one multiplicity per layer.
struct RefinedEdge {
  Point a;
  Point b;
  std::vector<Weight> theta;
};

// Common segment refinement of several 1-chains. Overlapping portions are
// split at all mutual endpoints and intersections and merged; every output
// edge carries the summed multiplicity of each input layer on it. Edges whose
// multiplicity vanishes in every layer are dropped.
inline std::vector<RefinedEdge> refine(std::span<const Chain1* const> layers,
                                       double eps_geom = kDefaultEpsGeom) {
  if (!(eps_geom > 0.0)) throw InputError("refine: eps_geom must be positive");
  if (layers.empty()) return {};
  const int n = layers.front()->n, m = layers.front()->m;
  const int L = static_cast<int>(layers.size());

  std::vector<const Point*> all_pts;
  double max_theta = 0.0;
  for (const Chain1* c : layers) {
    if (c->n != n || c->m != m) throw InputError("refine: dimension mismatch between chains");
    for (const Edge& e : c->edges) {
      if (static_cast<int>(e.a.size()) != n || static_cast<int>(e.b.size()) != n ||
          static_cast<int>(e.theta.size()) != m)
        throw InputError("refine: edge has wrong dimensions");
      if (!detail::all_finite(e.a) || !detail::all_finite(e.b) || !detail::all_finite(e.theta))
        throw InputError("refine: non-finite edge data");
      all_pts.push_back(&e.a);
      all_pts.push_back(&e.b);
      max_theta = std::max(max_theta, detail::norm2(e.theta));
    }
  }
  const double eps = eps_geom * detail::extent_scale(all_pts);
  const double eps_mult = kZeroMultiplicityRel * max_theta;

  std::vector<detail::SegRef> segs;
  for (int l = 0; l < L; ++l) {
    for (const Edge& e : layers[l]->edges) {
      detail::SegRef s{&e.a, &e.b, &e.theta, l, detail::sub(e.b, e.a), 0.0, {}, {}, {}};
      s.len = detail::norm2(s.d);
      if (s.len <= eps) {
        std::ostringstream msg;
        msg << "degenerate edge of length " << s.len << " (tolerance " << eps << ")";
        throw InputError(msg.str());
      }
      s.lo.resize(n);
      s.hi.resize(n);
      for (int k = 0; k < n; ++k) {
        s.lo[k] = std::min(e.a[k], e.b[k]) - eps;
        s.hi[k] = std::max(e.a[k], e.b[k]) + eps;
      }
      segs.push_back(std::move(s));
    }
  }

  detail::PointSnapper snap(n, eps);
  for (const auto& s : segs) {
    snap.insert(*s.a);
    snap.insert(*s.b);
  }

  std::vector<std::size_t> order(segs.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t i, std::size_t j) { return segs[i].lo[0] < segs[j].lo[0]; });
  for (std::size_t oi = 0; oi < order.size(); ++oi) {
    auto& P = segs[order[oi]];
    for (std::size_t oj = oi + 1; oj < order.size(); ++oj) {
      auto& Q = segs[order[oj]];
      if (Q.lo[0] > P.hi[0]) break;
      bool overlap = true;
      for (int k = 1; k < n && overlap; ++k)
        overlap = Q.lo[k] <= P.hi[k] && P.lo[k] <= Q.hi[k];
      if (overlap) detail::intersect_segments(P, Q, eps);
    }
  }

  std::map<std::pair<int, int>, std::vector<Weight>> acc;
  for (auto& s : segs) {
    std::sort(s.splits.begin(), s.splits.end(),
              [](const detail::Split& x, const detail::Split& y) { return x.t < y.t; });
    std::vector<int> ids;
    ids.push_back(snap.insert(*s.a));
    for (const auto& sp : s.splits) {
      const int id = snap.insert(sp.p);
      if (id != ids.back()) ids.push_back(id);
    }
    const int end = snap.insert(*s.b);
    if (end != ids.back()) ids.push_back(end);
    for (std::size_t k = 0; k + 1 < ids.size(); ++k) {
      int u = ids[k], v = ids[k + 1];
      double sign = 1.0;
      if (detail::lex_less(snap.point(v), snap.point(u))) {
        std::swap(u, v);
        sign = -1.0;
      }
      auto& slot = acc[{u, v}];
      if (slot.empty()) slot.assign(L, Weight(m, 0.0));
      detail::axpy(sign, *s.theta, slot[s.layer]);
    }
  }

  std::vector<RefinedEdge> out;
  for (auto& [key, thetas] : acc) {
    bool any = false;
    for (auto& th : thetas) {
      if (detail::norm2(th) <= eps_mult)
        std::fill(th.begin(), th.end(), 0.0);
      else
        any = true;
    }
    if (!any) continue;
    out.push_back({snap.point(key.first), snap.point(key.second), std::move(thetas)});
  }
  std::sort(out.begin(), out.end(), [](const RefinedEdge& x, const RefinedEdge& y) {
    if (x.a != y.a) return detail::lex_less(x.a, y.a);
    return detail::lex_less(x.b, y.b);
  });
  return out;
}

// Split points are computed pairwise from the input segments, so nearly
// concurrent triples can leave T-junctions within tolerance in the output.
// Re-refining until nothing changes makes the result a fixed point.
inline Chain1 canonicalize(const Chain1& T, double eps_geom = kDefaultEpsGeom) {
  Chain1 cur = T;
  for (int pass = 0; pass < 8; ++pass) {
    const Chain1* layers[] = {&cur};
    Chain1 out{T.n, T.m, {}, true};
    for (auto& r : refine(layers, eps_geom))
      out.edges.push_back({std::move(r.a), std::move(r.b), std::move(r.theta.front())});
    bool same = pass > 0 && out.edges.size() == cur.edges.size();
    for (std::size_t i = 0; same && i < out.edges.size(); ++i)
      same = out.edges[i].a == cur.edges[i].a && out.edges[i].b == cur.edges[i].b;
    cur = std::move(out);
    if (same) break;
  }
  return cur;
}

inline Chain0 canonicalize(const Chain0& nu, double eps_geom = kDefaultEpsGeom) {
  std::vector<const Point*> pts;
  double max_w = 0.0;
  for (const Atom& at : nu.atoms) {
    if (static_cast<int>(at.position.size()) != nu.n || static_cast<int>(at.weight.size()) != nu.m)
      throw InputError("canonicalize: atom has wrong dimensions");
    if (!detail::all_finite(at.position) || !detail::all_finite(at.weight))
      throw InputError("canonicalize: non-finite atom data");
    pts.push_back(&at.position);
    max_w = std::max(max_w, detail::norm2(at.weight));
  }
  detail::PointSnapper snap(nu.n, eps_geom * detail::extent_scale(pts));
  std::vector<Weight> sums;
  for (const Atom& at : nu.atoms) {
    const int id = snap.insert(at.position);
    if (id >= static_cast<int>(sums.size())) sums.resize(id + 1, Weight(nu.m, 0.0));
    detail::axpy(1.0, at.weight, sums[id]);
  }
  Chain0 out{nu.n, nu.m, {}};
  const double eps_mult = kZeroMultiplicityRel * max_w;
  for (std::size_t id = 0; id < sums.size(); ++id)
    if (detail::norm2(sums[id]) > eps_mult) out.atoms.push_back({snap.point(id), sums[id]});
  std::sort(out.atoms.begin(), out.atoms.end(),
            [](const Atom& x, const Atom& y) { return detail::lex_less(x.position, y.position); });
  return out;
}

// ---- arithmetic -----------------------------------------------------------

inline Chain1 negate(const Chain1& T) {
  Chain1 out = T;
  for (Edge& e : out.edges)
    for (double& x : e.theta) x = -x;
  return out;
}

inline Chain0 negate(const Chain0& nu) {
  Chain0 out = nu;
  for (Atom& at : out.atoms)
    for (double& x : at.weight) x = -x;
  return out;
}

// Concatenation without canonicalization.
inline Chain1 concat(const Chain1& T, const Chain1& S) {
  if (T.n != S.n || T.m != S.m) throw InputError("concat: dimension mismatch");
  Chain1 out{T.n, T.m, T.edges, false};
  out.edges.insert(out.edges.end(), S.edges.begin(), S.edges.end());
  return out;
}

inline Chain0 concat(const Chain0& a, const Chain0& b) {
  if (a.n != b.n || a.m != b.m) throw InputError("concat: dimension mismatch");
  Chain0 out{a.n, a.m, a.atoms};
  out.atoms.insert(out.atoms.end(), b.atoms.begin(), b.atoms.end());
  return out;
}

inline Chain1 sum(const Chain1& T, const Chain1& S, double eps_geom = kDefaultEpsGeom) {
  return canonicalize(concat(T, S), eps_geom);
}
inline Chain1 difference(const Chain1& T, const Chain1& S, double eps_geom = kDefaultEpsGeom) {
  return canonicalize(concat(T, negate(S)), eps_geom);
}
inline Chain0 sum(const Chain0& a, const Chain0& b, double eps_geom = kDefaultEpsGeom) {
  return canonicalize(concat(a, b), eps_geom);
}
inline Chain0 difference(const Chain0& a, const Chain0& b, double eps_geom = kDefaultEpsGeom) {
  return canonicalize(concat(a, negate(b)), eps_geom);
}

// ---- boundary / divergence / mass -----------------------------------------

inline Chain0 boundary(const Chain1& T, double eps_geom = kDefaultEpsGeom) {
  Chain0 raw{T.n, T.m, {}};
  raw.atoms.reserve(2 * T.edges.size());
  for (const Edge& e : T.edges) {
    raw.atoms.push_back({e.b, e.theta});
    raw.atoms.push_back({e.a, detail::negated(e.theta)});
  }
  return canonicalize(raw, eps_geom);
}

inline Chain0 divergence(const Chain1& T, double eps_geom = kDefaultEpsGeom) {
  return negate(boundary(T, eps_geom));
}

inline double mass(const Chain1& T) {
  detail::CompensatedSum s;
  for (const Edge& e : T.edges) s.add(detail::norm2(e.theta) * e.length());
  return s.value();
}

inline double mass(const Chain0& nu) {
  detail::CompensatedSum s;
  for (const Atom& at : nu.atoms) s.add(detail::norm2(at.weight));
  return s.value();
}

// Largest weight entry of the canonical difference a - b (0 when equal).
inline double max_weight_error(const Chain0& a, const Chain0& b,
                               double eps_geom = kDefaultEpsGeom) {
  double err = 0.0;
  for (const Atom& at : difference(a, b, eps_geom).atoms)
    err = std::max(err, detail::norm_inf(at.weight));
  return err;
}

// T == S as measures, up to `mass_tol` of residual mass.
inline bool chains_equal(const Chain1& T, const Chain1& S, double mass_tol = 1e-9,
                         double eps_geom = kDefaultEpsGeom) {
  return mass(difference(T, S, eps_geom)) <= mass_tol;
}

// ---- restriction ----------------------------------------------------------

namespace detail {

struct ClipResult {
  bool hit = false;
  double t0 = 0.0, t1 = 1.0;
  int face0 = -1, face1 = -1;  // coordinate fixed at the clip point, if any
  double value0 = 0.0, value1 = 0.0;
};

inline ClipResult clip_to_box(const Edge& e, const Box& box) {
  ClipResult r;
  const std::size_t n = e.a.size();
  for (std::size_t k = 0; k < n; ++k) {
    const double p = e.b[k] - e.a[k];
    if (p == 0.0) {
      if (e.a[k] < box.lo[k] || e.a[k] > box.hi[k]) return r;
      continue;
    }
    double tlo = (box.lo[k] - e.a[k]) / p, thi = (box.hi[k] - e.a[k]) / p;
    double vlo = box.lo[k], vhi = box.hi[k];
    if (tlo > thi) {
      std::swap(tlo, thi);
      std::swap(vlo, vhi);
    }
    if (tlo > r.t0) {
      r.t0 = tlo;
      r.face0 = static_cast<int>(k);
      r.value0 = vlo;
    }
    if (thi < r.t1) {
      r.t1 = thi;
      r.face1 = static_cast<int>(k);
      r.value1 = vhi;
    }
  }
  r.hit = r.t1 > r.t0;
  return r;
}

inline Point point_at(const Edge& e, double t, int face, double value) {
  if (t <= 0.0) return e.a;
  if (t >= 1.0) return e.b;
  Point p = lerp(e.a, e.b, t);
  if (face >= 0) p[face] = value;
  return p;
}

inline void push_piece(Chain1& out, Point a, Point b, const Weight& theta, double eps) {
  if (dist(a, b) <= eps) return;
  out.edges.push_back({std::move(a), std::move(b), theta});
}

inline double chain_eps(const Chain1& T, double eps_geom) {
  std::vector<const Point*> pts;
  for (const Edge& e : T.edges) {
    pts.push_back(&e.a);
    pts.push_back(&e.b);
  }
  return eps_geom * extent_scale(pts);
}

}  // namespace detail

// T restricted to the closed box B. Clip points are placed exactly on the box
// faces so restrict(T,B) + restrict_complement(T,B) reassembles T.
inline Chain1 restrict(const Chain1& T, const Box& B, double eps_geom = kDefaultEpsGeom) {
  Chain1 out{T.n, T.m, {}, T.canonical};
  const double eps = detail::chain_eps(T, eps_geom);
  for (const Edge& e : T.edges) {
    const auto c = detail::clip_to_box(e, B);
    if (!c.hit) continue;
    detail::push_piece(out, detail::point_at(e, c.t0, c.face0, c.value0),
                       detail::point_at(e, c.t1, c.face1, c.value1), e.theta, eps);
  }
  return out;
}

inline Chain1 restrict_complement(const Chain1& T, const Box& B,
                                  double eps_geom = kDefaultEpsGeom) {
  Chain1 out{T.n, T.m, {}, T.canonical};
  const double eps = detail::chain_eps(T, eps_geom);
  for (const Edge& e : T.edges) {
    const auto c = detail::clip_to_box(e, B);
    if (!c.hit) {
      out.edges.push_back(e);
      continue;
    }
    if (c.t0 > 0.0) detail::push_piece(out, e.a, detail::point_at(e, c.t0, c.face0, c.value0), e.theta, eps);
    if (c.t1 < 1.0) detail::push_piece(out, detail::point_at(e, c.t1, c.face1, c.value1), e.b, e.theta, eps);
  }
  return out;
}

inline Chain0 restrict(const Chain0& nu, const Box& B) {
  Chain0 out{nu.n, nu.m, {}};
  for (const Atom& at : nu.atoms)
    if (B.contains(at.position)) out.atoms.push_back(at);
  return out;
}

// T restricted to the sublevel set {f <= y}.
inline Chain1 restrict_sublevel(const Chain1& T, const AffineFunctional& f, double y,
                                double eps_geom = kDefaultEpsGeom) {
  Chain1 out{T.n, T.m, {}, T.canonical};
  const double eps = detail::chain_eps(T, eps_geom);
  for (const Edge& e : T.edges) {
    const double fa = f(e.a), fb = f(e.b);
    if (fa <= y && fb <= y) {
      out.edges.push_back(e);
    } else if (fa < y && fb > y) {
      detail::push_piece(out, e.a, detail::lerp(e.a, e.b, (y - fa) / (fb - fa)), e.theta, eps);
    } else if (fb < y && fa > y) {
      detail::push_piece(out, detail::lerp(e.a, e.b, (y - fa) / (fb - fa)), e.b, e.theta, eps);
    }
  }
  return out;
}

inline Chain0 restrict_sublevel(const Chain0& nu, const AffineFunctional& f, double y) {
  Chain0 out{nu.n, nu.m, {}};
  for (const Atom& at : nu.atoms)
    if (f(at.position) <= y) out.atoms.push_back(at);
  return out;
}

// ---- components -----------------------------------------------------------

// Lift of component j (0-based): every multiplicity projected onto e_j.
inline Chain1 component_lift(const Chain1& T, int j) {
  if (j < 0 || j >= T.m) throw InputError("component_lift: component index out of range");
  Chain1 out{T.n, T.m, {}, T.canonical};
  for (const Edge& e : T.edges) {
    if (e.theta[j] == 0.0) continue;
    Weight w(T.m, 0.0);
    w[j] = e.theta[j];
    out.edges.push_back({e.a, e.b, std::move(w)});
  }
  return out;
}

inline Chain0 component_lift(const Chain0& nu, int j) {
  if (j < 0 || j >= nu.m) throw InputError("component_lift: component index out of range");
  Chain0 out{nu.n, nu.m, {}};
  for (const Atom& at : nu.atoms) {
    if (at.weight[j] == 0.0) continue;
    Weight w(nu.m, 0.0);
    w[j] = at.weight[j];
    out.atoms.push_back({at.position, std::move(w)});
  }
  return out;
}

// Tp is a piece of T: on the common refinement every component of Tp is a
// [0,1] fraction of the matching component of T.
inline bool is_piece(const Chain1& Tp, const Chain1& T, double eps = 1e-12,
                     double eps_geom = kDefaultEpsGeom) {
  const Chain1* layers[] = {&Tp, &T};
  for (const RefinedEdge& r : refine(layers, eps_geom)) {
    for (int j = 0; j < T.m; ++j) {
      const double tp = r.theta[0][j], t = r.theta[1][j];
      if (std::abs(tp) <= eps) continue;
      if (tp * t < 0.0 || std::abs(tp) > std::abs(t) + eps) return false;
    }
  }
  return true;
}

inline Weight total_weight(const Chain0& nu) {
  Weight w(nu.m, 0.0);
  for (const Atom& at : nu.atoms) detail::axpy(1.0, at.weight, w);
  return w;
}

// Per-component totals agree, i.e. mu_minus(v) = mu_plus(v) for constant v.
inline bool is_compatible(const Chain0& mu_minus, const Chain0& mu_plus, double eps = 1e-9) {
  if (mu_minus.m != mu_plus.m) throw InputError("is_compatible: component count mismatch");
  const Weight a = total_weight(mu_minus), b = total_weight(mu_plus);
  for (int j = 0; j < mu_minus.m; ++j)
    if (std::abs(a[j] - b[j]) > eps) return false;
  return true;
}

}  // namespace branchnet
