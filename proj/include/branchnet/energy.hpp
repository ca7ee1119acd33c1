#pragma once

#include <cmath>
#include <cstdint>
#include <cstring>
#include <span>
#include <string>

#include "branchnet/chains.hpp"
#include "branchnet/costs.hpp"
#include "branchnet/detail/vec.hpp"
#include "branchnet/errors.hpp"

namespace branchnet {

// E(T) = sum_e C(theta(e)) * length(e). Defined only on non-overlapping
// (canonical) representations; other input is rejected rather than silently
// canonicalized.
template <TransportCost Cost>
double energy(const Chain1& T, const Cost& cost) {
  if (!T.canonical) throw InputError("energy: chain is not canonical (call canonicalize first)");
  if (cost.m() != T.m) throw InputError("energy: cost and chain disagree on m");
  detail::CompensatedSum s;
  for (const Edge& e : T.edges) s.add(cost(e.theta) * e.length());
  return s.value();
}

// Energy of the lift of component j: sum_e C(theta_j(e) e_j) * length(e).
template <TransportCost Cost>
double energy_component(const Chain1& T, const Cost& cost, int j) {
  if (!T.canonical) throw InputError("energy_component: chain is not canonical");
  if (j < 0 || j >= T.m) throw InputError("energy_component: component index out of range");
  detail::CompensatedSum s;
  Weight w(T.m, 0.0);
  for (const Edge& e : T.edges) {
    if (e.theta[j] == 0.0) continue;
    w[j] = e.theta[j];
    s.add(cost(w) * e.length());
  }
  return s.value();
}

// Sum_e C(theta(e)) * length(e) on an arbitrary edge list. For any
// representation this is >= energy(canonicalize(T)) by subadditivity.
template <TransportCost Cost>
double raw_energy(const Chain1& T, const Cost& cost) {
  detail::CompensatedSum s;
  for (const Edge& e : T.edges) s.add(cost(e.theta) * e.length());
  return s.value();
}

enum class BoundKind { None, Cascade, MassControl };

inline const char* to_string(BoundKind k) {
  switch (k) {
    case BoundKind::Cascade: return "cascade";
    case BoundKind::MassControl: return "mass_control";
    case BoundKind::None: break;
  }
  return "none";
}

struct EnergyCertificate {
  double energy = 0.0;
  double bound = kInfinity;
  BoundKind kind = BoundKind::None;
  std::uint64_t inputs_digest = 0;
  std::size_t samples = 0;  // sample count behind a sampled constant, 0 if analytic

  bool satisfied() const { return kind == BoundKind::None || energy <= bound; }
};

// FNV-1a over the raw bytes of all coordinates and multiplicities.
inline std::uint64_t digest(const Chain0& nu, std::uint64_t h = 1469598103934665603ull) {
  auto mix = [&](double x) {
    unsigned char bytes[sizeof(double)];
    std::memcpy(bytes, &x, sizeof(double));
    for (unsigned char b : bytes) {
      h ^= b;
      h *= 1099511628211ull;
    }
  };
  for (const Atom& at : nu.atoms) {
    for (double x : at.position) mix(x);
    for (double x : at.weight) mix(x);
  }
  return h;
}

struct MassBoundConstant {
  double constant = 0.0;
  double inverse_derivative_term = 0.0;  // max over finite axes of 1/f(e_j)
  double ratio_term = 0.0;               // sampled sup |theta|/C(theta), |theta| <= boundary_mass
  std::size_t samples = 0;
};

// Constant K with mass(T') <= K * E(T') for acyclic fluxes T' whose boundary
// has mass `boundary_mass`:
//   K = m * max( max_{j : f(e_j) < inf} 1/f(e_j), sup_{|theta| <= boundary_mass} |theta|/C(theta) ),
// with 1/inf = 0. The supremum is sampled (directions x log-spaced radii, plus
// the coordinate axes), so the constant is certified only on those samples.
template <TransportCost Cost>
MassBoundConstant mass_bound_constant(const Cost& cost, double boundary_mass,
                                      std::size_t directions = 10000, int radii = 64,
                                      std::uint64_t seed = 13) {
  if (!(boundary_mass > 0.0)) throw InputError("mass_bound_constant: boundary_mass must be positive");
  MassBoundConstant out;
  for (int j = 0; j < cost.m(); ++j) {
    Vec e(cost.m(), 0.0);
    e[j] = 1.0;
    const double f = dir_derivative_at_zero(cost, e).value;
    if (std::isfinite(f) && f > 0.0) out.inverse_derivative_term = std::max(out.inverse_derivative_term, 1.0 / f);
  }
  const auto ratio = norm_cost_ratio(cost, boundary_mass, directions, radii, seed);
  out.ratio_term = ratio.c;
  out.samples = ratio.samples;
  out.constant = cost.m() * std::max(out.inverse_derivative_term, out.ratio_term);
  return out;
}

}  // namespace branchnet
