#pragma once

// Multi-material transportation costs C: R^m -> [0, inf).
//
// Built-in families:
//   SumAlpha      C(t) = (sum_j w_j |t_j|)^alpha       params = [alpha, w_1..w_m]
//   ComponentSum  C(t) = sum_j c_j |t_j|^{alpha_j}     params = [c_1..c_m, alpha_1..alpha_m]
//   PNormAlpha    C(t) = |t|_p^alpha                   params = [p, alpha], p may be +inf
//   Custom        user callable
//
// Axioms (checked by validate_cost, not by construction): even, zero exactly
// at 0, subadditive, monotone for the orthant order (eta <= theta iff every
// eta_j = u_j theta_j with u_j in [0,1]), lower semicontinuous.

#include <cmath>
#include <concepts>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "branchnet/detail/vec.hpp"
#include "branchnet/errors.hpp"

namespace branchnet {

template <class C>
concept TransportCost = requires(const C& c, std::span<const double> theta) {
  { c(theta) } -> std::convertible_to<double>;
  { c.m() } -> std::convertible_to<int>;
};

enum class CostFamily { SumAlpha, ComponentSum, PNormAlpha, Custom };

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

class CostSpec {
 public:
  using Fn = std::function<double(std::span<const double>)>;

  static CostSpec sum_alpha(double alpha, std::vector<double> weights) {
    if (!(alpha > 0.0)) throw InputError("sum-alpha: alpha must be positive");
    for (double w : weights)
      if (!(w > 0.0)) throw InputError("sum-alpha: weights must be positive");
    if (weights.empty()) throw InputError("sum-alpha: need at least one weight");
    std::vector<double> p{alpha};
    p.insert(p.end(), weights.begin(), weights.end());
    return CostSpec(CostFamily::SumAlpha, std::move(p), static_cast<int>(weights.size()), {}, "sum-alpha");
  }

  static CostSpec component_sum(std::vector<double> coeffs, std::vector<double> alphas) {
    if (coeffs.empty() || coeffs.size() != alphas.size())
      throw InputError("component-sum: need m coefficients and m exponents");
    for (double c : coeffs)
      if (!(c > 0.0)) throw InputError("component-sum: coefficients must be positive");
    for (double a : alphas)
      if (!(a > 0.0)) throw InputError("component-sum: exponents must be positive");
    const int m = static_cast<int>(coeffs.size());
    std::vector<double> p = std::move(coeffs);
    p.insert(p.end(), alphas.begin(), alphas.end());
    return CostSpec(CostFamily::ComponentSum, std::move(p), m, {}, "component-sum");
  }

  static CostSpec pnorm_alpha(int m, double p, double alpha) {
    if (m < 1) throw InputError("pnorm-alpha: m must be >= 1");
    if (!(p >= 1.0)) throw InputError("pnorm-alpha: p must be >= 1");
    if (!(alpha > 0.0)) throw InputError("pnorm-alpha: alpha must be positive");
    return CostSpec(CostFamily::PNormAlpha, {p, alpha}, m, {}, "pnorm-alpha");
  }

  static CostSpec custom(int m, std::string name, Fn fn) {
    if (m < 1) throw InputError("custom cost: m must be >= 1");
    return CostSpec(CostFamily::Custom, {}, m, std::move(fn), std::move(name));
  }

  double operator()(std::span<const double> theta) const {
    if (static_cast<int>(theta.size()) != m_) throw InputError("cost: multiplicity has wrong length");
    if (!detail::all_finite(theta)) throw InputError("cost: non-finite multiplicity");
    switch (family_) {
      case CostFamily::SumAlpha: {
        double s = 0.0;
        for (int j = 0; j < m_; ++j) s += params_[1 + j] * std::abs(theta[j]);
        return s == 0.0 ? 0.0 : std::pow(s, params_[0]);
      }
      case CostFamily::ComponentSum: {
        double s = 0.0;
        for (int j = 0; j < m_; ++j)
          if (theta[j] != 0.0) s += params_[j] * std::pow(std::abs(theta[j]), params_[m_ + j]);
        return s;
      }
      case CostFamily::PNormAlpha: {
        const double p = params_[0];
        double r;
        if (std::isinf(p)) {
          r = detail::norm_inf(theta);
        } else if (p == 2.0) {
          r = detail::norm2(theta);
        } else {
          // scaled to avoid overflow in |t|^p
          const double big = detail::norm_inf(theta);
          if (big == 0.0) return 0.0;
          double s = 0.0;
          for (double t : theta) s += std::pow(std::abs(t) / big, p);
          r = big * std::pow(s, 1.0 / p);
        }
        return r == 0.0 ? 0.0 : std::pow(r, params_[1]);
      }
      case CostFamily::Custom:
        return fn_(theta);
    }
    return 0.0;
  }

  double evaluate(std::span<const double> theta) const { return (*this)(theta); }

  int m() const { return m_; }
  CostFamily family() const { return family_; }
  const std::vector<double>& params() const { return params_; }
  const std::string& name() const { return name_; }

  // "family:p1,p2,..." (round-trips through parse_cost for built-in families)
  std::string describe() const {
    std::ostringstream os;
    os.precision(17);
    os << name_;
    if (family_ == CostFamily::Custom) return os.str();
    os << ':';
    for (std::size_t i = 0; i < params_.size(); ++i) {
      if (i) os << ',';
      if (std::isinf(params_[i]))
        os << "inf";
      else
        os << params_[i];
    }
    return os.str();
  }

 private:
  CostSpec(CostFamily f, std::vector<double> p, int m, Fn fn, std::string name)
      : family_(f), params_(std::move(p)), m_(m), fn_(std::move(fn)), name_(std::move(name)) {}

  CostFamily family_;
  std::vector<double> params_;
  int m_;
  Fn fn_;
  std::string name_;
};

inline double evaluate(const CostSpec& cost, std::span<const double> theta) { return cost(theta); }

// Parses "family:params" where family is sum-alpha, component-sum or
// pnorm-alpha and params follow the CostSpec layout. For sum-alpha a single
// parameter means unit weights.
inline CostSpec parse_cost(const std::string& text, int m) {
  const auto colon = text.find(':');
  const std::string fam = text.substr(0, colon);
  std::vector<double> p;
  if (colon != std::string::npos) {
    std::stringstream ss(text.substr(colon + 1));
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      if (tok == "inf") {
        p.push_back(kInfinity);
        continue;
      }
      try {
        std::size_t used = 0;
        p.push_back(std::stod(tok, &used));
        if (used != tok.size()) throw InputError("");
      } catch (const std::exception&) {
        throw InputError("cost: bad parameter '" + tok + "' in '" + text + "'");
      }
    }
  }
  const auto need = [&](std::size_t k) {
    if (p.size() != k) {
      std::ostringstream os;
      os << "cost '" << fam << "' expects " << k << " parameters for m=" << m << ", got " << p.size();
      throw InputError(os.str());
    }
  };
  if (fam == "sum-alpha") {
    if (p.size() == 1) return CostSpec::sum_alpha(p[0], std::vector<double>(m, 1.0));
    need(1 + m);
    return CostSpec::sum_alpha(p[0], {p.begin() + 1, p.end()});
  }
  if (fam == "component-sum") {
    need(2 * m);
    return CostSpec::component_sum({p.begin(), p.begin() + m}, {p.begin() + m, p.end()});
  }
  if (fam == "pnorm-alpha") {
    need(2);
    return CostSpec::pnorm_alpha(m, p[0], p[1]);
  }
  throw InputError("unknown cost family '" + fam + "' (expected sum-alpha, component-sum, pnorm-alpha)");
}

// ---- sampling helpers -----------------------------------------------------

namespace detail {

// Multiplicity with log-uniform magnitudes over six decades, random signs and
// occasional exact zeros.
inline Weight sample_multiplicity(int m, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Weight t(m);
  for (double& x : t) {
    if (u(rng) < 0.15) {
      x = 0.0;
      continue;
    }
    x = std::pow(10.0, -3.0 + 6.0 * u(rng)) * (u(rng) < 0.5 ? -1.0 : 1.0);
  }
  return t;
}

inline Vec sample_unit(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Vec v(dim);
  double r = 0.0;
  while (r < 1e-12) {
    for (double& x : v) x = g(rng);
    r = norm2(v);
  }
  for (double& x : v) x /= r;
  return v;
}

}  // namespace detail

// ---- axiom validation -----------------------------------------------------

struct CostValidationReport {
  std::size_t samples = 0;
  std::size_t evenness = 0;
  std::size_t positivity = 0;
  std::size_t subadditivity = 0;
  std::size_t monotonicity = 0;
  std::size_t continuity = 0;
  double worst_subadditivity_excess = 0.0;  // max of C(a+b) - C(a) - C(b)
  // Lower semicontinuity is probed only through continuity along rays; a
  // discontinuous but lsc cost passes this check vacuously.
  std::string lsc_note =
      "lower semicontinuity probed by continuity along random rays only";

  std::size_t violations() const {
    return evenness + positivity + subadditivity + monotonicity + continuity;
  }
  bool ok() const { return violations() == 0; }
};

template <TransportCost Cost>
CostValidationReport validate_cost(const Cost& cost, std::size_t samples = 10000,
                                   std::uint64_t seed = 1) {
  if (samples < 1) throw InputError("validate_cost: samples must be >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int m = cost.m();
  constexpr double rel = 1e-12;
  CostValidationReport rep;
  rep.samples = samples;

  const Weight zero(m, 0.0);
  if (cost(zero) != 0.0) ++rep.positivity;

  for (std::size_t s = 0; s < samples; ++s) {
    const Weight a = detail::sample_multiplicity(m, rng);
    const Weight b = detail::sample_multiplicity(m, rng);
    const double ca = cost(a), cb = cost(b);

    if (std::abs(cost(detail::negated(a)) - ca) > rel * std::abs(ca)) ++rep.evenness;
    if (detail::norm_inf(a) > 0.0 && !(ca > 0.0)) ++rep.positivity;

    const double cab = cost(detail::add(a, b));
    const double excess = cab - (ca + cb);
    rep.worst_subadditivity_excess = std::max(rep.worst_subadditivity_excess, excess);
    if (excess > rel * (ca + cb)) ++rep.subadditivity;

    Weight eta(m);
    for (int j = 0; j < m; ++j) eta[j] = u(rng) * a[j];
    if (cost(eta) > ca * (1.0 + rel)) ++rep.monotonicity;

    if (detail::norm_inf(a) > 0.0) {
      const double c1 = cost(detail::scaled(a, 1.0 + 1e-10));
      if (std::abs(c1 - ca) > 1e-6 * std::max(1.0, ca)) ++rep.continuity;
    }
  }
  return rep;
}

// ---- directional derivatives at zero --------------------------------------

inline constexpr double kDerivativeCap = 1e12;

struct DirectionalDerivative {
  double value = 0.0;  // +inf when the quotients diverge
  bool axiom_violation = false;  // quotient sequence decreased as t -> 0
};

// Right derivative at 0 in direction v via C(t v)/t on t = 2^-i, i = 0..60.
// For a valid cost the quotients are non-decreasing as t decreases and their
// supremum is the limit. Reported as +inf when a quotient exceeds `cap` or
// the sequence is still growing geometrically at the finest scale.
template <TransportCost Cost>
DirectionalDerivative dir_derivative_at_zero(const Cost& cost, std::span<const double> v,
                                             double cap = kDerivativeCap) {
  if (detail::norm_inf(v) == 0.0) throw InputError("dir_derivative_at_zero: v must be nonzero");
  DirectionalDerivative out;
  constexpr int imax = 60;
  double prev = -1.0, last = 0.0, before_last = 0.0;
  double t = 1.0;
  for (int i = 0; i <= imax; ++i, t *= 0.5) {
    const double q = cost(detail::scaled(v, t)) / t;
    if (prev >= 0.0 && q < prev * (1.0 - 1e-9)) out.axiom_violation = true;
    if (q > cap) {
      out.value = kInfinity;
      return out;
    }
    before_last = last;
    last = q;
    prev = q;
  }
  // power-law growth t^{a-1} keeps the per-halving ratio at 2^{1-a} > 1
  if (before_last > 0.0 && last / before_last - 1.0 > 1e-6) {
    out.value = kInfinity;
    return out;
  }
  out.value = last;
  return out;
}

struct DerivativeProfile {
  std::vector<double> axis;  // d+C/de_j(0), possibly +inf
  std::vector<int> basis;    // j with finite axis derivative; spans V
  int v_dim = 0;
  double homog_bound = 0.0;  // sup of the derivative on the unit sphere of V
  std::size_t sandwich_samples = 0;
  std::size_t sandwich_violations = 0;
  bool axiom_violation = false;
};

template <TransportCost Cost>
DerivativeProfile derivative_profile(const Cost& cost, std::size_t samples = 1000,
                                     std::uint64_t seed = 7) {
  const int m = cost.m();
  DerivativeProfile prof;
  for (int j = 0; j < m; ++j) {
    Vec e(m, 0.0);
    e[j] = 1.0;
    const auto d = dir_derivative_at_zero(cost, e);
    prof.axis.push_back(d.value);
    prof.axiom_violation |= d.axiom_violation;
    if (std::isfinite(d.value)) prof.basis.push_back(j);
  }
  prof.v_dim = static_cast<int>(prof.basis.size());
  if (prof.v_dim == 0) return prof;

  for (int j : prof.basis) prof.homog_bound = std::max(prof.homog_bound, prof.axis[j]);
  std::mt19937_64 rng(seed);
  constexpr double tol = 1e-9;
  for (std::size_t s = 0; s < samples; ++s) {
    const Vec c = detail::sample_unit(prof.v_dim, rng);
    Vec v(m, 0.0);
    double rhs = 0.0;
    for (int i = 0; i < prof.v_dim; ++i) {
      v[prof.basis[i]] = c[i];
      rhs += std::abs(c[i]) * prof.axis[prof.basis[i]];
    }
    const auto d = dir_derivative_at_zero(cost, v);
    prof.axiom_violation |= d.axiom_violation;
    ++prof.sandwich_samples;
    if (!std::isfinite(d.value) || d.value > rhs * (1.0 + tol) + tol ||
        rhs > m * d.value * (1.0 + tol) + tol) {
      ++prof.sandwich_violations;
      continue;
    }
    prof.homog_bound = std::max(prof.homog_bound, d.value);
  }
  if (prof.sandwich_violations) prof.axiom_violation = true;
  return prof;
}

// All axis derivatives infinite: finite-mass, finite-energy fluxes are then
// rectifiable.
template <TransportCost Cost>
bool rectifiability_flag(const Cost& cost) {
  for (int j = 0; j < cost.m(); ++j) {
    Vec e(cost.m(), 0.0);
    e[j] = 1.0;
    if (std::isfinite(dir_derivative_at_zero(cost, e).value)) return false;
  }
  return true;
}

// ---- norm/cost ratio ------------------------------------------------------

struct NormCostRatio {
  double c = 0.0;  // sup |v| / C(v) over the sampled ball of radius delta
  bool axiom_violation = false;
  std::size_t samples = 0;
};

// Sampled sup of |v|/C(v) over 0 < |v| <= delta: random directions (plus the
// coordinate axes) times log-spaced radii down to delta * 1e-12. For a valid
// cost the ratio is non-decreasing in |v|; growth toward 0 is flagged.
template <TransportCost Cost>
NormCostRatio norm_cost_ratio(const Cost& cost, double delta, std::size_t directions = 10000,
                              int radii = 64, std::uint64_t seed = 11) {
  if (!(delta > 0.0)) throw InputError("norm_cost_ratio: delta must be positive");
  const int m = cost.m();
  NormCostRatio out;
  std::mt19937_64 rng(seed);
  auto probe = [&](const Vec& u) {
    double at_delta = 0.0, best = 0.0;
    for (int k = 0; k < radii; ++k) {
      const double r = delta * std::pow(1e-12, static_cast<double>(k) / std::max(1, radii - 1));
      const double c = cost(detail::scaled(u, r));
      const double ratio = c > 0.0 ? r / c : kInfinity;
      if (k == 0) at_delta = ratio;
      best = std::max(best, ratio);
      ++out.samples;
    }
    if (best > at_delta * (1.0 + 1e-9)) out.axiom_violation = true;
    out.c = std::max(out.c, best);
  };
  for (int j = 0; j < m; ++j) {
    Vec e(m, 0.0);
    e[j] = 1.0;
    probe(e);
  }
  for (std::size_t s = 0; s < directions; ++s) probe(detail::sample_unit(m, rng));
  return out;
}

// ---- admissibility envelope and the S^beta series -------------------------

// Concave non-decreasing beta: [0,inf) -> [0,inf). The power-law form
// coef * x^exponent is recognized and handled in closed form.
struct BetaEnvelope {
  std::function<double(double)> beta;
  std::optional<double> exponent;
  double coef = 1.0;

  double operator()(double x) const { return beta(x); }

  static BetaEnvelope power(double exponent, double coef = 1.0) {
    if (!(exponent > 0.0) || exponent > 1.0)
      throw InputError("beta envelope: exponent must lie in (0, 1]");
    if (!(coef > 0.0)) throw InputError("beta envelope: coefficient must be positive");
    return {[=](double x) { return x <= 0.0 ? 0.0 : coef * std::pow(x, exponent); }, exponent, coef};
  }

  static BetaEnvelope function(std::function<double(double)> f) { return {std::move(f), std::nullopt, 1.0}; }
};

struct AdmissibilityResult {
  bool admissible = false;
  double value = 0.0;  // integral value, or a lower bound when divergent
  bool analytic = false;
  bool concavity_warning = false;
};

namespace detail {

// Gauss-Legendre nodes/weights on [-1, 1] by Newton iteration on P_k.
inline void gauss_legendre(int k, std::vector<double>& x, std::vector<double>& w) {
  x.assign(k, 0.0);
  w.assign(k, 0.0);
  const double pi = std::acos(-1.0);
  for (int i = 0; i < k; ++i) {
    double z = std::cos(pi * (i + 0.75) / (k + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      const double p = std::legendre(k, z);
      const double pm = std::legendre(k - 1, z);
      dp = k * (z * p - pm) / (z * z - 1.0);
      const double dz = p / dp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    x[i] = z;
    w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
}

inline bool looks_concave_nondecreasing(const BetaEnvelope& beta) {
  for (int i = 0; i < 200; ++i) {
    const double x0 = std::pow(2.0, -0.25 * i), x1 = 0.5 * x0, xm = 0.75 * x0;
    const double b0 = beta(x0), b1 = beta(x1), bm = beta(xm);
    if (b1 > b0 * (1.0 + 1e-12)) return false;
    if (bm < 0.5 * (b0 + b1) * (1.0 - 1e-12)) return false;
  }
  return true;
}

}  // namespace detail

// Decides whether int_0^1 beta(x) / x^{2-1/n} dx is finite. Power laws are
// decided in closed form (admissible iff exponent > 1 - 1/n); otherwise the
// integral is summed over dyadic intervals [2^-i-1, 2^-i] with Gauss-Legendre
// quadrature and the tail ratio decides convergence.
inline AdmissibilityResult admissibility_check(const BetaEnvelope& beta, int n, int quad_points = 16) {
  if (n < 1) throw InputError("admissibility_check: n must be >= 1");
  if (quad_points < 2) throw InputError("admissibility_check: need at least 2 quadrature points");
  AdmissibilityResult out;
  out.concavity_warning = !detail::looks_concave_nondecreasing(beta);
  const double power = 2.0 - 1.0 / n;
  if (beta.exponent) {
    out.analytic = true;
    const double s = *beta.exponent - power + 1.0;  // integrand ~ x^{s-1}
    out.admissible = s > 0.0;
    out.value = out.admissible ? beta.coef / s : kInfinity;
    return out;
  }
  std::vector<double> xs, ws;
  detail::gauss_legendre(quad_points, xs, ws);
  double total = 0.0, prev = 0.0, ratio = 1.0;
  constexpr int levels = 200;
  for (int i = 0; i < levels; ++i) {
    const double hi = std::ldexp(1.0, -i), lo = 0.5 * hi;
    double c = 0.0;
    for (int q = 0; q < quad_points; ++q) {
      const double x = lo + 0.5 * (hi - lo) * (xs[q] + 1.0);
      c += ws[q] * beta(x) / std::pow(x, power);
    }
    c *= 0.5 * (hi - lo);
    total += c;
    if (i > 0 && prev > 0.0) ratio = c / prev;
    prev = c;
  }
  out.admissible = ratio < 1.0 - 1e-3;
  out.value = out.admissible ? total + prev * ratio / (1.0 - ratio) : total;
  return out;
}

// S^beta(n,k) = 2^{(n-1)k} beta(2^{-nk})
inline double s_beta(const BetaEnvelope& beta, int n, int k) {
  if (k < 1) throw InputError("s_beta: k must be >= 1");
  return std::ldexp(1.0, (n - 1) * k) * beta(std::ldexp(1.0, -n * k));
}

struct SeriesBound {
  double partial_sum = 0.0;  // sum_{k=1}^{K} S^beta(n,k)
  double tail_bound = kInfinity;  // bound on sum_{k>K}; finite for power laws with ratio < 1
};

inline SeriesBound s_beta_series(const BetaEnvelope& beta, int n, int K) {
  SeriesBound out;
  detail::CompensatedSum acc;
  for (int k = 1; k <= K; ++k) acc.add(s_beta(beta, n, k));
  out.partial_sum = acc.value();
  if (beta.exponent) {
    const double ratio = std::ldexp(1.0, n - 1) * std::pow(2.0, -n * *beta.exponent);
    if (ratio < 1.0) {
      const double last = K >= 1 ? s_beta(beta, n, K) : beta.coef;
      out.tail_bound = last * ratio / (1.0 - ratio);
    }
  }
  return out;
}

// Checks C(x,...,x) <= beta(x) on log-spaced x in [1e-6, 1e6].
template <TransportCost Cost>
bool beta_dominates(const Cost& cost, const BetaEnvelope& beta) {
  for (int i = 0; i <= 120; ++i) {
    const double x = std::pow(10.0, -6.0 + 0.1 * i);
    const Vec diag(cost.m(), x);
    if (cost(diag) > beta(x) * (1.0 + 1e-12)) return false;
  }
  return true;
}

}  // namespace branchnet
