// branchnet command-line tool. Every command prints one JSON record (w-sweep
// prints CSV) on stdout.
// Exit codes: 0 ok, 2 validation failure, 3 IO/schema error, 4 invariant violation.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "branchnet/branchnet.hpp"

using namespace branchnet;
using nlohmann::json;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitIo = 3;
constexpr int kExitInvariant = 4;

struct Common {
  std::string cost;
  double alpha = 0.0;
  std::uint64_t seed = 1;
  double tol = 1e-9;
  std::string out;
  std::string svg;
  bool project = false;
  std::string config;
};

CostSpec make_cost(const Common& c, int m) {
  if (!c.cost.empty()) return parse_cost(c.cost, m);
  if (c.alpha > 0.0) return CostSpec::sum_alpha(c.alpha, std::vector<double>(m, 1.0));
  throw InputError("a cost is required (--cost family:params or --alpha a)");
}

json chain_summary(const Chain1& T) {
  return {{"edges", T.edges.size()}, {"mass", mass(T)}};
}

void maybe_write(const Common& c, const Chain1& T, const Chain0& mu_minus, const Chain0& mu_plus) {
  if (!c.out.empty()) save_network(T, c.out);
  if (!c.svg.empty()) {
    SvgStyle style;
    style.project = c.project;
    emit_svg(T, mu_minus, mu_plus, style, c.svg);
  }
}

json report_json(const SolutionReport& r) {
  json acyc = json::array();
  for (bool b : r.acyclic_per_component) acyc.push_back(b);
  return {{"energy", r.energy},
          {"mass", r.mass},
          {"boundary_residual", r.boundary_residual},
          {"residual_tolerance", r.residual_tolerance},
          {"acyclic_per_component", acyc},
          {"multiplicity_bound_ok", r.multiplicity_bound_ok},
          {"mass_bound_ok", r.mass_bound_ok},
          {"mass_bound_constant", r.mass_bound_constant},
          {"iterations", r.iterations},
          {"energy_trace", r.energy_trace},
          {"ok", r.ok()}};
}

void print(const json& j) { std::cout << j.dump() << std::endl; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"branchnet: multi-material branched transport networks"};
  app.require_subcommand(1);
  Common c;
  auto common = [&](CLI::App* sub, bool with_cost) {
    if (with_cost) {
      sub->add_option("--cost", c.cost, "cost as family:params (sum-alpha, component-sum, pnorm-alpha)");
      sub->add_option("--alpha", c.alpha, "shorthand for sum-alpha with unit weights");
    }
    sub->add_option("--seed", c.seed, "random seed");
    sub->add_option("--out", c.out, "output file");
  };

  std::string minus_path, plus_path, network_path, measure_path, target_path, init = "cone";
  std::vector<double> vertex, grad;
  double beta_exp = 0.75, offset = 0.0, y = 0.0;
  int depth = 4, m = 1, max_iters = -1;
  std::size_t samples = 0;

  auto* vc = app.add_subcommand("validate-cost", "sample the cost axioms and classify the cost");
  common(vc, true);
  vc->add_option("--m", m, "number of components")->required();
  vc->add_option("--samples", samples, "sample count (default 10000)");

  auto* cn = app.add_subcommand("cone", "cone over mu_plus - mu_minus");
  common(cn, true);
  cn->add_option("--minus", minus_path)->required();
  cn->add_option("--plus", plus_path)->required();
  cn->add_option("--vertex", vertex, "cone vertex (default: weighted barycenter)")->delimiter(',');
  cn->add_option("--svg", c.svg);
  cn->add_flag("--project", c.project);

  auto* cs = app.add_subcommand("cascade", "dyadic cascade with its energy certificate");
  common(cs, true);
  cs->add_option("--minus", minus_path)->required();
  cs->add_option("--plus", plus_path)->required();
  cs->add_option("--beta", beta_exp, "exponent of the envelope beta(x) = x^b");
  cs->add_option("--depth", depth, "cascade depth K");
  cs->add_option("--svg", c.svg);
  cs->add_flag("--project", c.project);

  auto* op = app.add_subcommand("optimize", "local search for a low-energy flux");
  common(op, true);
  op->add_option("--minus", minus_path)->required();
  op->add_option("--plus", plus_path)->required();
  op->add_option("--tol", c.tol, "relative energy tolerance per sweep");
  op->add_option("--max-iters", max_iters);
  op->add_option("--init", init, "cone or cascade")->check(CLI::IsMember({"cone", "cascade"}));
  op->add_option("--config", c.config, "workspace config JSON (optimizer section is used)");
  op->add_option("--svg", c.svg);
  op->add_flag("--project", c.project);

  auto* en = app.add_subcommand("energy", "energy of a network");
  common(en, true);
  en->add_option("--network", network_path)->required();

  auto* fb = app.add_subcommand("flat-bound", "flat-norm bracket of a measure or network");
  fb->add_option("--measure", measure_path);
  fb->add_option("--network", network_path);

  auto* sl = app.add_subcommand("slice", "slice a network by {f = y}, f(x) = grad . x + offset");
  common(sl, false);
  sl->add_option("--network", network_path)->required();
  sl->add_option("--grad", grad)->required()->delimiter(',');
  sl->add_option("--offset", offset);
  sl->add_option("--y", y)->required();

  auto* ig = app.add_subcommand("ig-check", "Monte Carlo check of the integral-geometric energy formula");
  common(ig, true);
  ig->add_option("--network", network_path)->required();
  ig->add_option("--samples", samples, "direction samples (default 1e6)");

  auto* ws = app.add_subcommand("w-sweep", "w_upper between depth-h approximations of a target and the target");
  common(ws, true);
  ws->add_option("--target", target_path)->required();
  ws->add_option("--depth", depth, "largest h");
  ws->add_option("--max-iters", max_iters, "local search sweeps per depth (default 0: constructions only)");

  auto* vf = app.add_subcommand("verify", "check a network against its source/sink measures");
  common(vf, true);
  vf->add_option("--network", network_path)->required();
  vf->add_option("--minus", minus_path)->required();
  vf->add_option("--plus", plus_path)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  try {
    if (vc->parsed()) {
      const CostSpec cost = make_cost(c, m);
      const auto rep = validate_cost(cost, samples ? samples : 10000, c.seed);
      const auto prof = derivative_profile(cost);
      json axis = json::array();
      for (const auto& d : prof.axis) axis.push_back(std::isinf(d) ? json("inf") : json(d));
      print({{"command", "validate-cost"},
             {"cost", cost.describe()},
             {"samples", rep.samples},
             {"evenness", rep.evenness},
             {"positivity", rep.positivity},
             {"subadditivity", rep.subadditivity},
             {"monotonicity", rep.monotonicity},
             {"continuity", rep.continuity},
             {"worst_subadditivity_excess", rep.worst_subadditivity_excess},
             {"lsc_note", rep.lsc_note},
             {"axis_derivatives", axis},
             {"rectifiable", rectifiability_flag(cost)},
             {"ok", rep.ok()}});
      return rep.ok() ? 0 : kExitValidation;
    }

    if (cn->parsed()) {
      const Chain0 mm = load_measure(minus_path), mp = load_measure(plus_path);
      const Chain0 nu = difference(mp, mm);
      Chain1 T;
      if (vertex.empty()) {
        T = barycenter_cone(mm, mp);
      } else {
        T = cone(nu, vertex);
      }
      json j{{"command", "cone"}, {"network", chain_summary(T)}};
      const double err = max_weight_error(divergence(T), difference(mm, mp));
      j["divergence_error"] = err;
      if (!c.cost.empty() || c.alpha > 0.0) j["energy"] = energy(T, make_cost(c, T.m));
      maybe_write(c, T, mm, mp);
      print(j);
      return is_compatible(mm, mp) ? 0 : kExitInvariant;
    }

    if (cs->parsed()) {
      const Chain0 mm = load_measure(minus_path), mp = load_measure(plus_path);
      const CostSpec cost = make_cost(c, mm.m);
      const Chain0 pair[] = {mm, mp};
      int tries = 0;
      const DyadicGrid grid = shifted_grid(bounding_cube(pair), pair, depth + 1, 16, c.seed, kDefaultEpsGeom, &tries);
      const BetaEnvelope beta = BetaEnvelope::power(beta_exp);
      const CascadeResult r = cascade(mm, mp, grid, depth, cost, beta);
      const double residual = max_weight_error(divergence(r.chain), difference(mm, mp));
      maybe_write(c, r.chain, mm, mp);
      print({{"command", "cascade"},
             {"depth", depth},
             {"grid_tries", tries},
             {"network", chain_summary(r.chain)},
             {"energy", r.certificate.energy},
             {"bound", r.certificate.bound},
             {"satisfied", r.certificate.satisfied()},
             {"divergence_error", residual},
             {"beta_dominates", r.beta_dominates},
             {"beta_admissible", r.beta_admissible},
             {"series_sum", r.series_sum},
             {"inputs_digest", r.certificate.inputs_digest}});
      if (!r.beta_dominates) std::cerr << "warning: beta does not dominate the cost on the diagonal\n";
      if (!r.beta_admissible) std::cerr << "warning: beta is not admissible, the bound may be meaningless\n";
      return r.certificate.satisfied() ? 0 : kExitInvariant;
    }

    if (op->parsed()) {
      const Chain0 mm = load_measure(minus_path), mp = load_measure(plus_path);
      OptimizerConfig cfg;
      std::optional<CostSpec> cost;
      if (!c.config.empty()) {
        const WorkspaceConfig ws = load_config(c.config);
        cfg = ws.optimizer;
        if (ws.m != mm.m) throw InputError("config m does not match the measures");
        if (c.cost.empty() && c.alpha <= 0.0) cost = ws.make_cost();
      }
      if (!cost) cost = make_cost(c, mm.m);
      if (op->count("--tol")) cfg.rel_tol = c.tol;
      if (max_iters >= 0) cfg.max_iters = max_iters;
      if (op->count("--seed")) cfg.seed = c.seed;
      if (op->count("--init")) cfg.init = init == "cascade" ? InitKind::Cascade : InitKind::Cone;
      const LocalSearchResult r = local_search(mm, mp, *cost, cfg);
      maybe_write(c, r.chain, mm, mp);
      print({{"command", "optimize"},
             {"cost", cost->describe()},
             {"network", chain_summary(r.chain)},
             {"energy", r.report.energy},
             {"report", report_json(r.report)}});
      return r.report.ok() ? 0 : kExitInvariant;
    }

    if (en->parsed()) {
      const Chain1 T = canonicalize(load_network(network_path));
      const CostSpec cost = make_cost(c, T.m);
      json per = json::array();
      for (int j = 0; j < T.m; ++j) per.push_back(energy_component(T, cost, j));
      print({{"command", "energy"}, {"network", chain_summary(T)}, {"energy", energy(T, cost)}, {"per_component", per}});
      return 0;
    }

    if (fb->parsed()) {
      if (measure_path.empty() == network_path.empty()) throw InputError("give exactly one of --measure, --network");
      const FlatBounds b =
          measure_path.empty() ? flat_bounds(load_network(network_path)) : flat_bounds(load_measure(measure_path));
      print({{"command", "flat-bound"},
             {"lower", b.lower},
             {"upper", b.upper},
             {"per_component_lower", b.per_component_lower},
             {"per_component_upper", b.per_component_upper}});
      return b.lower <= b.upper ? 0 : kExitInvariant;
    }

    if (sl->parsed()) {
      const Chain1 T = canonicalize(load_network(network_path));
      const AffineFunctional f{grad, offset};
      const SliceResult r = slice(T, f, y);
      if (r.perturbed) std::cerr << "warning: level moved to " << r.y_used << " to avoid a vertex\n";
      // slicing formula: <T,f,y> = d(T restricted to {f<=y}) - (dT) restricted to {f<=y}
      const Chain0 rhs = difference(boundary(restrict_sublevel(T, f, r.y_used)), restrict_sublevel(boundary(T), f, r.y_used));
      const double residual = max_weight_error(r.chain, rhs);
      json j = to_json(r.chain);
      j["command"] = "slice";
      j["y"] = r.y_used;
      j["perturbed"] = r.perturbed;
      j["slicing_residual"] = residual;
      print(j);
      return residual <= 1e-12 * std::max(1.0, mass(T)) ? 0 : kExitInvariant;
    }

    if (ig->parsed()) {
      const Chain1 T = canonicalize(load_network(network_path));
      const CostSpec cost = make_cost(c, T.m);
      const IgCheck r = ig_identity_mc(T, cost, samples ? samples : 1000000, c.seed);
      print({{"command", "ig-check"},
             {"estimate", r.estimate},
             {"exact", r.exact},
             {"rel_err", r.rel_err},
             {"c_n1", ig_constant(T.n)}});
      return 0;
    }

    if (ws->parsed()) {
      const Chain0 target = load_measure(target_path);
      const CostSpec cost = make_cost(c, target.m);
      OptimizerConfig cfg;
      cfg.seed = c.seed;
      cfg.max_iters = max_iters >= 0 ? max_iters : 0;
      const Chain0 only[] = {target};
      const DyadicGrid grid = shifted_grid(bounding_cube(only), only, depth, 16, c.seed);
      std::cout << "depth,w_upper\n";
      for (int h = 1; h <= depth; ++h) {
        const Chain0 approx = dyadic_approx(target, grid, h);
        std::cout << h << ',' << json(w_upper(approx, target, cost, h - 1, cfg, grid).value).dump() << '\n';
      }
      return 0;
    }

    if (vf->parsed()) {
      const Chain1 T = canonicalize(load_network(network_path));
      const Chain0 mm = load_measure(minus_path), mp = load_measure(plus_path);
      const CostSpec cost = make_cost(c, T.m);
      const SolutionReport r = verify_solution(T, mm, mp, cost);
      print({{"command", "verify"}, {"report", report_json(r)}});
      return r.ok() ? 0 : kExitInvariant;
    }
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const InvariantViolation& e) {
    std::cerr << "invariant violated: " << e.what() << '\n';
    return kExitInvariant;
  }
  return 0;
}
