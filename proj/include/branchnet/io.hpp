#pragma once

// JSON files for measures, networks and workspace/optimizer configuration.
//   measure: {"version":1, "n":2, "m":1, "atoms":[{"p":[x,y], "w":[...]}, ...]}
//   network: {"version":1, "n":2, "m":1, "edges":[{"a":[..], "b":[..], "theta":[..]}, ...]}
// Doubles are written in shortest round-trip form, so save/load is exact.

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "branchnet/chains.hpp"
#include "branchnet/costs.hpp"
#include "branchnet/errors.hpp"
#include "branchnet/optimize.hpp"

namespace branchnet {

inline constexpr int kFormatVersion = 1;

namespace detail {

using nlohmann::json;

inline json parse_json_text(const std::string& text, const std::string& where) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw IoError(where + ": " + e.what());
  }
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path + ": cannot open file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_json_text(ss.str(), path);
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw IoError(path + ": cannot write file");
  out << text << '\n';
  if (!out) throw IoError(path + ": write failed");
}

inline const json& field(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object()) throw IoError(where + ": expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw IoError(where + "." + key + ": missing field");
  return *it;
}

inline int int_field(const json& obj, const char* key, const std::string& where) {
  const json& v = field(obj, key, where);
  if (!v.is_number_integer()) throw IoError(where + "." + key + ": expected an integer");
  return v.get<int>();
}

inline std::vector<double> vec_field(const json& obj, const char* key, std::size_t len, const std::string& where) {
  const json& v = field(obj, key, where);
  const std::string here = where + "." + key;
  if (!v.is_array()) throw IoError(here + ": expected an array");
  if (v.size() != len)
    throw IoError(here + ": expected " + std::to_string(len) + " entries, got " + std::to_string(v.size()));
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) throw IoError(here + "[" + std::to_string(i) + "]: expected a number");
    const double x = v[i].get<double>();
    if (!std::isfinite(x)) throw IoError(here + "[" + std::to_string(i) + "]: non-finite number");
    out.push_back(x);
  }
  return out;
}

inline void check_header(const json& j, const std::string& where, int& n, int& m) {
  const int version = int_field(j, "version", where);
  if (version != kFormatVersion) throw IoError(where + ".version: unsupported version " + std::to_string(version));
  n = int_field(j, "n", where);
  m = int_field(j, "m", where);
  if (n < 1) throw IoError(where + ".n: must be >= 1");
  if (m < 1) throw IoError(where + ".m: must be >= 1");
}

}  // namespace detail

inline nlohmann::json to_json(const Chain0& nu) {
  nlohmann::json atoms = nlohmann::json::array();
  for (const Atom& at : nu.atoms) atoms.push_back({{"p", at.position}, {"w", at.weight}});
  return {{"version", kFormatVersion}, {"n", nu.n}, {"m", nu.m}, {"atoms", std::move(atoms)}};
}

inline nlohmann::json to_json(const Chain1& T) {
  nlohmann::json edges = nlohmann::json::array();
  for (const Edge& e : T.edges) edges.push_back({{"a", e.a}, {"b", e.b}, {"theta", e.theta}});
  return {{"version", kFormatVersion}, {"n", T.n}, {"m", T.m}, {"edges", std::move(edges)}};
}

// `where` prefixes error locations, e.g. "file.json:atoms[3].w".
inline Chain0 measure_from_json(const nlohmann::json& j, const std::string& where = "measure") {
  Chain0 nu;
  detail::check_header(j, where, nu.n, nu.m);
  const auto& atoms = detail::field(j, "atoms", where);
  if (!atoms.is_array()) throw IoError(where + ".atoms: expected an array");
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    const std::string here = where + ":atoms[" + std::to_string(i) + "]";
    nu.atoms.push_back({detail::vec_field(atoms[i], "p", nu.n, here), detail::vec_field(atoms[i], "w", nu.m, here)});
  }
  return nu;
}

inline Chain1 network_from_json(const nlohmann::json& j, const std::string& where = "network") {
  Chain1 T;
  detail::check_header(j, where, T.n, T.m);
  const auto& edges = detail::field(j, "edges", where);
  if (!edges.is_array()) throw IoError(where + ".edges: expected an array");
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const std::string here = where + ":edges[" + std::to_string(i) + "]";
    Edge e{detail::vec_field(edges[i], "a", T.n, here), detail::vec_field(edges[i], "b", T.n, here),
           detail::vec_field(edges[i], "theta", T.m, here)};
    if (e.a == e.b) throw IoError(here + ": degenerate edge (a == b)");
    T.edges.push_back(std::move(e));
  }
  T.canonical = false;
  return T;
}

inline Chain0 load_measure(const std::string& path) { return measure_from_json(detail::read_json_file(path), path); }
inline Chain1 load_network(const std::string& path) { return network_from_json(detail::read_json_file(path), path); }

inline void save_measure(const Chain0& nu, const std::string& path) { detail::write_text_file(path, to_json(nu).dump(1)); }
inline void save_network(const Chain1& T, const std::string& path) { detail::write_text_file(path, to_json(T).dump(1)); }

// ---- configuration -----------------------------------------------------------

inline nlohmann::json to_json(const OptimizerConfig& c) {
  nlohmann::json moves = nlohmann::json::array();
  for (Move mv : c.moves) moves.push_back(to_string(mv));
  return {{"moves", moves},
          {"rel_tol", c.rel_tol},
          {"max_iters", c.max_iters},
          {"seed", c.seed},
          {"init", c.init == InitKind::Cone ? "cone" : "cascade"},
          {"cascade_depth", c.cascade_depth},
          {"angle_deg", c.angle_deg},
          {"dist_frac", c.dist_frac},
          {"weiszfeld_iters", c.weiszfeld_iters}};
}

// Missing keys keep their defaults; unknown keys are rejected.
inline OptimizerConfig optimizer_config_from_json(const nlohmann::json& j, const std::string& where = "optimizer") {
  OptimizerConfig c;
  if (!j.is_object()) throw IoError(where + ": expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string here = where + "." + it.key();
    const auto& v = it.value();
    try {
      if (it.key() == "moves") {
        c.moves.clear();
        for (const auto& s : v) {
          const std::string name = s.get<std::string>();
          if (name == "cycle_removal") c.moves.push_back(Move::CycleRemoval);
          else if (name == "straighten") c.moves.push_back(Move::Straighten);
          else if (name == "relocate") c.moves.push_back(Move::Relocate);
          else if (name == "merge_split") c.moves.push_back(Move::MergeSplit);
          else throw IoError(here + ": unknown move '" + name + "'");
        }
      } else if (it.key() == "rel_tol") {
        c.rel_tol = v.get<double>();
        if (!(c.rel_tol > 0.0)) throw IoError(here + ": must be positive");
      } else if (it.key() == "max_iters") {
        c.max_iters = v.get<int>();
      } else if (it.key() == "seed") {
        c.seed = v.get<std::uint64_t>();
      } else if (it.key() == "init") {
        const std::string s = v.get<std::string>();
        if (s == "cone") c.init = InitKind::Cone;
        else if (s == "cascade") c.init = InitKind::Cascade;
        else throw IoError(here + ": expected 'cone' or 'cascade'");
      } else if (it.key() == "cascade_depth") {
        c.cascade_depth = v.get<int>();
      } else if (it.key() == "angle_deg") {
        c.angle_deg = v.get<double>();
      } else if (it.key() == "dist_frac") {
        c.dist_frac = v.get<double>();
      } else if (it.key() == "weiszfeld_iters") {
        c.weiszfeld_iters = v.get<int>();
      } else {
        throw IoError(here + ": unknown key");
      }
    } catch (const nlohmann::json::type_error& e) {
      throw IoError(here + ": " + e.what());
    }
  }
  return c;
}

struct WorkspaceConfig {
  int n = 2;
  int m = 1;
  std::string cost = "sum-alpha:0.5";
  double eps_geom = kDefaultEpsGeom;
  double tol = 1e-9;
  std::uint64_t seed = 1;
  std::string mu_minus_path;
  std::string mu_plus_path;
  std::string out_path;
  OptimizerConfig optimizer;

  CostSpec make_cost() const { return parse_cost(cost, m); }
};

inline nlohmann::json to_json(const WorkspaceConfig& w) {
  return {{"version", kFormatVersion},
          {"n", w.n},
          {"m", w.m},
          {"cost", w.cost},
          {"eps_geom", w.eps_geom},
          {"tol", w.tol},
          {"seed", w.seed},
          {"paths", {{"mu_minus", w.mu_minus_path}, {"mu_plus", w.mu_plus_path}, {"out", w.out_path}}},
          {"optimizer", to_json(w.optimizer)}};
}

inline WorkspaceConfig workspace_from_json(const nlohmann::json& j, const std::string& where = "config") {
  WorkspaceConfig w;
  detail::check_header(j, where, w.n, w.m);
  if (w.n < 2) throw IoError(where + ".n: must be >= 2");
  try {
    if (j.contains("cost")) w.cost = j["cost"].get<std::string>();
    if (j.contains("eps_geom")) w.eps_geom = j["eps_geom"].get<double>();
    if (j.contains("tol")) w.tol = j["tol"].get<double>();
    if (j.contains("seed")) w.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("paths")) {
      const auto& p = j["paths"];
      if (p.contains("mu_minus")) w.mu_minus_path = p["mu_minus"].get<std::string>();
      if (p.contains("mu_plus")) w.mu_plus_path = p["mu_plus"].get<std::string>();
      if (p.contains("out")) w.out_path = p["out"].get<std::string>();
    }
  } catch (const nlohmann::json::type_error& e) {
    throw IoError(where + ": " + e.what());
  }
  if (j.contains("optimizer")) w.optimizer = optimizer_config_from_json(j["optimizer"], where + ".optimizer");
  try {
    (void)w.make_cost();
  } catch (const InputError& e) {
    throw IoError(where + ".cost: " + e.what());
  }
  return w;
}

inline WorkspaceConfig load_config(const std::string& path) {
  return workspace_from_json(detail::read_json_file(path), path);
}

}  // namespace branchnet
