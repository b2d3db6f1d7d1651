#pragma once

// Run configuration in a sectioned key-value format:
//
//   [model]     E_order, E, D_order, D (row-major, whitespace separated), alpha, psi
//   [plan]      h, R, max_cells
//   [run]       n, realizations, seed, first_realization, method
//   [analysis]  points, thetas (';'-separated vectors), c, levels, set,
//               epsilon, delta, pairs, mc_realizations, allowance, convention
//
// Missing keys take the defaults below. Doubles are written in shortest
// round-trip form, so parse(serialize(c)) == c.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "osrf/analysis.hpp"
#include "osrf/errors.hpp"
#include "osrf/fieldsim.hpp"
#include "osrf/polar.hpp"
#include "osrf/spectral.hpp"

namespace osrf {

struct RunConfig {
  std::size_t e_order = 1;
  std::vector<double> e = {1.25};
  std::size_t d_order = 1;
  std::vector<double> d = {0.5};
  double alpha = 1.5;
  PsiVariant psi = PsiVariant::tau_based;

  double spacing = 2.0 * std::numbers::pi / 64.0;
  double radius = 64.0 * std::numbers::pi;
  std::size_t max_cells = kDefaultMaxCells;

  std::size_t resolution = 1024;
  std::size_t realizations = 1;
  std::uint64_t seed = 0;
  std::uint64_t first_realization = 0;
  Evaluation method = Evaluation::automatic;

  std::vector<std::vector<double>> points = {{0.2}, {0.4}};
  std::vector<std::vector<double>> thetas = {{0.5}, {1.0}, {2.0}};
  double scale = 2.0;
  int levels = 10;
  std::string set = "graph";
  double epsilon = 0.05;
  double delta = 0.5;
  PairSet pairs = PairSet::dyadic;
  std::size_t mc_realizations = 10000;
  double allowance = 0.02;
  CfConvention convention = CfConvention::transpose;

  bool operator==(const RunConfig&) const = default;
};

namespace detail {

inline std::string shortest(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline double parse_double(const std::string& key, const std::string& text) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = first + text.size();
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last || !std::isfinite(v))
    throw ConfigError("key '" + key + "': expected a finite number, got '" + text + "'");
  return v;
}

inline std::uint64_t parse_unsigned(const std::string& key, const std::string& text) {
  std::uint64_t v = 0;
  const char* first = text.data();
  const char* last = first + text.size();
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last)
    throw ConfigError("key '" + key + "': expected a non-negative integer, got '" + text + "'");
  return v;
}

inline std::vector<double> parse_list(const std::string& key, const std::string& text) {
  std::istringstream in(text);
  std::vector<double> out;
  for (std::string tok; in >> tok;) out.push_back(parse_double(key, tok));
  return out;
}

inline std::vector<std::vector<double>> parse_vectors(const std::string& key, const std::string& text) {
  std::vector<std::vector<double>> out;
  std::istringstream in(text);
  for (std::string part; std::getline(in, part, ';');) {
    std::vector<double> v = parse_list(key, part);
    if (v.empty()) throw ConfigError("key '" + key + "': empty vector in '" + text + "'");
    out.push_back(std::move(v));
  }
  return out;
}

inline std::string join(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? " " : "") + shortest(v[i]);
  return out;
}

inline std::string join(const std::vector<std::vector<double>>& vs) {
  std::string out;
  for (std::size_t i = 0; i < vs.size(); ++i) out += (i ? "; " : "") + join(vs[i]);
  return out;
}

inline const char* to_string(Evaluation e) {
  return e == Evaluation::direct ? "direct" : e == Evaluation::fft ? "fft" : "auto";
}

inline Evaluation parse_method(const std::string& s) {
  if (s == "auto") return Evaluation::automatic;
  if (s == "direct") return Evaluation::direct;
  if (s == "fft") return Evaluation::fft;
  throw ConfigError("key 'run.method': expected auto, direct or fft, got '" + s + "'");
}

inline const char* to_string(PairSet p) { return p == PairSet::all ? "all" : "dyadic"; }

inline PairSet parse_pairs(const std::string& s) {
  if (s == "dyadic") return PairSet::dyadic;
  if (s == "all") return PairSet::all;
  throw ConfigError("key 'analysis.pairs': expected dyadic or all, got '" + s + "'");
}

inline const char* to_string(CfConvention c) {
  return c == CfConvention::transpose ? "transpose" : "as_written";
}

inline CfConvention parse_convention(const std::string& s) {
  if (s == "transpose") return CfConvention::transpose;
  if (s == "as_written") return CfConvention::as_written;
  throw ConfigError("key 'analysis.convention': expected transpose or as_written, got '" + s + "'");
}

}  // namespace detail

inline std::string serialize(const RunConfig& c) {
  using detail::join;
  using detail::shortest;
  std::ostringstream out;
  out << "[model]\n"
      << "E_order = " << c.e_order << "\n"
      << "E = " << join(c.e) << "\n"
      << "D_order = " << c.d_order << "\n"
      << "D = " << join(c.d) << "\n"
      << "alpha = " << shortest(c.alpha) << "\n"
      << "psi = " << to_string(c.psi) << "\n\n"
      << "[plan]\n"
      << "h = " << shortest(c.spacing) << "\n"
      << "R = " << shortest(c.radius) << "\n"
      << "max_cells = " << c.max_cells << "\n\n"
      << "[run]\n"
      << "n = " << c.resolution << "\n"
      << "realizations = " << c.realizations << "\n"
      << "seed = " << c.seed << "\n"
      << "first_realization = " << c.first_realization << "\n"
      << "method = " << detail::to_string(c.method) << "\n\n"
      << "[analysis]\n"
      << "points = " << join(c.points) << "\n"
      << "thetas = " << join(c.thetas) << "\n"
      << "c = " << shortest(c.scale) << "\n"
      << "levels = " << c.levels << "\n"
      << "set = " << c.set << "\n"
      << "epsilon = " << shortest(c.epsilon) << "\n"
      << "delta = " << shortest(c.delta) << "\n"
      << "pairs = " << detail::to_string(c.pairs) << "\n"
      << "mc_realizations = " << c.mc_realizations << "\n"
      << "allowance = " << shortest(c.allowance) << "\n"
      << "convention = " << detail::to_string(c.convention) << "\n";
  return out.str();
}

/// Parses the text form; unknown sections or keys are rejected.
inline RunConfig parse_config(const std::string& text) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config syntax: ") + e.what());
  }
  const std::map<std::string, std::set<std::string>> known = {
      {"model", {"E_order", "E", "D_order", "D", "alpha", "psi"}},
      {"plan", {"h", "R", "max_cells"}},
      {"run", {"n", "realizations", "seed", "first_realization", "method"}},
      {"analysis",
       {"points", "thetas", "c", "levels", "set", "epsilon", "delta", "pairs", "mc_realizations", "allowance",
        "convention"}}};
  for (const auto& [section, body] : tree) {
    const auto it = known.find(section);
    if (it == known.end()) throw ConfigError("unknown config section [" + section + "]");
    for (const auto& [key, value] : body) {
      if (!it->second.count(key)) throw ConfigError("unknown key '" + key + "' in [" + section + "]");
    }
  }

  RunConfig c;
  auto get = [&](const std::string& path, auto&& apply) {
    if (const auto v = tree.get_optional<std::string>(path)) apply(path, *v);
  };
  auto as_size = [](const std::string& k, const std::string& v) {
    return static_cast<std::size_t>(detail::parse_unsigned(k, v));
  };
  get("model.E_order", [&](auto& k, auto& v) { c.e_order = as_size(k, v); });
  get("model.E", [&](auto& k, auto& v) { c.e = detail::parse_list(k, v); });
  get("model.D_order", [&](auto& k, auto& v) { c.d_order = as_size(k, v); });
  get("model.D", [&](auto& k, auto& v) { c.d = detail::parse_list(k, v); });
  get("model.alpha", [&](auto& k, auto& v) { c.alpha = detail::parse_double(k, v); });
  get("model.psi", [&](auto&, auto& v) { c.psi = parse_psi_variant(v); });
  get("plan.h", [&](auto& k, auto& v) { c.spacing = detail::parse_double(k, v); });
  get("plan.R", [&](auto& k, auto& v) { c.radius = detail::parse_double(k, v); });
  get("plan.max_cells", [&](auto& k, auto& v) { c.max_cells = as_size(k, v); });
  get("run.n", [&](auto& k, auto& v) { c.resolution = as_size(k, v); });
  get("run.realizations", [&](auto& k, auto& v) { c.realizations = as_size(k, v); });
  get("run.seed", [&](auto& k, auto& v) { c.seed = detail::parse_unsigned(k, v); });
  get("run.first_realization", [&](auto& k, auto& v) { c.first_realization = detail::parse_unsigned(k, v); });
  get("run.method", [&](auto&, auto& v) { c.method = detail::parse_method(v); });
  get("analysis.points", [&](auto& k, auto& v) { c.points = detail::parse_vectors(k, v); });
  get("analysis.thetas", [&](auto& k, auto& v) { c.thetas = detail::parse_vectors(k, v); });
  get("analysis.c", [&](auto& k, auto& v) { c.scale = detail::parse_double(k, v); });
  get("analysis.levels", [&](auto& k, auto& v) { c.levels = static_cast<int>(detail::parse_unsigned(k, v)); });
  get("analysis.set", [&](auto&, auto& v) { c.set = v; });
  get("analysis.epsilon", [&](auto& k, auto& v) { c.epsilon = detail::parse_double(k, v); });
  get("analysis.delta", [&](auto& k, auto& v) { c.delta = detail::parse_double(k, v); });
  get("analysis.pairs", [&](auto&, auto& v) { c.pairs = detail::parse_pairs(v); });
  get("analysis.mc_realizations", [&](auto& k, auto& v) { c.mc_realizations = as_size(k, v); });
  get("analysis.allowance", [&](auto& k, auto& v) { c.allowance = detail::parse_double(k, v); });
  get("analysis.convention", [&](auto&, auto& v) { c.convention = detail::parse_convention(v); });
  return c;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

/// FNV-1a (64-bit) of the serialized form, as 16 hex digits.
inline std::string config_hash(const RunConfig& c) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char ch : serialize(c)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

/// Checks shapes and value ranges, then the spectral conditions on (E, D).
inline ExponentPair validate_config(const RunConfig& c) {
  if (c.e_order == 0 || c.e.size() != c.e_order * c.e_order)
    throw ConfigError("E needs E_order^2 = " + std::to_string(c.e_order * c.e_order) + " entries, got " +
                      std::to_string(c.e.size()));
  if (c.d_order == 0 || c.d.size() != c.d_order * c.d_order)
    throw ConfigError("D needs D_order^2 = " + std::to_string(c.d_order * c.d_order) + " entries, got " +
                      std::to_string(c.d.size()));
  detail::check_alpha(c.alpha);
  if (c.resolution == 0) throw ConfigError("lattice resolution n must be positive");
  if (c.realizations == 0) throw ConfigError("realizations must be positive");
  for (const auto& p : c.points) {
    if (p.size() != c.e_order)
      throw ConfigError("every point needs E_order = " + std::to_string(c.e_order) + " coordinates");
  }
  for (const auto& t : c.thetas) {
    if (t.size() != c.d_order)
      throw ConfigError("every theta needs D_order = " + std::to_string(c.d_order) + " coordinates");
  }
  if (c.set != "graph" && c.set != "range")
    throw ConfigError("key 'analysis.set': expected graph or range, got '" + c.set + "'");
  const ExponentPair pair = validate_pair(SquareMatrix::from_row_major(c.e_order, c.e),
                                          SquareMatrix::from_row_major(c.d_order, c.d));
  // Raises ConfigError for diag psi with a non-diagonal E.
  HomogeneousFunction(c.psi, pair.e);
  return pair;
}

inline Eigen::VectorXd to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace osrf
