#pragma once

// Simulation config, INI style:
//
//   [grid]     a, b, n
//   [physics]  eps, potential (constant | harmonic), potential_value,
//              potential_center, beta
//   [initial]  profile (gauss-quadratic | gauss-logcosh), width
//   [time]     tau_e, steps, downsample_time, downsample_space
//
// Optional: `potential_center` (harmonic well center, default 0), `beta`,
// `downsample_time`, `downsample_space`.

#include <filesystem>
#include <string>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "oscidmd/experiments.hpp"

namespace oscidmd {

struct SimulationConfig {
  experiments::DataSpec data;
  Index steps = 0;
};

namespace detail {

template <class T>
T config_value(const boost::property_tree::ptree& tree, const std::string& key) {
  const auto node = tree.get_optional<std::string>(key);
  if (!node) throw ValidationError("config: missing field '" + key + "'");
  try {
    return tree.get<T>(key);
  } catch (const boost::property_tree::ptree_bad_data&) {
    throw ValidationError("config: field '" + key + "' has invalid value '" + *node + "'");
  }
}

template <class T>
T config_value(const boost::property_tree::ptree& tree, const std::string& key, T fallback) {
  return tree.get_optional<std::string>(key) ? config_value<T>(tree, key) : fallback;
}

}  // namespace detail

inline SimulationConfig parse_simulation_config(std::istream& is) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::read_ini(is, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ValidationError("config: line " + std::to_string(e.line()) + ": " + e.message());
  }
  using detail::config_value;
  SimulationConfig c;
  auto& d = c.data;
  d.fine_grid = {config_value<double>(tree, "grid.a"), config_value<double>(tree, "grid.b"),
                 config_value<Index>(tree, "grid.n")};
  d.eps = config_value<double>(tree, "physics.eps");
  d.potential_kind = config_value<std::string>(tree, "physics.potential");
  d.potential_value = config_value<double>(tree, "physics.potential_value");
  d.potential_center = config_value<double>(tree, "physics.potential_center", 0.0);
  d.beta = config_value<double>(tree, "physics.beta", 0.0);
  d.profile.kind = config_value<std::string>(tree, "initial.profile");
  d.profile.width = config_value<double>(tree, "initial.width");
  d.tau_e = config_value<double>(tree, "time.tau_e");
  c.steps = config_value<Index>(tree, "time.steps");
  d.downsample_time = config_value<Index>(tree, "time.downsample_time", Index{1});
  d.downsample_space = config_value<Index>(tree, "time.downsample_space", Index{1});
  detail::require(c.steps >= 0, "config: field 'time.steps' must be nonnegative");
  detail::require(d.downsample_time >= 1 && c.steps % d.downsample_time == 0,
                  "config: field 'time.downsample_time' must divide time.steps");
  (void)d.potential();
  return c;
}

inline SimulationConfig load_simulation_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ValidationError("cannot open config file: " + path.string());
  return parse_simulation_config(is);
}

/// Runs the configured simulation; the result has steps / downsample_time + 1 columns.
inline SnapshotMatrix run_simulation(const SimulationConfig& c) {
  return experiments::generate(c.data, c.steps / c.data.downsample_time + 1);
}

}  // namespace oscidmd
