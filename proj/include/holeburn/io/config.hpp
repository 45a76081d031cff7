#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "holeburn/chirp.hpp"
#include "holeburn/types.hpp"

namespace holeburn::io {

/// Value of one config key: number, boolean, string or number array.
using ConfigValue =
    std::variant<double, bool, std::string, std::vector<double>>;

/// Parsed key/value config with [section] grouping; a small TOML-style
/// subset (scalars, "strings", booleans and [a, b, c] number arrays,
/// '#' comments). Lookup keys are "section.key".
struct ConfigFile {
  std::map<std::string, ConfigValue> entries;

  bool has(const std::string& key) const;
  double number(const std::string& key) const;
  double number_or(const std::string& key, double fallback) const;
  bool boolean_or(const std::string& key, bool fallback) const;
  std::string text(const std::string& key) const;
  std::string text_or(const std::string& key,
                      const std::string& fallback) const;
  std::vector<double> array(const std::string& key) const;
};

ConfigFile parse_config(const std::string& path);
ConfigFile parse_config_text(const std::string& text,
                             const std::string& label);

/// One run of the pipeline: the level system, the selected model with its
/// parameter table, chirp settings, RNG seed and output directory. The seed
/// fully determines all synthetic noise.
struct RunConfig {
  HyperfineSystem system;
  bool branching_given = false;  // [system].branching was set explicitly
  std::string model_name;                       // may be empty
  std::map<std::string, double> param_overrides;  // [params] + --fix
  std::vector<std::string> thawed;              // --free
  ChirpReadout chirp;
  HoleProfile hole;
  std::uint64_t seed = 0;
  std::string out_dir = "out";

  // synthetic-grid settings
  double x_min = 0.0;
  double x_max = 6e-3;
  int n_points = 50;
  bool log_spacing = false;
  double noise_frac = 0.0;

  RateLawParams rate_law;
  LinewidthModel linewidth;

  /// Builds a RunConfig from a parsed file, validating the system block
  /// against the core invariants. Throws std::invalid_argument with the
  /// first violation.
  static RunConfig from_file(const ConfigFile& cfg);
};

}  // namespace holeburn::io
