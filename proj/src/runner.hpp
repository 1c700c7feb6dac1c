// Copyright dwlab contributors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "io.hpp"

namespace dwlab
{

inline constexpr const char *kVersion = "0.1.0";

struct RunConfig
{
  std::string experiment;     // spectrum | pressure | decay | verify-gap
  std::string geometry_kind;  // circle | torus | matrix | bolza | doubling
  double length = 2.0 * M_PI;  // circle
  double lx = 1.0, ly = 1.0;   // torus
  int resolution = 64;
  int ny = 0;  // torus y resolution; 0 = same as resolution
  std::string matrix_path;

  std::string damping_kind = "constant";  // constant | strip
  double a0 = 0.1;
  double strip_center = 0.5, strip_width = 0.3, strip_smoothing = 0.05;

  PressureConfig pressure;
  bool pressure_set = false;  // schedule overridden by the config
  double margin = 0.1;

  double decay_horizon = 100.0;
  unsigned long seed = 1;
  std::string out_dir = ".";
  int threads = 0;  // 0 = library default

  std::string source_path;  // config file, for hashing

  DampingProfile make_damping() const;
  Geometry make_geometry() const;  // circle/torus/matrix only
};

struct RunManifest
{
  std::string config_hash;
  std::string version = kVersion;
  double wall_time_s = 0.0;
  std::string stages_json;  // per-stage parameters, serialized
  std::vector<std::pair<std::string, std::string>> outputs;  // file, hash
  std::string error;  // empty on success
  bool ok = false;
};

// Strict-schema loader: unknown keys rejected, every violation reported in
// one error message.
RunConfig load_config(const std::string &path);

RunManifest run_experiment(const RunConfig &cfg);

// Empty string when the experiment/geometry pairing is valid; otherwise a
// validation message. Used after CLI subcommand overrides.
std::string experiment_compat_error(const RunConfig &cfg);

std::string default_config_json();

}  // namespace dwlab
