#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "r2r/controller.hpp"
#include "r2r/params.hpp"
#include "r2r/simulation.hpp"

namespace r2r {

struct AnalysisSettings {
  std::size_t bins = 360;
  std::vector<double> gains;  // optional gain grid

  bool operator==(const AnalysisSettings&) const = default;
};

struct OutputSettings {
  std::string dir = "out";
  bool svg = false;

  bool operator==(const OutputSettings&) const = default;
};

/// Everything one CLI invocation needs. Unspecified entries keep the
/// published defaults.
struct ExperimentConfig {
  SystemParams system;
  ControllerSpec controller;
  SimConfig simulation;
  AnalysisSettings analysis;
  double convergence_threshold = 0.01;  // fraction of max |E|
  OutputSettings output;

  bool operator==(const ExperimentConfig&) const = default;
};

/// Parses the JSON config format documented in the README. Throws
/// ConfigError naming the offending key (dotted path) on malformed input,
/// unknown keys or invalid values.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Full JSON form of `config`; parse_config(serialize_config(c)) == c.
std::string serialize_config(const ExperimentConfig& config);

/// Re-checks cross-field constraints; throws ConfigError.
void validate_config(const ExperimentConfig& config);

}  // namespace r2r
