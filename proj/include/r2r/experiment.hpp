#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "r2r/analysis.hpp"
#include "r2r/config.hpp"
#include "r2r/simulation.hpp"

namespace r2r {

/// Iteration-domain summary of a terminal-error series (0-based indices).
struct SeriesSummary {
  double max_abs = 0.0;
  double last_abs = 0.0;
  bool converged = false;  // |E_last| < threshold * max |E|
  /// max |E_j| after the first sign change divided by |E_1|; 0 without a
  /// sign change.
  double overshoot = 0.0;
  /// First index from which |E| stays below threshold * max |E| through the
  /// end of the series; -1 if never.
  long iterations_to_threshold = -1;
  /// First index with |E| below the threshold (may later rise again); -1 if never.
  long first_below_threshold = -1;
};

SeriesSummary summarize_series(const std::vector<double>& series, double threshold = 0.01);

/// True when |E| does not increase from its peak until it first drops below
/// `threshold * max |E|` (or to the end of the series).
bool monotone_after_peak(const std::vector<double>& series, double threshold = 0.01);

struct SweepPoint {
  double gain = 0.0;
  std::vector<double> series;
  SeriesSummary summary;
};

/// Runs one experiment per learning gain (the controller's learning part is
/// created with default settings when absent). Points run on up to `jobs`
/// threads; the result order follows `gains`.
std::vector<SweepPoint> sweep_gain(const ExperimentConfig& config, const std::vector<double>& gains,
                                   std::size_t jobs = 1);

struct Scenario {
  std::string name;
  ExperimentConfig config;
};

struct ScenarioResult {
  std::string name;
  ExperimentResult result;
};

/// Runs every scenario (concurrently with `jobs` > 1) and returns them sorted
/// by name; equal names keep their input order.
std::vector<ScenarioResult> compare_scenarios(const std::vector<Scenario>& scenarios,
                                              std::size_t jobs = 1);

struct AnalysisReport {
  std::string preset;
  double learning_gain = 0.0;
  std::size_t bins = 0;
  std::size_t basis_steps = 0;
  GainSlopes slopes;
  OmegaCoefficients omegas;
  ConvergenceVerdict verdict;
  std::optional<double> critical_gain;
  std::string critical_gain_note;  // reason when absent
  Feasibility feasibility;
  bool disturbance_zero = false;   // u_dist identically zero
  double max_abs_disturbance = 0.0;
  std::vector<GainGridRow> grid;
};

/// Throws UnstablePreset for a non-stabilizing feedback law.
AnalysisReport analyze(const ExperimentConfig& config);

/// Runs `task(i)` for i in [0, count) on up to `jobs` worker threads. The
/// first exception (lowest index) is rethrown after all workers finish.
void parallel_for(std::size_t count, std::size_t jobs, const std::function<void(std::size_t)>& task);

}  // namespace r2r
