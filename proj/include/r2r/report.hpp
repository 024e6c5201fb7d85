#pragma once

#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "r2r/analysis.hpp"
#include "r2r/experiment.hpp"
#include "r2r/simulation.hpp"

namespace r2r {

// Fixed CSV headers; column order is part of the output contract.
inline constexpr std::string_view kIterationsHeader =
    "iteration,terminal_re_m,terminal_time_s,max_abs_tension_N,max_abs_speed_mps,xi";
inline constexpr std::string_view kTraceHeader =
    "time_s,tension_upstream_N,tension_print_N,tension_downstream_N,speed_upstream_mps,"
    "speed_downstream_mps,registration_error_m";
inline constexpr std::string_view kSweepHeader = "gain,converged,overshoot,iterations_to_1pct";
inline constexpr std::string_view kSweepSeriesHeader = "gain,iteration,terminal_re_m";
inline constexpr std::string_view kCompareHeader = "scenario,iteration,terminal_re_m";
inline constexpr std::string_view kGainGridHeader =
    "gain,omega1,omega2,lambda1_re,lambda1_im,lambda2_re,lambda2_im,converges,marginal";

void write_iterations_csv(std::ostream& out, const std::vector<IterationRecord>& records);
void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& trace);
void write_sweep_csv(std::ostream& out, const std::vector<SweepPoint>& points);
void write_sweep_series_csv(std::ostream& out, const std::vector<SweepPoint>& points);
void write_compare_csv(std::ostream& out, const std::vector<ScenarioResult>& results);
void write_gain_grid_csv(std::ostream& out, const std::vector<GainGridRow>& rows);

/// "key: value" lines.
void write_analysis_report(std::ostream& out, const AnalysisReport& report);

struct ChartSeries {
  std::string label;
  std::vector<double> values;  // y per iteration
};

/// Minimal standalone SVG line chart of y against iteration index.
void write_svg_chart(std::ostream& out, std::string_view title, std::string_view y_label,
                     const std::vector<ChartSeries>& series);

}  // namespace r2r
