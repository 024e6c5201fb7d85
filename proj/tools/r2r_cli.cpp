// Command-line harness: simulate, sweep-gain, analyze, compare.

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "r2r/config.hpp"
#include "r2r/errors.hpp"
#include "r2r/experiment.hpp"
#include "r2r/report.hpp"

namespace fs = std::filesystem;
using namespace r2r;

namespace {

enum ExitCode { kOk = 0, kOtherError = 1, kConfigError = 2, kSimulationError = 3, kUnstable = 4 };

// Raw flag values; numbers are kept as text so scientific notation works
// for counts too ("--iterations 4e1").
struct Flags {
  std::string config;
  std::string preset;
  std::string eccentricity;
  std::string learning_gain;
  std::string basis_steps;
  std::string iterations;
  std::string dt;
  std::string out;
  std::string jobs = "1";
  std::string bins;
  std::vector<std::string> gains;
  std::vector<std::string> scenarios;
  bool svg = false;
  bool trace = false;
};

double parse_number(const std::string& key, const std::string& text) {
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (text.empty() || end != text.c_str() + text.size() || !std::isfinite(v)) {
    throw ConfigError(key, "'" + text + "' is not a finite number");
  }
  return v;
}

std::size_t parse_count(const std::string& key, const std::string& text) {
  const double v = parse_number(key, text);
  if (v < 0.0 || v != std::floor(v) || v > 1e15) {
    throw ConfigError(key, "'" + text + "' is not a non-negative integer");
  }
  return static_cast<std::size_t>(v);
}

StilcSettings& learning_part(ControllerSpec& spec) {
  if (!spec.stilc) spec.stilc = StilcSettings{};
  return *spec.stilc;
}

// Everything except the preset, which compare uses to define scenarios.
void apply_common(ExperimentConfig& c, const Flags& f) {
  if (!f.eccentricity.empty()) c.system.eccentricity = parse_number("eccentricity", f.eccentricity);
  if (!f.learning_gain.empty()) {
    learning_part(c.controller).learning_gain = parse_number("learning-gain", f.learning_gain);
  }
  if (!f.basis_steps.empty()) {
    learning_part(c.controller).basis_steps = parse_count("basis-steps", f.basis_steps);
  }
  if (!f.iterations.empty()) c.simulation.iterations = parse_count("iterations", f.iterations);
  if (!f.dt.empty()) c.simulation.dt = parse_number("dt", f.dt);
  if (!f.bins.empty()) c.analysis.bins = parse_count("bins", f.bins);
  if (!f.out.empty()) c.output.dir = f.out;
  if (f.svg) c.output.svg = true;
  if (f.trace) c.simulation.record_trace = true;
  if (!f.gains.empty()) {
    c.analysis.gains.clear();
    for (const auto& g : f.gains) c.analysis.gains.push_back(parse_number("gains", g));
  }
}

ControllerSpec preset_or_throw(const std::string& key, const std::string& name) {
  const auto spec = controller_preset(name);
  if (!spec) throw ConfigError(key, "unknown preset '" + name + "'");
  return *spec;
}

ExperimentConfig base_config(const Flags& f) {
  ExperimentConfig c = f.config.empty() ? ExperimentConfig{} : load_config(f.config);
  if (!f.preset.empty()) c.controller = preset_or_throw("preset", f.preset);
  apply_common(c, f);
  validate_config(c);
  return c;
}

std::ofstream open_output(const ExperimentConfig& c, const std::string& name) {
  fs::create_directories(c.output.dir);
  const fs::path path = fs::path(c.output.dir) / name;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

int cmd_simulate(const Flags& f) {
  const ExperimentConfig c = base_config(f);
  const ExperimentResult r = run_experiment(c.system, c.simulation, c.controller);
  {
    auto out = open_output(c, "iterations.csv");
    write_iterations_csv(out, r.records);
  }
  if (c.simulation.record_trace) {
    auto out = open_output(c, "trace.csv");
    write_trace_csv(out, r.trace);
  }
  if (c.output.svg) {
    auto out = open_output(c, "plot.svg");
    write_svg_chart(out, "Terminal registration error (" + c.controller.preset + ")",
                    "terminal RE [m]", {{c.controller.preset, r.terminal_errors()}});
  }
  const SeriesSummary s = summarize_series(r.terminal_errors(), c.convergence_threshold);
  fmt::print("{}: {} iterations, final |E| = {:.4g} m, max |E| = {:.4g} m, converged = {}\n",
             c.controller.preset, r.records.size(), s.last_abs, s.max_abs, s.converged);
  return kOk;
}

int cmd_sweep(const Flags& f) {
  const ExperimentConfig c = base_config(f);
  if (c.analysis.gains.empty()) throw ConfigError("gains", "at least one gain is required");
  const auto points = sweep_gain(c, c.analysis.gains, parse_count("jobs", f.jobs));
  {
    auto out = open_output(c, "sweep.csv");
    write_sweep_csv(out, points);
  }
  {
    auto out = open_output(c, "sweep_series.csv");
    write_sweep_series_csv(out, points);
  }
  if (c.output.svg) {
    std::vector<ChartSeries> series;
    for (const auto& p : points) series.push_back({fmt::format("L = {}", p.gain), p.series});
    auto out = open_output(c, "sweep.svg");
    write_svg_chart(out, "Learning-gain sweep", "terminal RE [m]", series);
  }
  for (const auto& p : points) {
    fmt::print("gain {}: converged = {}, overshoot = {:.4g}, iterations_to_1pct = {}\n", p.gain,
               p.summary.converged, p.summary.overshoot, p.summary.iterations_to_threshold);
  }
  return kOk;
}

int cmd_analyze(const Flags& f) {
  const ExperimentConfig c = base_config(f);
  const AnalysisReport rep = analyze(c);
  {
    auto out = open_output(c, "analysis.txt");
    write_analysis_report(out, rep);
  }
  if (!rep.grid.empty()) {
    auto out = open_output(c, "analysis_grid.csv");
    write_gain_grid_csv(out, rep.grid);
  }
  write_analysis_report(std::cout, rep);
  return kOk;
}

int cmd_compare(const Flags& f) {
  if (f.scenarios.size() < 2) throw ConfigError("scenarios", "compare needs at least two scenarios");
  Flags common = f;
  common.preset.clear();
  const ExperimentConfig base = base_config(common);
  std::vector<Scenario> scenarios;
  for (const auto& token : f.scenarios) {
    Scenario sc;
    if (fs::is_regular_file(token)) {
      sc.name = fs::path(token).stem().string();
      sc.config = load_config(token);
      apply_common(sc.config, common);
    } else {
      sc.name = token;
      sc.config = base;
      sc.config.controller = preset_or_throw("scenarios", token);
    }
    validate_config(sc.config);
    scenarios.push_back(std::move(sc));
  }
  const auto results = compare_scenarios(scenarios, parse_count("jobs", f.jobs));
  {
    auto out = open_output(base, "compare.csv");
    write_compare_csv(out, results);
  }
  if (base.output.svg) {
    std::vector<ChartSeries> series;
    for (const auto& r : results) series.push_back({r.name, r.result.terminal_errors()});
    auto out = open_output(base, "compare.svg");
    write_svg_chart(out, "Scenario comparison", "terminal RE [m]", series);
  }
  for (const auto& r : results) {
    const auto s = summarize_series(r.result.terminal_errors(), base.convergence_threshold);
    fmt::print("{}: final |E| = {:.4g} m, max |E| = {:.4g} m\n", r.name, s.last_abs, s.max_abs);
  }
  return kOk;
}

void add_common(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config, "JSON experiment config");
  cmd->add_option("--preset", f.preset, "controller preset");
  cmd->add_option("--eccentricity", f.eccentricity, "roller eccentricity [m]");
  cmd->add_option("--learning-gain", f.learning_gain, "learning gain (enables the learning part)");
  cmd->add_option("--basis-steps", f.basis_steps, "bins of the cosine basis");
  cmd->add_option("--iterations", f.iterations, "number of cycles");
  cmd->add_option("--dt", f.dt, "integrator step [s]");
  cmd->add_option("--out", f.out, "output directory");
  cmd->add_option("--jobs", f.jobs, "parallel simulations");
  cmd->add_flag("--svg", f.svg, "also write an SVG chart");
  cmd->add_flag("--trace", f.trace, "record the state trace");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Registration-error control experiments for a two-roller printing unit"};
  app.require_subcommand(1);
  Flags f;

  auto* simulate = app.add_subcommand("simulate", "run one closed-loop experiment");
  add_common(simulate, f);
  auto* sweep = app.add_subcommand("sweep-gain", "run one experiment per learning gain");
  add_common(sweep, f);
  sweep->add_option("--gains", f.gains, "learning gains (comma separated)")->delimiter(',');
  auto* analyze_cmd = app.add_subcommand("analyze", "iteration-domain convergence analysis");
  add_common(analyze_cmd, f);
  analyze_cmd->add_option("--gains", f.gains, "gain grid (comma separated)")->delimiter(',');
  analyze_cmd->add_option("--bins", f.bins, "angle bins per revolution");
  auto* compare = app.add_subcommand("compare", "run several scenarios and merge their series");
  add_common(compare, f);
  compare->add_option("scenarios", f.scenarios, "preset names or config files")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  try {
    if (*simulate) return cmd_simulate(f);
    if (*sweep) return cmd_sweep(f);
    if (*analyze_cmd) return cmd_analyze(f);
    if (*compare) return cmd_compare(f);
  } catch (const ConfigError& e) {
    fmt::print(std::cerr, "config error: {}\n", e.what());
    return kConfigError;
  } catch (const SimulationError& e) {
    fmt::print(std::cerr, "simulation error: {}\n", e.what());
    return kSimulationError;
  } catch (const UnstablePreset& e) {
    fmt::print(std::cerr, "unstable preset: {}\n", e.what());
    return kUnstable;
  } catch (const std::exception& e) {
    fmt::print(std::cerr, "error: {}\n", e.what());
    return kOtherError;
  }
  return kOtherError;
}
