#include <atomic>
#include <sstream>
#include <stdexcept>
#include <string>

#include <doctest.h>

#include "r2r/config.hpp"
#include "r2r/errors.hpp"
#include "r2r/experiment.hpp"
#include "r2r/report.hpp"

using namespace r2r;
using doctest::Approx;

namespace {

ExperimentConfig short_config(const char* preset, std::size_t iterations) {
  ExperimentConfig c;
  c.controller = *controller_preset(preset);
  c.simulation.iterations = iterations;
  return c;
}

std::string first_line(const std::string& text) { return text.substr(0, text.find('\n')); }

}  // namespace

TEST_CASE("config defaults") {
  const ExperimentConfig c = parse_config("{}");
  CHECK(c == ExperimentConfig{});
  CHECK(c.system.eccentricity == 1e-3);
  CHECK(c.simulation.dt == 1e-3);
  CHECK(c.controller.stilc->learning_gain == 5000.0);
  CHECK(c.controller.stilc->basis_steps == 20);
}

TEST_CASE("config round trip") {
  ExperimentConfig c = short_config("stilc-lqr", 7);
  c.system.eccentricity = 5e-4;
  c.system.span_length = {2.39, 2.4, 2.41};
  c.controller.stilc->learning_gain = 1234.5;
  c.controller.stilc->channel = StilcChannel::kBoth;
  c.simulation.record_trace = true;
  c.simulation.sampling = TerminalSampling::kGrid;
  c.analysis.gains = {-100.0, 0.1, 3000.0};
  c.output.svg = true;
  const ExperimentConfig back = parse_config(serialize_config(c));
  CHECK(back == c);

  ExperimentConfig open = short_config("open-loop", 3);
  CHECK(parse_config(serialize_config(open)) == open);
}

TEST_CASE("config presets and overrides") {
  const ExperimentConfig c = parse_config(R"({"controller": {"preset": "pid-b"}})");
  CHECK(c.controller.pid == pid_preset_b());
  CHECK_FALSE(c.controller.stilc.has_value());
  const ExperimentConfig d =
      parse_config(R"({"controller": {"preset": "pid-b", "stilc": {"learning_gain": 10}}})");
  REQUIRE(d.controller.stilc.has_value());
  CHECK(d.controller.stilc->learning_gain == 10.0);
}

TEST_CASE("config errors name the key") {
  const auto message = [](const char* text) {
    try {
      parse_config(text);
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(message(R"({"system": {"radiuss": 1}})").find("system.radiuss") != std::string::npos);
  CHECK(message(R"({"simulation": {"dt": -1}})").find("simulation") != std::string::npos);
  CHECK(message(R"({"controller": {"preset": "nope"}})").find("controller.preset") != std::string::npos);
  CHECK(message(R"({"system": {"eccentricity": "big"}})").find("system.eccentricity") != std::string::npos);
  CHECK_FALSE(message("{").empty());
  CHECK_FALSE(message(R"({"simulation": {"iterations": 0}})").empty());
  CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ConfigError);
}

TEST_CASE("series summaries") {
  SeriesSummary s = summarize_series({0.0, 1.0, 0.5, -0.2, 0.1, 0.005, 0.001});
  CHECK(s.max_abs == 1.0);
  CHECK(s.last_abs == 0.001);
  CHECK(s.converged);
  CHECK(s.overshoot == Approx(0.2));
  CHECK(s.iterations_to_threshold == 5);
  CHECK(s.first_below_threshold == 0);

  s = summarize_series({1.0, 2.0, 3.0});
  CHECK_FALSE(s.converged);
  CHECK(s.overshoot == 0.0);
  CHECK(s.iterations_to_threshold == -1);

  CHECK(monotone_after_peak({0.0, 1.0, 0.8, 0.5, 0.001, 0.002}));
  CHECK_FALSE(monotone_after_peak({0.0, 1.0, 0.8, 0.9, 0.001}));
}

TEST_CASE("golden csv headers") {
  std::ostringstream it, tr, sw, ss, cmp, grid;
  write_iterations_csv(it, {});
  write_trace_csv(tr, {});
  write_sweep_csv(sw, {});
  write_sweep_series_csv(ss, {});
  write_compare_csv(cmp, {});
  write_gain_grid_csv(grid, {});
  CHECK(first_line(it.str()) ==
        "iteration,terminal_re_m,terminal_time_s,max_abs_tension_N,max_abs_speed_mps,xi");
  CHECK(first_line(tr.str()) ==
        "time_s,tension_upstream_N,tension_print_N,tension_downstream_N,speed_upstream_mps,"
        "speed_downstream_mps,registration_error_m");
  CHECK(first_line(sw.str()) == "gain,converged,overshoot,iterations_to_1pct");
  CHECK(first_line(ss.str()) == "gain,iteration,terminal_re_m");
  CHECK(first_line(cmp.str()) == "scenario,iteration,terminal_re_m");
  CHECK(first_line(grid.str()) ==
        "gain,omega1,omega2,lambda1_re,lambda1_im,lambda2_re,lambda2_im,converges,marginal");
}

TEST_CASE("csv output is deterministic and round-trips doubles") {
  const ExperimentConfig c = short_config("stilc-pid", 3);
  const ExperimentResult a = run_experiment(c.system, c.simulation, c.controller);
  const ExperimentResult b = run_experiment(c.system, c.simulation, c.controller);
  std::ostringstream oa, ob;
  write_iterations_csv(oa, a.records);
  write_iterations_csv(ob, b.records);
  CHECK(oa.str() == ob.str());

  std::istringstream in(oa.str());
  std::string line;
  std::getline(in, line);
  std::getline(in, line);
  std::getline(in, line);  // iteration 1
  const auto first = line.find(',');
  const double value = std::stod(line.substr(first + 1, line.find(',', first + 1) - first - 1));
  CHECK(value == a.records[1].terminal_re);
}

TEST_CASE("gain sweep") {
  const ExperimentConfig c = short_config("pid-a", 4);
  const auto points = sweep_gain(c, {0.0, 3000.0}, 2);
  REQUIRE(points.size() == 2);
  CHECK(points[0].gain == 0.0);
  CHECK(points[1].gain == 3000.0);
  // A zero learning gain reproduces plain feedback.
  const ExperimentResult plain = run_experiment(c.system, c.simulation, c.controller);
  CHECK(points[0].series == plain.terminal_errors());
  CHECK(points[1].series != plain.terminal_errors());
  // Thread count does not change results.
  CHECK(sweep_gain(c, {0.0, 3000.0}, 1)[1].series == points[1].series);
}

TEST_CASE("parallel_for") {
  std::vector<int> hits(50, 0);
  parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i] += static_cast<int>(i); });
  for (std::size_t i = 0; i < hits.size(); ++i) CHECK(hits[i] == static_cast<int>(i));

  std::atomic<int> runs{0};
  try {
    parallel_for(20, 3, [&](std::size_t i) {
      ++runs;
      if (i == 7 || i == 12) throw std::runtime_error(std::to_string(i));
    });
    FAIL("expected an exception");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()) == "7");
  }
  CHECK(runs == 20);
}

TEST_CASE("scenario comparison is ordered by name") {
  const auto results = compare_scenarios(
      {{"pid-b", short_config("pid-b", 2)}, {"open-loop", short_config("open-loop", 2)},
       {"lqr", short_config("lqr", 2)}},
      3);
  REQUIRE(results.size() == 3);
  CHECK(results[0].name == "lqr");
  CHECK(results[1].name == "open-loop");
  CHECK(results[2].name == "pid-b");
  std::ostringstream out;
  write_compare_csv(out, results);
  CHECK(out.str().find("lqr,0,") != std::string::npos);
}

TEST_CASE("analysis report") {
  ExperimentConfig c;
  c.analysis.gains = {-100.0, 3000.0};
  const AnalysisReport r = analyze(c);
  CHECK(r.learning_gain == 5000.0);
  CHECK(r.verdict.converges);
  REQUIRE(r.critical_gain.has_value());
  CHECK(*r.critical_gain > 3500.0);
  CHECK(*r.critical_gain < 6500.0);
  CHECK(r.feasibility.feasible);
  CHECK_FALSE(r.disturbance_zero);
  CHECK(r.grid.size() == 2);
  std::ostringstream out;
  write_analysis_report(out, r);
  CHECK(out.str().find("verdict: converges") != std::string::npos);

  c.system.eccentricity = 0.0;
  CHECK(analyze(c).disturbance_zero);
}

TEST_CASE("svg chart") {
  std::ostringstream out;
  write_svg_chart(out, "Registration error", "E [m]", {{"a", {0.0, 1.0, -1.0}}, {"b", {2.0}}});
  const std::string svg = out.str();
  CHECK(svg.starts_with("<svg") == true);
  CHECK(svg.find("</svg>") != std::string::npos);
  CHECK(svg.find("polyline") != std::string::npos);
}
