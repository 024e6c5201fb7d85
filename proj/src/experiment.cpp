#include "r2r/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "r2r/errors.hpp"

namespace r2r {

SeriesSummary summarize_series(const std::vector<double>& e, double threshold) {
  SeriesSummary s;
  if (e.empty()) return s;
  for (double v : e) s.max_abs = std::max(s.max_abs, std::abs(v));
  s.last_abs = std::abs(e.back());
  const double limit = threshold * s.max_abs;
  s.converged = s.last_abs < limit;

  for (std::size_t j = 0; j < e.size(); ++j) {
    if (std::abs(e[j]) < limit) {
      s.first_below_threshold = static_cast<long>(j);
      break;
    }
  }
  for (std::size_t j = e.size(); j-- > 0;) {
    if (!(std::abs(e[j]) < limit)) break;
    s.iterations_to_threshold = static_cast<long>(j);
  }

  const auto first = std::find_if(e.begin(), e.end(), [](double v) { return v != 0.0; });
  if (first != e.end()) {
    const bool positive = *first > 0.0;
    const auto flip = std::find_if(first, e.end(), [&](double v) {
      return positive ? v < 0.0 : v > 0.0;
    });
    const double reference = std::abs(e.size() > 1 ? e[1] : e[0]);
    if (flip != e.end() && reference > 0.0) {
      double peak = 0.0;
      for (auto it = flip; it != e.end(); ++it) peak = std::max(peak, std::abs(*it));
      s.overshoot = peak / reference;
    }
  }
  return s;
}

bool monotone_after_peak(const std::vector<double>& e, double threshold) {
  if (e.empty()) return true;
  std::size_t peak = 0;
  double max_abs = 0.0;
  for (std::size_t j = 0; j < e.size(); ++j) {
    if (std::abs(e[j]) > max_abs) {
      max_abs = std::abs(e[j]);
      peak = j;
    }
  }
  const double limit = threshold * max_abs;
  for (std::size_t j = peak + 1; j < e.size(); ++j) {
    if (std::abs(e[j]) > std::abs(e[j - 1])) return false;
    if (std::abs(e[j]) < limit) break;
  }
  return true;
}

void parallel_for(std::size_t count, std::size_t jobs,
                  const std::function<void(std::size_t)>& task) {
  std::vector<std::exception_ptr> errors(count);
  const std::size_t workers = std::max<std::size_t>(1, std::min(jobs, count));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) {
      try {
        task(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < count; i = next++) {
          try {
            task(i);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    }
    for (auto& t : pool) t.join();
  }
  for (const auto& err : errors) {
    if (err) std::rethrow_exception(err);
  }
}

std::vector<SweepPoint> sweep_gain(const ExperimentConfig& config, const std::vector<double>& gains,
                                   std::size_t jobs) {
  std::vector<SweepPoint> points(gains.size());
  parallel_for(gains.size(), jobs, [&](std::size_t i) {
    ControllerSpec spec = config.controller;
    StilcSettings st = spec.stilc.value_or(StilcSettings{});
    st.learning_gain = gains[i];
    spec.stilc = st;
    const ExperimentResult r = run_experiment(config.system, config.simulation, spec);
    points[i].gain = gains[i];
    points[i].series = r.terminal_errors();
    points[i].summary = summarize_series(points[i].series, config.convergence_threshold);
  });
  return points;
}

std::vector<ScenarioResult> compare_scenarios(const std::vector<Scenario>& scenarios,
                                              std::size_t jobs) {
  std::vector<ScenarioResult> out(scenarios.size());
  parallel_for(scenarios.size(), jobs, [&](std::size_t i) {
    const auto& sc = scenarios[i];
    out[i].name = sc.name;
    out[i].result = run_experiment(sc.config.system, sc.config.simulation, sc.config.controller);
  });
  std::stable_sort(out.begin(), out.end(),
                   [](const ScenarioResult& a, const ScenarioResult& b) { return a.name < b.name; });
  return out;
}

AnalysisReport analyze(const ExperimentConfig& config) {
  const ControllerSpec& spec = config.controller;
  const StilcSettings st = spec.stilc.value_or(StilcSettings{});

  AnalysisReport rep;
  rep.preset = spec.preset;
  rep.learning_gain = st.learning_gain;
  rep.bins = config.analysis.bins;
  rep.basis_steps = st.basis_steps;

  const LtvProfile profile = discretize_closed_loop(config.system, spec, config.analysis.bins);
  const RecursionResult rec = run_recursions(profile);
  rep.slopes = gain_slopes(profile, rec);
  rep.omegas = compute_omegas(profile, rec, st.learning_gain, {}, {}, st.target);
  rep.verdict = convergence_verdict(rep.omegas.omega1, rep.omegas.omega2);
  try {
    rep.critical_gain = critical_gain(profile, rec);
  } catch (const NoSolution& e) {
    rep.critical_gain_note = e.what();
  }
  rep.feasibility = learning_feasibility(profile, rec, st.target);
  rep.disturbance_zero =
      std::all_of(profile.u_dist.begin(), profile.u_dist.end(), [](double u) { return u == 0.0; });
  for (double u : profile.u_dist) rep.max_abs_disturbance = std::max(rep.max_abs_disturbance, std::abs(u));
  if (!config.analysis.gains.empty()) rep.grid = gain_grid(profile, rec, config.analysis.gains);
  return rep;
}

}  // namespace r2r
