#include "r2r/report.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include <fmt/format.h>
#include <fmt/ostream.h>

namespace r2r {

namespace {

// Shortest round-trip representation; stable across runs.
std::string num(double v) { return fmt::format("{}", v); }

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

void write_iterations_csv(std::ostream& out, const std::vector<IterationRecord>& records) {
  out << kIterationsHeader << '\n';
  for (const auto& r : records) {
    fmt::print(out, "{},{},{},{},{},{}\n", r.iteration, num(r.terminal_re), num(r.terminal_time),
               num(r.max_abs_tension), num(r.max_abs_speed), num(r.xi));
  }
}

void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& trace) {
  out << kTraceHeader << '\n';
  for (const auto& t : trace) {
    fmt::print(out, "{},{},{},{},{},{},{}\n", num(t.time), num(t.tension_upstream),
               num(t.tension_print), num(t.tension_downstream), num(t.speed_upstream),
               num(t.speed_downstream), num(t.registration_error));
  }
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepPoint>& points) {
  out << kSweepHeader << '\n';
  for (const auto& p : points) {
    fmt::print(out, "{},{},{},{}\n", num(p.gain), p.summary.converged ? 1 : 0,
               num(p.summary.overshoot), p.summary.iterations_to_threshold);
  }
}

void write_sweep_series_csv(std::ostream& out, const std::vector<SweepPoint>& points) {
  out << kSweepSeriesHeader << '\n';
  for (const auto& p : points) {
    for (std::size_t j = 0; j < p.series.size(); ++j) {
      fmt::print(out, "{},{},{}\n", num(p.gain), j, num(p.series[j]));
    }
  }
}

void write_compare_csv(std::ostream& out, const std::vector<ScenarioResult>& results) {
  out << kCompareHeader << '\n';
  for (const auto& r : results) {
    for (const auto& rec : r.result.records) {
      fmt::print(out, "{},{},{}\n", r.name, rec.iteration, num(rec.terminal_re));
    }
  }
}

void write_gain_grid_csv(std::ostream& out, const std::vector<GainGridRow>& rows) {
  out << kGainGridHeader << '\n';
  for (const auto& r : rows) {
    const auto& v = r.verdict;
    fmt::print(out, "{},{},{},{},{},{},{},{},{}\n", num(r.gain), num(r.omegas.omega1),
               num(r.omegas.omega2), num(v.lambda1.real()), num(v.lambda1.imag()),
               num(v.lambda2.real()), num(v.lambda2.imag()), v.converges ? 1 : 0,
               v.marginal ? 1 : 0);
  }
}

void write_analysis_report(std::ostream& out, const AnalysisReport& r) {
  const auto line = [&](std::string_view key, const std::string& value) {
    fmt::print(out, "{}: {}\n", key, value);
  };
  const auto complex = [](std::complex<double> z) {
    return fmt::format("{} {:+}i", num(z.real()), z.imag());
  };
  line("preset", r.preset);
  line("bins", std::to_string(r.bins));
  line("basis_steps", std::to_string(r.basis_steps));
  line("learning_gain", num(r.learning_gain));
  line("omega1", num(r.omegas.omega1));
  line("omega2", num(r.omegas.omega2));
  line("omega3", num(r.omegas.omega3));
  line("omega1_per_gain", num(r.slopes.beta));
  line("omega2_per_gain", num(r.slopes.gamma));
  line("discriminant", num(r.verdict.discriminant));
  line("case", std::to_string(r.verdict.case_id));
  line("lambda1", complex(r.verdict.lambda1));
  line("lambda2", complex(r.verdict.lambda2));
  line("abs_lambda1", num(std::abs(r.verdict.lambda1)));
  line("abs_lambda2", num(std::abs(r.verdict.lambda2)));
  line("verdict", r.verdict.marginal ? "marginal" : (r.verdict.converges ? "converges" : "diverges"));
  line("region_check", r.verdict.region_converges ? "converges" : "diverges");
  line("critical_gain", r.critical_gain ? num(*r.critical_gain) : "none (" + r.critical_gain_note + ")");
  line("feasibility_n_phi", num(r.feasibility.n_phi));
  line("feasible", r.feasibility.feasible ? "yes" : "no");
  line("xi_star", num(r.feasibility.xi_star));
  line("disturbance", r.disturbance_zero ? "zero" : "nonzero");
  line("max_abs_disturbance_Nm", num(r.max_abs_disturbance));
}

void write_svg_chart(std::ostream& out, std::string_view title, std::string_view y_label,
                     const std::vector<ChartSeries>& series) {
  constexpr double kW = 640, kH = 400, kLeft = 80, kRight = 150, kTop = 40, kBottom = 50;
  constexpr std::array<std::string_view, 8> kColors{"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                                    "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};
  std::size_t n = 1;
  double lo = 0.0, hi = 0.0;
  for (const auto& s : series) {
    n = std::max(n, s.values.size());
    for (double v : s.values) {
      if (!std::isfinite(v)) continue;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  if (hi == lo) hi = lo + 1.0;
  const double pw = kW - kLeft - kRight, ph = kH - kTop - kBottom;
  const auto px = [&](std::size_t j) {
    return kLeft + (n > 1 ? pw * static_cast<double>(j) / static_cast<double>(n - 1) : 0.0);
  };
  const auto py = [&](double v) { return kTop + ph * (hi - v) / (hi - lo); };

  fmt::print(out,
             "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" "
             "font-family=\"sans-serif\" font-size=\"12\">\n",
             kW, kH);
  fmt::print(out, "<rect width=\"{}\" height=\"{}\" fill=\"white\"/>\n", kW, kH);
  fmt::print(out, "<text x=\"{}\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">{}</text>\n",
             kLeft + pw / 2, xml_escape(title));
  fmt::print(out, "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n",
             kLeft, kTop, pw, ph);
  if (lo < 0.0 && hi > 0.0) {
    fmt::print(out, "<line x1=\"{}\" y1=\"{:.2f}\" x2=\"{}\" y2=\"{:.2f}\" stroke=\"#999\" stroke-dasharray=\"4 3\"/>\n",
               kLeft, py(0.0), kLeft + pw, py(0.0));
  }
  fmt::print(out, "<text x=\"{}\" y=\"{:.2f}\" text-anchor=\"end\">{:.3g}</text>\n", kLeft - 4, py(hi) + 4, hi);
  fmt::print(out, "<text x=\"{}\" y=\"{:.2f}\" text-anchor=\"end\">{:.3g}</text>\n", kLeft - 4, py(lo) + 4, lo);
  fmt::print(out, "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">0</text>\n", kLeft, kH - kBottom + 16);
  fmt::print(out, "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n", kLeft + pw, kH - kBottom + 16, n - 1);
  fmt::print(out, "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">iteration</text>\n", kLeft + pw / 2, kH - 12);
  fmt::print(out, "<text x=\"16\" y=\"{}\" text-anchor=\"middle\" transform=\"rotate(-90 16 {})\">{}</text>\n",
             kTop + ph / 2, kTop + ph / 2, xml_escape(y_label));

  for (std::size_t s = 0; s < series.size(); ++s) {
    const auto color = kColors[s % kColors.size()];
    std::string points;
    for (std::size_t j = 0; j < series[s].values.size(); ++j) {
      const double v = series[s].values[j];
      if (!std::isfinite(v)) continue;
      points += fmt::format("{}{:.2f},{:.2f}", points.empty() ? "" : " ", px(j), py(v));
    }
    fmt::print(out, "<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\" points=\"{}\"/>\n",
               color, points);
    const double ly = kTop + 16.0 * static_cast<double>(s + 1);
    fmt::print(out, "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{}\" stroke-width=\"2\"/>\n",
               kLeft + pw + 10, ly - 4, kLeft + pw + 28, ly - 4, color);
    fmt::print(out, "<text x=\"{}\" y=\"{}\">{}</text>\n", kLeft + pw + 32, ly,
               xml_escape(series[s].label));
  }
  out << "</svg>\n";
}

}  // namespace r2r
