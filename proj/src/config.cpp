#include "r2r/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "r2r/errors.hpp"

namespace r2r {

using nlohmann::json;

namespace {

std::string join(const std::string& prefix, const std::string& key) {
  return prefix.empty() ? key : prefix + "." + key;
}

// Walks one JSON object, consuming known keys and rejecting the rest.
class Reader {
 public:
  Reader(const json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) throw ConfigError(path_, "expected an object");
  }

  template <typename T>
  void get(const std::string& key, T& out) {
    const json* v = find(key);
    if (v == nullptr) return;
    try {
      convert(*v, out, join(path_, key));
    } catch (const json::exception& e) {
      throw ConfigError(join(path_, key), fmt_type_error(e));
    }
  }

  bool has(const std::string& key) const { return node_.contains(key); }
  const json* find(const std::string& key) {
    seen_.push_back(key);
    const auto it = node_.find(key);
    return it == node_.end() ? nullptr : &*it;
  }
  std::string path(const std::string& key) const { return join(path_, key); }

  void finish() const {
    for (const auto& [key, value] : node_.items()) {
      (void)value;
      if (std::find(seen_.begin(), seen_.end(), key) == seen_.end()) {
        throw ConfigError(join(path_, key), "unknown key");
      }
    }
  }

 private:
  static std::string fmt_type_error(const json::exception& e) {
    std::string what = e.what();
    const auto pos = what.find("] ");
    return pos == std::string::npos ? what : what.substr(pos + 2);
  }

  static void convert(const json& v, double& out, const std::string& key) {
    if (!v.is_number()) throw ConfigError(key, "expected a number");
    out = v.get<double>();
  }
  static void convert(const json& v, bool& out, const std::string& key) {
    if (!v.is_boolean()) throw ConfigError(key, "expected true or false");
    out = v.get<bool>();
  }
  static void convert(const json& v, std::size_t& out, const std::string& key) {
    if (!v.is_number()) throw ConfigError(key, "expected a non-negative integer");
    const double d = v.get<double>();
    if (!(d >= 0.0) || d != std::floor(d) || d > 1e15) {
      throw ConfigError(key, "expected a non-negative integer");
    }
    out = static_cast<std::size_t>(d);
  }
  static void convert(const json& v, std::string& out, const std::string& key) {
    if (!v.is_string()) throw ConfigError(key, "expected a string");
    out = v.get<std::string>();
  }
  template <std::size_t N>
  static void convert(const json& v, std::array<double, N>& out, const std::string& key) {
    if (!v.is_array() || v.size() != N) {
      throw ConfigError(key, "expected an array of " + std::to_string(N) + " numbers");
    }
    for (std::size_t i = 0; i < N; ++i) convert(v[i], out[i], key + "[" + std::to_string(i) + "]");
  }
  static void convert(const json& v, std::vector<double>& out, const std::string& key) {
    if (!v.is_array()) throw ConfigError(key, "expected an array of numbers");
    out.assign(v.size(), 0.0);
    for (std::size_t i = 0; i < v.size(); ++i) {
      convert(v[i], out[i], key + "[" + std::to_string(i) + "]");
    }
  }

  const json& node_;
  std::string path_;
  std::vector<std::string> seen_;
};

void read_system(const json& node, SystemParams& p) {
  Reader r(node, "system");
  r.get("cross_section_area", p.cross_section_area);
  r.get("youngs_modulus", p.youngs_modulus);
  r.get("radius", p.radius);
  r.get("inertia", p.inertia);
  r.get("friction", p.friction);
  r.get("gear_ratio", p.gear_ratio);
  r.get("span_length", p.span_length);
  r.get("speed_ref", p.speed_ref);
  r.get("tension_ref", p.tension_ref);
  r.get("period_ref", p.period_ref);
  r.get("eccentricity", p.eccentricity);
  r.get("upstream_phase0", p.upstream_phase0);
  r.get("boundary_tension_ref", p.boundary_tension_ref);
  r.get("boundary_upstream_speed_ref", p.boundary_upstream_speed_ref);
  r.get("boundary_downstream_speed_ref", p.boundary_downstream_speed_ref);
  r.finish();
}

void read_controller(const json& node, ControllerSpec& c) {
  Reader r(node, "controller");
  // The preset sets the baseline; the remaining keys override it.
  if (const json* preset = r.find("preset")) {
    if (!preset->is_string()) throw ConfigError("controller.preset", "expected a string");
    const auto spec = controller_preset(preset->get<std::string>());
    if (!spec) {
      throw ConfigError("controller.preset", "unknown preset '" + preset->get<std::string>() + "'");
    }
    c = *spec;
  }
  if (const json* fb = r.find("feedback")) {
    const auto kind = fb->is_string() ? parse_feedback_kind(fb->get<std::string>()) : std::nullopt;
    if (!kind) throw ConfigError("controller.feedback", "expected open-loop, pid or lqr");
    c.feedback = *kind;
  }
  if (const json* pid = r.find("pid")) {
    Reader pr(*pid, "controller.pid");
    pr.get("kp", c.pid.kp);
    pr.get("ki", c.pid.ki);
    pr.get("kd", c.pid.kd);
    pr.finish();
  }
  if (const json* lqr = r.find("lqr")) {
    Reader lr(*lqr, "controller.lqr");
    lr.get("q_diag", c.lqr.q_diag);
    lr.get("r_diag", c.lqr.r_diag);
    lr.finish();
  }
  if (const json* st = r.find("stilc")) {
    if (st->is_null()) {
      c.stilc.reset();
    } else {
      StilcSettings s = c.stilc.value_or(StilcSettings{});
      Reader sr(*st, "controller.stilc");
      sr.get("learning_gain", s.learning_gain);
      sr.get("basis_steps", s.basis_steps);
      sr.get("target", s.target);
      if (const json* ch = sr.find("channel")) {
        const auto channel =
            ch->is_string() ? parse_stilc_channel(ch->get<std::string>()) : std::nullopt;
        if (!channel) {
          throw ConfigError("controller.stilc.channel", "expected upstream, downstream or both");
        }
        s.channel = *channel;
      }
      sr.finish();
      c.stilc = s;
    }
  }
  r.finish();
}

void read_simulation(const json& node, SimConfig& s) {
  Reader r(node, "simulation");
  r.get("dt", s.dt);
  r.get("iterations", s.iterations);
  r.get("terminal_angle", s.terminal_angle);
  r.get("trace", s.record_trace);
  r.get("trace_stride", s.trace_stride);
  if (const json* mode = r.find("terminal_sampling")) {
    const auto m = mode->is_string() ? parse_terminal_sampling(mode->get<std::string>())
                                     : std::nullopt;
    if (!m) throw ConfigError("simulation.terminal_sampling", "expected interpolated or grid");
    s.sampling = *m;
  }
  r.finish();
}

json arr(const auto& a) { return json(std::vector<double>(a.begin(), a.end())); }

}  // namespace

void validate_config(const ExperimentConfig& c) {
  try {
    c.system.validate();
  } catch (const InvalidParams& e) {
    throw ConfigError("system", e.what());
  }
  try {
    c.simulation.validate(c.system);
  } catch (const InvalidParams& e) {
    throw ConfigError("simulation", e.what());
  }
  if (c.controller.stilc) {
    if (c.controller.stilc->basis_steps == 0) {
      throw ConfigError("controller.stilc.basis_steps", "must be >= 1");
    }
    if (!std::isfinite(c.controller.stilc->learning_gain)) {
      throw ConfigError("controller.stilc.learning_gain", "must be finite");
    }
  }
  for (double r : c.controller.lqr.r_diag) {
    if (!(r > 0.0)) throw ConfigError("controller.lqr.r_diag", "entries must be > 0");
  }
  for (double q : c.controller.lqr.q_diag) {
    if (!(q >= 0.0)) throw ConfigError("controller.lqr.q_diag", "entries must be >= 0");
  }
  if (c.analysis.bins == 0) throw ConfigError("analysis.bins", "must be >= 1");
  if (!(c.convergence_threshold > 0.0) || !(c.convergence_threshold < 1.0)) {
    throw ConfigError("report.convergence_threshold", "must lie in (0, 1)");
  }
  if (c.output.dir.empty()) throw ConfigError("output.dir", "must not be empty");
}

ExperimentConfig parse_config(std::string_view text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("malformed JSON: ") + e.what());
  }
  ExperimentConfig c;
  Reader r(root, "");
  if (const json* n = r.find("system")) read_system(*n, c.system);
  if (const json* n = r.find("controller")) read_controller(*n, c.controller);
  if (const json* n = r.find("simulation")) read_simulation(*n, c.simulation);
  if (const json* n = r.find("analysis")) {
    Reader ar(*n, "analysis");
    ar.get("bins", c.analysis.bins);
    ar.get("gains", c.analysis.gains);
    ar.finish();
  }
  if (const json* n = r.find("report")) {
    Reader rr(*n, "report");
    rr.get("convergence_threshold", c.convergence_threshold);
    rr.finish();
  }
  if (const json* n = r.find("output")) {
    Reader orr(*n, "output");
    orr.get("dir", c.output.dir);
    orr.get("svg", c.output.svg);
    orr.finish();
  }
  r.finish();
  validate_config(c);
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string serialize_config(const ExperimentConfig& c) {
  const SystemParams& p = c.system;
  json system{{"cross_section_area", p.cross_section_area},
              {"youngs_modulus", p.youngs_modulus},
              {"radius", arr(p.radius)},
              {"inertia", arr(p.inertia)},
              {"friction", arr(p.friction)},
              {"gear_ratio", arr(p.gear_ratio)},
              {"span_length", arr(p.span_length)},
              {"speed_ref", arr(p.speed_ref)},
              {"tension_ref", arr(p.tension_ref)},
              {"period_ref", p.period_ref},
              {"eccentricity", p.eccentricity},
              {"upstream_phase0", p.upstream_phase0},
              {"boundary_tension_ref", p.boundary_tension_ref},
              {"boundary_upstream_speed_ref", p.boundary_upstream_speed_ref},
              {"boundary_downstream_speed_ref", p.boundary_downstream_speed_ref}};
  const ControllerSpec& s = c.controller;
  json controller{{"preset", s.preset},
                  {"feedback", std::string(to_string(s.feedback))},
                  {"pid", {{"kp", arr(s.pid.kp)}, {"ki", arr(s.pid.ki)}, {"kd", arr(s.pid.kd)}}},
                  {"lqr", {{"q_diag", arr(s.lqr.q_diag)}, {"r_diag", arr(s.lqr.r_diag)}}},
                  {"stilc", nullptr}};
  if (s.stilc) {
    controller["stilc"] = {{"learning_gain", s.stilc->learning_gain},
                           {"basis_steps", s.stilc->basis_steps},
                           {"target", s.stilc->target},
                           {"channel", std::string(to_string(s.stilc->channel))}};
  }
  const SimConfig& sim = c.simulation;
  json simulation{{"dt", sim.dt},
                  {"iterations", sim.iterations},
                  {"terminal_angle", sim.terminal_angle},
                  {"trace", sim.record_trace},
                  {"trace_stride", sim.trace_stride},
                  {"terminal_sampling", std::string(to_string(sim.sampling))}};
  json root{{"system", system},
            {"controller", controller},
            {"simulation", simulation},
            {"analysis", {{"bins", c.analysis.bins}, {"gains", c.analysis.gains}}},
            {"report", {{"convergence_threshold", c.convergence_threshold}}},
            {"output", {{"dir", c.output.dir}, {"svg", c.output.svg}}}};
  return root.dump(2) + "\n";
}

}  // namespace r2r
