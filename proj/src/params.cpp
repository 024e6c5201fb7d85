#include "r2r/params.hpp"

#include <cmath>

#include <fmt/format.h>

#include "r2r/errors.hpp"

namespace r2r {

namespace {

void require_positive(double value, const char* name) {
  if (!std::isfinite(value) || value <= 0.0) {
    throw InvalidParams(fmt::format("{} must be finite and > 0 (got {})", name, value));
  }
}

}  // namespace

void SystemParams::validate() const {
  require_positive(cross_section_area, "cross_section_area");
  require_positive(youngs_modulus, "youngs_modulus");
  for (std::size_t j = 0; j < 2; ++j) {
    require_positive(radius[j], "radius");
    require_positive(inertia[j], "inertia");
    require_positive(friction[j], "friction");
    require_positive(gear_ratio[j], "gear_ratio");
    require_positive(speed_ref[j], "speed_ref");
  }
  for (std::size_t k = 0; k < 3; ++k) {
    require_positive(span_length[k], "span_length");
    require_positive(tension_ref[k], "tension_ref");
  }
  require_positive(period_ref, "period_ref");
  require_positive(boundary_tension_ref, "boundary_tension_ref");
  require_positive(boundary_upstream_speed_ref, "boundary_upstream_speed_ref");
  require_positive(boundary_downstream_speed_ref, "boundary_downstream_speed_ref");
  if (!std::isfinite(eccentricity) || eccentricity < 0.0) {
    throw InvalidParams(fmt::format("eccentricity must be finite and >= 0 (got {})", eccentricity));
  }
  if (eccentricity >= radius[0]) {
    throw InvalidParams("eccentricity must be smaller than the upstream radius");
  }
  if (!std::isfinite(upstream_phase0)) {
    throw InvalidParams("upstream_phase0 must be finite");
  }
}

std::vector<std::string> SystemParams::consistency_issues() const {
  std::vector<std::string> issues;
  const double circumference = 2.0 * std::numbers::pi * radius[0];
  const double span_mismatch = std::abs(span_length[0] - circumference) / span_length[0];
  if (!(span_mismatch < 0.01)) {
    issues.push_back(fmt::format(
        "span length {} m differs from upstream circumference {} m by {:.3}%",
        span_length[0], circumference, 100.0 * span_mismatch));
  }
  const double transport = span_length[0] / speed_ref[0];
  const double period_mismatch = std::abs(period_ref - transport) / transport;
  if (!(period_mismatch < 0.005)) {
    issues.push_back(fmt::format(
        "reference period {} s differs from span/speed {} s by {:.3}%",
        period_ref, transport, 100.0 * period_mismatch));
  }
  return issues;
}

}  // namespace r2r
