#pragma once

#include <array>
#include <numbers>
#include <string>
#include <vector>

namespace r2r {

// Roller slots of the two-roller printing unit.
enum class Roller { kUpstream = 0, kDownstream = 1 };

inline constexpr std::size_t index(Roller r) { return static_cast<std::size_t>(r); }

/// Physical constants of the two-roller unit. Defaults are the published
/// simulation parameters of the reference machine.
///
/// Index convention: rollers are [i, i+1]; spans are [i, i+1, i+2], where
/// span k is fed by roller k-1 and drawn by roller k. Roller i-1 and i+2 sit
/// outside the unit and are held at their references.
struct SystemParams {
  double cross_section_area = 1.29e-5;     // m^2
  double youngs_modulus = 186.158e6;       // Pa
  std::array<double, 2> radius{0.381, 0.381};          // m
  std::array<double, 2> inertia{0.146, 0.146};         // kg m^2
  std::array<double, 2> friction{0.685, 0.685};
  std::array<double, 2> gear_ratio{1.0, 1.0};
  std::array<double, 3> span_length{2.4, 2.4, 2.4};    // m
  std::array<double, 2> speed_ref{0.16, 0.16};         // m/s
  std::array<double, 3> tension_ref{20.0, 20.0, 20.0}; // N
  double period_ref = 14.962;              // s, transport delay between prints
  double eccentricity = 1.0e-3;            // m

  // Phase of the upstream roller (and its eccentricity) at tau = 0, when the
  // downstream roller starts its first cycle.
  double upstream_phase0 = std::numbers::pi;

  // References of the boundary rollers/spans held fixed outside the unit.
  double boundary_tension_ref = 20.0;        // t_{i-1}^r
  double boundary_upstream_speed_ref = 0.16;   // v_{i-1}^r
  double boundary_downstream_speed_ref = 0.16; // v_{i+2}^r

  /// Web stiffness A*E in newtons.
  double stiffness() const { return cross_section_area * youngs_modulus; }

  /// Throws InvalidParams unless every physical constant is finite and
  /// strictly positive (eccentricity >= 0 and smaller than the radius).
  void validate() const;

  /// Human-readable violations of the modelling assumptions (span length
  /// equal to the upstream circumference within 1%, reference period equal
  /// to span/speed within 0.5%). Empty when consistent.
  std::vector<std::string> consistency_issues() const;

  bool operator==(const SystemParams&) const = default;
};

}  // namespace r2r
