#pragma once

#include <cstddef>
#include <string_view>
#include <optional>
#include <vector>

namespace r2r {

/// Which roller input receives the learned feedforward signal.
enum class StilcChannel { kUpstream, kDownstream, kBoth };

std::string_view to_string(StilcChannel channel);
std::optional<StilcChannel> parse_stilc_channel(std::string_view text);

/// Piecewise-constant cosine over one revolution sampled at bin centers:
/// value of bin b is cos(2*pi*(b + 0.5) / n_steps).
std::vector<double> cosine_basis(std::size_t n_steps);

/// Index of the basis bin containing phase `theta` (any real value).
std::size_t basis_bin(double theta, std::size_t n_steps);

/// Spatial-terminal learning component. The feedforward profile over one
/// revolution is `xi * basis(theta)`; the scalar `xi` is learned once per
/// cycle from the terminal error: xi <- xi + gain * E.
class StilcController {
 public:
  StilcController(double learning_gain, std::vector<double> basis, double target = 0.0,
                  StilcChannel channel = StilcChannel::kUpstream);

  /// Default cosine basis with `n_steps` bins.
  static StilcController cosine(double learning_gain, std::size_t n_steps = 20,
                                double target = 0.0,
                                StilcChannel channel = StilcChannel::kUpstream);

  double output(double theta) const;

  /// Terminal error for a measured terminal output (Y - Y_d).
  double terminal_error(double measured) const { return measured - target_; }

  /// Learning step with the terminal error of the cycle that just ended.
  /// Throws NonFiniteState on a non-finite error.
  void update(double terminal_error);

  double xi() const { return xi_; }
  double learning_gain() const { return learning_gain_; }
  double target() const { return target_; }
  StilcChannel channel() const { return channel_; }
  const std::vector<double>& basis() const { return basis_; }
  std::size_t n_steps() const { return basis_.size(); }

 private:
  double learning_gain_;
  double xi_ = 0.0;
  std::vector<double> basis_;
  double target_;
  StilcChannel channel_;
};

}  // namespace r2r
