#include "r2r/stilc.hpp"

#include <cmath>
#include <numbers>

#include "r2r/errors.hpp"

namespace r2r {

std::string_view to_string(StilcChannel channel) {
  switch (channel) {
    case StilcChannel::kUpstream: return "upstream";
    case StilcChannel::kDownstream: return "downstream";
    case StilcChannel::kBoth: return "both";
  }
  return "upstream";
}

std::optional<StilcChannel> parse_stilc_channel(std::string_view text) {
  if (text == "upstream") return StilcChannel::kUpstream;
  if (text == "downstream") return StilcChannel::kDownstream;
  if (text == "both") return StilcChannel::kBoth;
  return std::nullopt;
}

std::vector<double> cosine_basis(std::size_t n_steps) {
  if (n_steps == 0) throw InvalidParams("basis needs at least one step");
  std::vector<double> table(n_steps);
  for (std::size_t b = 0; b < n_steps; ++b) {
    table[b] = std::cos(2.0 * std::numbers::pi * (static_cast<double>(b) + 0.5) /
                        static_cast<double>(n_steps));
  }
  return table;
}

std::size_t basis_bin(double theta, std::size_t n_steps) {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  double reduced = std::fmod(theta, kTwoPi);
  if (reduced < 0.0) reduced += kTwoPi;
  auto bin = static_cast<std::size_t>(reduced / (kTwoPi / static_cast<double>(n_steps)));
  return bin >= n_steps ? n_steps - 1 : bin;
}

StilcController::StilcController(double learning_gain, std::vector<double> basis, double target,
                                 StilcChannel channel)
    : learning_gain_(learning_gain), basis_(std::move(basis)), target_(target), channel_(channel) {
  if (basis_.empty()) throw InvalidParams("basis table is empty");
  if (!std::isfinite(learning_gain_)) throw InvalidParams("learning gain must be finite");
}

StilcController StilcController::cosine(double learning_gain, std::size_t n_steps, double target,
                                        StilcChannel channel) {
  return StilcController(learning_gain, cosine_basis(n_steps), target, channel);
}

double StilcController::output(double theta) const {
  return xi_ * basis_[basis_bin(theta, basis_.size())];
}

void StilcController::update(double terminal_error) {
  if (!std::isfinite(terminal_error)) throw NonFiniteState("terminal error is not finite");
  xi_ += learning_gain_ * terminal_error;
}

}  // namespace r2r
