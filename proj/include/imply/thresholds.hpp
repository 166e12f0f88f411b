#pragma once

#include <string>
#include <string_view>

#include "imply/device.hpp"

namespace imply {

enum class Logic { kZero, kOne, kUndefined };
enum class Role { kInput, kOutput };
enum class ThresholdLevel { kIL, kIH, kOL, kOH };

/// Normalized logic thresholds. Requires 0 <= s_ol <= s_il <= s_ih <= s_oh <= 1.
/// With `closed` set, a state exactly on a threshold counts as defined.
struct ThresholdScheme {
  std::string name = "custom";
  double s_il = 0.5;
  double s_ih = 0.5;
  double s_ol = 0.5;
  double s_oh = 0.5;
  bool closed = true;

  void validate() const;
  double value(ThresholdLevel level) const;
};

/// "1/2", "1/3" or "TTL" (case-insensitive). Throws ConfigError otherwise.
ThresholdScheme preset(std::string_view name);
ThresholdScheme custom_scheme(double s_il, double s_ih, double s_ol, double s_oh);

/// R_X = R_off + (R_on - R_off) * s_X. A logic '1' is the LOW resistance side.
double resistance_threshold(const ThresholdScheme& scheme, ThresholdLevel level,
                            const MemristorParams& params);

Logic classify(double s, const ThresholdScheme& scheme, Role role);

std::string_view to_string(Logic logic);
std::string_view to_string(ThresholdLevel level);

}  // namespace imply
