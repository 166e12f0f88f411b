#include "imply/thresholds.hpp"

#include <algorithm>
#include <cctype>

#include "imply/error.hpp"

namespace imply {

void ThresholdScheme::validate() const {
  if (!(0.0 <= s_ol && s_ol <= s_il && s_il <= s_ih && s_ih <= s_oh && s_oh <= 1.0))
    throw ConfigError("threshold scheme '" + name +
                      "' violates 0 <= s_OL <= s_IL <= s_IH <= s_OH <= 1");
}

double ThresholdScheme::value(ThresholdLevel level) const {
  switch (level) {
    case ThresholdLevel::kIL: return s_il;
    case ThresholdLevel::kIH: return s_ih;
    case ThresholdLevel::kOL: return s_ol;
    case ThresholdLevel::kOH: return s_oh;
  }
  return s_il;
}

ThresholdScheme preset(std::string_view name) {
  std::string key(name);
  std::transform(key.begin(), key.end(), key.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (key == "1/2") return ThresholdScheme{"1/2", 0.5, 0.5, 0.5, 0.5, true};
  // Printed three-decimal values, not exact thirds.
  if (key == "1/3") return ThresholdScheme{"1/3", 0.333, 0.667, 0.333, 0.667, true};
  if (key == "ttl") return ThresholdScheme{"TTL", 0.16, 0.40, 0.08, 0.48, true};
  throw ConfigError("unknown threshold scheme '" + std::string(name) + "' (expected 1/2, 1/3, TTL)");
}

ThresholdScheme custom_scheme(double s_il, double s_ih, double s_ol, double s_oh) {
  ThresholdScheme scheme{"custom", s_il, s_ih, s_ol, s_oh, true};
  scheme.validate();
  return scheme;
}

double resistance_threshold(const ThresholdScheme& scheme, ThresholdLevel level,
                            const MemristorParams& params) {
  return resistance_at(params, scheme.value(level));
}

Logic classify(double s, const ThresholdScheme& scheme, Role role) {
  const double low = role == Role::kInput ? scheme.s_il : scheme.s_ol;
  const double high = role == Role::kInput ? scheme.s_ih : scheme.s_oh;
  if (scheme.closed) {
    if (s >= high) return Logic::kOne;
    if (s <= low) return Logic::kZero;
  } else {
    if (s > high) return Logic::kOne;
    if (s < low) return Logic::kZero;
  }
  return Logic::kUndefined;
}

std::string_view to_string(Logic logic) {
  switch (logic) {
    case Logic::kZero: return "0";
    case Logic::kOne: return "1";
    case Logic::kUndefined: return "X";
  }
  return "X";
}

std::string_view to_string(ThresholdLevel level) {
  switch (level) {
    case ThresholdLevel::kIL: return "IL";
    case ThresholdLevel::kIH: return "IH";
    case ThresholdLevel::kOL: return "OL";
    case ThresholdLevel::kOH: return "OH";
  }
  return "IL";
}

}  // namespace imply
