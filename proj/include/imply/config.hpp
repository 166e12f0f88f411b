#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "imply/crossbar.hpp"
#include "imply/gate.hpp"
#include "imply/sweep.hpp"
#include "imply/thresholds.hpp"

namespace imply {

enum class Dimension { kNone, kVoltage, kResistance, kTime, kSpeed, kLength };

/// "1 cm/s" -> 1e7 (nm/s), "40 kOhm" -> 4e4, "15 us" -> 1.5e-5. A bare number
/// is taken in base units (V, ohm, s, nm/s, nm). Throws ConfigError.
double parse_quantity(std::string_view text, Dimension dimension);
/// "10%" -> 0.1, "0.1" -> 0.1.
double parse_fraction(std::string_view text);
std::vector<double> parse_fraction_list(std::string_view text);

/// Everything a command needs, resolved from defaults, config files and
/// command-line overrides (in that order of increasing precedence).
struct RunConfig {
  MemristorParams nominal{};
  MemristorParams p{};  // nominal plus P.* overrides
  MemristorParams q{};
  GateConfig gate{};
  ThresholdScheme scheme = preset("TTL");
  VariationSpec sweep{};
  std::vector<double> deltas{0.1, 0.2, 0.3, 0.4, 0.5};
  CrossbarConfig crossbar{};
  std::vector<Placement> placements;  // empty: default placements for the size
  std::uint64_t seed = 1;
  unsigned jobs = 0;

  std::vector<Placement> resolved_placements() const;
};

/// Accumulates key/value assignments and resolves them into a RunConfig.
class ConfigBuilder {
 public:
  /// Lines "key = value [unit]"; '#' starts a comment. `origin` names the source in errors.
  void load_text(std::string_view text, const std::string& origin = "<text>");
  void load_file(const std::string& path);
  void set(const std::string& key, const std::string& value, const std::string& origin = "<cli>");

  /// Throws ConfigError on unknown keys, bad values or violated invariants.
  RunConfig build() const;

  const std::map<std::string, std::string>& assignments() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
  std::map<std::string, std::string> origins_;
};

/// Every resolved setting as a loadable key/value document in base units.
std::string snapshot(const RunConfig& config);

std::vector<std::string> known_keys();

}  // namespace imply
