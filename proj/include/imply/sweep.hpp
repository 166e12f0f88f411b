#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "imply/gate.hpp"
#include "imply/params.hpp"
#include "imply/thresholds.hpp"

namespace imply {

enum class LevelCode { kMin, kNominal, kMax };
std::string_view to_string(LevelCode code);

/// One family of four parameters varied on a grid of deviation levels.
struct VariationSpec {
  Family family = Family::kVoltages;
  /// Signed fractions; value = nominal * (1 + level). Must be sorted and contain 0.
  std::vector<double> levels{-0.5, -0.4, -0.3, -0.2, -0.1, 0.0, 0.1, 0.2, 0.3, 0.4, 0.5};
  /// Optional explicit value lists replacing the relative levels of a parameter.
  std::map<ParamId, std::vector<double>> absolute;
  std::string scheme = "TTL";

  void validate() const;
};

/// Levels {-delta, 0, +delta}.
VariationSpec symmetric_spec(Family family, double delta, std::string scheme = "TTL");

struct ParamSetting {
  ParamId id = ParamId::kVonP;
  double value = 0.0;
  double level = 0.0;  // relative deviation from nominal
  LevelCode code = LevelCode::kNominal;
};

struct SweepTuple {
  std::size_t index = 0;
  std::array<ParamSetting, 4> settings{};
  MemristorParams p{};
  MemristorParams q{};
};

struct SweepOutcome {
  SweepTuple tuple;
  TruthTableResult result;
  bool correct = false;
  FailureStage stage = FailureStage::kNone;
  std::string error;
};

/// Cartesian product over the family's four parameters, first parameter slowest.
std::vector<SweepTuple> generate_grid(const VariationSpec& spec, const MemristorParams& nominal);

struct SweepOptions {
  unsigned jobs = 0;  // 0: hardware concurrency
  std::function<void(std::size_t done, std::size_t total)> progress;
};

SweepOutcome run_tuple(const SweepTuple& tuple, const GateConfig& config, const ThresholdScheme& scheme,
                       const MemristorParams& reference);

/// Runs every tuple; output is ordered by tuple index regardless of `jobs`.
std::vector<SweepOutcome> run_sweep(const VariationSpec& spec, const MemristorParams& nominal,
                                    const GateConfig& config, const SweepOptions& options = {});

struct LevelStat {
  ParamId parameter = ParamId::kVonP;
  double level = 0.0;
  LevelCode code = LevelCode::kNominal;
  std::size_t tuples = 0;
  std::size_t failed = 0;
  double share = 0.0;  // failed / all failed tuples
  double rate = 0.0;   // failed / tuples at this level
  bool always_fails = false;
};

struct FailureSummary {
  std::size_t total = 0;
  std::size_t failed = 0;
  std::vector<LevelStat> levels;  // grouped by parameter, ascending level

  std::vector<const LevelStat*> always_failing() const;
  const LevelStat* find(ParamId parameter, double level) const;
};

FailureSummary summarize_failures(const std::vector<SweepOutcome>& outcomes);

std::string outcomes_csv(const std::vector<SweepOutcome>& outcomes);
std::string summary_json(const std::vector<SweepOutcome>& outcomes, const FailureSummary& summary,
                         const VariationSpec& spec);

}  // namespace imply
