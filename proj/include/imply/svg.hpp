#pragma once

#include <string>
#include <vector>

#include "imply/constraints.hpp"
#include "imply/sweep.hpp"

namespace imply {

/// Four squares per tuple (P pair left, Q pair right). Fill: empty = min,
/// half = nominal, full = max. Outline green = correct, red = failed.
/// Outcomes whose nonzero levels differ from +-delta in magnitude are skipped.
std::string render_four_square(const std::vector<SweepOutcome>& outcomes, double delta,
                               const std::string& title = {});

/// Simulation verdicts along one parameter axis.
struct ResultBar {
  ParamId parameter = ParamId::kVonQ;
  std::vector<std::pair<double, bool>> points;  // (value, correct), any order
};

/// Bar from single-parameter variations (other parameters nominal); falls
/// back to all outcomes carrying the value when no such tuple exists.
ResultBar bar_from_outcomes(const std::vector<SweepOutcome>& outcomes, ParamId parameter);

enum class BarColour { kGreen, kRed, kOrange };

struct BarSegment {
  double from = 0.0;
  double to = 0.0;
  BarColour colour = BarColour::kGreen;
};

/// Green/red at simulated points and between equal neighbours, orange between
/// neighbours that disagree.
std::vector<BarSegment> bar_segments(const ResultBar& bar);

struct AreaPlotOptions {
  MemristorParams nominal{};
  ThresholdScheme scheme{};
  std::string title;
};

/// Throws ConfigError when a bar's parameter is neither axis of the area.
std::string render_operating_area(const OperatingArea& area, const std::vector<ResultBar>& bars = {},
                                  const AreaPlotOptions& options = {});

}  // namespace imply
