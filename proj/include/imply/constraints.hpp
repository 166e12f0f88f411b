#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "imply/device.hpp"
#include "imply/gate.hpp"
#include "imply/params.hpp"
#include "imply/thresholds.hpp"

namespace imply {

enum class Direction { kLower, kUpper };

/// Estimate of Q's final resistance used when bounding v_onP.
enum class Estimator {
  kRQ1,  // R_min,Q
  kRQ2,  // arithmetic mean of R_off,Q and R_min,Q
  kRQ3,  // geometric mean (recommended)
};

std::string_view to_string(Direction direction);
std::string_view to_string(Estimator estimator);

/// One inequality "parameter (direction) bound" evaluated at a parameter point.
struct ConstraintRecord {
  std::string id;
  std::string relation;  // human-readable inequality
  ParamId parameter = ParamId::kVonQ;
  Direction direction = Direction::kLower;
  bool strict = true;     // '>' / '<' versus '>=' / '<='
  double bound = 0.0;     // NaN when unbounded or degenerate
  double value = 0.0;     // the constrained parameter at this point
  bool satisfied = false;
  bool unbounded = false;   // b <= 0: no finite bound on the b > 0 branch
  bool degenerate = false;  // degenerate inputs (see `note`)
  double margin = 0.0;      // signed slack, > 0 iff satisfied (scale-free)
  std::string note;
  std::vector<std::pair<std::string, double>> inputs;
};

struct ConstraintReport {
  std::vector<ConstraintRecord> records;
  std::string scheme;

  const ConstraintRecord* find(std::string_view id) const;
  bool all_satisfied() const;
};

/// Static switching-condition bounds of Cases 1, 3 and 2/4 plus the four
/// logic-threshold inequalities. Resistance thresholds are images of the
/// scheme under `reference` (the nominal device).
ConstraintReport static_bounds(const MemristorParams& p, const MemristorParams& q, const GateConfig& config,
                               const ThresholdScheme& scheme, const MemristorParams& reference = {});

/// Timestep-aware lower bound on v_onQ.
ConstraintRecord dynamic_vonq_record(const MemristorParams& p, const MemristorParams& q,
                                     const GateConfig& config, const ThresholdScheme& scheme,
                                     const MemristorParams& reference = {});
double dynamic_vonq_bound(const MemristorParams& p, const MemristorParams& q, const GateConfig& config,
                          const ThresholdScheme& scheme, const MemristorParams& reference = {});

/// Upper bound on v_onP from the allowed drift of P during Case 1.
ConstraintRecord dynamic_vonp_record(const MemristorParams& p, const MemristorParams& q,
                                     const GateConfig& config, const ThresholdScheme& scheme,
                                     Estimator estimator, const MemristorParams& reference = {});
double dynamic_vonp_bound(const MemristorParams& p, const MemristorParams& q, const GateConfig& config,
                          const ThresholdScheme& scheme, Estimator estimator,
                          const MemristorParams& reference = {});

/// R_Q value the estimator substitutes into the final-voltage expression.
double estimator_resistance(const MemristorParams& q, const GateConfig& config, Estimator estimator);

/// Everything: static records, dynamic v_onQ, and dynamic v_onP for all estimators.
ConstraintReport full_report(const MemristorParams& p, const MemristorParams& q, const GateConfig& config,
                             const ThresholdScheme& scheme, const MemristorParams& reference = {});

struct RgBounds {
  double lower = 0.0;  // approximate (lesser device loading neglected)
  double upper = 0.0;
  double geometric_mean = 0.0;
  double exact_lower = 0.0;  // full Case 3 nodal condition, R_P = R_on, R_Q = R_off
  double exact_upper = 0.0;  // full Case 1 nodal condition, R_P = R_Q = R_off
};

RgBounds rg_bounds(const MemristorParams& nominal, const GateConfig& config);

struct ConstraintSelection {
  bool static_case1 = true;
  bool static_case3 = true;
  bool static_case24 = true;
  bool thresholds = true;
  bool dynamic_von_q = true;
  std::vector<Estimator> dynamic_von_p{Estimator::kRQ3};
};

/// Records enabled by `selection` at one parameter point.
std::vector<ConstraintRecord> evaluate_selection(const MemristorParams& p, const MemristorParams& q,
                                                 const GateConfig& config, const ThresholdScheme& scheme,
                                                 const ConstraintSelection& selection,
                                                 const MemristorParams& reference = {});

struct AreaAxis {
  ParamId parameter = ParamId::kVonQ;
  double min = 0.0;
  double max = 0.0;
  std::size_t samples = 81;
};

struct Polyline {
  std::string constraint_id;
  std::vector<std::pair<double, double>> points;  // (x, y) in parameter units
};

/// Grids are row-major: index = iy * xs.size() + ix.
struct OperatingArea {
  AreaAxis x;
  AreaAxis y;
  std::vector<double> xs;
  std::vector<double> ys;
  std::string scheme;
  std::vector<std::string> constraint_ids;
  std::vector<std::vector<std::uint8_t>> constraint_masks;
  std::vector<std::uint8_t> mask;      // conjunction of all constraint masks
  std::vector<std::uint8_t> physical;  // 0 where the point has no physical meaning
  std::vector<Polyline> boundaries;

  std::size_t index(std::size_t ix, std::size_t iy) const { return iy * xs.size() + ix; }
};

OperatingArea operating_area(const AreaAxis& x, const AreaAxis& y, const MemristorParams& p,
                             const MemristorParams& q, const GateConfig& config,
                             const ThresholdScheme& scheme, const ConstraintSelection& selection = {},
                             const MemristorParams& reference = {});

std::string report_csv(const ConstraintReport& report);
std::string report_json(const ConstraintReport& report, const RgBounds* rg = nullptr);
std::string area_json(const OperatingArea& area);

}  // namespace imply
