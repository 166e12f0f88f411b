#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "imply/gate.hpp"
#include "imply/sweep.hpp"

namespace imply {

enum class UnselectedPolicy { kFloating, kGrounded };
std::string_view to_string(UnselectedPolicy policy);
UnselectedPolicy parse_unselected(std::string_view name);

/// Cell coordinates: bit line (column) and word line (row).
struct Cell {
  std::size_t bit = 0;
  std::size_t word = 0;
  bool operator==(const Cell&) const = default;
};

struct Placement {
  Cell p{};
  Cell q{};
  std::string label() const;  // "P(0,0)Q(15,15)"
};

/// The four standard placements for an n x n array: far corners, their swap,
/// corner to centre, and its swap.
std::vector<Placement> default_placements(std::size_t n);
/// Parses "0,0:15,15;15,15:0,0". Throws ConfigError.
std::vector<Placement> parse_placements(std::string_view text);

struct CrossbarConfig {
  std::size_t rows = 16;  // word lines
  std::size_t cols = 16;  // bit lines
  double line_resistance = 10.0;  // per cell segment
  double switch_on = 1e-6;
  double switch_off = 1e8;
  /// On-switches below this resistance are solved as ideal wires.
  double ideal_switch_below = 1e-3;
  Placement placement{{0, 0}, {15, 15}};
  double sigma = 0.15;  // half-Gaussian spread of the initial states
  UnselectedPolicy unselected = UnselectedPolicy::kFloating;
  GateConfig gate{};
  MemristorParams nominal{};

  void validate() const;
};

/// Structure of the resistive network (counts follow the cell schematic).
struct NetworkSummary {
  std::size_t cells = 0;
  std::size_t internal_nodes = 0;
  std::size_t junction_nodes = 0;
  std::size_t terminal_nodes = 0;
  std::size_t bit_line_resistors = 0;
  std::size_t word_line_resistors = 0;
  std::size_t nodes = 0;  // all nodes incl. terminals and the gate node
};

NetworkSummary build_network(const CrossbarConfig& config);

/// Driver and switch settings for one phase.
struct PhaseDrive {
  std::vector<std::pair<std::size_t, double>> bit_sources;  // (bit line, volts)
  std::vector<std::size_t> words;                           // word lines tied to G
  std::vector<Cell> on_cells;
  bool rg_shorted = false;
  double duration = 0.0;
};

PhaseDrive write_drive(const CrossbarConfig& config, Cell cell, double volts);
PhaseDrive imply_drive(const CrossbarConfig& config);
PhaseDrive read_drive(const CrossbarConfig& config, Cell cell);

/// Quasi-static network solution at the current states.
struct NodeSolution {
  std::vector<double> v_dev;           // device-polarity voltage per cell
  std::vector<double> source_current;  // per bit source, into the array
  double V_G = 0.0;
  double kcl_residual = 0.0;  // max |net current| at a node / total source current
};

struct PhaseReport {
  std::size_t promoted = 0;      // unselected cells that had to be integrated
  std::size_t restarts = 0;
  double max_passive_ds = 0.0;   // over cells outside the gate
};

class Crossbar {
 public:
  Crossbar(CrossbarConfig config, MemristorParams p_params, MemristorParams q_params);

  const CrossbarConfig& config() const { return config_; }
  std::size_t cell_index(Cell cell) const { return cell.bit * config_.rows + cell.word; }
  const MemristorParams& params(std::size_t cell) const;

  double s(Cell cell) const;
  void set_s(Cell cell, double s);
  std::vector<double> normalized_states() const;

  /// Half-Gaussian |N(0, sigma)| clamped to [0, 1] for every cell; gate cells
  /// are then set to the gate config's prior states.
  void init_states(std::uint64_t seed);

  NodeSolution solve(const PhaseDrive& drive) const;
  PhaseReport run_phase(const PhaseDrive& drive);

  /// Single-cell readout; returns the series-compensated resistance.
  double read(Cell cell, PhaseReport* report = nullptr);

 private:
  CrossbarConfig config_;
  MemristorParams p_params_;
  MemristorParams q_params_;
  std::vector<double> w_;
};

/// Half-Gaussian states for an n-cell array (deterministic in seed).
std::vector<double> half_gaussian_states(std::size_t n, double sigma, std::uint64_t seed);
/// Histogram CSV `bin_low,bin_high,count` over [0, 1].
std::string histogram_csv(const std::vector<double>& s, std::size_t bins = 100);

struct CrossbarCaseOutcome {
  CaseOutcome outcome;
  double max_passive_ds = 0.0;
  std::size_t promoted = 0;
};

CrossbarCaseOutcome run_crossbar_case(int case_index, const CrossbarConfig& config,
                                      const MemristorParams& p_params, const MemristorParams& q_params,
                                      const ThresholdScheme& scheme, std::uint64_t seed);

struct CrossbarTruthTable {
  TruthTableResult result;
  double max_passive_ds = 0.0;
  std::size_t promoted = 0;
};

CrossbarTruthTable run_crossbar_truth_table(const CrossbarConfig& config, const MemristorParams& p_params,
                                            const MemristorParams& q_params, const ThresholdScheme& scheme,
                                            std::uint64_t seed);

struct CrossbarSweepResult {
  std::vector<Placement> placements;
  std::vector<std::vector<SweepOutcome>> per_placement;
  std::vector<SweepOutcome> combined;  // correct only if correct at every placement
  double max_passive_ds = 0.0;
};

CrossbarSweepResult run_crossbar_sweep(const VariationSpec& spec, const CrossbarConfig& config,
                                       const std::vector<Placement>& placements, std::uint64_t seed,
                                       const SweepOptions& options = {});

}  // namespace imply
