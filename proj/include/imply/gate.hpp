#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>

#include "imply/device.hpp"
#include "imply/ode.hpp"
#include "imply/thresholds.hpp"

namespace imply {

enum class DeviceId { kP, kQ };

/// How readout converts the driver current into a resistance.
enum class ReadoutSense {
  kShortedGround,      // R_G bypassed by its parallel switch; R = V_read / I
  kSeriesCompensated,  // R_G in place; R = V_read / I - (R_G + switch_on)
};

/// What "P survived the operation" means for a truth-table verdict.
enum class InputCheck {
  kNotFlipped,   // P must not read back as the opposite logic value
  kStrictValid,  // P must still classify (input role) as its initial value
  kNone,
};

/// Circuit parameters of one IMPLY gate. Voltages are the driver voltages
/// applied at the device terminals (positive V_set sets a device).
struct GateConfig {
  double V_set = 1.0;
  double V_cond = 0.9;
  double V_reset = -1.0;
  double V_read = 0.1;
  double R_G = 40e3;
  double timestep = 15e-6;
  double switch_on_resistance = 1e-9;
  double switch_off_resistance = 1e9;
  IntegratorOptions integrator{};
  /// Normalized states both devices start from before initialization.
  double prior_s_P = 0.0;
  double prior_s_Q = 0.0;
  ReadoutSense readout_sense = ReadoutSense::kSeriesCompensated;
  InputCheck input_check = InputCheck::kNotFlipped;

  /// Checks |V_set| > |v_on|, |V_set - V_cond| < |v_on|, |V_reset| > |v_off|
  /// for every given device plus R_G > 0, timestep > 0.
  void validate(const MemristorParams& p, const MemristorParams& q) const;
  void validate_circuit() const;
};

struct GateState {
  MemristorParams p_params{};
  MemristorParams q_params{};
  MemristorState p{};
  MemristorState q{};

  const MemristorParams& params(DeviceId id) const { return id == DeviceId::kP ? p_params : q_params; }
  const MemristorState& state(DeviceId id) const { return id == DeviceId::kP ? p : q; }
  MemristorState& state(DeviceId id) { return id == DeviceId::kP ? p : q; }
};

/// Node voltages of the ideal gate during IMPLY (V_cond on P, V_set on Q).
/// V_P and V_Q are the voltages across the devices in driver polarity.
struct GateVoltages {
  double V_P = 0.0;
  double V_Q = 0.0;
  double V_G = 0.0;
};

GateVoltages solve_gate_voltages(double R_P, double R_Q, const GateConfig& config);

/// Steady-state floor of R_Q after Case 1 when V_Q drops below threshold.
double steady_state_r_min(const MemristorParams& q, const GateConfig& config);

/// Driver settings for one phase of the gate.
struct GateDrive {
  double v_p = 0.0;       // source behind P's driver switch (node R)
  bool p_connected = false;
  double v_q = 0.0;       // source behind Q's driver switch (node T)
  bool q_connected = false;
  bool rg_shorted = false;
};

/// Quasi-static solution of the switched circuit for given device resistances.
struct GateSolution {
  double V_G = 0.0;
  double I_P = 0.0;      // current from P's driver into the common node
  double I_Q = 0.0;
  double v_dev_P = 0.0;  // device-polarity voltage across P
  double v_dev_Q = 0.0;
  double kcl_residual = 0.0;  // |sum of currents into G| / current scale
};

GateSolution solve_gate_drive(double R_P, double R_Q, const GateDrive& drive, const GateConfig& config);

struct PhaseSample {
  double t;
  GateSolution solution;
  double s_P;
  double s_Q;
};
using PhaseObserver = std::function<void(const PhaseSample&)>;

struct PhaseOptions {
  bool freeze_p = false;
  bool freeze_q = false;
};

/// Co-integrates both device states for one timestep under `drive`.
GateState run_phase(const GateState& gate, const GateDrive& drive, const GateConfig& config,
                    const PhaseOptions& options = {}, const PhaseObserver& observer = {});

/// Writes p then q (V_set for '1', V_reset for '0'), one timestep each, the
/// other device floating and R_G shorted.
GateState initialize(const GateState& gate, bool p, bool q, const GateConfig& config);

GateState run_imply(const GateState& gate, const GateConfig& config, const PhaseOptions& options = {},
                    const PhaseObserver& observer = {});

struct ReadoutResult {
  double resistance = 0.0;
  GateState after;
};

ReadoutResult readout(const GateState& gate, DeviceId which, const GateConfig& config);

enum class FailureStage { kNone, kInitialization, kOperation };
std::string_view to_string(FailureStage stage);

struct CaseOutcome {
  int case_id = 0;  // 1..4 in truth-table order
  bool p = false;
  bool q = false;
  bool expected = false;
  double init_s_P = 0.0;  // true states after initialization
  double init_s_Q = 0.0;
  double final_s_P = 0.0;  // true states after readout
  double final_s_Q = 0.0;
  double R_P = 0.0;  // measured resistances
  double R_Q = 0.0;
  Logic p_class = Logic::kUndefined;  // input role, against reference params
  Logic q_class = Logic::kUndefined;  // output role
  bool p_ok = false;
  bool q_ok = false;
  bool passed = false;
  FailureStage stage = FailureStage::kNone;
  std::string error;  // numeric failure message, empty otherwise
};

struct TruthTableResult {
  std::array<CaseOutcome, 4> cases{};
  bool passed = false;
};

/// Truth-table row i (0-based): (p, q, q') = (0,0,1), (0,1,1), (1,0,0), (1,1,1).
struct TruthRow {
  bool p, q, expected;
};
constexpr std::array<TruthRow, 4> kTruthTable{{{false, false, true},
                                               {false, true, true},
                                               {true, false, false},
                                               {true, true, true}}};

/// Classification of a measured resistance against thresholds mapped through
/// the reference (nominal) device.
Logic classify_resistance(double resistance, const ThresholdScheme& scheme, Role role,
                          const MemristorParams& reference);

bool input_survived(Logic p_class, bool p, InputCheck check);

/// Runs one truth-table row as an independent experiment.
CaseOutcome run_case(int case_index, const MemristorParams& p_params, const MemristorParams& q_params,
                     const GateConfig& config, const ThresholdScheme& scheme,
                     const MemristorParams& reference = {});

TruthTableResult run_truth_table(const MemristorParams& p_params, const MemristorParams& q_params,
                                 const GateConfig& config, const ThresholdScheme& scheme,
                                 const MemristorParams& reference = {});

/// CSV with header `case,p,q,expected,R_P,R_Q,s_P,s_Q,p_class,q_class,verdict,stage`.
std::string truth_table_csv(const TruthTableResult& result);

}  // namespace imply
