#include "imply/gate.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "imply/error.hpp"

namespace imply {

void GateConfig::validate_circuit() const {
  if (!(R_G > 0.0)) throw ConfigError("gate config violates R_G > 0");
  if (!(timestep > 0.0)) throw ConfigError("gate config violates timestep > 0");
  if (!(switch_on_resistance > 0.0) || !(switch_off_resistance > switch_on_resistance))
    throw ConfigError("gate config violates 0 < switch_on < switch_off");
  if (!(prior_s_P >= 0.0 && prior_s_P <= 1.0 && prior_s_Q >= 0.0 && prior_s_Q <= 1.0))
    throw ConfigError("gate config prior states must lie in [0, 1]");
}

void GateConfig::validate(const MemristorParams& p, const MemristorParams& q) const {
  validate_circuit();
  for (const MemristorParams* d : {&p, &q}) {
    const char* name = d == &p ? "P" : "Q";
    std::ostringstream msg;
    if (!(std::abs(V_set) > std::abs(d->v_on))) {
      msg << "|V_set| > |v_on| violated for device " << name << " (" << V_set << " V vs " << d->v_on << " V)";
      throw ConfigError(msg.str());
    }
    if (!(std::abs(V_set - V_cond) < std::abs(d->v_on))) {
      msg << "|V_set - V_cond| < |v_on| violated for device " << name << " (" << V_set - V_cond
          << " V vs " << d->v_on << " V)";
      throw ConfigError(msg.str());
    }
    if (!(std::abs(V_reset) > std::abs(d->v_off))) {
      msg << "|V_reset| > |v_off| violated for device " << name << " (" << V_reset << " V vs "
          << d->v_off << " V)";
      throw ConfigError(msg.str());
    }
  }
}

GateVoltages solve_gate_voltages(double R_P, double R_Q, const GateConfig& c) {
  if (!(R_P > 0.0) || !(R_Q > 0.0)) throw DomainError("solve_gate_voltages: resistances must be positive");
  const double den = R_P * c.R_G + R_P * R_Q + R_Q * c.R_G;
  GateVoltages out;
  out.V_Q = (R_Q * (R_P + c.R_G) * c.V_set - R_Q * c.R_G * c.V_cond) / den;
  out.V_G = c.V_set - out.V_Q;
  out.V_P = c.V_cond - out.V_G;
  return out;
}

double steady_state_r_min(const MemristorParams& q, const GateConfig& c) {
  const double den = (c.R_G + q.R_off) * (c.V_set + q.v_on) - c.R_G * c.V_cond;
  if (den == 0.0) throw SingularityError("steady_state_r_min: zero denominator");
  return (-q.v_on * c.R_G * q.R_off) / den;
}

GateSolution solve_gate_drive(double R_P, double R_Q, const GateDrive& d, const GateConfig& c) {
  const double r_sw_p = d.p_connected ? c.switch_on_resistance : c.switch_off_resistance;
  const double r_sw_q = d.q_connected ? c.switch_on_resistance : c.switch_off_resistance;
  const double g_p = 1.0 / (r_sw_p + R_P);
  const double g_q = 1.0 / (r_sw_q + R_Q);
  const double g_ground =
      1.0 / c.R_G + 1.0 / (d.rg_shorted ? c.switch_on_resistance : c.switch_off_resistance);

  GateSolution s;
  s.V_G = (g_p * d.v_p + g_q * d.v_q) / (g_p + g_q + g_ground);
  s.I_P = g_p * (d.v_p - s.V_G);
  s.I_Q = g_q * (d.v_q - s.V_G);
  s.v_dev_P = -s.I_P * R_P;
  s.v_dev_Q = -s.I_Q * R_Q;
  const double i_ground = s.V_G * g_ground;
  const double scale = std::abs(s.I_P) + std::abs(s.I_Q) + std::abs(i_ground);
  s.kcl_residual = scale > 0.0 ? std::abs(s.I_P + s.I_Q - i_ground) / scale : 0.0;
  return s;
}

GateState run_phase(const GateState& gate, const GateDrive& drive, const GateConfig& config,
                    const PhaseOptions& options, const PhaseObserver& observer) {
  const MemristorParams& pp = gate.p_params;
  const MemristorParams& qp = gate.q_params;
  std::array<double, 2> y{clamp_length(pp, gate.p.w), clamp_length(qp, gate.q.w)};

  auto solve = [&](std::span<const double> x) {
    const double r_p = resistance_of_state(pp, MemristorState{clamp_length(pp, x[0])});
    const double r_q = resistance_of_state(qp, MemristorState{clamp_length(qp, x[1])});
    return solve_gate_drive(r_p, r_q, drive, config);
  };
  auto rhs = [&](double, std::span<const double> x, std::span<double> dx) {
    const GateSolution sol = solve(x);
    dx[0] = options.freeze_p ? 0.0
                             : state_derivative(pp, MemristorState{clamp_length(pp, x[0])}, sol.v_dev_P);
    dx[1] = options.freeze_q ? 0.0
                             : state_derivative(qp, MemristorState{clamp_length(qp, x[1])}, sol.v_dev_Q);
  };
  auto clamp = [&](std::span<double> x) {
    x[0] = clamp_length(pp, x[0]);
    x[1] = clamp_length(qp, x[1]);
  };
  OdeObserver ode_observer;
  if (observer) {
    ode_observer = [&](double t, std::span<const double> x) {
      observer(PhaseSample{t, solve(x), normalized_state(pp, MemristorState{x[0]}),
                           normalized_state(qp, MemristorState{x[1]})});
    };
  }
  integrate_ode(rhs, y, 0.0, config.timestep, config.integrator, clamp, ode_observer);

  GateState out = gate;
  out.p.w = y[0];
  out.q.w = y[1];
  return out;
}

GateState initialize(const GateState& gate, bool p, bool q, const GateConfig& config) {
  GateDrive write_p{p ? config.V_set : config.V_reset, true, 0.0, false, true};
  GateState out = run_phase(gate, write_p, config);
  GateDrive write_q{0.0, false, q ? config.V_set : config.V_reset, true, true};
  return run_phase(out, write_q, config);
}

GateState run_imply(const GateState& gate, const GateConfig& config, const PhaseOptions& options,
                    const PhaseObserver& observer) {
  GateDrive drive{config.V_cond, true, config.V_set, true, false};
  return run_phase(gate, drive, config, options, observer);
}

ReadoutResult readout(const GateState& gate, DeviceId which, const GateConfig& config) {
  const bool shorted = config.readout_sense == ReadoutSense::kShortedGround;
  GateDrive drive;
  drive.rg_shorted = shorted;
  if (which == DeviceId::kP) {
    drive.v_p = config.V_read;
    drive.p_connected = true;
  } else {
    drive.v_q = config.V_read;
    drive.q_connected = true;
  }
  ReadoutResult result;
  result.after = run_phase(gate, drive, config);
  const double r_p = resistance_of_state(result.after.p_params, result.after.p);
  const double r_q = resistance_of_state(result.after.q_params, result.after.q);
  const GateSolution sol = solve_gate_drive(r_p, r_q, drive, config);
  const double current = which == DeviceId::kP ? sol.I_P : sol.I_Q;
  result.resistance = config.V_read / current;
  if (!shorted) result.resistance -= config.R_G + config.switch_on_resistance;
  return result;
}

std::string_view to_string(FailureStage stage) {
  switch (stage) {
    case FailureStage::kNone: return "none";
    case FailureStage::kInitialization: return "initialization";
    case FailureStage::kOperation: return "operation";
  }
  return "none";
}

Logic classify_resistance(double resistance, const ThresholdScheme& scheme, Role role,
                          const MemristorParams& reference) {
  return classify(clamped_state_of_resistance(reference, resistance), scheme, role);
}

bool input_survived(Logic p_class, bool p, InputCheck check) {
  const Logic want = p ? Logic::kOne : Logic::kZero;
  const Logic opposite = p ? Logic::kZero : Logic::kOne;
  switch (check) {
    case InputCheck::kNotFlipped: return p_class != opposite;
    case InputCheck::kStrictValid: return p_class == want;
    case InputCheck::kNone: return true;
  }
  return true;
}

CaseOutcome run_case(int case_index, const MemristorParams& p_params, const MemristorParams& q_params,
                     const GateConfig& config, const ThresholdScheme& scheme,
                     const MemristorParams& reference) {
  const TruthRow row = kTruthTable.at(static_cast<std::size_t>(case_index));
  CaseOutcome out;
  out.case_id = case_index + 1;
  out.p = row.p;
  out.q = row.q;
  out.expected = row.expected;

  GateState gate{p_params, q_params, state_at(p_params, config.prior_s_P),
                 state_at(q_params, config.prior_s_Q)};
  try {
    gate = initialize(gate, row.p, row.q, config);
    out.init_s_P = normalized_state(p_params, gate.p);
    out.init_s_Q = normalized_state(q_params, gate.q);
    const Logic init_p = classify_resistance(resistance_of_state(p_params, gate.p), scheme,
                                             Role::kInput, reference);
    const Logic init_q = classify_resistance(resistance_of_state(q_params, gate.q), scheme,
                                             Role::kInput, reference);
    const bool init_ok = init_p == (row.p ? Logic::kOne : Logic::kZero) &&
                         init_q == (row.q ? Logic::kOne : Logic::kZero);

    gate = run_imply(gate, config);
    ReadoutResult read_p = readout(gate, DeviceId::kP, config);
    ReadoutResult read_q = readout(read_p.after, DeviceId::kQ, config);
    gate = read_q.after;

    out.final_s_P = normalized_state(p_params, gate.p);
    out.final_s_Q = normalized_state(q_params, gate.q);
    out.R_P = read_p.resistance;
    out.R_Q = read_q.resistance;
    out.p_class = classify_resistance(out.R_P, scheme, Role::kInput, reference);
    out.q_class = classify_resistance(out.R_Q, scheme, Role::kOutput, reference);
    out.q_ok = out.q_class == (row.expected ? Logic::kOne : Logic::kZero);
    out.p_ok = input_survived(out.p_class, row.p, config.input_check);
    out.passed = out.q_ok && out.p_ok;
    if (!out.passed) out.stage = init_ok ? FailureStage::kOperation : FailureStage::kInitialization;
  } catch (const NumericError& e) {
    out.passed = false;
    out.stage = FailureStage::kOperation;
    out.error = e.what();
  }
  return out;
}

TruthTableResult run_truth_table(const MemristorParams& p_params, const MemristorParams& q_params,
                                 const GateConfig& config, const ThresholdScheme& scheme,
                                 const MemristorParams& reference) {
  TruthTableResult result;
  result.passed = true;
  for (int i = 0; i < 4; ++i) {
    result.cases[static_cast<std::size_t>(i)] = run_case(i, p_params, q_params, config, scheme, reference);
    result.passed = result.passed && result.cases[static_cast<std::size_t>(i)].passed;
  }
  return result;
}

std::string truth_table_csv(const TruthTableResult& result) {
  std::ostringstream out;
  out.precision(9);
  out << "case,p,q,expected,R_P,R_Q,s_P,s_Q,p_class,q_class,verdict,stage\n";
  for (const CaseOutcome& c : result.cases) {
    out << c.case_id << ',' << c.p << ',' << c.q << ',' << c.expected << ',' << c.R_P << ',' << c.R_Q
        << ',' << c.final_s_P << ',' << c.final_s_Q << ',' << to_string(c.p_class) << ','
        << to_string(c.q_class) << ',' << (c.passed ? "correct" : "failed") << ','
        << to_string(c.stage) << '\n';
  }
  return out.str();
}

}  // namespace imply
