#pragma once

#include <functional>

#include "imply/ode.hpp"

namespace imply {

/// VTEAM fitting parameters and resistance limits of one memristor.
///
/// Units: volts, ohms, nm and nm/s. Defaults are the nominal values of the
/// fitted Knowm device. Voltages are in device polarity: v < v_on < 0 sets
/// the device (w grows toward w_on), v > v_off > 0 resets it.
struct MemristorParams {
  double v_on = -0.7;
  double v_off = 0.01;
  double R_on = 10e3;
  double R_off = 1e6;
  double k_on = 1e7;   // 1 cm/s
  double k_off = -0.5;
  int alpha_on = 3;
  int alpha_off = 3;
  double w_on = 3.0;
  double w_off = 0.0;
  double a_on = 3.0;
  double a_off = 0.0;
  double w_c = 0.1;

  /// Throws ConfigError naming the first violated invariant.
  void validate() const;

  bool operator==(const MemristorParams&) const = default;
};

/// Internal state variable w in nm, bounded by [w_off, w_on].
struct MemristorState {
  double w = 0.0;

  bool operator==(const MemristorState&) const = default;
};

/// Window functions f_on / f_off multiplying dw/dt. Implementations must be
/// stateless so they can be shared across threads.
class Window {
 public:
  virtual ~Window() = default;
  virtual double on(const MemristorParams& params, double w) const = 0;
  virtual double off(const MemristorParams& params, double w) const = 0;
};

/// f_on(w) = exp(-exp((w - a_on)/w_c)), f_off(w) = exp(-exp(-(w - a_off)/w_c)).
class DoubleExponentialWindow final : public Window {
 public:
  double on(const MemristorParams& params, double w) const override;
  double off(const MemristorParams& params, double w) const override;
};

/// f = 1 everywhere; handy for isolating the threshold dynamics in tests.
class UnitWindow final : public Window {
 public:
  double on(const MemristorParams&, double) const override { return 1.0; }
  double off(const MemristorParams&, double) const override { return 1.0; }
};

const Window& default_window();

double normalized_state(const MemristorParams& params, const MemristorState& state);
double resistance_of_state(const MemristorParams& params, const MemristorState& state);
/// Resistance at normalized state s (no range check beyond the affine map).
double resistance_at(const MemristorParams& params, double s);
/// Inverse of resistance_of_state. Throws DomainError outside [R_on, R_off].
double state_of_resistance(const MemristorParams& params, double resistance);
/// Same map without the range check, clamped to [0, 1].
double clamped_state_of_resistance(const MemristorParams& params, double resistance);
MemristorState state_at(const MemristorParams& params, double s);
/// w corresponding to resistance R (unclamped affine inverse).
double length_of_resistance(const MemristorParams& params, double resistance);

double window_on(const MemristorParams& params, double w, const Window& window = default_window());
double window_off(const MemristorParams& params, double w, const Window& window = default_window());

/// dw/dt in nm/s for device voltage v.
double state_derivative(const MemristorParams& params, const MemristorState& state, double v,
                        const Window& window = default_window());

/// Clamps w into [w_off, w_on].
double clamp_length(const MemristorParams& params, double w);

using Waveform = std::function<double(double t)>;

/// Integrates the state under device voltage v_of_t for `duration` seconds.
MemristorState integrate_state(const MemristorParams& params, const MemristorState& state,
                               const Waveform& v_of_t, double duration,
                               const IntegratorOptions& options = {},
                               const Window& window = default_window());

struct SwitchingTime {
  bool switched = false;
  double time = 0.0;     // seconds from s_from to s_to (interpolated)
  double final_s = 0.0;  // state reached when not switched within t_max
};

/// Time to move between s_from and s_to under constant device voltage v.
/// Negative drive starts at s_from and heads for s_to; positive drive the other way.
SwitchingTime switching_time(const MemristorParams& params, double v, double s_from = 0.01, double s_to = 0.99,
                             double t_max = 1e-3, const IntegratorOptions& options = {},
                             const Window& window = default_window());

}  // namespace imply
