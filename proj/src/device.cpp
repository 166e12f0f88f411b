#include "imply/device.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "imply/error.hpp"

namespace imply {
namespace {

double int_power(double base, int exponent) {
  double result = 1.0;
  for (int i = 0; i < exponent; ++i) result *= base;
  return result;
}

}  // namespace

void MemristorParams::validate() const {
  auto fail = [](const char* relation) {
    throw ConfigError(std::string("memristor parameters violate ") + relation);
  };
  if (!(v_on < 0.0)) fail("v_on < 0");
  if (!(v_off > 0.0)) fail("v_off > 0");
  if (!(R_on > 0.0)) fail("R_on > 0");
  if (!(R_on < R_off)) fail("R_on < R_off");
  if (!(w_on > w_off)) fail("w_on > w_off");
  if (!(k_on > 0.0)) fail("k_on > 0");
  if (!(k_off < 0.0)) fail("k_off < 0");
  if (!(w_c > 0.0)) fail("w_c > 0");
  if (alpha_on < 1 || alpha_off < 1) fail("alpha_on, alpha_off >= 1");
}

double DoubleExponentialWindow::on(const MemristorParams& p, double w) const {
  return std::exp(-std::exp((w - p.a_on) / p.w_c));
}

double DoubleExponentialWindow::off(const MemristorParams& p, double w) const {
  return std::exp(-std::exp(-(w - p.a_off) / p.w_c));
}

const Window& default_window() {
  static const DoubleExponentialWindow window;
  return window;
}

double normalized_state(const MemristorParams& p, const MemristorState& state) {
  return (state.w - p.w_off) / (p.w_on - p.w_off);
}

double resistance_at(const MemristorParams& p, double s) {
  return p.R_off + (p.R_on - p.R_off) * s;
}

double resistance_of_state(const MemristorParams& p, const MemristorState& state) {
  return resistance_at(p, normalized_state(p, state));
}

double state_of_resistance(const MemristorParams& p, double resistance) {
  if (!(resistance >= p.R_on && resistance <= p.R_off)) {
    std::ostringstream msg;
    msg << "resistance " << resistance << " ohm outside [" << p.R_on << ", " << p.R_off << "]";
    throw DomainError(msg.str());
  }
  return (resistance - p.R_off) / (p.R_on - p.R_off);
}

double clamped_state_of_resistance(const MemristorParams& p, double resistance) {
  return std::clamp((resistance - p.R_off) / (p.R_on - p.R_off), 0.0, 1.0);
}

MemristorState state_at(const MemristorParams& p, double s) {
  return MemristorState{p.w_off + s * (p.w_on - p.w_off)};
}

double length_of_resistance(const MemristorParams& p, double resistance) {
  return p.w_off + (resistance - p.R_off) / (p.R_on - p.R_off) * (p.w_on - p.w_off);
}

double window_on(const MemristorParams& p, double w, const Window& window) {
  return window.on(p, w);
}

double window_off(const MemristorParams& p, double w, const Window& window) {
  return window.off(p, w);
}

double state_derivative(const MemristorParams& p, const MemristorState& state, double v,
                        const Window& window) {
  if (v > p.v_off) return p.k_off * int_power(v / p.v_off - 1.0, p.alpha_off) * window.off(p, state.w);
  if (v < p.v_on) return p.k_on * int_power(v / p.v_on - 1.0, p.alpha_on) * window.on(p, state.w);
  return 0.0;
}

double clamp_length(const MemristorParams& p, double w) { return std::clamp(w, p.w_off, p.w_on); }

MemristorState integrate_state(const MemristorParams& params, const MemristorState& state,
                               const Waveform& v_of_t, double duration,
                               const IntegratorOptions& options, const Window& window) {
  if (!(duration > 0.0)) throw DomainError("integrate_state: duration must be positive");
  std::array<double, 1> y{clamp_length(params, state.w)};
  auto rhs = [&](double t, std::span<const double> x, std::span<double> dx) {
    dx[0] = state_derivative(params, MemristorState{clamp_length(params, x[0])}, v_of_t(t), window);
  };
  auto clamp = [&](std::span<double> x) { x[0] = clamp_length(params, x[0]); };
  try {
    integrate_ode(rhs, y, 0.0, duration, options, clamp);
  } catch (const NumericError& e) {
    std::ostringstream msg;
    msg << "integrate_state from w = " << state.w << " nm over " << duration << " s: " << e.what();
    throw NumericError(msg.str());
  }
  return MemristorState{y[0]};
}

namespace {
struct Crossed {};
}  // namespace

SwitchingTime switching_time(const MemristorParams& params, double v, double s_from, double s_to, double t_max,
                             const IntegratorOptions& options, const Window& window) {
  SwitchingTime out;
  const bool set = v < params.v_on;
  const bool reset = v > params.v_off;
  const bool towards_on = v <= 0.0;
  const double start = towards_on ? s_from : s_to;
  const double target = towards_on ? s_to : s_from;
  out.final_s = start;
  if (!set && !reset) return out;

  std::array<double, 1> y{state_at(params, start).w};
  auto rhs = [&](double, std::span<const double> x, std::span<double> dx) {
    dx[0] = state_derivative(params, MemristorState{clamp_length(params, x[0])}, v, window);
  };
  auto clamp = [&](std::span<double> x) { x[0] = clamp_length(params, x[0]); };
  double t_prev = 0.0, s_prev = start;
  auto observer = [&](double t, std::span<const double> x) {
    const double s = normalized_state(params, MemristorState{x[0]});
    const bool hit = set ? s >= target : s <= target;
    if (hit) {
      out.switched = true;
      out.time = s == s_prev ? t : t_prev + (target - s_prev) * (t - t_prev) / (s - s_prev);
      out.final_s = s;
      throw Crossed{};
    }
    t_prev = t;
    s_prev = s;
  };
  try {
    integrate_ode(rhs, y, 0.0, t_max, options, clamp, observer);
  } catch (const Crossed&) {
    return out;
  }
  out.final_s = normalized_state(params, MemristorState{y[0]});
  return out;
}

}  // namespace imply
