#include "imply/ode.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "imply/error.hpp"

namespace imply {
namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
// Difference between the 5th and embedded 4th order weights.
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

}  // namespace

OdeStats integrate_ode(const OdeRhs& rhs, std::span<double> y, double t0, double t1,
                       const IntegratorOptions& options, const OdeClamp& clamp,
                       const OdeObserver& observer) {
  OdeStats stats;
  const std::size_t n = y.size();
  if (!(t1 > t0)) {
    if (observer) observer(t0, y);
    return stats;
  }
  if (n == 0) return stats;

  std::vector<double> k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), tmp(n), y_new(n), before(n);
  auto eval = [&](double t, std::span<const double> state, std::vector<double>& out) {
    rhs(t, state, out);
    ++stats.rhs_evaluations;
  };

  double t = t0;
  double h = std::min({options.initial_step, options.max_step, t1 - t0});
  if (clamp) clamp(y);
  if (observer) observer(t, y);
  eval(t, y, k1);

  while (t < t1) {
    if (stats.accepted + stats.rejected >= options.max_steps) {
      std::ostringstream msg;
      msg << "integrator exceeded " << options.max_steps << " steps at t = " << t << " s";
      throw NumericError(msg.str());
    }
    bool last = false;
    if (t + h >= t1) {
      h = t1 - t;
      last = true;
    }

    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * a21 * k1[i];
    eval(t + c2 * h, tmp, k2);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
    eval(t + c3 * h, tmp, k3);
    for (std::size_t i = 0; i < n; ++i)
      tmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    eval(t + c4 * h, tmp, k4);
    for (std::size_t i = 0; i < n; ++i)
      tmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    eval(t + c5 * h, tmp, k5);
    for (std::size_t i = 0; i < n; ++i)
      tmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    eval(t + h, tmp, k6);
    for (std::size_t i = 0; i < n; ++i)
      y_new[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
    eval(t + h, y_new, k7);

    double err = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double e =
          h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
      const double scale =
          options.abs_tol + options.rel_tol * std::max(std::abs(y[i]), std::abs(y_new[i]));
      err += (e / scale) * (e / scale);
    }
    err = std::sqrt(err / static_cast<double>(n));

    if (!std::isfinite(err)) {
      std::ostringstream msg;
      msg << "integrator produced a non-finite state at t = " << t << " s";
      throw NumericError(msg.str());
    }

    if (err <= 1.0) {
      t = last ? t1 : t + h;
      std::copy(y_new.begin(), y_new.end(), before.begin());
      std::copy(y_new.begin(), y_new.end(), y.begin());
      ++stats.accepted;
      if (clamp) clamp(y);
      if (observer) observer(t, y);
      if (std::equal(y.begin(), y.end(), before.begin())) {
        std::swap(k1, k7);
      } else {
        eval(t, y, k1);
      }
      const double grow = err == 0.0 ? 5.0 : std::min(5.0, 0.9 * std::pow(err, -0.2));
      h = std::min(h * std::max(1.0, grow), options.max_step);
    } else {
      ++stats.rejected;
      h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
      if (h < options.min_step) {
        std::ostringstream msg;
        msg << "integrator step size underflow (h = " << h << " s) at t = " << t << " s";
        throw NumericError(msg.str());
      }
    }
  }
  return stats;
}

}  // namespace imply
