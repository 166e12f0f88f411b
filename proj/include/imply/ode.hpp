#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace imply {

/// Settings of the embedded Dormand-Prince 5(4) integrator. State components
/// are lengths in nm, so `abs_tol` is in nm as well.
struct IntegratorOptions {
  double rel_tol = 1e-6;
  double abs_tol = 1e-6;
  double max_step = 15e-9;  // seconds
  double initial_step = 1e-10;
  double min_step = 1e-20;
  std::size_t max_steps = 50'000'000;
};

using OdeRhs = std::function<void(double t, std::span<const double> y, std::span<double> dydt)>;
/// Projects a freshly accepted state back into its admissible set.
using OdeClamp = std::function<void(std::span<double> y)>;
/// Called after every accepted (and clamped) step, including t0.
using OdeObserver = std::function<void(double t, std::span<const double> y)>;

struct OdeStats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t rhs_evaluations = 0;
};

/// Integrates dy/dt = rhs(t, y) from t0 to t1 in place. Throws NumericError
/// when the step size collapses below `min_step` or `max_steps` is exceeded.
OdeStats integrate_ode(const OdeRhs& rhs, std::span<double> y, double t0, double t1,
                       const IntegratorOptions& options, const OdeClamp& clamp = {},
                       const OdeObserver& observer = {});

}  // namespace imply
