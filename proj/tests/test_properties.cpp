#include "doctest.h"

#include <cmath>
#include <random>

#include "imply/constraints.hpp"
#include "imply/crossbar.hpp"
#include "imply/device.hpp"
#include "imply/gate.hpp"
#include "imply/thresholds.hpp"
#include "oracles.hpp"

using namespace imply;
using doctest::Approx;

namespace {

constexpr int kDraws = 1000;

MemristorParams random_device(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.5, 1.5);
  MemristorParams p;
  p.v_on *= u(rng);
  p.v_off *= u(rng);
  p.R_on *= u(rng);
  p.R_off *= u(rng);
  p.k_on *= u(rng);
  p.k_off *= u(rng);
  return p;
}

}  // namespace

TEST_SUITE("properties") {

TEST_CASE("dead zone, sign and clamp") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < kDraws; ++i) {
    const MemristorParams p = random_device(rng);
    std::uniform_real_distribution<double> uw(p.w_off, p.w_on);
    const double w = uw(rng);
    std::uniform_real_distribution<double> dead(p.v_on, p.v_off);
    double v = dead(rng);
    if (v == p.v_on) v = 0.0;
    CHECK(state_derivative(p, {w}, v) == 0.0);
    std::uniform_real_distribution<double> below(-3.0, p.v_on);
    std::uniform_real_distribution<double> above(p.v_off, 3.0);
    CHECK(state_derivative(p, {w}, below(rng)) >= 0.0);
    CHECK(state_derivative(p, {w}, above(rng)) <= 0.0);
  }
  // clamping under hard drives
  for (int i = 0; i < kDraws / 10; ++i) {
    const MemristorParams p = random_device(rng);
    std::uniform_real_distribution<double> uv(-3.0, 3.0), uw(p.w_off, p.w_on), ut(1e-7, 3e-5);
    const double v = uv(rng);
    const auto s = integrate_state(p, {uw(rng)}, [v](double) { return v; }, ut(rng));
    CHECK(s.w >= p.w_off);
    CHECK(s.w <= p.w_on);
  }
}

TEST_CASE("resistance round trip") {
  MemristorParams p;
  for (int i = 0; i <= 100; ++i) {
    const double s = i / 100.0;
    CHECK(state_of_resistance(p, resistance_at(p, s)) == Approx(s).epsilon(1e-12).scale(1e-12));
  }
}

TEST_CASE("window monotonicity") {
  MemristorParams p;
  double prev_on = 2, prev_off = -1;
  for (int i = 0; i <= 300; ++i) {
    const double w = p.a_off + (p.a_on - p.a_off) * i / 300.0;
    const double on = window_on(p, w), off = window_off(p, w);
    CHECK(on <= prev_on);
    CHECK(off >= prev_off);
    prev_on = on;
    prev_off = off;
  }
}

TEST_CASE("gate closed form against the nodal oracle") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> lr(std::log(1e3), std::log(1e7));
  GateConfig c;
  for (int i = 0; i < kDraws; ++i) {
    const double rp = std::exp(lr(rng)), rq = std::exp(lr(rng));
    const auto v = solve_gate_voltages(rp, rq, c);
    CHECK(v.V_Q == Approx(oracle::gate_vq(rp, rq, c.R_G, c.V_cond, c.V_set)).epsilon(1e-10));
    GateDrive d{c.V_cond, true, c.V_set, true, false};
    CHECK(solve_gate_drive(rp, rq, d, c).kcl_residual < 1e-12);
  }
}

TEST_CASE("KCL at every accepted step of a phase") {
  std::mt19937_64 rng(13);
  GateConfig c;
  for (int i = 0; i < 20; ++i) {
    GateState g;
    g.p_params = random_device(rng);
    g.q_params = random_device(rng);
    double worst = 0;
    run_imply(g, c, {}, [&](const PhaseSample& s) { worst = std::max(worst, s.solution.kcl_residual); });
    CHECK(worst < 1e-12);
  }
}

TEST_CASE("case 1 floor with P frozen") {
  std::mt19937_64 rng(14);
  GateConfig c;
  MemristorParams n;
  const double rmin = steady_state_r_min(n, c);
  std::uniform_real_distribution<double> ur(rmin, n.R_off);
  PhaseOptions o;
  o.freeze_p = true;
  for (int i = 0; i < 50; ++i) {
    GateState g;
    g.q = {length_of_resistance(n, ur(rng))};
    const auto out = run_imply(g, c, o);
    CHECK(resistance_of_state(n, out.q) >= rmin * 0.995);
  }
}

TEST_CASE("classify monotonicity and band inclusion") {
  std::mt19937_64 rng(15);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < kDraws; ++i) {
    double a = u(rng), b = u(rng), c = u(rng), d = u(rng);
    double t[4] = {a, b, c, d};
    std::sort(t, t + 4);
    // s_ol <= s_il <= s_ih <= s_oh
    const auto sc = custom_scheme(t[1], t[2], t[0], t[3]);
    double s1 = u(rng), s2 = u(rng);
    if (s1 > s2) std::swap(s1, s2);
    for (Role r : {Role::kInput, Role::kOutput}) {
      if (classify(s1, sc, r) == Logic::kOne) CHECK(classify(s2, sc, r) == Logic::kOne);
      if (classify(s2, sc, r) == Logic::kZero) CHECK(classify(s1, sc, r) == Logic::kZero);
    }
    if (classify(s1, sc, Role::kOutput) == Logic::kOne) CHECK(classify(s1, sc, Role::kInput) == Logic::kOne);
    if (classify(s1, sc, Role::kOutput) == Logic::kZero) CHECK(classify(s1, sc, Role::kInput) == Logic::kZero);
    CHECK(classify(s1, preset("1/2"), Role::kInput) != Logic::kUndefined);
    CHECK(classify(s1, preset("1/2"), Role::kOutput) != Logic::kUndefined);
  }
}

TEST_CASE("estimator ordering") {
  std::mt19937_64 rng(16);
  GateConfig c;
  for (int i = 0; i < kDraws; ++i) {
    const MemristorParams q = random_device(rng);
    const double rmin = steady_state_r_min(q, c);
    if (!(rmin > 0 && rmin < q.R_off)) continue;
    const double r1 = estimator_resistance(q, c, Estimator::kRQ1);
    const double r2 = estimator_resistance(q, c, Estimator::kRQ2);
    const double r3 = estimator_resistance(q, c, Estimator::kRQ3);
    CHECK(r1 <= r3);
    CHECK(r3 <= r2);
    const auto ttl = preset("TTL");
    MemristorParams n;
    const double b1 = dynamic_vonp_bound(n, q, c, ttl, Estimator::kRQ1);
    const double b2 = dynamic_vonp_bound(n, q, c, ttl, Estimator::kRQ2);
    const double b3 = dynamic_vonp_bound(n, q, c, ttl, Estimator::kRQ3);
    // V_Pf grows with R_Q, the bound moves down
    CHECK(b1 >= b3);
    CHECK(b3 >= b2);
  }
}

TEST_CASE("dynamic v_onQ bound never tightens with k_onQ") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> lk(std::log(1e5), std::log(1e10));
  GateConfig c;
  MemristorParams n;
  for (int i = 0; i < kDraws; ++i) {
    MemristorParams a = n, b = n;
    a.k_on = std::exp(lk(rng));
    b.k_on = a.k_on * (1.0 + std::exp(lk(rng)) / 1e10);
    CHECK(dynamic_vonq_bound(n, b, c, preset("TTL")) <= dynamic_vonq_bound(n, a, c, preset("TTL")) + 1e-15);
  }
}

TEST_CASE("crossbar KCL residual across sizes") {
  for (std::size_t n : {16, 32, 128}) {
    CAPTURE(n);
    CrossbarConfig c;
    c.rows = c.cols = n;
    c.placement = {{0, 0}, {n - 1, n - 1}};
    Crossbar xb(c, {}, {});
    xb.init_states(1);
    for (const auto& d : {imply_drive(c), read_drive(c, c.placement.q)}) CHECK(xb.solve(d).kcl_residual < 1e-9);
  }
}

TEST_CASE("crossbar init seed determinism") {
  std::mt19937_64 rng(18);
  CrossbarConfig c;
  for (int i = 0; i < kDraws; ++i) {
    const std::uint64_t seed = rng();
    CHECK(half_gaussian_states(64, c.sigma, seed) == half_gaussian_states(64, c.sigma, seed));
  }
  Crossbar a(c, {}, {}), b(c, {}, {});
  a.init_states(99);
  b.init_states(99);
  CHECK(a.normalized_states() == b.normalized_states());
}

TEST_CASE("nominal passes under every scheme, twice") {
  MemristorParams n;
  for (const char* s : {"TTL", "1/2", "1/3"}) {
    const auto a = run_truth_table(n, n, GateConfig{}, preset(s));
    const auto b = run_truth_table(n, n, GateConfig{}, preset(s));
    CHECK(a.passed);
    for (int i = 0; i < 4; ++i) CHECK(a.cases[i].final_s_Q == b.cases[i].final_s_Q);
  }
}

}
