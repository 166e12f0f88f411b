#include "doctest.h"

#include <cmath>
#include <functional>

#include "imply/constraints.hpp"
#include "imply/error.hpp"
#include "oracles.hpp"

using namespace imply;
using doctest::Approx;

namespace {

double bisect(const std::function<double(double)>& f, double lo, double hi) {
  double flo = f(lo);
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((fm < 0) == (flo < 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

const double kROH = 1e6 + (10e3 - 1e6) * 0.48;
const double kROL = 1e6 + (10e3 - 1e6) * 0.08;

}  // namespace

TEST_SUITE("constraints") {

TEST_CASE("static records at TTL nominal") {
  MemristorParams n;
  GateConfig c;
  const auto rep = static_bounds(n, n, c, preset("TTL"));
  CHECK(rep.records.size() == 11);
  CHECK(rep.all_satisfied());

  const auto* c1 = rep.find("case1_von_q");
  REQUIRE(c1);
  CHECK(c1->bound == Approx(-c.V_set * kROH / (c.R_G + kROH)));
  CHECK(c1->bound == Approx(-0.9292).epsilon(1e-4));
  CHECK(c1->direction == Direction::kLower);

  // R_P at which V_Q reaches |v_on| with R_Q at the output threshold
  const auto* rp1 = rep.find("case1_roff_p");
  REQUIRE(rp1);
  const double want1 = bisect([&](double rp) { return oracle::gate_vq(rp, kROH, c.R_G, c.V_cond, c.V_set) - 0.7; }, 1e3, 1e7);
  CHECK(rp1->bound == Approx(want1).epsilon(1e-8));

  const auto* rp3 = rep.find("case3_ron_p");
  REQUIRE(rp3);
  const double want3 = bisect([&](double rp) { return oracle::gate_vq(rp, kROL, c.R_G, c.V_cond, c.V_set) - 0.7; }, 1e3, 1e7);
  CHECK(rp3->bound == Approx(want3).epsilon(1e-8));
  CHECK(rp3->bound > 0);
  CHECK(rp3->direction == Direction::kUpper);

  const auto* th = rep.find("threshold_ron_p");
  REQUIRE(th);
  CHECK(th->bound == Approx(604e3));
}

TEST_CASE("dynamic v_onQ") {
  MemristorParams n;
  GateConfig c;
  const double vqi = oracle::gate_vq(1e6, 1e6, c.R_G, c.V_cond, c.V_set);
  const double dwmin = 3.0 * 0.48;
  const double want = -vqi / (std::cbrt(dwmin / (1e7 * 15e-6)) + 1.0);
  const double b = dynamic_vonq_bound(n, n, c, preset("TTL"));
  CHECK(b == Approx(want).epsilon(1e-9));
  CHECK(b == Approx(-0.7665).epsilon(2e-4));

  MemristorParams q;
  CHECK(dynamic_vonq_record(n, q, c, preset("TTL")).satisfied);
  q.v_on = -0.77;
  CHECK_FALSE(dynamic_vonq_record(n, q, c, preset("TTL")).satisfied);

  MemristorParams fast;
  fast.k_on = 1e30;
  CHECK(dynamic_vonq_bound(n, fast, c, preset("TTL")) == Approx(-vqi).epsilon(1e-6));
}

TEST_CASE("estimators") {
  MemristorParams n;
  GateConfig c;
  const double rmin = steady_state_r_min(n, c);
  CHECK(estimator_resistance(n, c, Estimator::kRQ1) == Approx(rmin));
  CHECK(estimator_resistance(n, c, Estimator::kRQ2) == Approx((1e6 + 101.449e3) / 2).epsilon(1e-5));
  CHECK(estimator_resistance(n, c, Estimator::kRQ3) == Approx(std::sqrt(1e6 * 101.449e3)).epsilon(1e-5));
  CHECK(estimator_resistance(n, c, Estimator::kRQ2) == Approx(550.7e3).epsilon(1e-4));
  CHECK(estimator_resistance(n, c, Estimator::kRQ3) == Approx(318.5e3).epsilon(1e-4));
}

TEST_CASE("dynamic v_onP against the nodal oracle") {
  MemristorParams n;
  GateConfig c;
  for (auto e : {Estimator::kRQ1, Estimator::kRQ2, Estimator::kRQ3}) {
    const double rq = estimator_resistance(n, c, e);
    const double vpf = c.V_cond - oracle::gate_vg(1e6, rq, c.R_G, c.V_cond, c.V_set);
    const double dwmax = 3.0 * 0.16;
    const double want = -vpf / (std::cbrt(dwmax / (1e7 * 15e-6)) + 1.0);
    CHECK(dynamic_vonp_bound(n, n, c, preset("TTL"), e) == Approx(want).epsilon(1e-9));
  }
}

TEST_CASE("R_G bounds") {
  MemristorParams n;
  GateConfig c;
  const auto b = rg_bounds(n, c);
  CHECK(b.lower == Approx(5000).epsilon(1e-3));
  CHECK(b.upper == Approx(230769).epsilon(1e-3));
  CHECK(b.geometric_mean == Approx(std::sqrt(b.lower * b.upper)));
  CHECK(b.geometric_mean == Approx(34e3).epsilon(0.01));
  const double exact_lo = bisect([&](double rg) { return oracle::gate_vq(10e3, 1e6, rg, c.V_cond, c.V_set) - 0.7; }, 100, 1e5);
  CHECK(b.exact_lower == Approx(exact_lo).epsilon(1e-8));
  CHECK(b.exact_lower == Approx(4942).epsilon(1e-3));
  const double exact_hi = bisect([&](double rg) { return oracle::gate_vq(1e6, 1e6, rg, c.V_cond, c.V_set) - 0.7; }, 1e3, 1e7);
  CHECK(b.exact_upper == Approx(exact_hi).epsilon(1e-8));
}

TEST_CASE("flipping a parameter across its bound flips that record") {
  MemristorParams n;
  GateConfig c;
  const auto ttl = preset("TTL");
  const auto base = full_report(n, n, c, ttl);
  for (const auto& r : base.records) {
    if (r.unbounded || r.degenerate || !std::isfinite(r.bound)) continue;
    CAPTURE(r.id);
    MemristorParams p = n, q = n;
    const double eps = std::max(1e-6, std::fabs(r.bound) * 1e-6);
    const double across = r.direction == Direction::kLower ? r.bound - eps : r.bound + eps;
    set_param(p, q, r.parameter, across);
    const auto moved = full_report(p, q, c, ttl, n);
    const auto* m = moved.find(r.id);
    REQUIRE(m);
    CHECK(m->satisfied != r.satisfied);
  }
}

TEST_CASE("operating area") {
  MemristorParams n;
  GateConfig c;
  AreaAxis x{ParamId::kVonQ, -1.05, -0.25, 81};
  AreaAxis y{ParamId::kRoffP, 0.4e6, 1.7e6, 53};
  const auto a = operating_area(x, y, n, n, c, preset("TTL"));
  // nominal R_offP row
  std::size_t iy = 0;
  for (std::size_t i = 0; i < a.ys.size(); ++i)
    if (std::fabs(a.ys[i] - 1e6) < std::fabs(a.ys[iy] - 1e6)) iy = i;
  // the dynamic v_onQ bound is a lower bound
  for (std::size_t ix = 0; ix < a.xs.size(); ++ix) {
    if (a.xs[ix] < -0.7667) CHECK(a.mask[a.index(ix, iy)] == 0);
    if (a.xs[ix] > -0.7663 && a.xs[ix] < -0.3) CHECK(a.mask[a.index(ix, iy)] == 1);
  }
  // conjunction law
  for (std::size_t k = 0; k < a.mask.size(); ++k) {
    bool all = true;
    for (const auto& m : a.constraint_masks) all = all && m[k];
    CHECK(a.mask[k] == (all ? 1 : 0));
  }
  CHECK_FALSE(a.boundaries.empty());

  AreaAxis bad{ParamId::kVonQ, -0.7, -0.7, 10};
  CHECK_THROWS_AS(operating_area(bad, y, n, n, c, preset("TTL")), ConfigError);
}

TEST_CASE("operating area R_onP vs v_onQ follows the case 3 curve") {
  MemristorParams n;
  GateConfig c;
  AreaAxis x{ParamId::kVonQ, -0.95, -0.4, 31};
  AreaAxis y{ParamId::kRonP, 5e3, 300e3, 41};
  ConstraintSelection sel;
  sel.static_case1 = sel.static_case24 = sel.thresholds = sel.dynamic_von_q = false;
  sel.dynamic_von_p.clear();
  const auto a = operating_area(x, y, n, n, c, preset("TTL"), sel);
  for (std::size_t ix = 0; ix < a.xs.size(); ++ix)
    for (std::size_t iy = 0; iy < a.ys.size(); ++iy) {
      MemristorParams p = n, q = n;
      q.v_on = a.xs[ix];
      p.R_on = a.ys[iy];
      const bool below = oracle::gate_vq(p.R_on, kROL, c.R_G, c.V_cond, c.V_set) < -q.v_on;
      CHECK(a.mask[a.index(ix, iy)] == (below ? 1 : 0));
    }
}

TEST_CASE("report exports") {
  MemristorParams n;
  GateConfig c;
  const auto rep = full_report(n, n, c, preset("TTL"));
  const auto csv = report_csv(rep);
  CHECK(csv.find("dynamic_von_q") != std::string::npos);
  CHECK(csv.find("-0.766685") != std::string::npos);
  const auto rg = rg_bounds(n, c);
  const auto js = report_json(rep, &rg);
  CHECK(js.find("\"dynamic_von_q\"") != std::string::npos);
}

}
