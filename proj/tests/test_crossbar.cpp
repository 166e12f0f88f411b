#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "imply/crossbar.hpp"
#include "imply/error.hpp"
#include "oracles.hpp"

using namespace imply;
using doctest::Approx;

namespace {

CrossbarConfig small(std::size_t n, double line) {
  CrossbarConfig c;
  c.rows = c.cols = n;
  c.line_resistance = line;
  c.placement = {{0, 0}, {n - 1, n - 1}};
  return c;
}

// the same network assembled node by node, nothing merged
std::vector<double> dense_vdev(const Crossbar& xb, const PhaseDrive& d) {
  const auto& c = xb.config();
  const std::size_t R = c.rows, C = c.cols, N = R * C;
  auto bl = [&](std::size_t b, std::size_t w) { return b * R + w; };
  auto wl = [&](std::size_t b, std::size_t w) { return N + b * R + w; };
  auto in = [&](std::size_t b, std::size_t w) { return 2 * N + b * R + w; };
  auto tb = [&](std::size_t b) { return 3 * N + b; };
  auto tw = [&](std::size_t w) { return 3 * N + C + w; };
  const std::size_t g = 3 * N + C + R, gnd = g + 1, src0 = g + 2;
  oracle::Dense net(src0 + d.bit_sources.size());
  net.pin(gnd, 0.0);
  for (std::size_t k = 0; k < d.bit_sources.size(); ++k) net.pin(src0 + k, d.bit_sources[k].second);
  const bool grounded = c.unselected == UnselectedPolicy::kGrounded;
  auto sw = [&](std::size_t a, std::size_t b, bool on) { net.resistor(a, b, on ? c.switch_on : c.switch_off); };
  for (std::size_t b = 0; b < C; ++b) {
    net.resistor(tb(b), bl(b, 0), c.line_resistance);
    for (std::size_t w = 0; w + 1 < R; ++w) net.resistor(bl(b, w), bl(b, w + 1), c.line_resistance);
    long k = -1;
    for (std::size_t s = 0; s < d.bit_sources.size(); ++s)
      if (d.bit_sources[s].first == b) k = static_cast<long>(s);
    const std::size_t drv = k >= 0 ? src0 + static_cast<std::size_t>(k) : gnd;
    sw(drv, tb(b), k >= 0 || grounded);
    sw(drv, bl(b, R - 1), k >= 0 || grounded);
  }
  for (std::size_t w = 0; w < R; ++w) {
    net.resistor(tw(w), wl(0, w), c.line_resistance);
    for (std::size_t b = 0; b + 1 < C; ++b) net.resistor(wl(b, w), wl(b + 1, w), c.line_resistance);
    const bool sel = std::find(d.words.begin(), d.words.end(), w) != d.words.end();
    sw(tw(w), g, sel);
    sw(tw(w), gnd, !sel && grounded);
  }
  for (std::size_t b = 0; b < C; ++b)
    for (std::size_t w = 0; w < R; ++w) {
      const bool on = std::find(d.on_cells.begin(), d.on_cells.end(), Cell{b, w}) != d.on_cells.end();
      sw(in(b, w), wl(b, w), on);
      const std::size_t i = b * R + w;
      net.resistor(bl(b, w), in(b, w), resistance_at(xb.params(i), xb.normalized_states()[i]));
    }
  net.resistor(g, gnd, c.gate.R_G);
  sw(g, gnd, d.rg_shorted);
  const auto v = net.solve();
  std::vector<double> out(N);
  for (std::size_t b = 0; b < C; ++b)
    for (std::size_t w = 0; w < R; ++w) out[b * R + w] = -(v[bl(b, w)] - v[in(b, w)]);
  return out;
}

}  // namespace

TEST_SUITE("crossbar") {

TEST_CASE("network counts") {
  auto s = build_network(small(2, 10));
  CHECK(s.cells == 4);
  CHECK(s.internal_nodes == 4);
  CHECK(s.junction_nodes == 8);
  CHECK(s.bit_line_resistors == 4);
  CHECK(s.word_line_resistors == 4);
  CHECK(build_network(small(128, 10)).cells == 16384);
}

TEST_CASE("config validation") {
  auto c = small(4, 10);
  c.placement = {{1, 1}, {1, 1}};
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c.placement = {{0, 0}, {4, 0}};
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c.placement = {{0, 0}, {3, 3}};
  c.line_resistance = -1;
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("placements") {
  const auto d = default_placements(16);
  REQUIRE(d.size() == 4);
  CHECK(d[0].label() == "P(0,0)Q(15,15)");
  const auto p = parse_placements("0,0:15,15;15,15:0,0");
  REQUIRE(p.size() == 2);
  CHECK(p[1].p == Cell{15, 15});
  CHECK_THROWS_AS(parse_placements("0,0"), ConfigError);
  CHECK(parse_unselected("grounded") == UnselectedPolicy::kGrounded);
  CHECK_THROWS_AS(parse_unselected("open"), ConfigError);
}

TEST_CASE("initial states") {
  const auto s = half_gaussian_states(16384, 0.15, 7);
  for (double x : s) {
    CHECK(x >= 0.0);
    CHECK(x <= 1.0);
  }
  CHECK(half_gaussian_states(16384, 0.15, 7) == s);
  CHECK(half_gaussian_states(16384, 0.15, 8) != s);
  std::vector<std::size_t> h(10, 0);
  for (double x : s) h[std::min<std::size_t>(9, static_cast<std::size_t>(x * 10))]++;
  for (std::size_t i = 1; i < h.size(); ++i) CHECK(h[i] <= h[i - 1]);
  CHECK(h[0] > h[1]);
  const auto csv = histogram_csv(s);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 101);

  auto c = small(8, 10);
  c.gate.prior_s_P = 0.0;
  Crossbar a(c, {}, {}), b(c, {}, {});
  a.init_states(3);
  b.init_states(3);
  CHECK(a.normalized_states() == b.normalized_states());
  CHECK(a.s(c.placement.p) == 0.0);
}

TEST_CASE("idle network is at ground") {
  auto c = small(4, 10);
  Crossbar xb(c, {}, {});
  xb.init_states(1);
  PhaseDrive d;
  const auto sol = xb.solve(d);
  for (double v : sol.v_dev) CHECK(v == 0.0);
}

TEST_CASE("solve against the dense oracle") {
  for (auto pol : {UnselectedPolicy::kFloating, UnselectedPolicy::kGrounded}) {
    auto c = small(4, 10);
    c.switch_on = 1e-2;
    c.unselected = pol;
    Crossbar xb(c, {}, {});
    xb.init_states(5);
    for (const auto& d : {imply_drive(c), write_drive(c, {1, 2}, 1.0), read_drive(c, {3, 3})}) {
      const auto sol = xb.solve(d);
      const auto want = dense_vdev(xb, d);
      for (std::size_t i = 0; i < want.size(); ++i) CHECK(sol.v_dev[i] == Approx(want[i]).epsilon(1e-7).scale(1e-9));
      CHECK(sol.kcl_residual < 1e-6);  // 10 mOhm switches cost digits
    }
  }
}

TEST_CASE("ideal wires match the gate solve") {
  auto c = small(16, 0.0);
  c.switch_on = 1e-9;
  c.switch_off = 1e18;  // open
  Crossbar xb(c, {}, {});
  xb.init_states(1);
  const auto sol = xb.solve(imply_drive(c));
  const auto g = solve_gate_voltages(1e6, 1e6, c.gate);
  // device polarity
  CHECK(-sol.v_dev[xb.cell_index(c.placement.q)] == Approx(g.V_Q).epsilon(1e-6));
  CHECK(-sol.v_dev[xb.cell_index(c.placement.p)] == Approx(g.V_P).epsilon(1e-6));
}

TEST_CASE("line resistance lowers the device voltages") {
  auto ideal = small(16, 0.0);
  auto lossy = small(16, 10.0);
  Crossbar a(ideal, {}, {}), b(lossy, {}, {});
  a.init_states(1);
  b.init_states(1);
  const auto d = imply_drive(ideal);
  const auto va = a.solve(d), vb = b.solve(d);
  for (const Cell cell : {ideal.placement.p, ideal.placement.q}) {
    const double x = -va.v_dev[a.cell_index(cell)], y = -vb.v_dev[b.cell_index(cell)];
    CHECK(y > 0.0);
    CHECK(y < x);
  }
}

TEST_CASE("readout recovers the cell resistance") {
  auto c = small(16, 10.0);
  Crossbar xb(c, {}, {});
  xb.init_states(2);
  xb.set_s(c.placement.q, 0.0);
  CHECK(xb.read(c.placement.q) == Approx(1e6).epsilon(0.03));
  xb.set_s(c.placement.q, 1.0);
  CHECK(xb.read(c.placement.q) == Approx(10e3).epsilon(0.03));
}

TEST_CASE("nominal truth table at every default placement") {
  auto c = small(16, 10.0);
  for (const auto& pl : default_placements(16)) {
    CAPTURE(pl.label());
    c.placement = pl;
    const auto t = run_crossbar_truth_table(c, {}, {}, preset("TTL"), 1);
    CHECK(t.result.passed);
    CHECK(t.max_passive_ds < 1e-6);
  }
}

TEST_CASE("crossbar sweep layout") {
  auto c = small(8, 10.0);
  VariationSpec v;
  v.family = Family::kResistances;
  v.levels = {0.0};
  const auto pls = default_placements(8);
  const auto r = run_crossbar_sweep(v, c, pls, 1);
  CHECK(r.per_placement.size() == 4);
  REQUIRE(r.combined.size() == 1);
  CHECK(r.combined[0].correct);
}

TEST_CASE("seed determinism of a case") {
  auto c = small(8, 10.0);
  MemristorParams q;
  q.v_on = -0.75;
  const auto a = run_crossbar_case(0, c, {}, q, preset("TTL"), 9);
  const auto b = run_crossbar_case(0, c, {}, q, preset("TTL"), 9);
  CHECK(a.outcome.final_s_Q == b.outcome.final_s_Q);
  CHECK(a.outcome.R_Q == b.outcome.R_Q);
}

}
