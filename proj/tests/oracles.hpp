#pragma once

// Reference implementations used only by the tests. Kept deliberately naive
// and independent of the library internals.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

namespace oracle {

// dense nodal analysis with Gaussian elimination (partial pivoting)
struct Dense {
  std::size_t n = 0;
  std::vector<std::vector<double>> G;
  std::vector<double> I;
  std::vector<int> fixed;  // -1 free, else index into vals
  std::vector<double> vals;

  explicit Dense(std::size_t nodes) : n(nodes), G(nodes, std::vector<double>(nodes, 0.0)), I(nodes, 0.0), fixed(nodes, -1) {}

  void resistor(std::size_t a, std::size_t b, double r) {
    const double g = 1.0 / r;
    G[a][a] += g;
    G[b][b] += g;
    G[a][b] -= g;
    G[b][a] -= g;
  }
  void pin(std::size_t a, double v) {
    fixed[a] = static_cast<int>(vals.size());
    vals.push_back(v);
  }

  std::vector<double> solve() const {
    std::vector<std::size_t> freeidx;
    std::vector<long> map(n, -1);
    for (std::size_t i = 0; i < n; ++i)
      if (fixed[i] < 0) {
        map[i] = static_cast<long>(freeidx.size());
        freeidx.push_back(i);
      }
    const std::size_t m = freeidx.size();
    std::vector<std::vector<double>> A(m, std::vector<double>(m + 1, 0.0));
    for (std::size_t r = 0; r < m; ++r) {
      const std::size_t i = freeidx[r];
      A[r][m] = I[i];
      for (std::size_t j = 0; j < n; ++j) {
        if (G[i][j] == 0.0) continue;
        if (fixed[j] >= 0) A[r][m] -= G[i][j] * vals[fixed[j]];
        else A[r][static_cast<std::size_t>(map[j])] += G[i][j];
      }
    }
    for (std::size_t c = 0; c < m; ++c) {
      std::size_t piv = c;
      for (std::size_t r = c + 1; r < m; ++r)
        if (std::fabs(A[r][c]) > std::fabs(A[piv][c])) piv = r;
      if (A[piv][c] == 0.0) throw std::runtime_error("singular");
      std::swap(A[c], A[piv]);
      for (std::size_t r = 0; r < m; ++r) {
        if (r == c) continue;
        const double f = A[r][c] / A[c][c];
        if (f == 0.0) continue;
        for (std::size_t k = c; k <= m; ++k) A[r][k] -= f * A[c][k];
      }
    }
    std::vector<double> v(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      v[i] = fixed[i] >= 0 ? vals[fixed[i]] : A[map[i]][m] / A[map[i]][map[i]];
    return v;
  }
};

// V_Q of the ideal gate by a two-node solve: R -- P -- G -- Q -- T, G -- R_G -- 0
inline double gate_vq(double rp, double rq, double rg, double vcond, double vset) {
  Dense d(4);  // 0 gnd, 1 R, 2 T, 3 G
  d.pin(0, 0.0);
  d.pin(1, vcond);
  d.pin(2, vset);
  d.resistor(1, 3, rp);
  d.resistor(2, 3, rq);
  d.resistor(3, 0, rg);
  const auto v = d.solve();
  return vset - v[3];
}

inline double gate_vg(double rp, double rq, double rg, double vcond, double vset) {
  return vset - gate_vq(rp, rq, rg, vcond, vset);
}

struct Dev {
  double v_on = -0.7, v_off = 0.01, R_on = 10e3, R_off = 1e6;
  double k_on = 1e7, k_off = -0.5;
  double w_on = 3.0, w_off = 0.0, a_on = 3.0, a_off = 0.0, w_c = 0.1;
};

inline double cube(double x) { return x * x * x; }

inline double dwdt(const Dev& d, double w, double v) {
  if (v < d.v_on) return d.k_on * cube(v / d.v_on - 1.0) * std::exp(-std::exp((w - d.a_on) / d.w_c));
  if (v > d.v_off) return d.k_off * cube(v / d.v_off - 1.0) * std::exp(-std::exp(-(w - d.a_off) / d.w_c));
  return 0.0;
}

inline double resistance(const Dev& d, double w) {
  const double s = (w - d.w_off) / (d.w_on - d.w_off);
  return d.R_off + (d.R_on - d.R_off) * s;
}

// fixed step RK4 with clamp, constant voltage
inline double rk4_const(const Dev& d, double w, double v, double T, std::size_t steps) {
  const double h = T / static_cast<double>(steps);
  for (std::size_t i = 0; i < steps; ++i) {
    const double k1 = dwdt(d, w, v);
    const double k2 = dwdt(d, w + 0.5 * h * k1, v);
    const double k3 = dwdt(d, w + 0.5 * h * k2, v);
    const double k4 = dwdt(d, w + h * k3, v);
    w = std::clamp(w + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4), d.w_off, d.w_on);
  }
  return w;
}

// first time s crosses s_to under constant v, by fixed-step RK4
inline double rk4_switch_time(const Dev& d, double v, double s_from, double s_to, double h, double t_max) {
  double w = d.w_off + s_from * (d.w_on - d.w_off);
  const double target = d.w_off + s_to * (d.w_on - d.w_off);
  double t = 0.0;
  while (t < t_max) {
    const double prev = w;
    w = rk4_const(d, w, v, h, 1);
    if (w >= target) return t + h * (target - prev) / (w - prev);
    t += h;
  }
  return -1.0;
}

// the IMPLY operation of the ideal gate, fixed-step RK4 on (wP, wQ)
struct Pair {
  double wp, wq;
};

inline Pair rk4_imply(const Dev& p, const Dev& q, Pair w, double rg, double vcond, double vset, double T,
                      std::size_t steps, bool freeze_p = false) {
  auto f = [&](Pair x) {
    const double rp = resistance(p, x.wp), rq = resistance(q, x.wq);
    const double vg = gate_vg(rp, rq, rg, vcond, vset);
    // device polarity is the negative of the driver-side drop
    return Pair{freeze_p ? 0.0 : dwdt(p, x.wp, -(vcond - vg)), dwdt(q, x.wq, -(vset - vg))};
  };
  const double h = T / static_cast<double>(steps);
  for (std::size_t i = 0; i < steps; ++i) {
    const Pair k1 = f(w);
    const Pair k2 = f({w.wp + 0.5 * h * k1.wp, w.wq + 0.5 * h * k1.wq});
    const Pair k3 = f({w.wp + 0.5 * h * k2.wp, w.wq + 0.5 * h * k2.wq});
    const Pair k4 = f({w.wp + h * k3.wp, w.wq + h * k3.wq});
    w.wp = std::clamp(w.wp + h / 6 * (k1.wp + 2 * k2.wp + 2 * k3.wp + k4.wp), p.w_off, p.w_on);
    w.wq = std::clamp(w.wq + h / 6 * (k1.wq + 2 * k2.wq + 2 * k3.wq + k4.wq), q.w_off, q.w_on);
  }
  return w;
}

}  // namespace oracle
