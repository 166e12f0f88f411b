#include "imply/crossbar.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <mutex>
#include <random>
#include <span>
#include <sstream>
#include <thread>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "imply/error.hpp"

namespace imply {

std::string_view to_string(UnselectedPolicy policy) {
  return policy == UnselectedPolicy::kFloating ? "floating" : "grounded";
}

UnselectedPolicy parse_unselected(std::string_view name) {
  if (name == "floating") return UnselectedPolicy::kFloating;
  if (name == "grounded") return UnselectedPolicy::kGrounded;
  throw ConfigError("unselected policy must be 'floating' or 'grounded', got '" + std::string(name) + "'");
}

std::string Placement::label() const {
  return "P(" + std::to_string(p.bit) + "," + std::to_string(p.word) + ")Q(" + std::to_string(q.bit) + "," +
         std::to_string(q.word) + ")";
}

std::vector<Placement> default_placements(std::size_t n) {
  if (n < 2) throw ConfigError("crossbar needs at least 2x2 cells for two gate devices");
  const Cell corner{0, 0}, far{n - 1, n - 1};
  const std::size_t m = n / 2 - 1;
  const Cell mid{m, m};
  std::vector<Placement> out{{corner, far}, {far, corner}};
  if (mid != corner) {
    out.push_back({corner, mid});
    out.push_back({mid, corner});
  }
  return out;
}

std::vector<Placement> parse_placements(std::string_view text) {
  std::vector<Placement> out;
  auto parse_cell = [&](std::string_view s) {
    const auto comma = s.find(',');
    if (comma == std::string_view::npos) throw ConfigError("placement cell needs 'bit,word': " + std::string(s));
    try {
      return Cell{std::stoul(std::string(s.substr(0, comma))), std::stoul(std::string(s.substr(comma + 1)))};
    } catch (const std::exception&) {
      throw ConfigError("bad placement cell '" + std::string(s) + "'");
    }
  };
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find(';', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view item = text.substr(start, end - start);
    if (!item.empty()) {
      const auto colon = item.find(':');
      if (colon == std::string_view::npos) throw ConfigError("placement needs 'P:Q': " + std::string(item));
      out.push_back({parse_cell(item.substr(0, colon)), parse_cell(item.substr(colon + 1))});
    }
    start = end + 1;
  }
  if (out.empty()) throw ConfigError("no placements given");
  return out;
}

void CrossbarConfig::validate() const {
  if (rows < 1 || cols < 1) throw ConfigError("crossbar size must be positive");
  if (!(line_resistance >= 0.0)) throw ConfigError("line_resistance must be >= 0");
  if (!(switch_on >= 0.0) || !(switch_off > switch_on)) throw ConfigError("need 0 <= switch_on < switch_off");
  if (!(sigma >= 0.0)) throw ConfigError("sigma must be >= 0");
  for (const Cell& c : {placement.p, placement.q})
    if (c.bit >= cols || c.word >= rows)
      throw ConfigError("placement " + placement.label() + " outside the array");
  if (placement.p == placement.q) throw ConfigError("P and Q placements must differ");
  if (placement.p.bit == placement.q.bit)
    throw ConfigError("P and Q must sit on different bit lines (each is driven separately)");
  gate.validate_circuit();
}

NetworkSummary build_network(const CrossbarConfig& c) {
  NetworkSummary s;
  s.cells = c.rows * c.cols;
  s.internal_nodes = s.cells;
  s.junction_nodes = 2 * s.cells;
  s.terminal_nodes = c.rows + c.cols;
  s.bit_line_resistors = s.cells;
  s.word_line_resistors = s.cells;
  s.nodes = s.internal_nodes + s.junction_nodes + s.terminal_nodes + 1;
  return s;
}

PhaseDrive write_drive(const CrossbarConfig& c, Cell cell, double volts) {
  PhaseDrive d;
  d.bit_sources = {{cell.bit, volts}};
  d.words = {cell.word};
  d.on_cells = {cell};
  d.rg_shorted = true;
  d.duration = c.gate.timestep;
  return d;
}

PhaseDrive imply_drive(const CrossbarConfig& c) {
  PhaseDrive d;
  const Placement& pl = c.placement;
  d.bit_sources = {{pl.p.bit, c.gate.V_cond}, {pl.q.bit, c.gate.V_set}};
  d.words = {pl.p.word};
  if (pl.q.word != pl.p.word) d.words.push_back(pl.q.word);
  d.on_cells = {pl.p, pl.q};
  d.rg_shorted = false;
  d.duration = c.gate.timestep;
  return d;
}

PhaseDrive read_drive(const CrossbarConfig& c, Cell cell) {
  PhaseDrive d = write_drive(c, cell, c.gate.V_read);
  d.rg_shorted = c.gate.readout_sense == ReadoutSense::kShortedGround;
  return d;
}

namespace {

// Raw node layout: bl | wl | internal | bit terminals | word terminals | G | GND | sources
struct Layout {
  std::size_t rows, cols, cells;
  std::size_t bl(std::size_t b, std::size_t w) const { return b * rows + w; }
  std::size_t wl(std::size_t b, std::size_t w) const { return cells + b * rows + w; }
  std::size_t in(std::size_t b, std::size_t w) const { return 2 * cells + b * rows + w; }
  std::size_t tb(std::size_t b) const { return 3 * cells + b; }
  std::size_t tw(std::size_t w) const { return 3 * cells + cols + w; }
  std::size_t g() const { return 3 * cells + cols + rows; }
  std::size_t gnd() const { return g() + 1; }
  std::size_t source(std::size_t k) const { return gnd() + 1 + k; }
};

struct Branch {
  std::size_t a, b;
  double r;
  long cell = -1;  // memristor branch of this cell
};

struct PromoteRequest {
  std::vector<std::size_t> cells;
};

// Reduced nodal system for one phase with a low-rank part for the active cells.
class PhaseSystem {
 public:
  PhaseSystem(const CrossbarConfig& cfg, const PhaseDrive& drive, const std::vector<double>& passive_r,
              const std::vector<std::size_t>& active)
      : lay_{cfg.rows, cfg.cols, cfg.rows * cfg.cols}, active_(active) {
    build(cfg, drive, passive_r);
    factor();
  }

  std::size_t rank() const { return active_.size(); }

  // Branch drops V_a - V_b for every active cell given their conductances.
  void active_drops(std::span<const double> g, std::span<double> drop) const {
    const std::size_t k = rank();
    if (k == 0) return;
    Eigen::VectorXd dc(k), zu(k);
    for (std::size_t i = 0; i < k; ++i) dc[i] = g[i] * c_[i];
    zu = p0_ + K_ * dc;
    Eigen::MatrixXd M = Eigen::MatrixXd::Identity(k, k);
    for (std::size_t i = 0; i < k; ++i) M.row(i) += g[i] * K_.row(i);
    Eigen::VectorXd rhs(k);
    for (std::size_t i = 0; i < k; ++i) rhs[i] = g[i] * zu[i];
    const Eigen::VectorXd y = M.partialPivLu().solve(rhs);
    const Eigen::VectorXd ux = zu - K_ * y;
    for (std::size_t i = 0; i < k; ++i) drop[i] = ux[i] - c_[i];
  }

  // Voltage of every group.
  Eigen::VectorXd group_voltages(std::span<const double> g) const {
    const std::size_t k = rank();
    Eigen::VectorXd x = x0_;
    if (k > 0) {
      Eigen::VectorXd dc(k);
      for (std::size_t i = 0; i < k; ++i) dc[i] = g[i] * c_[i];
      const Eigen::VectorXd zu = p0_ + K_ * dc;
      Eigen::MatrixXd M = Eigen::MatrixXd::Identity(k, k);
      for (std::size_t i = 0; i < k; ++i) M.row(i) += g[i] * K_.row(i);
      Eigen::VectorXd rhs(k);
      for (std::size_t i = 0; i < k; ++i) rhs[i] = g[i] * zu[i];
      const Eigen::VectorXd y = M.partialPivLu().solve(rhs);
      x += Z_ * (dc - y);
    }
    Eigen::VectorXd v(n_groups_);
    for (std::size_t grp = 0; grp < n_groups_; ++grp)
      v[grp] = unknown_[grp] >= 0 ? x[unknown_[grp]] : fixed_v_[grp];
    return v;
  }

  std::size_t group_of(std::size_t raw) const { return group_[raw]; }
  const Layout& layout() const { return lay_; }

  // Memristor drop of a cell from group voltages.
  double cell_drop(const Eigen::VectorXd& v, std::size_t b, std::size_t w) const {
    return v[group_[lay_.bl(b, w)]] - v[group_[lay_.in(b, w)]];
  }

  // Net current leaving each source group plus KCL residual.
  void currents(const Eigen::VectorXd& v, std::span<const double> g, std::vector<double>& source_current,
                double& residual) const {
    std::vector<double> net(n_groups_, 0.0);
    auto flow = [&](std::size_t a, std::size_t b, double cond) {
      const std::size_t ga = group_[a], gb = group_[b];
      if (ga == gb) return;
      const double i = cond * (v[ga] - v[gb]);
      net[ga] += i;
      net[gb] -= i;
    };
    for (const Branch& br : branches_) flow(br.a, br.b, 1.0 / br.r);
    for (std::size_t i = 0; i < rank(); ++i) {
      const std::size_t cell = active_[i];
      const std::size_t b = cell / lay_.rows, w = cell % lay_.rows;
      flow(lay_.bl(b, w), lay_.in(b, w), g[i]);
    }
    source_current.clear();
    double total = 0.0;
    for (std::size_t s = 0; s < n_sources_; ++s) {
      source_current.push_back(net[group_[lay_.source(s)]]);
      total += std::abs(source_current.back());
    }
    double worst = 0.0;
    for (std::size_t grp = 0; grp < n_groups_; ++grp)
      if (unknown_[grp] >= 0) worst = std::max(worst, std::abs(net[grp]));
    residual = total > 0.0 ? worst / total : worst;
  }

 private:
  void build(const CrossbarConfig& cfg, const PhaseDrive& drive, const std::vector<double>& passive_r) {
    const Layout& L = lay_;
    n_sources_ = drive.bit_sources.size();
    const std::size_t n_raw = L.source(0) + n_sources_;

    std::vector<char> on(L.cells, 0);
    for (const Cell& c : drive.on_cells) on[c.bit * L.rows + c.word] = 1;
    std::vector<long> bit_source(L.cols, -1);
    for (std::size_t s = 0; s < drive.bit_sources.size(); ++s) {
      const std::size_t b = drive.bit_sources[s].first;
      if (b >= L.cols) throw ConfigError("bit source outside the array");
      if (bit_source[b] >= 0) throw TopologyError("bit line driven twice", static_cast<long>(L.tb(b)));
      bit_source[b] = static_cast<long>(s);
    }
    std::vector<char> word_sel(L.rows, 0);
    for (std::size_t w : drive.words) word_sel.at(w) = 1;

    std::vector<Branch> raw;
    std::vector<std::pair<std::size_t, std::size_t>> wires;
    auto resistor = [&](std::size_t a, std::size_t b, double r) {
      if (r == 0.0) wires.emplace_back(a, b);
      else raw.push_back({a, b, r});
    };
    auto sw = [&](std::size_t a, std::size_t b, bool closed) {
      if (closed && cfg.switch_on < cfg.ideal_switch_below) wires.emplace_back(a, b);
      else raw.push_back({a, b, closed ? cfg.switch_on : cfg.switch_off});
    };
    const bool grounded = cfg.unselected == UnselectedPolicy::kGrounded;
    for (std::size_t b = 0; b < L.cols; ++b) {
      resistor(L.tb(b), L.bl(b, 0), cfg.line_resistance);
      for (std::size_t w = 0; w + 1 < L.rows; ++w) resistor(L.bl(b, w), L.bl(b, w + 1), cfg.line_resistance);
      // driver reaches the bit line at both ends
      const std::size_t src = bit_source[b] >= 0 ? L.source(static_cast<std::size_t>(bit_source[b])) : L.gnd();
      const bool closed = bit_source[b] >= 0 || grounded;
      sw(src, L.tb(b), closed);
      sw(src, L.bl(b, L.rows - 1), closed);
    }
    for (std::size_t w = 0; w < L.rows; ++w) {
      resistor(L.tw(w), L.wl(0, w), cfg.line_resistance);
      for (std::size_t b = 0; b + 1 < L.cols; ++b) resistor(L.wl(b, w), L.wl(b + 1, w), cfg.line_resistance);
      sw(L.tw(w), L.g(), word_sel[w] != 0);
      sw(L.tw(w), L.gnd(), !word_sel[w] && grounded);
    }
    std::vector<char> is_active(L.cells, 0);
    for (std::size_t cell : active_) is_active[cell] = 1;
    for (std::size_t b = 0; b < L.cols; ++b)
      for (std::size_t w = 0; w < L.rows; ++w) {
        const std::size_t cell = b * L.rows + w;
        sw(L.in(b, w), L.wl(b, w), on[cell] != 0);
        if (!is_active[cell]) raw.push_back({L.bl(b, w), L.in(b, w), passive_r[cell], static_cast<long>(cell)});
      }
    raw.push_back({L.g(), L.gnd(), cfg.gate.R_G});
    sw(L.g(), L.gnd(), drive.rg_shorted);

    // merge ideal wires
    std::vector<std::size_t> parent(n_raw);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t x) {
      while (parent[x] != x) x = parent[x] = parent[parent[x]];
      return x;
    };
    for (auto [a, b] : wires) parent[find(a)] = find(b);

    group_.assign(n_raw, 0);
    std::vector<long> root_group(n_raw, -1);
    n_groups_ = 0;
    for (std::size_t i = 0; i < n_raw; ++i) {
      const std::size_t r = find(i);
      if (root_group[r] < 0) root_group[r] = static_cast<long>(n_groups_++);
      group_[i] = static_cast<std::size_t>(root_group[r]);
    }
    fixed_v_.assign(n_groups_, 0.0);
    std::vector<char> fixed(n_groups_, 0);
    auto pin = [&](std::size_t raw_node, double v) {
      const std::size_t grp = group_[raw_node];
      if (fixed[grp] && fixed_v_[grp] != v)
        throw TopologyError("sources at different voltages shorted together", static_cast<long>(raw_node));
      fixed[grp] = 1;
      fixed_v_[grp] = v;
    };
    pin(L.gnd(), 0.0);
    for (std::size_t s = 0; s < n_sources_; ++s) pin(L.source(s), drive.bit_sources[s].second);

    unknown_.assign(n_groups_, -1);
    std::size_t n = 0;
    for (std::size_t grp = 0; grp < n_groups_; ++grp)
      if (!fixed[grp]) unknown_[grp] = static_cast<long>(n++);
    n_unknown_ = n;

    for (const Branch& br : raw)
      if (group_[br.a] != group_[br.b]) branches_.push_back(br);

    // stamp
    std::vector<Eigen::Triplet<double>> trip;
    b0_ = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
    std::vector<double> diag(n, 0.0);
    for (const Branch& br : branches_) {
      const double cond = 1.0 / br.r;
      const long ua = unknown_[group_[br.a]], ub = unknown_[group_[br.b]];
      if (ua >= 0) {
        trip.emplace_back(ua, ua, cond);
        diag[static_cast<std::size_t>(ua)] += cond;
        if (ub >= 0) trip.emplace_back(ua, ub, -cond);
        else b0_[ua] += cond * fixed_v_[group_[br.b]];
      }
      if (ub >= 0) {
        trip.emplace_back(ub, ub, cond);
        diag[static_cast<std::size_t>(ub)] += cond;
        if (ua >= 0) trip.emplace_back(ub, ua, -cond);
        else b0_[ub] += cond * fixed_v_[group_[br.a]];
      }
    }
    for (std::size_t i = 0; i < n; ++i)
      if (!(diag[i] > 0.0)) {
        long node = 0;
        for (std::size_t r = 0; r < n_raw; ++r)
          if (unknown_[group_[r]] == static_cast<long>(i)) {
            node = static_cast<long>(r);
            break;
          }
        throw TopologyError("node has no conductive path", node);
      }
    A0_.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    A0_.setFromTriplets(trip.begin(), trip.end());

    const std::size_t k = active_.size();
    U_ = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k));
    c_.assign(k, 0.0);
    for (std::size_t i = 0; i < k; ++i) {
      const std::size_t cell = active_[i];
      const std::size_t b = cell / L.rows, w = cell % L.rows;
      const std::size_t ga = group_[L.bl(b, w)], gb = group_[L.in(b, w)];
      const long ua = unknown_[ga], ub = unknown_[gb];
      if (ga == gb) continue;
      if (ua >= 0) U_(ua, static_cast<Eigen::Index>(i)) = 1.0;
      if (ub >= 0) U_(ub, static_cast<Eigen::Index>(i)) = -1.0;
      if (ua >= 0 && ub < 0) c_[i] = fixed_v_[gb];
      if (ua < 0 && ub >= 0) c_[i] = -fixed_v_[ga];
      if (ua < 0 && ub < 0) c_[i] = -(fixed_v_[ga] - fixed_v_[gb]);  // drop = 0 - c
    }
  }

  void factor() {
    const std::size_t k = active_.size();
    if (n_unknown_ == 0) {
      x0_.resize(0);
      Z_.resize(0, static_cast<Eigen::Index>(k));
    } else {
      solver_.compute(A0_);
      if (solver_.info() != Eigen::Success) throw SingularityError("crossbar nodal matrix is singular");
      x0_ = solver_.solve(b0_);
      Z_ = solver_.solve(U_);
    }
    K_ = U_.transpose() * Z_;
    p0_ = U_.transpose() * x0_;
  }

  Layout lay_;
  std::vector<std::size_t> active_;
  std::size_t n_sources_ = 0;
  std::vector<std::size_t> group_;
  std::size_t n_groups_ = 0;
  std::vector<long> unknown_;
  std::vector<double> fixed_v_;
  std::size_t n_unknown_ = 0;
  std::vector<Branch> branches_;
  Eigen::SparseMatrix<double> A0_;
  Eigen::VectorXd b0_;
  Eigen::MatrixXd U_;
  std::vector<double> c_;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver_;
  Eigen::VectorXd x0_;
  Eigen::MatrixXd Z_;
  Eigen::MatrixXd K_;
  Eigen::VectorXd p0_;
};

}  // namespace

Crossbar::Crossbar(CrossbarConfig config, MemristorParams p_params, MemristorParams q_params)
    : config_(std::move(config)), p_params_(p_params), q_params_(q_params) {
  config_.validate();
  w_.assign(config_.rows * config_.cols, config_.nominal.w_off);
  w_[cell_index(config_.placement.p)] = p_params_.w_off;
  w_[cell_index(config_.placement.q)] = q_params_.w_off;
}

const MemristorParams& Crossbar::params(std::size_t cell) const {
  if (cell == cell_index(config_.placement.p)) return p_params_;
  if (cell == cell_index(config_.placement.q)) return q_params_;
  return config_.nominal;
}

double Crossbar::s(Cell cell) const {
  const std::size_t i = cell_index(cell);
  return normalized_state(params(i), MemristorState{w_[i]});
}

void Crossbar::set_s(Cell cell, double s) {
  const std::size_t i = cell_index(cell);
  w_[i] = state_at(params(i), s).w;
}

std::vector<double> Crossbar::normalized_states() const {
  std::vector<double> out(w_.size());
  for (std::size_t i = 0; i < w_.size(); ++i) out[i] = normalized_state(params(i), MemristorState{w_[i]});
  return out;
}

std::vector<double> half_gaussian_states(std::size_t n, double sigma, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, sigma);
  std::vector<double> s(n);
  for (auto& x : s) x = sigma > 0.0 ? std::min(1.0, std::abs(normal(rng))) : 0.0;
  return s;
}

void Crossbar::init_states(std::uint64_t seed) {
  const auto s = half_gaussian_states(w_.size(), config_.sigma, seed);
  for (std::size_t i = 0; i < w_.size(); ++i) w_[i] = state_at(params(i), s[i]).w;
  set_s(config_.placement.p, config_.gate.prior_s_P);
  set_s(config_.placement.q, config_.gate.prior_s_Q);
}

std::string histogram_csv(const std::vector<double>& s, std::size_t bins) {
  std::vector<std::size_t> count(bins, 0);
  for (double x : s) {
    auto i = static_cast<std::size_t>(std::clamp(x, 0.0, 1.0) * static_cast<double>(bins));
    count[std::min(i, bins - 1)]++;
  }
  std::ostringstream os;
  os << "bin_low,bin_high,count\n";
  for (std::size_t i = 0; i < bins; ++i)
    os << static_cast<double>(i) / static_cast<double>(bins) << ','
       << static_cast<double>(i + 1) / static_cast<double>(bins) << ',' << count[i] << '\n';
  return os.str();
}

namespace {

std::vector<double> resistances(const Crossbar& xb, const std::vector<double>& w) {
  std::vector<double> r(w.size());
  for (std::size_t i = 0; i < w.size(); ++i)
    r[i] = resistance_of_state(xb.params(i), MemristorState{clamp_length(xb.params(i), w[i])});
  return r;
}

}  // namespace

NodeSolution Crossbar::solve(const PhaseDrive& drive) const {
  PhaseSystem sys(config_, drive, resistances(*this, w_), {});
  const Eigen::VectorXd v = sys.group_voltages({});
  NodeSolution out;
  out.v_dev.resize(w_.size());
  for (std::size_t b = 0; b < config_.cols; ++b)
    for (std::size_t w = 0; w < config_.rows; ++w) out.v_dev[b * config_.rows + w] = -sys.cell_drop(v, b, w);
  out.V_G = v[sys.group_of(sys.layout().g())];
  sys.currents(v, {}, out.source_current, out.kcl_residual);
  return out;
}

PhaseReport Crossbar::run_phase(const PhaseDrive& drive) {
  PhaseReport report;
  const std::vector<double> start = w_;
  const std::size_t gate_p = cell_index(config_.placement.p), gate_q = cell_index(config_.placement.q);
  std::vector<std::size_t> active;
  for (const Cell& c : drive.on_cells) active.push_back(cell_index(c));

  const std::vector<double> r_start = resistances(*this, start);
  const Window& window = default_window();

  while (true) {
    PhaseSystem sys(config_, drive, r_start, active);
    std::vector<char> is_active(w_.size(), 0);
    for (std::size_t c : active) is_active[c] = 1;
    const std::size_t k = active.size();

    std::vector<double> y(k);
    for (std::size_t i = 0; i < k; ++i) y[i] = clamp_length(params(active[i]), start[active[i]]);
    std::vector<double> g(k), drop(k);
    auto conductances = [&](std::span<const double> x) {
      for (std::size_t i = 0; i < k; ++i) {
        const MemristorParams& pr = params(active[i]);
        g[i] = 1.0 / resistance_of_state(pr, MemristorState{clamp_length(pr, x[i])});
      }
    };
    auto check_passive = [&](std::span<const double> x) {
      conductances(x);
      const Eigen::VectorXd v = sys.group_voltages(g);
      PromoteRequest req;
      for (std::size_t b = 0; b < config_.cols; ++b)
        for (std::size_t w = 0; w < config_.rows; ++w) {
          const std::size_t cell = b * config_.rows + w;
          if (is_active[cell]) continue;
          const double vd = -sys.cell_drop(v, b, w);
          if (state_derivative(params(cell), MemristorState{start[cell]}, vd, window) != 0.0)
            req.cells.push_back(cell);
        }
      if (!req.cells.empty()) throw req;
    };
    auto rhs = [&](double, std::span<const double> x, std::span<double> dx) {
      conductances(x);
      sys.active_drops(g, drop);
      for (std::size_t i = 0; i < k; ++i) {
        const MemristorParams& pr = params(active[i]);
        dx[i] = state_derivative(pr, MemristorState{clamp_length(pr, x[i])}, -drop[i], window);
      }
    };
    auto clamp = [&](std::span<double> x) {
      for (std::size_t i = 0; i < k; ++i) x[i] = clamp_length(params(active[i]), x[i]);
    };
    auto observer = [&](double, std::span<const double> x) { check_passive(x); };

    try {
      check_passive(y);
      if (k > 0) integrate_ode(rhs, y, 0.0, drive.duration, config_.gate.integrator, clamp, observer);
    } catch (const PromoteRequest& req) {
      for (std::size_t c : req.cells) active.push_back(c);
      report.promoted += req.cells.size();
      ++report.restarts;
      continue;
    }
    w_ = start;
    for (std::size_t i = 0; i < k; ++i) w_[active[i]] = y[i];
    break;
  }
  for (std::size_t i = 0; i < w_.size(); ++i) {
    if (i == gate_p || i == gate_q) continue;
    const MemristorParams& pr = params(i);
    report.max_passive_ds = std::max(report.max_passive_ds, std::abs(w_[i] - start[i]) / (pr.w_on - pr.w_off));
  }
  return report;
}

double Crossbar::read(Cell cell, PhaseReport* report) {
  const PhaseDrive drive = read_drive(config_, cell);
  PhaseReport r = run_phase(drive);
  if (report) *report = r;
  const NodeSolution sol = solve(drive);
  // sense on the selected word line
  double current = 0.0;
  for (std::size_t b = 0; b < config_.cols; ++b) {
    const std::size_t i = b * config_.rows + cell.word;
    current += -sol.v_dev[i] / resistance_of_state(params(i), MemristorState{w_[i]});
  }

  const CrossbarConfig& c = config_;
  const double top = c.switch_on + static_cast<double>(cell.word + 1) * c.line_resistance;
  const double bottom = c.switch_on + static_cast<double>(c.rows - 1 - cell.word) * c.line_resistance;
  double series = top * bottom / (top + bottom);
  series += c.switch_on;                                                          // cell switch
  series += static_cast<double>(cell.bit + 1) * c.line_resistance + c.switch_on;  // word line to G
  if (drive.rg_shorted) series += c.gate.R_G * c.switch_on / (c.gate.R_G + c.switch_on);
  else series += c.gate.R_G * c.switch_off / (c.gate.R_G + c.switch_off);
  return c.gate.V_read / current - series;
}

CrossbarCaseOutcome run_crossbar_case(int case_index, const CrossbarConfig& config,
                                      const MemristorParams& p_params, const MemristorParams& q_params,
                                      const ThresholdScheme& scheme, std::uint64_t seed) {
  const TruthRow row = kTruthTable.at(static_cast<std::size_t>(case_index));
  CrossbarCaseOutcome res;
  CaseOutcome& out = res.outcome;
  out.case_id = case_index + 1;
  out.p = row.p;
  out.q = row.q;
  out.expected = row.expected;
  const MemristorParams& ref = config.nominal;
  const GateConfig& gc = config.gate;
  const Cell P = config.placement.p, Q = config.placement.q;

  Crossbar xb(config, p_params, q_params);
  xb.init_states(seed);
  auto track = [&](const PhaseReport& r) {
    res.max_passive_ds = std::max(res.max_passive_ds, r.max_passive_ds);
    res.promoted += r.promoted;
  };
  try {
    track(xb.run_phase(write_drive(config, P, row.p ? gc.V_set : gc.V_reset)));
    track(xb.run_phase(write_drive(config, Q, row.q ? gc.V_set : gc.V_reset)));
    out.init_s_P = xb.s(P);
    out.init_s_Q = xb.s(Q);
    auto cls = [&](const MemristorParams& pr, double s, Role role) {
      return classify_resistance(resistance_at(pr, s), scheme, role, ref);
    };
    const bool init_ok = cls(p_params, out.init_s_P, Role::kInput) == (row.p ? Logic::kOne : Logic::kZero) &&
                         cls(q_params, out.init_s_Q, Role::kInput) == (row.q ? Logic::kOne : Logic::kZero);

    track(xb.run_phase(imply_drive(config)));
    PhaseReport rp, rq;
    out.R_P = xb.read(P, &rp);
    out.R_Q = xb.read(Q, &rq);
    track(rp);
    track(rq);
    out.final_s_P = xb.s(P);
    out.final_s_Q = xb.s(Q);
    out.p_class = classify_resistance(out.R_P, scheme, Role::kInput, ref);
    out.q_class = classify_resistance(out.R_Q, scheme, Role::kOutput, ref);
    out.q_ok = out.q_class == (row.expected ? Logic::kOne : Logic::kZero);
    out.p_ok = input_survived(out.p_class, row.p, gc.input_check);
    out.passed = out.q_ok && out.p_ok;
    if (!out.passed) out.stage = init_ok ? FailureStage::kOperation : FailureStage::kInitialization;
  } catch (const NumericError& e) {
    out.passed = false;
    out.stage = FailureStage::kOperation;
    out.error = e.what();
  }
  return res;
}

CrossbarTruthTable run_crossbar_truth_table(const CrossbarConfig& config, const MemristorParams& p_params,
                                            const MemristorParams& q_params, const ThresholdScheme& scheme,
                                            std::uint64_t seed) {
  CrossbarTruthTable t;
  t.result.passed = true;
  for (int i = 0; i < 4; ++i) {
    CrossbarCaseOutcome c = run_crossbar_case(i, config, p_params, q_params, scheme, seed);
    t.max_passive_ds = std::max(t.max_passive_ds, c.max_passive_ds);
    t.promoted += c.promoted;
    t.result.cases[static_cast<std::size_t>(i)] = c.outcome;
    t.result.passed = t.result.passed && c.outcome.passed;
  }
  return t;
}

CrossbarSweepResult run_crossbar_sweep(const VariationSpec& spec, const CrossbarConfig& config,
                                       const std::vector<Placement>& placements, std::uint64_t seed,
                                       const SweepOptions& options) {
  const ThresholdScheme scheme = preset(spec.scheme);
  const auto tuples = generate_grid(spec, config.nominal);
  CrossbarSweepResult res;
  res.placements = placements;
  res.per_placement.assign(placements.size(), std::vector<SweepOutcome>(tuples.size()));
  std::vector<double> passive(placements.size() * tuples.size(), 0.0);
  std::vector<CrossbarConfig> configs;
  for (const auto& pl : placements) {
    CrossbarConfig c = config;
    c.placement = pl;
    c.validate();
    configs.push_back(c);
  }

  const std::size_t total = placements.size() * tuples.size();
  unsigned jobs = options.jobs ? options.jobs : std::max(1u, std::thread::hardware_concurrency());
  jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, std::max<std::size_t>(1, total)));
  std::atomic<std::size_t> next{0}, done{0};
  std::mutex progress_mutex;
  auto worker = [&] {
    for (std::size_t task = next++; task < total; task = next++) {
      const std::size_t pi = task / tuples.size(), ti = task % tuples.size();
      SweepOutcome& o = res.per_placement[pi][ti];
      o.tuple = tuples[ti];
      try {
        CrossbarTruthTable t = run_crossbar_truth_table(configs[pi], o.tuple.p, o.tuple.q, scheme, seed);
        o.result = t.result;
        o.correct = t.result.passed;
        passive[task] = t.max_passive_ds;
        for (const auto& c : o.result.cases) {
          if (c.passed) continue;
          if (o.stage == FailureStage::kNone) o.stage = c.stage;
          if (o.error.empty() && !c.error.empty()) o.error = c.error;
        }
      } catch (const Error& e) {
        o.correct = false;
        o.stage = FailureStage::kOperation;
        o.error = e.what();
      }
      const std::size_t d = ++done;
      if (options.progress) {
        std::lock_guard lock(progress_mutex);
        options.progress(d, total);
      }
    }
  };
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  for (double p : passive) res.max_passive_ds = std::max(res.max_passive_ds, p);
  res.combined.resize(tuples.size());
  for (std::size_t ti = 0; ti < tuples.size(); ++ti) {
    const SweepOutcome* worst = &res.per_placement[0][ti];
    for (std::size_t pi = 0; pi < placements.size(); ++pi)
      if (!res.per_placement[pi][ti].correct) {
        worst = &res.per_placement[pi][ti];
        break;
      }
    res.combined[ti] = *worst;
  }
  return res;
}

}  // namespace imply
