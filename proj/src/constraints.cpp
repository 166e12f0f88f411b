#include "imply/constraints.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <optional>
#include <sstream>

#include "imply/error.hpp"
#include "json.hpp"

namespace imply {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double root(double x, int alpha) {
  if (alpha == 3) return std::cbrt(x);
  return std::pow(x, 1.0 / alpha);
}

// Voltage across Q (driver polarity) during IMPLY for given resistances.
double v_q(double R_P, double R_Q, const GateConfig& c) {
  return R_Q * ((R_P + c.R_G) * c.V_set - c.R_G * c.V_cond) /
         (R_P * c.R_G + R_P * R_Q + R_Q * c.R_G);
}

double v_p(double R_P, double R_Q, const GateConfig& c) {
  return R_P * ((R_Q + c.R_G) * c.V_cond - c.R_G * c.V_set) /
         (R_P * c.R_G + R_P * R_Q + R_Q * c.R_G);
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

double rel_margin(double value, double bound, Direction d) {
  const double scale = std::abs(bound) > 0.0 ? std::abs(bound) : 1.0;
  return (d == Direction::kLower ? value - bound : bound - value) / scale;
}

void finish_voltage(ConstraintRecord& r) {
  r.satisfied = r.direction == Direction::kLower ? (r.strict ? r.value > r.bound : r.value >= r.bound)
                                                 : (r.strict ? r.value < r.bound : r.value <= r.bound);
  r.margin = rel_margin(r.value, r.bound, r.direction);
  if (!r.satisfied && r.margin > 0.0) r.margin = 0.0;
}

// v > -V_set R_Q/(R_G + R_Q), i.e. b > 0 for threshold v_thr = -v.
ConstraintRecord b_positive_record(std::string id, ParamId param, double value, double R_Q,
                                   const char* rq_name, const GateConfig& c) {
  ConstraintRecord r;
  r.id = std::move(id);
  r.parameter = param;
  r.direction = Direction::kLower;
  r.strict = true;
  r.bound = -c.V_set * R_Q / (c.R_G + R_Q);
  r.value = value;
  r.relation = std::string(param_name(param)) + " > -V_set*" + rq_name + "/(R_G+" + rq_name + ")";
  r.inputs = {{"V_set", c.V_set}, {"R_G", c.R_G}, {rq_name, R_Q}};
  finish_voltage(r);
  return r;
}

// R_P * b (>|<) a with threshold voltage v on V_Q.
ConstraintRecord rp_record(std::string id, ParamId param, double R_P, double R_Q, const char* rq_name,
                           double v, ParamId v_param, double v_value, Direction d, const GateConfig& c) {
  const double a = R_Q * c.R_G * (v + c.V_cond - c.V_set);
  const double b = R_Q * c.V_set - v * (c.R_G + R_Q);
  ConstraintRecord r;
  r.id = std::move(id);
  r.parameter = param;
  r.direction = d;
  r.strict = true;
  r.value = R_P;
  const double lhs = R_P * b;
  r.satisfied = d == Direction::kLower ? lhs > a : lhs < a;
  const double scale = std::abs(lhs) + std::abs(a);
  r.margin = scale > 0.0 ? (d == Direction::kLower ? lhs - a : a - lhs) / scale : 0.0;
  if (b > 0.0) {
    r.bound = a / b;
  } else {
    r.bound = kNaN;
    r.unbounded = true;
    r.note = b == 0.0 ? "b = 0: bound diverges" : "b < 0: only the b > 0 branch is reported";
  }
  const std::string op = d == Direction::kLower ? " > " : " < ";
  r.relation = std::string(param_name(param)) + op + rq_name + "*R_G*(V_cond-" +
               std::string(param_name(v_param)) + "-V_set)/(" + rq_name + "*V_set+" +
               std::string(param_name(v_param)) + "*(R_G+" + rq_name + "))";
  r.inputs = {{"V_set", c.V_set}, {"V_cond", c.V_cond}, {"R_G", c.R_G}, {rq_name, R_Q},
              {std::string(param_name(v_param)), v_value}};
  return r;
}

ConstraintRecord threshold_record(std::string id, ParamId param, double value, ThresholdLevel level,
                                  double bound) {
  ConstraintRecord r;
  r.id = std::move(id);
  r.parameter = param;
  r.direction = level == ThresholdLevel::kIL ? Direction::kLower : Direction::kUpper;
  r.strict = true;
  r.bound = bound;
  r.value = value;
  const std::string lvl = level == ThresholdLevel::kIL ? "R_IL" : "R_IH";
  r.relation = std::string(param_name(param)) + (level == ThresholdLevel::kIL ? " > " : " < ") + lvl;
  r.inputs = {{lvl, bound}};
  finish_voltage(r);
  return r;
}

}  // namespace

std::string_view to_string(Direction direction) {
  return direction == Direction::kLower ? "lower" : "upper";
}

std::string_view to_string(Estimator estimator) {
  switch (estimator) {
    case Estimator::kRQ1: return "RQ1";
    case Estimator::kRQ2: return "RQ2";
    case Estimator::kRQ3: return "RQ3";
  }
  return "?";
}

const ConstraintRecord* ConstraintReport::find(std::string_view id) const {
  for (const auto& r : records)
    if (r.id == id) return &r;
  return nullptr;
}

bool ConstraintReport::all_satisfied() const {
  for (const auto& r : records)
    if (!r.satisfied) return false;
  return true;
}

ConstraintReport static_bounds(const MemristorParams& p, const MemristorParams& q, const GateConfig& c,
                               const ThresholdScheme& scheme, const MemristorParams& reference) {
  scheme.validate();
  const double R_OH = resistance_threshold(scheme, ThresholdLevel::kOH, reference);
  const double R_OL = resistance_threshold(scheme, ThresholdLevel::kOL, reference);
  const double R_IL = resistance_threshold(scheme, ThresholdLevel::kIL, reference);
  const double R_IH = resistance_threshold(scheme, ThresholdLevel::kIH, reference);

  ConstraintReport rep;
  rep.scheme = scheme.name;
  auto& out = rep.records;

  out.push_back(b_positive_record("case1_von_q", ParamId::kVonQ, q.v_on, R_OH, "R_OH", c));
  out.push_back(rp_record("case1_roff_p", ParamId::kRoffP, p.R_off, R_OH, "R_OH", -q.v_on, ParamId::kVonQ,
                          q.v_on, Direction::kLower, c));
  out.push_back(b_positive_record("case3_von_q", ParamId::kVonQ, q.v_on, R_OL, "R_OL", c));
  out.push_back(rp_record("case3_ron_p", ParamId::kRonP, p.R_on, R_OL, "R_OL", -q.v_on, ParamId::kVonQ,
                          q.v_on, Direction::kUpper, c));
  out.push_back(b_positive_record("case24_voff_q", ParamId::kVoffQ, q.v_off, R_OH, "R_OH", c));
  out.push_back(rp_record("case24_roff_p", ParamId::kRoffP, p.R_off, R_OH, "R_OH", -q.v_off,
                          ParamId::kVoffQ, q.v_off, Direction::kLower, c));
  out.push_back(rp_record("case24_ron_p", ParamId::kRonP, p.R_on, R_OH, "R_OH", -q.v_off, ParamId::kVoffQ,
                          q.v_off, Direction::kLower, c));
  out.push_back(threshold_record("threshold_roff_p", ParamId::kRoffP, p.R_off, ThresholdLevel::kIL, R_IL));
  out.push_back(threshold_record("threshold_roff_q", ParamId::kRoffQ, q.R_off, ThresholdLevel::kIL, R_IL));
  out.push_back(threshold_record("threshold_ron_p", ParamId::kRonP, p.R_on, ThresholdLevel::kIH, R_IH));
  out.push_back(threshold_record("threshold_ron_q", ParamId::kRonQ, q.R_on, ThresholdLevel::kIH, R_IH));
  return rep;
}

ConstraintRecord dynamic_vonq_record(const MemristorParams& p, const MemristorParams& q, const GateConfig& c,
                                     const ThresholdScheme& scheme, const MemristorParams& reference) {
  if (!(q.k_on > 0.0)) throw DomainError("dynamic v_onQ bound needs k_onQ > 0");
  if (!(c.timestep > 0.0)) throw DomainError("dynamic v_onQ bound needs timestep > 0");
  const double R_OH = resistance_threshold(scheme, ThresholdLevel::kOH, reference);
  const double v_qi = v_q(p.R_off, q.R_off, c);
  const double dw_min = (R_OH - q.R_off) / (q.R_on - q.R_off) * (q.w_on - q.w_off) + q.w_off;
  const double reach = q.k_on * c.timestep;

  ConstraintRecord r;
  r.id = "dynamic_von_q";
  r.parameter = ParamId::kVonQ;
  r.direction = Direction::kLower;
  r.strict = false;
  r.value = q.v_on;
  r.relation = "v_onQ >= -V_Qi/((dw_min/(k_onQ*T))^(1/alpha)+1)";
  r.inputs = {{"V_Qi", v_qi}, {"dw_min", dw_min}, {"k_onQ", q.k_on}, {"T", c.timestep},
              {"alpha", static_cast<double>(q.alpha_on)}, {"R_OH", R_OH}};
  if (!(dw_min > 0.0)) {
    r.degenerate = true;
    r.bound = kNaN;
    r.satisfied = true;
    r.margin = 1.0;
    r.note = "dw_min <= 0: R_OH at or above R_offQ";
    return r;
  }
  r.bound = -v_qi / (root(dw_min / reach, q.alpha_on) + 1.0);
  finish_voltage(r);
  return r;
}

double dynamic_vonq_bound(const MemristorParams& p, const MemristorParams& q, const GateConfig& c,
                          const ThresholdScheme& scheme, const MemristorParams& reference) {
  return dynamic_vonq_record(p, q, c, scheme, reference).bound;
}

double estimator_resistance(const MemristorParams& q, const GateConfig& c, Estimator e) {
  const double r_min = steady_state_r_min(q, c);
  switch (e) {
    case Estimator::kRQ1: return r_min;
    case Estimator::kRQ2: return 0.5 * (q.R_off + r_min);
    case Estimator::kRQ3: return std::sqrt(q.R_off * r_min);
  }
  return r_min;
}

ConstraintRecord dynamic_vonp_record(const MemristorParams& p, const MemristorParams& q, const GateConfig& c,
                                     const ThresholdScheme& scheme, Estimator e,
                                     const MemristorParams& reference) {
  if (!(p.k_on > 0.0)) throw DomainError("dynamic v_onP bound needs k_onP > 0");
  if (!(c.timestep > 0.0)) throw DomainError("dynamic v_onP bound needs timestep > 0");
  const double R_IL = resistance_threshold(scheme, ThresholdLevel::kIL, reference);
  const double R_Qj = estimator_resistance(q, c, e);
  const double v_pf = v_p(p.R_off, R_Qj, c);
  const double dw_max = length_of_resistance(p, R_IL) - length_of_resistance(p, p.R_off);

  ConstraintRecord r;
  r.id = "dynamic_von_p_" + std::string(to_string(e));
  for (auto& ch : r.id) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  r.parameter = ParamId::kVonP;
  r.direction = Direction::kUpper;
  r.strict = false;
  r.value = p.v_on;
  r.relation = "v_onP <= -V_Pf/((dw_max/(k_onP*T))^(1/alpha)+1)";
  r.inputs = {{"R_Q", R_Qj}, {"V_Pf", v_pf}, {"dw_max", dw_max}, {"k_onP", p.k_on},
              {"T", c.timestep}, {"alpha", static_cast<double>(p.alpha_on)}, {"R_IL", R_IL}};
  if (!(dw_max > 0.0)) {
    r.degenerate = true;
    r.bound = kNaN;
    r.satisfied = false;
    r.margin = -1.0;
    r.note = "dw_max <= 0: R_offP at or below R_IL";
    return r;
  }
  r.bound = -v_pf / (root(dw_max / (p.k_on * c.timestep), p.alpha_on) + 1.0);
  finish_voltage(r);
  return r;
}

double dynamic_vonp_bound(const MemristorParams& p, const MemristorParams& q, const GateConfig& c,
                          const ThresholdScheme& scheme, Estimator e, const MemristorParams& reference) {
  return dynamic_vonp_record(p, q, c, scheme, e, reference).bound;
}

ConstraintReport full_report(const MemristorParams& p, const MemristorParams& q, const GateConfig& c,
                             const ThresholdScheme& scheme, const MemristorParams& reference) {
  ConstraintReport rep = static_bounds(p, q, c, scheme, reference);
  rep.records.push_back(dynamic_vonq_record(p, q, c, scheme, reference));
  for (Estimator e : {Estimator::kRQ1, Estimator::kRQ2, Estimator::kRQ3})
    rep.records.push_back(dynamic_vonp_record(p, q, c, scheme, e, reference));
  return rep;
}

RgBounds rg_bounds(const MemristorParams& n, const GateConfig& c) {
  const double von = std::abs(n.v_on);
  const double head = c.V_set - von;
  const double den_lo = c.V_cond - head;
  const double den_hi = 2.0 * von - c.V_set + c.V_cond;
  if (!(den_lo > 0.0) || !(den_hi > 0.0))
    throw ConfigError("R_G bounds: non-positive denominator (check V_set, V_cond, v_on)");
  RgBounds b;
  b.lower = n.R_on * head / den_lo;
  b.upper = n.R_off * head / den_hi;
  b.geometric_mean = std::sqrt(b.lower * b.upper);

  // R_G * k (<|>) d, from V_Q against |v_on| with the full divider.
  auto coeffs = [&](double R_P, double R_Q) {
    return std::pair{R_Q * (c.V_set - c.V_cond) - von * (R_P + R_Q), R_P * R_Q * (von - c.V_set)};
  };
  auto [k3, d3] = coeffs(n.R_on, n.R_off);
  auto [k1, d1] = coeffs(n.R_off, n.R_off);
  b.exact_lower = k3 < 0.0 ? d3 / k3 : kNaN;
  b.exact_upper = k1 < 0.0 ? d1 / k1 : kNaN;
  return b;
}

std::vector<ConstraintRecord> evaluate_selection(const MemristorParams& p, const MemristorParams& q,
                                                 const GateConfig& c, const ThresholdScheme& scheme,
                                                 const ConstraintSelection& sel,
                                                 const MemristorParams& reference) {
  std::vector<ConstraintRecord> out;
  const ConstraintReport st = static_bounds(p, q, c, scheme, reference);
  for (const auto& r : st.records) {
    const bool keep = (sel.static_case1 && r.id.starts_with("case1_")) ||
                      (sel.static_case3 && r.id.starts_with("case3_")) ||
                      (sel.static_case24 && r.id.starts_with("case24_")) ||
                      (sel.thresholds && r.id.starts_with("threshold_"));
    if (keep) out.push_back(r);
  }
  if (sel.dynamic_von_q) out.push_back(dynamic_vonq_record(p, q, c, scheme, reference));
  for (Estimator e : sel.dynamic_von_p) out.push_back(dynamic_vonp_record(p, q, c, scheme, e, reference));
  return out;
}

namespace {

std::vector<double> linspace(const AreaAxis& a) {
  std::vector<double> v(a.samples);
  for (std::size_t i = 0; i < a.samples; ++i)
    v[i] = a.min + (a.max - a.min) * static_cast<double>(i) / static_cast<double>(a.samples - 1);
  return v;
}

// Zero contour of a scalar field by marching squares. NaN cells are skipped.
std::vector<std::vector<std::pair<double, double>>> contour(const std::vector<double>& f,
                                                            const std::vector<double>& xs,
                                                            const std::vector<double>& ys) {
  const std::size_t nx = xs.size(), ny = ys.size();
  auto at = [&](std::size_t ix, std::size_t iy) { return f[iy * nx + ix]; };
  // edge key: horizontal edges (ix,iy)-(ix+1,iy) -> 2*(iy*nx+ix), vertical -> 2*(iy*nx+ix)+1
  std::map<long, std::pair<double, double>> point;
  std::multimap<long, long> adj;
  auto cross = [&](long key, double x0, double y0, double f0, double x1, double y1, double f1) {
    const double t = f0 / (f0 - f1);
    point[key] = {x0 + t * (x1 - x0), y0 + t * (y1 - y0)};
  };
  for (std::size_t iy = 0; iy + 1 < ny; ++iy) {
    for (std::size_t ix = 0; ix + 1 < nx; ++ix) {
      const double f00 = at(ix, iy), f10 = at(ix + 1, iy), f01 = at(ix, iy + 1), f11 = at(ix + 1, iy + 1);
      if (std::isnan(f00) || std::isnan(f10) || std::isnan(f01) || std::isnan(f11)) continue;
      std::vector<long> hits;
      const long bottom = 2 * static_cast<long>(iy * nx + ix);
      const long top = 2 * static_cast<long>((iy + 1) * nx + ix);
      const long left = bottom + 1;
      const long right = 2 * static_cast<long>(iy * nx + ix + 1) + 1;
      if ((f00 > 0) != (f10 > 0)) {
        cross(bottom, xs[ix], ys[iy], f00, xs[ix + 1], ys[iy], f10);
        hits.push_back(bottom);
      }
      if ((f10 > 0) != (f11 > 0)) {
        cross(right, xs[ix + 1], ys[iy], f10, xs[ix + 1], ys[iy + 1], f11);
        hits.push_back(right);
      }
      if ((f01 > 0) != (f11 > 0)) {
        cross(top, xs[ix], ys[iy + 1], f01, xs[ix + 1], ys[iy + 1], f11);
        hits.push_back(top);
      }
      if ((f00 > 0) != (f01 > 0)) {
        cross(left, xs[ix], ys[iy], f00, xs[ix], ys[iy + 1], f01);
        hits.push_back(left);
      }
      if (hits.size() == 2) {
        adj.emplace(hits[0], hits[1]);
        adj.emplace(hits[1], hits[0]);
      } else if (hits.size() == 4) {
        // saddle: pair by the centre value
        const double centre = 0.25 * (f00 + f10 + f01 + f11);
        if ((centre > 0) == (f00 > 0)) {
          adj.emplace(hits[0], hits[1]); adj.emplace(hits[1], hits[0]);
          adj.emplace(hits[2], hits[3]); adj.emplace(hits[3], hits[2]);
        } else {
          adj.emplace(hits[0], hits[3]); adj.emplace(hits[3], hits[0]);
          adj.emplace(hits[1], hits[2]); adj.emplace(hits[2], hits[1]);
        }
      }
    }
  }

  std::vector<std::vector<std::pair<double, double>>> lines;
  auto take = [&](long from) -> std::optional<long> {
    auto it = adj.find(from);
    if (it == adj.end()) return std::nullopt;
    const long to = it->second;
    adj.erase(it);
    auto [lo, hi] = adj.equal_range(to);
    for (auto j = lo; j != hi; ++j)
      if (j->second == from) {
        adj.erase(j);
        break;
      }
    return to;
  };
  auto walk = [&](long start) {
    std::vector<std::pair<double, double>> line{point[start]};
    long cur = start;
    while (auto nxt = take(cur)) {
      line.push_back(point[*nxt]);
      cur = *nxt;
    }
    lines.push_back(std::move(line));
  };
  // open chains first (endpoints have one neighbour), then loops
  for (auto& [key, _] : point)
    if (adj.count(key) == 1) walk(key);
  while (!adj.empty()) walk(adj.begin()->first);
  return lines;
}

}  // namespace

OperatingArea operating_area(const AreaAxis& x, const AreaAxis& y, const MemristorParams& p0,
                             const MemristorParams& q0, const GateConfig& c, const ThresholdScheme& scheme,
                             const ConstraintSelection& sel, const MemristorParams& reference) {
  for (const AreaAxis* a : {&x, &y}) {
    if (!(a->max > a->min)) throw ConfigError("operating area: axis range must have positive length");
    if (a->samples < 2) throw ConfigError("operating area: need at least 2 samples per axis");
  }
  if (x.parameter == y.parameter) throw ConfigError("operating area: axes must differ");

  OperatingArea area;
  area.x = x;
  area.y = y;
  area.xs = linspace(x);
  area.ys = linspace(y);
  area.scheme = scheme.name;
  const std::size_t n = area.xs.size() * area.ys.size();
  area.mask.assign(n, 0);
  area.physical.assign(n, 0);

  std::vector<std::vector<double>> margins;
  for (std::size_t iy = 0; iy < area.ys.size(); ++iy) {
    for (std::size_t ix = 0; ix < area.xs.size(); ++ix) {
      MemristorParams p = p0, q = q0;
      set_param(p, q, x.parameter, area.xs[ix]);
      set_param(p, q, y.parameter, area.ys[iy]);
      const std::size_t k = area.index(ix, iy);
      std::vector<ConstraintRecord> recs;
      bool ok = true;
      try {
        p.validate();
        q.validate();
        recs = evaluate_selection(p, q, c, scheme, sel, reference);
      } catch (const Error&) {
        ok = false;
      }
      if (area.constraint_ids.empty() && ok) {
        for (const auto& r : recs) area.constraint_ids.push_back(r.id);
        area.constraint_masks.assign(recs.size(), std::vector<std::uint8_t>(n, 0));
        margins.assign(recs.size(), std::vector<double>(n, kNaN));
      }
      if (!ok) continue;
      area.physical[k] = 1;
      bool all = true;
      for (std::size_t i = 0; i < recs.size(); ++i) {
        area.constraint_masks[i][k] = recs[i].satisfied ? 1 : 0;
        margins[i][k] = recs[i].margin;
        all = all && recs[i].satisfied;
      }
      area.mask[k] = all ? 1 : 0;
    }
  }
  for (std::size_t i = 0; i < area.constraint_ids.size(); ++i)
    for (auto& line : contour(margins[i], area.xs, area.ys))
      area.boundaries.push_back({area.constraint_ids[i], std::move(line)});
  return area;
}

std::string report_csv(const ConstraintReport& rep) {
  std::ostringstream os;
  os << "id,parameter,direction,strict,bound,unit,value,satisfied,unbounded,degenerate,margin,relation\n";
  for (const auto& r : rep.records) {
    os << r.id << ',' << param_name(r.parameter) << ',' << to_string(r.direction) << ','
       << (r.strict ? 1 : 0) << ',' << (std::isnan(r.bound) ? std::string() : fmt(r.bound)) << ','
       << param_unit(r.parameter) << ',' << fmt(r.value) << ',' << (r.satisfied ? 1 : 0) << ','
       << (r.unbounded ? 1 : 0) << ',' << (r.degenerate ? 1 : 0) << ',' << fmt(r.margin) << ",\""
       << r.relation << "\"\n";
  }
  return os.str();
}

namespace {

nlohmann::json number_or_null(double x) {
  return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr);
}

}  // namespace

std::string report_json(const ConstraintReport& rep, const RgBounds* rg) {
  nlohmann::json j;
  j["scheme"] = rep.scheme;
  j["records"] = nlohmann::json::array();
  for (const auto& r : rep.records) {
    nlohmann::json e;
    e["id"] = r.id;
    e["relation"] = r.relation;
    e["parameter"] = param_name(r.parameter);
    e["unit"] = param_unit(r.parameter);
    e["direction"] = to_string(r.direction);
    e["strict"] = r.strict;
    e["bound"] = number_or_null(r.bound);
    e["bound_6sig"] = std::isnan(r.bound) ? "" : fmt(r.bound);
    e["value"] = r.value;
    e["satisfied"] = r.satisfied;
    e["unbounded"] = r.unbounded;
    e["degenerate"] = r.degenerate;
    e["margin"] = number_or_null(r.margin);
    if (!r.note.empty()) e["note"] = r.note;
    nlohmann::json in = nlohmann::json::object();
    for (const auto& [k, v] : r.inputs) in[k] = number_or_null(v);
    e["inputs"] = in;
    j["records"].push_back(e);
  }
  if (rg) {
    j["R_G"] = {{"lower", rg->lower},
                {"upper", rg->upper},
                {"geometric_mean", rg->geometric_mean},
                {"exact_lower", number_or_null(rg->exact_lower)},
                {"exact_upper", number_or_null(rg->exact_upper)}};
  }
  return j.dump(2);
}

std::string area_json(const OperatingArea& a) {
  nlohmann::json j;
  j["x"] = {{"parameter", param_name(a.x.parameter)}, {"unit", param_unit(a.x.parameter)}, {"values", a.xs}};
  j["y"] = {{"parameter", param_name(a.y.parameter)}, {"unit", param_unit(a.y.parameter)}, {"values", a.ys}};
  j["scheme"] = a.scheme;
  j["constraints"] = a.constraint_ids;
  j["mask"] = a.mask;
  j["physical"] = a.physical;
  nlohmann::json masks = nlohmann::json::object();
  for (std::size_t i = 0; i < a.constraint_ids.size(); ++i) masks[a.constraint_ids[i]] = a.constraint_masks[i];
  j["constraint_masks"] = masks;
  j["boundaries"] = nlohmann::json::array();
  for (const auto& b : a.boundaries) {
    nlohmann::json pts = nlohmann::json::array();
    for (auto [px, py] : b.points) pts.push_back({px, py});
    j["boundaries"].push_back({{"constraint", b.constraint_id}, {"points", pts}});
  }
  return j.dump();
}

}  // namespace imply
