#include "imply/config.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>

#include "imply/error.hpp"

namespace imply {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t end = s.find(sep, start);
    out.push_back(trim(s.substr(start, end == std::string_view::npos ? end : end - start)));
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
  return out;
}

// Splits "1.5e3 kOhm" into the number and the unit text.
std::pair<double, std::string> number_and_unit(std::string_view text) {
  text = trim(text);
  double value = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (!text.empty() && text.front() == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc()) throw ConfigError("expected a number, got '" + std::string(text) + "'");
  return {value, std::string(trim(std::string_view(ptr, static_cast<std::size_t>(last - ptr))))};
}

double prefix_factor(std::string_view p) {
  if (p.empty()) return 1.0;
  if (p == "p") return 1e-12;
  if (p == "n") return 1e-9;
  if (p == "u" || p == "\xC2\xB5" || p == "\xCE\xBC") return 1e-6;
  if (p == "m") return 1e-3;
  if (p == "c") return 1e-2;
  if (p == "k") return 1e3;
  if (p == "M") return 1e6;
  if (p == "G") return 1e9;
  if (p == "f") return 1e-15;
  return 0.0;
}

double unit_factor(const std::string& unit, Dimension d) {
  struct Base {
    std::string_view symbol;
    double scale;  // base symbol -> internal unit
  };
  static const std::vector<Base> volt{{"V", 1.0}};
  static const std::vector<Base> ohm{{"Ohm", 1.0}, {"ohm", 1.0}, {"\xCE\xA9", 1.0}, {"Ω", 1.0}};
  static const std::vector<Base> sec{{"s", 1.0}};
  static const std::vector<Base> speed{{"m/s", 1e9}};
  static const std::vector<Base> length{{"m", 1e9}};
  const std::vector<Base>* bases = nullptr;
  switch (d) {
    case Dimension::kVoltage: bases = &volt; break;
    case Dimension::kResistance: bases = &ohm; break;
    case Dimension::kTime: bases = &sec; break;
    case Dimension::kSpeed: bases = &speed; break;
    case Dimension::kLength: bases = &length; break;
    case Dimension::kNone: return 0.0;
  }
  for (const Base& b : *bases) {
    if (unit.size() < b.symbol.size() || unit.compare(unit.size() - b.symbol.size(), b.symbol.size(), b.symbol) != 0)
      continue;
    const double f = prefix_factor(std::string_view(unit).substr(0, unit.size() - b.symbol.size()));
    if (f != 0.0) return f * b.scale;
  }
  return 0.0;
}

std::string fmt(double x) {
  char buf[40];
  for (int prec : {15, 16, 17}) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, x);
    if (std::strtod(buf, nullptr) == x) break;
  }
  return buf;
}

}  // namespace

double parse_quantity(std::string_view text, Dimension dimension) {
  auto [value, unit] = number_and_unit(text);
  if (unit.empty()) return value;
  if (dimension == Dimension::kNone) throw ConfigError("unexpected unit '" + unit + "' in '" + std::string(text) + "'");
  const double f = unit_factor(unit, dimension);
  if (f == 0.0) throw ConfigError("unknown unit '" + unit + "' in '" + std::string(text) + "'");
  return value * f;
}

double parse_fraction(std::string_view text) {
  auto [value, unit] = number_and_unit(text);
  if (unit.empty()) return value;
  if (unit == "%") return value / 100.0;
  throw ConfigError("expected a fraction or percentage, got '" + std::string(text) + "'");
}

std::vector<double> parse_fraction_list(std::string_view text) {
  std::vector<double> out;
  for (auto item : split(text, ','))
    if (!item.empty()) out.push_back(parse_fraction(item));
  return out;
}

std::vector<Placement> RunConfig::resolved_placements() const {
  return placements.empty() ? default_placements(std::min(crossbar.rows, crossbar.cols)) : placements;
}

namespace {

struct DeviceKey {
  std::string_view name;
  Dimension dim;
  std::function<double&(MemristorParams&)> field;
};

const std::vector<DeviceKey>& device_keys() {
  static const std::vector<DeviceKey> keys{
      {"v_on", Dimension::kVoltage, [](MemristorParams& p) -> double& { return p.v_on; }},
      {"v_off", Dimension::kVoltage, [](MemristorParams& p) -> double& { return p.v_off; }},
      {"R_on", Dimension::kResistance, [](MemristorParams& p) -> double& { return p.R_on; }},
      {"R_off", Dimension::kResistance, [](MemristorParams& p) -> double& { return p.R_off; }},
      {"k_on", Dimension::kSpeed, [](MemristorParams& p) -> double& { return p.k_on; }},
      {"k_off", Dimension::kSpeed, [](MemristorParams& p) -> double& { return p.k_off; }},
      {"w_on", Dimension::kLength, [](MemristorParams& p) -> double& { return p.w_on; }},
      {"w_off", Dimension::kLength, [](MemristorParams& p) -> double& { return p.w_off; }},
      {"a_on", Dimension::kLength, [](MemristorParams& p) -> double& { return p.a_on; }},
      {"a_off", Dimension::kLength, [](MemristorParams& p) -> double& { return p.a_off; }},
      {"w_c", Dimension::kLength, [](MemristorParams& p) -> double& { return p.w_c; }},
  };
  return keys;
}

int parse_int(std::string_view text) {
  text = trim(text);
  int v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw ConfigError("expected an integer, got '" + std::string(text) + "'");
  return v;
}

std::uint64_t parse_u64(std::string_view text) {
  text = trim(text);
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw ConfigError("expected a non-negative integer, got '" + std::string(text) + "'");
  return v;
}

bool apply_device(MemristorParams& p, std::string_view key, std::string_view value) {
  if (key == "alpha_on") return p.alpha_on = parse_int(value), true;
  if (key == "alpha_off") return p.alpha_off = parse_int(value), true;
  for (const auto& k : device_keys())
    if (k.name == key) {
      k.field(p) = parse_quantity(value, k.dim);
      return true;
    }
  return false;
}

std::vector<double> parse_quantity_list(std::string_view text, Dimension d) {
  auto items = split(text, ',');
  std::string unit;
  if (!items.empty()) unit = number_and_unit(items.back()).second;
  std::vector<double> out;
  for (auto item : items) {
    if (item.empty()) continue;
    std::string s(item);
    if (number_and_unit(item).second.empty() && !unit.empty()) s += " " + unit;
    out.push_back(parse_quantity(s, d));
  }
  return out;
}

Dimension dimension_of(ParamId id) {
  const auto u = param_unit(id);
  if (u == "ohm") return Dimension::kResistance;
  if (u == "V") return Dimension::kVoltage;
  return Dimension::kSpeed;
}

}  // namespace

std::vector<std::string> known_keys() {
  std::vector<std::string> keys;
  for (const auto& k : device_keys()) {
    keys.emplace_back(k.name);
    keys.push_back("P." + std::string(k.name));
    keys.push_back("Q." + std::string(k.name));
  }
  for (const char* k : {"alpha_on", "alpha_off", "V_set", "V_cond", "V_reset", "V_read", "R_G", "timestep",
                        "switch_on", "switch_off", "prior_s_P", "prior_s_Q", "readout_sense", "input_check",
                        "rel_tol", "abs_tol", "max_step", "scheme", "s_il", "s_ih", "s_ol", "s_oh", "family",
                        "levels", "deltas", "size", "rows", "cols", "line_resistance", "cell_switch_on",
                        "cell_switch_off", "sigma", "unselected", "placements", "seed", "jobs"})
    keys.emplace_back(k);
  for (ParamId id : kAllParams) keys.push_back("absolute." + std::string(param_name(id)));
  return keys;
}

void ConfigBuilder::set(const std::string& key, const std::string& value, const std::string& origin) {
  values_[key] = value;
  origins_[key] = origin;
}

void ConfigBuilder::load_text(std::string_view text, const std::string& origin) {
  std::size_t line_no = 0;
  for (auto raw : split(text, '\n')) {
    ++line_no;
    std::string_view line = raw;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError(origin + ":" + std::to_string(line_no) + ": expected 'key = value'");
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (key.empty()) throw ConfigError(origin + ":" + std::to_string(line_no) + ": empty key");
    set(key, value, origin + ":" + std::to_string(line_no));
  }
}

void ConfigBuilder::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  load_text(ss.str(), path);
}

RunConfig ConfigBuilder::build() const {
  RunConfig rc;
  std::vector<std::pair<std::string, std::string>> p_over, q_over;
  std::optional<double> s_il, s_ih, s_ol, s_oh;
  bool rows_set = false, cols_set = false;

  for (const auto& [key, value] : values_) {
    const std::string& where = origins_.at(key);
    try {
      if (key.starts_with("P.")) {
        p_over.emplace_back(key.substr(2), value);
      } else if (key.starts_with("Q.")) {
        q_over.emplace_back(key.substr(2), value);
      } else if (apply_device(rc.nominal, key, value)) {
      } else if (key == "V_set") rc.gate.V_set = parse_quantity(value, Dimension::kVoltage);
      else if (key == "V_cond") rc.gate.V_cond = parse_quantity(value, Dimension::kVoltage);
      else if (key == "V_reset") rc.gate.V_reset = parse_quantity(value, Dimension::kVoltage);
      else if (key == "V_read") rc.gate.V_read = parse_quantity(value, Dimension::kVoltage);
      else if (key == "R_G") rc.gate.R_G = parse_quantity(value, Dimension::kResistance);
      else if (key == "timestep") rc.gate.timestep = parse_quantity(value, Dimension::kTime);
      else if (key == "switch_on") rc.gate.switch_on_resistance = parse_quantity(value, Dimension::kResistance);
      else if (key == "switch_off") rc.gate.switch_off_resistance = parse_quantity(value, Dimension::kResistance);
      else if (key == "prior_s_P") rc.gate.prior_s_P = parse_quantity(value, Dimension::kNone);
      else if (key == "prior_s_Q") rc.gate.prior_s_Q = parse_quantity(value, Dimension::kNone);
      else if (key == "readout_sense") {
        if (value == "shorted") rc.gate.readout_sense = ReadoutSense::kShortedGround;
        else if (value == "compensated") rc.gate.readout_sense = ReadoutSense::kSeriesCompensated;
        else throw ConfigError("readout_sense must be 'shorted' or 'compensated'");
      } else if (key == "input_check") {
        if (value == "not-flipped") rc.gate.input_check = InputCheck::kNotFlipped;
        else if (value == "strict") rc.gate.input_check = InputCheck::kStrictValid;
        else if (value == "none") rc.gate.input_check = InputCheck::kNone;
        else throw ConfigError("input_check must be 'not-flipped', 'strict' or 'none'");
      } else if (key == "rel_tol") rc.gate.integrator.rel_tol = parse_quantity(value, Dimension::kNone);
      else if (key == "abs_tol") rc.gate.integrator.abs_tol = parse_quantity(value, Dimension::kLength);
      else if (key == "max_step") rc.gate.integrator.max_step = parse_quantity(value, Dimension::kTime);
      else if (key == "scheme") rc.scheme = value == "custom" ? rc.scheme : preset(value);
      else if (key == "s_il") s_il = parse_quantity(value, Dimension::kNone);
      else if (key == "s_ih") s_ih = parse_quantity(value, Dimension::kNone);
      else if (key == "s_ol") s_ol = parse_quantity(value, Dimension::kNone);
      else if (key == "s_oh") s_oh = parse_quantity(value, Dimension::kNone);
      else if (key == "family") rc.sweep.family = parse_family(value);
      else if (key == "levels") rc.sweep.levels = parse_fraction_list(value);
      else if (key == "deltas") rc.deltas = parse_fraction_list(value);
      else if (key == "size") {
        rc.crossbar.rows = rc.crossbar.cols = static_cast<std::size_t>(parse_u64(value));
      } else if (key == "rows") {
        rc.crossbar.rows = static_cast<std::size_t>(parse_u64(value));
        rows_set = true;
      } else if (key == "cols") {
        rc.crossbar.cols = static_cast<std::size_t>(parse_u64(value));
        cols_set = true;
      } else if (key == "line_resistance") rc.crossbar.line_resistance = parse_quantity(value, Dimension::kResistance);
      else if (key == "cell_switch_on") rc.crossbar.switch_on = parse_quantity(value, Dimension::kResistance);
      else if (key == "cell_switch_off") rc.crossbar.switch_off = parse_quantity(value, Dimension::kResistance);
      else if (key == "sigma") rc.crossbar.sigma = parse_quantity(value, Dimension::kNone);
      else if (key == "unselected") rc.crossbar.unselected = parse_unselected(value);
      else if (key == "placements") rc.placements = parse_placements(value);
      else if (key == "seed") rc.seed = parse_u64(value);
      else if (key == "jobs") rc.jobs = static_cast<unsigned>(parse_u64(value));
      else if (key.starts_with("absolute.")) {
        const ParamId id = parse_param(key.substr(9));
        rc.sweep.absolute[id] = parse_quantity_list(value, dimension_of(id));
      } else {
        throw ConfigError("unknown key");
      }
    } catch (const ConfigError& e) {
      throw ConfigError(where + ": " + key + ": " + e.what());
    }
  }
  (void)rows_set;
  (void)cols_set;

  rc.p = rc.nominal;
  rc.q = rc.nominal;
  for (auto& [over, dev] : {std::pair{&p_over, &rc.p}, std::pair{&q_over, &rc.q}})
    for (const auto& [k, v] : *over) {
      if (!apply_device(*dev, k, v))
        throw ConfigError((dev == &rc.p ? "P." : "Q.") + k + ": unknown device key");
    }
  if (s_il || s_ih || s_ol || s_oh) {
    rc.scheme = custom_scheme(s_il.value_or(rc.scheme.s_il), s_ih.value_or(rc.scheme.s_ih),
                              s_ol.value_or(rc.scheme.s_ol), s_oh.value_or(rc.scheme.s_oh));
  }
  rc.sweep.scheme = rc.scheme.name;

  rc.nominal.validate();
  rc.p.validate();
  rc.q.validate();
  rc.scheme.validate();
  rc.gate.validate(rc.p, rc.q);
  rc.sweep.validate();
  rc.crossbar.gate = rc.gate;
  rc.crossbar.nominal = rc.nominal;
  if (rc.crossbar.rows < 2 || rc.crossbar.cols < 2) throw ConfigError("crossbar needs at least 2x2 cells");
  rc.crossbar.placement = rc.resolved_placements().front();
  for (const auto& pl : rc.resolved_placements()) {
    CrossbarConfig c = rc.crossbar;
    c.placement = pl;
    c.validate();
  }
  return rc;
}

std::string snapshot(const RunConfig& rc) {
  std::ostringstream os;
  auto device = [&](const std::string& prefix, const MemristorParams& p, const MemristorParams* base) {
    const std::array<std::pair<std::string_view, std::string_view>, 11> units{{{"v_on", "V"},
                                                                                {"v_off", "V"},
                                                                                {"R_on", "Ohm"},
                                                                                {"R_off", "Ohm"},
                                                                                {"k_on", "nm/s"},
                                                                                {"k_off", "nm/s"},
                                                                                {"w_on", "nm"},
                                                                                {"w_off", "nm"},
                                                                                {"a_on", "nm"},
                                                                                {"a_off", "nm"},
                                                                                {"w_c", "nm"}}};
    MemristorParams copy = p;
    MemristorParams ref = base ? *base : MemristorParams{};
    for (std::size_t i = 0; i < units.size(); ++i) {
      const double v = device_keys()[i].field(copy);
      if (base && v == device_keys()[i].field(ref)) continue;
      os << prefix << units[i].first << " = " << fmt(v) << ' ' << units[i].second << '\n';
    }
    if (!base || p.alpha_on != base->alpha_on) os << prefix << "alpha_on = " << p.alpha_on << '\n';
    if (!base || p.alpha_off != base->alpha_off) os << prefix << "alpha_off = " << p.alpha_off << '\n';
  };
  os << "# device\n";
  device("", rc.nominal, nullptr);
  device("P.", rc.p, &rc.nominal);
  device("Q.", rc.q, &rc.nominal);
  const GateConfig& g = rc.gate;
  os << "# gate\n";
  os << "V_set = " << fmt(g.V_set) << " V\n";
  os << "V_cond = " << fmt(g.V_cond) << " V\n";
  os << "V_reset = " << fmt(g.V_reset) << " V\n";
  os << "V_read = " << fmt(g.V_read) << " V\n";
  os << "R_G = " << fmt(g.R_G) << " Ohm\n";
  os << "timestep = " << fmt(g.timestep) << " s\n";
  os << "switch_on = " << fmt(g.switch_on_resistance) << " Ohm\n";
  os << "switch_off = " << fmt(g.switch_off_resistance) << " Ohm\n";
  os << "prior_s_P = " << fmt(g.prior_s_P) << '\n';
  os << "prior_s_Q = " << fmt(g.prior_s_Q) << '\n';
  os << "readout_sense = " << (g.readout_sense == ReadoutSense::kShortedGround ? "shorted" : "compensated") << '\n';
  os << "input_check = "
     << (g.input_check == InputCheck::kNotFlipped ? "not-flipped"
         : g.input_check == InputCheck::kStrictValid ? "strict"
                                                     : "none")
     << '\n';
  os << "rel_tol = " << fmt(g.integrator.rel_tol) << '\n';
  os << "abs_tol = " << fmt(g.integrator.abs_tol) << " nm\n";
  os << "max_step = " << fmt(g.integrator.max_step) << " s\n";
  os << "# thresholds\n";
  if (rc.scheme.name == "custom") {
    os << "s_il = " << fmt(rc.scheme.s_il) << "\ns_ih = " << fmt(rc.scheme.s_ih) << "\ns_ol = "
       << fmt(rc.scheme.s_ol) << "\ns_oh = " << fmt(rc.scheme.s_oh) << '\n';
  } else {
    os << "scheme = " << rc.scheme.name << '\n';
  }
  auto list = [&](const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt(v[i]);
    return s;
  };
  os << "# sweep\n";
  os << "family = " << family_name(rc.sweep.family) << '\n';
  os << "levels = " << list(rc.sweep.levels) << '\n';
  os << "deltas = " << list(rc.deltas) << '\n';
  for (const auto& [id, vals] : rc.sweep.absolute)
    os << "absolute." << param_name(id) << " = " << list(vals) << ' '
       << (param_unit(id) == "ohm" ? "Ohm" : param_unit(id)) << '\n';
  os << "# crossbar\n";
  os << "rows = " << rc.crossbar.rows << "\ncols = " << rc.crossbar.cols << '\n';
  os << "line_resistance = " << fmt(rc.crossbar.line_resistance) << " Ohm\n";
  os << "cell_switch_on = " << fmt(rc.crossbar.switch_on) << " Ohm\n";
  os << "cell_switch_off = " << fmt(rc.crossbar.switch_off) << " Ohm\n";
  os << "sigma = " << fmt(rc.crossbar.sigma) << '\n';
  os << "unselected = " << to_string(rc.crossbar.unselected) << '\n';
  if (!rc.placements.empty()) {
    os << "placements = ";
    for (std::size_t i = 0; i < rc.placements.size(); ++i) {
      const auto& pl = rc.placements[i];
      os << (i ? ";" : "") << pl.p.bit << ',' << pl.p.word << ':' << pl.q.bit << ',' << pl.q.word;
    }
    os << '\n';
  }
  os << "# run\n";
  os << "seed = " << rc.seed << '\n';
  return os.str();
}

}  // namespace imply
