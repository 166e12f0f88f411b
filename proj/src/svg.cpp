#include "imply/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "imply/error.hpp"

namespace imply {
namespace {

std::string f(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", x);
  return buf;
}

std::string g(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", x);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

const char* kGreen = "#2e9e44";
const char* kRed = "#d62728";
const char* kOrange = "#ff9f1c";

bool matches_delta(const SweepOutcome& o, double delta) {
  for (const auto& s : o.tuple.settings)
    if (s.level != 0.0 && std::abs(std::abs(s.level) - std::abs(delta)) > 1e-9) return false;
  return true;
}

}  // namespace

std::string render_four_square(const std::vector<SweepOutcome>& outcomes, double delta, const std::string& title) {
  std::vector<const SweepOutcome*> shown;
  for (const auto& o : outcomes)
    if (matches_delta(o, delta)) shown.push_back(&o);

  const double sq = 10, gap = 2, pair_gap = 5, cell_pad = 6;
  const double cell_w = 4 * sq + 2 * gap + pair_gap + 2 * cell_pad;
  const double cell_h = sq + 2 * cell_pad;
  const std::size_t cols = 9;
  const std::size_t rows = (shown.size() + cols - 1) / cols;
  const double top = 40;
  const double width = cols * cell_w + 20;
  const double height = top + rows * cell_h + 40;

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << f(width) << "\" height=\"" << f(height)
     << "\" viewBox=\"0 0 " << f(width) << ' ' << f(height) << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  std::string heading = title.empty() ? "variation " + g(delta * 100) + "%" : title;
  os << "<text x=\"10\" y=\"20\" font-family=\"sans-serif\" font-size=\"14\">" << escape(heading) << "</text>\n";
  if (!shown.empty()) {
    os << "<text x=\"10\" y=\"34\" font-family=\"sans-serif\" font-size=\"10\">";
    for (std::size_t i = 0; i < 4; ++i) os << (i ? " | " : "") << param_name(shown.front()->tuple.settings[i].id);
    os << "</text>\n";
  }
  for (std::size_t k = 0; k < shown.size(); ++k) {
    const SweepOutcome& o = *shown[k];
    const double x0 = 10 + (k % cols) * cell_w;
    const double y0 = top + (k / cols) * cell_h;
    const char* outline = o.correct ? kGreen : kRed;
    os << "<g data-index=\"" << o.tuple.index << "\" data-verdict=\"" << (o.correct ? "correct" : "failed")
       << "\">\n";
    for (std::size_t i = 0; i < 4; ++i) {
      const double x = x0 + cell_pad + i * (sq + gap) + (i >= 2 ? pair_gap : 0);
      const double y = y0 + cell_pad;
      const LevelCode c = o.tuple.settings[i].code;
      if (c == LevelCode::kMax)
        os << "<rect x=\"" << f(x) << "\" y=\"" << f(y) << "\" width=\"" << f(sq) << "\" height=\"" << f(sq)
           << "\" fill=\"#444\"/>\n";
      else if (c == LevelCode::kNominal)
        os << "<rect x=\"" << f(x) << "\" y=\"" << f(y + sq / 2) << "\" width=\"" << f(sq) << "\" height=\""
           << f(sq / 2) << "\" fill=\"#444\"/>\n";
      os << "<rect x=\"" << f(x) << "\" y=\"" << f(y) << "\" width=\"" << f(sq) << "\" height=\"" << f(sq)
         << "\" fill=\"none\" stroke=\"" << outline << "\" stroke-width=\"1.5\"/>\n";
    }
    os << "</g>\n";
  }
  os << "</svg>\n";
  return os.str();
}

ResultBar bar_from_outcomes(const std::vector<SweepOutcome>& outcomes, ParamId parameter) {
  std::map<double, std::pair<bool, bool>> isolated;  // value -> (seen, all correct)
  std::map<double, bool> any;
  for (const auto& o : outcomes) {
    const ParamSetting* mine = nullptr;
    bool others_nominal = true;
    for (const auto& s : o.tuple.settings) {
      if (s.id == parameter) mine = &s;
      else if (s.level != 0.0) others_nominal = false;
    }
    if (!mine) continue;
    auto [it, fresh] = any.try_emplace(mine->value, o.correct);
    if (!fresh) it->second = it->second && o.correct;
    if (others_nominal) {
      auto [jt, fresh2] = isolated.try_emplace(mine->value, std::pair{true, o.correct});
      if (!fresh2) jt->second.second = jt->second.second && o.correct;
    }
  }
  ResultBar bar;
  bar.parameter = parameter;
  if (!isolated.empty())
    for (auto& [v, r] : isolated) bar.points.emplace_back(v, r.second);
  else
    for (auto& [v, ok] : any) bar.points.emplace_back(v, ok);
  return bar;
}

std::vector<BarSegment> bar_segments(const ResultBar& bar) {
  auto pts = bar.points;
  std::sort(pts.begin(), pts.end());
  std::vector<BarSegment> out;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const BarColour c = pts[i].second ? BarColour::kGreen : BarColour::kRed;
    out.push_back({pts[i].first, pts[i].first, c});
    if (i + 1 < pts.size()) {
      const BarColour next = pts[i + 1].second ? BarColour::kGreen : BarColour::kRed;
      out.push_back({pts[i].first, pts[i + 1].first, c == next ? c : BarColour::kOrange});
    }
  }
  return out;
}

std::string render_operating_area(const OperatingArea& area, const std::vector<ResultBar>& bars,
                                  const AreaPlotOptions& opt) {
  for (const auto& b : bars)
    if (b.parameter != area.x.parameter && b.parameter != area.y.parameter)
      throw ConfigError("operating area plot: bar parameter " + std::string(param_name(b.parameter)) +
                        " matches neither axis");

  const double W = 520, H = 420, L = 80, T = 40, PW = 380, PH = 300;
  const double xmin = area.xs.front(), xmax = area.xs.back();
  const double ymin = area.ys.front(), ymax = area.ys.back();
  auto X = [&](double v) { return L + (v - xmin) / (xmax - xmin) * PW; };
  auto Y = [&](double v) { return T + PH - (v - ymin) / (ymax - ymin) * PH; };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 "
     << W << ' ' << H << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!opt.title.empty())
    os << "<text x=\"" << L << "\" y=\"22\" font-family=\"sans-serif\" font-size=\"13\">" << escape(opt.title)
       << "</text>\n";

  // admissible cells
  const std::size_t nx = area.xs.size(), ny = area.ys.size();
  const double dx = PW / static_cast<double>(nx - 1), dy = PH / static_cast<double>(ny - 1);
  os << "<g id=\"region\" stroke=\"none\">\n";
  for (std::size_t iy = 0; iy < ny; ++iy)
    for (std::size_t ix = 0; ix < nx; ++ix) {
      const std::size_t k = area.index(ix, iy);
      const char* fill = !area.physical[k] ? "#bbbbbb" : area.mask[k] ? "#cfe8d4" : nullptr;
      if (!fill) continue;
      os << "<rect x=\"" << f(X(area.xs[ix]) - dx / 2) << "\" y=\"" << f(Y(area.ys[iy]) - dy / 2) << "\" width=\""
         << f(dx) << "\" height=\"" << f(dy) << "\" fill=\"" << fill << "\"/>\n";
    }
  os << "</g>\n";

  os << "<defs><clipPath id=\"plot\"><rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << PW << "\" height=\""
     << PH << "\"/></clipPath></defs>\n";

  // constraint curves
  static const char* palette[] = {"#1f77b4", "#9467bd", "#8c564b", "#e377c2", "#17becf",
                                  "#bcbd22", "#7f7f7f", "#ff7f0e", "#2ca02c", "#d62728"};
  std::map<std::string, std::size_t> colour_of;
  for (std::size_t i = 0; i < area.constraint_ids.size(); ++i) colour_of[area.constraint_ids[i]] = i;
  os << "<g id=\"constraints\" fill=\"none\" stroke-width=\"1.5\" clip-path=\"url(#plot)\">\n";
  for (const auto& line : area.boundaries) {
    if (line.points.size() < 2) continue;
    os << "<polyline data-constraint=\"" << escape(line.constraint_id) << "\" stroke=\""
       << palette[colour_of[line.constraint_id] % 10] << "\" points=\"";
    for (auto [px, py] : line.points) os << f(X(px)) << ',' << f(Y(py)) << ' ';
    os << "\"/>\n";
  }
  os << "</g>\n";

  // nominal and threshold lines
  const double nx_val = get_param(opt.nominal, opt.nominal, area.x.parameter);
  const double ny_val = get_param(opt.nominal, opt.nominal, area.y.parameter);
  os << "<g id=\"nominal\" stroke=\"#333\" stroke-dasharray=\"5,4\">\n";
  if (nx_val >= xmin && nx_val <= xmax)
    os << "<line x1=\"" << f(X(nx_val)) << "\" y1=\"" << T << "\" x2=\"" << f(X(nx_val)) << "\" y2=\"" << T + PH
       << "\"/>\n";
  if (ny_val >= ymin && ny_val <= ymax)
    os << "<line x1=\"" << L << "\" y1=\"" << f(Y(ny_val)) << "\" x2=\"" << L + PW << "\" y2=\"" << f(Y(ny_val))
       << "\"/>\n";
  os << "</g>\n";
  os << "<g id=\"thresholds\" stroke=\"#999\" stroke-dasharray=\"2,3\">\n";
  auto is_resistance = [](ParamId id) { return param_unit(id) == "ohm"; };
  for (ThresholdLevel lvl : {ThresholdLevel::kIL, ThresholdLevel::kIH}) {
    const double r = resistance_threshold(opt.scheme, lvl, opt.nominal);
    if (is_resistance(area.x.parameter) && r >= xmin && r <= xmax)
      os << "<line data-level=\"" << to_string(lvl) << "\" x1=\"" << f(X(r)) << "\" y1=\"" << T << "\" x2=\""
         << f(X(r)) << "\" y2=\"" << T + PH << "\"/>\n";
    if (is_resistance(area.y.parameter) && r >= ymin && r <= ymax)
      os << "<line data-level=\"" << to_string(lvl) << "\" x1=\"" << L << "\" y1=\"" << f(Y(r)) << "\" x2=\""
         << L + PW << "\" y2=\"" << f(Y(r)) << "\"/>\n";
  }
  os << "</g>\n";

  // result bars: x bar below the plot, y bar left of it
  os << "<g id=\"bars\" stroke-width=\"6\" stroke-linecap=\"butt\">\n";
  for (const auto& b : bars) {
    const bool on_x = b.parameter == area.x.parameter;
    for (const auto& s : bar_segments(b)) {
      const char* col = s.colour == BarColour::kGreen ? kGreen : s.colour == BarColour::kRed ? kRed : kOrange;
      double a = s.from, z = s.to;
      if (a == z) {  // a simulated point: small tick
        const double half = 0.005 * (on_x ? (xmax - xmin) : (ymax - ymin));
        a -= half;
        z += half;
      }
      if (on_x) {
        const double lo = std::clamp(a, xmin, xmax), hi = std::clamp(z, xmin, xmax);
        if (hi <= lo) continue;
        os << "<line data-colour=\"" << (col == kGreen ? "green" : col == kRed ? "red" : "orange")
           << "\" stroke=\"" << col << "\" x1=\"" << f(X(lo)) << "\" y1=\"" << T + PH + 8 << "\" x2=\""
           << f(X(hi)) << "\" y2=\"" << T + PH + 8 << "\"/>\n";
      } else {
        const double lo = std::clamp(a, ymin, ymax), hi = std::clamp(z, ymin, ymax);
        if (hi <= lo) continue;
        os << "<line data-colour=\"" << (col == kGreen ? "green" : col == kRed ? "red" : "orange")
           << "\" stroke=\"" << col << "\" x1=\"" << L - 8 << "\" y1=\"" << f(Y(lo)) << "\" x2=\"" << L - 8
           << "\" y2=\"" << f(Y(hi)) << "\"/>\n";
      }
    }
  }
  os << "</g>\n";

  // frame and labels
  os << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << PW << "\" height=\"" << PH
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  os << "<g font-family=\"sans-serif\" font-size=\"10\">\n";
  for (int i = 0; i <= 4; ++i) {
    const double vx = xmin + (xmax - xmin) * i / 4.0, vy = ymin + (ymax - ymin) * i / 4.0;
    os << "<text x=\"" << f(X(vx)) << "\" y=\"" << T + PH + 24 << "\" text-anchor=\"middle\">" << g(vx)
       << "</text>\n";
    os << "<text x=\"" << L - 14 << "\" y=\"" << f(Y(vy) + 3) << "\" text-anchor=\"end\">" << g(vy) << "</text>\n";
  }
  os << "<text x=\"" << L + PW / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\" font-size=\"12\">"
     << param_name(area.x.parameter) << " [" << param_unit(area.x.parameter) << "]</text>\n";
  os << "<text transform=\"translate(14," << T + PH / 2 << ") rotate(-90)\" text-anchor=\"middle\" "
     << "font-size=\"12\">" << param_name(area.y.parameter) << " [" << param_unit(area.y.parameter)
     << "]</text>\n";
  os << "</g>\n</svg>\n";
  return os.str();
}

}  // namespace imply
