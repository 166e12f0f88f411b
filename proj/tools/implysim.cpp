// implysim: command-line front end for the IMPLY gate and crossbar simulators.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "imply/config.hpp"
#include "imply/constraints.hpp"
#include "imply/crossbar.hpp"
#include "imply/error.hpp"
#include "imply/manifest.hpp"
#include "imply/svg.hpp"
#include "imply/sweep.hpp"
#include "json.hpp"

using namespace imply;

namespace {

struct Common {
  std::vector<std::string> config_files;
  std::vector<std::string> sets;
  std::string scheme;
  std::string out = "out";
  std::string jobs;
  std::string seed;
};

struct Options {
  Common common;
  // sweeps
  std::string family;
  std::string levels;
  std::string deltas;
  // crossbar
  std::string size;
  std::string placements;
  std::string sigma;
  std::string unselected;
  // constraints / plot
  std::vector<std::string> areas;
  std::size_t samples = 81;
  // calibrate
  std::optional<double> drive;
  bool quiet = false;
};

// Loaded instead of the config files when replaying a manifest.
const std::string* g_snapshot = nullptr;

RunConfig resolve(const Options& o) {
  ConfigBuilder b;
  if (g_snapshot) {
    b.load_text(*g_snapshot, "<manifest>");
  } else {
    for (const auto& f : o.common.config_files) b.load_file(f);
  }
  for (const auto& s : o.common.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + s + "'");
    b.set(s.substr(0, eq), s.substr(eq + 1));
  }
  auto flag = [&](const char* key, const std::string& v) {
    if (!v.empty()) b.set(key, v, std::string("--") + key);
  };
  flag("scheme", o.common.scheme);
  flag("jobs", o.common.jobs);
  flag("seed", o.common.seed);
  flag("family", o.family);
  flag("levels", o.levels);
  flag("deltas", o.deltas);
  flag("size", o.size);
  flag("placements", o.placements);
  flag("sigma", o.sigma);
  flag("unselected", o.unselected);
  return b.build();
}

std::string pct(double delta) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", std::round(std::abs(delta) * 1000.0) / 10.0);
  return buf;
}

void progress_line(const char* what, std::size_t done, std::size_t total, bool quiet) {
  if (quiet) return;
  if (done == total || done % 20 == 0) std::fprintf(stderr, "\r%s %zu/%zu", what, done, total);
  if (done == total) std::fprintf(stderr, "\n");
}

// ---------------------------------------------------------------- constraints

std::pair<ParamId, ParamId> parse_area(const std::string& spec) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos) throw ConfigError("--area expects X:Y, got '" + spec + "'");
  return {parse_param(spec.substr(0, colon)), parse_param(spec.substr(colon + 1))};
}

AreaAxis default_axis(ParamId id, const RunConfig& rc, std::size_t samples) {
  const double nominal = get_param(rc.p, rc.q, id);
  AreaAxis a;
  a.parameter = id;
  a.samples = samples;
  if (param_unit(id) == "V" && nominal < 0) {
    a.min = 1.5 * nominal;
    a.max = 0.35 * nominal;
  } else {
    a.min = 0.4 * nominal;
    a.max = 1.7 * nominal;
  }
  if (a.min > a.max) std::swap(a.min, a.max);
  return a;
}

// Single-parameter variations around nominal, for the result bars.
ResultBar simulate_bar(ParamId id, const RunConfig& rc) {
  std::vector<SweepOutcome> outcomes;
  std::vector<double> levels{0.0};
  for (double d : rc.deltas) {
    levels.push_back(-d);
    levels.push_back(d);
  }
  for (double l : levels) {
    SweepTuple t;
    t.p = rc.p;
    t.q = rc.q;
    const double value = get_param(rc.p, rc.q, id) * (1.0 + l);
    set_param(t.p, t.q, id, value);
    t.settings[0] = {id, value, l, l < 0 ? LevelCode::kMin : l > 0 ? LevelCode::kMax : LevelCode::kNominal};
    outcomes.push_back(run_tuple(t, rc.gate, rc.scheme, rc.nominal));
  }
  ResultBar bar;
  bar.parameter = id;
  for (const auto& o : outcomes) bar.points.emplace_back(o.tuple.settings[0].value, o.correct);
  return bar;
}

void write_areas(const Options& o, const RunConfig& rc, RunManifest& m, bool with_bars) {
  for (const auto& spec : o.areas) {
    auto [xid, yid] = parse_area(spec);
    const AreaAxis x = default_axis(xid, rc, o.samples);
    const AreaAxis y = default_axis(yid, rc, o.samples);
    ConstraintSelection sel;
    sel.dynamic_von_p = {Estimator::kRQ2, Estimator::kRQ3};
    const OperatingArea area = operating_area(x, y, rc.p, rc.q, rc.gate, rc.scheme, sel, rc.nominal);
    std::vector<ResultBar> bars;
    if (with_bars) {
      bars.push_back(simulate_bar(xid, rc));
      bars.push_back(simulate_bar(yid, rc));
    }
    AreaPlotOptions po;
    po.nominal = rc.nominal;
    po.scheme = rc.scheme;
    po.title = std::string(param_name(yid)) + " over " + std::string(param_name(xid)) + " (" + rc.scheme.name + ")";
    const std::string stem = "area_" + std::string(param_name(xid)) + "_" + std::string(param_name(yid));
    write_output(o.common.out, stem + ".svg", render_operating_area(area, bars, po), m);
    write_output(o.common.out, stem + ".json", area_json(area), m);
  }
}

int cmd_constraints(const Options& o, RunManifest& m) {
  const RunConfig rc = resolve(o);
  m.config = snapshot(rc);
  m.seed = rc.seed;
  const ConstraintReport rep = full_report(rc.p, rc.q, rc.gate, rc.scheme, rc.nominal);
  const RgBounds rg = rg_bounds(rc.nominal, rc.gate);
  write_output(o.common.out, "constraints.csv", report_csv(rep), m);
  write_output(o.common.out, "constraints.json", report_json(rep, &rg), m);
  write_areas(o, rc, m, false);
  if (!o.quiet) {
    std::printf("scheme %s\n", rep.scheme.c_str());
    for (const auto& r : rep.records)
      std::printf("  %-18s %-7s %-5s %12.6g %-4s value %12.6g  %s\n", r.id.c_str(),
                  std::string(param_name(r.parameter)).c_str(), std::string(to_string(r.direction)).c_str(),
                  r.bound, std::string(param_unit(r.parameter)).c_str(), r.value,
                  r.satisfied ? "ok" : "VIOLATED");
    std::printf("R_G bounds %.6g .. %.6g ohm (geometric mean %.6g), exact %.6g .. %.6g ohm\n", rg.lower, rg.upper,
                rg.geometric_mean, rg.exact_lower, rg.exact_upper);
  }
  return 0;
}

int cmd_plot(const Options& o, RunManifest& m) {
  const RunConfig rc = resolve(o);
  m.config = snapshot(rc);
  m.seed = rc.seed;
  if (o.areas.empty()) throw ConfigError("plot needs at least one --area X:Y");
  write_areas(o, rc, m, true);
  return 0;
}

// ---------------------------------------------------------------- sweeps

std::vector<VariationSpec> specs_for(const Options& o, const RunConfig& rc) {
  if (!o.levels.empty()) return {rc.sweep};
  std::vector<VariationSpec> out;
  for (double d : rc.deltas) out.push_back(symmetric_spec(rc.sweep.family, d, rc.scheme.name));
  for (auto& s : out) s.absolute = rc.sweep.absolute;
  return out;
}

std::vector<double> deltas_of(const VariationSpec& spec) {
  std::vector<double> out;
  for (double l : spec.levels)
    if (l != 0.0 && std::find(out.begin(), out.end(), std::abs(l)) == out.end()) out.push_back(std::abs(l));
  std::sort(out.begin(), out.end());
  return out;
}

nlohmann::json summary_of(const std::vector<SweepOutcome>& outs, const VariationSpec& spec) {
  return nlohmann::json::parse(summary_json(outs, summarize_failures(outs), spec));
}

int cmd_sweep_gate(const Options& o, RunManifest& m) {
  const RunConfig rc = resolve(o);
  m.config = snapshot(rc);
  m.seed = rc.seed;
  std::vector<SweepOutcome> all;
  nlohmann::json runs = nlohmann::json::array();
  const std::string fam(family_name(rc.sweep.family));
  for (const auto& spec : specs_for(o, rc)) {
    SweepOptions so;
    so.jobs = rc.jobs;
    so.progress = [&](std::size_t d, std::size_t t) { progress_line("tuples", d, t, o.quiet); };
    const auto outs = run_sweep(spec, rc.nominal, rc.gate, so);
    runs.push_back(summary_of(outs, spec));
    for (double d : deltas_of(spec))
      write_output(o.common.out, "four_square_" + fam + "_" + pct(d) + ".svg",
                   render_four_square(outs, d, "family " + fam + ", variation " + pct(d) + "%"), m);
    for (const auto& x : outs) {
      all.push_back(x);
      all.back().tuple.index = all.size() - 1;
    }
  }
  write_output(o.common.out, "outcomes.csv", outcomes_csv(all), m);
  nlohmann::json j;
  j["runs"] = runs;
  const FailureSummary total = summarize_failures(all);
  j["tuples"] = total.total;
  j["failed"] = total.failed;
  write_output(o.common.out, "summary.json", j.dump(2) + "\n", m);
  if (!o.quiet) std::printf("%zu tuples, %zu failed\n", total.total, total.failed);
  return 0;
}

int cmd_sweep_crossbar(const Options& o, RunManifest& m) {
  const RunConfig rc = resolve(o);
  m.config = snapshot(rc);
  m.seed = rc.seed;
  const auto placements = rc.resolved_placements();
  const std::string fam(family_name(rc.sweep.family));

  std::vector<std::vector<SweepOutcome>> per(placements.size());
  std::vector<SweepOutcome> combined;
  nlohmann::json runs = nlohmann::json::array();
  double passive = 0.0;
  for (const auto& spec : specs_for(o, rc)) {
    SweepOptions so;
    so.jobs = rc.jobs;
    so.progress = [&](std::size_t d, std::size_t t) { progress_line("crossbar runs", d, t, o.quiet); };
    const CrossbarSweepResult res = run_crossbar_sweep(spec, rc.crossbar, placements, rc.seed, so);
    passive = std::max(passive, res.max_passive_ds);
    nlohmann::json run = summary_of(res.combined, spec);
    nlohmann::json per_pl = nlohmann::json::object();
    for (std::size_t i = 0; i < placements.size(); ++i) {
      per_pl[placements[i].label()] = summary_of(res.per_placement[i], spec)["failed"];
      for (const auto& x : res.per_placement[i]) {
        per[i].push_back(x);
        per[i].back().tuple.index = per[i].size() - 1;
      }
    }
    run["failed_per_placement"] = per_pl;
    runs.push_back(run);
    for (double d : deltas_of(spec))
      write_output(o.common.out, "four_square_" + fam + "_" + pct(d) + ".svg",
                   render_four_square(res.combined, d, "crossbar worst case, family " + fam + ", " + pct(d) + "%"), m);
    for (const auto& x : res.combined) {
      combined.push_back(x);
      combined.back().tuple.index = combined.size() - 1;
    }
  }
  for (std::size_t i = 0; i < placements.size(); ++i)
    write_output(o.common.out, "outcomes_" + placements[i].label() + ".csv", outcomes_csv(per[i]), m);
  write_output(o.common.out, "outcomes_combined.csv", outcomes_csv(combined), m);

  const auto states = half_gaussian_states(rc.crossbar.rows * rc.crossbar.cols, rc.crossbar.sigma, rc.seed);
  write_output(o.common.out, "initial_states_histogram.csv", histogram_csv(states, 100), m);

  nlohmann::json j;
  j["size"] = {rc.crossbar.rows, rc.crossbar.cols};
  j["line_resistance"] = rc.crossbar.line_resistance;
  j["unselected"] = to_string(rc.crossbar.unselected);
  j["seed"] = rc.seed;
  nlohmann::json pl = nlohmann::json::array();
  for (const auto& p : placements) pl.push_back(p.label());
  j["placements"] = pl;
  j["runs"] = runs;
  const FailureSummary total = summarize_failures(combined);
  j["tuples"] = total.total;
  j["failed_worst_case"] = total.failed;
  j["max_unselected_ds"] = passive;
  write_output(o.common.out, "summary.json", j.dump(2) + "\n", m);
  if (!o.quiet)
    std::printf("%zu tuples x %zu placements, %zu failed (worst case), max unselected |ds| %.3g\n", total.total,
                placements.size(), total.failed, passive);
  return 0;
}

// ---------------------------------------------------------------- calibrate

int cmd_calibrate(const Options& o, RunManifest& m) {
  const RunConfig rc = resolve(o);
  m.config = snapshot(rc);
  m.seed = rc.seed;
  // full set drive: V_set across the device, set polarity
  const double v = o.drive ? *o.drive : -rc.gate.V_set;
  const SwitchingTime st = switching_time(rc.nominal, v, 0.01, 0.99, 1e-3, rc.gate.integrator);
  nlohmann::json j;
  j["device_voltage"] = v;
  j["switched"] = st.switched;
  j["timestep"] = rc.gate.timestep;
  if (st.switched) {
    j["switching_time"] = st.time;
    j["ratio_to_timestep"] = st.time / rc.gate.timestep;
  } else {
    j["switching_time"] = nullptr;
    j["final_s"] = st.final_s;
  }
  write_output(o.common.out, "calibration.json", j.dump(2) + "\n", m);
  if (!o.quiet) {
    if (st.switched)
      std::printf("1%% -> 99%% at %.4g V: %.4g us (timestep %.4g us)\n", v, st.time * 1e6, rc.gate.timestep * 1e6);
    else
      std::printf("no switching at %.4g V (state stays at s = %.4g)\n", v, st.final_s);
  }
  return 0;
}

// ---------------------------------------------------------------- app

void add_common(CLI::App* sub, Options& o, bool areas) {
  sub->add_option("-c,--config", o.common.config_files, "key/value config file(s), later files win");
  sub->add_option("--set", o.common.sets, "override one key, e.g. --set \"v_on=-0.75 V\"");
  sub->add_option("--scheme", o.common.scheme, "threshold scheme: 1/2, 1/3 or ttl");
  sub->add_option("--out", o.common.out, "output directory");
  sub->add_option("--jobs", o.common.jobs, "worker threads (0 = all cores)");
  sub->add_option("--seed", o.common.seed, "random seed");
  sub->add_flag("-q,--quiet", o.quiet, "no progress or summary output");
  if (areas) {
    sub->add_option("--area", o.areas, "operating area X:Y, e.g. v_onQ:R_offP");
    sub->add_option("--samples", o.samples, "grid samples per axis")->check(CLI::Range(2, 2001));
  }
}

void add_sweep(CLI::App* sub, Options& o) {
  sub->add_option("--family", o.family, "r, v or k");
  sub->add_option("--levels", o.levels, "explicit signed levels, e.g. \"-10%,0,10%\"");
  sub->add_option("--deltas", o.deltas, "campaign of {-d,0,+d} grids, e.g. \"10%,20%\"");
}

struct App {
  CLI::App app{"IMPLY gate and crossbar variability simulator", "implysim"};
  Options o;
  std::string manifest_path;
  CLI::App* constraints = nullptr;
  CLI::App* plot = nullptr;
  CLI::App* sweep_gate = nullptr;
  CLI::App* sweep_crossbar = nullptr;
  CLI::App* calibrate = nullptr;
  CLI::App* replay = nullptr;

  App() {
    app.require_subcommand(1);
    constraints = app.add_subcommand("constraints", "evaluate the analytical constraints");
    add_common(constraints, o, true);
    plot = app.add_subcommand("plot", "operating-area plots with simulated result bars");
    add_common(plot, o, true);
    sweep_gate = app.add_subcommand("sweep-gate", "single-gate variation sweep");
    add_common(sweep_gate, o, false);
    add_sweep(sweep_gate, o);
    sweep_crossbar = app.add_subcommand("sweep-crossbar", "crossbar variation sweep over placements");
    add_common(sweep_crossbar, o, false);
    add_sweep(sweep_crossbar, o);
    sweep_crossbar->add_option("--size", o.size, "array size N (N x N)");
    sweep_crossbar->add_option("--placements", o.placements, "\"pb,pw:qb,qw;...\" (default: four standard)");
    sweep_crossbar->add_option("--sigma", o.sigma, "spread of the half-Gaussian initial states");
    sweep_crossbar->add_option("--unselected", o.unselected, "floating or grounded");
    calibrate = app.add_subcommand("calibrate", "1% -> 99% switching time under constant drive");
    add_common(calibrate, o, false);
    calibrate->add_option("--drive", o.drive, "device voltage (default -V_set)");
    replay = app.add_subcommand("replay", "re-run a manifest and compare output digests");
    replay->add_option("manifest", manifest_path, "manifest.json")->required();
    replay->add_option("--out", o.common.out, "output directory for the re-run");
    replay->add_flag("-q,--quiet", o.quiet);
  }

  CLI::App* chosen() const {
    for (CLI::App* s : {constraints, plot, sweep_gate, sweep_crossbar, calibrate, replay})
      if (s->parsed()) return s;
    return nullptr;
  }
};

int dispatch(App& a, RunManifest& m) {
  CLI::App* s = a.chosen();
  if (s == a.constraints) return cmd_constraints(a.o, m);
  if (s == a.plot) return cmd_plot(a.o, m);
  if (s == a.sweep_gate) return cmd_sweep_gate(a.o, m);
  if (s == a.sweep_crossbar) return cmd_sweep_crossbar(a.o, m);
  if (s == a.calibrate) return cmd_calibrate(a.o, m);
  return 2;
}

// Arguments worth recording: everything but --out and config files.
std::vector<std::string> recorded_args(int argc, char** argv) {
  std::vector<std::string> out;
  for (int i = 2; i < argc; ++i) {
    const std::string a = argv[i];
    const bool takes = a == "--out" || a == "-c" || a == "--config";
    if (takes) {
      ++i;
      continue;
    }
    if (a.starts_with("--out=") || a.starts_with("--config=")) continue;
    out.push_back(a);
  }
  return out;
}

int run_replay(const std::string& manifest_path, const std::string& out_dir, bool quiet) {
  std::ifstream in(manifest_path);
  if (!in) throw ConfigError("cannot read manifest '" + manifest_path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  const RunManifest old = RunManifest::from_json(ss.str());

  std::vector<std::string> args{"implysim", old.command};
  for (const auto& a : old.arguments) args.push_back(a);
  args.push_back("--out");
  args.push_back(out_dir);
  args.push_back("-q");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());

  App a;
  a.app.parse(static_cast<int>(argv.size()), argv.data());
  g_snapshot = &old.config;
  RunManifest fresh;
  fresh.command = old.command;
  dispatch(a, fresh);
  g_snapshot = nullptr;

  int mismatches = 0;
  for (const auto& o : old.outputs) {
    std::string got;
    for (const auto& f : fresh.outputs)
      if (f.file == o.file) got = f.sha256;
    const bool same = got == o.sha256;
    if (!same) ++mismatches;
    if (!quiet || !same) std::printf("%s %s\n", same ? "same   " : "DIFFERS", o.file.c_str());
  }
  std::printf("%zu outputs, %d differ\n", old.outputs.size(), mismatches);
  return mismatches == 0 ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  App a;
  try {
    a.app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return a.app.exit(e);
  }
  try {
    if (a.chosen() == a.replay) return run_replay(a.manifest_path, a.o.common.out, a.o.quiet);
    RunManifest m;
    m.command = a.chosen()->get_name();
    m.arguments = recorded_args(argc, argv);
    const int rc = dispatch(a, m);
    std::filesystem::create_directories(a.o.common.out);
    std::ofstream(std::filesystem::path(a.o.common.out) / "manifest.json") << m.to_json();
    return rc;
  } catch (const Error& e) {
    std::fprintf(stderr, "implysim: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "implysim: %s\n", e.what());
    return 1;
  }
}
