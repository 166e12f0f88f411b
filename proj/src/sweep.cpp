#include "imply/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <mutex>
#include <sstream>
#include <thread>

#include "imply/error.hpp"
#include "json.hpp"

namespace imply {

std::string_view to_string(LevelCode code) {
  switch (code) {
    case LevelCode::kMin: return "min";
    case LevelCode::kNominal: return "nominal";
    case LevelCode::kMax: return "max";
  }
  return "?";
}

void VariationSpec::validate() const {
  if (levels.empty()) throw ConfigError("variation spec: no deviation levels");
  if (!std::is_sorted(levels.begin(), levels.end()))
    throw ConfigError("variation spec: levels must be sorted ascending");
  if (std::find(levels.begin(), levels.end(), 0.0) == levels.end())
    throw ConfigError("variation spec: levels must include 0");
  if (levels.front() <= -1.0) throw ConfigError("variation spec: levels must be > -100%");
  const auto members = family_params(family);
  for (const auto& [id, values] : absolute) {
    if (std::find(members.begin(), members.end(), id) == members.end())
      throw ConfigError("variation spec: " + std::string(param_name(id)) + " is not in family " +
                        std::string(family_name(family)));
    if (values.empty()) throw ConfigError("variation spec: empty value list for " + std::string(param_name(id)));
  }
}

VariationSpec symmetric_spec(Family family, double delta, std::string scheme) {
  VariationSpec s;
  s.family = family;
  s.levels = delta == 0.0 ? std::vector<double>{0.0} : std::vector<double>{-std::abs(delta), 0.0, std::abs(delta)};
  s.scheme = std::move(scheme);
  return s;
}

namespace {

LevelCode code_of(double level) {
  if (level < 0.0) return LevelCode::kMin;
  if (level > 0.0) return LevelCode::kMax;
  return LevelCode::kNominal;
}

std::vector<ParamSetting> axis(const VariationSpec& spec, ParamId id, const MemristorParams& nominal) {
  const double nom = get_param(nominal, nominal, id);
  std::vector<ParamSetting> out;
  if (auto it = spec.absolute.find(id); it != spec.absolute.end()) {
    for (double v : it->second) {
      const double level = nom != 0.0 ? v / nom - 1.0 : 0.0;
      out.push_back({id, v, level, code_of(level)});
    }
    return out;
  }
  for (double l : spec.levels) out.push_back({id, nom * (1.0 + l), l, code_of(l)});
  return out;
}

}  // namespace

std::vector<SweepTuple> generate_grid(const VariationSpec& spec, const MemristorParams& nominal) {
  spec.validate();
  const auto ids = family_params(spec.family);
  std::array<std::vector<ParamSetting>, 4> axes;
  for (std::size_t i = 0; i < 4; ++i) axes[i] = axis(spec, ids[i], nominal);

  std::vector<SweepTuple> out;
  out.reserve(axes[0].size() * axes[1].size() * axes[2].size() * axes[3].size());
  for (const auto& a : axes[0])
    for (const auto& b : axes[1])
      for (const auto& c : axes[2])
        for (const auto& d : axes[3]) {
          SweepTuple t;
          t.index = out.size();
          t.settings = {a, b, c, d};
          t.p = nominal;
          t.q = nominal;
          for (const auto& s : t.settings) set_param(t.p, t.q, s.id, s.value);
          out.push_back(t);
        }
  return out;
}

SweepOutcome run_tuple(const SweepTuple& tuple, const GateConfig& config, const ThresholdScheme& scheme,
                       const MemristorParams& reference) {
  SweepOutcome o;
  o.tuple = tuple;
  try {
    o.result = run_truth_table(tuple.p, tuple.q, config, scheme, reference);
  } catch (const Error& e) {
    o.error = e.what();
    o.correct = false;
    o.stage = FailureStage::kInitialization;
    return o;
  }
  o.correct = o.result.passed;
  for (const auto& c : o.result.cases) {
    if (c.passed) continue;
    if (o.stage == FailureStage::kNone) o.stage = c.stage;
    if (o.error.empty() && !c.error.empty()) o.error = "case " + std::to_string(c.case_id) + ": " + c.error;
  }
  return o;
}

std::vector<SweepOutcome> run_sweep(const VariationSpec& spec, const MemristorParams& nominal,
                                    const GateConfig& config, const SweepOptions& options) {
  const ThresholdScheme scheme = preset(spec.scheme);
  const auto tuples = generate_grid(spec, nominal);
  std::vector<SweepOutcome> out(tuples.size());

  unsigned jobs = options.jobs ? options.jobs : std::max(1u, std::thread::hardware_concurrency());
  jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, std::max<std::size_t>(1, tuples.size())));

  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> done{0};
  std::mutex progress_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < tuples.size(); i = next++) {
      out[i] = run_tuple(tuples[i], config, scheme, nominal);
      const std::size_t d = ++done;
      if (options.progress) {
        std::lock_guard lock(progress_mutex);
        options.progress(d, tuples.size());
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
  return out;
}

std::vector<const LevelStat*> FailureSummary::always_failing() const {
  std::vector<const LevelStat*> out;
  for (const auto& l : levels)
    if (l.always_fails) out.push_back(&l);
  return out;
}

const LevelStat* FailureSummary::find(ParamId parameter, double level) const {
  for (const auto& l : levels)
    if (l.parameter == parameter && std::abs(l.level - level) < 1e-12) return &l;
  return nullptr;
}

FailureSummary summarize_failures(const std::vector<SweepOutcome>& outcomes) {
  FailureSummary s;
  s.total = outcomes.size();
  for (const auto& o : outcomes)
    if (!o.correct) ++s.failed;

  for (const auto& o : outcomes) {
    for (const auto& st : o.tuple.settings) {
      LevelStat* hit = nullptr;
      for (auto& l : s.levels)
        if (l.parameter == st.id && std::abs(l.level - st.level) < 1e-12) hit = &l;
      if (!hit) {
        s.levels.push_back({st.id, st.level, st.code, 0, 0, 0.0, 0.0, false});
        hit = &s.levels.back();
      }
      ++hit->tuples;
      if (!o.correct) ++hit->failed;
    }
  }
  std::stable_sort(s.levels.begin(), s.levels.end(), [](const LevelStat& a, const LevelStat& b) {
    if (a.parameter != b.parameter) return a.parameter < b.parameter;
    return a.level < b.level;
  });
  for (auto& l : s.levels) {
    l.share = s.failed ? static_cast<double>(l.failed) / static_cast<double>(s.failed) : 0.0;
    l.rate = l.tuples ? static_cast<double>(l.failed) / static_cast<double>(l.tuples) : 0.0;
    l.always_fails = l.tuples > 0 && l.failed == l.tuples;
  }
  return s;
}

namespace {

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  return buf;
}

}  // namespace

std::string outcomes_csv(const std::vector<SweepOutcome>& outcomes) {
  std::ostringstream os;
  os << "index";
  if (!outcomes.empty())
    for (const auto& s : outcomes.front().tuple.settings) {
      const std::string n(param_name(s.id));
      os << ',' << n << ',' << n << "_level," << n << "_code";
    }
  os << ",case1,case2,case3,case4,sQ1,sQ2,sQ3,sQ4,sP1,sP2,sP3,sP4,verdict,stage,error\n";
  for (const auto& o : outcomes) {
    os << o.tuple.index;
    for (const auto& s : o.tuple.settings) os << ',' << num(s.value) << ',' << num(s.level) << ',' << to_string(s.code);
    for (const auto& c : o.result.cases) os << ',' << (c.passed ? "ok" : "fail");
    for (const auto& c : o.result.cases) os << ',' << num(c.final_s_Q);
    for (const auto& c : o.result.cases) os << ',' << num(c.final_s_P);
    std::string err = o.error;
    std::replace(err.begin(), err.end(), '"', '\'');
    os << ',' << (o.correct ? "correct" : "failed") << ',' << to_string(o.stage) << ",\"" << err << "\"\n";
  }
  return os.str();
}

std::string summary_json(const std::vector<SweepOutcome>& outcomes, const FailureSummary& summary,
                         const VariationSpec& spec) {
  nlohmann::json j;
  j["family"] = family_name(spec.family);
  j["scheme"] = spec.scheme;
  j["levels"] = spec.levels;
  j["tuples"] = summary.total;
  j["failed"] = summary.failed;
  j["correct"] = summary.total - summary.failed;
  nlohmann::json lv = nlohmann::json::array();
  for (const auto& l : summary.levels)
    lv.push_back({{"parameter", param_name(l.parameter)},
                  {"level", l.level},
                  {"code", to_string(l.code)},
                  {"tuples", l.tuples},
                  {"failed", l.failed},
                  {"share", l.share},
                  {"rate", l.rate},
                  {"always_fails", l.always_fails}});
  j["levels_summary"] = lv;
  nlohmann::json flags = nlohmann::json::array();
  for (const auto* l : summary.always_failing())
    flags.push_back(std::string(param_name(l->parameter)) + "@" + num(l->level));
  j["always_failing"] = flags;
  std::size_t init = 0, op = 0;
  for (const auto& o : outcomes) {
    if (o.correct) continue;
    if (o.stage == FailureStage::kInitialization) ++init;
    else if (o.stage == FailureStage::kOperation) ++op;
  }
  j["failure_stages"] = {{"initialization", init}, {"operation", op}};
  return j.dump(2);
}

}  // namespace imply
