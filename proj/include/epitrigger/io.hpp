#pragma once

// Flat dotted-key configuration documents and long-format delimited results.
//
// Config syntax: one `key = value` per line, `#` starts a comment. Every key
// not given takes the documented default and is reported as defaulted.

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <functional>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"
#include "scenario.hpp"
#include "surveillance.hpp"
#include "sweep.hpp"

namespace epitrigger {

enum class TriggerKind { prevalence, effort, none };

inline std::string_view to_string(TriggerKind k) {
  switch (k) {
    case TriggerKind::prevalence: return "prevalence";
    case TriggerKind::effort: return "effort";
    case TriggerKind::none: return "none";
  }
  return "?";
}

inline std::string_view to_string(ResponseModel m) {
  return m == ResponseModel::single_shot ? "single_shot" : "multiple_shot";
}

struct ConfigDocument {
  ScenarioConfig scenario;  // trigger is rebuilt from the three fields below
  TriggerKind trigger_kind = TriggerKind::prevalence;
  double pstar = 0.025;
  SurveillanceParams surveillance;
  std::vector<ParamAxis> axes;

  // Keys that were filled from defaults. Not part of equality.
  std::set<std::string> defaulted;

  bool operator==(const ConfigDocument& o) const {
    return scenario == o.scenario && trigger_kind == o.trigger_kind && pstar == o.pstar &&
           surveillance == o.surveillance && axes == o.axes;
  }
};

// Shortest text that reads back to the same double.
inline std::string format_exact(double v) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

// Output formatting for result tables: 12 significant digits.
inline std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

struct KeyContext {
  std::string key;
  int line;

  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError("line " + std::to_string(line) + ": " + key + ": " + what);
  }

  double number(std::string_view text) const {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
      fail("expected a number, got '" + std::string(text) + "'");
    }
    return v;
  }

  std::size_t count(std::string_view text) const {
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
      fail("expected a non-negative integer, got '" + std::string(text) + "'");
    }
    return v;
  }

  void check(bool ok, std::string_view constraint) const {
    if (!ok) fail("invariant violated: " + std::string(constraint));
  }
};

using Setter = std::function<void(ConfigDocument&, std::string_view, const KeyContext&)>;

template <class Get>
Setter number_key(Get get, std::function<bool(double)> ok, std::string constraint) {
  return [get, ok, constraint](ConfigDocument& doc, std::string_view text, const KeyContext& ctx) {
    const double v = ctx.number(text);
    ctx.check(ok(v), constraint);
    get(doc) = v;
  };
}

inline std::size_t axis_slot(std::string_view key) { return key.starts_with("sweep.axis1.") ? 0 : 1; }

struct AxisDraft {
  std::optional<Target> target;
  std::optional<double> min, max;
  std::optional<std::size_t> points;
  int line = 0;
};

inline const std::map<std::string, Setter, std::less<>>& key_table() {
  static const std::map<std::string, Setter, std::less<>> table = [] {
    std::map<std::string, Setter, std::less<>> t;
    t["population.n"] = number_key([](ConfigDocument& d) -> double& { return d.scenario.n; },
                                   [](double v) { return v > 0.0; }, "n > 0");
    t["population.i0"] = number_key([](ConfigDocument& d) -> double& { return d.scenario.i0; },
                                    [](double v) { return v > 0.0; }, "i0 > 0");
    t["disease.beta"] = number_key([](ConfigDocument& d) -> double& { return d.scenario.disease.beta; },
                                   [](double v) { return v >= 0.0; }, "beta ≥ 0");
    t["disease.gamma"] = number_key([](ConfigDocument& d) -> double& { return d.scenario.disease.gamma; },
                                    [](double v) { return v > 0.0; }, "gamma > 0");
    t["info.beta_i"] = number_key([](ConfigDocument& d) -> double& { return d.scenario.info.beta_i; },
                                  [](double v) { return v >= 0.0; }, "beta_i ≥ 0");
    t["info.gamma_i"] = number_key([](ConfigDocument& d) -> double& { return d.scenario.info.gamma_i; },
                                   [](double v) { return v > 0.0; }, "gamma_i > 0");
    t["info.epsilon"] = [](ConfigDocument& d, std::string_view text, const KeyContext& ctx) {
      const double v = ctx.number(text);
      ctx.check(v >= 0.0, "epsilon ≥ 0");
      ctx.check(v <= 1.0, "epsilon ≤ 1");
      d.scenario.info.epsilon = v;
    };
    t["intervention.phi"] = [](ConfigDocument& d, std::string_view text, const KeyContext& ctx) {
      const double v = ctx.number(text);
      ctx.check(v >= 0.0, "phi ≥ 0");
      ctx.check(v <= 1.0, "phi ≤ 1");
      d.scenario.intervention.phi = v;
    };
    t["relapse.rho"] = number_key([](ConfigDocument& d) -> double& { return d.scenario.relapse.rho; },
                                  [](double v) { return v >= 0.0; }, "rho ≥ 0");
    t["trigger.kind"] = [](ConfigDocument& d, std::string_view text, const KeyContext& ctx) {
      if (text == "prevalence") {
        d.trigger_kind = TriggerKind::prevalence;
      } else if (text == "effort") {
        d.trigger_kind = TriggerKind::effort;
      } else if (text == "none") {
        d.trigger_kind = TriggerKind::none;
      } else {
        ctx.fail("expected one of prevalence, effort, none; got '" + std::string(text) + "'");
      }
    };
    t["trigger.pstar"] = number_key([](ConfigDocument& d) -> double& { return d.pstar; },
                                    [](double v) { return v > 0.0 && v < 1.0; }, "0 < pstar < 1");
    t["trigger.daily_tests"] = [](ConfigDocument& d, std::string_view text, const KeyContext& ctx) {
      std::vector<double> tests;
      while (true) {
        const auto comma = text.find(',');
        const double v = ctx.number(trim(text.substr(0, comma)));
        ctx.check(v >= 0.0, "daily_tests ≥ 0");
        tests.push_back(v);
        if (comma == std::string_view::npos) break;
        text.remove_prefix(comma + 1);
      }
      d.surveillance.daily_tests = std::move(tests);
    };
    t["trigger.confidence"] = number_key([](ConfigDocument& d) -> double& { return d.surveillance.confidence; },
                                         [](double v) { return v > 0.0 && v < 1.0; }, "0 < confidence < 1");
    t["run.t_max"] = number_key([](ConfigDocument& d) -> double& { return d.scenario.t_max; },
                                [](double v) { return v > 0.0; }, "t_max > 0");
    t["run.dt"] = number_key([](ConfigDocument& d) -> double& { return d.scenario.integrator.dt; },
                             [](double v) { return v > 0.0; }, "dt > 0");
    t["run.event_tolerance"] =
        number_key([](ConfigDocument& d) -> double& { return d.scenario.integrator.event_tolerance; },
                   [](double v) { return v > 0.0; }, "event_tolerance > 0");
    t["run.extinction_threshold"] =
        number_key([](ConfigDocument& d) -> double& { return d.scenario.extinction_threshold; },
                   [](double v) { return v >= 0.0; }, "extinction_threshold ≥ 0");
    t["run.stride"] = [](ConfigDocument& d, std::string_view text, const KeyContext& ctx) {
      const auto v = ctx.count(text);
      ctx.check(v >= 1, "stride ≥ 1");
      d.scenario.integrator.stride = v;
    };
    t["run.method"] = [](ConfigDocument& d, std::string_view text, const KeyContext& ctx) {
      if (text == "rk4") {
        d.scenario.integrator.method = Method::rk4;
      } else if (text == "euler") {
        d.scenario.integrator.method = Method::euler;
      } else {
        ctx.fail("expected rk4 or euler, got '" + std::string(text) + "'");
      }
    };
    t["run.response_model"] = [](ConfigDocument& d, std::string_view text, const KeyContext& ctx) {
      if (text == "multiple_shot") {
        d.scenario.response_model = ResponseModel::multiple_shot;
      } else if (text == "single_shot") {
        d.scenario.response_model = ResponseModel::single_shot;
      } else {
        ctx.fail("expected multiple_shot or single_shot, got '" + std::string(text) + "'");
      }
    };
    return t;
  }();
  return table;
}

inline void set_trigger(ConfigDocument& doc) {
  switch (doc.trigger_kind) {
    case TriggerKind::prevalence: doc.scenario.trigger = TriggerSpec{PrevalenceThreshold{doc.pstar}}; break;
    case TriggerKind::effort: doc.scenario.trigger = TriggerSpec{SurveillanceEffort{doc.surveillance}}; break;
    case TriggerKind::none: doc.scenario.trigger.reset(); break;
  }
}

}  // namespace detail

// Every key a document may carry, in canonical order.
inline const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys{
      "population.n",     "population.i0",      "disease.beta",      "disease.gamma",
      "info.beta_i",      "info.gamma_i",       "info.epsilon",      "intervention.phi",
      "relapse.rho",      "trigger.kind",       "trigger.pstar",     "trigger.daily_tests",
      "trigger.confidence", "run.t_max",        "run.dt",            "run.method",
      "run.event_tolerance", "run.extinction_threshold", "run.stride", "run.response_model",
  };
  return keys;
}

inline ConfigDocument parse_config(std::string_view text) {
  ConfigDocument doc;
  std::map<std::string, int> seen;
  detail::AxisDraft drafts[2];

  int line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);

    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string key(detail::trim(line.substr(0, eq)));
    const std::string_view value = detail::trim(line.substr(eq + 1));
    const detail::KeyContext ctx{key, line_no};
    if (value.empty()) ctx.fail("missing value");
    if (!seen.emplace(key, line_no).second) ctx.fail("duplicate key");

    if (key.starts_with("sweep.axis1.") || key.starts_with("sweep.axis2.")) {
      auto& draft = drafts[detail::axis_slot(key)];
      draft.line = std::max(draft.line, line_no);
      const std::string_view field = std::string_view(key).substr(12);
      if (field == "target") {
        draft.target = parse_target(value);
        if (!draft.target) ctx.fail("unknown sweep target '" + std::string(value) + "'");
      } else if (field == "min") {
        draft.min = ctx.number(value);
      } else if (field == "max") {
        draft.max = ctx.number(value);
      } else if (field == "points") {
        draft.points = ctx.count(value);
      } else {
        ctx.fail("unknown key");
      }
      continue;
    }

    const auto& table = detail::key_table();
    const auto it = table.find(key);
    if (it == table.end()) ctx.fail("unknown key");
    it->second(doc, value, ctx);
  }

  for (const auto& key : config_keys()) {
    if (!seen.count(key)) doc.defaulted.insert(key);
  }

  const auto line_of = [&](const char* key) { return seen.count(key) ? seen[key] : 0; };
  detail::KeyContext{"population.i0", std::max(line_of("population.i0"), line_of("population.n"))}.check(
      doc.scenario.i0 < doc.scenario.n, "i0 < n");
  if (doc.scenario.integrator.event_tolerance > doc.scenario.integrator.dt) {
    detail::KeyContext{"run.event_tolerance", std::max(line_of("run.dt"), line_of("run.event_tolerance"))}.check(false, "event_tolerance ≤ dt");
  }
  if (doc.scenario.response_model == ResponseModel::single_shot && doc.scenario.relapse.rho != 0.0) {
    detail::KeyContext{"run.response_model", line_of("run.response_model")}.check(
        false, "rho = 0 for the single-shot model");
  }

  for (std::size_t slot = 0; slot < 2; ++slot) {
    const auto& d = drafts[slot];
    if (d.line == 0) continue;
    const std::string prefix = "sweep.axis" + std::to_string(slot + 1);
    const detail::KeyContext ctx{prefix, d.line};
    if (!d.target || !d.min || !d.max || !d.points) ctx.fail("needs target, min, max and points");
    if (slot == 1 && drafts[0].line == 0) ctx.fail("axis2 given without axis1");
    ctx.check(*d.min < *d.max, "min < max");
    ctx.check(*d.points >= 2, "points ≥ 2");
    if (*d.target == Target::pstar) {
      ctx.check(doc.trigger_kind == TriggerKind::prevalence, "pstar target needs trigger.kind = prevalence");
    }
    doc.axes.push_back(ParamAxis{*d.target, *d.min, *d.max, *d.points});
  }
  if (doc.axes.size() == 2 && doc.axes[0].target == doc.axes[1].target) {
    detail::KeyContext{"sweep.axis2.target", drafts[1].line}.fail(
        "sweep axes must have distinct targets (both are " + std::string(to_string(doc.axes[0].target)) + ")");
  }

  detail::set_trigger(doc);
  try {
    validate(doc.scenario);
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
  return doc;
}

// Value of a config key in the canonical text form.
inline std::string config_value(const ConfigDocument& doc, std::string_view key) {
  const auto& s = doc.scenario;
  if (key == "population.n") return format_exact(s.n);
  if (key == "population.i0") return format_exact(s.i0);
  if (key == "disease.beta") return format_exact(s.disease.beta);
  if (key == "disease.gamma") return format_exact(s.disease.gamma);
  if (key == "info.beta_i") return format_exact(s.info.beta_i);
  if (key == "info.gamma_i") return format_exact(s.info.gamma_i);
  if (key == "info.epsilon") return format_exact(s.info.epsilon);
  if (key == "intervention.phi") return format_exact(s.intervention.phi);
  if (key == "relapse.rho") return format_exact(s.relapse.rho);
  if (key == "trigger.kind") return std::string(to_string(doc.trigger_kind));
  if (key == "trigger.pstar") return format_exact(doc.pstar);
  if (key == "trigger.daily_tests") {
    std::string out;
    for (double v : doc.surveillance.daily_tests) out += (out.empty() ? "" : ",") + format_exact(v);
    return out;
  }
  if (key == "trigger.confidence") return format_exact(doc.surveillance.confidence);
  if (key == "run.t_max") return format_exact(s.t_max);
  if (key == "run.dt") return format_exact(s.integrator.dt);
  if (key == "run.method") return std::string(to_string(s.integrator.method));
  if (key == "run.event_tolerance") return format_exact(s.integrator.event_tolerance);
  if (key == "run.extinction_threshold") return format_exact(s.extinction_threshold);
  if (key == "run.stride") return std::to_string(s.integrator.stride);
  if (key == "run.response_model") return std::string(to_string(s.response_model));
  throw InvalidArgument("unknown config key " + std::string(key));
}

// Canonical document text; parse_config(format_config(d)) == d.
inline std::string format_config(const ConfigDocument& doc) {
  std::string out;
  for (const auto& key : config_keys()) out += key + " = " + config_value(doc, key) + "\n";
  for (std::size_t k = 0; k < doc.axes.size(); ++k) {
    const std::string prefix = "sweep.axis" + std::to_string(k + 1) + ".";
    const auto& axis = doc.axes[k];
    out += prefix + "target = " + std::string(to_string(axis.target)) + "\n";
    out += prefix + "min = " + format_exact(axis.min) + "\n";
    out += prefix + "max = " + format_exact(axis.max) + "\n";
    out += prefix + "points = " + std::to_string(axis.points) + "\n";
  }
  return out;
}

// Effective configuration as `# key = value` lines, defaults marked.
inline void write_metadata(std::ostream& os, const ConfigDocument& doc) {
  for (const auto& key : config_keys()) {
    os << "# " << key << " = " << config_value(doc, key);
    if (doc.defaulted.count(key)) os << " (default)";
    os << '\n';
  }
  for (std::size_t k = 0; k < doc.axes.size(); ++k) {
    const auto& axis = doc.axes[k];
    os << "# sweep.axis" << k + 1 << " = " << to_string(axis.target) << " [" << format_exact(axis.min) << ", "
       << format_exact(axis.max) << "] x " << axis.points << '\n';
  }
  os << "# rates are per day; gamma and gamma_i are rates, not periods\n";
}

namespace detail {

inline std::string optional_number(const std::optional<double>& v) { return v ? format_number(*v) : ""; }

template <class State>
void write_trajectory_rows(std::ostream& os, const Trajectory<State>& traj) {
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const auto values = traj.states[k].values();
    const double n = traj.states[k].n;
    for (std::size_t j = 0; j < State::size; ++j) {
      os << format_number(traj.times[k]) << ',' << State::labels[j] << ',' << format_number(values[j] / n)
         << '\n';
    }
  }
}

inline std::string csv_safe(std::string s) {
  for (char& c : s) {
    if (c == ',' || c == '\n') c = ';';
  }
  return s;
}

}  // namespace detail

// Trajectory of a run, long format, time-major. Phase 1 rows (S, I, R) come
// before phase 2 rows (U, A, C, Q, I, R); the switch time appears in both.
inline void emit_result(std::ostream& os, const SimResult& result, const ConfigDocument& doc) {
  write_metadata(os, doc);
  os << "# final_size = " << format_number(result.final_size) << '\n';
  os << "# peak_prevalence = " << format_number(result.peak_prevalence) << '\n';
  os << "# peak_time = " << format_number(result.peak_time) << '\n';
  os << "# detection_time = " << detail::optional_number(result.detection_time) << '\n';
  os << "# trigger_prevalence = " << detail::optional_number(result.trigger_prevalence) << '\n';
  os << "# truncated = " << (result.truncated ? "true" : "false") << '\n';
  os << "time,compartment,value_fraction\n";
  detail::write_trajectory_rows(os, result.phase1);
  if (result.phase2) detail::write_trajectory_rows(os, *result.phase2);
}

// Sweep cells, long format, axis1-major.
inline void emit_result(std::ostream& os, const SweepResult& result, const ConfigDocument& doc) {
  write_metadata(os, doc);
  os << "axis1_value,axis2_value,final_size,detection_time,peak_prevalence,truncated,error\n";
  for (std::size_t row = 0; row < result.rows(); ++row) {
    for (std::size_t col = 0; col < result.cols(); ++col) {
      const SweepCell& cell = result.at(row, col);
      os << format_number(result.axes[0].value(row)) << ',';
      if (result.axes.size() > 1) os << format_number(result.axes[1].value(col));
      os << ',' << detail::optional_number(cell.final_size) << ',' << detail::optional_number(cell.detection_time)
         << ',' << detail::optional_number(cell.peak_prevalence) << ',' << (cell.truncated ? "true" : "false")
         << ',' << (cell.error ? detail::csv_safe(*cell.error) : "") << '\n';
    }
  }
}

// Daily detection table for the naive phase.
inline void emit_detection(std::ostream& os, std::span<const double> prevalence, const DetectionResult& det,
                           const ConfigDocument& doc) {
  write_metadata(os, doc);
  os << "# detection_day = " << (det.detection_day ? std::to_string(*det.detection_day) : "") << '\n';
  os << "# prevalence_at_detection = " << detail::optional_number(det.prevalence_at_detection) << '\n';
  os << "day,prevalence,cumulative_probability\n";
  for (std::size_t s = 0; s < prevalence.size(); ++s) {
    os << s + 1 << ',' << format_number(prevalence[s]) << ',' << format_number(det.cumulative_probability[s])
       << '\n';
  }
}

struct Table {
  std::vector<std::string> metadata;  // comment lines without the leading "# "
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

inline Table read_table(std::istream& is) {
  Table table;
  std::string line;
  const auto split = [](const std::string& s) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      const auto comma = s.find(',', start);
      fields.push_back(s.substr(start, comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    return fields;
  };
  while (std::getline(is, line)) {
    if (line.starts_with("#")) {
      table.metadata.push_back(line.size() > 2 ? line.substr(2) : "");
    } else if (table.header.empty()) {
      table.header = split(line);
    } else if (!line.empty()) {
      table.rows.push_back(split(line));
    }
  }
  return table;
}

}  // namespace epitrigger
