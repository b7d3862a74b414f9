#pragma once

// Two-phase run: the outbreak spreads in a naive population until the
// emergency declaration fires, then awareness spreads from a single aware
// individual alongside quarantine of a fraction of new infections.

#include <algorithm>
#include <cmath>
#include <optional>
#include <variant>

#include "errors.hpp"
#include "integrator.hpp"
#include "model.hpp"
#include "surveillance.hpp"

namespace epitrigger {

// Which post-declaration right-hand side is integrated. single_shot requires
// rho = 0 and exists so the relapse path can be checked against it.
enum class ResponseModel { multiple_shot, single_shot };

struct ScenarioConfig {
  double n = 1e5;
  double i0 = 10.0;
  DiseaseParams disease;
  InfoParams info;
  InterventionParams intervention;
  RelapseParams relapse;
  std::optional<TriggerSpec> trigger = TriggerSpec{PrevalenceThreshold{}};  // absent: never declared
  ResponseModel response_model = ResponseModel::multiple_shot;
  double t_max = 1000.0;
  // Disease is extinct once I + Q falls below this many individuals and the
  // remaining susceptibles cannot sustain growth.
  double extinction_threshold = 1e-3;
  IntegratorConfig integrator;

  bool operator==(const ScenarioConfig&) const = default;
};

inline void validate(const ScenarioConfig& cfg) {
  detail::require(cfg.n > 0.0, "n > 0");
  detail::require(cfg.i0 > 0.0, "i0 > 0");
  detail::require(cfg.i0 < cfg.n, "i0 < n");
  detail::require(cfg.t_max > 0.0, "t_max > 0");
  detail::require(cfg.extinction_threshold >= 0.0, "extinction_threshold ≥ 0");
  validate(cfg.disease);
  validate(cfg.info);
  validate(cfg.intervention);
  validate(cfg.relapse);
  if (cfg.trigger) validate(*cfg.trigger);
  if (cfg.response_model == ResponseModel::single_shot) {
    detail::require(cfg.relapse.rho == 0.0, "rho = 0 for the single-shot model");
  }
  validate(cfg.integrator);
}

struct SimResult {
  double n = 0.0;
  double final_size = 0.0;       // R / n at the last sample
  double peak_prevalence = 0.0;  // max I / n over both phases
  double peak_time = 0.0;
  std::optional<double> detection_time;      // continuous switch time, days
  std::optional<int> detection_day;          // surveillance-effort trigger only
  std::optional<double> trigger_prevalence;  // I / n at the switch
  bool truncated = false;                    // t_max reached before extinction
  Trajectory<NaiveState> phase1;
  std::optional<Trajectory<ResponseState>> phase2;
};

// Post-declaration initial state: one susceptible becomes aware, everything
// else carries over.
inline ResponseState handoff(const NaiveState& naive_end) {
  if (!(naive_end.s >= 1.0)) {
    throw CannotSeedAwareness("cannot seed awareness: S = " + std::to_string(naive_end.s) + " < 1");
  }
  ResponseState out;
  out.u = naive_end.s - 1.0;
  out.a = 1.0;
  out.c = 0.0;
  out.q = 0.0;
  out.i = naive_end.i;
  out.r = naive_end.r;
  out.n = naive_end.n;
  return out;
}

inline double final_size(const SimResult& result) {
  if (result.phase2) return result.phase2->back().r / result.n;
  return result.phase1.back().r / result.n;
}

// Larger root of s0 * exp(-r0 * (r - r_init)) = 1 - r on [r_init, 1], by
// bisection to adjacent doubles. This is the classical SIR final-size relation.
inline double sir_final_size_oracle(double r0, double s0, double r_init) {
  detail::require(r0 >= 0.0, "r0 ≥ 0");
  detail::require(s0 >= 0.0 && r_init >= 0.0 && s0 + r_init <= 1.0 + 1e-15, "s0 + r_init ≤ 1");
  // s0 exp(-r0 (r - r_init)) - (1 - r), arranged to avoid cancellation near r_init
  const auto g = [&](double r) { return (s0 - 1.0 + r) + s0 * std::expm1(-r0 * (r - r_init)); };
  double lo = r_init;
  double hi = 1.0;
  if (g(hi) <= 0.0) return hi;
  // Bisect down to adjacent doubles.
  while (true) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (g(mid) <= 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

namespace detail {

inline bool naive_extinct(const NaiveState& x, const DiseaseParams& d, double threshold) {
  return x.i < threshold && d.beta * x.s <= d.gamma * x.n;
}

inline bool response_extinct(const ResponseState& x, const DiseaseParams& d, const InterventionParams& iv,
                             double threshold) {
  return x.i + x.q < threshold && (1.0 - iv.phi) * d.beta * (x.u + x.a + x.c) <= d.gamma * x.n;
}

template <class State>
void track_peak(const Trajectory<State>& traj, SimResult& result) {
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const double prevalence = traj.states[k].i / traj.states[k].n;
    if (prevalence > result.peak_prevalence) {
      result.peak_prevalence = prevalence;
      result.peak_time = traj.times[k];
    }
  }
}

}  // namespace detail

inline SimResult run_scenario(const ScenarioConfig& cfg) {
  validate(cfg);
  const DiseaseParams& disease = cfg.disease;
  const double threshold = cfg.extinction_threshold;

  const auto naive_rhs = [&](double, const NaiveState& x) { return naive_derivative(x, disease); };
  const auto naive_extinct = [&](double, const NaiveState& x) {
    return detail::naive_extinct(x, disease, threshold);
  };
  const NaiveState start{cfg.n - cfg.i0, cfg.i0, 0.0, cfg.n};

  SimResult result;
  result.n = cfg.n;

  std::optional<double> switch_time;
  if (!cfg.trigger) {
    result.phase1 = integrate_until(naive_rhs, start, naive_extinct, cfg.t_max, cfg.integrator).trajectory;
  } else if (const auto* threshold_trigger = std::get_if<PrevalenceThreshold>(&*cfg.trigger)) {
    const double pstar = threshold_trigger->pstar;
    const auto fires = [&](double t, const NaiveState& x) {
      return x.i >= pstar * x.n || naive_extinct(t, x);
    };
    auto run = integrate_until(naive_rhs, start, fires, cfg.t_max, cfg.integrator);
    result.phase1 = std::move(run.trajectory);
    if (run.crossing_time && result.phase1.back().i >= pstar * cfg.n) switch_time = run.crossing_time;
  } else {
    const auto& params = std::get<SurveillanceEffort>(*cfg.trigger).params;
    auto full = integrate_until(naive_rhs, start, naive_extinct, cfg.t_max, cfg.integrator).trajectory;
    const auto detection = detection_time(daily_prevalence(full, disease), params);
    if (detection.detection_day) {
      const double day = *detection.detection_day;
      result.detection_day = detection.detection_day;
      result.phase1 = integrate(naive_rhs, start, {0.0, day}, cfg.integrator);
      switch_time = day;
    } else {
      result.phase1 = std::move(full);
    }
  }
  detail::track_peak(result.phase1, result);

  if (switch_time) {
    const NaiveState at_switch = result.phase1.back();
    result.detection_time = switch_time;
    result.trigger_prevalence = at_switch.prevalence();
    const ResponseState seeded = handoff(at_switch);

    const auto response_extinct = [&](double, const ResponseState& x) {
      return detail::response_extinct(x, disease, cfg.intervention, threshold);
    };
    const auto phase2 = [&](const auto& rhs) {
      if (*switch_time >= cfg.t_max) {
        Trajectory<ResponseState> single;
        single.push(*switch_time, seeded);
        return single;
      }
      return integrate_until(rhs, seeded, response_extinct, cfg.t_max, cfg.integrator, *switch_time)
          .trajectory;
    };
    if (cfg.response_model == ResponseModel::single_shot) {
      result.phase2 = phase2([&](double, const ResponseState& x) {
        return single_shot_derivative(x, disease, cfg.info, cfg.intervention);
      });
    } else {
      result.phase2 = phase2([&](double, const ResponseState& x) {
        return response_derivative(x, disease, cfg.info, cfg.intervention, cfg.relapse);
      });
    }
    detail::track_peak(*result.phase2, result);
    const ResponseState& last = result.phase2->back();
    result.truncated = last.i + last.q >= threshold;
  } else {
    result.truncated = result.phase1.back().i >= threshold;
  }

  result.final_size = final_size(result);
  return result;
}

}  // namespace epitrigger
