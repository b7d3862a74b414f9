#pragma once

// Random-sampling surveillance: cumulative probability of at least one
// positive test, the day that probability reaches the required confidence,
// and the prevalence threshold a given testing effort induces.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "errors.hpp"
#include "integrator.hpp"
#include "model.hpp"

namespace epitrigger {

struct SurveillanceParams {
  // Tests per day. A single entry applies to every day; otherwise entry s-1
  // is used on day s and the last entry repeats past the end.
  std::vector<double> daily_tests{100.0};
  double confidence = 0.95;

  double tests_on_day(std::size_t day) const {
    return day - 1 < daily_tests.size() ? daily_tests[day - 1] : daily_tests.back();
  }

  bool operator==(const SurveillanceParams&) const = default;
};

inline void validate(const SurveillanceParams& p) {
  detail::require(!p.daily_tests.empty(), "daily_tests is non-empty");
  for (double n : p.daily_tests) detail::require(n >= 0.0, "daily_tests ≥ 0");
  detail::require(p.confidence > 0.0 && p.confidence < 1.0, "0 < confidence < 1");
}

struct PrevalenceThreshold {
  double pstar = 0.025;

  bool operator==(const PrevalenceThreshold&) const = default;
};

struct SurveillanceEffort {
  SurveillanceParams params;

  bool operator==(const SurveillanceEffort&) const = default;
};

// How the emergency declaration fires.
using TriggerSpec = std::variant<PrevalenceThreshold, SurveillanceEffort>;

inline void validate(const TriggerSpec& trigger) {
  if (const auto* p = std::get_if<PrevalenceThreshold>(&trigger)) {
    detail::require(p->pstar > 0.0 && p->pstar < 1.0, "0 < pstar < 1");
  } else {
    validate(std::get<SurveillanceEffort>(trigger).params);
  }
}

struct DetectionResult {
  std::optional<int> detection_day;         // first day s (1-based) reaching the confidence
  std::vector<double> cumulative_probability;  // entry s-1 is the probability by day s
  std::optional<double> prevalence_at_detection;
};

// Cumulative probability of detecting at least one infectious individual by
// each day, 1 - prod_s (1 - prevalence_s)^tests_s, accumulated in log space.
inline std::vector<double> detection_probability(std::span<const double> prevalence_by_day,
                                                 const SurveillanceParams& params) {
  validate(params);
  std::vector<double> out;
  out.reserve(prevalence_by_day.size());
  double log_miss = 0.0;
  for (std::size_t s = 1; s <= prevalence_by_day.size(); ++s) {
    const double phi = prevalence_by_day[s - 1];
    if (!(phi >= 0.0 && phi <= 1.0)) {
      throw InvalidPrevalence("prevalence on day " + std::to_string(s) + " outside [0, 1]: " +
                              std::to_string(phi));
    }
    const double tests = params.tests_on_day(s);
    if (tests > 0.0) log_miss += tests * std::log1p(-phi);
    out.push_back(-std::expm1(log_miss));
  }
  return out;
}

inline DetectionResult detection_time(std::span<const double> prevalence_by_day,
                                      const SurveillanceParams& params) {
  DetectionResult result;
  result.cumulative_probability = detection_probability(prevalence_by_day, params);
  for (std::size_t s = 0; s < result.cumulative_probability.size(); ++s) {
    if (result.cumulative_probability[s] >= params.confidence) {
      result.detection_day = static_cast<int>(s + 1);
      result.prevalence_at_detection = prevalence_by_day[s];
      break;
    }
  }
  return result;
}

// I/N of a naive trajectory at integer days 1, 2, ... up to its end.
inline std::vector<double> daily_prevalence(const Trajectory<NaiveState>& traj, const DiseaseParams& disease) {
  const auto rhs = [&](double, const NaiveState& x) { return naive_derivative(x, disease); };
  std::vector<double> out;
  if (traj.empty()) return out;
  for (double day = std::floor(traj.start()) + 1.0; day <= traj.end(); day += 1.0) {
    const NaiveState x = sample_at(traj, rhs, day);
    // Interpolation may undershoot by rounding; the detection model wants [0, 1].
    out.push_back(std::clamp(x.prevalence(), 0.0, 1.0));
  }
  return out;
}

// Prevalence threshold induced by a testing effort on a given naive outbreak,
// or nothing when the effort never reaches the confidence within the run.
inline std::optional<double> effort_to_threshold(const Trajectory<NaiveState>& naive_trajectory,
                                                 const DiseaseParams& disease,
                                                 const SurveillanceParams& params) {
  const auto prevalence = daily_prevalence(naive_trajectory, disease);
  return detection_time(prevalence, params).prevalence_at_detection;
}

}  // namespace epitrigger
