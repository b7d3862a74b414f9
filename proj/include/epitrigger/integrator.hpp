#pragma once

// Fixed-step explicit integration of compartment states, with threshold-event
// localisation on the cubic Hermite interpolant of the bracketing step.
//
// A state type State must provide:
//   static constexpr std::size_t size;
//   static constexpr std::array<std::string_view, size> labels;
//   double n;                                   (total population)
//   std::array<double, size> values() const;
//   static State from_values(const std::array<double, size>&, double n);
// The right-hand side is any callable (double t, const State&) returning either
// std::array<double, size> or a rate object with values().

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace epitrigger {

enum class Method { rk4, euler };

inline std::string_view to_string(Method m) { return m == Method::rk4 ? "rk4" : "euler"; }

struct IntegratorConfig {
  double dt = 0.01;                // days
  Method method = Method::rk4;
  double event_tolerance = 1e-6;   // days
  double nonneg_tolerance = 1e-9;  // fraction of n
  std::size_t stride = 1;          // keep every stride-th step; the last sample is always kept

  bool operator==(const IntegratorConfig&) const = default;
};

inline void validate(const IntegratorConfig& cfg) {
  if (!(cfg.dt > 0.0)) throw InvalidArgument("invariant violated: dt > 0");
  if (!(cfg.event_tolerance > 0.0)) throw InvalidArgument("invariant violated: event_tolerance > 0");
  if (!(cfg.event_tolerance <= cfg.dt)) throw InvalidArgument("invariant violated: event_tolerance ≤ dt");
  if (!(cfg.nonneg_tolerance >= 0.0)) throw InvalidArgument("invariant violated: nonneg_tolerance ≥ 0");
  if (cfg.stride == 0) throw InvalidArgument("invariant violated: stride ≥ 1");
}

// Relative drift of the compartment sum that aborts a run.
inline constexpr double kConservationAbort = 1e-6;

template <class State>
struct Trajectory {
  std::vector<double> times;
  std::vector<State> states;

  static constexpr auto labels = State::labels;

  std::size_t size() const { return times.size(); }
  bool empty() const { return times.empty(); }
  const State& back() const { return states.back(); }
  double start() const { return times.front(); }
  double end() const { return times.back(); }

  void push(double t, const State& x) {
    times.push_back(t);
    states.push_back(x);
  }
};

template <class State>
using Values = std::array<double, State::size>;

namespace detail {

template <class State, class Rhs>
Values<State> eval_rhs(const Rhs& rhs, double t, const Values<State>& v, double n) {
  auto rate = rhs(t, State::from_values(v, n));
  if constexpr (std::is_same_v<std::decay_t<decltype(rate)>, Values<State>>) {
    return rate;
  } else {
    return rate.values();
  }
}

template <std::size_t K>
std::array<double, K> axpy(const std::array<double, K>& y, double h, const std::array<double, K>& f) {
  std::array<double, K> out;
  for (std::size_t j = 0; j < K; ++j) out[j] = y[j] + h * f[j];
  return out;
}

template <class State, class Rhs>
Values<State> step(const Rhs& rhs, double t, const Values<State>& y, const Values<State>& k1, double h,
                   double n, Method method) {
  if (method == Method::euler) return axpy(y, h, k1);
  const auto k2 = eval_rhs<State>(rhs, t + 0.5 * h, axpy(y, 0.5 * h, k1), n);
  const auto k3 = eval_rhs<State>(rhs, t + 0.5 * h, axpy(y, 0.5 * h, k2), n);
  const auto k4 = eval_rhs<State>(rhs, t + h, axpy(y, h, k3), n);
  Values<State> out;
  for (std::size_t j = 0; j < State::size; ++j) {
    out[j] = y[j] + h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
  }
  return out;
}

template <class State>
void check_state(const Values<State>& v, double n, double t, const IntegratorConfig& cfg) {
  double total = 0.0;
  for (std::size_t j = 0; j < State::size; ++j) {
    if (!std::isfinite(v[j])) {
      throw NumericalInstability("non-finite compartment " + std::string(State::labels[j]), t);
    }
    if (v[j] < -cfg.nonneg_tolerance * n) {
      throw NumericalInstability("negative compartment " + std::string(State::labels[j]) + " = " +
                                     std::to_string(v[j]),
                                 t);
    }
    total += v[j];
  }
  if (std::abs(total - n) > kConservationAbort * n) {
    throw NumericalInstability("conservation violated (sum " + std::to_string(total) + " vs n " +
                                   std::to_string(n) + ")",
                               t);
  }
}

// End of the (k+1)-th step on the grid t0 + k*dt, clipped to t_end. Steps that
// would leave a sliver shorter than 1e-9*dt are merged into the final one.
inline double next_time(double t0, std::size_t k, double dt, double t_end) {
  const double t = t0 + static_cast<double>(k + 1) * dt;
  return t >= t_end - 1e-9 * dt ? t_end : t;
}

}  // namespace detail

// Cubic Hermite interpolant on [t0, t1] through (y0, f0) and (y1, f1).
template <std::size_t K>
std::array<double, K> hermite_interpolate(double t0, const std::array<double, K>& y0,
                                          const std::array<double, K>& f0, double t1,
                                          const std::array<double, K>& y1,
                                          const std::array<double, K>& f1, double t) {
  const double h = t1 - t0;
  const double s = (t - t0) / h;
  const double s2 = s * s;
  const double s3 = s2 * s;
  const double h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
  const double h10 = s3 - 2.0 * s2 + s;
  const double h01 = -2.0 * s3 + 3.0 * s2;
  const double h11 = s3 - s2;
  std::array<double, K> out;
  for (std::size_t j = 0; j < K; ++j) {
    out[j] = h00 * y0[j] + h10 * h * f0[j] + h01 * y1[j] + h11 * h * f1[j];
  }
  return out;
}

template <class State>
struct UntilResult {
  Trajectory<State> trajectory;
  std::optional<double> crossing_time;
};

namespace detail {

// Shared fixed-step march. When a predicate is supplied the march stops at its
// first firing, localised by bisection to cfg.event_tolerance.
template <class State, class Rhs, class Predicate>
UntilResult<State> march(const Rhs& rhs, const State& initial, double t0, double t_end,
                         const IntegratorConfig& cfg, const Predicate* predicate) {
  validate(cfg);
  if (!(t_end > t0)) throw InvalidArgument("invariant violated: t_span end > start");
  if (initial.n == 0.0) throw DegeneratePopulation();

  const double n = initial.n;
  UntilResult<State> out;
  Values<State> y = initial.values();
  check_state<State>(y, n, t0, cfg);
  out.trajectory.push(t0, initial);

  if (predicate && (*predicate)(t0, initial)) {
    out.crossing_time = t0;
    return out;
  }

  double t = t0;
  for (std::size_t k = 0; t < t_end; ++k) {
    const double t_next = next_time(t0, k, cfg.dt, t_end);
    const double h = t_next - t;
    const auto f0 = eval_rhs<State>(rhs, t, y, n);
    const auto y1 = step<State>(rhs, t, y, f0, h, n, cfg.method);
    check_state<State>(y1, n, t_next, cfg);

    const State x1 = State::from_values(y1, n);
    if (predicate && (*predicate)(t_next, x1)) {
      const auto f1 = eval_rhs<State>(rhs, t_next, y1, n);
      double lo = t;
      double hi = t_next;
      while (hi - lo > cfg.event_tolerance) {
        const double mid = 0.5 * (lo + hi);
        const auto ym = hermite_interpolate(t, y, f0, t_next, y1, f1, mid);
        if ((*predicate)(mid, State::from_values(ym, n))) {
          hi = mid;
        } else {
          lo = mid;
        }
      }
      const auto y_hit = hi == t_next ? y1 : hermite_interpolate(t, y, f0, t_next, y1, f1, hi);
      check_state<State>(y_hit, n, hi, cfg);
      out.trajectory.push(hi, State::from_values(y_hit, n));
      out.crossing_time = hi;
      return out;
    }

    y = y1;
    t = t_next;
    if ((k + 1) % cfg.stride == 0 || t == t_end) out.trajectory.push(t, x1);
  }
  return out;
}

}  // namespace detail

template <class State, class Rhs>
Trajectory<State> integrate(const Rhs& rhs, const State& initial, std::pair<double, double> t_span,
                            const IntegratorConfig& cfg = {}) {
  using Never = bool (*)(double, const State&);
  return detail::march<State, Rhs, Never>(rhs, initial, t_span.first, t_span.second, cfg, nullptr)
      .trajectory;
}

// Integrates from t_start until predicate(t, state) first holds or t_max is
// reached. The predicate must change sign at most once within a step.
template <class State, class Rhs, class Predicate>
UntilResult<State> integrate_until(const Rhs& rhs, const State& initial, const Predicate& predicate,
                                   double t_max, const IntegratorConfig& cfg = {},
                                   double t_start = 0.0) {
  return detail::march<State, Rhs, Predicate>(rhs, initial, t_start, t_max, cfg, &predicate);
}

// State at time t, by Hermite interpolation between the stored samples that
// bracket it. Exact at sample times.
template <class State, class Rhs>
State sample_at(const Trajectory<State>& traj, const Rhs& rhs, double t) {
  if (traj.empty() || t < traj.start() || t > traj.end()) {
    throw InvalidArgument("sample time outside trajectory span");
  }
  const auto it = std::lower_bound(traj.times.begin(), traj.times.end(), t);
  const auto hi = static_cast<std::size_t>(it - traj.times.begin());
  if (traj.times[hi] == t) return traj.states[hi];
  const double n = traj.states[hi].n;
  const auto& x0 = traj.states[hi - 1];
  const auto& x1 = traj.states[hi];
  const auto f0 = detail::eval_rhs<State>(rhs, traj.times[hi - 1], x0.values(), n);
  const auto f1 = detail::eval_rhs<State>(rhs, traj.times[hi], x1.values(), n);
  return State::from_values(
      hermite_interpolate(traj.times[hi - 1], x0.values(), f0, traj.times[hi], x1.values(), f1, t), n);
}

}  // namespace epitrigger
