#pragma once

// Compartment states, rate constants and the right-hand sides of the naive
// SIR phase and the post-declaration awareness/quarantine phase.

#include <array>
#include <cmath>
#include <string>
#include <string_view>

#include "errors.hpp"

namespace epitrigger {

namespace detail {

inline void require(bool ok, std::string_view constraint) {
  if (!ok) throw InvalidArgument(std::string("invariant violated: ") + std::string(constraint));
}

}  // namespace detail

struct DiseaseParams {
  double beta = 0.3;   // transmission rate, 1/day
  double gamma = 0.1;  // recovery rate, 1/day

  bool operator==(const DiseaseParams&) const = default;
};

struct InfoParams {
  double beta_i = 1.5;   // information transmission rate, 1/day
  double gamma_i = 0.1;  // awareness withdrawal rate, 1/day
  double epsilon = 0.8;  // susceptibility reduction of aware individuals

  bool operator==(const InfoParams&) const = default;
};

struct InterventionParams {
  double phi = 0.2;  // quarantined fraction of new infections

  bool operator==(const InterventionParams&) const = default;
};

struct RelapseParams {
  double rho = 0.0;  // careless -> unaware rate, 1/day

  bool operator==(const RelapseParams&) const = default;
};

inline void validate(const DiseaseParams& p) {
  detail::require(p.beta >= 0.0, "beta ≥ 0");
  detail::require(p.gamma > 0.0, "gamma > 0");
}

inline void validate(const InfoParams& p) {
  detail::require(p.beta_i >= 0.0, "beta_i ≥ 0");
  detail::require(p.gamma_i > 0.0, "gamma_i > 0");
  detail::require(p.epsilon >= 0.0, "epsilon ≥ 0");
  detail::require(p.epsilon <= 1.0, "epsilon ≤ 1");
}

inline void validate(const InterventionParams& p) {
  detail::require(p.phi >= 0.0, "phi ≥ 0");
  detail::require(p.phi <= 1.0, "phi ≤ 1");
}

inline void validate(const RelapseParams& p) { detail::require(p.rho >= 0.0, "rho ≥ 0"); }

// Expected secondary cases of one infectious individual in a naive population.
// Reported only; the dynamics always read beta and gamma.
inline double basic_reproduction_number(const DiseaseParams& p) {
  detail::require(p.gamma > 0.0, "gamma > 0");
  return p.beta / p.gamma;
}

// Counts of susceptible, infectious and recovered individuals out of n.
struct NaiveState {
  static constexpr std::size_t size = 3;
  static constexpr std::array<std::string_view, size> labels{"S", "I", "R"};

  double s = 0.0;
  double i = 0.0;
  double r = 0.0;
  double n = 0.0;

  double total() const { return s + i + r; }
  double prevalence() const { return i / n; }

  std::array<double, size> values() const { return {s, i, r}; }
  static NaiveState from_values(const std::array<double, size>& v, double n) {
    return {v[0], v[1], v[2], n};
  }

  bool operator==(const NaiveState&) const = default;
};

// Unaware, aware, careless susceptibles plus quarantined, infectious and
// recovered, out of n.
struct ResponseState {
  static constexpr std::size_t size = 6;
  static constexpr std::array<std::string_view, size> labels{"U", "A", "C", "Q", "I", "R"};

  double u = 0.0;
  double a = 0.0;
  double c = 0.0;
  double q = 0.0;
  double i = 0.0;
  double r = 0.0;
  double n = 0.0;

  double total() const { return u + a + c + q + i + r; }
  double prevalence() const { return i / n; }

  std::array<double, size> values() const { return {u, a, c, q, i, r}; }
  static ResponseState from_values(const std::array<double, size>& v, double n) {
    return {v[0], v[1], v[2], v[3], v[4], v[5], n};
  }

  bool operator==(const ResponseState&) const = default;
};

struct NaiveRate {
  double ds = 0.0;
  double di = 0.0;
  double dr = 0.0;

  double sum() const { return ds + di + dr; }
  std::array<double, NaiveState::size> values() const { return {ds, di, dr}; }

  bool operator==(const NaiveRate&) const = default;
};

struct ResponseRate {
  double du = 0.0;
  double da = 0.0;
  double dc = 0.0;
  double dq = 0.0;
  double di = 0.0;
  double dr = 0.0;

  double sum() const { return du + da + dc + dq + di + dr; }
  std::array<double, ResponseState::size> values() const { return {du, da, dc, dq, di, dr}; }

  bool operator==(const ResponseRate&) const = default;
};

inline NaiveRate naive_derivative(const NaiveState& x, const DiseaseParams& p) {
  if (x.n == 0.0) throw DegeneratePopulation();
  const double infection = p.beta * x.s * x.i / x.n;
  const double recovery = p.gamma * x.i;
  return {-infection, infection - recovery, recovery};
}

// Single-shot behavioural response: awareness is adopted at most once.
inline ResponseRate single_shot_derivative(const ResponseState& x, const DiseaseParams& d,
                                           const InfoParams& info, const InterventionParams& iv) {
  if (x.n == 0.0) throw DegeneratePopulation();
  const double force = d.beta * x.i / x.n;
  const double awareness = info.beta_i * x.u * x.a / x.n;
  const double new_infections = force * (x.u + x.c + (1.0 - info.epsilon) * x.a);
  return {
      -awareness - force * x.u,
      awareness - (1.0 - info.epsilon) * force * x.a - info.gamma_i * x.a,
      info.gamma_i * x.a - force * x.c,
      iv.phi * new_infections - d.gamma * x.q,
      (1.0 - iv.phi) * new_infections - d.gamma * x.i,
      d.gamma * (x.q + x.i),
  };
}

// Multiple-shot response: careless individuals relapse to unaware at rate rho.
// With rho = 0 this returns exactly what single_shot_derivative returns.
inline ResponseRate response_derivative(const ResponseState& x, const DiseaseParams& d,
                                        const InfoParams& info, const InterventionParams& iv,
                                        const RelapseParams& rel) {
  if (x.n == 0.0) throw DegeneratePopulation();
  const double force = d.beta * x.i / x.n;
  const double awareness = info.beta_i * x.u * x.a / x.n;
  const double relapse = rel.rho * x.c;
  const double new_infections = force * (x.u + x.c + (1.0 - info.epsilon) * x.a);
  return {
      -awareness - force * x.u + relapse,
      awareness - (1.0 - info.epsilon) * force * x.a - info.gamma_i * x.a,
      info.gamma_i * x.a - force * x.c - relapse,
      iv.phi * new_infections - d.gamma * x.q,
      (1.0 - iv.phi) * new_infections - d.gamma * x.i,
      d.gamma * (x.q + x.i),
  };
}

}  // namespace epitrigger
