#pragma once

// Final-size landscapes over one- and two-dimensional parameter grids, plus
// the line analyses used to read them (interior minima, non-monotonicity).

#include <algorithm>
#include <array>
#include <atomic>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "scenario.hpp"

namespace epitrigger {

enum class Target {
  beta,
  gamma,
  beta_i,
  gamma_i,
  epsilon,
  phi,
  rho,
  pstar,
  infectious_period,  // 1 / gamma
  awareness_period,   // 1 / gamma_i
};

inline constexpr std::array<std::pair<Target, std::string_view>, 10> kTargetNames{{
    {Target::beta, "beta"},
    {Target::gamma, "gamma"},
    {Target::beta_i, "beta_i"},
    {Target::gamma_i, "gamma_i"},
    {Target::epsilon, "epsilon"},
    {Target::phi, "phi"},
    {Target::rho, "rho"},
    {Target::pstar, "pstar"},
    {Target::infectious_period, "infectious_period"},
    {Target::awareness_period, "awareness_period"},
}};

inline std::string_view to_string(Target t) {
  for (const auto& [target, name] : kTargetNames) {
    if (target == t) return name;
  }
  return "?";
}

inline std::optional<Target> parse_target(std::string_view name) {
  for (const auto& [target, label] : kTargetNames) {
    if (label == name) return target;
  }
  return std::nullopt;
}

struct ParamAxis {
  Target target = Target::beta;
  double min = 0.0;
  double max = 1.0;
  std::size_t points = 2;

  double value(std::size_t k) const {
    if (k + 1 == points) return max;
    return min + static_cast<double>(k) * (max - min) / static_cast<double>(points - 1);
  }

  bool operator==(const ParamAxis&) const = default;
};

inline void validate(const ParamAxis& axis) {
  if (!(axis.min < axis.max)) {
    throw InvalidArgument("axis " + std::string(to_string(axis.target)) + ": min < max required");
  }
  if (axis.points < 2) {
    throw InvalidArgument("axis " + std::string(to_string(axis.target)) + ": points ≥ 2 required");
  }
}

inline void validate_axes(std::span<const ParamAxis> axes) {
  if (axes.empty() || axes.size() > 2) throw InvalidArgument("a sweep takes one or two axes");
  for (const auto& axis : axes) validate(axis);
  if (axes.size() == 2 && axes[0].target == axes[1].target) {
    throw InvalidArgument("sweep axes must have distinct targets (both are " +
                          std::string(to_string(axes[0].target)) + ")");
  }
}

// Writes one scalar of cfg. pstar is addressable only under a prevalence trigger.
inline void apply(ScenarioConfig& cfg, Target target, double value) {
  switch (target) {
    case Target::beta: cfg.disease.beta = value; break;
    case Target::gamma: cfg.disease.gamma = value; break;
    case Target::beta_i: cfg.info.beta_i = value; break;
    case Target::gamma_i: cfg.info.gamma_i = value; break;
    case Target::epsilon: cfg.info.epsilon = value; break;
    case Target::phi: cfg.intervention.phi = value; break;
    case Target::rho: cfg.relapse.rho = value; break;
    case Target::infectious_period: cfg.disease.gamma = 1.0 / value; break;
    case Target::awareness_period: cfg.info.gamma_i = 1.0 / value; break;
    case Target::pstar: {
      auto* threshold = cfg.trigger ? std::get_if<PrevalenceThreshold>(&*cfg.trigger) : nullptr;
      if (!threshold) throw InvalidArgument("pstar is a sweep target only under a prevalence trigger");
      threshold->pstar = value;
      break;
    }
  }
}

struct SweepCell {
  std::optional<double> final_size;
  std::optional<double> peak_prevalence;
  std::optional<double> detection_time;
  bool truncated = false;
  std::optional<std::string> error;

  bool usable() const { return final_size && !truncated && !error; }

  bool operator==(const SweepCell&) const = default;
};

struct SweepResult {
  std::vector<ParamAxis> axes;
  std::vector<SweepCell> cells;  // row-major: axis 0 is the row index

  std::size_t rows() const { return axes[0].points; }
  std::size_t cols() const { return axes.size() > 1 ? axes[1].points : 1; }
  const SweepCell& at(std::size_t row, std::size_t col) const { return cells[row * cols() + col]; }
};

inline SweepCell evaluate_cell(const ScenarioConfig& base, std::span<const ParamAxis> axes, std::size_t row,
                               std::size_t col) {
  SweepCell cell;
  try {
    ScenarioConfig cfg = base;
    apply(cfg, axes[0].target, axes[0].value(row));
    if (axes.size() > 1) apply(cfg, axes[1].target, axes[1].value(col));
    const SimResult r = run_scenario(cfg);
    cell.final_size = r.final_size;
    cell.peak_prevalence = r.peak_prevalence;
    cell.detection_time = r.detection_time;
    cell.truncated = r.truncated;
  } catch (const Error& e) {
    cell.error = e.what();
  }
  return cell;
}

// Evaluates every grid cell. Cells are independent and written by position,
// so the result does not depend on the number of workers.
inline SweepResult run_sweep(const ScenarioConfig& base, std::vector<ParamAxis> axes, unsigned workers = 1) {
  validate_axes(axes);
  const bool threshold_trigger = base.trigger && std::holds_alternative<PrevalenceThreshold>(*base.trigger);
  for (const auto& axis : axes) {
    if (axis.target == Target::pstar && !threshold_trigger) {
      throw InvalidArgument("pstar is a sweep target only under a prevalence trigger");
    }
  }
  SweepResult result;
  result.axes = std::move(axes);
  const std::size_t cols = result.cols();
  const std::size_t total = result.rows() * cols;
  result.cells.resize(total);

  std::atomic<std::size_t> next{0};
  const auto work = [&] {
    for (std::size_t k = next++; k < total; k = next++) {
      result.cells[k] = evaluate_cell(base, result.axes, k / cols, k % cols);
    }
  };
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(total)));
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  return result;
}

struct LineMinimum {
  std::size_t index = 0;  // grid index along the scanned axis
  double parameter = 0.0;
  double final_size = 0.0;
  bool interior = false;  // not at either end of the axis
};

// For every line parallel to the given axis, the grid point of smallest final
// size. Ties go to the smallest parameter value. Truncated and failed cells are
// skipped; a line with no usable cell yields nothing.
inline std::vector<std::optional<LineMinimum>> argmin_along(const SweepResult& result, std::size_t axis) {
  if (axis >= result.axes.size()) throw InvalidArgument("axis index out of range");
  const ParamAxis& scanned = result.axes[axis];
  const std::size_t lines = axis == 0 ? result.cols() : result.rows();
  std::vector<std::optional<LineMinimum>> out(lines);
  for (std::size_t line = 0; line < lines; ++line) {
    for (std::size_t k = 0; k < scanned.points; ++k) {
      const SweepCell& cell = axis == 0 ? result.at(k, line) : result.at(line, k);
      if (!cell.usable()) continue;
      if (!out[line] || *cell.final_size < out[line]->final_size) {
        out[line] = LineMinimum{k, scanned.value(k), *cell.final_size, k != 0 && k + 1 != scanned.points};
      }
    }
  }
  return out;
}

inline constexpr double kNonmonotonicTolerance = 1e-3;

// True iff some interior point lies below both a point before and a point
// after it by more than tol, or above both by more than tol.
inline bool is_nonmonotonic(std::span<const double> line, double tol = kNonmonotonicTolerance) {
  if (line.size() < 3) throw InvalidArgument("non-monotonicity needs at least 3 points");
  const std::size_t n = line.size();
  std::vector<double> suffix_max(n);
  std::vector<double> suffix_min(n);
  suffix_max[n - 1] = suffix_min[n - 1] = line[n - 1];
  for (std::size_t k = n - 1; k-- > 0;) {
    suffix_max[k] = std::max(suffix_max[k + 1], line[k]);
    suffix_min[k] = std::min(suffix_min[k + 1], line[k]);
  }
  double prefix_max = line[0];
  double prefix_min = line[0];
  for (std::size_t j = 1; j + 1 < n; ++j) {
    const double v = line[j];
    if (v < std::min(prefix_max, suffix_max[j + 1]) - tol) return true;
    if (v > std::max(prefix_min, suffix_min[j + 1]) + tol) return true;
    prefix_max = std::max(prefix_max, v);
    prefix_min = std::min(prefix_min, v);
  }
  return false;
}

// Final sizes along one line of a sweep; unusable cells are dropped.
inline std::vector<double> final_size_line(const SweepResult& result, std::size_t axis, std::size_t line) {
  std::vector<double> out;
  const std::size_t points = result.axes.at(axis).points;
  for (std::size_t k = 0; k < points; ++k) {
    const SweepCell& cell = axis == 0 ? result.at(k, line) : result.at(line, k);
    if (cell.usable()) out.push_back(*cell.final_size);
  }
  return out;
}

}  // namespace epitrigger
