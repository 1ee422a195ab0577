#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nqh/poly.hpp"

namespace nqh {

/// dy/dt = field(t, y), written into `dydt`.
using VectorField =
    std::function<void(double t, std::span<const double> y, std::span<double> dydt)>;

enum class Method { rk4_fixed, dp45_adaptive };
enum class Status { completed, blow_up, step_limit };

std::string to_string(Method m);
std::string to_string(Status s);
Method parse_method(const std::string& name);

struct IntegratorConfig {
  Method method = Method::dp45_adaptive;
  double step = 1e-3;  // rk4-fixed only
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  std::size_t max_steps = 1'000'000;
  /// Defaults to 1e-14 * (t1 - t0).
  std::optional<double> min_step;

  void validate() const;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<std::vector<double>> states;
  std::string system;
  IntegratorConfig config;
  Status status = Status::completed;
  std::size_t accepted_steps = 0;
  std::size_t rejected_steps = 0;

  std::size_t size() const { return times.size(); }
  std::size_t dimension() const { return states.empty() ? 0 : states.front().size(); }
  const std::vector<double>& back() const { return states.back(); }
  /// Column `i` of the states.
  std::vector<double> component(std::size_t i) const;
};

std::vector<double> uniform_grid(double t0, double t1, std::size_t count);

/// Integrates over [t0, t1]. With an empty `sample_times` every accepted step
/// is recorded; otherwise the states are interpolated at those times (which
/// must lie in [t0, t1] and increase strictly; t1 is appended if missing).
/// A non-finite derivative or a step below min_step ends the run with status
/// blow_up; exceeding max_steps gives step_limit. Either way the trajectory
/// holds the samples reached plus the last accepted state.
Trajectory integrate_ode(const VectorField& field, std::span<const double> y0, double t0,
                         double t1, const IntegratorConfig& cfg,
                         std::span<const double> sample_times = {});

std::vector<double> observable_along(const Trajectory& traj, const Poly& f);
std::vector<double> observable_along(
    const Trajectory& traj, const std::function<double(std::span<const double>)>& f);

}  // namespace nqh
