#include "nqh/integrate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nqh {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                 a75 = -2187.0 / 6784, a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
// Continuous extension of order 4.
constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                 d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                 d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;

constexpr double kSafety = 0.9;
constexpr double kMinFactor = 0.2;
constexpr double kMaxFactor = 5.0;

using Vec = std::vector<double>;

bool all_finite(const Vec& v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

struct SampleCursor {
  std::span<const double> times;
  std::size_t next = 0;
  bool done() const { return next >= times.size(); }
  double peek() const { return times[next]; }
};

std::vector<double> prepare_samples(std::span<const double> samples, double t0, double t1) {
  std::vector<double> out(samples.begin(), samples.end());
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (!(out[i] >= t0 && out[i] <= t1)) {
      throw std::invalid_argument("sample times must lie in [t0, t1]");
    }
    if (i > 0 && !(out[i] > out[i - 1])) {
      throw std::invalid_argument("sample times must increase strictly");
    }
  }
  if (!out.empty() && out.back() != t1) out.push_back(t1);
  return out;
}

void finish(Trajectory& traj, double t, const Vec& y) {
  if (traj.times.empty() || t > traj.times.back()) {
    traj.times.push_back(t);
    traj.states.push_back(y);
  }
}

Trajectory run_dp45(const VectorField& f, Vec y, double t0, double t1,
                    const IntegratorConfig& cfg, std::span<const double> samples) {
  const std::size_t n = y.size();
  const double min_step = cfg.min_step.value_or(1e-14 * (t1 - t0));
  Trajectory traj;
  traj.config = cfg;
  SampleCursor cursor{samples};
  const bool dense = !samples.empty();

  Vec k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ytmp(n), ynew(n), err(n);
  double t = t0;
  f(t, y, k1);
  if (!all_finite(k1)) {
    traj.status = Status::blow_up;
    finish(traj, t, y);
    return traj;
  }

  auto norm = [&](const Vec& v, const Vec& ref) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double sc = cfg.abs_tol + cfg.rel_tol * std::abs(ref[i]);
      s += (v[i] / sc) * (v[i] / sc);
    }
    return std::sqrt(s / static_cast<double>(n));
  };

  // Initial step estimate (Hairer, Norsett & Wanner II.4).
  double h;
  {
    const double dn0 = norm(y, y), dn1 = norm(k1, y);
    double h0 = (dn0 < 1e-5 || dn1 < 1e-5) ? 1e-6 : 0.01 * dn0 / dn1;
    h0 = std::min(h0, t1 - t0);
    for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + h0 * k1[i];
    f(t + h0, ytmp, k2);
    double dn2 = 0.0;
    if (all_finite(k2)) {
      for (std::size_t i = 0; i < n; ++i) err[i] = k2[i] - k1[i];
      dn2 = norm(err, y) / h0;
    }
    const double dmax = std::max(dn1, dn2);
    const double h1 = dmax <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dmax, 0.2);
    h = std::min({100.0 * h0, h1, t1 - t0});
  }

  if (!dense) finish(traj, t, y);
  while (!cursor.done() && cursor.peek() == t0) {
    traj.times.push_back(t0);
    traj.states.push_back(y);
    ++cursor.next;
  }

  bool last_rejected = false;
  std::size_t steps = 0;
  while (t < t1) {
    if (steps >= cfg.max_steps) {
      traj.status = Status::step_limit;
      finish(traj, t, y);
      return traj;
    }
    if (h < min_step) {
      traj.status = Status::blow_up;
      finish(traj, t, y);
      return traj;
    }
    const bool final_step = t + h >= t1;
    if (final_step) h = t1 - t;

    auto stage = [&](const std::initializer_list<std::pair<double, const Vec*>>& terms, double c,
                     Vec& out) {
      for (std::size_t i = 0; i < n; ++i) {
        double s = y[i];
        for (const auto& [a, k] : terms) s += h * a * (*k)[i];
        ytmp[i] = s;
      }
      f(t + c * h, ytmp, out);
    };
    stage({{a21, &k1}}, c2, k2);
    stage({{a31, &k1}, {a32, &k2}}, c3, k3);
    stage({{a41, &k1}, {a42, &k2}, {a43, &k3}}, c4, k4);
    stage({{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}, c5, k5);
    stage({{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}, 1.0, k6);
    for (std::size_t i = 0; i < n; ++i) {
      ynew[i] = y[i] + h * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
    }
    const double t_new = final_step ? t1 : t + h;
    f(t_new, ynew, k7);
    ++steps;

    bool finite = all_finite(ynew) && all_finite(k7);
    for (const Vec* k : {&k2, &k3, &k4, &k5, &k6}) finite = finite && all_finite(*k);
    double e = 0.0;
    if (finite) {
      for (std::size_t i = 0; i < n; ++i) {
        err[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] +
                      e7 * k7[i]);
      }
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double sc = cfg.abs_tol + cfg.rel_tol * std::max(std::abs(y[i]), std::abs(ynew[i]));
        s += (err[i] / sc) * (err[i] / sc);
      }
      e = std::sqrt(s / static_cast<double>(n));
      finite = std::isfinite(e);
    }
    if (!finite) {
      h *= kMinFactor;
      last_rejected = true;
      ++traj.rejected_steps;
      continue;
    }

    if (e <= 1.0) {
      if (dense) {
        while (!cursor.done() && cursor.peek() <= t_new) {
          const double theta = (cursor.peek() - t) / h;
          const double theta1 = 1.0 - theta;
          Vec ys(n);
          for (std::size_t i = 0; i < n; ++i) {
            const double r1 = y[i];
            const double r2 = ynew[i] - y[i];
            const double r3 = h * k1[i] - r2;
            const double r4 = r2 - h * k7[i] - r3;
            const double r5 = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] +
                                   d6 * k6[i] + d7 * k7[i]);
            ys[i] = r1 + theta * (r2 + theta1 * (r3 + theta * (r4 + theta1 * r5)));
          }
          if (cursor.peek() == t_new) ys = ynew;
          traj.times.push_back(cursor.peek());
          traj.states.push_back(std::move(ys));
          ++cursor.next;
        }
      } else {
        traj.times.push_back(t_new);
        traj.states.push_back(ynew);
      }
      t = t_new;
      y.swap(ynew);
      k1.swap(k7);
      ++traj.accepted_steps;
      double factor = e == 0.0 ? kMaxFactor : kSafety * std::pow(e, -0.2);
      factor = std::clamp(factor, kMinFactor, last_rejected ? 1.0 : kMaxFactor);
      h *= factor;
      last_rejected = false;
    } else {
      const double factor = std::clamp(kSafety * std::pow(e, -0.2), kMinFactor, 1.0);
      h *= factor;
      last_rejected = true;
      ++traj.rejected_steps;
    }
  }
  traj.status = Status::completed;
  return traj;
}

Trajectory run_rk4(const VectorField& f, Vec y, double t0, double t1,
                   const IntegratorConfig& cfg, std::span<const double> samples) {
  const std::size_t n = y.size();
  Trajectory traj;
  traj.config = cfg;
  SampleCursor cursor{samples};
  const bool dense = !samples.empty();
  Vec k1(n), k2(n), k3(n), k4(n), ytmp(n), ynew(n), fnew(n);

  double t = t0;
  f(t, y, k1);
  if (!all_finite(k1)) {
    traj.status = Status::blow_up;
    finish(traj, t, y);
    return traj;
  }
  if (!dense) finish(traj, t, y);
  while (!cursor.done() && cursor.peek() == t0) {
    traj.times.push_back(t0);
    traj.states.push_back(y);
    ++cursor.next;
  }

  const double span = t1 - t0;
  const auto total = static_cast<std::size_t>(std::ceil(span / cfg.step - 1e-9));
  for (std::size_t step = 1; step <= total; ++step) {
    if (step > cfg.max_steps) {
      traj.status = Status::step_limit;
      finish(traj, t, y);
      return traj;
    }
    const double t_new = step == total ? t1 : t0 + static_cast<double>(step) * cfg.step;
    const double h = t_new - t;
    for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + 0.5 * h * k1[i];
    f(t + 0.5 * h, ytmp, k2);
    for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + 0.5 * h * k2[i];
    f(t + 0.5 * h, ytmp, k3);
    for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + h * k3[i];
    f(t + h, ytmp, k4);
    for (std::size_t i = 0; i < n; ++i) {
      ynew[i] = y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    f(t_new, ynew, fnew);
    if (!all_finite(ynew) || !all_finite(fnew)) {
      traj.status = Status::blow_up;
      finish(traj, t, y);
      return traj;
    }
    if (dense) {
      // Cubic Hermite interpolation between the step ends.
      while (!cursor.done() && cursor.peek() <= t_new) {
        const double s = (cursor.peek() - t) / h;
        const double h00 = (1 + 2 * s) * (1 - s) * (1 - s), h10 = s * (1 - s) * (1 - s);
        const double h01 = s * s * (3 - 2 * s), h11 = s * s * (s - 1);
        Vec ys(n);
        for (std::size_t i = 0; i < n; ++i) {
          ys[i] = h00 * y[i] + h10 * h * k1[i] + h01 * ynew[i] + h11 * h * fnew[i];
        }
        if (cursor.peek() == t_new) ys = ynew;
        traj.times.push_back(cursor.peek());
        traj.states.push_back(std::move(ys));
        ++cursor.next;
      }
    } else {
      traj.times.push_back(t_new);
      traj.states.push_back(ynew);
    }
    t = t_new;
    y.swap(ynew);
    k1.swap(fnew);
    ++traj.accepted_steps;
  }
  traj.status = Status::completed;
  return traj;
}

}  // namespace

std::string to_string(Method m) {
  return m == Method::rk4_fixed ? "rk4-fixed" : "dp45-adaptive";
}

std::string to_string(Status s) {
  switch (s) {
    case Status::completed: return "completed";
    case Status::blow_up: return "blow-up";
    case Status::step_limit: return "step-limit";
  }
  return "unknown";
}

Method parse_method(const std::string& name) {
  if (name == "rk4-fixed" || name == "rk4") return Method::rk4_fixed;
  if (name == "dp45-adaptive" || name == "dp45") return Method::dp45_adaptive;
  throw std::invalid_argument("unknown integration method '" + name + "'");
}

void IntegratorConfig::validate() const {
  if (!(abs_tol > 0.0) || !(rel_tol > 0.0)) throw std::invalid_argument("tolerances must be positive");
  if (max_steps < 1) throw std::invalid_argument("max_steps must be >= 1");
  if (min_step && !(*min_step > 0.0)) throw std::invalid_argument("min_step must be positive");
  if (method == Method::rk4_fixed && !(step > 0.0)) throw std::invalid_argument("step must be positive");
}

std::vector<double> Trajectory::component(std::size_t i) const {
  std::vector<double> out;
  out.reserve(states.size());
  for (const auto& s : states) out.push_back(s.at(i));
  return out;
}

std::vector<double> uniform_grid(double t0, double t1, std::size_t count) {
  if (count < 2) throw std::invalid_argument("sample count must be >= 2");
  if (!(t1 > t0)) throw std::invalid_argument("t1 must exceed t0");
  std::vector<double> g(count);
  const double dt = (t1 - t0) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) g[i] = t0 + dt * static_cast<double>(i);
  g.back() = t1;
  return g;
}

Trajectory integrate_ode(const VectorField& field, std::span<const double> y0, double t0,
                         double t1, const IntegratorConfig& cfg,
                         std::span<const double> sample_times) {
  cfg.validate();
  if (!(t1 > t0)) throw std::invalid_argument("integrate_ode: t1 must exceed t0");
  Vec y(y0.begin(), y0.end());
  if (!all_finite(y)) throw std::invalid_argument("integrate_ode: non-finite initial state");
  const auto samples = prepare_samples(sample_times, t0, t1);
  return cfg.method == Method::dp45_adaptive ? run_dp45(field, std::move(y), t0, t1, cfg, samples)
                                             : run_rk4(field, std::move(y), t0, t1, cfg, samples);
}

std::vector<double> observable_along(const Trajectory& traj, const Poly& f) {
  if (static_cast<std::size_t>(f.n_vars()) != traj.dimension()) {
    throw DimensionError("observable_along: polynomial dimension does not match states");
  }
  const CompiledPoly cf(f);
  return observable_along(traj, [&](std::span<const double> s) { return cf(s); });
}

std::vector<double> observable_along(
    const Trajectory& traj, const std::function<double(std::span<const double>)>& f) {
  std::vector<double> out;
  out.reserve(traj.size());
  for (const auto& s : traj.states) out.push_back(f(s));
  return out;
}

}  // namespace nqh
