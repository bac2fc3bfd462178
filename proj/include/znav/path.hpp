#pragma once

#include <cmath>
#include <vector>

#include "errors.hpp"
#include "linalg.hpp"

namespace znav {

enum class Termination { Completed, LeftDomain, StepFailure };

inline const char* termination_name(Termination t) {
  switch (t) {
    case Termination::Completed: return "completed";
    case Termination::LeftDomain: return "left_domain";
    case Termination::StepFailure: return "step_failure";
  }
  return "?";
}

struct GeodesicPath {
  std::vector<double> times;
  std::vector<Vec> points;
  std::vector<Vec> velocities;
  Termination terminated_reason = Termination::Completed;
  int accepted_steps = 0;
  int rejected_steps = 0;

  std::size_t size() const { return times.size(); }
};

struct Quadrature {
  double value = 0.0;
  double error_estimate = 0.0;
};

namespace detail {

inline bool uniform_grid(const std::vector<double>& t) {
  if (t.size() < 2) return false;
  const double h = t[1] - t[0];
  for (std::size_t k = 1; k + 1 < t.size(); ++k)
    if (std::abs((t[k + 1] - t[k]) - h) > 1e-9 * std::abs(h)) return false;
  return true;
}

// Composite Simpson on uniform samples y[first..first+m) with m odd.
inline double simpson(const std::vector<double>& y, std::size_t first, std::size_t m, double h,
                      std::size_t stride = 1) {
  double s = y[first] + y[first + (m - 1) * stride];
  for (std::size_t k = 1; k + 1 < m; ++k) s += (k % 2 ? 4.0 : 2.0) * y[first + k * stride];
  return s * h / 3.0;
}

inline double trapezoid(const std::vector<double>& t, const std::vector<double>& y,
                        std::size_t stride = 1) {
  double s = 0.0;
  for (std::size_t k = 0; k + stride < t.size(); k += stride)
    s += 0.5 * (t[k + stride] - t[k]) * (y[k] + y[k + stride]);
  return s;
}

}  // namespace detail

// Integral of samples y over times t: Simpson on uniform grids (Simpson 3/8 closes an even
// sample count), trapezoid otherwise. Error estimate by Richardson against the doubled step.
inline Quadrature integrate_samples(const std::vector<double>& t, const std::vector<double>& y) {
  if (t.size() < 2 || t.size() != y.size()) throw EmptyPathError("need at least two samples");
  Quadrature q;
  const std::size_t m = t.size();
  if (!detail::uniform_grid(t) || m < 3) {
    q.value = detail::trapezoid(t, y);
    if (m >= 3) q.error_estimate = std::abs(q.value - detail::trapezoid(t, y, 2)) / 3.0;
    return q;
  }
  const double h = (t.back() - t.front()) / static_cast<double>(m - 1);
  if (m % 2 == 1) {
    q.value = detail::simpson(y, 0, m, h);
    if ((m - 1) % 4 == 0)
      q.error_estimate = std::abs(q.value - detail::simpson(y, 0, (m - 1) / 2 + 1, 2 * h, 2)) / 15.0;
    return q;
  }
  if (m == 4) {
    q.value = 3.0 * h / 8.0 * (y[0] + 3 * y[1] + 3 * y[2] + y[3]);
    return q;
  }
  const std::size_t k = m - 3;  // odd count for Simpson, last 4 samples by the 3/8 rule
  q.value = detail::simpson(y, 0, k, h) +
            3.0 * h / 8.0 * (y[k - 1] + 3 * y[k] + 3 * y[k + 1] + y[k + 2]);
  q.error_estimate = std::abs(q.value - detail::trapezoid(t, y)) / 15.0;
  return q;
}

}  // namespace znav
