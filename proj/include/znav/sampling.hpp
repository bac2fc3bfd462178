#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "errors.hpp"
#include "linalg.hpp"
#include "wirtinger.hpp"

namespace znav {

namespace detail {

inline double radical_inverse(std::uint64_t i, int base) {
  double f = 1.0, r = 0.0;
  while (i > 0) {
    f /= base;
    r += f * static_cast<double>(i % base);
    i /= base;
  }
  return r;
}

inline constexpr int kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89};

// Every point of the real box of half-width `margin` around z lies in the domain.
inline bool clear_of_boundary(const Domain& dom, const Vec& z, double margin) {
  if (!dom(z)) return false;
  for (Eigen::Index k = 0; k < z.size(); ++k)
    for (const cplx d : {cplx(margin, 0), cplx(-margin, 0), cplx(0, margin), cplx(0, -margin)}) {
      Vec p = z;
      p(k) += d;
      if (!dom(p)) return false;
    }
  return true;
}

}  // namespace detail

// Deterministic points in the box [-radius, radius]^{2n}: a seed-rotated Halton sequence,
// keeping points at least `margin` inside the domain.
inline std::vector<Vec> sample_points(int n, int count, const Domain& dom, double radius, std::uint64_t seed,
                                      double margin = 1e-3) {
  if (n < 1 || 2 * n > static_cast<int>(std::size(detail::kPrimes)))
    throw ValidationError("sampling supports 1 <= n <= 12");
  if (count < 0) throw ValidationError("sample count must be nonnegative");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> shift(2 * n);
  for (auto& s : shift) s = u(rng);
  std::vector<Vec> pts;
  const std::uint64_t limit = 10000ULL * static_cast<std::uint64_t>(count + 1);
  for (std::uint64_t i = 1; static_cast<int>(pts.size()) < count; ++i) {
    if (i > limit) throw DomainError("could not place samples inside the domain");
    Vec z(n);
    for (int k = 0; k < n; ++k) {
      const double x = std::fmod(detail::radical_inverse(i, detail::kPrimes[2 * k]) + shift[2 * k], 1.0);
      const double y = std::fmod(detail::radical_inverse(i, detail::kPrimes[2 * k + 1]) + shift[2 * k + 1], 1.0);
      z(k) = cplx(radius * (2 * x - 1), radius * (2 * y - 1));
    }
    if (detail::clear_of_boundary(dom, z, margin)) pts.push_back(z);
  }
  return pts;
}

// Unit directions with independent complex Gaussian components.
inline std::vector<Vec> sample_directions(int n, int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<Vec> dirs;
  while (static_cast<int>(dirs.size()) < count) {
    Vec e(n);
    for (int k = 0; k < n; ++k) e(k) = cplx(g(rng), g(rng));
    if (e.norm() > 1e-3) dirs.push_back(e / e.norm());
  }
  return dirs;
}

struct SamplePair {
  Vec z, eta;
};

// `points` base points with `directions` directions each.
inline std::vector<SamplePair> sample_plan(int n, int points, int directions, const Domain& dom, double radius,
                                           std::uint64_t seed) {
  const auto pts = sample_points(n, points, dom, radius, seed);
  const auto dirs = sample_directions(n, points * directions, seed + 1);
  std::vector<SamplePair> plan;
  plan.reserve(dirs.size());
  for (int i = 0; i < points; ++i)
    for (int j = 0; j < directions; ++j) plan.push_back({pts[i], dirs[i * directions + j]});
  return plan;
}

}  // namespace znav
