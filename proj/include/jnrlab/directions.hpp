#pragma once

// Direction grids on the unit sphere of R^k.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "jnrlab/hermitian.hpp"

namespace jnrlab {

struct DirectionGrid {
  std::size_t k = 0;
  std::vector<RVector> dirs;

  std::size_t size() const { return dirs.size(); }
  bool empty() const { return dirs.empty(); }

  /// N equally spaced angles starting at angle 0.
  static DirectionGrid planar(std::size_t n) {
    DirectionGrid g{2, {}};
    g.dirs.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double t = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n);
      RVector u(2);
      u << std::cos(t), std::sin(t);
      g.dirs.push_back(u);
    }
    return g;
  }

  static DirectionGrid fibonacci(std::size_t n) {
    DirectionGrid g{3, {}};
    g.dirs.reserve(n);
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (std::size_t i = 0; i < n; ++i) {
      const double z = 1.0 - (2.0 * static_cast<double>(i) + 1.0) / static_cast<double>(n);
      const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
      const double phi = golden * static_cast<double>(i);
      RVector u(3);
      u << r * std::cos(phi), r * std::sin(phi), z;
      g.dirs.push_back(u);
    }
    return g;
  }

  static DirectionGrid random_sphere(std::size_t k, std::size_t n, std::uint64_t seed) {
    DirectionGrid g{k, {}};
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    g.dirs.reserve(n);
    while (g.dirs.size() < n) {
      RVector u(static_cast<Eigen::Index>(k));
      for (Eigen::Index i = 0; i < u.size(); ++i) u(i) = gauss(rng);
      const double norm = u.norm();
      if (norm > 1e-12) g.dirs.push_back(u / norm);
    }
    return g;
  }

  /// Default grid per dimension: 3600 angles, 20000 Fibonacci points, or
  /// seeded uniform samples for k > 3.
  static DirectionGrid standard(std::size_t k, std::size_t n = 0, std::uint64_t seed = 1) {
    if (k == 1) {
      DirectionGrid g{1, {}};
      g.dirs.push_back(RVector::Constant(1, 1.0));
      g.dirs.push_back(RVector::Constant(1, -1.0));
      return g;
    }
    if (k == 2) return planar(n ? n : 3600);
    if (k == 3) return fibonacci(n ? n : 20000);
    return random_sphere(k, n ? n : 20000, seed);
  }

  /// Typical angular spacing between neighbouring directions.
  double spacing() const {
    if (dirs.empty()) return 0.0;
    const double n = static_cast<double>(dirs.size());
    if (k <= 1) return std::numbers::pi;
    if (k == 2) return 2.0 * std::numbers::pi / n;
    // area of S^{k-1} per sample, to the power 1/(k-1)
    const double area = 2.0 * std::pow(std::numbers::pi, 0.5 * static_cast<double>(k)) /
                        std::tgamma(0.5 * static_cast<double>(k));
    return std::pow(area / n, 1.0 / static_cast<double>(k - 1));
  }
};

}  // namespace jnrlab
