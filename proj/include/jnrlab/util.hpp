#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include "jnrlab/hermitian.hpp"

namespace jnrlab {

/// Worker count for direction sweeps; JNRLAB_THREADS caps it.
inline std::size_t sweep_threads() {
  std::size_t n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("JNRLAB_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) n = std::min(n, static_cast<std::size_t>(v));
  }
  return n;
}

/// Runs fn(i) for i in [0, count). Each index is written by exactly one
/// worker, so results are independent of the thread count.
template <class Fn>
void parallel_for(std::size_t count, Fn&& fn) {
  const std::size_t workers = std::min(sweep_threads(), std::max<std::size_t>(1, count / 64));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < count; i += workers) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

/// Numerical rank of the columns of a real matrix at a cutoff relative to
/// the largest singular value; `floor` guards the all-zero case.
inline std::size_t numerical_rank(const RMatrix& m, double rel_cutoff, double floor = 1e-12) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<RMatrix> svd(m);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s(0) <= floor) return 0;
  std::size_t r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) > rel_cutoff * s(0)) ++r;
  }
  return r;
}

/// Orthonormal basis (columns) of the column span of a real matrix.
inline RMatrix real_span_basis(const RMatrix& m, double rel_cutoff) {
  if (m.cols() == 0) return RMatrix(m.rows(), 0);
  Eigen::JacobiSVD<RMatrix> svd(m, Eigen::ComputeThinU);
  const auto& s = svd.singularValues();
  Eigen::Index r = 0;
  if (s.size() > 0 && s(0) > 1e-300) {
    while (r < s.size() && s(r) > rel_cutoff * s(0)) ++r;
  }
  return svd.matrixU().leftCols(r);
}

/// Affine dimension of a point set (columns) via centered SVD.
inline std::size_t affine_dim(const std::vector<RVector>& pts, double rel_cutoff = 1e-7, double abs_floor = 1e-9) {
  if (pts.size() < 2) return 0;
  const auto k = pts.front().size();
  RVector c = RVector::Zero(k);
  for (const auto& p : pts) c += p;
  c /= static_cast<double>(pts.size());
  RMatrix m(k, static_cast<Eigen::Index>(pts.size()));
  for (std::size_t i = 0; i < pts.size(); ++i) m.col(static_cast<Eigen::Index>(i)) = pts[i] - c;
  return numerical_rank(m, rel_cutoff, abs_floor);
}

/// Hash grid for near-duplicate queries among points of R^k.
class PointIndex {
 public:
  explicit PointIndex(double cell) : cell_(cell) {}

  /// Index of a stored point within `tol` (tol <= cell) of p, or -1.
  long find(const RVector& p, double tol) const {
    const auto base = key_of(p);
    long hit = -1;
    visit_neighbors(base, 0, base, [&](const std::vector<long>& key) {
      if (hit >= 0) return;
      auto it = map_.find(hash(key));
      if (it == map_.end()) return;
      for (long id : it->second) {
        if ((points_[static_cast<std::size_t>(id)] - p).norm() <= tol) {
          hit = id;
          return;
        }
      }
    });
    return hit;
  }

  /// Indices of all stored points within `tol` (tol <= cell) of p.
  std::vector<long> find_all(const RVector& p, double tol) const {
    std::vector<long> out;
    const auto base = key_of(p);
    visit_neighbors(base, 0, base, [&](const std::vector<long>& key) {
      auto it = map_.find(hash(key));
      if (it == map_.end()) return;
      for (long id : it->second) {
        if ((points_[static_cast<std::size_t>(id)] - p).norm() <= tol &&
            std::find(out.begin(), out.end(), id) == out.end()) {
          out.push_back(id);
        }
      }
    });
    std::sort(out.begin(), out.end());
    return out;
  }

  long insert(const RVector& p) {
    const long id = static_cast<long>(points_.size());
    points_.push_back(p);
    map_[hash(key_of(p))].push_back(id);
    return id;
  }

  const RVector& point(long id) const { return points_[static_cast<std::size_t>(id)]; }
  std::size_t size() const { return points_.size(); }

 private:
  std::vector<long> key_of(const RVector& p) const {
    std::vector<long> k(static_cast<std::size_t>(p.size()));
    for (Eigen::Index i = 0; i < p.size(); ++i) k[static_cast<std::size_t>(i)] = static_cast<long>(std::floor(p(i) / cell_));
    return k;
  }
  static std::uint64_t hash(const std::vector<long>& key) {
    std::uint64_t h = 1469598103934665603ull;
    for (long v : key) {
      h ^= static_cast<std::uint64_t>(v) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
      h *= 1099511628211ull;
    }
    return h;
  }
  template <class Fn>
  void visit_neighbors(const std::vector<long>& base, std::size_t dim, std::vector<long> cur, Fn&& fn) const {
    if (dim == base.size()) {
      fn(cur);
      return;
    }
    for (long d = -1; d <= 1; ++d) {
      cur[dim] = base[dim] + d;
      visit_neighbors(base, dim + 1, cur, fn);
    }
  }

  double cell_;
  std::vector<RVector> points_;
  std::unordered_map<std::uint64_t, std::vector<long>> map_;
};

}  // namespace jnrlab
