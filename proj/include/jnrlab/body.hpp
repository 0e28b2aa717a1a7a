#pragma once

// Convex bodies in R^2 and R^3 described by support samples: a direction u,
// the support value h(u) and a point x of the body attaining it.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <utility>
#include <vector>

#include "jnrlab/directions.hpp"
#include "jnrlab/errors.hpp"
#include "jnrlab/geometry.hpp"
#include "jnrlab/hermitian.hpp"
#include "jnrlab/util.hpp"

namespace jnrlab {

struct BodySample {
  RVector u;  // unit direction
  double h = 0.0;
  RVector x;  // argmax point, <u, x> = h
};

/// Exact support evaluation: given a unit direction, h(u) and an argmax point.
using SupportOracle = std::function<BodySample(const RVector&)>;

namespace detail {

// h and argmax column of cloud (dim x N) for every direction, blocked so the
// product matrix stays small.
inline void planar_cloud_support(const RMatrix& cloud, const std::vector<RVector>& dirs, std::vector<double>& h,
                                 std::vector<Eigen::Index>& arg);

inline void cloud_support(const RMatrix& cloud, const std::vector<RVector>& dirs, std::vector<double>& h,
                          std::vector<Eigen::Index>& arg) {
  if (cloud.rows() == 2 && cloud.cols() > 64) {
    planar_cloud_support(cloud, dirs, h, arg);
    return;
  }
  h.assign(dirs.size(), 0.0);
  arg.assign(dirs.size(), 0);
  const Eigen::Index block = 256;
  const auto m = static_cast<Eigen::Index>(dirs.size());
  std::vector<Eigen::Index> starts;
  for (Eigen::Index s = 0; s < m; s += block) starts.push_back(s);
  parallel_for(starts.size(), [&](std::size_t bi) {
    const Eigen::Index s = starts[bi];
    const Eigen::Index len = std::min(block, m - s);
    RMatrix u(cloud.rows(), len);
    for (Eigen::Index j = 0; j < len; ++j) u.col(j) = dirs[static_cast<std::size_t>(s + j)];
    const RMatrix vals = cloud.transpose() * u;
    for (Eigen::Index j = 0; j < len; ++j) {
      Eigen::Index r;
      h[static_cast<std::size_t>(s + j)] = vals.col(j).maxCoeff(&r);
      arg[static_cast<std::size_t>(s + j)] = r;
    }
  });
}

// Planar clouds: binary search over the outward edge normals of the hull,
// then a check of the neighbouring vertices against rounding in the angles.
inline void planar_cloud_support(const RMatrix& cloud, const std::vector<RVector>& dirs, std::vector<double>& h,
                                 std::vector<Eigen::Index>& arg) {
  std::vector<Eigen::Vector2d> pts;
  for (Eigen::Index i = 0; i < cloud.cols(); ++i) pts.emplace_back(cloud(0, i), cloud(1, i));
  const auto hull = geom::hull2d(pts);
  const std::size_t m = hull.size();
  // normal of edge i -> i+1 of a counterclockwise hull, as an angle rotated to start at edge 0
  std::vector<double> ang(m);
  for (std::size_t i = 0; i < m; ++i) {
    const Eigen::Vector2d e = pts[hull[(i + 1) % m]] - pts[hull[i]];
    ang[i] = std::atan2(-e.x(), e.y());
  }
  const double a0 = ang[0];
  const auto rel = [a0](double a) {
    double r = std::fmod(a - a0, 2 * std::numbers::pi);
    return r < 0 ? r + 2 * std::numbers::pi : r;
  };
  std::vector<double> key(m);
  for (std::size_t i = 0; i < m; ++i) key[i] = rel(ang[i]);
  key[0] = 0.0;
  h.assign(dirs.size(), 0.0);
  arg.assign(dirs.size(), 0);
  for (std::size_t d = 0; d < dirs.size(); ++d) {
    const RVector& u = dirs[d];
    // vertex i maximizes <u, .> for normals between edges i-1 and i
    const double a = rel(std::atan2(u(1), u(0)));
    const std::size_t e = static_cast<std::size_t>(std::lower_bound(key.begin(), key.end(), a) - key.begin()) % m;
    std::size_t best = e;
    double hb = -1e300;
    for (std::size_t t : {e + m - 1, e, e + 1, e + 2 * m - 2}) {
      const std::size_t v = t % m;
      const double val = u(0) * pts[hull[v]].x() + u(1) * pts[hull[v]].y();
      if (val > hb) hb = val, best = v;
    }
    h[d] = hb;
    arg[d] = static_cast<Eigen::Index>(hull[best]);
  }
}

}  // namespace detail

class SupportSampledBody {
 public:
  SupportSampledBody() = default;

  /// Samples plus an optional point cloud whose hull is the body (used for
  /// support queries when no oracle is given; defaults to the sample points).
  SupportSampledBody(std::size_t dim, std::vector<BodySample> samples, bool origin_interior = true,
                     RMatrix cloud = RMatrix(), SupportOracle oracle = {})
      : dim_(dim), samples_(std::move(samples)), origin_interior_(origin_interior), oracle_(std::move(oracle)) {
    if (dim_ != 2 && dim_ != 3) throw UsageError("SupportSampledBody: dimension must be 2 or 3");
    if (samples_.empty()) throw UsageError("SupportSampledBody: no samples");
    for (auto& s : samples_) {
      if (static_cast<std::size_t>(s.u.size()) != dim_ || static_cast<std::size_t>(s.x.size()) != dim_) {
        throw DataError("SupportSampledBody: sample has wrong dimension");
      }
      const double n = s.u.norm();
      if (!(n > 0) || !std::isfinite(s.h) || !s.x.allFinite()) throw DataError("SupportSampledBody: invalid sample");
      s.u /= n;
      if (std::abs(s.u.dot(s.x) - s.h) > 1e-9 * std::max(1.0, std::abs(s.h))) {
        throw DataError("SupportSampledBody: argmax point does not attain the support value");
      }
      if (origin_interior_ && s.h <= 0) throw DataError("SupportSampledBody: non-positive support with origin interior");
    }
    if (cloud.size() == 0) {
      cloud_ = RMatrix(static_cast<Eigen::Index>(dim_), static_cast<Eigen::Index>(samples_.size()));
      for (std::size_t i = 0; i < samples_.size(); ++i) cloud_.col(static_cast<Eigen::Index>(i)) = samples_[i].x;
    } else {
      if (static_cast<std::size_t>(cloud.rows()) != dim_) throw DataError("SupportSampledBody: cloud has wrong dimension");
      cloud_ = std::move(cloud);
    }
    if (dim_ == 2 && cloud_.cols() > 3) {
      // support queries only ever reach hull vertices
      std::vector<Eigen::Vector2d> pts;
      for (Eigen::Index i = 0; i < cloud_.cols(); ++i) pts.emplace_back(cloud_(0, i), cloud_(1, i));
      const auto h = geom::hull2d(pts);
      RMatrix reduced(2, static_cast<Eigen::Index>(h.size()));
      for (std::size_t i = 0; i < h.size(); ++i) reduced.col(static_cast<Eigen::Index>(i)) = cloud_.col(static_cast<Eigen::Index>(h[i]));
      cloud_ = std::move(reduced);
    }
  }

  static SupportSampledBody from_oracle(std::size_t dim, SupportOracle oracle, const DirectionGrid& grid,
                                        bool origin_interior = true) {
    if (grid.k != dim) throw UsageError("from_oracle: grid dimension differs");
    std::vector<BodySample> s(grid.size());
    parallel_for(grid.size(), [&](std::size_t i) { s[i] = oracle(grid.dirs[i]); });
    return SupportSampledBody(dim, std::move(s), origin_interior, RMatrix(), std::move(oracle));
  }

  /// Body conv(cloud) sampled over grid.
  static SupportSampledBody from_cloud(RMatrix cloud, const DirectionGrid& grid, bool origin_interior = true) {
    if (static_cast<std::size_t>(cloud.rows()) != grid.k) throw UsageError("from_cloud: grid dimension differs");
    if (cloud.cols() == 0) throw UsageError("from_cloud: empty cloud");
    std::vector<double> h;
    std::vector<Eigen::Index> arg;
    detail::cloud_support(cloud, grid.dirs, h, arg);
    std::vector<BodySample> s(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) s[i] = BodySample{grid.dirs[i], h[i], cloud.col(arg[i])};
    return SupportSampledBody(grid.k, std::move(s), origin_interior, std::move(cloud));
  }

  std::size_t dim() const { return dim_; }
  const std::vector<BodySample>& samples() const { return samples_; }
  bool origin_interior() const { return origin_interior_; }
  bool has_oracle() const { return static_cast<bool>(oracle_); }
  const RMatrix& cloud() const { return cloud_; }

  BodySample evaluate(const RVector& u_in) const {
    if (static_cast<std::size_t>(u_in.size()) != dim_) throw UsageError("evaluate: direction has wrong length");
    const double n = u_in.norm();
    if (!(n > 0)) throw UsageError("evaluate: zero direction");
    const RVector u = u_in / n;
    if (oracle_) return oracle_(u);
    Eigen::Index r;
    const double h = (cloud_.transpose() * u).maxCoeff(&r);
    return BodySample{u, h, cloud_.col(r)};
  }

  double support(const RVector& u) const { return evaluate(u).h; }

  std::vector<double> support(const std::vector<RVector>& dirs) const {
    if (oracle_) {
      std::vector<double> h(dirs.size());
      parallel_for(dirs.size(), [&](std::size_t i) { h[i] = evaluate(dirs[i]).h; });
      return h;
    }
    std::vector<double> h;
    std::vector<Eigen::Index> arg;
    detail::cloud_support(cloud_, dirs, h, arg);
    return h;
  }

  /// The same body sampled over another grid.
  SupportSampledBody resampled(const DirectionGrid& grid) const {
    if (oracle_) return from_oracle(dim_, oracle_, grid, origin_interior_);
    return from_cloud(cloud_, grid, origin_interior_);
  }

  SupportSampledBody translated(const RVector& t) const {
    std::vector<BodySample> s = samples_;
    for (auto& x : s) {
      x.x += t;
      x.h += x.u.dot(t);
    }
    RMatrix c = cloud_.colwise() + t;
    SupportOracle o;
    if (oracle_) {
      o = [orc = oracle_, t](const RVector& u) {
        BodySample b = orc(u);
        b.x += t;
        b.h += u.dot(t);
        return b;
      };
    }
    bool interior = true;
    for (const auto& x : s) interior = interior && x.h > 0;
    return SupportSampledBody(dim_, std::move(s), interior, std::move(c), std::move(o));
  }

  /// Point reflection -K.
  SupportSampledBody negated() const {
    std::vector<BodySample> s;
    for (const auto& x : samples_) s.push_back(BodySample{-x.u, x.h, -x.x});
    SupportOracle o;
    if (oracle_) {
      o = [orc = oracle_](const RVector& u) {
        BodySample b = orc(-u);
        return BodySample{u, b.h, -b.x};
      };
    }
    return SupportSampledBody(dim_, std::move(s), origin_interior_, RMatrix(-cloud_), std::move(o));
  }

  /// Maximal width over the sample directions, which approximates the diameter.
  double diameter() const {
    double d = 0.0;
    std::vector<RVector> neg;
    for (const auto& s : samples_) neg.push_back(-s.u);
    const auto hn = support(neg);
    for (std::size_t i = 0; i < samples_.size(); ++i) d = std::max(d, samples_[i].h + hn[i]);
    return d;
  }

  /// Mean of the sample points; an interior point for reasonable samplings.
  RVector centroid() const {
    RVector c = RVector::Zero(static_cast<Eigen::Index>(dim_));
    for (const auto& s : samples_) c += s.x;
    return c / static_cast<double>(samples_.size());
  }

  /// Largest violation of <v, x_i> <= h(v) over all sample pairs.
  double consistency_residual() const {
    std::vector<RVector> dirs;
    for (const auto& s : samples_) dirs.push_back(s.u);
    RMatrix pts(static_cast<Eigen::Index>(dim_), static_cast<Eigen::Index>(samples_.size()));
    for (std::size_t i = 0; i < samples_.size(); ++i) pts.col(static_cast<Eigen::Index>(i)) = samples_[i].x;
    std::vector<double> h;
    std::vector<Eigen::Index> arg;
    detail::cloud_support(pts, dirs, h, arg);
    double worst = 0.0;
    for (std::size_t i = 0; i < samples_.size(); ++i) worst = std::max(worst, h[i] - samples_[i].h);
    return worst;
  }

 private:
  std::size_t dim_ = 0;
  std::vector<BodySample> samples_;
  bool origin_interior_ = true;
  RMatrix cloud_;
  SupportOracle oracle_;
};

/// Default sampling density for body operations.
inline DirectionGrid body_grid(std::size_t dim, std::size_t n = 0) {
  if (dim == 2) return DirectionGrid::planar(n ? n : 3600);
  return DirectionGrid::fibonacci(n ? n : 6000);
}

namespace detail {

// Bisects the direction between planar samples whose argmax points subtend
// more than max_turn from the origin, so near-flat arcs of K do not turn
// into coarse vertices of the polar. Identical argmax points (corners) and
// true flats stop at the depth limit.
inline void refine_planar(const SupportSampledBody& body, std::vector<BodySample>& s, double max_turn) {
  const auto angle = [](const RVector& a) { return std::atan2(a(1), a(0)); };
  std::sort(s.begin(), s.end(), [&](const BodySample& a, const BodySample& b) { return angle(a.u) < angle(b.u); });
  const double same = 1e-9 * std::max(1.0, body.diameter());
  std::vector<BodySample> extra;
  std::function<void(const BodySample&, const BodySample&, int)> split = [&](const BodySample& a, const BodySample& b,
                                                                             int depth) {
    if (depth == 0 || (a.x - b.x).norm() <= same) return;
    const double na = a.x.norm(), nb = b.x.norm();
    if (na < 1e-12 || nb < 1e-12) return;
    if (std::acos(std::clamp(a.x.dot(b.x) / (na * nb), -1.0, 1.0)) <= max_turn) return;
    const RVector m = a.u + b.u;
    if (m.norm() < 1e-12) return;
    const BodySample c = body.evaluate(m);
    extra.push_back(c);
    split(a, c, depth - 1);
    split(c, b, depth - 1);
  };
  for (std::size_t i = 0; i < s.size(); ++i) split(s[i], s[(i + 1) % s.size()], 20);
  s.insert(s.end(), extra.begin(), extra.end());
}

}  // namespace detail

/// K° = conv{u/h(u)}, sampled over a regular grid plus the directions of
/// K's argmax points. The latter make the polar's flats and the points of
/// polar(polar(K)) at K's sample points exact.
inline SupportSampledBody polar(const SupportSampledBody& body, std::size_t n = 0) {
  if (!body.origin_interior()) throw UsageError("polar: origin must be an interior point");
  const auto dim = static_cast<Eigen::Index>(body.dim());
  std::vector<BodySample> s = body.samples();
  if (body.has_oracle() && body.dim() == 2) detail::refine_planar(body, s, 2 * std::numbers::pi / static_cast<double>(body_grid(2, n).dirs.size()));
  RMatrix v(dim, static_cast<Eigen::Index>(s.size()));
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!(s[i].h > 0)) throw DataError("polar: non-positive support value");
    v.col(static_cast<Eigen::Index>(i)) = s[i].u / s[i].h;
  }
  DirectionGrid grid = body_grid(body.dim(), n);
  PointIndex seen(1e-9);
  for (const auto& d : grid.dirs) seen.insert(d);
  for (const auto& x : s) {
    const double nx = x.x.norm();
    if (nx < 1e-12) continue;
    const RVector d = x.x / nx;
    if (seen.find(d, 1e-12) >= 0) continue;
    seen.insert(d);
    grid.dirs.push_back(d);
  }
  return SupportSampledBody::from_cloud(std::move(v), grid, true);
}

/// K* = -K°.
inline SupportSampledBody dual(const SupportSampledBody& body, std::size_t n = 0) { return polar(body, n).negated(); }

/// Hausdorff distance max_u |h_A(u) - h_B(u)| over the sample directions of
/// both bodies and an offset grid.
inline double hausdorff(const SupportSampledBody& a, const SupportSampledBody& b) {
  if (a.dim() != b.dim()) throw UsageError("hausdorff: bodies differ in dimension");
  std::vector<RVector> dirs;
  for (const auto& s : a.samples()) dirs.push_back(s.u);
  for (const auto& s : b.samples()) dirs.push_back(s.u);
  if (a.dim() == 2) {
    const std::size_t n = 7200;
    for (std::size_t i = 0; i < n; ++i) {
      const double t = 2 * std::numbers::pi * (static_cast<double>(i) + 0.5) / static_cast<double>(n);
      RVector u(2);
      u << std::cos(t), std::sin(t);
      dirs.push_back(u);
    }
  } else {
    for (const auto& d : DirectionGrid::random_sphere(3, 5000, 99).dirs) dirs.push_back(d);
  }
  const auto ha = a.support(dirs);
  const auto hb = b.support(dirs);
  double worst = 0.0;
  for (std::size_t i = 0; i < dirs.size(); ++i) worst = std::max(worst, std::abs(ha[i] - hb[i]));
  return worst;
}

namespace detail {

inline RMatrix tangent_frame(const RVector& u) {
  const Eigen::Index k = u.size();
  RMatrix q = RMatrix::Identity(k, k);
  RMatrix a(k, k);
  a.col(0) = u;
  Eigen::Index c = 1;
  for (Eigen::Index i = 0; i < k && c < k; ++i) {
    RVector v = q.col(i);
    for (Eigen::Index j = 0; j < c; ++j) v -= a.col(j).dot(v) * a.col(j);
    if (v.norm() > 1e-6) a.col(c++) = v.normalized();
  }
  return a.rightCols(k - 1);
}

}  // namespace detail

/// Dimension of the normal cone at a boundary point x: directions u with
/// <u, x> >= h(u) - 1e-8, located around the best sampled direction and
/// probed along tangent rays.
inline std::size_t normal_cone_dim_at(const SupportSampledBody& body, const RVector& x, double tol = 1e-8) {
  if (static_cast<std::size_t>(x.size()) != body.dim()) throw UsageError("normal_cone_dim_at: point has wrong length");
  const auto g = [&](const RVector& u) { return u.dot(x) - body.support(u); };
  const auto& s = body.samples();
  std::size_t best = 0;
  double gbest = -1e300;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double gi = s[i].u.dot(x) - s[i].h;
    if (gi > gbest) gbest = gi, best = i;
  }
  const double scale = std::max(1.0, x.norm());
  if (gbest > tol * scale) throw UsageError("normal_cone_dim_at: point lies outside the body");

  // pattern search for the outer normal, shrinking from the grid spacing
  RVector u = s[best].u;
  double step = 0.05;
  while (step > 1e-10 && gbest < -tol * scale * 0.5) {
    const RMatrix t = detail::tangent_frame(u);
    bool moved = false;
    for (Eigen::Index j = 0; j < t.cols() && !moved; ++j) {
      for (double sign : {1.0, -1.0}) {
        const RVector c = (u + sign * step * t.col(j)).normalized();
        const double gc = g(c);
        if (gc > gbest) {
          u = c, gbest = gc, moved = true;
          break;
        }
      }
    }
    if (!moved) step *= 0.5;
  }
  if (gbest < -tol * scale) throw UsageError("normal_cone_dim_at: point is not on the boundary");

  // angular resolution: exact oracles resolve well below the cloud spacing
  const double n = static_cast<double>(body.has_oracle() ? 1e9 : body.cloud().cols());
  const double res = body.dim() == 2 ? std::max(1e-3, 5 * 2 * std::numbers::pi / n)
                                     : std::max(1e-3, 5 * std::sqrt(4 * std::numbers::pi / n));
  const RMatrix t = detail::tangent_frame(u);
  std::vector<RVector> probes;
  if (body.dim() == 2) {
    probes = {t.col(0), RVector(-t.col(0))};
  } else {
    for (int j = 0; j < 8; ++j) {
      const double a = std::numbers::pi * j / 4.0;
      probes.push_back(std::cos(a) * t.col(0) + std::sin(a) * t.col(1));
    }
  }
  RMatrix reach(static_cast<Eigen::Index>(body.dim()), 0);
  double arc = 0.0;
  for (const auto& p : probes) {
    auto inside = [&](double e) { return g(std::cos(e) * u + std::sin(e) * p) >= -tol * scale; };
    double lo = 0.0;
    double hi = std::numbers::pi / 2;
    if (inside(hi)) {
      lo = hi;
    } else {
      for (int it = 0; it < 50; ++it) {
        const double mid = 0.5 * (lo + hi);
        (inside(mid) ? lo : hi) = mid;
      }
    }
    arc += lo;
    if (lo > res) {
      reach.conservativeResize(Eigen::NoChange, reach.cols() + 1);
      reach.col(reach.cols() - 1) = lo * p;
    }
  }
  if (body.dim() == 2) return arc > res ? 2 : 1;
  return 1 + numerical_rank(reach, 0.2, 0.0);
}

}  // namespace jnrlab
