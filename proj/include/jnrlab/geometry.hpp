#pragma once

// Small computational-geometry helpers: planar hull, 3D hull with volume.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <unordered_map>
#include <vector>

#include "jnrlab/errors.hpp"
#include "jnrlab/hermitian.hpp"

namespace jnrlab::geom {

/// Indices of the convex hull vertices of planar points, counterclockwise.
/// A point within tol of the chord through its neighbours is dropped.
inline std::vector<std::size_t> hull2d(const std::vector<Eigen::Vector2d>& pts, double tol = 0.0) {
  std::vector<std::size_t> idx(pts.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return pts[a].x() < pts[b].x() || (pts[a].x() == pts[b].x() && pts[a].y() < pts[b].y());
  });
  if (idx.size() < 3) return idx;
  // signed distance of a from the line o-b, positive for a left turn
  auto cross = [&](std::size_t o, std::size_t a, std::size_t b) {
    const Eigen::Vector2d u = pts[a] - pts[o];
    const Eigen::Vector2d v = pts[b] - pts[o];
    const double n = v.norm();
    return n > 0 ? (u.x() * v.y() - u.y() * v.x()) / n : 0.0;
  };
  std::vector<std::size_t> h(2 * idx.size());
  std::size_t k = 0;
  for (std::size_t i : idx) {
    while (k >= 2 && cross(h[k - 2], h[k - 1], i) <= 0) --k;
    h[k++] = i;
  }
  for (std::size_t t = idx.size() - 1, lower = k + 1; t-- > 0;) {
    const std::size_t i = idx[t];
    while (k >= lower && cross(h[k - 2], h[k - 1], i) <= 0) --k;
    h[k++] = i;
  }
  h.resize(k - 1);
  // tolerance only on the convex polygon: inside the chain a near-collinear
  // point beyond the end of a run would take a true vertex with it
  for (bool changed = true; changed && h.size() > 3;) {
    changed = false;
    for (std::size_t i = 0; i < h.size() && h.size() > 3;) {
      if (cross(h[(i + h.size() - 1) % h.size()], h[i], h[(i + 1) % h.size()]) <= tol) {
        h.erase(h.begin() + static_cast<std::ptrdiff_t>(i));
        changed = true;
      } else {
        ++i;
      }
    }
  }
  return h;
}

/// Triangulated convex hull of points in R^3 (quickhull).
class Hull3 {
 public:
  struct Face {
    std::array<std::size_t, 3> v;
    Eigen::Vector3d normal;
    double offset = 0.0;
    std::vector<std::size_t> outside;
    bool alive = true;
  };

  explicit Hull3(std::vector<Eigen::Vector3d> pts) : pts_(std::move(pts)) {
    if (pts_.size() < 4) throw UsageError("Hull3: need at least 4 points");
    double scale = 0.0;
    for (const auto& p : pts_) scale = std::max(scale, p.cwiseAbs().maxCoeff());
    eps_ = 1e-12 * std::max(1.0, scale);
    build();
  }

  const std::vector<Eigen::Vector3d>& points() const { return pts_; }

  std::vector<std::array<std::size_t, 3>> faces() const {
    std::vector<std::array<std::size_t, 3>> out;
    for (const auto& f : faces_) {
      if (f.alive) out.push_back(f.v);
    }
    return out;
  }

  std::vector<std::size_t> vertices() const {
    std::vector<std::size_t> v;
    for (const auto& f : faces_) {
      if (f.alive) v.insert(v.end(), f.v.begin(), f.v.end());
    }
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
  }

  double volume() const {
    const Eigen::Vector3d o = pts_[faces_.front().v[0]];
    double vol = 0.0;
    for (const auto& f : faces_) {
      if (!f.alive) continue;
      vol += (pts_[f.v[0]] - o).dot((pts_[f.v[1]] - o).cross(pts_[f.v[2]] - o));
    }
    return vol / 6.0;
  }

 private:
  static std::uint64_t edge_key(std::size_t a, std::size_t b) { return (static_cast<std::uint64_t>(a) << 32) | b; }

  std::size_t add_face(std::size_t a, std::size_t b, std::size_t c) {
    Face f;
    f.v = {a, b, c};
    f.normal = (pts_[b] - pts_[a]).cross(pts_[c] - pts_[a]);
    const double n = f.normal.norm();
    if (n > 0) f.normal /= n;
    f.offset = f.normal.dot(pts_[a]);
    faces_.push_back(std::move(f));
    const std::size_t id = faces_.size() - 1;
    edges_[edge_key(a, b)] = id;
    edges_[edge_key(b, c)] = id;
    edges_[edge_key(c, a)] = id;
    return id;
  }

  double dist(const Face& f, std::size_t p) const { return f.normal.dot(pts_[p]) - f.offset; }

  void build() {
    // initial simplex: extreme x pair, farthest from their line, farthest from that plane
    std::size_t i0 = 0, i1 = 0;
    for (std::size_t i = 0; i < pts_.size(); ++i) {
      if (pts_[i].x() < pts_[i0].x()) i0 = i;
      if (pts_[i].x() > pts_[i1].x()) i1 = i;
    }
    if (i0 == i1) {
      for (std::size_t i = 0; i < pts_.size(); ++i) {
        if ((pts_[i] - pts_[i0]).norm() > (pts_[i1] - pts_[i0]).norm()) i1 = i;
      }
    }
    const Eigen::Vector3d d = (pts_[i1] - pts_[i0]).normalized();
    std::size_t i2 = i0;
    double best = -1;
    for (std::size_t i = 0; i < pts_.size(); ++i) {
      const Eigen::Vector3d r = pts_[i] - pts_[i0];
      const double dd = (r - r.dot(d) * d).norm();
      if (dd > best) best = dd, i2 = i;
    }
    const Eigen::Vector3d nrm = (pts_[i1] - pts_[i0]).cross(pts_[i2] - pts_[i0]).normalized();
    std::size_t i3 = i0;
    best = -1;
    for (std::size_t i = 0; i < pts_.size(); ++i) {
      const double dd = std::abs(nrm.dot(pts_[i] - pts_[i0]));
      if (dd > best) best = dd, i3 = i;
    }
    if (best <= eps_) throw NumericError("Hull3: points are coplanar", best);
    if (nrm.dot(pts_[i3] - pts_[i0]) > 0) std::swap(i1, i2);
    add_face(i0, i1, i2);
    add_face(i0, i3, i1);
    add_face(i1, i3, i2);
    add_face(i2, i3, i0);

    std::vector<std::size_t> all(pts_.size());
    std::iota(all.begin(), all.end(), 0);
    assign(all, {0, 1, 2, 3});

    for (std::size_t fi = 0; fi < faces_.size(); ++fi) {
      while (faces_[fi].alive && !faces_[fi].outside.empty()) expand(fi);
    }
  }

  void assign(const std::vector<std::size_t>& pts, const std::vector<std::size_t>& fs) {
    for (std::size_t p : pts) {
      for (std::size_t f : fs) {
        if (faces_[f].alive && dist(faces_[f], p) > eps_) {
          faces_[f].outside.push_back(p);
          break;
        }
      }
    }
  }

  void expand(std::size_t fi) {
    const Face& f0 = faces_[fi];
    std::size_t apex = f0.outside.front();
    double far = -1;
    for (std::size_t p : f0.outside) {
      const double d = dist(f0, p);
      if (d > far) far = d, apex = p;
    }
    // visible region by flood fill over edge adjacency
    std::vector<std::size_t> visible{fi};
    std::vector<char> mark(faces_.size(), 0);
    mark[fi] = 1;
    std::vector<std::pair<std::size_t, std::size_t>> horizon;
    for (std::size_t q = 0; q < visible.size(); ++q) {
      const Face& f = faces_[visible[q]];
      for (int e = 0; e < 3; ++e) {
        const std::size_t a = f.v[static_cast<std::size_t>(e)];
        const std::size_t b = f.v[static_cast<std::size_t>((e + 1) % 3)];
        const std::size_t nb = edges_.at(edge_key(b, a));
        if (mark[nb]) continue;
        if (dist(faces_[nb], apex) > eps_) {
          mark[nb] = 1;
          visible.push_back(nb);
        } else {
          horizon.emplace_back(a, b);
        }
      }
    }
    std::vector<std::size_t> orphans;
    for (std::size_t v : visible) {
      faces_[v].alive = false;
      for (std::size_t p : faces_[v].outside) {
        if (p != apex) orphans.push_back(p);
      }
      faces_[v].outside.clear();
    }
    std::vector<std::size_t> fresh;
    for (const auto& [a, b] : horizon) fresh.push_back(add_face(a, b, apex));
    assign(orphans, fresh);
  }

  std::vector<Eigen::Vector3d> pts_;
  std::vector<Face> faces_;
  std::unordered_map<std::uint64_t, std::size_t> edges_;
  double eps_ = 0.0;
};

inline double angle_between(const RVector& a, const RVector& b) {
  const double na = a.norm();
  const double nb = b.norm();
  if (na == 0 || nb == 0) return 0.0;
  // atan2 form stays accurate for nearly parallel vectors
  const double c = a.dot(b);
  const double s = std::sqrt(std::max(0.0, na * na * nb * nb - c * c));
  return std::atan2(s, c);
}

/// Angular diameter of a set of directions (maximal pairwise angle).
inline double angular_diameter(const std::vector<RVector>& dirs) {
  double best = 0.0;
  if (dirs.size() < 2) return best;
  if (dirs.front().size() == 2) {
    // sort angles and find the largest gap; diameter = 2pi - gap, capped at pi
    std::vector<double> t;
    for (const auto& d : dirs) t.push_back(std::atan2(d(1), d(0)));
    std::sort(t.begin(), t.end());
    double gap = t.front() + 2 * std::numbers::pi - t.back();
    for (std::size_t i = 1; i < t.size(); ++i) gap = std::max(gap, t[i] - t[i - 1]);
    return std::min(std::numbers::pi, 2 * std::numbers::pi - gap);
  }
  RVector m = RVector::Zero(dirs.front().size());
  for (const auto& d : dirs) m += d.normalized();
  std::size_t far = 0;
  for (std::size_t i = 0; i < dirs.size(); ++i) {
    if (angle_between(dirs[i], m) > angle_between(dirs[far], m)) far = i;
  }
  for (const auto& d : dirs) best = std::max(best, angle_between(d, dirs[far]));
  return best;
}

}  // namespace jnrlab::geom
