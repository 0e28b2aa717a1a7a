#pragma once

// Convex supports of families of hermitian 3x3 matrices: segment and
// ellipse coatoms, corners and the non-smooth boundary points.

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

#include "jnrlab/face_lattice.hpp"
#include "jnrlab/operator_system.hpp"

namespace jnrlab {

enum class CornerKind { none, ellipsoid_plus_point, ellipse_plus_point };

inline const char* to_string(CornerKind k) {
  switch (k) {
    case CornerKind::ellipsoid_plus_point: return "ellipsoid_plus_point";
    case CornerKind::ellipse_plus_point: return "ellipse_plus_point";
    default: return "none";
  }
}

struct Jnr3x3Report {
  std::size_t k = 0;
  bool has_corner = false;
  CornerKind corner_kind = CornerKind::none;
  bool polytope = false;  // commuting generators; (s, e) does not apply
  std::size_t s = 0;      // segment coatoms
  std::size_t e = 0;      // ellipse or ellipsoid coatoms
  std::vector<RVector> non_smooth_points;
  std::size_t cluster_count = 0;
  std::size_t triple_points = 0;  // points shared by three coatoms
  std::vector<RVector> corners;

  /// (s, e) is one of the admissible configurations for cornerless k = 3.
  bool admissible() const {
    static const std::vector<std::pair<std::size_t, std::size_t>> ok{{0, 0}, {0, 1}, {0, 2}, {0, 3},
                                                                      {0, 4}, {1, 0}, {1, 1}, {1, 2}};
    return std::find(ok.begin(), ok.end(), std::make_pair(s, e)) != ok.end();
  }
};

namespace detail {

inline void add_unique(std::vector<RVector>& pts, const RVector& p, double tol) {
  for (const auto& q : pts) {
    if ((q - p).norm() <= tol) return;
  }
  pts.push_back(p);
}

inline bool commuting(const OperatorSystemSpec& sys) {
  const auto& g = sys.generators();
  for (std::size_t i = 0; i < g.size(); ++i) {
    for (std::size_t j = i + 1; j < g.size(); ++j) {
      const CMatrix c = g[i].matrix() * g[j].matrix() - g[j].matrix() * g[i].matrix();
      if (c.norm() > 1e-10 * sys.scale() * sys.scale()) return false;
    }
  }
  return true;
}

}  // namespace detail

struct PairIntersections {
  std::vector<RVector> points;
  std::size_t triple_points = 0;
};

/// Contact points of pairs of faces: a pair with witness normals u, v meets
/// iff h(u+v) = h(u) + h(v), and then the face exposed by u+v is the
/// intersection.
inline PairIntersections pair_intersections(const OperatorSystemSpec& sys,
                                            const std::vector<ExposedFaceRecord>& coatoms) {
  PairIntersections out;
  const double tol = kContactTol * sys.scale();
  for (std::size_t i = 0; i < coatoms.size(); ++i) {
    for (std::size_t j = i + 1; j < coatoms.size(); ++j) {
      const RVector w = coatoms[i].direction + coatoms[j].direction;
      if (w.norm() < 1e-12) continue;
      const double hw = support_value(sys, w).first;
      if (std::abs(hw - coatoms[i].support - coatoms[j].support) > tol) continue;
      const auto meet = exposed_face(sys, w);
      if (meet.face_dim != 0) continue;  // nearby members of a continuous family
      detail::add_unique(out.points, meet.center, 1e-7 * sys.scale());
    }
  }
  for (const auto& p : out.points) {
    std::size_t holders = 0;
    for (const auto& c : coatoms) {
      if (c.direction.dot(p) >= c.support - 1e-7 * sys.scale()) ++holders;
    }
    if (holders >= 3) ++out.triple_points;
  }
  return out;
}

/// Distinguishes the two corner configurations by the non-smooth points
/// away from the corner: none (ellipsoid and point) or a planar conic
/// (ellipse and point).
inline CornerKind corner_kind(const std::vector<RVector>& non_smooth, const std::vector<RVector>& corners, double scale) {
  if (corners.empty()) throw UsageError("corner_kind: system has no corner");
  std::vector<RVector> rest;
  for (const auto& p : non_smooth) {
    bool at_corner = false;
    for (const auto& c : corners) at_corner = at_corner || (p - c).norm() <= 1e-7 * scale;
    if (!at_corner) rest.push_back(p);
  }
  if (rest.empty()) return CornerKind::ellipsoid_plus_point;
  if (rest.size() < 8) throw NumericError("corner_kind: too few non-smooth samples to fit a conic", static_cast<double>(rest.size()));
  // plane through the samples, then a conic in plane coordinates
  RVector c = RVector::Zero(rest.front().size());
  for (const auto& p : rest) c += p;
  c /= static_cast<double>(rest.size());
  RMatrix centered(c.size(), static_cast<Eigen::Index>(rest.size()));
  for (std::size_t i = 0; i < rest.size(); ++i) centered.col(static_cast<Eigen::Index>(i)) = rest[i] - c;
  Eigen::JacobiSVD<RMatrix> svd(centered, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  if (sv.size() >= 3 && sv(2) > 1e-6 * std::max(1.0, sv(0))) {
    throw NumericError("corner_kind: non-smooth set is not planar", sv(2));
  }
  RMatrix design(static_cast<Eigen::Index>(rest.size()), 6);
  for (std::size_t i = 0; i < rest.size(); ++i) {
    const double a = svd.matrixU().col(0).dot(rest[i] - c);
    const double b = svd.matrixU().col(1).dot(rest[i] - c);
    design.row(static_cast<Eigen::Index>(i)) << a * a, a * b, b * b, a, b, 1.0;
  }
  Eigen::JacobiSVD<RMatrix> fit(design, Eigen::ComputeFullV);
  const RVector q = fit.matrixV().col(5);
  const double residual = (design * q).cwiseAbs().maxCoeff();
  if (residual > 1e-6) throw NumericError("corner_kind: non-smooth set is not a conic", residual);
  return CornerKind::ellipse_plus_point;
}

/// Face census of cs(F) for a 3x3 family.
inline Jnr3x3Report classify_3x3(const OperatorSystemSpec& sys, std::size_t grid_size = 10000) {
  if (sys.n() != 3) throw UsageError("classify_3x3: generators must be 3x3");
  if (!sys.has_interior()) {
    throw UsageError("classify_3x3: cs(F) has no interior; drop linearly dependent generators first");
  }
  Jnr3x3Report rep;
  rep.k = sys.k();
  rep.polytope = detail::commuting(sys);

  LatticeOptions opt;
  opt.refine_on_failure = false;
  const auto lat = build_lattice(sys, DirectionGrid::standard(sys.k(), grid_size), opt);

  for (const auto& n : lat.nodes()) {
    if (n.proper() && n.normal_cone_dim == sys.k()) {
      rep.has_corner = true;
      detail::add_unique(rep.corners, n.center, 1e-7 * sys.scale());
    }
  }
  std::vector<ExposedFaceRecord> flats;
  for (std::size_t c : lat.coatoms()) {
    const auto& n = lat.node(c);
    if (n.face_dim == 0) continue;
    (n.face_dim == 1 ? rep.s : rep.e) += 1;
    flats.push_back(exposed_face(sys, n.witness_dirs.front()));
  }
  const auto pi = pair_intersections(sys, flats);
  rep.non_smooth_points = pi.points;
  rep.triple_points = pi.triple_points;
  rep.cluster_count = lat.clusters().size();
  if (rep.has_corner && sys.k() == 3) rep.corner_kind = corner_kind(rep.non_smooth_points, rep.corners, sys.scale());
  return rep;
}

}  // namespace jnrlab
