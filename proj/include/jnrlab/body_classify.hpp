#pragma once

// Class membership tests for convex bodies via the exposed faces of the
// polar: C0 (every proper exposed face of K° has an exposed point),
// C (dim+1 affinely independent exposed points), C' (no non-exposed points),
// C'' (no non-exposed faces). Plus smoothness and strict convexity.

#include <algorithm>
#include <array>
#include <map>
#include <numeric>
#include <numbers>
#include <string>
#include <vector>

#include "jnrlab/body.hpp"
#include "jnrlab/geometry.hpp"

namespace jnrlab {

enum class Verdict { pass, fail, inconclusive };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    default: return "inconclusive";
  }
}

struct ClassFlag {
  Verdict verdict = Verdict::pass;
  std::vector<RVector> witnesses;  // for a fail: offending points of K°
};

struct BodyClassReport {
  ClassFlag c0, c, c_prime, c_dprime;
  bool smooth = true;
  bool strictly_convex = true;
  bool smooth_stable = true;  // unchanged under refinement
  bool strict_stable = true;
  std::size_t polar_flats = 0;
};

struct ClassifyOptions {
  std::size_t grid = 0;        // 0 selects 3600 (plane) or 6000 (space) directions
  bool refine = true;          // rerun at twice the grid; flipped verdicts become inconclusive
  double argmax_tol = 1e-8;    // argmax-set identity tolerance, relative to the body scale
  double flat_rel = 1e-2;      // argmax sets wider than this fraction of the diameter are flats
  double margin_rel = 1e-5;    // exposing margin, relative to the diameter
  double corner_angle = 0.0;   // 0 selects 0.05 rad (plane) or 0.2 rad (space)
};

namespace detail {

inline double corner_angle(const ClassifyOptions& o, std::size_t dim) {
  if (o.corner_angle > 0) return o.corner_angle;
  return dim == 2 ? 0.05 : 0.2;
}

// Angle between two points seen from the origin.
inline double subtended(const RVector& a, const RVector& b) { return geom::angle_between(a, b); }

inline double subtended_diameter(const std::vector<RVector>& pts) { return geom::angular_diameter(pts); }

// A boundary point whose normal cone spans more than theta. Samples with the
// same argmax point form one cone. In the plane a cloud hull may clip a corner
// into two nearby vertices, so each cone is united with its widest neighbour
// within rho; smooth turning spread over many vertices never adds up. In
// space a two-dimensional normal cone is an arc that no grid direction hits,
// so all cones within rho are united.
inline bool has_corner(const SupportSampledBody& k, double theta) {
  const auto& s = k.samples();
  const double diam = k.diameter();
  const double same = 1e-9 * std::max(1.0, diam);
  const double rho = 5e-3 * diam;
  PointIndex points(rho);
  std::vector<std::vector<RVector>> cones;
  std::vector<RVector> where;
  for (const auto& x : s) {
    long id = -1;
    for (long j : points.find_all(x.x, same)) id = j;
    if (id < 0) {
      id = points.insert(x.x);
      cones.emplace_back();
      where.push_back(x.x);
    }
    cones[static_cast<std::size_t>(id)].push_back(x.u);
  }
  std::vector<double> spread(cones.size());
  for (std::size_t i = 0; i < cones.size(); ++i) spread[i] = geom::angular_diameter(cones[i]);
  const std::size_t partners = k.dim() == 2 ? 1 : cones.size();
  for (std::size_t i = 0; i < cones.size(); ++i) {
    if (spread[i] > theta) return true;
    if (k.dim() == 2 && spread[i] <= theta / 2) continue;
    std::vector<std::pair<double, std::size_t>> near;
    for (long j : points.find_all(where[i], rho)) {
      if (static_cast<std::size_t>(j) != i) near.emplace_back(spread[static_cast<std::size_t>(j)], static_cast<std::size_t>(j));
    }
    std::sort(near.rbegin(), near.rend());
    std::vector<RVector> dirs = cones[i];
    for (std::size_t t = 0; t < std::min(partners, near.size()); ++t) {
      const auto& c = cones[near[t].second];
      dirs.insert(dirs.end(), c.begin(), c.end());
    }
    if (geom::angular_diameter(dirs) > theta) return true;
  }
  return false;
}

// A segment or flat on the boundary: a set of boundary points sharing one
// supporting plane whose angular diameter seen from the origin exceeds theta.
inline bool has_flat(const SupportSampledBody& k, double theta, double tol) {
  const auto& s = k.samples();
  const RMatrix& cloud = k.cloud();
  auto contact = [&](const RVector& n) {
    const RVector vals = cloud.transpose() * n;
    const double h = vals.maxCoeff();
    std::vector<RVector> pts;
    for (Eigen::Index j = 0; j < vals.size(); ++j) {
      if (vals(j) >= h - tol) pts.push_back(cloud.col(j));
    }
    return pts;
  };
  if (k.dim() == 2) {
    std::vector<std::size_t> order(s.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return std::atan2(s[a].u(1), s[a].u(0)) < std::atan2(s[b].u(1), s[b].u(0)); });
    for (std::size_t t = 0; t < order.size(); ++t) {
      const auto& a = s[order[t]];
      const auto& b = s[order[(t + 1) % order.size()]];
      if (subtended(a.x, b.x) < theta / 4) continue;
      // outward normal of the edge between consecutive argmax points
      const RVector d = b.x - a.x;
      RVector n(2);
      n << d(1), -d(0);
      if (n.dot(a.u + b.u) < 0) n = -n;
      // the edge normal tilts when an argmax point sits slightly inside a flat
      for (const RVector& w : {RVector(n.normalized()), a.u, b.u}) {
        if (subtended_diameter(contact(w)) > theta) return true;
      }
    }
    return false;
  }
  // space: the argmax points of neighbouring directions
  const double spacing = DirectionGrid{3, std::vector<RVector>(s.size())}.spacing();
  const double r = 1.5 * spacing;
  PointIndex dirs(r);
  for (const auto& x : s) dirs.insert(x.u);
  for (std::size_t i = 0; i < s.size(); ++i) {
    std::vector<RVector> pts;
    for (long j : dirs.find_all(s[i].u, r)) pts.push_back(s[static_cast<std::size_t>(j)].x);
    if (subtended_diameter(pts) > theta) {
      // confirm with the contact set of the averaged direction
      RVector m = RVector::Zero(3);
      for (long j : dirs.find_all(s[i].u, r)) m += s[static_cast<std::size_t>(j)].u;
      if (subtended_diameter(contact(m.normalized())) > theta || subtended_diameter(pts) > 2 * theta) return true;
    }
  }
  return false;
}

struct PolarFlat {
  std::vector<Eigen::Index> members;  // cloud columns of K° in the argmax set
  std::size_t dim = 0;
  std::vector<Eigen::Index> extreme;  // extreme points of the flat
  RVector normal;
};

// Exposed faces of the polar with more than one point, from the argmax sets
// of its sample directions.
inline std::vector<PolarFlat> polar_flats(const SupportSampledBody& p, double tol, double min_diam) {
  const RMatrix& v = p.cloud();
  std::map<std::vector<Eigen::Index>, RVector> sets;
  const auto& s = p.samples();
  std::vector<std::vector<Eigen::Index>> found(s.size());
  // planar clouds are stored as counterclockwise hulls, so an argmax set is
  // a run of neighbours of the argmax vertex
  std::vector<double> hs;
  std::vector<Eigen::Index> args;
  if (p.dim() == 2) {
    std::vector<RVector> dirs;
    for (const auto& x : s) dirs.push_back(x.u);
    detail::cloud_support(v, dirs, hs, args);
  }
  parallel_for(s.size(), [&](std::size_t i) {
    std::vector<Eigen::Index> m;
    if (p.dim() == 2) {
      const Eigen::Index n = v.cols();
      const auto val = [&](Eigen::Index j) { return v.col((j % n + n) % n).dot(s[i].u); };
      Eigen::Index lo = args[i], hi = args[i];
      while (hi - lo + 1 < n && val(hi + 1) >= hs[i] - tol) ++hi;
      while (hi - lo + 1 < n && val(lo - 1) >= hs[i] - tol) --lo;
      for (Eigen::Index j = lo; j <= hi; ++j) m.push_back((j % n + n) % n);
      std::sort(m.begin(), m.end());
    } else {
      const RVector vals = v.transpose() * s[i].u;
      const double h = vals.maxCoeff();
      for (Eigen::Index j = 0; j < vals.size(); ++j) {
        if (vals(j) >= h - tol) m.push_back(j);
      }
    }
    if (m.size() < 2) return;
    double diam = 0.0;
    for (Eigen::Index j : m) diam = std::max(diam, (v.col(j) - v.col(m.front())).norm());
    if (diam > min_diam) found[i] = std::move(m);
  });
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!found[i].empty()) sets.emplace(found[i], s[i].u);
  }
  std::vector<PolarFlat> out;
  for (const auto& [m, u] : sets) {
    std::vector<RVector> pts;
    for (Eigen::Index j : m) pts.push_back(v.col(j));
    double diam = 0.0;
    for (const auto& a : pts) diam = std::max(diam, (a - pts.front()).norm());
    PolarFlat f;
    f.members = m;
    f.normal = u;
    f.dim = affine_dim(pts, 1e-6, 1e-12);
    RVector c = RVector::Zero(v.rows());
    for (const auto& a : pts) c += a;
    c /= static_cast<double>(pts.size());
    RMatrix centered(v.rows(), static_cast<Eigen::Index>(pts.size()));
    for (std::size_t i = 0; i < pts.size(); ++i) centered.col(static_cast<Eigen::Index>(i)) = pts[i] - c;
    Eigen::JacobiSVD<RMatrix> svd(centered, Eigen::ComputeThinU);
    if (f.dim <= 1) {
      const RVector axis = svd.matrixU().col(0);
      Eigen::Index lo = 0, hi = 0;
      for (std::size_t i = 0; i < pts.size(); ++i) {
        const double t = axis.dot(pts[i] - c);
        if (t < axis.dot(pts[static_cast<std::size_t>(lo)] - c)) lo = static_cast<Eigen::Index>(i);
        if (t > axis.dot(pts[static_cast<std::size_t>(hi)] - c)) hi = static_cast<Eigen::Index>(i);
      }
      f.extreme = {m[static_cast<std::size_t>(lo)], m[static_cast<std::size_t>(hi)]};
      f.dim = 1;
    } else {
      std::vector<Eigen::Vector2d> plane;
      for (const auto& a : pts) plane.emplace_back(svd.matrixU().col(0).dot(a - c), svd.matrixU().col(1).dot(a - c));
      for (std::size_t h : geom::hull2d(plane, 1e-14)) f.extreme.push_back(m[h]);
    }
    out.push_back(std::move(f));
  }
  return out;
}

// Whether the polar point v_j is exposed: some sample direction with v_j in
// its argmax set leaves every point farther than rho at least eta below.
inline bool exposed_point(const SupportSampledBody& p, Eigen::Index j, double tol, double rho, double eta) {
  const RMatrix& v = p.cloud();
  const RVector x = v.col(j);
  std::vector<RVector> cands;
  for (const auto& s : p.samples()) {
    if (s.u.dot(x) >= s.h - tol) cands.push_back(s.u);
  }
  if (cands.empty()) return false;
  RVector mean = RVector::Zero(x.size());
  for (const auto& c : cands) mean += c;
  std::vector<RVector> tries;
  if (mean.norm() > 1e-12) tries.push_back(mean.normalized());
  const std::size_t stride = std::max<std::size_t>(1, cands.size() / 16);
  for (std::size_t i = 0; i < cands.size(); i += stride) tries.push_back(cands[i]);
  const RVector dist = (v.colwise() - x).colwise().norm().transpose();
  for (const auto& w : tries) {
    const RVector vals = v.transpose() * w;
    const double hx = w.dot(x);
    double rival = -1e300;
    for (Eigen::Index i = 0; i < vals.size(); ++i) {
      if (dist(i) > rho) rival = std::max(rival, vals(i));
    }
    if (hx >= vals.maxCoeff() - tol && hx - rival >= eta) return true;
  }
  return false;
}

// Argmax points of K for directions within delta of r: a sample of the face
// of K selected by r.
inline std::vector<RVector> face_sample(const SupportSampledBody& k, const RVector& r, double delta) {
  const RVector u = r.normalized();
  const RMatrix q = tangent_frame(u);
  std::vector<RVector> pts{k.evaluate(u).x};
  for (int i = 0; i < 16; ++i) {
    const double t = std::numbers::pi * i / 8;
    pts.push_back(k.evaluate(RVector(u + delta * (std::cos(t) * q.col(0) + std::sin(t) * q.col(1)))).x);
  }
  return pts;
}

// Whether the ray r, an extreme ray of the normal cone at a, is itself the
// normal cone of the face G of K it selects. G is a point, a segment or a
// flat; a segment leaves one tangent direction to test.
inline bool ray_is_normal_cone(const SupportSampledBody& k, const RVector& a, const RVector& r, double scale) {
  const double tol = 1e-6 * scale;
  std::vector<RVector> g = face_sample(k, r, 1e-7);
  g.push_back(a);
  std::size_t far = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if ((g[i] - a).norm() > (g[far] - a).norm()) far = i;
  }
  const RVector d = g[far] - a;
  if (d.norm() <= tol) return false;
  const RVector e = d.normalized();
  double lo = 0.0, hi = 0.0;
  for (const auto& x : g) {
    const RVector off = x - a;
    if ((off - off.dot(e) * e).norm() > tol) return true;
    lo = std::min(lo, off.dot(e));
    hi = std::max(hi, off.dot(e));
  }
  const RVector p = a + lo * e, b = a + hi * e;
  const RVector u = r.normalized();
  Eigen::Vector3d t = Eigen::Vector3d(u).cross(Eigen::Vector3d(e));
  for (double sign : {1.0, -1.0}) {
    const BodySample s = k.evaluate(RVector(u + sign * 1e-3 * RVector(t.normalized())));
    if (s.h - s.u.dot(p) <= 1e-9 * scale && s.h - s.u.dot(b) <= 1e-9 * scale) return false;
  }
  return true;
}

struct ExactPolarFace {
  std::vector<RVector> extreme;
  std::vector<bool> exposed;
  std::vector<RVector> hidden_edges;  // endpoint pairs of long edges that are no exposed face
};

// The face {y in K° : <y,a> = 1} for a corner a of an oracle body in space,
// which is the cross-section of the normal cone at a. Its boundary is found
// by bisection along rays from the interior point c. Membership asks for the
// argmax point to stay at a: h(y) - 1 can grow only quadratically past an
// edge, the argmax point moves linearly.
inline ExactPolarFace exact_polar_face(const SupportSampledBody& k, const RVector& a, RVector c, double diam, double rho) {
  const RMatrix q = tangent_frame(a.normalized());
  c += (1 - c.dot(a)) / a.squaredNorm() * a;
  const double same = 1e-9 * std::max(1.0, a.norm());
  const auto inside = [&](const RVector& y) {
    const BodySample s = k.evaluate(y);
    return y.norm() * s.h <= 1 + 1e-12 && (s.x - a).norm() <= same;
  };
  const auto lift = [&](const Eigen::Vector2d& z) { return RVector(c + z.x() * q.col(0) + z.y() * q.col(1)); };
  // last point inside on the ray from + s * dir
  const auto walk = [&](const Eigen::Vector2d& from, const Eigen::Vector2d& dir) {
    double lo = 0.0, hi = 2 * diam + 1;
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (lo + hi);
      (inside(lift(from + mid * dir)) ? lo : hi) = mid;
    }
    return Eigen::Vector2d(from + lo * dir);
  };
  constexpr std::size_t rays = 720;
  std::vector<Eigen::Vector2d> plane(rays);
  parallel_for(rays, [&](std::size_t i) {
    const double t = 2 * std::numbers::pi * static_cast<double>(i) / rays;
    plane[i] = walk(Eigen::Vector2d::Zero(), Eigen::Vector2d(std::cos(t), std::sin(t)));
  });
  const double collinear = 1e-8 * diam;
  auto hull = geom::hull2d(plane, collinear);
  // no ray hits the end of a straight edge: walk along each long edge,
  // moved slightly inwards, until it leaves the face
  std::vector<Eigen::Vector2d> ends;
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const Eigen::Vector2d z0 = plane[hull[i]];
    const Eigen::Vector2d z1 = plane[hull[(i + 1) % hull.size()]];
    if ((z1 - z0).norm() <= rho) continue;
    const Eigen::Vector2d d = (z1 - z0).normalized();
    const Eigen::Vector2d in(-d.y(), d.x());  // counterclockwise hull
    ends.push_back(walk(z1 + 1e-9 * diam * in, d));
    ends.push_back(walk(z0 + 1e-9 * diam * in, -d));
  }
  if (!ends.empty()) {
    plane.insert(plane.end(), ends.begin(), ends.end());
    hull = geom::hull2d(plane, collinear);
  }
  const double scale = std::max(1.0, std::max(a.norm(), diam));
  ExactPolarFace f;
  for (std::size_t h : hull) {
    f.extreme.push_back(lift(plane[h]));
    f.exposed.push_back(ray_is_normal_cone(k, a, f.extreme.back(), scale));
  }
  for (std::size_t i = 0; i < f.extreme.size(); ++i) {
    const RVector& y0 = f.extreme[i];
    const RVector& y1 = f.extreme[(i + 1) % f.extreme.size()];
    if ((y1 - y0).norm() <= rho) continue;
    // an exposed edge is the normal cone of a face of K other than {a}
    const RVector m = 0.5 * (y0 + y1);
    bool only_a = true;
    for (const auto& x : face_sample(k, m, 1e-7)) only_a = only_a && (x - a).norm() <= 1e-6 * scale;
    if (only_a) {
      f.hidden_edges.push_back(y0);
      f.hidden_edges.push_back(y1);
    }
  }
  return f;
}

struct RawVerdicts {
  bool c0 = true, c = true, cp = true, cpp = true, smooth = true, strict = true;
  std::vector<RVector> w0, w1, wp, wpp;
  std::size_t flats = 0;
};

inline RawVerdicts classify_once(const SupportSampledBody& k, const ClassifyOptions& o, std::size_t n) {
  RawVerdicts r;
  const double theta = corner_angle(o, k.dim());
  r.smooth = !has_corner(k, theta);
  r.strict = !has_flat(k, theta, o.argmax_tol * std::max(1.0, k.diameter()));

  const SupportSampledBody p = polar(k, n);
  const double diam = p.diameter();
  const double tol = o.argmax_tol * std::max(1.0, diam);
  const double rho = o.flat_rel * diam;
  const double eta = o.margin_rel * diam;
  const auto flats = polar_flats(p, tol, rho);
  r.flats = flats.size();
  std::map<Eigen::Index, bool> cache;
  auto exposed = [&](Eigen::Index j) {
    auto it = cache.find(j);
    if (it != cache.end()) return it->second;
    return cache[j] = exposed_point(p, j, tol, rho, eta);
  };
  const bool exact = k.has_oracle() && k.dim() == 3;
  // cloud artefacts: lower-dimensional argmax sets within a two-dimensional one
  const auto inside_plane_face = [&](const PolarFlat& f) {
    for (const auto& g : flats) {
      if (g.dim == 2 && std::includes(g.members.begin(), g.members.end(), f.members.begin(), f.members.end())) return true;
    }
    return false;
  };
  for (const auto& f : flats) {
    std::vector<RVector> ex;
    std::vector<RVector> nonex;
    if (exact && f.dim < 2 && inside_plane_face(f)) continue;
    if (exact && f.dim == 2) {
      // cloud column j of K° is u_j / h(u_j) for sample j of K, so the
      // members share the argmax point a
      const RVector a = k.samples()[static_cast<std::size_t>(f.members.front())].x;
      RVector c = RVector::Zero(3);
      for (Eigen::Index j : f.members) c += p.cloud().col(j);
      c /= static_cast<double>(f.members.size());
      const auto face = exact_polar_face(k, a, c, diam, rho);
      for (std::size_t i = 0; i < face.extreme.size(); ++i) (face.exposed[i] ? ex : nonex).push_back(face.extreme[i]);
      if (!face.hidden_edges.empty()) {
        r.cpp = false;
        r.wpp.insert(r.wpp.end(), face.hidden_edges.begin(), face.hidden_edges.end());
      }
    } else {
      for (Eigen::Index j : f.extreme) (exposed(j) ? ex : nonex).push_back(p.cloud().col(j));
    }
    if (ex.empty()) {
      r.c0 = false;
      r.w0.push_back(p.cloud().col(f.extreme.front()));
    }
    if (ex.empty() || affine_dim(ex, 1e-6, 1e-12) < f.dim) {
      r.c = false;
      r.w1.insert(r.w1.end(), nonex.begin(), nonex.end());
    }
    if (!nonex.empty()) {
      r.cp = false;
      r.wp.insert(r.wp.end(), nonex.begin(), nonex.end());
    }
    if (f.dim == 2 && !exact) {
      // long hull edges must themselves be exposed segments
      for (std::size_t e = 0; e < f.extreme.size(); ++e) {
        const Eigen::Index a = f.extreme[e];
        const Eigen::Index b = f.extreme[(e + 1) % f.extreme.size()];
        if ((p.cloud().col(a) - p.cloud().col(b)).norm() <= rho) continue;
        bool found = false;
        for (const auto& g : flats) {
          if (g.dim != 1) continue;
          const bool ha = std::binary_search(g.members.begin(), g.members.end(), a);
          const bool hb = std::binary_search(g.members.begin(), g.members.end(), b);
          if (ha && hb) {
            found = true;
            break;
          }
        }
        if (!found) {
          r.cpp = false;
          r.wpp.push_back(0.5 * (p.cloud().col(a) + p.cloud().col(b)));
        }
      }
    }
  }
  r.cpp = r.cpp && r.cp;
  return r;
}

inline ClassFlag merge(bool first, bool second, std::vector<RVector> w) {
  ClassFlag f;
  if (first != second) {
    f.verdict = Verdict::inconclusive;
  } else {
    f.verdict = second ? Verdict::pass : Verdict::fail;
  }
  if (f.verdict != Verdict::pass) f.witnesses = std::move(w);
  return f;
}

}  // namespace detail

/// Class tests through the exposed faces of the polar. With refinement the
/// test is rerun at twice the grid density; verdicts that change are
/// reported inconclusive.
inline BodyClassReport classify(const SupportSampledBody& body, const ClassifyOptions& o = {}) {
  if (!body.origin_interior()) throw UsageError("classify: origin must be an interior point");
  const std::size_t n = body_grid(body.dim(), o.grid).size();
  const auto a = detail::classify_once(body, o, n);
  auto b = a;
  if (o.refine) {
    const SupportSampledBody fine = body.has_oracle() ? body.resampled(body_grid(body.dim(), 2 * n)) : body;
    b = detail::classify_once(fine, o, 2 * n);
  }
  BodyClassReport rep;
  rep.c0 = detail::merge(a.c0, b.c0, b.w0);
  rep.c = detail::merge(a.c, b.c, b.w1);
  rep.c_prime = detail::merge(a.cp, b.cp, b.wp);
  rep.c_dprime = detail::merge(a.cpp, b.cpp, b.wpp);
  rep.smooth = b.smooth;
  rep.strictly_convex = b.strict;
  rep.smooth_stable = a.smooth == b.smooth;
  rep.strict_stable = a.strict == b.strict;
  rep.polar_flats = b.flats;
  return rep;
}

/// No stronger class passes while a weaker one fails.
inline bool nesting_consistent(const BodyClassReport& r) {
  const std::array<Verdict, 4> chain{r.c_dprime.verdict, r.c_prime.verdict, r.c.verdict, r.c0.verdict};
  for (std::size_t i = 0; i < chain.size(); ++i) {
    for (std::size_t j = i + 1; j < chain.size(); ++j) {
      if (chain[i] == Verdict::pass && chain[j] == Verdict::fail) return false;
    }
  }
  return true;
}

}  // namespace jnrlab
