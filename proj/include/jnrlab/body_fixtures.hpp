#pragma once

// Named convex bodies with closed-form support functions (or dense point
// clouds where no closed form is convenient).

#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "jnrlab/body.hpp"
#include "jnrlab/errors.hpp"
#include "jnrlab/operator_system.hpp"

namespace jnrlab::bodies {

namespace detail {

inline RVector v2(double x, double y) {
  RVector v(2);
  v << x, y;
  return v;
}
inline RVector v3(double x, double y, double z) {
  RVector v(3);
  v << x, y, z;
  return v;
}

// Support of the disk with centre c and radius r, for any nonzero u.
inline BodySample disk_support(const RVector& u, const RVector& c, double r) {
  const double n = u.norm();
  return BodySample{u, u.dot(c) + r * n, c + r * u / n};
}

// Lens D_+ cap D_-, D_+- with centres (-+3/2, 0) and radius 5/2; corners (0, +-2).
// Valid for non-unit u as well (support is positively homogeneous).
inline BodySample lens_support(const RVector& u) {
  const double n = u.norm();
  if (n == 0) return BodySample{u, 0.0, v2(0, 0)};
  const double ux = u(0) / n;
  if (std::abs(ux) >= 0.6) {
    // arc of the disk centred on the opposite side
    const double cx = ux > 0 ? -1.5 : 1.5;
    return disk_support(u, v2(cx, 0), 2.5);
  }
  const double y = u(1) >= 0 ? 2.0 : -2.0;
  return BodySample{u, u(1) * y, v2(0, y)};
}

}  // namespace detail

/// Lens: intersection of the disks of radius 5/2 centred at (+-3/2, 0).
inline SupportOracle lens_oracle() {
  return [](const RVector& u) { return detail::lens_support(u); };
}

/// Unit disk cut by y <= 1/2; corners t+- = (+-sqrt3/2, 1/2).
inline SupportOracle truncated_disk_oracle() {
  return [](const RVector& u) {
    if (u(1) <= 0.5) return BodySample{u, 1.0, u};
    const double s3 = std::sqrt(3.0) / 2;
    const RVector t = detail::v2(u(0) >= 0 ? s3 : -s3, 0.5);
    return BodySample{u, u.dot(t), t};
  };
}

/// Convex hull of the unit disk and the point (0, 2).
inline SupportOracle drop_oracle() {
  return [](const RVector& u) {
    if (2 * u(1) >= 1.0) return BodySample{u, 2 * u(1), detail::v2(0, 2)};
    return BodySample{u, 1.0, u};
  };
}

/// Disk D+ of radius 5/2 centred at (-3/2, 0).
inline SupportOracle disk_plus_oracle() {
  return [](const RVector& u) { return detail::disk_support(u, detail::v2(-1.5, 0), 2.5); };
}

inline SupportOracle unit_ball_oracle(std::size_t dim) {
  return [dim](const RVector& u) {
    (void)dim;
    return BodySample{u, 1.0, u};
  };
}

/// conv(B u lens x {0}) with B the unit ball of R^3.
inline SupportOracle ball_lens_hull_oracle() {
  return [](const RVector& u) {
    const RVector uxy = u.head(2);
    BodySample best{u, 1.0, u};
    if (uxy.norm() > 0) {
      const BodySample l = detail::lens_support(uxy);
      if (l.h > 1.0) best = BodySample{u, l.h, detail::v3(l.x(0), l.x(1), 0)};
    }
    return best;
  };
}

struct Disk3 {
  RVector center;
  int a;  // in-plane axes
  int b;
};

/// The eight unit disks: normal z centred at (0,+-1,+-1), normal y centred at (+-1,+-1,0).
inline std::vector<Disk3> stadium_disks() {
  std::vector<Disk3> d;
  for (double y : {1.0, -1.0}) {
    for (double z : {1.0, -1.0}) d.push_back({detail::v3(0, y, z), 0, 1});
  }
  for (double x : {1.0, -1.0}) {
    for (double y : {1.0, -1.0}) d.push_back({detail::v3(x, y, 0), 0, 2});
  }
  return d;
}

inline SupportOracle stadium_oracle() {
  return [disks = stadium_disks()](const RVector& u) {
    BodySample best{u, -1e300, u};
    for (const auto& d : disks) {
      RVector p = RVector::Zero(3);
      p(d.a) = u(d.a);
      p(d.b) = u(d.b);
      const double n = p.norm();
      const double h = u.dot(d.center) + n;
      if (h > best.h) best = BodySample{u, h, n > 0 ? RVector(d.center + p / n) : d.center};
    }
    return best;
  };
}

/// Convex hull of the torus (x^2+y^2+z^2)^2 = 4(x^2+y^2): h(u) = |u_xy| + |u|.
inline SupportOracle torus_hull_oracle() {
  return [](const RVector& u) {
    const double a = std::hypot(u(0), u(1));
    const double al = std::atan2(u(1), u(0));
    const double r = 1 + a;
    return BodySample{u, a + 1.0, detail::v3(r * std::cos(al), r * std::sin(al), u(2))};
  };
}

/// Dense boundary cloud of the torus hull cut by x cos(p) + y sin(p) <= 1,
/// p in {0, 2pi/3, 4pi/3}. Contains the tangency points (cos p, sin p, +-1).
inline RMatrix torus_truncated_cloud(int res = 240) {
  const std::array<double, 3> phis{0.0, 2 * std::numbers::pi / 3, 4 * std::numbers::pi / 3};
  auto inside = [&](double x, double y) {
    for (double p : phis) {
      if (x * std::cos(p) + y * std::sin(p) > 1 + 1e-12) return false;
    }
    return true;
  };
  std::vector<RVector> pts;
  // outer half of the tube, where the torus meets its hull
  for (int i = 0; i <= res / 2; ++i) {
    const double t = -std::numbers::pi / 2 + std::numbers::pi * i / (res / 2);
    for (int j = 0; j < res; ++j) {
      const double p = 2 * std::numbers::pi * j / res;
      const double r = 1 + std::cos(t);
      const double x = r * std::cos(p);
      const double y = r * std::sin(p);
      if (inside(x, y)) pts.push_back(detail::v3(x, y, std::sin(t)));
    }
  }
  // boundary curves of the three cut faces: sqrt(1 + s^2) = 1 + sqrt(1 - z^2)
  for (double p : phis) {
    const RVector n = detail::v3(std::cos(p), std::sin(p), 0);
    const RVector w = detail::v3(-std::sin(p), std::cos(p), 0);
    for (int i = 0; i <= res; ++i) {
      const double z = -1 + 2.0 * i / res;
      const double q = 1 + std::sqrt(std::max(0.0, 1 - z * z));
      const double s = std::sqrt(std::max(0.0, q * q - 1));
      for (double sg : {1.0, -1.0}) {
        const RVector x = n + sg * s * w + detail::v3(0, 0, z);
        if (inside(x(0), x(1))) pts.push_back(x);
      }
    }
  }
  RMatrix m(3, static_cast<Eigen::Index>(pts.size()));
  for (std::size_t i = 0; i < pts.size(); ++i) m.col(static_cast<Eigen::Index>(i)) = pts[i];
  return m;
}

/// Convex support of a system with two or three generators as a sampled
/// body, translated so the maximally mixed state sits at the origin (it is
/// an interior point whenever the system has interior).
inline SupportSampledBody system_body(const OperatorSystemSpec& sys, std::size_t n = 0) {
  if (sys.k() != 2 && sys.k() != 3) throw UsageError("system_body: need two or three generators");
  if (!sys.has_interior()) throw UsageError("system_body: convex support has no interior");
  OperatorSystemSpec centred = sys;
  for (std::size_t i = 0; i < sys.k(); ++i) {
    const double c = sys.generators()[i].matrix().trace().real() / static_cast<double>(sys.n());
    centred = centred.translated(i, -c);
  }
  SupportOracle oracle = [centred](const RVector& u) {
    const auto [h, p] = support_value(centred, u);
    return BodySample{u, h, p.coords};
  };
  return SupportSampledBody::from_oracle(sys.k(), std::move(oracle), body_grid(sys.k(), n));
}

/// Seeded random planar body: convex support of two random hermitian 3x3
/// matrices.
inline SupportSampledBody random_planar_body(std::uint64_t seed, std::size_t n = 0) {
  std::mt19937_64 rng(seed);
  std::vector<HermitianMatrix> g{random_hermitian(3, rng), random_hermitian(3, rng)};
  return system_body(OperatorSystemSpec(std::move(g)), n);
}

inline const std::vector<std::string>& names() {
  static const std::vector<std::string> n{"lens",         "truncated_disk", "drop",           "ball_lens_hull",
                                          "stadium_body", "torus_hull",     "torus_truncated"};
  return n;
}

inline std::size_t fixture_dim(const std::string& name) {
  if (name == "lens" || name == "truncated_disk" || name == "drop" || name == "disk_plus") return 2;
  return 3;
}

/// Named body sampled on the default grid of its dimension (or n directions).
inline SupportSampledBody fixture(const std::string& name, std::size_t n = 0) {
  const std::size_t dim = fixture_dim(name);
  const DirectionGrid grid = body_grid(dim, n);
  if (name == "lens") return SupportSampledBody::from_oracle(2, lens_oracle(), grid);
  if (name == "truncated_disk") return SupportSampledBody::from_oracle(2, truncated_disk_oracle(), grid);
  if (name == "drop") return SupportSampledBody::from_oracle(2, drop_oracle(), grid);
  if (name == "disk_plus") return SupportSampledBody::from_oracle(2, disk_plus_oracle(), grid);
  if (name == "ball_lens_hull") return SupportSampledBody::from_oracle(3, ball_lens_hull_oracle(), grid);
  if (name == "stadium_body") return SupportSampledBody::from_oracle(3, stadium_oracle(), grid);
  if (name == "torus_hull") return SupportSampledBody::from_oracle(3, torus_hull_oracle(), grid);
  if (name == "torus_truncated") return SupportSampledBody::from_cloud(torus_truncated_cloud(), grid);
  throw UsageError("unknown body fixture: " + name);
}

struct RuledSegment {
  RVector p;  // on the disk centred at (0,1,1)
  RVector q;  // on the disk centred at (1,1,0)
  double residual = 0.0;
};

/// Endpoints of the straight segment on the curved ruled surface of the
/// positive octant and the largest violation of the stadium body's support
/// inequalities along it (segment points must lie on the boundary plane
/// through both endpoints).
inline RuledSegment ruled_surface_check(double phi) {
  if (!(phi > 0 && phi < std::numbers::pi / 3)) throw UsageError("ruled_surface_check: phi must lie in (0, pi/3)");
  const double den = 2 - 2 * std::cos(phi) + std::cos(2 * phi);
  const double cpsi = (2 * std::cos(phi) - 1) / den;
  const double spsi = 4 * std::cos(phi) * std::pow(std::sin(phi / 2), 2) / den;
  RuledSegment r;
  r.p = detail::v3(std::cos(phi), 1 + std::sin(phi), 1);
  r.q = detail::v3(1 + spsi, 1, cpsi);
  // normal: orthogonal to the segment and to the first disk's tangent at p
  const Eigen::Vector3d d = (r.q - r.p);
  const Eigen::Vector3d tan(-std::sin(phi), std::cos(phi), 0);
  Eigen::Vector3d n = tan.cross(d).normalized();
  if (n.dot(Eigen::Vector3d(1, 1, 1)) < 0) n = -n;
  const RVector u = n;
  const double h = stadium_oracle()(u).h;
  r.residual = 0.0;
  for (int i = 0; i <= 20; ++i) {
    const RVector x = r.p + (i / 20.0) * (r.q - r.p);
    r.residual = std::max(r.residual, std::abs(u.dot(x) - h));
  }
  return r;
}

}  // namespace jnrlab::bodies
