#pragma once

// Operator systems spanned by the identity and hermitian generators
// F_1..F_k, their convex support cs(F) and the exposed faces of cs(F).
//
// Convention: faces are taken with outward normals. The support function is
// h(u) = lambda_max(u.F) = -lambda_-(-u.F) and the face with outward normal u
// corresponds to the ground projection p_-(-u.F), i.e. the top eigenspace of
// u.F, where u.F = sum_i u_i F_i.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <iterator>
#include <numbers>
#include <optional>
#include <utility>
#include <vector>

#include "jnrlab/directions.hpp"
#include "jnrlab/errors.hpp"
#include "jnrlab/hermitian.hpp"
#include "jnrlab/util.hpp"

namespace jnrlab {

class OperatorSystemSpec {
 public:
  OperatorSystemSpec() = default;

  explicit OperatorSystemSpec(std::vector<HermitianMatrix> generators) : gens_(std::move(generators)) {
    if (gens_.empty()) throw UsageError("OperatorSystemSpec: at least one generator required");
    n_ = gens_.front().dim();
    for (const auto& g : gens_) {
      if (g.dim() != n_) throw UsageError("OperatorSystemSpec: generators must share one size");
    }
    scale_ = 1.0;
    for (const auto& g : gens_) scale_ = std::max(scale_, g.frobenius_norm());

    // dim S_h = rank of the real Hilbert-Schmidt Gram matrix of {1, F_1..F_k}
    const auto m = static_cast<Eigen::Index>(gens_.size() + 1);
    RMatrix gram(m, m);
    auto elem = [&](Eigen::Index i) -> CMatrix {
      return i == 0 ? CMatrix(CMatrix::Identity(static_cast<Eigen::Index>(n_), static_cast<Eigen::Index>(n_)))
                    : gens_[static_cast<std::size_t>(i - 1)].matrix();
    };
    for (Eigen::Index i = 0; i < m; ++i) {
      for (Eigen::Index j = 0; j < m; ++j) gram(i, j) = (elem(i).adjoint() * elem(j)).trace().real();
    }
    Eigen::SelfAdjointEigenSolver<RMatrix> es(gram);
    const double top = es.eigenvalues().maxCoeff();
    span_dim_ = 0;
    for (Eigen::Index i = 0; i < m; ++i) {
      if (es.eigenvalues()(i) > 1e-10 * top) ++span_dim_;
    }
  }

  std::size_t n() const { return n_; }
  std::size_t k() const { return gens_.size(); }
  const std::vector<HermitianMatrix>& generators() const { return gens_; }
  /// dim_R S_h, the real span of {1, F_1, ..., F_k}.
  std::size_t real_span_dim() const { return span_dim_; }
  /// cs(F) has interior points in R^k.
  bool has_interior() const { return span_dim_ == k() + 1; }
  /// max(1, max_i ||F_i||_F); the reference scale for tolerances.
  double scale() const { return scale_; }

  CMatrix combination(const RVector& u) const {
    if (static_cast<std::size_t>(u.size()) != k()) throw UsageError("direction has wrong length");
    CMatrix a = CMatrix::Zero(static_cast<Eigen::Index>(n_), static_cast<Eigen::Index>(n_));
    for (std::size_t i = 0; i < k(); ++i) a += u(static_cast<Eigen::Index>(i)) * gens_[i].matrix();
    return a;
  }

  /// (<x, F_i x>)_i for a unit vector x.
  RVector expectation(const CVector& x) const {
    RVector y(static_cast<Eigen::Index>(k()));
    for (std::size_t i = 0; i < k(); ++i) y(static_cast<Eigen::Index>(i)) = x.dot(gens_[i].matrix() * x).real();
    return y;
  }

  /// (tr(rho F_i))_i for a density matrix rho.
  RVector expectation_state(const CMatrix& rho) const {
    RVector y(static_cast<Eigen::Index>(k()));
    for (std::size_t i = 0; i < k(); ++i) y(static_cast<Eigen::Index>(i)) = (rho * gens_[i].matrix()).trace().real();
    return y;
  }

  /// The same system with c*1 added to generator i.
  OperatorSystemSpec translated(std::size_t i, double c) const {
    auto g = gens_;
    g.at(i) = g[i].shifted(c);
    return OperatorSystemSpec(std::move(g));
  }

 private:
  std::size_t n_ = 0;
  std::vector<HermitianMatrix> gens_;
  std::size_t span_dim_ = 0;
  double scale_ = 1.0;
};

struct StatePoint {
  RVector coords;
  std::optional<CVector> witness;  // unit vector x with coords = <x, F x>
};

struct BoundarySample {
  RVector direction;
  double support = 0.0;
  StatePoint point;
};

struct ExposedFaceRecord {
  RVector direction;          // outward unit normal u
  double support = 0.0;       // h(u)
  ProjectionNode projection;  // top eigenspace of u.F
  std::size_t face_dim = 0;
  RMatrix normal_cone_lin_hull;  // k x normal_cone_dim, orthonormal columns
  std::size_t normal_cone_dim = 0;
  bool stable = true;  // cluster rank unchanged when eps_cluster is scaled by 10
  RVector center;      // image of the maximally mixed state on the face; a relative interior point
  std::vector<HermitianMatrix> face_generators;  // B* F_i B

  bool is_point() const { return face_dim == 0; }
};

namespace detail {

inline RVector normalized(const RVector& u) {
  const double n = u.norm();
  if (!(n > 0)) throw UsageError("direction must be nonzero");
  return u / n;
}

// Top spectral cluster of a: eigenvectors whose eigenvalues chain down from
// lambda_max with adjacent gaps <= eps.
inline ProjectionNode top_cluster(const Eigen::SelfAdjointEigenSolver<CMatrix>& es, double eps) {
  const auto& ev = es.eigenvalues();
  const Eigen::Index n = ev.size();
  Eigen::Index r = 1;
  while (r < n && ev(n - r) - ev(n - r - 1) <= eps) ++r;
  CMatrix basis = es.eigenvectors().rightCols(r).rowwise().reverse();
  return {Subspace(static_cast<std::size_t>(n), std::move(basis)), ev(n - 1)};
}

inline ProjectionNode top_cluster(const CMatrix& a, double eps) { return top_cluster(eigh(a), eps); }

}  // namespace detail

/// h(u) = lambda_max(u.F) and a maximizing boundary point with a top
/// eigenvector as witness.
inline std::pair<double, StatePoint> support_value(const OperatorSystemSpec& sys, const RVector& u) {
  if (static_cast<std::size_t>(u.size()) != sys.k()) throw UsageError("support_value: direction has wrong length");
  if (!(u.norm() > 0)) throw UsageError("support_value: zero direction");
  auto es = detail::eigh(sys.combination(u));
  const Eigen::Index n = es.eigenvalues().size();
  CVector x = es.eigenvectors().col(n - 1);
  RVector y = sys.expectation(x);
  return {es.eigenvalues()(n - 1), StatePoint{std::move(y), std::move(x)}};
}

/// One support evaluation per grid direction, in grid order.
inline std::vector<BoundarySample> sweep(const OperatorSystemSpec& sys, const DirectionGrid& grid) {
  std::vector<BoundarySample> out(grid.size());
  parallel_for(grid.size(), [&](std::size_t i) {
    auto [h, p] = support_value(sys, grid.dirs[i]);
    out[i] = BoundarySample{grid.dirs[i], h, std::move(p)};
  });
  return out;
}

/// sweep() and, for k > 3, refinement of the random grid: when a direction
/// and its nearest grid neighbour give boundary points farther apart than
/// flat_rel times the sampled diameter, the arc between them is bisected up
/// to depth 12. Bisection samples follow the grid samples.
inline std::vector<BoundarySample> refined_sweep(const OperatorSystemSpec& sys, const DirectionGrid& grid,
                                                 double flat_rel = 1e-3) {
  auto samples = sweep(sys, grid);
  if (sys.k() <= 3 || samples.size() < 2) return samples;
  RVector lo = samples.front().point.coords, hi = lo;
  for (const auto& s : samples) {
    lo = lo.cwiseMin(s.point.coords);
    hi = hi.cwiseMax(s.point.coords);
  }
  const double gap = flat_rel * (hi - lo).norm();
  std::vector<std::vector<BoundarySample>> extra(samples.size());
  parallel_for(samples.size(), [&](std::size_t i) {
    std::size_t nb = i == 0 ? 1 : 0;
    for (std::size_t j = 0; j < samples.size(); ++j) {
      if (j != i && samples[j].direction.dot(samples[i].direction) > samples[nb].direction.dot(samples[i].direction)) nb = j;
    }
    std::function<void(const BoundarySample&, const BoundarySample&, int)> split =
        [&](const BoundarySample& a, const BoundarySample& b, int depth) {
          if (depth == 0 || (a.point.coords - b.point.coords).norm() <= gap) return;
          const RVector m = a.direction + b.direction;
          if (!(m.norm() > 0)) return;
          auto [h, p] = support_value(sys, m.normalized());
          BoundarySample c{m.normalized(), h, std::move(p)};
          split(a, c, depth - 1);
          split(c, b, depth - 1);
          extra[i].push_back(std::move(c));
        };
    split(samples[i], samples[nb], 12);
  });
  for (auto& e : extra) std::move(e.begin(), e.end(), std::back_inserter(samples));
  return samples;
}

/// Boundary points of refined_sweep(), duplicates within 1e-9 removed.
inline std::vector<StatePoint> sample_boundary(const OperatorSystemSpec& sys, const DirectionGrid& grid,
                                               double flat_rel = 1e-3) {
  if (grid.empty()) throw UsageError("sample_boundary: empty direction grid");
  auto samples = refined_sweep(sys, grid, flat_rel);
  std::vector<StatePoint> out;
  PointIndex index(1e-9);
  for (auto& s : samples) {
    if (index.find(s.point.coords, 1e-9) >= 0) continue;
    index.insert(s.point.coords);
    out.push_back(std::move(s.point));
  }
  return out;
}

/// Basis of L = {u : (1-p)(u.F)p = 0, p(u.F)p = mu p for some mu}, the
/// linear hull of the normal cone at the face of p. If p is the top
/// eigenspace of w.F with a spectral gap, w has a neighbourhood in L inside
/// the normal cone, so dim L is the normal cone dimension.
inline RMatrix normal_cone_lin_hull(const OperatorSystemSpec& sys, const ProjectionNode& p) {
  if (p.ambient_dim() != sys.n()) throw UsageError("normal_cone_lin_hull: projection size differs from system");
  const std::size_t k = sys.k();
  if (p.rank() == 0) return RMatrix::Identity(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
  const CMatrix& b = p.image.basis();
  const Eigen::Index n = b.rows();
  const Eigen::Index r = b.cols();
  const Eigen::Index block = n * r + r * r;
  RMatrix sys_mat(2 * block, static_cast<Eigen::Index>(k + 1));
  auto put = [&](Eigen::Index col, const CMatrix& off, const CMatrix& diag) {
    Eigen::Index row = 0;
    for (Eigen::Index j = 0; j < off.cols(); ++j) {
      for (Eigen::Index i = 0; i < off.rows(); ++i) {
        sys_mat(row, col) = off(i, j).real();
        sys_mat(row + block, col) = off(i, j).imag();
        ++row;
      }
    }
    for (Eigen::Index j = 0; j < diag.cols(); ++j) {
      for (Eigen::Index i = 0; i < diag.rows(); ++i) {
        sys_mat(row, col) = diag(i, j).real();
        sys_mat(row + block, col) = diag(i, j).imag();
        ++row;
      }
    }
  };
  for (std::size_t i = 0; i < k; ++i) {
    const CMatrix fb = sys.generators()[i].matrix() * b;
    const CMatrix bfb = b.adjoint() * fb;
    put(static_cast<Eigen::Index>(i), fb - b * bfb, bfb);
  }
  put(static_cast<Eigen::Index>(k), CMatrix::Zero(n, r), -CMatrix::Identity(r, r));

  Eigen::JacobiSVD<RMatrix> svd(sys_mat, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  const double tol = 1e-9 * std::max(s.size() > 0 ? s(0) : 0.0, 1e-300);
  RMatrix null_u(static_cast<Eigen::Index>(k), 0);
  for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(k + 1); ++j) {
    const double sv = j < s.size() ? s(j) : 0.0;
    if (sv <= tol) {
      null_u.conservativeResize(Eigen::NoChange, null_u.cols() + 1);
      null_u.col(null_u.cols() - 1) = svd.matrixV().col(j).head(static_cast<Eigen::Index>(k));
    }
  }
  return real_span_basis(null_u, 1e-9);
}

/// Affine dimension of the face cs(B*F_1B, ..., B*F_kB): rank of the
/// traceless parts of the compressed generators, cutoff 1e-7 of the largest.
inline std::size_t face_dimension(const std::vector<HermitianMatrix>& compressed, double scale) {
  if (compressed.empty()) return 0;
  const Eigen::Index r = static_cast<Eigen::Index>(compressed.front().dim());
  RMatrix m(2 * r * r, static_cast<Eigen::Index>(compressed.size()));
  for (std::size_t i = 0; i < compressed.size(); ++i) {
    CMatrix c = compressed[i].matrix();
    c.diagonal().array() -= c.trace() / static_cast<double>(r);
    for (Eigen::Index a = 0; a < r * r; ++a) {
      m(a, static_cast<Eigen::Index>(i)) = c.data()[a].real();
      m(a + r * r, static_cast<Eigen::Index>(i)) = c.data()[a].imag();
    }
  }
  return numerical_rank(m, 1e-7, 1e-12 * scale);
}

struct FaceOptions {
  double eps_cluster = 0.0;  // 0 selects 1e-9 * max(1, ||u.F||_F)
};

/// The exposed face of cs(F) with outward normal u.
inline ExposedFaceRecord exposed_face(const OperatorSystemSpec& sys, const RVector& u_in, const FaceOptions& opt = {}) {
  if (static_cast<std::size_t>(u_in.size()) != sys.k()) throw UsageError("exposed_face: direction has wrong length");
  if (!(u_in.norm() > 0)) throw UsageError("exposed_face: zero direction");
  const RVector u = detail::normalized(u_in);
  const CMatrix a = sys.combination(u);
  const double eps = opt.eps_cluster > 0 ? opt.eps_cluster : cluster_tolerance(a);
  auto es = detail::eigh(a);

  ExposedFaceRecord rec;
  rec.direction = u;
  rec.projection = detail::top_cluster(es, eps);
  rec.support = rec.projection.eigenvalue;
  rec.stable = detail::top_cluster(es, 10.0 * eps).rank() == rec.projection.rank();
  for (const auto& g : sys.generators()) rec.face_generators.push_back(compress(g, rec.projection));
  rec.face_dim = face_dimension(rec.face_generators, sys.scale());
  rec.center = RVector(static_cast<Eigen::Index>(sys.k()));
  for (std::size_t i = 0; i < sys.k(); ++i) {
    rec.center(static_cast<Eigen::Index>(i)) =
        rec.face_generators[i].matrix().trace().real() / static_cast<double>(rec.projection.rank());
  }
  rec.normal_cone_lin_hull = normal_cone_lin_hull(sys, rec.projection);
  rec.normal_cone_dim = static_cast<std::size_t>(rec.normal_cone_lin_hull.cols());
  return rec;
}

/// Diagonal generators whose convex support is conv(points).
inline OperatorSystemSpec make_polytope_system(const std::vector<RVector>& points) {
  if (points.empty()) throw UsageError("make_polytope_system: empty point list");
  const auto m = points.front().size();
  std::vector<HermitianMatrix> gens;
  for (Eigen::Index i = 0; i < m; ++i) {
    std::vector<double> d;
    for (const auto& p : points) {
      if (p.size() != m) throw UsageError("make_polytope_system: points differ in dimension");
      d.push_back(p(i));
    }
    gens.push_back(HermitianMatrix::diagonal(d));
  }
  return OperatorSystemSpec(std::move(gens));
}

/// Precomputed support values over a direction grid.
struct SupportTable {
  DirectionGrid grid;
  std::vector<double> support;

  static SupportTable build(const OperatorSystemSpec& sys, const DirectionGrid& grid) {
    SupportTable t{grid, std::vector<double>(grid.size())};
    parallel_for(grid.size(), [&](std::size_t i) {
      auto es = Eigen::SelfAdjointEigenSolver<CMatrix>(sys.combination(grid.dirs[i]), Eigen::EigenvaluesOnly);
      t.support[i] = es.eigenvalues().maxCoeff();
    });
    return t;
  }
};

/// Outer membership test: <u, y> <= h(u) + eps for every grid direction.
/// One-sided; a point outside cs(F) but inside the circumscribed polytope of
/// the grid is accepted.
inline bool state_space_membership(const SupportTable& table, const RVector& y, double eps) {
  for (std::size_t i = 0; i < table.grid.size(); ++i) {
    if (table.grid.dirs[i].dot(y) > table.support[i] + eps) return false;
  }
  return true;
}

inline bool state_space_membership(const OperatorSystemSpec& sys, const RVector& y, double eps) {
  if (static_cast<std::size_t>(y.size()) != sys.k()) throw UsageError("state_space_membership: wrong point length");
  return state_space_membership(SupportTable::build(sys, DirectionGrid::standard(sys.k())), y, eps);
}

// ---------------------------------------------------------------------------
// Locating degenerate directions and walking normal cones.

namespace detail {

// Orthonormal basis of the complement of u in R^k (k x (k-1)).
inline RMatrix tangent_basis(const RVector& u) {
  const Eigen::Index k = u.size();
  RMatrix full = RMatrix::Identity(k, k);
  RMatrix m(k, k);
  m.col(0) = u;
  Eigen::Index c = 1;
  Eigen::Index e;
  u.cwiseAbs().minCoeff(&e);
  // Gram-Schmidt against u using the identity columns, most orthogonal first
  std::vector<Eigen::Index> order;
  order.push_back(e);
  for (Eigen::Index i = 0; i < k; ++i) {
    if (i != e) order.push_back(i);
  }
  for (Eigen::Index idx : order) {
    if (c == k) break;
    RVector v = full.col(idx);
    for (Eigen::Index j = 0; j < c; ++j) v -= m.col(j).dot(v) * m.col(j);
    const double nv = v.norm();
    if (nv > 1e-8) m.col(c++) = v / nv;
  }
  return m.rightCols(k - 1);
}

// Residual of "top r eigenvalues of u.F coincide": the traceless part of
// the compression of u.F to its top-r eigenspace, as a real vector. Its norm
// is zero exactly at directions where the top r eigenvalues are degenerate,
// and the vector itself is smooth in u while the cluster stays separated.
inline RVector cluster_spread(const OperatorSystemSpec& sys, const RVector& u, Eigen::Index r) {
  const CMatrix a = sys.combination(u);
  auto es = eigh(a);
  const CMatrix b = es.eigenvectors().rightCols(r);
  const CMatrix p = b * b.adjoint();
  CMatrix m = p * a * p;
  const Complex mean = m.trace() / static_cast<double>(r);
  m -= mean * p;
  RVector out(2 * m.size());
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    out(i) = m.data()[i].real();
    out(i + m.size()) = m.data()[i].imag();
  }
  return out;
}

// Levenberg-Marquardt on the cluster spread over the sphere. Returns the
// final direction when the top r eigenvalues have merged. Eigenvalues that
// only touch to second order (a tangential near-tie) also reach the target,
// but further polishing keeps sliding the direction; those are rejected.
inline std::optional<RVector> merge_top_cluster(const OperatorSystemSpec& sys, RVector u, Eigen::Index r) {
  const double target = 1e-12 * sys.scale();
  double lambda = 1e-3;
  RVector res = cluster_spread(sys, u, r);
  auto step = [&]() {
    const RMatrix t = tangent_basis(u);
    const double h = 1e-7;
    RMatrix jac(res.size(), t.cols());
    for (Eigen::Index j = 0; j < t.cols(); ++j) {
      const RVector up = normalized(u + h * t.col(j));
      const RVector um = normalized(u - h * t.col(j));
      jac.col(j) = (cluster_spread(sys, up, r) - cluster_spread(sys, um, r)) / (2 * h);
    }
    const RMatrix jtj = jac.transpose() * jac;
    const RVector g = jac.transpose() * res;
    for (int tries = 0; tries < 12; ++tries) {
      RMatrix lhs = jtj;
      lhs.diagonal().array() += lambda * std::max(1e-30, jtj.diagonal().maxCoeff());
      const RVector s = -lhs.ldlt().solve(g);
      const RVector cand = normalized(u + t * s);
      const RVector cres = cluster_spread(sys, cand, r);
      if (cres.norm() < res.norm()) {
        u = cand;
        res = cres;
        lambda = std::max(1e-12, lambda * 0.2);
        return true;
      }
      lambda *= 10.0;
    }
    return false;
  };
  for (int it = 0; it < 80 && res.norm() > target; ++it) {
    if (!step()) break;
  }
  if (res.norm() > target) return std::nullopt;
  const RVector hit = u;
  for (int it = 0; it < 40 && res.norm() > 0.0; ++it) {
    if (!step()) break;
  }
  if ((u - hit).norm() > 1e-9) return std::nullopt;
  return hit;
}

}  // namespace detail

struct DegeneracySearchOptions {
  double window = 0.05;       // relative top-gap below which a grid direction is a start
  double separation = 3.0;    // starts closer than this many grid spacings are skipped
  std::size_t max_starts = 400;
};

/// Directions where lambda_max(u.F) is degenerate, found by driving the top
/// cluster of promising grid directions to exact degeneracy. Each returned
/// direction exposes a face with a rank >= 2 projection.
inline std::vector<RVector> find_degenerate_directions(const OperatorSystemSpec& sys, const DirectionGrid& grid,
                                                       const DegeneracySearchOptions& opt = {}) {
  const Eigen::Index n = static_cast<Eigen::Index>(sys.n());
  if (n < 2 || grid.empty()) return {};
  std::vector<RVector> evals(grid.size());
  parallel_for(grid.size(), [&](std::size_t i) {
    evals[i] = Eigen::SelfAdjointEigenSolver<CMatrix>(sys.combination(grid.dirs[i]), Eigen::EigenvaluesOnly).eigenvalues();
  });
  std::vector<std::pair<double, std::size_t>> starts;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double gap = (evals[i](n - 1) - evals[i](n - 2)) / sys.scale();
    if (gap < opt.window) starts.emplace_back(gap, i);
  }
  std::sort(starts.begin(), starts.end());
  const double min_angle = opt.separation * grid.spacing();
  std::vector<RVector> tried;
  std::vector<RVector> found;
  auto near_any = [&](const std::vector<RVector>& set, const RVector& u, double ang) {
    for (const auto& v : set) {
      if (std::acos(std::clamp(u.dot(v), -1.0, 1.0)) < ang) return true;
    }
    return false;
  };
  for (const auto& [gap, i] : starts) {
    if (tried.size() >= opt.max_starts) break;
    const RVector& u0 = grid.dirs[i];
    if (near_any(tried, u0, min_angle)) continue;
    tried.push_back(u0);
    const double window = opt.window * sys.scale();
    Eigen::Index r = 1;
    while (r < n - 1 && evals[i](n - 1) - evals[i](n - 1 - r) < window) ++r;
    for (Eigen::Index rr = std::max<Eigen::Index>(r, 2); rr >= 2; --rr) {
      auto hit = detail::merge_top_cluster(sys, u0, rr);
      if (!hit) continue;
      if (!near_any(found, *hit, 1e-7)) found.push_back(*hit);
      // families of rank-rr ties can end where one more eigenvalue joins
      for (Eigen::Index up = rr + 1; up < n; ++up) {
        hit = detail::merge_top_cluster(sys, *hit, up);
        if (!hit) break;
        if (!near_any(found, *hit, 1e-7)) found.push_back(*hit);
      }
      break;
    }
  }
  return found;
}

/// Faces on the boundary of the normal cone of `rec`: for each probe ray in
/// the linear hull L (orthogonal to rec.direction), the direction where the
/// face's projection stops being contained in the top eigenspace. The face
/// exposed just inside that boundary is strictly larger than `rec`.
inline std::vector<ExposedFaceRecord> normal_cone_boundary_faces(const OperatorSystemSpec& sys,
                                                                 const ExposedFaceRecord& rec,
                                                                 std::size_t probes_3d = 12) {
  std::vector<ExposedFaceRecord> out;
  const std::size_t d = rec.normal_cone_dim;
  if (d < 2) return out;
  const RMatrix& lb = rec.normal_cone_lin_hull;
  RVector c = lb * (lb.transpose() * rec.direction);
  c = detail::normalized(c);
  // orthonormal basis of L with c removed
  RMatrix rest = lb - c * (c.transpose() * lb);
  RMatrix w_basis = real_span_basis(rest, 1e-9);

  std::vector<RVector> probes;
  if (w_basis.cols() == 1) {
    probes.push_back(w_basis.col(0));
    probes.push_back(-w_basis.col(0));
  } else if (w_basis.cols() == 2) {
    for (std::size_t j = 0; j < probes_3d; ++j) {
      const double t = 2.0 * std::numbers::pi * (static_cast<double>(j) + 0.5) / static_cast<double>(probes_3d);
      probes.push_back(std::cos(t) * w_basis.col(0) + std::sin(t) * w_basis.col(1));
    }
  } else {
    for (Eigen::Index j = 0; j < w_basis.cols(); ++j) {
      probes.push_back(w_basis.col(j));
      probes.push_back(-w_basis.col(j));
    }
    auto extra = DirectionGrid::random_sphere(static_cast<std::size_t>(w_basis.cols()), 4 * w_basis.cols(), 7);
    for (const auto& v : extra.dirs) probes.push_back(w_basis * v);
  }

  const double tight = 1e-12 * sys.scale();

  for (const auto& w : probes) {
    auto dir_at = [&](double theta) -> RVector { return std::cos(theta) * c + std::sin(theta) * w; };
    auto contains = [&](double theta) {
      const ProjectionNode top = detail::top_cluster(sys.combination(dir_at(theta)), tight);
      return subspace_leq(rec.projection.image, top.image);
    };
    if (!contains(0.0)) break;  // the witness itself is not interior; nothing to walk
    double lo = 0.0;
    double hi = std::numbers::pi - 1e-9;
    if (contains(hi)) continue;
    for (int it = 0; it < 64; ++it) {
      const double mid = 0.5 * (lo + hi);
      (contains(mid) ? lo : hi) = mid;
    }
    ExposedFaceRecord f = exposed_face(sys, dir_at(lo));
    if (f.projection.rank() <= rec.projection.rank()) continue;
    if (!subspace_leq(rec.projection.image, f.projection.image)) continue;
    bool dup = false;
    for (const auto& g : out) dup = dup || subspace_equal(g.projection.image, f.projection.image);
    if (!dup) out.push_back(std::move(f));
  }
  return out;
}

}  // namespace jnrlab
