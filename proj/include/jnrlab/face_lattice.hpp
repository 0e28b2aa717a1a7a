#pragma once

// Lattice of exposed faces of cs(F), represented by the top-eigenspace
// projections that expose them. Faces and projections correspond one to one
// and the meet of two faces is the intersection of the projection images.

#include <algorithm>
#include <cstddef>
#include <map>
#include <numbers>
#include <numeric>
#include <optional>
#include <set>
#include <vector>

#include "jnrlab/directions.hpp"
#include "jnrlab/operator_system.hpp"
#include "jnrlab/util.hpp"

namespace jnrlab {

/// Relative tolerance of the face contact tests. Faces are eigenvalue
/// clusters of width up to the cluster tolerance, so this must exceed it.
inline constexpr double kContactTol = 1e-8;

struct LatticeNode {
  enum class Kind { bottom, face, top };

  std::size_t id = 0;
  Kind kind = Kind::face;
  ProjectionNode projection;
  std::size_t face_dim = 0;
  std::size_t normal_cone_dim = 0;
  RVector center;         // relative interior point of the face
  double radius = 0.0;    // the face lies in the ball of this radius about center
  double support = 0.0;   // h at witness_dirs.front()
  std::vector<RVector> witness_dirs;
  RMatrix normal_cone_lin_hull;
  bool stable = true;  // some detection kept its rank with eps_cluster scaled by 10

  std::size_t rank() const { return projection.rank(); }
  bool proper() const { return kind == Kind::face; }
};

struct LatticeOptions {
  double eps_angle = kDefaultAngleTol;
  double eps_cluster = 0.0;  // 0 selects the per-matrix default
  bool degeneracy_search = true;
  bool boundary_search = true;
  bool refine_on_failure = true;
  std::size_t max_witnesses = 8;
};

class ProjectionLattice {
 public:
  const OperatorSystemSpec& system() const { return sys_; }
  const std::vector<LatticeNode>& nodes() const { return nodes_; }
  const LatticeNode& node(std::size_t id) const { return nodes_.at(id); }
  std::size_t bottom() const { return 0; }
  std::size_t top() const { return 1; }
  std::size_t size() const { return nodes_.size(); }

  /// Proper nodes strictly above `id` (the top node excluded).
  const std::vector<std::size_t>& above(std::size_t id) const { return above_.at(id); }

  bool leq(std::size_t a, std::size_t b) const {
    if (a == b || a == bottom() || b == top()) return true;
    if (b == bottom() || a == top()) return false;
    const auto& s = above_.at(a);
    return std::binary_search(s.begin(), s.end(), b);
  }

  /// Maximal proper nodes.
  std::vector<std::size_t> coatoms() const {
    std::vector<std::size_t> out;
    for (const auto& n : nodes_) {
      if (n.proper() && above_[n.id].empty()) out.push_back(n.id);
    }
    return out;
  }

  /// Hasse diagram edges (a, b) with b covering a.
  std::vector<std::pair<std::size_t, std::size_t>> covers() const {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    std::vector<bool> has_below(nodes_.size(), false);
    for (const auto& n : nodes_) {
      if (!n.proper()) continue;
      const auto& s = above_[n.id];
      for (std::size_t b : s) {
        has_below[b] = true;
        bool minimal = true;
        for (std::size_t c : s) {
          if (c != b && leq(c, b)) {
            minimal = false;
            break;
          }
        }
        if (minimal) out.emplace_back(n.id, b);
      }
      if (s.empty()) out.emplace_back(n.id, top());
    }
    for (const auto& n : nodes_) {
      if (n.proper() && !has_below[n.id]) out.emplace_back(bottom(), n.id);
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  /// Meet of a set of nodes as a subspace (the full space for an empty set).
  Subspace meet_image(const std::vector<std::size_t>& ids, double eps_angle) const {
    Subspace m = Subspace::full(sys_.n());
    for (std::size_t id : ids) m = subspace_intersect(m, nodes_.at(id).projection.image, eps_angle);
    return m;
  }

  /// Faces a and b share a point: h(u_a + u_b) = h(u_a) + h(u_b).
  bool in_contact(std::size_t a, std::size_t b) const {
    const auto& na = nodes_.at(a);
    const auto& nb = nodes_.at(b);
    if (!na.proper() || !nb.proper()) return false;
    if ((na.center - nb.center).norm() > na.radius + nb.radius + 1e-7 * sys_.scale()) return false;
    const RVector w = na.witness_dirs.front() + nb.witness_dirs.front();
    if (w.norm() < 1e-12) return false;
    const double hw = support_value(sys_, w).first;
    return std::abs(hw - na.support - nb.support) <= kContactTol * sys_.scale();
  }

  /// Connected components of positive-dimensional coatoms under contact.
  std::vector<std::vector<std::size_t>> clusters() const {
    std::vector<std::size_t> cs;
    for (std::size_t c : coatoms()) {
      if (nodes_[c].face_dim > 0) cs.push_back(c);
    }
    std::vector<std::size_t> parent(cs.size());
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t x) {
      while (parent[x] != x) x = parent[x] = parent[parent[x]];
      return x;
    };
    for (std::size_t i = 0; i < cs.size(); ++i) {
      for (std::size_t j = i + 1; j < cs.size(); ++j) {
        if (find(i) != find(j) && in_contact(cs[i], cs[j])) parent[find(i)] = find(j);
      }
    }
    std::map<std::size_t, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < cs.size(); ++i) groups[find(i)].push_back(cs[i]);
    std::vector<std::vector<std::size_t>> out;
    for (auto& [root, g] : groups) out.push_back(std::move(g));
    return out;
  }

  /// Smallest proper node whose face contains x, or nullopt.
  std::optional<std::size_t> smallest_face_containing(const RVector& x, double tol = 1e-9) const {
    std::optional<std::size_t> best;
    for (const auto& n : nodes_) {
      if (!n.proper()) continue;
      if ((n.center - x).norm() > n.radius + tol) continue;
      if (n.witness_dirs.front().dot(x) < n.support - tol * sys_.scale()) continue;
      if (!best || n.face_dim < nodes_[*best].face_dim ||
          (n.face_dim == nodes_[*best].face_dim && n.rank() < nodes_[*best].rank())) {
        best = n.id;
      }
    }
    return best;
  }

 private:
  friend class LatticeBuilder;
  OperatorSystemSpec sys_;
  std::vector<LatticeNode> nodes_;
  std::vector<std::vector<std::size_t>> above_;
};

namespace detail {

// min over unit w in the affine directions of face `f` of h_f(w) - <w, x>:
// positive iff x is in the relative interior of f. Only faces of dimension
// 1 and 2 are handled; others return 0.
inline double relative_interior_margin(const OperatorSystemSpec& sys, const LatticeNode& f, const RVector& x) {
  if (f.face_dim == 0 || f.face_dim > 2) return 0.0;
  std::vector<CMatrix> g;
  for (const auto& gen : sys.generators()) {
    CMatrix c = compress(gen, f.projection).matrix();
    c.diagonal().array() -= c.trace() / static_cast<double>(c.rows());
    g.push_back(std::move(c));
  }
  const Eigen::Index r = g.front().rows();
  RMatrix m(static_cast<Eigen::Index>(g.size()), 2 * r * r);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    const RMatrix re = g[i].real();
    const RMatrix im = g[i].imag();
    m.row(row).head(r * r) = re.reshaped().transpose();
    m.row(row).tail(r * r) = im.reshaped().transpose();
  }
  Eigen::JacobiSVD<RMatrix> svd(m, Eigen::ComputeThinU);
  const RMatrix dirs = svd.matrixU().leftCols(static_cast<Eigen::Index>(f.face_dim));
  auto gap = [&](const RVector& w) {
    CMatrix a = CMatrix::Zero(r, r);
    for (std::size_t i = 0; i < g.size(); ++i) a += w(static_cast<Eigen::Index>(i)) * g[i];
    const double h = Eigen::SelfAdjointEigenSolver<CMatrix>(a, Eigen::EigenvaluesOnly).eigenvalues()(r - 1);
    return h - w.dot(x - f.center);
  };
  if (f.face_dim == 1) return std::min(gap(dirs.col(0)), gap(-dirs.col(0)));
  auto at = [&](double t) { return gap(RVector(std::cos(t) * dirs.col(0) + std::sin(t) * dirs.col(1))); };
  constexpr int kScan = 64;
  const double step = 2 * std::numbers::pi / kScan;
  int best = 0;
  double best_v = at(0.0);
  for (int i = 1; i < kScan; ++i) {
    const double v = at(i * step);
    if (v < best_v) best_v = v, best = i;
  }
  // golden-section refinement around the best sample
  double lo = (best - 1) * step;
  double hi = (best + 1) * step;
  const double phi = (std::sqrt(5.0) - 1) / 2;
  double a = hi - phi * (hi - lo);
  double b = lo + phi * (hi - lo);
  double fa = at(a);
  double fb = at(b);
  for (int it = 0; it < 60; ++it) {
    if (fa < fb) {
      hi = b, b = a, fb = fa;
      a = hi - phi * (hi - lo);
      fa = at(a);
    } else {
      lo = a, a = b, fa = fb;
      b = lo + phi * (hi - lo);
      fb = at(b);
    }
  }
  return std::min({best_v, fa, fb});
}

}  // namespace detail

class LatticeBuilder {
 public:
  LatticeBuilder(const OperatorSystemSpec& sys, const LatticeOptions& opt) : opt_(opt), index_(1e-6) {
    lat_.sys_ = sys;
    LatticeNode b;
    b.kind = LatticeNode::Kind::bottom;
    b.projection = ProjectionNode{Subspace::zero(sys.n()), 0.0};
    LatticeNode t;
    t.kind = LatticeNode::Kind::top;
    t.projection = ProjectionNode{Subspace::full(sys.n()), 0.0};
    t.face_dim = sys.real_span_dim() - 1;
    add_raw(std::move(b));
    add_raw(std::move(t));
  }

  /// Adds the face exposed by rec, or records an extra witness for an
  /// existing node. Returns the node id.
  std::size_t add_face(const ExposedFaceRecord& rec) {
    if (auto id = find(rec)) {
      auto& node = lat_.nodes_[*id];
      node.stable = node.stable || rec.stable;
      if (node.witness_dirs.size() < opt_.max_witnesses) node.witness_dirs.push_back(rec.direction);
      return *id;
    }
    LatticeNode n;
    n.projection = rec.projection;
    n.face_dim = rec.face_dim;
    n.normal_cone_dim = rec.normal_cone_dim;
    n.normal_cone_lin_hull = rec.normal_cone_lin_hull;
    n.center = rec.center;
    n.support = rec.support;
    n.stable = rec.stable;
    n.witness_dirs.push_back(rec.direction);
    double r2 = 0.0;
    for (const auto& g : rec.face_generators) {
      CMatrix c = g.matrix();
      c.diagonal().array() -= c.trace() / static_cast<double>(c.rows());
      const double op = c.rows() == 1 ? 0.0 : Eigen::SelfAdjointEigenSolver<CMatrix>(c).eigenvalues().cwiseAbs().maxCoeff();
      r2 += op * op;
    }
    n.radius = std::sqrt(r2);
    const std::size_t id = add_raw(std::move(n));
    index_.insert(rec.center);
    index_ids_.push_back(id);
    if (lat_.nodes_[id].rank() >= 2) flats_.push_back(id);
    return id;
  }

  void add_grid(const DirectionGrid& grid) {
    std::vector<ExposedFaceRecord> recs(grid.size());
    FaceOptions fo{opt_.eps_cluster};
    parallel_for(grid.size(), [&](std::size_t i) { recs[i] = exposed_face(lat_.sys_, grid.dirs[i], fo); });
    for (const auto& r : recs) add_face(r);
  }

  void add_degenerate(const DirectionGrid& grid) {
    FaceOptions fo{opt_.eps_cluster};
    for (const auto& u : find_degenerate_directions(lat_.sys_, grid)) add_face(exposed_face(lat_.sys_, u, fo));
  }

  /// Walks normal cones of every node with normalConeDim >= 2 until every
  /// such node has the faces on its normal cone boundary present.
  void add_boundary_faces() {
    std::vector<std::size_t> queue;
    for (const auto& n : lat_.nodes_) {
      if (n.proper() && n.normal_cone_dim >= 2) queue.push_back(n.id);
    }
    std::set<std::size_t> done;
    while (!queue.empty()) {
      const std::size_t id = queue.back();
      queue.pop_back();
      if (!done.insert(id).second) continue;
      const LatticeNode& n = lat_.nodes_[id];
      ExposedFaceRecord rec;
      rec.direction = n.witness_dirs.front();
      rec.projection = n.projection;
      rec.normal_cone_lin_hull = n.normal_cone_lin_hull;
      rec.normal_cone_dim = n.normal_cone_dim;
      for (const auto& f : normal_cone_boundary_faces(lat_.sys_, rec)) {
        const std::size_t before = lat_.nodes_.size();
        const std::size_t nid = add_face(f);
        if (nid >= before && lat_.nodes_[nid].normal_cone_dim >= 2) queue.push_back(nid);
      }
    }
  }

  /// Adds meets of intersecting flats (rank >= 2 nodes) until closed. The
  /// sum of two witness normals exposes the intersection of their faces.
  void close_meets() {
    FaceOptions fo{opt_.eps_cluster};
    const double tol = kContactTol * lat_.sys_.scale();
    // compressed generators per flat: max of <u_a, .> over face b is the top
    // eigenvalue of their u_a-combination, and the faces meet iff it reaches h_a
    std::map<std::size_t, std::vector<CMatrix>> comp;
    auto compressed = [&](std::size_t id) -> const std::vector<CMatrix>& {
      auto it = comp.find(id);
      if (it != comp.end()) return it->second;
      std::vector<CMatrix> g;
      for (const auto& gen : lat_.sys_.generators()) g.push_back(compress(gen, lat_.nodes_[id].projection).matrix());
      return comp.emplace(id, std::move(g)).first->second;
    };
    auto reaches = [&](std::size_t a, std::size_t b) {
      const auto& g = compressed(b);
      const RVector& u = lat_.nodes_[a].witness_dirs.front();
      CMatrix m = CMatrix::Zero(g.front().rows(), g.front().cols());
      for (std::size_t i = 0; i < g.size(); ++i) m += u(static_cast<Eigen::Index>(i)) * g[i];
      const RVector ev = Eigen::SelfAdjointEigenSolver<CMatrix>(m, Eigen::EigenvaluesOnly).eigenvalues();
      return ev(ev.size() - 1) >= lat_.nodes_[a].support - tol;
    };
    std::size_t checked = 0;
    while (checked < flats_.size()) {
      const std::size_t limit = flats_.size();
      for (std::size_t i = checked; i < limit; ++i) {
        for (std::size_t j = 0; j < i; ++j) {
          const std::size_t a = flats_[i];
          const std::size_t b = flats_[j];
          const auto& na = lat_.nodes_[a];
          const auto& nb = lat_.nodes_[b];
          if ((na.center - nb.center).norm() > na.radius + nb.radius + 1e-7 * lat_.sys_.scale()) continue;
          if (!reaches(a, b) || !reaches(b, a)) continue;
          const Subspace m = subspace_intersect(na.projection.image, nb.projection.image, opt_.eps_angle);
          if (m.dim() == 0 || m.dim() == na.rank() || m.dim() == nb.rank()) continue;
          if (known(m)) continue;
          const RVector w = na.witness_dirs.front() + nb.witness_dirs.front();
          auto rec = exposed_face(lat_.sys_, w, fo);
          // near-parallel normals of a continuous family pass the contact test
          // to second order; u+v then exposes a third face, not the meet
          if (!subspace_equal(rec.projection.image, m, opt_.eps_angle)) continue;
          add_face(std::move(rec));
        }
      }
      checked = limit;
    }
  }

  void compute_order() {
    auto& nodes = lat_.nodes_;
    lat_.above_.assign(nodes.size(), {});
    const double tol = 1e-9 * lat_.sys_.scale();
    parallel_for(nodes.size(), [&](std::size_t a) {
      if (!nodes[a].proper()) return;
      for (std::size_t b : flats_) {
        if (b == a || nodes[b].rank() <= nodes[a].rank()) continue;
        if ((nodes[a].center - nodes[b].center).norm() > nodes[b].radius + tol) continue;
        if (nodes[b].witness_dirs.front().dot(nodes[a].center) < nodes[b].support - tol) continue;
        if (subspace_leq(nodes[a].projection.image, nodes[b].projection.image, opt_.eps_angle)) {
          lat_.above_[a].push_back(b);
        }
      }
      std::sort(lat_.above_[a].begin(), lat_.above_[a].end());
    });
  }

  /// Drops flats whose center lies in the relative interior of a larger
  /// face. They arise where two eigenvalues agree only to second order, so a
  /// direction a hair away from a normal cone boundary clusters both. The
  /// order is recomputed afterwards. Returns the number of dropped nodes.
  std::size_t prune_interior() {
    auto& nodes = lat_.nodes_;
    const double margin = 1e-7 * lat_.sys_.scale();
    std::vector<char> drop(nodes.size(), 0);
    parallel_for(flats_.size(), [&](std::size_t i) {
      const std::size_t a = flats_[i];
      for (std::size_t b : lat_.above_[a]) {
        if (detail::relative_interior_margin(lat_.sys_, nodes[b], nodes[a].center) > margin) {
          drop[a] = 1;
          return;
        }
      }
    });
    const auto dropped = static_cast<std::size_t>(std::count(drop.begin(), drop.end(), 1));
    if (dropped == 0) return 0;
    std::vector<LatticeNode> kept;
    for (auto& n : nodes) {
      if (!drop[n.id]) kept.push_back(std::move(n));
    }
    nodes.clear();
    index_ = PointIndex(1e-6);
    index_ids_.clear();
    flats_.clear();
    for (auto& n : kept) {
      const bool proper = n.proper();
      const RVector center = n.center;
      const std::size_t id = add_raw(std::move(n));
      if (!proper) continue;
      index_.insert(center);
      index_ids_.push_back(id);
      if (nodes[id].rank() >= 2) flats_.push_back(id);
    }
    compute_order();
    return dropped;
  }

  ProjectionLattice take() { return std::move(lat_); }

 private:
  // A node with image m exists; its center would be the normalized trace of
  // the generators compressed to m.
  bool known(const Subspace& m) const {
    RVector c(static_cast<Eigen::Index>(lat_.sys_.k()));
    const CMatrix& b = m.basis();
    for (std::size_t i = 0; i < lat_.sys_.k(); ++i) {
      const CMatrix& g = lat_.sys_.generators()[i].matrix();
      c(static_cast<Eigen::Index>(i)) = (b.adjoint() * g * b).trace().real() / static_cast<double>(m.dim());
    }
    for (long i : index_.find_all(c, 1e-7 * lat_.sys_.scale())) {
      const auto& n = lat_.nodes_[index_ids_[static_cast<std::size_t>(i)]];
      if (subspace_equal(n.projection.image, m, opt_.eps_angle)) return true;
    }
    return false;
  }

  std::optional<std::size_t> find(const ExposedFaceRecord& rec) const {
    // nested faces can share a barycenter; confirm with the projections
    for (long i : index_.find_all(rec.center, 1e-7 * lat_.sys_.scale())) {
      const auto& n = lat_.nodes_[index_ids_[static_cast<std::size_t>(i)]];
      if (subspace_equal(n.projection.image, rec.projection.image, opt_.eps_angle)) return n.id;
    }
    return std::nullopt;
  }

  std::size_t add_raw(LatticeNode n) {
    n.id = lat_.nodes_.size();
    lat_.nodes_.push_back(std::move(n));
    return lat_.nodes_.back().id;
  }

  LatticeOptions opt_;
  ProjectionLattice lat_;
  PointIndex index_;
  std::vector<std::size_t> index_ids_;
  std::vector<std::size_t> flats_;
};

namespace detail {

inline ProjectionLattice build_lattice_once(const OperatorSystemSpec& sys, const DirectionGrid& grid,
                                            const LatticeOptions& opt) {
  LatticeBuilder b(sys, opt);
  b.add_grid(grid);
  if (opt.degeneracy_search) b.add_degenerate(grid);
  if (opt.boundary_search) b.add_boundary_faces();
  b.close_meets();
  b.compute_order();
  b.prune_interior();
  return b.take();
}

}  // namespace detail

inline bool is_coatomistic(const ProjectionLattice& lat, double eps_angle = kDefaultAngleTol);

/// Exposed-face lattice sampled over `grid`. If the sampled lattice is not
/// coatomistic the grid is doubled once.
inline ProjectionLattice build_lattice(const OperatorSystemSpec& sys, const DirectionGrid& grid,
                                       const LatticeOptions& opt = {}) {
  if (grid.empty()) throw UsageError("build_lattice: empty direction grid");
  if (grid.k != sys.k()) throw UsageError("build_lattice: grid dimension differs from generator count");
  auto lat = detail::build_lattice_once(sys, grid, opt);
  if (opt.refine_on_failure && !is_coatomistic(lat, opt.eps_angle)) {
    lat = detail::build_lattice_once(sys, DirectionGrid::standard(sys.k(), 2 * grid.size()), opt);
  }
  return lat;
}

/// Every proper node is the meet of the coatoms above it, and the meet of
/// all coatoms is the bottom.
inline bool is_coatomistic(const ProjectionLattice& lat, double eps_angle) {
  const auto cs = lat.coatoms();
  if (cs.empty()) return false;
  for (const auto& n : lat.nodes()) {
    if (!n.proper()) continue;
    std::vector<std::size_t> over;
    for (std::size_t b : lat.above(n.id)) {
      if (lat.above(b).empty()) over.push_back(b);
    }
    if (over.empty()) continue;  // n is a coatom
    if (!subspace_equal(lat.meet_image(over, eps_angle), n.projection.image, eps_angle)) return false;
  }
  return lat.meet_image(cs, eps_angle).dim() == 0;
}

struct IntersectionCertificate {
  bool ok = false;
  std::vector<std::size_t> coatoms;
  RMatrix normals;  // k x d witness normals of the chosen coatoms
};

/// For a face with normalConeDim d, d coatoms above it with linearly
/// independent witness normals whose meet is the face.
inline IntersectionCertificate verify_intersection_theorem(const ProjectionLattice& lat, std::size_t id,
                                                           double eps_angle = kDefaultAngleTol) {
  const LatticeNode& n = lat.node(id);
  if (!n.proper()) throw UsageError("verify_intersection_theorem: node is not a proper face");
  IntersectionCertificate cert;
  const auto k = static_cast<Eigen::Index>(lat.system().k());
  cert.normals = RMatrix(k, 0);
  const std::size_t d = n.normal_cone_dim;
  std::vector<std::size_t> over;
  for (std::size_t b : lat.above(id)) {
    if (lat.above(b).empty()) over.push_back(b);
  }
  if (over.empty() && d == 1) {
    cert.coatoms.push_back(id);
    cert.normals.conservativeResize(Eigen::NoChange, 1);
    cert.normals.col(0) = n.witness_dirs.front();
    cert.ok = true;
    return cert;
  }
  for (std::size_t c : over) {
    if (cert.coatoms.size() == d) break;
    RMatrix trial(k, cert.normals.cols() + 1);
    trial << cert.normals, lat.node(c).witness_dirs.front();
    if (numerical_rank(trial, 1e-6) == static_cast<std::size_t>(trial.cols())) {
      cert.normals = trial;
      cert.coatoms.push_back(c);
    }
  }
  cert.ok = cert.coatoms.size() == d && subspace_equal(lat.meet_image(cert.coatoms, eps_angle), n.projection.image, eps_angle);
  return cert;
}

}  // namespace jnrlab
