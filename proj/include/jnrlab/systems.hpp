#pragma once

// Named operator systems used by tests, the acceptance runner and the CLI.

#include <string>
#include <vector>

#include "jnrlab/errors.hpp"
#include "jnrlab/operator_system.hpp"

namespace jnrlab::systems {

inline CMatrix pauli_x() {
  CMatrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}
inline CMatrix pauli_y() {
  CMatrix m(2, 2);
  m << 0, Complex(0, -1), Complex(0, 1), 0;
  return m;
}
inline CMatrix pauli_z() {
  CMatrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

/// Block-diagonal generators; blocks[b][i] is the i-th generator of block b.
inline OperatorSystemSpec block_system(const std::vector<std::vector<CMatrix>>& blocks) {
  if (blocks.empty()) throw UsageError("block_system: no blocks");
  const std::size_t k = blocks.front().size();
  std::vector<HermitianMatrix> gens;
  for (std::size_t i = 0; i < k; ++i) {
    std::vector<HermitianMatrix> parts;
    for (const auto& b : blocks) {
      if (b.size() != k) throw UsageError("block_system: blocks differ in generator count");
      parts.emplace_back(b[i]);
    }
    gens.push_back(direct_sum(parts));
  }
  return OperatorSystemSpec(std::move(gens));
}

/// Unit disk centred at c, lying in the plane spanned by coordinate axes a and b.
inline std::vector<CMatrix> disk_block(const RVector& c, int a, int b) {
  std::vector<CMatrix> g;
  for (Eigen::Index i = 0; i < c.size(); ++i) {
    CMatrix m = c(i) * CMatrix::Identity(2, 2);
    if (i == a) m += pauli_x();
    if (i == b) m += pauli_y();
    g.push_back(m);
  }
  return g;
}

inline std::vector<CMatrix> point_block(const RVector& p) {
  std::vector<CMatrix> g;
  for (Eigen::Index i = 0; i < p.size(); ++i) g.push_back(CMatrix::Constant(1, 1, p(i)));
  return g;
}

inline RVector vec(std::initializer_list<double> xs) {
  RVector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

/// Unit disk together with the point (0,2): F1 = sx + 0, F2 = sy + 2.
inline OperatorSystemSpec drop() { return block_system({disk_block(vec({0, 0}), 0, 1), point_block(vec({0, 2}))}); }

inline OperatorSystemSpec square() {
  return make_polytope_system({vec({1, 1}), vec({-1, 1}), vec({-1, -1}), vec({1, -1})});
}

inline OperatorSystemSpec cube() {
  std::vector<RVector> pts;
  for (int m = 0; m < 8; ++m) pts.push_back(vec({m & 1 ? 1.0 : -1.0, m & 2 ? 1.0 : -1.0, m & 4 ? 1.0 : -1.0}));
  return make_polytope_system(pts);
}

/// Convex hull of eight unit disks: horizontal ones centred at (0,+-1,+-1),
/// vertical ones (normal along y) centred at (+-1,+-1,0).
inline OperatorSystemSpec stadium() {
  std::vector<std::vector<CMatrix>> blocks;
  for (double y : {1.0, -1.0}) {
    for (double z : {1.0, -1.0}) blocks.push_back(disk_block(vec({0, y, z}), 0, 1));
  }
  for (double x : {1.0, -1.0}) {
    for (double y : {1.0, -1.0}) blocks.push_back(disk_block(vec({x, y, 0}), 0, 2));
  }
  return block_system(blocks);
}

/// Ellipsoid (Pauli triple) plus the point (0,0,2); a 3x3 system with a corner.
inline OperatorSystemSpec ellipsoid_plus_point() {
  return block_system({{pauli_x(), pauli_y(), pauli_z()}, point_block(vec({0, 0, 2}))});
}

/// Unit disk in the xy-plane plus the point (0,0,1).
inline OperatorSystemSpec ellipse_plus_point() {
  return block_system({disk_block(vec({0, 0, 0}), 0, 1), point_block(vec({0, 0, 1}))});
}

/// Disks inscribed in the faces z=0, y=0 and x=0 of the cube [0,2]^3.
inline OperatorSystemSpec three_disks() {
  return block_system({disk_block(vec({1, 1, 0}), 0, 1), disk_block(vec({1, 0, 1}), 0, 2),
                       disk_block(vec({0, 1, 1}), 1, 2)});
}

/// Disks inscribed in the faces z=0 and y=0 of the cube [0,2]^3.
inline OperatorSystemSpec two_disks() {
  return block_system({disk_block(vec({1, 1, 0}), 0, 1), disk_block(vec({1, 0, 1}), 0, 2)});
}

inline const std::vector<std::string>& names() {
  static const std::vector<std::string> n{"drop",        "square",          "cube",       "stadium",
                                          "ellipsoid_plus_point", "ellipse_plus_point", "three_disks", "two_disks"};
  return n;
}

inline OperatorSystemSpec by_name(const std::string& name) {
  if (name == "drop") return drop();
  if (name == "square") return square();
  if (name == "cube") return cube();
  if (name == "stadium") return stadium();
  if (name == "ellipsoid_plus_point") return ellipsoid_plus_point();
  if (name == "ellipse_plus_point") return ellipse_plus_point();
  if (name == "three_disks") return three_disks();
  if (name == "two_disks") return two_disks();
  throw UsageError("unknown operator system fixture: " + name);
}

}  // namespace jnrlab::systems
