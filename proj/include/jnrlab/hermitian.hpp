#pragma once

// Dense complex hermitian linear algebra: spectral decomposition with
// degeneracy clustering, ground-state projections and the subspace lattice
// operations (intersection, inclusion) used to represent projections by
// their images.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "jnrlab/errors.hpp"

namespace jnrlab {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

inline constexpr double kReconstructionTol = 1e-12;
inline constexpr double kDefaultAngleTol = 1e-8;

/// Dense n x n self-adjoint matrix. Hermiticity is checked exactly at
/// construction: entry (i,j) must be the exact conjugate of entry (j,i).
class HermitianMatrix {
 public:
  HermitianMatrix() = default;

  explicit HermitianMatrix(CMatrix m) : m_(std::move(m)) {
    if (m_.rows() < 1 || m_.rows() != m_.cols()) {
      throw UsageError("HermitianMatrix: matrix must be square with dim >= 1");
    }
    for (Eigen::Index i = 0; i < m_.rows(); ++i) {
      for (Eigen::Index j = i; j < m_.cols(); ++j) {
        if (m_(i, j) != std::conj(m_(j, i))) {
          throw DataError("HermitianMatrix: entry (" + std::to_string(i) + "," +
                          std::to_string(j) + ") is not the conjugate of its transpose");
        }
      }
    }
  }

  /// (A + A*)/2, which is hermitian bit-for-bit.
  static HermitianMatrix symmetrized(const CMatrix& a) {
    if (a.rows() != a.cols()) throw UsageError("symmetrized: matrix must be square");
    CMatrix s(a.rows(), a.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      s(i, i) = Complex(a(i, i).real(), 0.0);
      for (Eigen::Index j = i + 1; j < a.cols(); ++j) {
        const Complex v = 0.5 * (a(i, j) + std::conj(a(j, i)));
        s(i, j) = v;
        s(j, i) = std::conj(v);
      }
    }
    return HermitianMatrix(std::move(s));
  }

  static HermitianMatrix diagonal(std::span<const double> d) {
    CMatrix m = CMatrix::Zero(static_cast<Eigen::Index>(d.size()), static_cast<Eigen::Index>(d.size()));
    for (std::size_t i = 0; i < d.size(); ++i) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = d[i];
    return HermitianMatrix(std::move(m));
  }

  static HermitianMatrix identity(std::size_t n) {
    return HermitianMatrix(CMatrix::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)));
  }

  std::size_t dim() const { return static_cast<std::size_t>(m_.rows()); }
  const CMatrix& matrix() const { return m_; }
  Complex operator()(std::size_t i, std::size_t j) const {
    return m_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
  double frobenius_norm() const { return m_.norm(); }

  HermitianMatrix operator-() const { return HermitianMatrix(CMatrix(-m_)); }
  HermitianMatrix shifted(double c) const {
    CMatrix s = m_;
    s.diagonal().array() += c;
    return HermitianMatrix(std::move(s));
  }
  HermitianMatrix scaled(double c) const { return HermitianMatrix(CMatrix(c * m_)); }

 private:
  CMatrix m_;
};

/// Cluster threshold eps = 1e-9 * max(1, ||A||_F).
inline double cluster_tolerance(const CMatrix& a) { return 1e-9 * std::max(1.0, a.norm()); }
inline double cluster_tolerance(const HermitianMatrix& a) { return cluster_tolerance(a.matrix()); }

struct SpectralDecomposition {
  RVector eigenvalues;   // ascending
  CMatrix eigenvectors;  // columns, orthonormal
  std::vector<std::vector<std::size_t>> clusters;
};

namespace detail {

inline std::vector<std::vector<std::size_t>> cluster_ascending(const RVector& evals, double eps) {
  std::vector<std::vector<std::size_t>> out;
  for (Eigen::Index i = 0; i < evals.size(); ++i) {
    if (out.empty() || evals(i) - evals(i - 1) > eps) out.emplace_back();
    out.back().push_back(static_cast<std::size_t>(i));
  }
  return out;
}

// Eigen's solver reads only the lower triangle, so a numerically hermitian
// work matrix (sum of hermitian generators) is fine here.
inline Eigen::SelfAdjointEigenSolver<CMatrix> eigh(const CMatrix& a) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(a, Eigen::ComputeEigenvectors);
  if (es.info() != Eigen::Success) throw NumericError("eigensolver did not converge", a.norm());
  return es;
}

}  // namespace detail

inline SpectralDecomposition spectral_decompose(const HermitianMatrix& a, double eps_cluster) {
  if (!(eps_cluster > 0)) throw UsageError("spectral_decompose: eps_cluster must be positive");
  auto es = detail::eigh(a.matrix());
  SpectralDecomposition sd{es.eigenvalues(), es.eigenvectors(), {}};
  const double scale = std::max(1.0, a.frobenius_norm());
  const double recon =
      (a.matrix() - sd.eigenvectors * sd.eigenvalues.asDiagonal() * sd.eigenvectors.adjoint()).norm();
  if (recon > kReconstructionTol * scale) {
    throw NumericError("spectral_decompose: reconstruction residual above tolerance", recon / scale);
  }
  sd.clusters = detail::cluster_ascending(sd.eigenvalues, eps_cluster);
  return sd;
}

/// Orthonormal column basis of a subspace of C^n; zero columns means {0}.
class Subspace {
 public:
  Subspace() = default;
  Subspace(std::size_t ambient, CMatrix basis) : n_(ambient), basis_(std::move(basis)) {
    if (static_cast<std::size_t>(basis_.rows()) != n_ && basis_.cols() > 0) {
      throw UsageError("Subspace: basis rows must equal the ambient dimension");
    }
    if (basis_.cols() == 0) basis_.resize(static_cast<Eigen::Index>(n_), 0);
  }

  static Subspace zero(std::size_t n) { return Subspace(n, CMatrix(static_cast<Eigen::Index>(n), 0)); }
  static Subspace full(std::size_t n) {
    return Subspace(n, CMatrix::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)));
  }
  /// Column span of arbitrary vectors; rank decided at relative cutoff `tol`.
  static Subspace span_of(const CMatrix& vectors, double tol = 1e-10) {
    const auto n = static_cast<std::size_t>(vectors.rows());
    if (vectors.cols() == 0) return zero(n);
    Eigen::JacobiSVD<CMatrix> svd(vectors, Eigen::ComputeThinU);
    const auto& s = svd.singularValues();
    Eigen::Index r = 0;
    while (r < s.size() && s(r) > tol * std::max(1.0, s(0))) ++r;
    return Subspace(n, svd.matrixU().leftCols(r));
  }

  std::size_t ambient_dim() const { return n_; }
  std::size_t dim() const { return static_cast<std::size_t>(basis_.cols()); }
  const CMatrix& basis() const { return basis_; }
  CMatrix projector() const { return basis_ * basis_.adjoint(); }

  /// Distance of a unit vector to the subspace, ||(1 - P)x||.
  double residual(const CVector& x) const {
    if (dim() == 0) return x.norm();
    return (x - basis_ * (basis_.adjoint() * x)).norm();
  }

 private:
  std::size_t n_ = 0;
  CMatrix basis_;
};

/// An orthogonal projection stored by its image, with the eigenvalue of the
/// spectral cluster it was taken from (lambda_- for ground projections).
struct ProjectionNode {
  Subspace image;
  double eigenvalue = 0.0;

  std::size_t rank() const { return image.dim(); }
  std::size_t ambient_dim() const { return image.ambient_dim(); }
};

inline ProjectionNode ground_projection(const HermitianMatrix& a, double eps_cluster) {
  auto sd = spectral_decompose(a, eps_cluster);
  const auto& c = sd.clusters.front();
  return {Subspace(a.dim(), sd.eigenvectors.leftCols(static_cast<Eigen::Index>(c.size()))),
          sd.eigenvalues(0)};
}

namespace detail {

inline void check_same_ambient(const Subspace& u, const Subspace& v) {
  if (u.ambient_dim() != v.ambient_dim()) throw UsageError("subspace ambient dimensions differ");
}

inline Subspace orthonormalize(std::size_t n, const CMatrix& cols) {
  if (cols.cols() == 0) return Subspace::zero(n);
  Eigen::HouseholderQR<CMatrix> qr(cols);
  CMatrix q = qr.householderQ() * CMatrix::Identity(cols.rows(), cols.cols());
  return Subspace(n, std::move(q));
}

}  // namespace detail

/// Intersection via principal vectors: directions of U whose principal angle
/// to V is below eps_angle. Angles are measured by their sine, which stays
/// accurate near zero where the cosine does not.
inline Subspace subspace_intersect(const Subspace& u, const Subspace& v, double eps_angle = kDefaultAngleTol) {
  detail::check_same_ambient(u, v);
  const std::size_t n = u.ambient_dim();
  if (u.dim() == 0 || v.dim() == 0) return Subspace::zero(n);
  const CMatrix m = u.basis().adjoint() * v.basis();
  Eigen::JacobiSVD<CMatrix> svd(m, Eigen::ComputeFullU);
  const Eigen::Index candidates = std::min<Eigen::Index>(m.rows(), m.cols());
  const double max_sine = std::sin(eps_angle);
  CMatrix kept(static_cast<Eigen::Index>(n), 0);
  for (Eigen::Index i = 0; i < candidates; ++i) {
    CVector x = u.basis() * svd.matrixU().col(i);
    if (v.residual(x) < max_sine) {
      kept.conservativeResize(Eigen::NoChange, kept.cols() + 1);
      kept.col(kept.cols() - 1) = x;
    }
  }
  return detail::orthonormalize(n, kept);
}

/// Largest principal angle sine between U and V, i.e. ||(1 - P_V) B_U||_2.
inline double containment_sine(const Subspace& u, const Subspace& v) {
  detail::check_same_ambient(u, v);
  if (u.dim() == 0) return 0.0;
  if (v.dim() == 0) return 1.0;
  const CMatrix r = u.basis() - v.basis() * (v.basis().adjoint() * u.basis());
  if (r.cols() == 1) return r.norm();
  return Eigen::JacobiSVD<CMatrix>(r).singularValues()(0);
}

/// Image inclusion U <= V at angular tolerance.
inline bool subspace_leq(const Subspace& u, const Subspace& v, double eps_angle = kDefaultAngleTol) {
  if (u.dim() > v.dim()) {
    detail::check_same_ambient(u, v);
    return false;
  }
  return containment_sine(u, v) < std::sin(eps_angle);
}

inline bool subspace_equal(const Subspace& u, const Subspace& v, double eps_angle = kDefaultAngleTol) {
  return u.dim() == v.dim() && subspace_leq(u, v, eps_angle);
}

/// B* A B for the orthonormal image basis B of P.
inline HermitianMatrix compress(const HermitianMatrix& a, const ProjectionNode& p) {
  if (p.ambient_dim() != a.dim()) throw UsageError("compress: projection dimension differs from matrix");
  if (p.rank() == 0) throw UsageError("compress: empty compression");
  const CMatrix& b = p.image.basis();
  return HermitianMatrix::symmetrized(b.adjoint() * a.matrix() * b);
}

inline HermitianMatrix direct_sum(std::span<const HermitianMatrix> blocks) {
  if (blocks.empty()) throw UsageError("direct_sum: empty block list");
  Eigen::Index n = 0;
  for (const auto& b : blocks) n += static_cast<Eigen::Index>(b.dim());
  CMatrix m = CMatrix::Zero(n, n);
  Eigen::Index off = 0;
  for (const auto& b : blocks) {
    const auto d = static_cast<Eigen::Index>(b.dim());
    m.block(off, off, d, d) = b.matrix();
    off += d;
  }
  return HermitianMatrix(std::move(m));
}

/// Hermitian matrix with i.i.d. standard normal real and imaginary parts
/// above the diagonal and real normal diagonal.
template <class Rng>
HermitianMatrix random_hermitian(std::size_t n, Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  CMatrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    m(i, i) = g(rng);
    for (Eigen::Index j = i + 1; j < m.cols(); ++j) {
      const double re = g(rng);
      const double im = g(rng);
      m(i, j) = Complex(re, im);
      m(j, i) = Complex(re, -im);
    }
  }
  return HermitianMatrix(std::move(m));
}

/// Real symmetric matrix with standard Gaussian entries.
template <class Rng>
HermitianMatrix random_symmetric(std::size_t n, Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  CMatrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    m(i, i) = g(rng);
    for (Eigen::Index j = i + 1; j < m.cols(); ++j) m(i, j) = m(j, i) = g(rng);
  }
  return HermitianMatrix(std::move(m));
}

/// Haar-ish random unit vector (normalized complex Gaussian).
template <class Rng>
CVector random_unit_vector(std::size_t n, Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  CVector x(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double re = g(rng);
    const double im = g(rng);
    x(i) = Complex(re, im);
  }
  return x / x.norm();
}

/// Random subspace of the given dimension in C^n.
template <class Rng>
Subspace random_subspace(std::size_t n, std::size_t dim, Rng& rng) {
  CMatrix cols(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(dim));
  for (Eigen::Index j = 0; j < cols.cols(); ++j) cols.col(j) = random_unit_vector(n, rng);
  return detail::orthonormalize(n, cols);
}

/// Density matrix sum_i w_i v_i v_i* with random eigenbasis and a random
/// probability vector w.
template <class Rng>
CMatrix random_density_matrix(std::size_t n, Rng& rng) {
  const CMatrix u = random_subspace(n, n, rng).basis();
  std::exponential_distribution<double> e(1.0);
  RVector w(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < w.size(); ++i) w(i) = e(rng);
  w /= w.sum();
  return u * w.cast<Complex>().asDiagonal() * u.adjoint();
}

}  // namespace jnrlab
