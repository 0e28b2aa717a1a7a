#pragma once

// Seeded randomized invariants of the hermitian core, shared by the unit
// tests and the acceptance runner. Each function returns the number of
// violated instances.

#include <cstddef>
#include <random>

#include "jnrlab/hermitian.hpp"

namespace jnrlab::props {

// Spectral decomposition of A + c1: eigenvalues shift by c, clusters and
// cluster eigenspaces are unchanged.
inline std::size_t shift_invariance(std::size_t instances, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> dim(1, 8);
  std::uniform_real_distribution<double> shift(-10.0, 10.0);
  std::size_t failures = 0;
  for (std::size_t t = 0; t < instances; ++t) {
    const std::size_t n = dim(rng);
    const auto a = random_hermitian(n, rng);
    const double c = shift(rng);
    const auto b = a.shifted(c);
    const double eps = 1e-9 * std::max(1.0, b.frobenius_norm());
    const auto da = spectral_decompose(a, eps);
    const auto db = spectral_decompose(b, eps);
    bool ok = da.clusters.size() == db.clusters.size();
    ok = ok && ((da.eigenvalues.array() + c) - db.eigenvalues.array()).abs().maxCoeff() <=
                   1e-10 * std::max(1.0, b.frobenius_norm());
    const auto ga = ground_projection(a, eps);
    const auto gb = ground_projection(b, eps);
    ok = ok && subspace_equal(ga.image, gb.image, 1e-6);
    ok = ok && std::abs(ga.eigenvalue + c - gb.eigenvalue) <= 1e-10 * std::max(1.0, b.frobenius_norm());
    if (!ok) ++failures;
  }
  return failures;
}

// Cauchy interlacing for compressions: for B with r orthonormal columns,
// lambda_i(A) <= lambda_i(B*AB) <= lambda_{i+n-r}(A), ascending order.
inline std::size_t interlacing(std::size_t instances, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> dim(2, 8);
  std::size_t failures = 0;
  for (std::size_t t = 0; t < instances; ++t) {
    const std::size_t n = dim(rng);
    std::uniform_int_distribution<std::size_t> rank(1, n);
    const std::size_t r = rank(rng);
    const auto a = random_hermitian(n, rng);
    const ProjectionNode p{random_subspace(n, r, rng), 0.0};
    const auto c = compress(a, p);
    const double tol = 1e-10 * std::max(1.0, a.frobenius_norm());
    const auto la = spectral_decompose(a, 1e-9).eigenvalues;
    const auto lc = spectral_decompose(c, 1e-9).eigenvalues;
    bool ok = true;
    for (std::size_t i = 0; i < r; ++i) {
      const auto ii = static_cast<Eigen::Index>(i);
      ok = ok && la(ii) <= lc(ii) + tol && lc(ii) <= la(ii + static_cast<Eigen::Index>(n - r)) + tol;
    }
    if (!ok) ++failures;
  }
  return failures;
}

// Lattice identities of subspace intersection and inclusion:
// U^V <= U, U^V = V^U, U^U = U, U^0 = 0, U^C^n = U, and for generic
// random subspaces dim(U^V) = max(0, dim U + dim V - n); (U^V)^W = U^(V^W)
// when W contains U.
inline std::size_t subspace_algebra(std::size_t instances, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> dim(1, 8);
  std::size_t failures = 0;
  for (std::size_t t = 0; t < instances; ++t) {
    const std::size_t n = dim(rng);
    std::uniform_int_distribution<std::size_t> sub(0, n);
    const auto u = random_subspace(n, sub(rng), rng);
    const auto v = random_subspace(n, sub(rng), rng);
    const auto uv = subspace_intersect(u, v);
    const auto vu = subspace_intersect(v, u);
    bool ok = subspace_leq(uv, u, 1e-6) && subspace_leq(uv, v, 1e-6);
    ok = ok && subspace_equal(uv, vu, 1e-6);
    ok = ok && subspace_equal(subspace_intersect(u, u), u, 1e-6);
    ok = ok && subspace_intersect(u, Subspace::zero(n)).dim() == 0;
    ok = ok && subspace_equal(subspace_intersect(u, Subspace::full(n)), u, 1e-6);
    const std::size_t generic = u.dim() + v.dim() > n ? u.dim() + v.dim() - n : 0;
    ok = ok && uv.dim() == generic;
    // a subspace built to contain u
    CMatrix wb(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(u.dim()) + 1);
    wb << u.basis(), random_unit_vector(n, rng);
    const auto w = Subspace::span_of(wb);
    ok = ok && subspace_leq(u, w, 1e-6);
    ok = ok && subspace_equal(subspace_intersect(uv, w), subspace_intersect(u, subspace_intersect(v, w)), 1e-6);
    if (!ok) ++failures;
  }
  return failures;
}

}  // namespace jnrlab::props
