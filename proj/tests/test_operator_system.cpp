#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "jnrlab/operator_system.hpp"
#include "jnrlab/systems.hpp"

using namespace jnrlab;
using Catch::Matchers::WithinAbs;
using systems::vec;

TEST_CASE("drop generator spectra") {
  const auto sys = systems::drop();
  REQUIRE(sys.n() == 3);
  REQUIRE(sys.k() == 2);
  const auto l1 = spectral_decompose(sys.generators()[0], 1e-9).eigenvalues;
  const auto l2 = spectral_decompose(sys.generators()[1], 1e-9).eigenvalues;
  CHECK_THAT(l1(0), WithinAbs(-1, 1e-14));
  CHECK_THAT(l1(2), WithinAbs(1, 1e-14));
  CHECK_THAT(l2(0), WithinAbs(-1, 1e-14));
  CHECK_THAT(l2(1), WithinAbs(1, 1e-14));
  CHECK_THAT(l2(2), WithinAbs(2, 1e-14));
  CHECK(sys.has_interior());
}

TEST_CASE("drop support values") {
  const auto sys = systems::drop();
  auto [h, p] = support_value(sys, vec({0, 1}));
  CHECK_THAT(h, WithinAbs(2.0, 1e-12));
  CHECK_THAT(p.coords(0), WithinAbs(0.0, 1e-12));
  CHECK_THAT(p.coords(1), WithinAbs(2.0, 1e-12));
  auto [h1, p1] = support_value(sys, vec({1, 0}));
  CHECK_THAT(h1, WithinAbs(1.0, 1e-12));
  CHECK_THAT(p1.coords(0), WithinAbs(1.0, 1e-12));
  CHECK_THAT(p1.coords(1), WithinAbs(0.0, 1e-12));
  CHECK_THROWS_AS(support_value(sys, vec({0, 0})), UsageError);
  CHECK_THROWS_AS(support_value(sys, vec({1, 0, 0})), UsageError);
}

TEST_CASE("drop boundary lies on disk or tangent segments") {
  const auto sys = systems::drop();
  const auto pts = sample_boundary(sys, DirectionGrid::planar(3600));
  const double s3 = std::sqrt(3.0) / 2.0;
  for (const auto& p : pts) {
    const double x = p.coords(0);
    const double y = p.coords(1);
    const bool on_disk = x * x + y * y <= 1 + 1e-9;
    // segments from (+-s3, 1/2) to (0,2): y = 2 - sqrt(3)|x|
    const bool on_segment = std::abs(y - (2 - std::sqrt(3.0) * std::abs(x))) < 1e-9 && std::abs(x) <= s3 + 1e-9;
    CHECK((on_disk || on_segment));
  }
}

TEST_CASE("drop apex face") {
  const auto sys = systems::drop();
  const auto f = exposed_face(sys, vec({0, 1}));
  CHECK(f.projection.rank() == 1);
  CHECK(f.face_dim == 0);
  CHECK(f.normal_cone_dim == 2);
  CHECK_THAT(f.center(1), WithinAbs(2.0, 1e-12));
  CHECK(std::abs(f.projection.image.basis()(2, 0)) > 1 - 1e-12);
  const auto bottom = exposed_face(sys, vec({0, -1}));
  CHECK(bottom.face_dim == 0);
  CHECK(bottom.normal_cone_dim == 1);
  CHECK_THAT(bottom.center(1), WithinAbs(-1.0, 1e-12));
}

TEST_CASE("drop tangent segment faces") {
  const auto sys = systems::drop();
  // outward normal of the right segment: (sqrt3, 1)/2
  const auto f = exposed_face(sys, vec({std::sqrt(3.0) / 2, 0.5}));
  CHECK(f.projection.rank() == 2);
  CHECK(f.face_dim == 1);
  CHECK(f.normal_cone_dim == 1);
  CHECK(f.stable);
}

TEST_CASE("compression of the drop to the disk block is the pauli pair") {
  const auto sys = systems::drop();
  CMatrix b = CMatrix::Zero(3, 2);
  b(0, 0) = 1;
  b(1, 1) = 1;
  const ProjectionNode p{Subspace(3, b), 0.0};
  CHECK((compress(sys.generators()[0], p).matrix() - systems::pauli_x()).norm() < 1e-14);
  CHECK((compress(sys.generators()[1], p).matrix() - systems::pauli_y()).norm() < 1e-14);
}

TEST_CASE("state space membership on the drop") {
  const auto sys = systems::drop();
  const auto table = SupportTable::build(sys, DirectionGrid::planar(3600));
  CHECK(state_space_membership(table, vec({0, 0}), 1e-9));
  CHECK_FALSE(state_space_membership(table, vec({0, 2.01}), 1e-6));
  std::mt19937_64 rng(3);
  for (int t = 0; t < 100; ++t) {
    CHECK(state_space_membership(table, sys.expectation_state(random_density_matrix(3, rng)), 1e-9));
  }
}

TEST_CASE("cube faces") {
  const auto sys = systems::cube();
  const auto v = exposed_face(sys, vec({1, 1, 1}));
  CHECK(v.face_dim == 0);
  CHECK(v.normal_cone_dim == 3);
  const auto e = exposed_face(sys, vec({1, 1, 0}));
  CHECK(e.face_dim == 1);
  CHECK(e.normal_cone_dim == 2);
  const auto f = exposed_face(sys, vec({0, 0, 1}));
  CHECK(f.face_dim == 2);
  CHECK(f.normal_cone_dim == 1);
  CHECK(f.projection.rank() == 4);
}

TEST_CASE("stadium system faces") {
  const auto sys = systems::stadium();
  REQUIRE(sys.n() == 16);
  const auto top = exposed_face(sys, vec({0, 0, 1}));
  CHECK(top.face_dim == 2);
  CHECK_THAT(top.support, WithinAbs(1.0, 1e-12));
  const auto side = exposed_face(sys, vec({0.5, std::sqrt(3.0) / 2, 0}));
  CHECK(side.face_dim == 2);
  CHECK_THAT(side.support, WithinAbs(1 + std::sqrt(3.0) / 2, 1e-12));
  const auto ymax = exposed_face(sys, vec({0, 1, 0}));
  CHECK(ymax.face_dim == 1);
  const auto corner = exposed_face(sys, vec({0, 1, 1}));
  CHECK(corner.face_dim == 0);
  CHECK(corner.normal_cone_dim == 2);
}

TEST_CASE("degeneracy search finds the drop segments") {
  const auto sys = systems::drop();
  const auto dirs = find_degenerate_directions(sys, DirectionGrid::planar(360));
  // exact segment normals (+-sqrt3/2, 1/2); nothing else is degenerate
  REQUIRE(dirs.size() == 2);
  for (const auto& u : dirs) {
    CHECK_THAT(std::abs(u(0)), WithinAbs(std::sqrt(3.0) / 2, 1e-9));
    CHECK_THAT(u(1), WithinAbs(0.5, 1e-9));
  }
}

TEST_CASE("normal cone boundary search from the drop apex") {
  const auto sys = systems::drop();
  const auto apex = exposed_face(sys, vec({0, 1}));
  const auto up = normal_cone_boundary_faces(sys, apex);
  REQUIRE(up.size() == 2);
  for (const auto& f : up) {
    CHECK(f.face_dim == 1);
    CHECK(f.projection.rank() == 2);
  }
}

TEST_CASE("polytope system rejects ragged points") {
  CHECK_THROWS_AS(make_polytope_system({vec({1, 2}), vec({1})}), UsageError);
  CHECK_THROWS_AS(OperatorSystemSpec(std::vector<HermitianMatrix>{}), UsageError);
}

TEST_CASE("k > 3 boundary sampling bisects wide arcs") {
  std::mt19937_64 rng(41);
  std::vector<HermitianMatrix> g;
  for (int i = 0; i < 4; ++i) g.push_back(random_hermitian(3, rng));
  const OperatorSystemSpec sys(std::move(g));
  const auto grid = DirectionGrid::standard(4, 300, 5);
  const auto coarse = sample_boundary(sys, grid, 1e9);
  const auto fine = sample_boundary(sys, grid);
  CHECK(coarse.size() <= grid.size());
  CHECK(fine.size() > coarse.size());
  std::uniform_real_distribution<double> unif(-1, 1);
  for (int t = 0; t < 50; ++t) {
    RVector u(4);
    for (int i = 0; i < 4; ++i) u(i) = unif(rng);
    const double h = support_value(sys, u).first;
    for (const auto& p : fine) CHECK(u.dot(p.coords) <= h + 1e-9);
  }
}
