#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "jnrlab/body.hpp"
#include "jnrlab/body_classify.hpp"
#include "jnrlab/body_fixtures.hpp"
#include "jnrlab/face_lattice.hpp"
#include "jnrlab/geometry.hpp"
#include "jnrlab/io.hpp"
#include "jnrlab/jnr3x3.hpp"
#include "jnrlab/systems.hpp"

using namespace jnrlab;
using Catch::Matchers::WithinAbs;
using systems::vec;

namespace {

// Brute-force support of a point cloud.
double brute_support(const RMatrix& cloud, const RVector& u) { return (cloud.transpose() * u).maxCoeff(); }

}  // namespace

// --- hulls -------------------------------------------------------------------

TEST_CASE("planar hull of a square with interior and edge points") {
  std::vector<Eigen::Vector2d> pts{{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0.5, 0.5}, {0.5, 0}, {0.2, 0.7}};
  auto h = geom::hull2d(pts);
  std::sort(h.begin(), h.end());
  CHECK(h == std::vector<std::size_t>{0, 1, 2, 3});
}

TEST_CASE("cube hull volume") {
  std::vector<Eigen::Vector3d> pts;
  for (double x : {-1.0, 1.0}) {
    for (double y : {-1.0, 1.0}) {
      for (double z : {-1.0, 1.0}) pts.emplace_back(x, y, z);
    }
  }
  pts.emplace_back(0.1, 0.2, -0.3);
  pts.emplace_back(1.0, 0.0, 0.0);  // on a facet
  const geom::Hull3 hull(pts);
  CHECK_THAT(hull.volume(), WithinAbs(8.0, 1e-12));
  CHECK(hull.vertices().size() == 8);
}

TEST_CASE("hull of coplanar points is rejected") {
  std::vector<Eigen::Vector3d> pts{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {1, 1, 0}, {0.5, 0.2, 0}};
  CHECK_THROWS(geom::Hull3(pts));
}

TEST_CASE("angular diameter of directions") {
  std::vector<RVector> d{vec({1, 0}), vec({0, 1}), vec({1, 1})};
  CHECK_THAT(geom::angular_diameter(d), WithinAbs(std::numbers::pi / 2, 1e-12));
}

// --- sampled bodies ----------------------------------------------------------

TEST_CASE("fixture support values") {
  const auto drop = bodies::fixture("drop");
  CHECK_THAT(drop.support(vec({0, 1})), WithinAbs(2.0, 1e-14));
  CHECK_THAT(drop.support(vec({0, -1})), WithinAbs(1.0, 1e-14));
  const auto lens = bodies::fixture("lens");
  CHECK_THAT(lens.support(vec({0, 1})), WithinAbs(2.0, 1e-14));
  CHECK_THAT(lens.support(vec({1, 0})), WithinAbs(1.0, 1e-14));
  const auto td = bodies::fixture("truncated_disk");
  CHECK_THAT(td.support(vec({0, 1})), WithinAbs(0.5, 1e-14));
  const auto st = bodies::fixture("stadium_body");
  CHECK_THAT(st.support(vec({0, 0, 1})), WithinAbs(1.0, 1e-14));
  CHECK_THAT(st.support(vec({1, 0, 0})), WithinAbs(2.0, 1e-14));
  CHECK_THROWS_AS(bodies::fixture("nope"), UsageError);
}

TEST_CASE("sample points attain their support values") {
  for (const auto& name : bodies::names()) {
    const auto b = bodies::fixture(name);
    CHECK(b.consistency_residual() <= 1e-9);
  }
}

TEST_CASE("planar cloud support agrees with brute force") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g(0, 1);
  RMatrix cloud(2, 2000);
  for (Eigen::Index i = 0; i < cloud.cols(); ++i) cloud.col(i) << 3 * g(rng), g(rng);
  const auto grid = DirectionGrid::random_sphere(2, 5000, 9);
  std::vector<double> h;
  std::vector<Eigen::Index> arg;
  detail::cloud_support(cloud, grid.dirs, h, arg);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    REQUIRE_THAT(h[i], WithinAbs(brute_support(cloud, grid.dirs[i]), 1e-14));
    REQUIRE_THAT(cloud.col(arg[i]).dot(grid.dirs[i]), WithinAbs(h[i], 1e-14));
  }
}

TEST_CASE("body rejects inconsistent samples") {
  std::vector<BodySample> s{{vec({1, 0}), 1.0, vec({0.5, 0})}};
  CHECK_THROWS_AS(SupportSampledBody(2, s), DataError);
  std::vector<BodySample> neg{{vec({1, 0}), -1.0, vec({-1, 0})}};
  CHECK_THROWS_AS(SupportSampledBody(2, neg), DataError);
  CHECK_THROWS_AS(SupportSampledBody(4, s), UsageError);
}

TEST_CASE("polar of the truncated disk is the drop") {
  const auto p = polar(bodies::fixture("truncated_disk"));
  CHECK(hausdorff(p, bodies::fixture("drop")) <= 1e-5);
}

TEST_CASE("polar is an involution on the planar fixtures") {
  for (const std::string name : {"lens", "truncated_disk", "drop", "disk_plus"}) {
    const auto k = bodies::fixture(name);
    INFO(name);
    CHECK(hausdorff(polar(polar(k)), k) <= 1e-5 * k.diameter());
  }
}

TEST_CASE("polar of the unit ball is itself") {
  const auto b = SupportSampledBody::from_oracle(3, bodies::unit_ball_oracle(3), body_grid(3, 2000));
  CHECK(hausdorff(polar(b), b) <= 2e-3);
}

TEST_CASE("polar of a shifted disk is an ellipse") {
  const auto p = polar(bodies::fixture("disk_plus"));
  double worst = 0.0;
  for (const auto& s : p.samples()) {
    const double x = s.x(0), y = s.x(1);
    worst = std::max(worst, std::abs((8 * x - 3) * (8 * x - 3) / 25 + 4 * y * y - 1));
  }
  CHECK(worst <= 1e-6);
}

TEST_CASE("polar needs the origin inside") {
  const auto shifted = bodies::fixture("drop").translated(vec({0, 3}));
  CHECK_FALSE(shifted.origin_interior());
  CHECK_THROWS_AS(polar(shifted), UsageError);
}

TEST_CASE("normal cone dimensions on the drop") {
  const auto drop = bodies::fixture("drop");
  CHECK(normal_cone_dim_at(drop, vec({0, 2})) == 2);
  CHECK(normal_cone_dim_at(drop, vec({std::sqrt(3.0) / 2, 0.5})) == 1);
  CHECK(normal_cone_dim_at(drop, vec({0, -1})) == 1);
  CHECK_THROWS_AS(normal_cone_dim_at(drop, vec({0, 2.5})), UsageError);
}

TEST_CASE("stadium corners of the cube are smooth") {
  const auto st = bodies::fixture("stadium_body");
  for (double x : {-1.0, 1.0}) {
    for (double y : {-1.0, 1.0}) {
      for (double z : {-1.0, 1.0}) CHECK(normal_cone_dim_at(st, vec({x, y, z})) == 1);
    }
  }
}

TEST_CASE("ruled surface of the stadium body") {
  for (int i = 1; i <= 20; ++i) {
    const double phi = std::numbers::pi / 3 * i / 21.0;
    CHECK(bodies::ruled_surface_check(phi).residual <= 1e-8);
  }
  CHECK_THROWS_AS(bodies::ruled_surface_check(2.0), UsageError);
}

// --- classification ----------------------------------------------------------

TEST_CASE("planar fixture verdicts") {
  const auto lens = classify(bodies::fixture("lens"));
  CHECK(lens.c0.verdict == Verdict::fail);
  CHECK_FALSE(lens.c0.witnesses.empty());
  const auto td = classify(bodies::fixture("truncated_disk"));
  CHECK(td.c0.verdict == Verdict::pass);
  CHECK(td.c.verdict == Verdict::fail);
  const auto drop = classify(bodies::fixture("drop"));
  CHECK(drop.c.verdict == Verdict::pass);
  for (const auto* r : {&lens, &td, &drop}) CHECK(nesting_consistent(*r));
}

TEST_CASE("smoothness and strict convexity of planar fixtures") {
  const auto drop = classify(bodies::fixture("drop"));
  CHECK_FALSE(drop.smooth);  // apex
  CHECK_FALSE(drop.strictly_convex);  // tangent segments
  const auto disk = classify(bodies::fixture("disk_plus"));
  CHECK(disk.smooth);
  CHECK(disk.strictly_convex);
  const auto lens = classify(bodies::fixture("lens"));
  CHECK_FALSE(lens.smooth);
  CHECK(lens.strictly_convex);
}

TEST_CASE("smooth and strictly convex are exchanged by the polar") {
  for (const std::string name : {"lens", "truncated_disk", "drop"}) {
    const auto k = bodies::fixture(name);
    const auto r = classify(k);
    const auto p = classify(polar(k));
    INFO(name);
    CHECK(r.smooth == p.strictly_convex);
    CHECK(r.strictly_convex == p.smooth);
  }
}

TEST_CASE("random planar bodies are deterministic") {
  const auto a = bodies::random_planar_body(42, 720);
  const auto b = bodies::random_planar_body(42, 720);
  REQUIRE(a.samples().size() == b.samples().size());
  for (std::size_t i = 0; i < a.samples().size(); ++i) CHECK(a.samples()[i].x == b.samples()[i].x);
  CHECK(a.origin_interior());
}

// --- lattices ----------------------------------------------------------------

TEST_CASE("drop lattice") {
  const auto lat = build_lattice(systems::drop(), DirectionGrid::planar(720));
  CHECK(is_coatomistic(lat));
  std::size_t apex = 0;
  for (const auto& n : lat.nodes()) {
    if (!n.proper() || n.normal_cone_dim != 2) continue;
    ++apex;
    CHECK_THAT(n.center(1), WithinAbs(2.0, 1e-9));
    const auto cert = verify_intersection_theorem(lat, n.id);
    CHECK(cert.ok);
    CHECK(cert.coatoms.size() == 2);
  }
  CHECK(apex == 1);
  std::size_t segments = 0;
  for (std::size_t c : lat.coatoms()) segments += lat.node(c).face_dim == 1;
  CHECK(segments == 2);
}

TEST_CASE("cube lattice") {
  const auto lat = build_lattice(systems::cube(), DirectionGrid::fibonacci(2000));
  std::size_t facets = 0, corners = 0;
  for (std::size_t c : lat.coatoms()) facets += lat.node(c).face_dim == 2;
  for (const auto& n : lat.nodes()) corners += n.proper() && n.normal_cone_dim == 3;
  CHECK(facets == 6);
  CHECK(corners == 8);
  CHECK(is_coatomistic(lat));
  for (const auto& n : lat.nodes()) {
    if (n.proper() && n.normal_cone_dim == 3) CHECK(verify_intersection_theorem(lat, n.id).ok);
  }
}

TEST_CASE("square lattice") {
  const auto lat = build_lattice(systems::square(), DirectionGrid::planar(720));
  std::size_t edges = 0;
  for (std::size_t c : lat.coatoms()) edges += lat.node(c).face_dim == 1;
  CHECK(edges == 4);
  for (const auto& n : lat.nodes()) CHECK(n.stable);
  CHECK(is_coatomistic(lat));
  CHECK(lat.clusters().size() == 1);
}

TEST_CASE("coatoms are smooth faces") {
  for (const std::string name : {"drop", "square", "two_disks"}) {
    const auto lat = build_lattice(systems::by_name(name), DirectionGrid::standard(systems::by_name(name).k(), 1000));
    INFO(name);
    for (std::size_t c : lat.coatoms()) CHECK(lat.node(c).normal_cone_dim == 1);
  }
}

TEST_CASE("order relation") {
  const auto lat = build_lattice(systems::square(), DirectionGrid::planar(360));
  for (const auto& n : lat.nodes()) {
    CHECK(lat.leq(lat.bottom(), n.id));
    CHECK(lat.leq(n.id, lat.top()));
  }
  for (const auto& [a, b] : lat.covers()) CHECK(lat.leq(a, b));
}

// --- 3x3 families ------------------------------------------------------------

namespace {

// Coatoms of the given face dimension (the hull of disks also has segments).
std::vector<ExposedFaceRecord> flat_coatoms(const ProjectionLattice& lat, std::size_t face_dim) {
  std::vector<ExposedFaceRecord> out;
  for (std::size_t c : lat.coatoms()) {
    if (lat.node(c).face_dim == face_dim) out.push_back(exposed_face(lat.system(), lat.node(c).witness_dirs.front()));
  }
  return out;
}

}  // namespace

TEST_CASE("two disks meet in one point") {
  const auto lat = build_lattice(systems::two_disks(), DirectionGrid::fibonacci(2000));
  const auto flats = flat_coatoms(lat, 2);
  CHECK(flats.size() == 2);
  CHECK(pair_intersections(lat.system(), flats).points.size() == 1);
  CHECK(lat.clusters().size() == 1);
}

TEST_CASE("three disks meet pairwise") {
  const auto lat = build_lattice(systems::three_disks(), DirectionGrid::fibonacci(2000));
  // the hull also has two triangular facets with normals along (1,1,1)
  std::vector<ExposedFaceRecord> disks;
  for (const auto& f : flat_coatoms(lat, 2)) {
    if (f.direction.cwiseAbs().maxCoeff() > 1 - 1e-6) disks.push_back(f);
  }
  CHECK(flat_coatoms(lat, 2).size() == 5);
  CHECK(disks.size() == 3);
  CHECK(pair_intersections(lat.system(), disks).points.size() == 3);
  CHECK(lat.clusters().size() == 1);
}

TEST_CASE("corner kinds") {
  CHECK(classify_3x3(systems::ellipsoid_plus_point(), 2000).corner_kind == CornerKind::ellipsoid_plus_point);
  const auto r = classify_3x3(systems::ellipse_plus_point(), 2000);
  CHECK(r.has_corner);
  CHECK(r.corner_kind == CornerKind::ellipse_plus_point);
}

TEST_CASE("corner kind needs a corner") {
  CHECK_THROWS_AS(corner_kind({}, {}, 1.0), UsageError);
}

TEST_CASE("classify_3x3 preconditions") {
  CHECK_THROWS_AS(classify_3x3(systems::cube()), UsageError);
  const auto drop = classify_3x3(systems::drop(), 2000);
  CHECK(drop.has_corner);
  CHECK(drop.s == 2);
}

TEST_CASE("random triples are admissible") {
  for (std::uint64_t seed = 500; seed < 506; ++seed) {
    std::mt19937_64 rng(seed);
    std::vector<HermitianMatrix> g;
    for (int i = 0; i < 3; ++i) g.push_back(seed % 2 ? random_symmetric(3, rng) : random_hermitian(3, rng));
    const auto r = classify_3x3(OperatorSystemSpec(std::move(g)), 2000);
    const std::size_t m = r.s + r.e;
    INFO(seed);
    CHECK(r.admissible());
    CHECK(r.non_smooth_points.size() == m * (m - 1) / 2);
  }
}

// --- io ----------------------------------------------------------------------

TEST_CASE("system JSON round trip") {
  const auto sys = systems::stadium();
  const auto back = io::system_from_json(io::parse_json(io::serialize(io::to_json(sys))));
  REQUIRE(back.k() == sys.k());
  for (std::size_t i = 0; i < sys.k(); ++i) CHECK(back.generators()[i].matrix() == sys.generators()[i].matrix());
}

TEST_CASE("matrix JSON validation") {
  const auto bad = io::parse_json(R"({"dim": 2, "entries": [[[0,0],[1,1]],[[1,1],[0,0]]]})");
  CHECK_THROWS_AS(io::matrix_from_json(bad), DataError);
  const auto sym = io::matrix_from_json(bad, true);
  CHECK(sym.matrix()(0, 1) == Complex(1, 0));
  CHECK_THROWS_AS(io::matrix_from_json(io::parse_json(R"({"dim": 2, "entries": [[[0,0]]]})")), DataError);
  CHECK_THROWS_AS(io::parse_json("{nope"), DataError);
}

TEST_CASE("body JSON round trip and determinism") {
  const auto b = bodies::fixture("drop", 64);
  const std::string s1 = io::serialize(io::to_json(b));
  const auto back = io::body_from_json(io::parse_json(s1));
  CHECK(io::serialize(io::to_json(back)) == s1);
  CHECK(io::serialize(io::to_json(bodies::fixture("drop", 64))) == s1);
}

TEST_CASE("floats use 17 significant digits") {
  CHECK(io::format_double(0.1) == "0.10000000000000001");
  CHECK(io::format_double(2.0) == "2");
}

TEST_CASE("boundary CSV layout") {
  const auto s = sweep(systems::drop(), DirectionGrid::planar(8));
  const std::string csv = io::boundary_csv(s);
  CHECK(csv.substr(0, csv.find('\n')) == "u_1,u_2,h,x_1,x_2");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 9);
}

TEST_CASE("ball_lens_hull is in C' but not C''") {
  const auto r = classify(bodies::fixture("ball_lens_hull"));
  CHECK(r.c0.verdict == Verdict::pass);
  CHECK(r.c.verdict == Verdict::pass);
  CHECK(r.c_prime.verdict == Verdict::pass);
  REQUIRE(r.c_dprime.verdict == Verdict::fail);
  // the non-exposed faces of the polar are the segments over (±3/8, ±1/2)
  const double zt = std::sqrt(39.0) / 8;
  for (double sx : {-1.0, 1.0}) {
    for (double sy : {-1.0, 1.0}) {
      for (double sz : {-1.0, 1.0}) {
        RVector g(3);
        g << sx * 3.0 / 8, sy * 0.5, sz * zt;
        double best = 1e9;
        for (const auto& w : r.c_dprime.witnesses) best = std::min(best, (w - g).norm());
        CHECK(best <= 1e-6);
      }
    }
  }
  for (const auto& w : r.c_dprime.witnesses) {
    CHECK(std::abs(std::abs(w(0)) - 3.0 / 8) <= 1e-6);
    CHECK(std::abs(std::abs(w(1)) - 0.5) <= 1e-6);
  }
}
