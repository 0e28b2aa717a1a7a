// Acceptance run: one PASS/FAIL line per criterion. Exit status is nonzero
// when any criterion fails.

#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "jnrlab/body.hpp"
#include "jnrlab/body_classify.hpp"
#include "jnrlab/body_fixtures.hpp"
#include "jnrlab/face_lattice.hpp"
#include "jnrlab/hermitian.hpp"
#include "jnrlab/jnr3x3.hpp"
#include "jnrlab/operator_system.hpp"
#include "jnrlab/systems.hpp"

using namespace jnrlab;
using systems::vec;

namespace {

struct Outcome {
  bool ok = true;
  std::ostringstream note;

  void fail(const std::string& why) {
    if (ok) note.str("");
    ok = false;
    note << why << "; ";
  }
};

// Endpoints of a segment face: extremes of the compressed generators along
// the segment direction w.
std::pair<RVector, RVector> segment_ends(const ExposedFaceRecord& f, const RVector& w) {
  const OperatorSystemSpec face(f.face_generators);
  return {support_value(face, w).second.coords, support_value(face, RVector(-w)).second.coords};
}

// 1. Drop reproduction.
void drop_reproduction(Outcome& o) {
  const auto sys = systems::drop();
  const auto grid = DirectionGrid::planar(3600);
  const auto samples = sweep(sys, grid);
  const double s3 = std::sqrt(3.0) / 2;
  const RVector tp = vec({s3, 0.5}), tm = vec({-s3, 0.5});

  const double h_up = support_value(sys, vec({0, 1})).first;
  if (std::abs(h_up - 2.0) > 1e-10) o.fail("h(0,1) = " + std::to_string(h_up));

  double arc = 0.0;
  std::size_t arc_points = 0;
  for (const auto& s : samples) {
    if (s.point.coords(1) < 0.5 - 1e-6) {
      arc = std::max(arc, std::abs(s.point.coords.squaredNorm() - 1.0));
      ++arc_points;
    }
  }
  if (arc > 1e-9 || arc_points == 0) o.fail("arc residual " + std::to_string(arc));

  // tangent contacts: ends of the two segment faces
  double contact = 0.0;
  for (double sx : {1.0, -1.0}) {
    const RVector u = vec({sx * s3, 0.5});
    const auto f = exposed_face(sys, u);
    if (f.face_dim != 1) {
      o.fail("no segment face at the tangent normal");
      continue;
    }
    const auto [a, b] = segment_ends(f, vec({-0.5 * sx, s3}));
    const RVector t = sx > 0 ? tp : tm;
    contact = std::max(contact, std::min((a - t).norm(), (b - t).norm()));
    if ((a - vec({0, 2})).norm() > 1e-7 && (b - vec({0, 2})).norm() > 1e-7) o.fail("segment misses the apex");
  }
  if (contact > 1e-7) o.fail("tangent contact error " + std::to_string(contact));

  // t+- are never a whole exposed face: over the sweep, over a refined
  // sweep, and at the tangent normals themselves
  std::vector<RVector> dirs = grid.dirs;
  for (const auto& d : DirectionGrid::planar(7200).dirs) dirs.push_back(d);
  dirs.push_back(vec({s3, 0.5}));
  dirs.push_back(vec({-s3, 0.5}));
  std::size_t exposed_hits = 0;
  double nearest = 1e300;
  for (const auto& u : dirs) {
    const auto f = exposed_face(sys, u);
    if (f.face_dim != 0) continue;
    for (const RVector& t : {tp, tm}) {
      const double d = (f.center - t).norm();
      nearest = std::min(nearest, d);
      if (d <= 1e-9) ++exposed_hits;
    }
  }
  if (exposed_hits > 0) o.fail("t+- exposed by " + std::to_string(exposed_hits) + " directions");
  o.note << "h(0,1)=" << h_up << ", arc residual " << arc << ", contact error " << contact
         << ", closest exposed point to t+- at " << nearest;
}

// 2. Polar duality.
void polar_duality(Outcome& o) {
  const double d = hausdorff(polar(bodies::fixture("truncated_disk")), bodies::fixture("drop"));
  if (d > 1e-5) o.fail("polar(truncated_disk) vs drop " + std::to_string(d));
  double worst = 0.0;
  for (const std::string name : {"lens", "truncated_disk", "drop", "disk_plus"}) {
    const auto k = bodies::fixture(name);
    const double e = hausdorff(polar(polar(k)), k);
    worst = std::max(worst, e);
    if (e > 1e-5) o.fail(name + " involution " + std::to_string(e));
  }
  o.note << "H(polar(truncated_disk), drop)=" << d << ", worst involution error " << worst;
}

// 3. Ellipse polar formula.
void ellipse_polar(Outcome& o) {
  const auto p = polar(bodies::fixture("disk_plus")).resampled(DirectionGrid::planar(3600));
  double worst = 0.0;
  for (const auto& s : p.samples()) {
    const double x = s.x(0), y = s.x(1);
    worst = std::max(worst, std::abs((8 * x - 3) * (8 * x - 3) / 25 + 4 * y * y - 1));
  }
  if (worst > 1e-6) o.fail("ellipse residual " + std::to_string(worst));
  o.note << "max ellipse residual " << worst << " over " << p.samples().size() << " samples";
}

// 4. Stadium body.
void stadium(Outcome& o, const ProjectionLattice& lat) {
  std::size_t big = 0, stadia = 0, triangles = 0;
  for (std::size_t c : lat.coatoms()) {
    const auto& n = lat.node(c);
    if (n.face_dim != 2) continue;
    ++big;
    const RVector& u = n.witness_dirs.front();
    if (std::abs(std::abs(u(2)) - 1) < 1e-6) ++stadia;
    if (std::abs(u(2)) < 1e-6 && std::abs(std::abs(u(0)) - 0.5) < 1e-6) ++triangles;
  }
  if (big != 6 || stadia != 2 || triangles != 4) {
    o.fail("faceDim-2 coatoms " + std::to_string(big) + " (stadia " + std::to_string(stadia) + ", triangles " +
           std::to_string(triangles) + ")");
  }
  double ruled = 0.0;
  for (int i = 1; i <= 20; ++i) ruled = std::max(ruled, bodies::ruled_surface_check(std::numbers::pi / 3 * i / 21.0).residual);
  if (ruled > 1e-8) o.fail("ruled surface residual " + std::to_string(ruled));

  const auto body = bodies::fixture("stadium_body");
  for (double x : {-1.0, 1.0}) {
    for (double y : {-1.0, 1.0}) {
      for (double z : {-1.0, 1.0}) {
        const RVector p = vec({x, y, z});
        if (normal_cone_dim_at(body, p) != 1) o.fail("normal cone at a cube corner is not a ray");
        const auto f = lat.smallest_face_containing(p, 1e-9);
        if (!f) {
          o.fail("cube corner not on the boundary");
        } else if (lat.node(*f).face_dim == 0) {
          o.fail("cube corner is exposed");
        } else if (lat.node(*f).normal_cone_dim != 1) {
          o.fail("cube corner lies in a non-smooth face");
        }
      }
    }
  }
  o.note << big << " faceDim-2 coatoms (" << stadia << " stadia, " << triangles << " triangles), ruled residual " << ruled
         << ", 8 smooth non-exposed cube corners";
}

// 5. Coatomistic lattices.
void coatomistic(Outcome& o, const std::vector<std::pair<std::string, const ProjectionLattice*>>& lats) {
  for (const auto& [name, lat] : lats) {
    if (!is_coatomistic(*lat)) o.fail(name + " not coatomistic");
    if (lat->meet_image(lat->coatoms(), kDefaultAngleTol).dim() != 0) o.fail(name + " coatom meet is not the bottom");
  }
  o.note << "drop, square, cube, stadium; global coatom meet is the bottom";
}

// 6. Intersection theorem.
void intersection(Outcome& o, const std::vector<std::pair<std::string, const ProjectionLattice*>>& lats) {
  const std::map<std::string, std::size_t> want{{"drop", 2}, {"cube", 3}, {"stadium", 2}};
  for (const auto& [name, lat] : lats) {
    const auto it = want.find(name);
    if (it == want.end()) continue;
    std::size_t faces = 0;
    for (const auto& n : lat->nodes()) {
      if (!n.proper() || n.normal_cone_dim != it->second) continue;
      ++faces;
      const auto cert = verify_intersection_theorem(*lat, n.id);
      if (!cert.ok || cert.coatoms.size() != it->second) o.fail(name + " node " + std::to_string(n.id));
    }
    if (faces == 0) o.fail(name + " has no faces with normalConeDim " + std::to_string(it->second));
    o.note << name << ": " << faces << " faces with d=" << it->second << " certified; ";
  }
}

// 7. 3x3 classification.
void jnr3x3(Outcome& o) {
  std::size_t done = 0, skipped = 0;
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> seen;
  for (std::uint64_t seed = 1000; done < 50; ++seed) {
    std::mt19937_64 rng(seed);
    std::vector<HermitianMatrix> g;
    for (int i = 0; i < 3; ++i) g.push_back(seed % 2 ? random_symmetric(3, rng) : random_hermitian(3, rng));
    const auto r = classify_3x3(OperatorSystemSpec(std::move(g)), 4000);
    if (r.has_corner) {  // cornerless triples only
      ++skipped;
      continue;
    }
    ++done;
    const std::size_t m = r.s + r.e;
    ++seen[{r.s, r.e}];
    const std::string tag = "seed " + std::to_string(seed);
    if (!r.admissible()) o.fail(tag + " (s,e) not admissible");
    if (r.non_smooth_points.size() != m * (m - 1) / 2) o.fail(tag + " |non-smooth| != C(s+e,2)");
    if (m > 0 && r.cluster_count != 1) o.fail(tag + " " + std::to_string(r.cluster_count) + " clusters");
  }
  o.note << done << " triples (" << skipped << " with corners skipped); (s,e) counts:";
  for (const auto& [se, c] : seen) o.note << " (" << se.first << "," << se.second << ")x" << c;
}

// 8. State-space projection.
void state_space(Outcome& o) {
  std::mt19937_64 rng(8);
  std::size_t inside = 0, witnesses = 0;
  for (const auto& name : systems::names()) {
    const auto sys = systems::by_name(name);
    const auto table = SupportTable::build(sys, DirectionGrid::standard(sys.k()));
    for (int t = 0; t < 100; ++t) {
      const RVector y = sys.expectation_state(random_density_matrix(sys.n(), rng));
      if (state_space_membership(table, y, 1e-9)) {
        ++inside;
      } else {
        o.fail(name + " projected state outside");
      }
    }
    const auto dirs = DirectionGrid::random_sphere(sys.k(), 100, 80);
    for (const auto& u : dirs.dirs) {
      const auto [h, p] = support_value(sys, u);
      if (!p.witness) {
        o.fail(name + " support point without witness");
        continue;
      }
      const double unit = std::abs(p.witness->norm() - 1.0);
      const double reproduce = (sys.expectation(*p.witness) - p.coords).norm();
      if (unit > 1e-12 || reproduce > 1e-12 || std::abs(u.dot(p.coords) - h) > 1e-10) {
        o.fail(name + " witness does not reproduce its point");
      } else {
        ++witnesses;
      }
    }
  }
  o.note << inside << " projected density matrices inside, " << witnesses << " support witnesses in W(F)";
}

// 9. Smooth-strict duality and class nesting.
void duality(Outcome& o) {
  std::vector<std::pair<std::string, SupportSampledBody>> all;
  for (const auto& n : bodies::names()) all.emplace_back(n, bodies::fixture(n));
  for (std::uint64_t i = 0; i < 20; ++i) all.emplace_back("random " + std::to_string(100 + i), bodies::random_planar_body(100 + i));
  for (const auto& [name, k] : all) {
    const auto r = classify(k);
    const auto p = classify(polar(k));
    if (r.smooth != p.strictly_convex || r.strictly_convex != p.smooth) o.fail(name + " smooth/strict duality");
    if (!nesting_consistent(r) || !nesting_consistent(p)) o.fail(name + " nesting");
    if (name == "lens" && r.c0.verdict != Verdict::fail) o.fail("lens passes C0");
    if (name == "truncated_disk" && (r.c0.verdict != Verdict::pass || r.c.verdict != Verdict::fail)) {
      o.fail("truncated_disk verdicts");
    }
    if (name == "drop" && r.c.verdict != Verdict::pass) o.fail("drop fails C");
  }
  o.note << all.size() << " bodies; lens fails C0, truncated_disk in C0 not C, drop in C";
}

// 10. hermitian_core property suites.
void properties(Outcome& o) {
  std::mt19937_64 rng(10);
  std::uniform_int_distribution<int> dim(2, 6);
  std::uniform_real_distribution<double> shift(-10, 10);
  std::size_t bad_shift = 0, bad_interlace = 0, bad_algebra = 0;
  for (int t = 0; t < 1000; ++t) {
    const auto n = static_cast<std::size_t>(dim(rng));
    // every other instance has a degenerate ground space
    HermitianMatrix a = random_hermitian(n, rng);
    if (t % 2) {
      const CMatrix u = random_subspace(n, n, rng).basis();
      std::vector<double> ev(n);
      const std::size_t g = 1 + static_cast<std::size_t>(t) % n;
      for (std::size_t i = 0; i < n; ++i) ev[i] = i < g ? -1.0 : static_cast<double>(i);
      RVector d = Eigen::Map<RVector>(ev.data(), static_cast<Eigen::Index>(n));
      a = HermitianMatrix::symmetrized(u * d.cast<Complex>().asDiagonal() * u.adjoint());
    }
    const double c = shift(rng);
    const auto p0 = ground_projection(a, cluster_tolerance(a));
    const auto ps = ground_projection(a.shifted(c), cluster_tolerance(a.shifted(c)));
    if (!subspace_equal(p0.image, ps.image, 1e-10)) ++bad_shift;

    const auto sub = random_subspace(n, 1 + static_cast<std::size_t>(t) % n, rng);
    const ProjectionNode pn{sub, 0.0};
    const double lo = spectral_decompose(a, cluster_tolerance(a)).eigenvalues(0);
    const auto comp = compress(a, pn);
    if (spectral_decompose(comp, cluster_tolerance(comp)).eigenvalues(0) < lo - 1e-10 * std::max(1.0, a.frobenius_norm())) {
      ++bad_interlace;
    }

    const auto v = random_subspace(n, 1 + static_cast<std::size_t>(t * 7) % n, rng);
    const auto uv = subspace_intersect(sub, v);
    const auto vu = subspace_intersect(v, sub);
    const bool commutative = subspace_equal(uv, vu);
    const bool idempotent = subspace_equal(subspace_intersect(sub, sub), sub);
    const bool monotone = uv.dim() <= std::min(sub.dim(), v.dim()) && subspace_leq(uv, sub) && subspace_leq(uv, v);
    // a shared direction survives the intersection
    CMatrix both(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(sub.dim() + 1));
    both << sub.basis(), v.basis().col(0);
    const auto w = Subspace::span_of(both);
    const bool keeps = subspace_leq(Subspace::span_of(v.basis().col(0)), subspace_intersect(w, v));
    if (!(commutative && idempotent && monotone && keeps)) ++bad_algebra;
  }
  if (bad_shift) o.fail(std::to_string(bad_shift) + " shift-invariance failures");
  if (bad_interlace) o.fail(std::to_string(bad_interlace) + " interlacing failures");
  if (bad_algebra) o.fail(std::to_string(bad_algebra) + " subspace algebra failures");
  o.note << "1000 instances: shift invariance, interlacing, intersection algebra";
}

}  // namespace

int main() {
  bool all = true;
  const auto report = [&](int id, const std::string& title, const std::function<void(Outcome&)>& fn) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      fn(o);
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    all = all && o.ok;
    std::cout << (o.ok ? "PASS" : "FAIL") << " " << id << " " << title << " [" << std::fixed << std::setprecision(1) << secs
              << " s] " << std::defaultfloat << std::setprecision(6) << o.note.str() << std::endl;
  };

  report(1, "drop reproduction", drop_reproduction);
  report(2, "polar duality", polar_duality);
  report(3, "ellipse polar formula", ellipse_polar);

  const auto t0 = std::chrono::steady_clock::now();
  const auto drop = build_lattice(systems::drop(), DirectionGrid::planar(2000));
  const auto square = build_lattice(systems::square(), DirectionGrid::planar(2000));
  const auto cube = build_lattice(systems::cube(), DirectionGrid::fibonacci(2000));
  const auto stadium_lat = build_lattice(systems::stadium(), DirectionGrid::fibonacci(2000));
  const double lattice_secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::cout << "(lattices built in " << std::fixed << std::setprecision(1) << lattice_secs << " s)" << std::defaultfloat
            << std::endl;
  const std::vector<std::pair<std::string, const ProjectionLattice*>> lats{
      {"drop", &drop}, {"square", &square}, {"cube", &cube}, {"stadium", &stadium_lat}};

  report(4, "stadium body", [&](Outcome& o) { stadium(o, stadium_lat); });
  report(5, "coatomistic lattices", [&](Outcome& o) { coatomistic(o, lats); });
  report(6, "intersection of coatoms", [&](Outcome& o) { intersection(o, lats); });
  report(7, "3x3 classification", jnr3x3);
  report(8, "state-space projection", state_space);
  report(9, "smooth-strict duality and nesting", duality);
  report(10, "hermitian property suites", properties);
  return all ? 0 : 1;
}
