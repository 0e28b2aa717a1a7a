// jnrlab: command-line front end for the convex-support toolkit.
//
// Exit codes: 0 success, 1 malformed input or usage, 2 verification
// failure, 3 numeric failure.

#include <cmath>
#include <filesystem>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "jnrlab/body.hpp"
#include "jnrlab/body_classify.hpp"
#include "jnrlab/body_fixtures.hpp"
#include "jnrlab/face_lattice.hpp"
#include "jnrlab/io.hpp"
#include "jnrlab/jnr3x3.hpp"
#include "jnrlab/operator_system.hpp"
#include "jnrlab/systems.hpp"

using namespace jnrlab;
using io::Json;

namespace {

struct RunConfig {
  std::string command;
  std::string input;
  std::size_t grid = 0;  // 0 selects the command's default
  double eps_cluster = 0.0;
  double eps_angle = 0.0;
  std::string format = "json";
  std::string out;
  std::string emit_csv;
  std::optional<std::uint64_t> seed;
  bool symmetrize = false;
};

class VerificationFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void emit(const RunConfig& cfg, const std::string& text) {
  if (cfg.out.empty()) {
    std::cout << text;
  } else {
    io::write_atomic(cfg.out, text);
  }
}

bool is_file(const std::string& s) { return !s.empty() && std::filesystem::is_regular_file(s); }

bool is_system_name(const std::string& s) {
  const auto& n = systems::names();
  return std::find(n.begin(), n.end(), s) != n.end();
}

bool is_body_name(const std::string& s) {
  const auto& n = bodies::names();
  return s == "disk_plus" || std::find(n.begin(), n.end(), s) != n.end();
}

OperatorSystemSpec random_triple(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<HermitianMatrix> g;
  for (int i = 0; i < 3; ++i) g.push_back(random_hermitian(3, rng));
  return OperatorSystemSpec(std::move(g));
}

OperatorSystemSpec load_system(const RunConfig& cfg) {
  if (is_file(cfg.input)) {
    const Json j = io::parse_json(io::read_file(cfg.input));
    if (!j.contains("generators")) throw DataError(cfg.input + ": not an operator system (no \"generators\")");
    return io::system_from_json(j, cfg.symmetrize);
  }
  if (cfg.input.empty() && cfg.seed) return random_triple(*cfg.seed);
  if (cfg.input == "random3x3") return random_triple(cfg.seed.value_or(1));
  if (is_system_name(cfg.input)) return systems::by_name(cfg.input);
  throw UsageError("unknown system '" + cfg.input + "' (a JSON file, random3x3 or one of fixture-list)");
}

SupportSampledBody load_body(const RunConfig& cfg) {
  if (is_file(cfg.input)) {
    const Json j = io::parse_json(io::read_file(cfg.input));
    if (j.contains("generators")) return bodies::system_body(io::system_from_json(j, cfg.symmetrize), cfg.grid);
    return io::body_from_json(j);
  }
  if (cfg.input == "random_planar") return bodies::random_planar_body(cfg.seed.value_or(1), cfg.grid);
  if (is_body_name(cfg.input)) return bodies::fixture(cfg.input, cfg.grid);
  if (is_system_name(cfg.input)) return bodies::system_body(systems::by_name(cfg.input), cfg.grid);
  throw UsageError("unknown body '" + cfg.input + "' (a JSON file, random_planar or one of fixture-list)");
}

LatticeOptions lattice_options(const RunConfig& cfg) {
  LatticeOptions o;
  if (cfg.eps_angle > 0) o.eps_angle = cfg.eps_angle;
  o.eps_cluster = cfg.eps_cluster;
  return o;
}

void write_body(const RunConfig& cfg, const SupportSampledBody& b) {
  if (!cfg.emit_csv.empty()) io::write_atomic(cfg.emit_csv, io::body_csv(b));
  emit(cfg, cfg.format == "csv" ? io::body_csv(b) : io::serialize(io::to_json(b)));
}

int cmd_boundary(const RunConfig& cfg) {
  if (!is_file(cfg.input) && !is_system_name(cfg.input)) {
    write_body(cfg, load_body(cfg));
    return 0;
  }
  const auto sys = load_system(cfg);
  const auto samples = refined_sweep(sys, DirectionGrid::standard(sys.k(), cfg.grid ? cfg.grid : 3600));
  if (!cfg.emit_csv.empty()) io::write_atomic(cfg.emit_csv, io::boundary_csv(samples));
  if (cfg.format == "csv") {
    emit(cfg, io::boundary_csv(samples));
    return 0;
  }
  Json arr = Json::array();
  for (const auto& s : samples) {
    Json e;
    e["u"] = io::to_json(s.direction);
    e["h"] = s.support;
    e["x"] = io::to_json(s.point.coords);
    arr.push_back(std::move(e));
  }
  Json out;
  out["k"] = sys.k();
  out["samples"] = std::move(arr);
  emit(cfg, io::serialize(out));
  return 0;
}

// Distinct exposed faces that are not smooth exposed points: positive
// dimension or a normal cone of dimension at least two.
int cmd_faces(const RunConfig& cfg) {
  const auto sys = load_system(cfg);
  const auto grid = DirectionGrid::standard(sys.k(), cfg.grid ? cfg.grid : 2000);
  std::vector<RVector> dirs = find_degenerate_directions(sys, grid);
  dirs.insert(dirs.end(), grid.dirs.begin(), grid.dirs.end());
  const FaceOptions fo{cfg.eps_cluster};
  const double angle = cfg.eps_angle > 0 ? cfg.eps_angle : kDefaultAngleTol;
  std::vector<ExposedFaceRecord> faces;
  for (const auto& u : dirs) {
    auto f = exposed_face(sys, u, fo);
    if (f.face_dim == 0 && f.normal_cone_dim < 2) continue;
    bool seen = false;
    for (const auto& g : faces) seen = seen || subspace_equal(g.projection.image, f.projection.image, angle);
    if (!seen) faces.push_back(std::move(f));
  }
  Json arr = Json::array();
  for (const auto& f : faces) arr.push_back(io::to_json(f));
  Json out;
  out["k"] = sys.k();
  out["faces"] = std::move(arr);
  emit(cfg, io::serialize(out));
  return 0;
}

int cmd_lattice(const RunConfig& cfg) {
  const auto sys = load_system(cfg);
  const auto lat = build_lattice(sys, DirectionGrid::standard(sys.k(), cfg.grid ? cfg.grid : 2000), lattice_options(cfg));
  Json j = io::to_json(lat);
  j["coatomistic"] = is_coatomistic(lat, lattice_options(cfg).eps_angle);
  emit(cfg, io::serialize(j));
  return 0;
}

int cmd_classify3x3(const RunConfig& cfg) {
  const auto sys = load_system(cfg);
  const auto rep = classify_3x3(sys, cfg.grid ? cfg.grid : 10000);
  emit(cfg, io::serialize(io::to_json(rep)));
  return 0;
}

int cmd_polar(const RunConfig& cfg) {
  write_body(cfg, polar(load_body(cfg), cfg.grid));
  return 0;
}

int cmd_classify_body(const RunConfig& cfg) {
  const auto body = load_body(cfg);
  ClassifyOptions o;
  o.grid = cfg.grid;
  const auto rep = classify(body, o);
  Json j = io::to_json(rep);
  j["nesting_consistent"] = nesting_consistent(rep);
  emit(cfg, io::serialize(j));
  return 0;
}

int cmd_fixture_list(const RunConfig& cfg) {
  Json sys = Json::array();
  for (const auto& n : systems::names()) {
    const auto s = systems::by_name(n);
    Json e;
    e["name"] = n;
    e["n"] = s.n();
    e["k"] = s.k();
    sys.push_back(std::move(e));
  }
  Json bod = Json::array();
  std::vector<std::string> names = bodies::names();
  names.push_back("disk_plus");
  for (const auto& n : names) {
    Json e;
    e["name"] = n;
    e["dim"] = bodies::fixture_dim(n);
    bod.push_back(std::move(e));
  }
  Json out;
  out["systems"] = std::move(sys);
  out["bodies"] = std::move(bod);
  emit(cfg, io::serialize(out));
  return 0;
}

// --- verify ---------------------------------------------------------------

struct Check {
  std::string name;
  bool ok = true;
  std::string detail;
};

Check check_state_space(std::uint64_t seed) {
  Check c{"state-space projection", true, ""};
  std::mt19937_64 rng(seed);
  std::size_t tested = 0;
  for (const auto& name : systems::names()) {
    const auto sys = systems::by_name(name);
    const auto table = SupportTable::build(sys, DirectionGrid::standard(sys.k(), sys.k() == 3 ? 4000 : 0));
    for (int t = 0; t < 100; ++t) {
      const RVector y = sys.expectation_state(random_density_matrix(sys.n(), rng));
      ++tested;
      if (!state_space_membership(table, y, 1e-9)) {
        c.ok = false;
        c.detail = name + ": projected state outside cs(F)";
        return c;
      }
    }
  }
  c.detail = std::to_string(tested) + " projected density matrices inside cs(F)";
  return c;
}

std::vector<Check> check_lattices() {
  Check inter{"coatom intersection", true, ""};
  Check clus{"cluster construction", true, ""};
  Check coat{"coatomistic lattices", true, ""};
  std::size_t faces = 0;
  for (const std::string name : {"drop", "square", "cube", "stadium"}) {
    const auto sys = systems::by_name(name);
    const auto lat = build_lattice(sys, DirectionGrid::standard(sys.k(), 2000), LatticeOptions{});
    if (!is_coatomistic(lat)) {
      coat.ok = false;
      coat.detail += name + " not coatomistic; ";
    }
    for (const auto& n : lat.nodes()) {
      if (!n.proper()) continue;
      if (n.normal_cone_dim >= 2) {
        ++faces;
        if (!verify_intersection_theorem(lat, n.id).ok) {
          inter.ok = false;
          inter.detail += name + " node " + std::to_string(n.id) + "; ";
        }
      }
      // a face strictly below another proper face lies in two coatoms
      bool below_proper = false;
      std::size_t coatoms_over = 0;
      for (std::size_t b : lat.above(n.id)) {
        below_proper = true;
        if (lat.above(b).empty()) ++coatoms_over;
      }
      if (below_proper && coatoms_over < 2) {
        clus.ok = false;
        clus.detail += name + " node " + std::to_string(n.id) + "; ";
      }
    }
  }
  if (inter.ok) inter.detail = std::to_string(faces) + " non-smooth faces certified";
  if (clus.ok) clus.detail = "drop, square, cube, stadium";
  if (coat.ok) coat.detail = "drop, square, cube, stadium";
  return {inter, clus, coat};
}

Check check_bodies() {
  Check c{"body class fixtures", true, ""};
  for (const std::string n : {"lens", "truncated_disk", "drop"}) {
    const auto k = bodies::fixture(n);
    const auto r = classify(k);
    const auto p = classify(polar(k));
    if (n == "lens" && r.c0.verdict != Verdict::fail) c.detail += "lens passes C0; ";
    if (n == "truncated_disk" && (r.c0.verdict != Verdict::pass || r.c.verdict != Verdict::fail)) {
      c.detail += "truncated_disk not in C0 minus C; ";
    }
    if (n == "drop" && r.c.verdict != Verdict::pass) c.detail += "drop fails C; ";
    if (r.smooth != p.strictly_convex || r.strictly_convex != p.smooth) c.detail += n + " smooth/strict duality; ";
    if (!nesting_consistent(r) || !nesting_consistent(p)) c.detail += n + " nesting; ";
    if (hausdorff(polar(polar(k)), k) > 1e-5 * k.diameter()) c.detail += n + " polar involution; ";
  }
  c.ok = c.detail.empty();
  if (c.ok) c.detail = "lens, truncated_disk, drop verdicts, duality and involution";
  return c;
}

Check check_3x3(std::uint64_t seed) {
  Check c{"3x3 face counts", true, ""};
  std::size_t done = 0;
  for (std::uint64_t t = 0; t < 20; ++t) {
    std::mt19937_64 rng(seed + t);
    std::vector<HermitianMatrix> g;
    for (int i = 0; i < 3; ++i) g.push_back(t % 2 ? random_symmetric(3, rng) : random_hermitian(3, rng));
    const auto r = classify_3x3(OperatorSystemSpec(std::move(g)), 4000);
    const std::size_t m = r.s + r.e;
    const bool flats_ok = m == 0 ? r.cluster_count == 0 : r.cluster_count == 1;
    if (r.has_corner || !r.admissible() || r.non_smooth_points.size() != m * (m - 1) / 2 || !flats_ok) {
      c.ok = false;
      c.detail = "seed " + std::to_string(seed + t) + ": (s,e)=(" + std::to_string(r.s) + "," + std::to_string(r.e) + ")";
      return c;
    }
    ++done;
  }
  c.detail = std::to_string(done) + " random triples admissible";
  return c;
}

int cmd_verify(const RunConfig& cfg) {
  const std::uint64_t seed = cfg.seed.value_or(1);
  std::vector<Check> checks{check_state_space(seed)};
  for (auto& c : check_lattices()) checks.push_back(std::move(c));
  checks.push_back(check_bodies());
  checks.push_back(check_3x3(seed));
  bool all = true;
  std::string table;
  for (const auto& c : checks) {
    all = all && c.ok;
    table += std::string(c.ok ? "PASS" : "FAIL") + "  " + c.name + "  " + c.detail + "\n";
  }
  emit(cfg, table);
  if (!all) throw VerificationFailure("verification failed");
  return 0;
}

int run(const RunConfig& cfg) {
  if (cfg.format != "json" && cfg.format != "csv") throw UsageError("--format must be json or csv");
  if (cfg.command == "boundary") return cmd_boundary(cfg);
  if (cfg.command == "faces") return cmd_faces(cfg);
  if (cfg.command == "lattice") return cmd_lattice(cfg);
  if (cfg.command == "classify3x3") return cmd_classify3x3(cfg);
  if (cfg.command == "polar") return cmd_polar(cfg);
  if (cfg.command == "classify-body") return cmd_classify_body(cfg);
  if (cfg.command == "fixture-list") return cmd_fixture_list(cfg);
  if (cfg.command == "verify") return cmd_verify(cfg);
  throw UsageError("unknown command " + cfg.command);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Convex supports of hermitian matrix families: boundaries, faces, lattices, polars, classes."};
  app.require_subcommand(1);
  app.fallthrough();
  RunConfig cfg;
  std::uint64_t seed = 0;
  app.add_option("--grid", cfg.grid, "number of sample directions")->check(CLI::Range(std::size_t{16}, std::size_t{100000000}));
  app.add_option("--eps-cluster", cfg.eps_cluster, "eigenvalue cluster tolerance")->check(CLI::PositiveNumber);
  app.add_option("--eps-angle", cfg.eps_angle, "subspace principal-angle tolerance")->check(CLI::PositiveNumber);
  app.add_option("--format", cfg.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--out", cfg.out, "output path (default stdout)");
  app.add_option("--emit-csv", cfg.emit_csv, "also write a boundary CSV here");
  auto* seed_opt = app.add_option("--seed", seed, "seed for random inputs");
  app.add_flag("--symmetrize", cfg.symmetrize, "replace loaded matrices by (A + A*)/2");

  const std::vector<std::pair<std::string, std::string>> commands{
      {"boundary", "support samples of a system or body"},
      {"faces", "non-smooth exposed faces of a system"},
      {"lattice", "ground-state projection lattice"},
      {"classify3x3", "face census of three 3x3 generators"},
      {"polar", "polar body"},
      {"classify-body", "class membership, smoothness, strict convexity"},
      {"fixture-list", "named systems and bodies"},
      {"verify", "invariant suite over the fixtures"}};
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    if (name != "fixture-list" && name != "verify") {
      sub->add_option("input", cfg.input, "JSON file or fixture name");
    }
    sub->callback([&cfg, n = name] { cfg.command = n; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }
  if (seed_opt->count() > 0) cfg.seed = seed;

  try {
    return run(cfg);
  } catch (const VerificationFailure& e) {
    std::cerr << "jnrlab: " << e.what() << "\n";
    return 2;
  } catch (const UsageError& e) {
    std::cerr << "jnrlab: " << e.what() << "\n";
    return 1;
  } catch (const DataError& e) {
    std::cerr << "jnrlab: " << e.what() << "\n";
    return 1;
  } catch (const NumericError& e) {
    std::cerr << "jnrlab: numeric failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "jnrlab: internal failure: " << e.what() << "\n";
    return 3;
  }
}
