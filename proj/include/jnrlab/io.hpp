#pragma once

// JSON and CSV import/export. Output is deterministic: keys keep insertion
// order and floats are written with 17 significant digits.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "jnrlab/body.hpp"
#include "jnrlab/body_classify.hpp"
#include "jnrlab/face_lattice.hpp"
#include "jnrlab/hermitian.hpp"
#include "jnrlab/jnr3x3.hpp"
#include "jnrlab/operator_system.hpp"

namespace jnrlab::io {

using Json = nlohmann::ordered_json;

inline std::string format_double(double v) {
  if (!std::isfinite(v)) throw NumericError("format_double: non-finite value", v);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace detail {

inline bool compact(const Json& j, int depth) {
  if (j.is_object() || depth > 2 || (j.is_array() && j.size() > 16)) return false;
  if (j.is_array()) {
    for (const auto& e : j) {
      if (!compact(e, depth + 1)) return false;
    }
  }
  return true;
}

inline void dump(const Json& j, std::string& out, int indent) {
  const std::string pad(static_cast<std::size_t>(indent + 2), ' ');
  const std::string close(static_cast<std::size_t>(indent), ' ');
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        out += pad + Json(it.key()).dump() + ": ";
        dump(it.value(), out, indent + 2);
      }
      out += "\n" + close + "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      // numeric rows and small matrices stay on one line
      const bool flat = compact(j, 0);
      out += flat ? "[" : "[\n";
      bool first = true;
      for (const auto& e : j) {
        if (!first) out += flat ? ", " : ",\n";
        first = false;
        if (!flat) out += pad;
        dump(e, out, indent + 2);
      }
      out += flat ? "]" : "\n" + close + "]";
      return;
    }
    case Json::value_t::number_float:
      out += format_double(j.get<double>());
      return;
    default:
      out += j.dump();
  }
}

inline double as_double(const Json& j, const char* what) {
  if (!j.is_number()) throw DataError(std::string("expected a number for ") + what);
  return j.get<double>();
}

inline RVector as_vector(const Json& j, const char* what) {
  if (!j.is_array()) throw DataError(std::string("expected an array for ") + what);
  RVector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = as_double(j[i], what);
  return v;
}

}  // namespace detail

/// Pretty JSON with fixed float formatting.
inline std::string serialize(const Json& j) {
  std::string out;
  detail::dump(j, out, 0);
  out += "\n";
  return out;
}

inline Json to_json(const RVector& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

inline Json to_json(const HermitianMatrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.matrix().rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.matrix().cols(); ++j) row.push_back(Json::array({m.matrix()(i, j).real(), m.matrix()(i, j).imag()}));
    rows.push_back(std::move(row));
  }
  Json out;
  out["dim"] = m.matrix().rows();
  out["entries"] = std::move(rows);
  return out;
}

/// {"dim": n, "entries": [[[re, im], ...], ...]}, row-major. Hermiticity is
/// checked exactly, after (A + A*)/2 when symmetrize is set.
inline HermitianMatrix matrix_from_json(const Json& j, bool symmetrize = false) {
  if (!j.is_object() || !j.contains("dim") || !j.contains("entries")) throw DataError("matrix: need \"dim\" and \"entries\"");
  if (!j["dim"].is_number_integer() || j["dim"].get<long>() < 1) throw DataError("matrix: \"dim\" must be a positive integer");
  const auto n = static_cast<Eigen::Index>(j["dim"].get<long>());
  const Json& e = j["entries"];
  if (!e.is_array() || static_cast<Eigen::Index>(e.size()) != n) throw DataError("matrix: \"entries\" must have dim rows");
  CMatrix a(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const Json& row = e[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n) throw DataError("matrix: every row needs dim entries");
    for (Eigen::Index c = 0; c < n; ++c) {
      const Json& z = row[static_cast<std::size_t>(c)];
      if (!z.is_array() || z.size() != 2) throw DataError("matrix: entries are [re, im] pairs");
      a(r, c) = Complex(detail::as_double(z[0], "entry"), detail::as_double(z[1], "entry"));
    }
  }
  return symmetrize ? HermitianMatrix::symmetrized(a) : HermitianMatrix(a);
}

inline Json to_json(const OperatorSystemSpec& sys) {
  Json g = Json::array();
  for (const auto& m : sys.generators()) g.push_back(to_json(m));
  Json out;
  out["n"] = sys.n();
  out["generators"] = std::move(g);
  return out;
}

/// {"n": int, "generators": [matrix, ...]}.
inline OperatorSystemSpec system_from_json(const Json& j, bool symmetrize = false) {
  if (!j.is_object() || !j.contains("n") || !j.contains("generators")) throw DataError("system: need \"n\" and \"generators\"");
  if (!j["n"].is_number_integer()) throw DataError("system: \"n\" must be an integer");
  if (!j["generators"].is_array() || j["generators"].empty()) throw DataError("system: \"generators\" must be a non-empty array");
  std::vector<HermitianMatrix> g;
  for (const auto& m : j["generators"]) {
    g.push_back(matrix_from_json(m, symmetrize));
    if (g.back().matrix().rows() != j["n"].get<long>()) throw DataError("system: generator size differs from \"n\"");
  }
  return OperatorSystemSpec(std::move(g));
}

inline Json to_json(const SupportSampledBody& b) {
  Json s = Json::array();
  for (const auto& x : b.samples()) {
    Json e;
    e["u"] = to_json(x.u);
    e["h"] = x.h;
    e["x"] = to_json(x.x);
    s.push_back(std::move(e));
  }
  Json out;
  out["dim"] = b.dim();
  out["samples"] = std::move(s);
  return out;
}

/// {"dim", "samples": [{"u", "h", "x"}]}; the origin must be interior.
inline SupportSampledBody body_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("dim") || !j.contains("samples")) throw DataError("body: need \"dim\" and \"samples\"");
  if (!j["dim"].is_number_integer()) throw DataError("body: \"dim\" must be an integer");
  if (!j["samples"].is_array()) throw DataError("body: \"samples\" must be an array");
  std::vector<BodySample> s;
  for (const auto& e : j["samples"]) {
    if (!e.is_object() || !e.contains("u") || !e.contains("h") || !e.contains("x")) throw DataError("body: samples need u, h, x");
    s.push_back(BodySample{detail::as_vector(e["u"], "u"), detail::as_double(e["h"], "h"), detail::as_vector(e["x"], "x")});
  }
  try {
    return SupportSampledBody(static_cast<std::size_t>(j["dim"].get<long>()), std::move(s));
  } catch (const UsageError& e) {
    throw DataError(e.what());
  }
}

inline Json to_json(const ProjectionLattice& lat) {
  Json nodes = Json::array();
  for (const auto& n : lat.nodes()) {
    Json e;
    e["id"] = n.id;
    e["rank"] = n.rank();
    Json w = Json::array();
    for (const auto& d : n.witness_dirs) w.push_back(to_json(d));
    e["witness_dirs"] = std::move(w);
    if (!n.stable) e["unstable"] = true;
    e["face_dim"] = n.face_dim;
    e["normal_cone_dim"] = n.normal_cone_dim;
    e["center"] = n.center.size() ? to_json(n.center) : Json::array();
    nodes.push_back(std::move(e));
  }
  Json covers = Json::array();
  for (const auto& [a, b] : lat.covers()) covers.push_back(Json::array({a, b}));
  Json clusters = Json::array();
  for (const auto& c : lat.clusters()) clusters.push_back(Json(c));
  Json out;
  out["nodes"] = std::move(nodes);
  out["covers"] = std::move(covers);
  out["coatoms"] = Json(lat.coatoms());
  out["clusters"] = std::move(clusters);
  return out;
}

inline Json to_json(const Jnr3x3Report& r) {
  Json pts = Json::array();
  for (const auto& p : r.non_smooth_points) pts.push_back(to_json(p));
  Json out;
  out["k"] = r.k;
  out["hasCorner"] = r.has_corner;
  out["cornerKind"] = jnrlab::to_string(r.corner_kind);
  out["s"] = r.s;
  out["e"] = r.e;
  out["non_smooth_points"] = std::move(pts);
  out["cluster_count"] = r.cluster_count;
  out["polytope"] = r.polytope;
  out["admissible"] = r.admissible();
  return out;
}

inline Json to_json(const ClassFlag& f) {
  Json w = Json::array();
  for (const auto& p : f.witnesses) w.push_back(to_json(p));
  Json out;
  out["verdict"] = jnrlab::to_string(f.verdict);
  out["witnesses"] = std::move(w);
  return out;
}

inline Json to_json(const BodyClassReport& r) {
  Json out;
  out["C0"] = to_json(r.c0);
  out["C"] = to_json(r.c);
  out["C_prime"] = to_json(r.c_prime);
  out["C_dprime"] = to_json(r.c_dprime);
  out["smooth"] = r.smooth;
  out["strictlyConvex"] = r.strictly_convex;
  out["smooth_stable"] = r.smooth_stable;
  out["strict_stable"] = r.strict_stable;
  out["polar_flats"] = r.polar_flats;
  return out;
}

inline Json to_json(const ExposedFaceRecord& f) {
  Json out;
  out["direction"] = to_json(f.direction);
  out["support"] = f.support;
  out["rank"] = f.projection.rank();
  out["face_dim"] = f.face_dim;
  out["normal_cone_dim"] = f.normal_cone_dim;
  out["stable"] = f.stable;
  out["center"] = to_json(f.center);
  return out;
}

/// Header "u_1,...,u_k,h,x_1,...,x_k", one row per sample.
inline std::string boundary_csv(const std::vector<BoundarySample>& s) {
  if (s.empty()) return "";
  const auto k = s.front().direction.size();
  std::ostringstream os;
  for (Eigen::Index i = 0; i < k; ++i) os << "u_" << i + 1 << ',';
  os << 'h';
  for (Eigen::Index i = 0; i < k; ++i) os << ",x_" << i + 1;
  os << '\n';
  for (const auto& b : s) {
    for (Eigen::Index i = 0; i < k; ++i) os << format_double(b.direction(i)) << ',';
    os << format_double(b.support);
    for (Eigen::Index i = 0; i < k; ++i) os << ',' << format_double(b.point.coords(i));
    os << '\n';
  }
  return os.str();
}

inline std::string body_csv(const SupportSampledBody& body) {
  std::vector<BoundarySample> s;
  for (const auto& x : body.samples()) s.push_back(BoundarySample{x.u, x.h, StatePoint{x.x, std::nullopt}});
  return boundary_csv(s);
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

inline Json parse_json(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(std::string("malformed JSON: ") + e.what());
  }
}

/// Writes to a temporary file next to path, then renames it into place.
inline void write_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw DataError("write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw DataError("cannot rename into " + path + ": " + ec.message());
  }
}

}  // namespace jnrlab::io
