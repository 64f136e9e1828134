#pragma once

#include "tbem/mesh/validate.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <unordered_map>

namespace tbem {

enum class MeshFormat { OFF, MSH2 };

namespace detail {

inline std::string fmt_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline const char* geometry_name(BuiltinGeometry g) {
  switch (g) {
    case BuiltinGeometry::UnitSphere: return "unit_sphere";
    case BuiltinGeometry::SplitBall: return "split_ball";
    case BuiltinGeometry::None: break;
  }
  return "none";
}

inline BuiltinGeometry geometry_from_name(const std::string& s) {
  if (s == "unit_sphere") return BuiltinGeometry::UnitSphere;
  if (s == "split_ball") return BuiltinGeometry::SplitBall;
  return BuiltinGeometry::None;
}

inline Membership membership_from_code(int code, const std::string& where) {
  switch (code) {
    case 1: return Membership::One;
    case 2: return Membership::Two;
    case 12: return Membership::Both;
    default: throw ParseError(where + ": subdomain must be 1, 2 or 12, got " + std::to_string(code));
  }
}

inline int membership_code(Membership m) {
  return m == Membership::Both ? 12 : static_cast<int>(m);
}

// Reads the next non-empty line that is not a '#' comment. Comments of the form
// "# geometry: <name>" are captured so built-in meshes keep their projection rule.
struct LineReader {
  std::istream& in;
  std::string path;
  int line_no = 0;
  BuiltinGeometry geometry = BuiltinGeometry::None;

  bool next(std::string& line) {
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      const auto first = line.find_first_not_of(" \t");
      if (first == std::string::npos) continue;
      if (line[first] == '#') {
        std::istringstream c(line.substr(first + 1));
        std::string key, value;
        if (c >> key >> value && key == "geometry:") geometry = geometry_from_name(value);
        continue;
      }
      return true;
    }
    return false;
  }

  long count(const std::string& line) const {
    std::istringstream ss(line);
    long n = -1;
    if (!(ss >> n) || n < 0) fail("bad count '" + line + "'");
    return n;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(path + ":" + std::to_string(line_no) + ": " + msg);
  }
};

}  // namespace detail

/// Physical surface id of a (subdomain, part) pair: 10·subdomain + {D:0, N:1, I:2, J:3}.
/// Interface triangles use subdomain code 12, i.e. id 123.
inline int physical_id(Membership m, Part p) {
  return 10 * detail::membership_code(m) + static_cast<int>(p);
}

inline std::pair<Membership, Part> decode_physical_id(int id, const std::string& where) {
  const int part = id % 10;
  if (id < 10 || part > 3) throw ParseError(where + ": physical id " + std::to_string(id) + " does not encode a tag");
  const Membership m = detail::membership_from_code(id / 10, where);
  return {m, static_cast<Part>(part)};
}

inline SurfaceMesh read_off(std::istream& in, const std::string& path = "<stream>") {
  detail::LineReader r{in, path};
  std::string line;
  if (!r.next(line) || line.rfind("OFF", 0) != 0) r.fail("missing OFF header");
  if (!r.next(line)) r.fail("missing counts line");
  int nv = 0, nt = 0;
  {
    std::istringstream ss(line);
    if (!(ss >> nv >> nt) || nv < 0 || nt < 0) r.fail("bad counts line");
  }
  SurfaceMesh mesh;
  mesh.vertices.reserve(nv);
  for (int i = 0; i < nv; ++i) {
    if (!r.next(line)) r.fail("unexpected end of file in vertex block");
    std::istringstream ss(line);
    double x, y, z;
    if (!(ss >> x >> y >> z)) r.fail("bad vertex line");
    mesh.vertices.emplace_back(x, y, z);
  }
  mesh.triangles.reserve(nt);
  for (int i = 0; i < nt; ++i) {
    if (!r.next(line)) r.fail("unexpected end of file in face block");
    std::istringstream ss(line);
    int n = 0;
    Triangle tri{};
    if (!(ss >> n) || n != 3) r.fail("only triangular faces are supported");
    if (!(ss >> tri[0] >> tri[1] >> tri[2])) r.fail("bad face line");
    mesh.triangles.push_back(tri);
  }
  for (int i = 0; i < nt; ++i) {
    if (!r.next(line)) r.fail("untagged element: triangle " + std::to_string(i) + " has no tag line");
    std::istringstream ss(line);
    int code = 0;
    std::string part;
    if (!(ss >> code >> part) || part.size() != 1) r.fail("untagged element: bad tag line for triangle " + std::to_string(i));
    const auto p = part_from_char(part[0]);
    if (!p) r.fail("unknown part tag '" + part + "'");
    mesh.membership.push_back(detail::membership_from_code(code, path + ":" + std::to_string(r.line_no)));
    mesh.parts.push_back(*p);
  }
  mesh.geometry = r.geometry;
  return mesh;
}

inline void write_off(std::ostream& out, const SurfaceMesh& mesh) {
  out << "OFF\n";
  if (mesh.geometry != BuiltinGeometry::None) out << "# geometry: " << detail::geometry_name(mesh.geometry) << '\n';
  out << mesh.num_vertices() << ' ' << mesh.num_triangles() << " 0\n";
  for (const auto& v : mesh.vertices)
    out << detail::fmt_double(v.x()) << ' ' << detail::fmt_double(v.y()) << ' ' << detail::fmt_double(v.z()) << '\n';
  for (const auto& t : mesh.triangles) out << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  out << "# tags: subdomain part\n";
  for (int t = 0; t < mesh.num_triangles(); ++t)
    out << detail::membership_code(mesh.membership[t]) << ' ' << part_char(mesh.parts[t]) << '\n';
}

/// Gmsh 2.2 ASCII subset: $Nodes and triangle elements (type 2) whose first tag is
/// the physical id. Other element types and unknown sections are skipped.
inline SurfaceMesh read_msh(std::istream& in, const std::string& path = "<stream>") {
  detail::LineReader r{in, path};
  std::string line;
  SurfaceMesh mesh;
  std::unordered_map<long, int> node_index;
  bool have_format = false, have_nodes = false, have_elements = false;

  while (r.next(line)) {
    if (line.rfind("$MeshFormat", 0) == 0) {
      if (!r.next(line)) r.fail("truncated $MeshFormat");
      std::istringstream ss(line);
      double version = 0;
      int file_type = -1;
      if (!(ss >> version >> file_type) || version < 2.0 || version >= 3.0) r.fail("only MSH 2.x is supported");
      if (file_type != 0) r.fail("only ASCII MSH files are supported");
      have_format = true;
    } else if (line.rfind("$TbemGeometry", 0) == 0) {
      if (!r.next(line)) r.fail("truncated $TbemGeometry");
      r.geometry = detail::geometry_from_name(line);
    } else if (line.rfind("$Nodes", 0) == 0) {
      if (!r.next(line)) r.fail("truncated $Nodes");
      const long n = r.count(line);
      for (long i = 0; i < n; ++i) {
        if (!r.next(line)) r.fail("truncated node list");
        std::istringstream ss(line);
        long id;
        double x, y, z;
        if (!(ss >> id >> x >> y >> z)) r.fail("bad node line");
        if (!node_index.emplace(id, mesh.num_vertices()).second) r.fail("duplicate node id " + std::to_string(id));
        mesh.vertices.emplace_back(x, y, z);
      }
      have_nodes = true;
    } else if (line.rfind("$Elements", 0) == 0) {
      if (!have_nodes) r.fail("$Elements before $Nodes");
      if (!r.next(line)) r.fail("truncated $Elements");
      const long n = r.count(line);
      for (long i = 0; i < n; ++i) {
        if (!r.next(line)) r.fail("truncated element list");
        std::istringstream ss(line);
        long id;
        int type, ntags;
        if (!(ss >> id >> type >> ntags)) r.fail("bad element line");
        std::vector<long> tags(std::max(ntags, 0));
        for (auto& t : tags)
          if (!(ss >> t)) r.fail("bad element tags");
        if (type != 2) continue;
        if (ntags < 1 || tags[0] == 0) r.fail("untagged element " + std::to_string(id));
        Triangle tri{};
        for (auto& v : tri) {
          long node;
          if (!(ss >> node)) r.fail("bad triangle connectivity");
          auto it = node_index.find(node);
          if (it == node_index.end()) r.fail("element " + std::to_string(id) + " references unknown node " + std::to_string(node));
          v = it->second;
        }
        const auto [m, p] = decode_physical_id(static_cast<int>(tags[0]), path + ":" + std::to_string(r.line_no));
        mesh.triangles.push_back(tri);
        mesh.membership.push_back(m);
        mesh.parts.push_back(p);
      }
      have_elements = true;
    }
  }
  if (!have_format) r.fail("missing $MeshFormat");
  if (!have_elements) r.fail("missing $Elements");
  mesh.geometry = r.geometry;
  return mesh;
}

inline void write_msh(std::ostream& out, const SurfaceMesh& mesh) {
  out << "$MeshFormat\n2.2 0 8\n$EndMeshFormat\n";
  if (mesh.geometry != BuiltinGeometry::None)
    out << "$TbemGeometry\n" << detail::geometry_name(mesh.geometry) << "\n$EndTbemGeometry\n";
  out << "$Nodes\n" << mesh.num_vertices() << '\n';
  for (int i = 0; i < mesh.num_vertices(); ++i) {
    const auto& v = mesh.vertices[i];
    out << i + 1 << ' ' << detail::fmt_double(v.x()) << ' ' << detail::fmt_double(v.y()) << ' '
        << detail::fmt_double(v.z()) << '\n';
  }
  out << "$EndNodes\n$Elements\n" << mesh.num_triangles() << '\n';
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const int phys = physical_id(mesh.membership[t], mesh.parts[t]);
    const auto& tri = mesh.triangles[t];
    out << t + 1 << " 2 2 " << phys << ' ' << phys << ' ' << tri[0] + 1 << ' ' << tri[1] + 1 << ' ' << tri[2] + 1
        << '\n';
  }
  out << "$EndElements\n";
}

inline MeshFormat format_from_path(const std::filesystem::path& path) {
  const auto ext = path.extension().string();
  if (ext == ".off" || ext == ".OFF") return MeshFormat::OFF;
  if (ext == ".msh" || ext == ".MSH") return MeshFormat::MSH2;
  throw ParseError(path.string() + ": cannot infer mesh format from extension '" + ext + "'");
}

/// Reads and validates a mesh; structural failures become ParseError.
inline SurfaceMesh load_mesh(const std::filesystem::path& path, std::optional<MeshFormat> format = std::nullopt) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open mesh file " + path.string());
  const MeshFormat f = format ? *format : format_from_path(path);
  SurfaceMesh mesh = f == MeshFormat::OFF ? read_off(in, path.string()) : read_msh(in, path.string());
  const MeshReport rep = validate_mesh(mesh);
  if (!rep.ok()) throw ParseError(path.string() + ": invalid mesh\n" + rep.summary());
  for (const auto& w : rep.warnings) warn(w);
  return mesh;
}

inline void save_mesh(const std::filesystem::path& path, const SurfaceMesh& mesh,
                      std::optional<MeshFormat> format = std::nullopt) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write mesh file " + path.string());
  const MeshFormat f = format ? *format : format_from_path(path);
  if (f == MeshFormat::OFF) write_off(out, mesh);
  else write_msh(out, mesh);
}

}  // namespace tbem
