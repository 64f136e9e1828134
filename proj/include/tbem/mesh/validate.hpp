#pragma once

#include "tbem/mesh/surface_mesh.hpp"

#include <cmath>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace tbem {

inline constexpr double kQualityFloor = 0.2;

struct SubdomainCheck {
  int subdomain = 1;
  int num_triangles = 0;
  int open_edges = 0;           // edges not shared by exactly two triangles
  int orientation_failures = 0; // edges traversed twice in the same direction
  double signed_volume = 0.0;

  [[nodiscard]] bool watertight() const { return num_triangles > 0 && open_edges == 0; }
  [[nodiscard]] bool oriented() const { return orientation_failures == 0; }
  [[nodiscard]] bool outward() const { return signed_volume > 0.0; }
};

struct MeshReport {
  std::vector<SubdomainCheck> subdomains;
  std::vector<std::string> errors;    // structural failures
  std::vector<std::string> warnings;  // quality
  double total_area = 0.0;
  double tagged_area = 0.0;
  double coverage_defect = 0.0;       // |Σ part areas − total| / total
  double min_quality = 1.0;
  int worst_triangle = -1;

  [[nodiscard]] bool ok() const {
    if (!errors.empty()) return false;
    for (const auto& c : subdomains)
      if (!c.watertight() || !c.oriented() || !c.outward()) return false;
    return coverage_defect <= 1e-12;
  }

  [[nodiscard]] std::string summary() const {
    std::ostringstream os;
    for (const auto& c : subdomains) {
      os << "Gamma_" << c.subdomain << ": " << c.num_triangles << " triangles, "
         << (c.watertight() ? "watertight" : "open (" + std::to_string(c.open_edges) + " edges)")
         << ", " << (c.oriented() ? "oriented" : std::to_string(c.orientation_failures) + " orientation failures")
         << ", volume " << c.signed_volume << '\n';
    }
    os << "tag coverage defect " << coverage_defect << ", min quality " << min_quality << '\n';
    for (const auto& e : errors) os << "error: " << e << '\n';
    for (const auto& w : warnings) os << "warning: " << w << '\n';
    return os.str();
  }
};

/// Normalized quality 2 r_in / R_circ; 1 for equilateral, 0 for degenerate.
inline double triangle_quality(const Vec3& a, const Vec3& b, const Vec3& c) {
  const double la = (b - c).norm(), lb = (c - a).norm(), lc = (a - b).norm();
  const double area = 0.5 * (b - a).cross(c - a).norm();
  const double denom = (la + lb + lc) * la * lb * lc;
  return denom > 0.0 ? 16.0 * area * area / denom : 0.0;
}

inline MeshReport validate_mesh(const SurfaceMesh& mesh) {
  MeshReport rep;
  const int nv = mesh.num_vertices();
  const int nt = mesh.num_triangles();
  if (static_cast<int>(mesh.membership.size()) != nt || static_cast<int>(mesh.parts.size()) != nt) {
    rep.errors.push_back("tag arrays do not match the triangle count");
    return rep;
  }

  bool indices_ok = true;
  for (int t = 0; t < nt; ++t) {
    const auto& tri = mesh.triangles[t];
    for (int v : tri)
      if (v < 0 || v >= nv) {
        rep.errors.push_back("triangle " + std::to_string(t) + " references missing vertex " + std::to_string(v));
        indices_ok = false;
      }
    if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2]) {
      rep.errors.push_back("triangle " + std::to_string(t) + " repeats a vertex");
      indices_ok = false;
    }
    const bool both = mesh.membership[t] == Membership::Both;
    if (both != (mesh.parts[t] == Part::J))
      rep.errors.push_back("triangle " + std::to_string(t) + (both ? " lies on both subdomains but is not tagged J"
                                                                  : " is tagged J but lies on one subdomain"));
  }
  if (!indices_ok) return rep;

  for (int j = 1; j <= 2; ++j) {
    if (!mesh.has_subdomain(j)) continue;
    SubdomainCheck check;
    check.subdomain = j;
    std::map<std::pair<int, int>, std::pair<int, int>> edges;  // undirected -> (count, direction sum)
    for (int t = 0; t < nt; ++t) {
      if (!belongs_to(mesh.membership[t], j)) continue;
      ++check.num_triangles;
      Triangle tri = mesh.triangles[t];
      if (orientation_sign(mesh, j, t) < 0) std::swap(tri[1], tri[2]);
      const Vec3 &a = mesh.vertices[tri[0]], &b = mesh.vertices[tri[1]], &c = mesh.vertices[tri[2]];
      check.signed_volume += a.dot(b.cross(c)) / 6.0;
      for (int k = 0; k < 3; ++k) {
        const int u = tri[k], w = tri[(k + 1) % 3];
        auto& e = edges[std::minmax(u, w)];
        ++e.first;
        e.second += u < w ? 1 : -1;
      }
    }
    for (const auto& [key, e] : edges) {
      if (e.first != 2) ++check.open_edges;
      else if (e.second != 0) ++check.orientation_failures;
    }
    rep.subdomains.push_back(check);
  }

  rep.total_area = mesh.total_area();
  for (Part p : kAllParts) rep.tagged_area += mesh.part_area(p);
  rep.coverage_defect = rep.total_area > 0.0 ? std::abs(rep.tagged_area - rep.total_area) / rep.total_area : 1.0;

  for (int t = 0; t < nt; ++t) {
    const auto& tri = mesh.triangles[t];
    const double q = triangle_quality(mesh.vertices[tri[0]], mesh.vertices[tri[1]], mesh.vertices[tri[2]]);
    if (q < rep.min_quality) {
      rep.min_quality = q;
      rep.worst_triangle = t;
    }
  }
  if (rep.min_quality < kQualityFloor)
    rep.warnings.push_back("triangle " + std::to_string(rep.worst_triangle) + " has quality " +
                           std::to_string(rep.min_quality) + " below " + std::to_string(kQualityFloor));
  return rep;
}

}  // namespace tbem
