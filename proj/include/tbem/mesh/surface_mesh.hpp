#pragma once

#include "tbem/core.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace tbem {

/// Boundary-condition type of a skeleton triangle.
enum class Part : std::uint8_t { D = 0, N = 1, I = 2, J = 3 };

inline constexpr std::array<Part, 4> kAllParts{Part::D, Part::N, Part::I, Part::J};

inline char part_char(Part p) {
  constexpr char names[] = {'D', 'N', 'I', 'J'};
  return names[static_cast<int>(p)];
}

inline std::optional<Part> part_from_char(char c) {
  switch (c) {
    case 'D': return Part::D;
    case 'N': return Part::N;
    case 'I': return Part::I;
    case 'J': return Part::J;
    default: return std::nullopt;
  }
}

/// Subdomain membership of a triangle: Ω1, Ω2, or both (interface).
enum class Membership : std::uint8_t { One = 1, Two = 2, Both = 3 };

inline bool belongs_to(Membership m, int subdomain) {
  return (static_cast<int>(m) & subdomain) != 0;
}

/// Analytic surface the mesh was generated from; drives vertex projection in refine().
enum class BuiltinGeometry : std::uint8_t { None, UnitSphere, SplitBall };

using Triangle = std::array<int, 3>;

/// Tagged triangulation of the skeleton Σ = Γ1 ∪ Γ2.
///
/// The stored winding of a triangle defines n_Σ: outward of Ω on ∂Ω, and n_Σ := n_1
/// on the interface Γ_J. Interface triangles are stored once and shared by both
/// subdomain boundaries.
struct SurfaceMesh {
  std::vector<Vec3> vertices;
  std::vector<Triangle> triangles;
  std::vector<Membership> membership;
  std::vector<Part> parts;
  BuiltinGeometry geometry = BuiltinGeometry::None;

  [[nodiscard]] int num_vertices() const { return static_cast<int>(vertices.size()); }
  [[nodiscard]] int num_triangles() const { return static_cast<int>(triangles.size()); }

  [[nodiscard]] bool has_subdomain(int j) const {
    for (auto m : membership)
      if (belongs_to(m, j)) return true;
    return false;
  }

  [[nodiscard]] int num_subdomains() const { return has_subdomain(2) ? 2 : 1; }

  [[nodiscard]] Vec3 centroid(int t) const {
    const auto& tri = triangles[t];
    return (vertices[tri[0]] + vertices[tri[1]] + vertices[tri[2]]) / 3.0;
  }

  /// Unnormalized n_Σ direction; length = 2 * area.
  [[nodiscard]] Vec3 area_normal(int t) const {
    const auto& tri = triangles[t];
    return (vertices[tri[1]] - vertices[tri[0]]).cross(vertices[tri[2]] - vertices[tri[0]]);
  }

  [[nodiscard]] double area(int t) const { return 0.5 * area_normal(t).norm(); }

  [[nodiscard]] double total_area() const {
    double sum = 0.0;
    for (int t = 0; t < num_triangles(); ++t) sum += area(t);
    return sum;
  }

  [[nodiscard]] double part_area(Part p) const {
    double sum = 0.0;
    for (int t = 0; t < num_triangles(); ++t)
      if (parts[t] == p) sum += area(t);
    return sum;
  }

  /// Largest triangle edge length.
  [[nodiscard]] double mesh_size() const {
    double h = 0.0;
    for (const auto& tri : triangles)
      for (int k = 0; k < 3; ++k)
        h = std::max(h, (vertices[tri[k]] - vertices[tri[(k + 1) % 3]]).norm());
    return h;
  }
};

/// 𝔑_j(t) = <n_j, n_Σ> for triangle t of Γ_j: +1 on ∂Ω, +1 for j = 1 and -1 for j = 2 on Γ_J.
inline int orientation_sign(const SurfaceMesh& mesh, int subdomain, int t) {
  if (t < 0 || t >= mesh.num_triangles())
    throw DomainError("triangle index " + std::to_string(t) + " out of range");
  if (!belongs_to(mesh.membership[t], subdomain))
    throw DomainError("triangle " + std::to_string(t) + " is not on Γ_" + std::to_string(subdomain));
  if (mesh.parts[t] == Part::J) return subdomain == 1 ? 1 : -1;
  return 1;
}

/// Flat triangle of one subdomain boundary, oriented with n_j pointing out of Ω_j.
struct Panel {
  std::array<Vec3, 3> v;
  std::array<int, 3> local_vertex;   // P1 DOF index on the subdomain surface
  std::array<int, 3> global_vertex;  // vertex id in SurfaceMesh
  Vec3 normal;                       // unit n_j
  Vec3 centroid;
  double area = 0.0;
  double diameter = 0.0;
  std::array<Vec3, 3> curl;          // surface curls of the three barycentric hat functions
  int global_triangle = -1;
  Part part = Part::D;
};

inline Panel make_panel(const std::array<Vec3, 3>& v) {
  Panel p;
  p.v = v;
  const Vec3 an = (v[1] - v[0]).cross(v[2] - v[0]);
  const double twice_area = an.norm();
  if (!(twice_area > 0.0)) throw DomainError("degenerate panel (zero area)");
  p.area = 0.5 * twice_area;
  p.normal = an / twice_area;
  p.centroid = (v[0] + v[1] + v[2]) / 3.0;
  p.diameter = std::max({(v[0] - v[1]).norm(), (v[1] - v[2]).norm(), (v[2] - v[0]).norm()});
  for (int i = 0; i < 3; ++i) {
    // grad λ_i = n × (v_{i+2} - v_{i+1}) / (2A); curl_Γ λ_i = n × grad λ_i
    const Vec3 grad = p.normal.cross(v[(i + 2) % 3] - v[(i + 1) % 3]) / twice_area;
    p.curl[i] = p.normal.cross(grad);
  }
  return p;
}

/// Γ_j as a standalone closed surface: oriented panels plus local P1 numbering.
struct SubdomainSurface {
  int subdomain = 1;
  std::vector<Panel> panels;
  std::vector<int> triangles;          // global triangle id per panel
  std::vector<int> vertices;           // global vertex id per local P1 DOF
  std::vector<int> local_of_global;    // -1 when the vertex is not on Γ_j
  std::vector<int> local_of_triangle;  // panel index per global triangle, -1 when absent

  [[nodiscard]] int num_panels() const { return static_cast<int>(panels.size()); }
  [[nodiscard]] int num_vertices() const { return static_cast<int>(vertices.size()); }
  [[nodiscard]] bool empty() const { return panels.empty(); }

  [[nodiscard]] double area() const {
    double sum = 0.0;
    for (const auto& p : panels) sum += p.area;
    return sum;
  }
};

inline SubdomainSurface extract_subdomain(const SurfaceMesh& mesh, int subdomain) {
  SubdomainSurface s;
  s.subdomain = subdomain;
  s.local_of_global.assign(mesh.num_vertices(), -1);
  s.local_of_triangle.assign(mesh.num_triangles(), -1);
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    if (!belongs_to(mesh.membership[t], subdomain)) continue;
    Triangle tri = mesh.triangles[t];
    if (orientation_sign(mesh, subdomain, t) < 0) std::swap(tri[1], tri[2]);
    std::array<Vec3, 3> v{mesh.vertices[tri[0]], mesh.vertices[tri[1]], mesh.vertices[tri[2]]};
    Panel p = make_panel(v);
    for (int k = 0; k < 3; ++k) {
      int& local = s.local_of_global[tri[k]];
      if (local < 0) {
        local = static_cast<int>(s.vertices.size());
        s.vertices.push_back(tri[k]);
      }
      p.local_vertex[k] = local;
      p.global_vertex[k] = tri[k];
    }
    p.global_triangle = t;
    p.part = mesh.parts[t];
    s.local_of_triangle[t] = static_cast<int>(s.panels.size());
    s.panels.push_back(p);
    s.triangles.push_back(t);
  }
  return s;
}

}  // namespace tbem
