#pragma once

#include "tbem/mesh/surface_mesh.hpp"

#include <cmath>
#include <map>
#include <utility>

namespace tbem {

namespace detail {

inline void orient_outward(SurfaceMesh& mesh, int t, const Vec3& outward) {
  if (mesh.area_normal(t).dot(outward) < 0.0) std::swap(mesh.triangles[t][1], mesh.triangles[t][2]);
}

/// Quadrisects every triangle. New vertices are plain edge midpoints; `project`
/// is called for each new vertex together with a flag telling whether the edge
/// touches a non-interface triangle.
template <class Project>
SurfaceMesh quadrisect(const SurfaceMesh& mesh, Project&& project) {
  SurfaceMesh out;
  out.geometry = mesh.geometry;
  out.vertices = mesh.vertices;

  std::map<std::pair<int, int>, bool> on_boundary_edge;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tri = mesh.triangles[t];
    for (int k = 0; k < 3; ++k) {
      auto key = std::minmax(tri[k], tri[(k + 1) % 3]);
      bool& flag = on_boundary_edge[key];
      flag = flag || mesh.parts[t] != Part::J;
    }
  }

  std::map<std::pair<int, int>, int> midpoint;
  auto mid = [&](int a, int b) {
    auto key = std::minmax(a, b);
    auto it = midpoint.find(key);
    if (it != midpoint.end()) return it->second;
    Vec3 m = 0.5 * (mesh.vertices[a] + mesh.vertices[b]);
    m = project(m, on_boundary_edge.at(key));
    const int id = static_cast<int>(out.vertices.size());
    out.vertices.push_back(m);
    midpoint.emplace(key, id);
    return id;
  };

  out.triangles.reserve(4 * mesh.triangles.size());
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto [a, b, c] = mesh.triangles[t];
    const int ab = mid(a, b), bc = mid(b, c), ca = mid(c, a);
    for (const Triangle& child : {Triangle{a, ab, ca}, Triangle{ab, b, bc}, Triangle{ca, bc, c},
                                  Triangle{ab, bc, ca}}) {
      out.triangles.push_back(child);
      out.membership.push_back(mesh.membership[t]);
      out.parts.push_back(mesh.parts[t]);
    }
  }
  return out;
}

inline double polar_angle(const Vec3& x) {
  const double r = x.norm();
  return r > 0.0 ? std::acos(std::clamp(x.z() / r, -1.0, 1.0)) : 0.0;
}

}  // namespace detail

/// Quadrisects every triangle by edge midpoints. Tags are inherited; for built-in
/// geometries new vertices are projected back onto the analytic surface.
inline SurfaceMesh refine(const SurfaceMesh& mesh) {
  switch (mesh.geometry) {
    case BuiltinGeometry::UnitSphere:
      return detail::quadrisect(mesh, [](const Vec3& m, bool) { return Vec3(m.normalized()); });
    case BuiltinGeometry::SplitBall:
      // midpoints of sphere edges (including the equator) go to the sphere,
      // interior disk edges stay in the plane z = 0
      return detail::quadrisect(mesh, [](const Vec3& m, bool on_sphere) {
        return on_sphere ? Vec3(m.normalized()) : m;
      });
    case BuiltinGeometry::None:
      break;
  }
  return detail::quadrisect(mesh, [](const Vec3& m, bool) { return m; });
}

/// Unit icosahedron refined `level` times with projection onto the unit sphere.
inline SurfaceMesh make_icosphere(int level, Part part = Part::D) {
  if (level < 0) throw DomainError("icosphere level must be >= 0");
  if (part == Part::J) throw DomainError("a single-domain sphere cannot carry the interface tag J");
  const double phi = 0.5 * (1.0 + std::sqrt(5.0));
  SurfaceMesh mesh;
  mesh.geometry = BuiltinGeometry::UnitSphere;
  const double raw[12][3] = {{-1, phi, 0}, {1, phi, 0}, {-1, -phi, 0}, {1, -phi, 0},
                             {0, -1, phi}, {0, 1, phi}, {0, -1, -phi}, {0, 1, -phi},
                             {phi, 0, -1}, {phi, 0, 1}, {-phi, 0, -1}, {-phi, 0, 1}};
  for (const auto& r : raw) mesh.vertices.push_back(Vec3(r[0], r[1], r[2]).normalized());
  const int faces[20][3] = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                            {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                            {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                            {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
  for (const auto& f : faces) {
    mesh.triangles.push_back({f[0], f[1], f[2]});
    mesh.membership.push_back(Membership::One);
    mesh.parts.push_back(part);
  }
  for (int t = 0; t < mesh.num_triangles(); ++t) detail::orient_outward(mesh, t, mesh.centroid(t));
  for (int l = 0; l < level; ++l) mesh = refine(mesh);
  return mesh;
}

/// Unit ball split by the equatorial disk into Ω1 (z > 0) and Ω2 (z < 0).
///
/// ∂Ω triangles are tagged by the polar angle θ of their centroid: D for θ < θ_D,
/// I for θ_D <= θ < θ_N, N otherwise. The disk carries J with n_Σ = n_1 = -e_z.
/// Built on the octahedron so the equator is resolved by mesh edges at every level.
inline SurfaceMesh make_split_ball(int level, double theta_d, double theta_n) {
  if (level < 0) throw DomainError("split_ball level must be >= 0");
  if (!(0.0 <= theta_d && theta_d <= theta_n && theta_n <= kPi))
    throw DomainError("split_ball band angles must satisfy 0 <= theta_D <= theta_N <= pi");

  SurfaceMesh flat;
  flat.vertices = {Vec3(1, 0, 0),  Vec3(0, 1, 0), Vec3(-1, 0, 0), Vec3(0, -1, 0),
                   Vec3(0, 0, 1),  Vec3(0, 0, -1), Vec3(0, 0, 0)};
  const int ring[4] = {0, 1, 2, 3};
  for (int k = 0; k < 4; ++k) {
    const int a = ring[k], b = ring[(k + 1) % 4];
    flat.triangles.push_back({a, b, 4});
    flat.membership.push_back(Membership::One);
    flat.parts.push_back(Part::N);
    flat.triangles.push_back({b, a, 5});
    flat.membership.push_back(Membership::Two);
    flat.parts.push_back(Part::N);
    flat.triangles.push_back({6, a, b});
    flat.membership.push_back(Membership::Both);
    flat.parts.push_back(Part::J);
  }
  for (int t = 0; t < flat.num_triangles(); ++t) {
    const Vec3 c = flat.centroid(t);
    detail::orient_outward(flat, t, flat.parts[t] == Part::J ? Vec3(0, 0, -1) : c);
  }
  for (int l = 0; l < level; ++l) flat = refine(flat);

  // map the subdivided octahedron onto the ball: sphere vertices are normalized,
  // disk vertices are stretched radially from the L1 diamond to the unit disk
  std::vector<bool> on_sphere(flat.vertices.size(), false);
  for (int t = 0; t < flat.num_triangles(); ++t)
    if (flat.parts[t] != Part::J)
      for (int v : flat.triangles[t]) on_sphere[v] = true;
  SurfaceMesh mesh = flat;
  mesh.geometry = BuiltinGeometry::SplitBall;
  for (std::size_t v = 0; v < mesh.vertices.size(); ++v) {
    const Vec3& x = flat.vertices[v];
    if (on_sphere[v]) {
      mesh.vertices[v] = x.normalized();
    } else {
      const double l2 = x.norm();
      const double l1 = std::abs(x.x()) + std::abs(x.y());
      mesh.vertices[v] = l2 > 0.0 ? Vec3(x * (l1 / l2)) : x;
      mesh.vertices[v].z() = 0.0;
    }
  }
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    if (mesh.parts[t] == Part::J) continue;
    const double theta = detail::polar_angle(mesh.centroid(t));
    mesh.parts[t] = theta < theta_d ? Part::D : (theta < theta_n ? Part::I : Part::N);
  }
  return mesh;
}

/// Drops the interface: Γ_J triangles and vertices used only by them are removed and every
/// remaining triangle is assigned to a single subdomain. Part tags are kept.
inline SurfaceMesh fuse_subdomains(const SurfaceMesh& mesh) {
  SurfaceMesh out;
  out.geometry = mesh.geometry == BuiltinGeometry::SplitBall ? BuiltinGeometry::None : mesh.geometry;
  std::vector<int> index(mesh.vertices.size(), -1);
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    if (mesh.parts[t] == Part::J) continue;
    Triangle tri = mesh.triangles[t];
    for (int& v : tri) {
      if (index[v] < 0) {
        index[v] = out.num_vertices();
        out.vertices.push_back(mesh.vertices[v]);
      }
      v = index[v];
    }
    out.triangles.push_back(tri);
    out.membership.push_back(Membership::One);
    out.parts.push_back(mesh.parts[t]);
  }
  return out;
}

}  // namespace tbem
