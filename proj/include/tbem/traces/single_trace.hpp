#pragma once

#include "tbem/operators/assembly.hpp"
#include "tbem/traces/layout.hpp"

#include <Eigen/Sparse>

#include <bit>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>

namespace tbem {

/// Class of a Dirichlet (vertex) DOF: the part of all adjacent skeleton triangles, or
/// Junction when they carry different parts.
enum class VertexClass : std::uint8_t { D, N, I, J, Junction };

inline const char* to_string(VertexClass c) {
  constexpr const char* names[] = {"D", "N", "I", "J", "junction"};
  return names[static_cast<int>(c)];
}

/// What the single-trace space does with a multi-trace DOF.
enum class DofRole : std::uint8_t { Constrained, Free, Shared };

struct DofClassification {
  std::vector<VertexClass> vertex_class;  // per global vertex
  std::vector<DofRole> vertex_role;       // per global vertex
  std::vector<std::uint8_t> vertex_parts; // bit mask of adjacent parts
  std::vector<DofRole> triangle_role;     // per global triangle

  [[nodiscard]] bool touches(int v, Part p) const { return (vertex_parts[v] >> static_cast<int>(p)) & 1u; }
};

/// Junction rule: a vertex touching Γ_D is constrained; otherwise a vertex touching
/// Γ_J is one shared DOF; all remaining vertices are free on their side. Neumann DOFs
/// are constrained on Γ_N, shared on Γ_J, free on Γ_D and Γ_I.
inline DofClassification classify_dofs(const SurfaceMesh& mesh) {
  DofClassification c;
  const int nv = mesh.num_vertices();
  c.vertex_parts.assign(nv, 0);
  for (int t = 0; t < mesh.num_triangles(); ++t)
    for (int v : mesh.triangles[t]) c.vertex_parts[v] |= static_cast<std::uint8_t>(1u << static_cast<int>(mesh.parts[t]));
  c.vertex_class.resize(nv);
  c.vertex_role.resize(nv);
  for (int v = 0; v < nv; ++v) {
    const std::uint8_t m = c.vertex_parts[v];
    if (m == 0) {
      c.vertex_class[v] = VertexClass::Junction;
      c.vertex_role[v] = DofRole::Constrained;  // isolated vertex, no DOF on any Γ_j
      continue;
    }
    const bool single = (m & (m - 1)) == 0;
    c.vertex_class[v] = single ? static_cast<VertexClass>(std::countr_zero(static_cast<unsigned>(m))) : VertexClass::Junction;
    if (c.touches(v, Part::D)) c.vertex_role[v] = DofRole::Constrained;
    else if (c.touches(v, Part::J)) c.vertex_role[v] = DofRole::Shared;
    else c.vertex_role[v] = DofRole::Free;
  }
  c.triangle_role.resize(mesh.num_triangles());
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    switch (mesh.parts[t]) {
      case Part::N: c.triangle_role[t] = DofRole::Constrained; break;
      case Part::J: c.triangle_role[t] = DofRole::Shared; break;
      default: c.triangle_role[t] = DofRole::Free; break;
    }
  }
  return c;
}

/// Provenance of a single-trace DOF.
struct SingleDof {
  SpaceKind kind;      // P1: Dirichlet, P0: Neumann
  int subdomain;       // 1, 2, or 12 for shared interface DOFs
  int entity;          // global vertex or triangle id
};

/// Sparse prolongation E: single-trace coefficients -> multi-trace coefficients.
struct SingleTraceMap {
  Eigen::SparseMatrix<double> E;
  std::vector<SingleDof> dofs;
  TraceLayout layout;

  [[nodiscard]] int num_single() const { return static_cast<int>(dofs.size()); }
  [[nodiscard]] MatrixXr dense() const { return MatrixXr(E); }
};

inline SingleTraceMap build_single_trace_map(const Skeleton& sk, const DofClassification& cls) {
  const SurfaceMesh& mesh = sk.mesh;
  if (static_cast<int>(cls.vertex_role.size()) != mesh.num_vertices() ||
      static_cast<int>(cls.triangle_role.size()) != mesh.num_triangles())
    throw DomainError("DOF classification does not match the mesh");
  const int n = sk.num_subdomains();
  SingleTraceMap map;
  map.layout = sk.layout;
  std::vector<Eigen::Triplet<double>> trip;

  auto add_column = [&](SpaceKind kind, int sub, int entity) {
    const int col = map.num_single();
    map.dofs.push_back({kind, sub, entity});
    auto put = [&](int j, double value) {
      const SubdomainSurface& s = sk.surface(j);
      int row;
      if (kind == SpaceKind::P1) {
        const int local = s.local_of_global[entity];
        if (local < 0) throw DomainError("shared vertex " + std::to_string(entity) + " is missing on Γ_" + std::to_string(j));
        row = sk.layout.dirichlet_offset(j) + local;
      } else {
        const int local = s.local_of_triangle[entity];
        if (local < 0) throw DomainError("shared triangle " + std::to_string(entity) + " is missing on Γ_" + std::to_string(j));
        row = sk.layout.neumann_offset(j) + local;
      }
      trip.emplace_back(row, col, value);
    };
    if (sub == 12) {
      put(1, 1.0);
      put(2, kind == SpaceKind::P1 ? 1.0 : -1.0);
    } else {
      put(sub, 1.0);
    }
  };

  for (SpaceKind kind : {SpaceKind::P1, SpaceKind::P0}) {
    for (int j = 1; j <= n; ++j) {
      const SubdomainSurface& s = sk.surface(j);
      if (kind == SpaceKind::P1) {
        for (int g : s.vertices) {
          if (cls.vertex_role[g] == DofRole::Free) add_column(kind, j, g);
          else if (cls.vertex_role[g] == DofRole::Shared && n == 1)
            throw DomainError("vertex " + std::to_string(g) + " touches Γ_J on a single-subdomain mesh");
        }
      } else {
        for (int t : s.triangles)
          if (cls.triangle_role[t] == DofRole::Free) add_column(kind, j, t);
      }
    }
    if (n == 2) {
      if (kind == SpaceKind::P1) {
        for (int g = 0; g < mesh.num_vertices(); ++g)
          if (cls.vertex_role[g] == DofRole::Shared) add_column(kind, 12, g);
      } else {
        for (int t = 0; t < mesh.num_triangles(); ++t)
          if (cls.triangle_role[t] == DofRole::Shared) add_column(kind, 12, t);
      }
    }
  }
  map.E.resize(sk.layout.size(), map.num_single());
  map.E.setFromTriplets(trip.begin(), trip.end());
  return map;
}

/// Writes E as a MatrixMarket coordinate file (1-based row, col, value).
inline void export_constraint_map(const std::filesystem::path& path, const SingleTraceMap& map) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write constraint map " + path.string());
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << "% rows: multi-trace DOFs, columns: single-trace DOFs\n";
  out << map.E.rows() << ' ' << map.E.cols() << ' ' << map.E.nonZeros() << '\n';
  for (int k = 0; k < map.E.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(map.E, k); it; ++it)
      out << it.row() + 1 << ' ' << it.col() + 1 << ' ' << it.value() << '\n';
}

struct OffsetOptions {
  // reject Dirichlet data that does not vanish on vertices shared by Γ_D and Γ_I
  bool check_compatibility = true;
  double tolerance = 1e-12;
};

/// Zero-extended offset traces: Dirichlet block holds g_D on the constrained vertices,
/// Neumann block holds d_N on Γ_N triangles. Inputs are indexed by global vertex and
/// global triangle; entries elsewhere must be zero.
inline MultiTraceVector offset_traces(const Skeleton& sk, const DofClassification& cls, const VectorXc& g_vertex,
                                      const VectorXc& d_triangle, const OffsetOptions& opt = {}) {
  const SurfaceMesh& mesh = sk.mesh;
  if (g_vertex.size() != mesh.num_vertices() || d_triangle.size() != mesh.num_triangles())
    throw DomainError("offset data must be indexed by global vertex and triangle");
  if (!g_vertex.allFinite() || !d_triangle.allFinite()) throw DomainError("offset data is not finite");
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    if (g_vertex(v) == Complex(0.0)) continue;
    if (cls.vertex_role[v] != DofRole::Constrained || !cls.touches(v, Part::D))
      throw DomainError("Dirichlet data supplied at vertex " + std::to_string(v) + " which is not on Γ_D");
    if (opt.check_compatibility && cls.touches(v, Part::I) && std::abs(g_vertex(v)) > opt.tolerance)
      throw DomainError("Dirichlet data must vanish at vertex " + std::to_string(v) + " where Γ_D meets Γ_I");
  }
  for (int t = 0; t < mesh.num_triangles(); ++t)
    if (d_triangle(t) != Complex(0.0) && mesh.parts[t] != Part::N)
      throw DomainError("Neumann data supplied on triangle " + std::to_string(t) + " which is not on Γ_N");

  MultiTraceVector b(sk.layout);
  for (int j = 1; j <= sk.num_subdomains(); ++j) {
    const SubdomainSurface& s = sk.surface(j);
    for (int l = 0; l < s.num_vertices(); ++l) b.dirichlet(j)(l) = g_vertex(s.vertices[l]);
    for (int l = 0; l < s.num_panels(); ++l) b.neumann(j)(l) = d_triangle(s.triangles[l]);
  }
  return b;
}

/// Samples g at the vertices touching Γ_D and averages d over Γ_N triangles
/// (6-point rule). d receives the point and the outward unit normal of Ω.
inline std::pair<VectorXc, VectorXc> sample_boundary_data(
    const Skeleton& sk, const DofClassification& cls, const std::function<Complex(const Vec3&)>& g,
    const std::function<Complex(const Vec3&, const Vec3&)>& d) {
  const SurfaceMesh& mesh = sk.mesh;
  VectorXc gv = VectorXc::Zero(mesh.num_vertices());
  VectorXc dt = VectorXc::Zero(mesh.num_triangles());
  if (g)
    for (int v = 0; v < mesh.num_vertices(); ++v)
      if (cls.touches(v, Part::D)) gv(v) = g(mesh.vertices[v]);
  if (d) {
    for (int t = 0; t < mesh.num_triangles(); ++t) {
      if (mesh.parts[t] != Part::N) continue;
      const auto& tri = mesh.triangles[t];
      const Vec3 n = mesh.area_normal(t).normalized();
      dt(t) = triangle_average({mesh.vertices[tri[0]], mesh.vertices[tri[1]], mesh.vertices[tri[2]]},
                               [&](const Vec3& x) { return d(x, n); });
    }
  }
  return {gv, dt};
}

}  // namespace tbem
