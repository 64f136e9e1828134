#pragma once

#include "tbem/mesh/surface_mesh.hpp"

#include <vector>

namespace tbem {

/// Offsets of the blocks (φ_{1,D}, φ_{1,N}, φ_{2,D}, φ_{2,N}) in a flat multi-trace vector.
struct TraceLayout {
  int num_subdomains = 0;
  std::array<int, 2> nd{0, 0};  // P1 DOFs per Γ_j
  std::array<int, 2> nn{0, 0};  // P0 DOFs per Γ_j

  [[nodiscard]] int dirichlet_offset(int j) const { return j == 1 ? 0 : nd[0] + nn[0]; }
  [[nodiscard]] int neumann_offset(int j) const { return dirichlet_offset(j) + nd[j - 1]; }
  [[nodiscard]] int block_offset(int j) const { return dirichlet_offset(j); }
  [[nodiscard]] int block_size(int j) const { return nd[j - 1] + nn[j - 1]; }
  [[nodiscard]] int size() const { return nd[0] + nn[0] + nd[1] + nn[1]; }

  bool operator==(const TraceLayout&) const = default;
};

/// Discrete multi-trace vector: P1 Dirichlet and P0 Neumann coefficients per subdomain.
struct MultiTraceVector {
  TraceLayout layout;
  VectorXc data;

  MultiTraceVector() = default;
  explicit MultiTraceVector(const TraceLayout& l) : layout(l), data(VectorXc::Zero(l.size())) {}
  MultiTraceVector(const TraceLayout& l, VectorXc d) : layout(l), data(std::move(d)) {
    if (data.size() != layout.size()) throw DomainError("multi-trace data does not match its layout");
  }

  auto dirichlet(int j) { return data.segment(layout.dirichlet_offset(j), layout.nd[j - 1]); }
  auto neumann(int j) { return data.segment(layout.neumann_offset(j), layout.nn[j - 1]); }
  [[nodiscard]] auto dirichlet(int j) const { return data.segment(layout.dirichlet_offset(j), layout.nd[j - 1]); }
  [[nodiscard]] auto neumann(int j) const { return data.segment(layout.neumann_offset(j), layout.nn[j - 1]); }
};

/// Mesh plus its per-subdomain surfaces and the induced multi-trace layout.
struct Skeleton {
  SurfaceMesh mesh;
  std::vector<SubdomainSurface> surfaces;
  TraceLayout layout;

  [[nodiscard]] int num_subdomains() const { return static_cast<int>(surfaces.size()); }
  [[nodiscard]] const SubdomainSurface& surface(int j) const { return surfaces.at(j - 1); }
};

inline Skeleton make_skeleton(SurfaceMesh mesh) {
  Skeleton sk;
  sk.mesh = std::move(mesh);
  const int n = sk.mesh.num_subdomains();
  if (n == 2 && !sk.mesh.has_subdomain(1)) throw DomainError("mesh has Γ_2 but no Γ_1");
  for (int j = 1; j <= n; ++j) {
    sk.surfaces.push_back(extract_subdomain(sk.mesh, j));
    sk.layout.nd[j - 1] = sk.surfaces.back().num_vertices();
    sk.layout.nn[j - 1] = sk.surfaces.back().num_panels();
  }
  sk.layout.num_subdomains = n;
  return sk;
}

}  // namespace tbem
