#pragma once

#include "tbem/quadrature/panel_pair.hpp"

#include <cstring>
#include <filesystem>
#include <fstream>
#include <optional>

namespace tbem {

enum class SpaceKind { P0, P1 };

/// Lowest-order trace space on Γ_i: P0 on triangles (Neumann data) or continuous
/// P1 on vertices (Dirichlet data).
struct DiscreteSpace {
  SpaceKind kind = SpaceKind::P0;
  int subdomain = 1;
  int dofs = 0;

  static DiscreteSpace p0(const SubdomainSurface& s) { return {SpaceKind::P0, s.subdomain, s.num_panels()}; }
  static DiscreteSpace p1(const SubdomainSurface& s) { return {SpaceKind::P1, s.subdomain, s.num_vertices()}; }
};

enum class OperatorTag : std::uint32_t { V = 1, K = 2, Kp = 3, W = 4, Mass = 5, System = 6, Other = 0 };

struct GalerkinMatrix {
  MatrixXc data;
  DiscreteSpace test;   // rows
  DiscreteSpace trial;  // columns
  Complex s{0.0};
  OperatorTag tag = OperatorTag::Other;
};

/// Galerkin matrices of V, K, K′, W on one closed surface at one frequency.
/// V: P0×P0, K: P0 test × P1 trial, K′ = Kᵀ, W: P1×P1.
struct OperatorSet {
  MatrixXc V, K, W;
  Complex s{0.0};
  Material mat;

  [[nodiscard]] MatrixXc Kp() const { return K.transpose(); }
};

/// Checks that every edge of Γ_i is shared by exactly two panels.
inline void require_closed(const SubdomainSurface& surf) {
  std::map<std::pair<int, int>, int> edges;
  for (const auto& p : surf.panels)
    for (int k = 0; k < 3; ++k) ++edges[std::minmax(p.local_vertex[k], p.local_vertex[(k + 1) % 3])];
  for (const auto& [e, n] : edges)
    if (n != 2) throw DomainError("surface Γ_" + std::to_string(surf.subdomain) + " is not closed");
  if (surf.empty()) throw DomainError("surface Γ_" + std::to_string(surf.subdomain) + " is empty");
}

/// Assembles V, K and W in one sweep over unordered panel pairs. Single-threaded with
/// a fixed loop order, so the result is bitwise reproducible.
inline OperatorSet assemble_operators(const SubdomainSurface& surf, Complex s, const Material& mat,
                                      const QuadratureOrders& q = {}) {
  require_closed(surf);
  const int np = surf.num_panels(), nv = surf.num_vertices();
  const Complex kappa = decay_rate(s, mat);
  const double a2 = mat.a * mat.a;
  OperatorSet ops;
  ops.s = s;
  ops.mat = mat;
  ops.V = MatrixXc::Zero(np, np);
  ops.K = MatrixXc::Zero(np, nv);
  ops.W = MatrixXc::Zero(nv, nv);

  for (int p = 0; p < np; ++p) {
    const Panel& pp = surf.panels[p];
    for (int r = p; r < np; ++r) {
      const Panel& pr = surf.panels[r];
      const PanelPairKind kind = classify_pair(pp, pr);
      const PairIntegrals I = compute_pair_integrals(kappa, pp, pr, kind, q);
      const Complex v = I.g / a2;
      ops.V(p, r) = v;
      ops.V(r, p) = v;
      const double nn = pp.normal.dot(pr.normal);
      for (int k = 0; k < 3; ++k) {
        ops.K(p, pr.local_vertex[k]) += I.dly[k];
        if (r != p) ops.K(r, pp.local_vertex[k]) += I.dlx[k];
        for (int l = 0; l < 3; ++l) {
          const Complex w = a2 * (pp.curl[k].dot(pr.curl[l]) * I.g + kappa * kappa * nn * I.gll[k][l]);
          ops.W(pp.local_vertex[k], pr.local_vertex[l]) += w;
          if (r != p) ops.W(pr.local_vertex[l], pp.local_vertex[k]) += w;
        }
      }
    }
  }
  if (!ops.V.allFinite() || !ops.K.allFinite() || !ops.W.allFinite())
    throw NumericalError("non-finite entries in assembled boundary operators");
  return ops;
}

inline GalerkinMatrix assemble_bio(KernelKind kind, Complex s, const SubdomainSurface& surf, const Material& mat,
                                   const QuadratureOrders& q = {}) {
  const OperatorSet ops = assemble_operators(surf, s, mat, q);
  const auto p0 = DiscreteSpace::p0(surf), p1 = DiscreteSpace::p1(surf);
  switch (kind) {
    case KernelKind::V: return {ops.V, p0, p0, s, OperatorTag::V};
    case KernelKind::K: return {ops.K, p0, p1, s, OperatorTag::K};
    case KernelKind::Kp: return {ops.Kp(), p1, p0, s, OperatorTag::Kp};
    case KernelKind::W: return {ops.W, p1, p1, s, OperatorTag::W};
  }
  throw DomainError("unknown operator kind");
}

/// Mixed mass matrix M(t, v) = ∫ φ_t λ_v over P0 × P1, optionally restricted to one part.
inline MatrixXr mixed_mass(const SubdomainSurface& surf, std::optional<Part> restriction = std::nullopt) {
  MatrixXr m = MatrixXr::Zero(surf.num_panels(), surf.num_vertices());
  for (int t = 0; t < surf.num_panels(); ++t) {
    const Panel& p = surf.panels[t];
    if (restriction && p.part != *restriction) continue;
    for (int k = 0; k < 3; ++k) m(t, p.local_vertex[k]) += p.area / 3.0;
  }
  return m;
}

/// P1 × P1 mass matrix, optionally restricted to one part.
inline MatrixXr p1_mass(const SubdomainSurface& surf, std::optional<Part> restriction = std::nullopt) {
  MatrixXr m = MatrixXr::Zero(surf.num_vertices(), surf.num_vertices());
  for (const auto& p : surf.panels) {
    if (restriction && p.part != *restriction) continue;
    for (int k = 0; k < 3; ++k)
      for (int l = 0; l < 3; ++l) m(p.local_vertex[k], p.local_vertex[l]) += p.area * (k == l ? 2.0 : 1.0) / 12.0;
  }
  return m;
}

/// P0 × P0 (diagonal) mass matrix, optionally restricted to one part.
inline VectorXr p0_mass(const SubdomainSurface& surf, std::optional<Part> restriction = std::nullopt) {
  VectorXr m = VectorXr::Zero(surf.num_panels());
  for (int t = 0; t < surf.num_panels(); ++t)
    if (!restriction || surf.panels[t].part == *restriction) m(t) = surf.panels[t].area;
  return m;
}

inline GalerkinMatrix assemble_mass(const SubdomainSurface& surf, std::optional<Part> restriction = std::nullopt) {
  return {mixed_mass(surf, restriction).cast<Complex>(), DiscreteSpace::p0(surf), DiscreteSpace::p1(surf),
          Complex(0.0), OperatorTag::Mass};
}

/// Parses "D", "N", "I" or "J"; anything else is an unknown part tag.
inline Part parse_part(const std::string& s) {
  if (s.size() == 1)
    if (auto p = part_from_char(s[0])) return *p;
  throw DomainError("unknown part tag '" + s + "'");
}

// Binary dump: "TBEM", uint32 rows, cols, tag, then Re s, Im s (32 bytes), followed by
// row-major little-endian complex doubles.
inline void dump_matrix(const std::filesystem::path& path, const MatrixXc& m, OperatorTag tag, Complex s) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write matrix dump " + path.string());
  const char magic[4] = {'T', 'B', 'E', 'M'};
  const std::uint32_t header[3] = {static_cast<std::uint32_t>(m.rows()), static_cast<std::uint32_t>(m.cols()),
                                   static_cast<std::uint32_t>(tag)};
  const double sv[2] = {s.real(), s.imag()};
  out.write(magic, 4);
  out.write(reinterpret_cast<const char*>(header), sizeof header);
  out.write(reinterpret_cast<const char*>(sv), sizeof sv);
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      const double z[2] = {m(i, j).real(), m(i, j).imag()};
      out.write(reinterpret_cast<const char*>(z), sizeof z);
    }
}

struct MatrixDump {
  MatrixXc data;
  OperatorTag tag = OperatorTag::Other;
  Complex s{0.0};
};

inline MatrixDump read_matrix_dump(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open matrix dump " + path.string());
  char magic[4];
  std::uint32_t header[3];
  double sv[2];
  in.read(magic, 4);
  in.read(reinterpret_cast<char*>(header), sizeof header);
  in.read(reinterpret_cast<char*>(sv), sizeof sv);
  if (!in || std::memcmp(magic, "TBEM", 4) != 0) throw ParseError(path.string() + ": not a matrix dump");
  MatrixDump d;
  d.tag = static_cast<OperatorTag>(header[2]);
  d.s = {sv[0], sv[1]};
  d.data.resize(header[0], header[1]);
  for (Eigen::Index i = 0; i < d.data.rows(); ++i)
    for (Eigen::Index j = 0; j < d.data.cols(); ++j) {
      double z[2];
      in.read(reinterpret_cast<char*>(z), sizeof z);
      d.data(i, j) = {z[0], z[1]};
    }
  if (!in) throw ParseError(path.string() + ": truncated matrix dump");
  return d;
}

}  // namespace tbem
