#pragma once

#include "tbem/traces/norms.hpp"

#include <functional>

namespace tbem {

/// Principal square roots s^{1/2} and s^{−1/2}.
struct ScalingPair {
  Complex sqrt_s;
  Complex inv_sqrt_s;

  explicit ScalingPair(Complex s) {
    if (!(s.real() > 0.0)) throw DomainError("trace scaling needs Re s > 0");
    sqrt_s = std::sqrt(s);
    inv_sqrt_s = 1.0 / sqrt_s;
  }
};

enum class ScaleDirection { Forward, Inverse };

/// Forward: Dirichlet blocks × s^{1/2}, Neumann blocks × s^{−1/2}; Inverse undoes it.
inline MultiTraceVector scale_traces(Complex s, const MultiTraceVector& t, ScaleDirection dir) {
  const ScalingPair sc(s);
  const Complex d = dir == ScaleDirection::Forward ? sc.sqrt_s : sc.inv_sqrt_s;
  const Complex n = dir == ScaleDirection::Forward ? sc.inv_sqrt_s : sc.sqrt_s;
  MultiTraceVector out = t;
  for (int j = 1; j <= t.layout.num_subdomains; ++j) {
    out.dirichlet(j) *= d;
    out.neumann(j) *= n;
  }
  return out;
}

/// Diagonal of D(s) in the layout ordering.
inline VectorXc scaling_diagonal(Complex s, const TraceLayout& layout) {
  MultiTraceVector ones(layout, VectorXc::Ones(layout.size()));
  return scale_traces(s, ones, ScaleDirection::Forward).data;
}

/// A(s) = diag(A_1, A_2), A_j = [[−K_j, s V_j], [W_j / s, K′_j]], stored through its factors.
struct BlockCalderon {
  Complex s{1.0};
  TraceLayout layout;
  std::vector<OperatorSet> ops;
  std::vector<MatrixXr> mass;  // mixed P0 × P1 mass per Γ_j

  /// Galerkin matrix of (Φ, Ψ) ↦ ⟨A(s) Φ, Ψ⟩⁺ for one subdomain; rows (ψ_D, ψ_N),
  /// columns (φ_D, φ_N).
  [[nodiscard]] MatrixXc galerkin_block(int j, double identity_shift = 0.0) const {
    const OperatorSet& o = ops.at(j - 1);
    const MatrixXr& M = mass.at(j - 1);
    const int nd = layout.nd[j - 1], nn = layout.nn[j - 1];
    MatrixXc g(nd + nn, nd + nn);
    g.topLeftCorner(nd, nd) = o.W / s;
    g.topRightCorner(nd, nn) = o.K.transpose() + identity_shift * M.transpose().cast<Complex>();
    g.bottomLeftCorner(nn, nd) = -o.K + identity_shift * M.cast<Complex>();
    g.bottomRightCorner(nn, nn) = s * o.V;
    return g;
  }

  /// Galerkin matrix of ⟨A Φ, Ψ⟩⁺ over all subdomains (identity_shift = −½ gives A − I/2).
  [[nodiscard]] MatrixXc galerkin(double identity_shift = 0.0) const {
    MatrixXc g = MatrixXc::Zero(layout.size(), layout.size());
    for (int j = 1; j <= layout.num_subdomains; ++j)
      g.block(layout.block_offset(j), layout.block_offset(j), layout.block_size(j), layout.block_size(j)) =
          galerkin_block(j, identity_shift);
    return g;
  }

  [[nodiscard]] MatrixXc sV(int j) const { return s * ops.at(j - 1).V; }
  [[nodiscard]] MatrixXc minus_K(int j) const { return -ops.at(j - 1).K; }
  [[nodiscard]] MatrixXc W_over_s(int j) const { return ops.at(j - 1).W / s; }
  [[nodiscard]] MatrixXc Kp(int j) const { return ops.at(j - 1).Kp(); }
};

inline BlockCalderon build_block_calderon(Complex s, const Skeleton& sk, const MaterialParams& mat,
                                          const QuadratureOrders& q = {}) {
  if (!(s.real() > 0.0)) throw DomainError("Calderón operator needs Re s > 0");
  mat.validate();
  BlockCalderon A;
  A.s = s;
  A.layout = sk.layout;
  for (int j = 1; j <= sk.num_subdomains(); ++j) {
    A.ops.push_back(assemble_operators(sk.surface(j), s, mat.of(j), q));
    A.mass.push_back(mixed_mass(sk.surface(j)));
  }
  return A;
}

/// Mixed mass matrices of a skeleton, optionally restricted to one part.
inline std::vector<MatrixXr> skeleton_masses(const Skeleton& sk, std::optional<Part> restriction = std::nullopt) {
  std::vector<MatrixXr> m;
  for (const auto& s : sk.surfaces) m.push_back(mixed_mass(s, restriction));
  return m;
}

/// ⟨Φ, Ψ⟩± = Σ_j ⟨φ_{j,D}, ψ_{j,N}⟩ ± ⟨φ_{j,N}, ψ_{j,D}⟩ without conjugation.
inline Complex pairing(int sign, const MultiTraceVector& phi, const MultiTraceVector& psi,
                       const std::vector<MatrixXr>& mass) {
  if (!(phi.layout == psi.layout)) throw DomainError("pairing of multi-trace vectors with different layouts");
  if (static_cast<int>(mass.size()) < phi.layout.num_subdomains) throw DomainError("missing mass matrices");
  if (sign != 1 && sign != -1) throw DomainError("pairing sign must be +1 or -1");
  Complex sum = 0.0;
  for (int j = 1; j <= phi.layout.num_subdomains; ++j) {
    const MatrixXc M = mass[j - 1].cast<Complex>();
    if (M.rows() != phi.layout.nn[j - 1] || M.cols() != phi.layout.nd[j - 1])
      throw DomainError("mass matrix size does not match the layout");
    sum += (psi.neumann(j).transpose() * (M * phi.dirichlet(j)))(0, 0);
    sum += static_cast<double>(sign) * (phi.neumann(j).transpose() * (M * psi.dirichlet(j)))(0, 0);
  }
  return sum;
}

/// Discrete traces of a field on every Γ_j: P1 interpolation of the value and P0 panel
/// averages of the conormal derivative a_j² ∂_{n_j} u. `conormal(j, x, n)` must
/// include the a² weight.
inline MultiTraceVector project_traces(const Skeleton& sk, const std::function<Complex(int, const Vec3&)>& value,
                                       const std::function<Complex(int, const Vec3&, const Vec3&)>& conormal) {
  MultiTraceVector t(sk.layout);
  for (int j = 1; j <= sk.num_subdomains(); ++j) {
    const SubdomainSurface& s = sk.surface(j);
    for (int l = 0; l < s.num_vertices(); ++l) t.dirichlet(j)(l) = value(j, sk.mesh.vertices[s.vertices[l]]);
    for (int l = 0; l < s.num_panels(); ++l) {
      const Panel& p = s.panels[l];
      t.neumann(j)(l) = triangle_average(p.v, [&](const Vec3& x) { return conormal(j, x, p.normal); });
    }
  }
  return t;
}

struct ResidualResult {
  double value = 0.0;
  bool trivial = false;
};

/// ‖(A(s) − I/2) γ‖ in the discrete dual norm, relative to ‖γ‖_X, for scaled traces γ.
/// Zero traces return 0 with the trivial flag.
inline ResidualResult calderon_residual(const BlockCalderon& A, const MultiTraceVector& scaled,
                                        const NormSet& norms) {
  if (!(scaled.layout == A.layout)) throw DomainError("traces do not match the Calderón operator");
  const double xnorm = discrete_norm(scaled, norms);
  if (xnorm == 0.0) return {0.0, true};
  double sum = 0.0;
  for (int j = 1; j <= A.layout.num_subdomains; ++j) {
    const int o = A.layout.block_offset(j), nd = A.layout.nd[j - 1], nn = A.layout.nn[j - 1];
    const VectorXc f = A.galerkin_block(j, -0.5) * scaled.data.segment(o, nd + nn);
    // rows tested with ψ_D measure a Neumann-type residual (dual of H^{1/2}),
    // rows tested with ψ_N a Dirichlet-type residual (dual of H^{−1/2})
    const double rn = dual_norm(norms.surfaces[j - 1].half_llt, f.head(nd));
    const double rd = dual_norm(norms.surfaces[j - 1].minus_half_llt, f.tail(nn));
    sum += rn * rn + rd * rd;
  }
  return {std::sqrt(sum) / xnorm, false};
}

}  // namespace tbem
