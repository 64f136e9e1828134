#pragma once

#include "tbem/operators/assembly.hpp"
#include "tbem/traces/layout.hpp"

#include <random>

namespace tbem {

enum class NormKind { Half, MinusHalf, Multi };

/// Gram matrices of the discrete fractional norms on one surface at real σ₀ with unit
/// material: ‖φ‖²_{−1/2} = φᴴ V(σ₀) φ on P0, ‖ψ‖²_{1/2} = ψᴴ (W(σ₀) + M) ψ on P1.
struct SurfaceNorms {
  MatrixXr minus_half;  // P0 Gram
  MatrixXr half;        // P1 Gram
  Eigen::LLT<MatrixXr> minus_half_llt;
  Eigen::LLT<MatrixXr> half_llt;
};

inline SurfaceNorms make_surface_norms(const SubdomainSurface& surf, double sigma0 = 1.0,
                                       const QuadratureOrders& q = {}) {
  if (!(sigma0 > 0.0)) throw DomainError("norm frequency σ₀ must be positive");
  const OperatorSet ops = assemble_operators(surf, sigma0, Material{}, q);
  SurfaceNorms n;
  n.minus_half = ops.V.real();
  n.minus_half = 0.5 * (n.minus_half + n.minus_half.transpose()).eval();
  n.half = ops.W.real() + p1_mass(surf);
  n.half = 0.5 * (n.half + n.half.transpose()).eval();
  n.minus_half_llt.compute(n.minus_half);
  n.half_llt.compute(n.half);
  if (n.minus_half_llt.info() != Eigen::Success || n.half_llt.info() != Eigen::Success)
    throw NumericalError("norm Gram matrices are not positive definite");
  return n;
}

/// Norm data for every subdomain surface of a skeleton.
struct NormSet {
  std::vector<SurfaceNorms> surfaces;
  double sigma0 = 1.0;

  /// Block-diagonal Gram matrix of the multi-trace norm in the layout ordering.
  [[nodiscard]] MatrixXr multi_gram(const TraceLayout& layout) const {
    MatrixXr g = MatrixXr::Zero(layout.size(), layout.size());
    for (int j = 1; j <= layout.num_subdomains; ++j) {
      const auto& s = surfaces.at(j - 1);
      g.block(layout.dirichlet_offset(j), layout.dirichlet_offset(j), layout.nd[j - 1], layout.nd[j - 1]) = s.half;
      g.block(layout.neumann_offset(j), layout.neumann_offset(j), layout.nn[j - 1], layout.nn[j - 1]) = s.minus_half;
    }
    return g;
  }
};

inline NormSet make_norm_set(const Skeleton& sk, double sigma0 = 1.0, const QuadratureOrders& q = {}) {
  NormSet n;
  n.sigma0 = sigma0;
  for (const auto& s : sk.surfaces) n.surfaces.push_back(make_surface_norms(s, sigma0, q));
  return n;
}

namespace detail {

inline double quadratic_norm(const MatrixXr& gram, const VectorXc& v) {
  if (!v.allFinite()) throw DomainError("norm of a non-finite vector");
  const double q = (v.adjoint() * (gram.cast<Complex>() * v))(0, 0).real();
  return std::sqrt(std::max(q, 0.0));
}

}  // namespace detail

inline double discrete_norm(NormKind kind, const VectorXc& v, const SurfaceNorms& n) {
  switch (kind) {
    case NormKind::Half:
      if (v.size() != n.half.rows()) throw DomainError("P1 vector size does not match the surface");
      return detail::quadratic_norm(n.half, v);
    case NormKind::MinusHalf:
      if (v.size() != n.minus_half.rows()) throw DomainError("P0 vector size does not match the surface");
      return detail::quadratic_norm(n.minus_half, v);
    case NormKind::Multi: break;
  }
  throw DomainError("multi norm needs a multi-trace vector");
}

/// ‖Φ‖_X: root of the sum of squared block norms.
inline double discrete_norm(const MultiTraceVector& phi, const NormSet& n) {
  double sum = 0.0;
  for (int j = 1; j <= phi.layout.num_subdomains; ++j) {
    const double d = discrete_norm(NormKind::Half, phi.dirichlet(j), n.surfaces.at(j - 1));
    const double m = discrete_norm(NormKind::MinusHalf, phi.neumann(j), n.surfaces.at(j - 1));
    sum += d * d + m * m;
  }
  return std::sqrt(sum);
}

/// Dual norm of a functional given by its Galerkin load vector f: sqrt(fᴴ Gram⁻¹ f).
inline double dual_norm(const Eigen::LLT<MatrixXr>& gram, const VectorXc& f) {
  const VectorXc y = gram.solve(f.real()).cast<Complex>() + Complex(0, 1) * gram.solve(f.imag()).cast<Complex>();
  return std::sqrt(std::max(f.dot(y).real(), 0.0));
}

/// Spectral norm of Lr⁻¹ G Lc⁻ᵀ where Gram_r = Lr Lrᵀ, Gram_c = Lc Lcᵀ: the operator norm of
/// the bilinear form G measured in the row and column Gram norms. Power iteration.
inline double operator_norm(const MatrixXc& G, const Eigen::LLT<MatrixXr>& row, const Eigen::LLT<MatrixXr>& col,
                            int max_iter = 300, double tol = 1e-9) {
  const MatrixXr Lr = row.matrixL(), Lc = col.matrixL();
  auto solve_real = [](const auto& tri, const VectorXc& v) {
    VectorXc out(v.size());
    out.real() = tri.solve(v.real());
    out.imag() = tri.solve(v.imag());
    return out;
  };
  const auto lr = Lr.triangularView<Eigen::Lower>();
  const auto lc = Lc.triangularView<Eigen::Lower>();
  const auto lrt = Lr.transpose().triangularView<Eigen::Upper>();
  const auto lct = Lc.transpose().triangularView<Eigen::Upper>();
  std::mt19937_64 rng(12345);
  std::normal_distribution<double> nd;
  VectorXc x(G.cols());
  for (auto& c : x) c = {nd(rng), nd(rng)};
  x.normalize();
  double sigma = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    // y = B x with B = Lr⁻¹ G Lc⁻ᵀ; then x = Bᴴ y = Lc⁻¹ Gᴴ Lr⁻ᵀ y
    const VectorXc y = solve_real(lr, G * solve_real(lct, x));
    const VectorXc z = solve_real(lc, G.adjoint() * solve_real(lrt, y));
    const double next = std::sqrt(z.norm());
    x = z / z.norm();
    if (std::abs(next - sigma) <= tol * next) {
      sigma = next;
      break;
    }
    sigma = next;
  }
  return sigma;
}

}  // namespace tbem
