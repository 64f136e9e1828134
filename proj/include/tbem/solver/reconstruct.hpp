#pragma once

#include "tbem/operators/potentials.hpp"
#include "tbem/traces/layout.hpp"

namespace tbem {

/// Kirchhoff representation û_j = Ŝ_j(s) γ_N û_j − D̂_j(s) γ_D û_j on one subdomain,
/// from unscaled traces. Points are not checked for membership in Ω_j.
inline VectorXc represent(int j, Complex s, const Skeleton& sk, const MaterialParams& mat,
                          const MultiTraceVector& traces, const std::vector<Vec3>& points) {
  if (!(traces.layout == sk.layout)) throw DomainError("traces do not match the mesh");
  if (j < 1 || j > sk.num_subdomains()) throw DomainError("no subdomain " + std::to_string(j));
  const SubdomainSurface& surf = sk.surface(j);
  const Material m = mat.of(j);
  return eval_potential(PotentialKind::Single, s, surf, traces.neumann(j), points, m) -
         eval_potential(PotentialKind::Double, s, surf, traces.dirichlet(j), points, m);
}

/// Values and gradients of the representation of subdomain j at the points.
inline std::vector<PotentialSample> represent_samples(int j, Complex s, const Skeleton& sk, const MaterialParams& mat,
                                                      const MultiTraceVector& traces, const std::vector<Vec3>& points) {
  if (!(traces.layout == sk.layout)) throw DomainError("traces do not match the mesh");
  if (j < 1 || j > sk.num_subdomains()) throw DomainError("no subdomain " + std::to_string(j));
  const SubdomainSurface& surf = sk.surface(j);
  const Material m = mat.of(j);
  auto out = eval_potential_samples(PotentialKind::Single, s, surf, traces.neumann(j), points, m);
  const auto dl = eval_potential_samples(PotentialKind::Double, s, surf, traces.dirichlet(j), points, m);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i].value -= dl[i].value;
    out[i].gradient -= dl[i].gradient;
  }
  return out;
}

/// Subdomain containing x by winding number, or 0 outside Ω₁ ∪ Ω₂.
inline int locate(const Skeleton& sk, const Vec3& x) {
  for (int j = 1; j <= sk.num_subdomains(); ++j)
    if (winding_number(sk.surface(j), x) > 0.5) return j;
  return 0;
}

struct FieldValues {
  VectorXc values;
  std::vector<int> subdomain;
};

/// Field values at points in Ω₁ ∪ Ω₂, each from the representation of its own subdomain.
inline FieldValues reconstruct_field(Complex s, const Skeleton& sk, const MaterialParams& mat,
                                     const MultiTraceVector& traces, const std::vector<Vec3>& points) {
  FieldValues out;
  out.values = VectorXc::Zero(static_cast<Eigen::Index>(points.size()));
  out.subdomain.resize(points.size());
  std::vector<std::vector<Vec3>> groups(sk.num_subdomains());
  std::vector<std::vector<std::size_t>> where(sk.num_subdomains());
  for (std::size_t i = 0; i < points.size(); ++i) {
    const int j = locate(sk, points[i]);
    if (j == 0) throw DomainError("evaluation point " + std::to_string(i) + " lies outside the domain");
    out.subdomain[i] = j;
    groups[j - 1].push_back(points[i]);
    where[j - 1].push_back(i);
  }
  for (int j = 1; j <= sk.num_subdomains(); ++j) {
    if (groups[j - 1].empty()) continue;
    const VectorXc v = represent(j, s, sk, mat, traces, groups[j - 1]);
    for (std::size_t k = 0; k < where[j - 1].size(); ++k) out.values(static_cast<Eigen::Index>(where[j - 1][k])) = v(static_cast<Eigen::Index>(k));
  }
  return out;
}

}  // namespace tbem
