#pragma once

#include "tbem/calderon/calderon.hpp"

#include <functional>
#include <random>

namespace tbem {

/// Transfer operator T̂(s) on Γ_I, given through its Galerkin matrices
/// ⟨T̂(s) φ_D, ψ_D⟩_{Γ_{j,I}} on the P1 space of each Γ_j.
struct ImpedanceOperator {
  std::string name = "none";
  std::function<std::vector<MatrixXc>(Complex)> galerkin;

  [[nodiscard]] std::vector<MatrixXc> at(Complex s) const { return galerkin(s); }
};

/// T(t) = −a p δ₀, i.e. T̂(s) = −a_j p_j times the Γ_I-restricted P1 mass on each side.
inline ImpedanceOperator impedance_default(const Skeleton& sk, const MaterialParams& mat) {
  mat.validate();
  std::vector<MatrixXc> base;
  for (int j = 1; j <= sk.num_subdomains(); ++j) {
    const Material m = mat.of(j);
    base.push_back((-m.a * m.p * p1_mass(sk.surface(j), Part::I)).cast<Complex>());
  }
  ImpedanceOperator T;
  T.name = "default";
  T.galerkin = [base](Complex) { return base; };
  return T;
}

/// Zero operator, for configurations without an impedance part.
inline ImpedanceOperator impedance_zero(const Skeleton& sk) {
  std::vector<MatrixXc> base;
  for (const auto& s : sk.surfaces) base.push_back(MatrixXc::Zero(s.num_vertices(), s.num_vertices()));
  ImpedanceOperator T;
  T.name = "zero";
  T.galerkin = [base](Complex) { return base; };
  return T;
}

/// Random P1 vector supported on the vertices of Γ_{j,I} triangles.
inline VectorXc random_impedance_density(const SubdomainSurface& surf, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  VectorXc phi = VectorXc::Zero(surf.num_vertices());
  std::vector<bool> on_i(surf.num_vertices(), false);
  for (const auto& p : surf.panels)
    if (p.part == Part::I)
      for (int v : p.local_vertex) on_i[v] = true;
  for (int v = 0; v < surf.num_vertices(); ++v)
    if (on_i[v]) phi(v) = {nd(rng), nd(rng)};
  return phi;
}

struct DissipativityReport {
  double max_quotient = -std::numeric_limits<double>::infinity();  // max Re⟨T̂φ, φ̄⟩ / ‖φ‖²_{L²(Γ_I)}
  double max_default_defect = 0.0;   // |Re⟨T̂φ, φ̄⟩ + a p ‖φ‖²| / (a p ‖φ‖²), default operator only
  double conjugation_defect = 0.0;   // max |T̂(s̄) − conj T̂(s)|
  int samples = 0;
  [[nodiscard]] bool dissipative(double tol = 1e-12) const { return max_quotient <= tol; }
};

/// Probes Re⟨T̂(s) φ, φ̄⟩ ≤ 0 for random φ on Γ_I at the given frequencies.
inline DissipativityReport probe_dissipativity(const ImpedanceOperator& T, const Skeleton& sk,
                                               const std::vector<Complex>& freqs, int samples, std::uint64_t seed,
                                               const MaterialParams* default_mat = nullptr) {
  DissipativityReport rep;
  std::mt19937_64 rng(seed);
  std::vector<MatrixXr> mass;
  for (const auto& s : sk.surfaces) mass.push_back(p1_mass(s, Part::I));
  for (Complex s : freqs) {
    const auto Ts = T.at(s);
    const auto Tc = T.at(std::conj(s));
    for (std::size_t j = 0; j < Ts.size(); ++j)
      rep.conjugation_defect = std::max(rep.conjugation_defect, (Tc[j] - Ts[j].conjugate()).cwiseAbs().maxCoeff());
    for (int k = 0; k < samples; ++k) {
      for (int j = 1; j <= sk.num_subdomains(); ++j) {
        const VectorXc phi = random_impedance_density(sk.surface(j), rng);
        const double l2 = phi.dot(mass[j - 1].cast<Complex>() * phi).real();
        if (l2 == 0.0) continue;
        const double q = phi.dot(Ts[j - 1] * phi).real();
        rep.max_quotient = std::max(rep.max_quotient, q / l2);
        if (default_mat) {
          const Material m = default_mat->of(j);
          rep.max_default_defect = std::max(rep.max_default_defect, std::abs(q + m.a * m.p * l2) / (m.a * m.p * l2));
        }
        ++rep.samples;
      }
    }
  }
  if (rep.samples == 0) rep.max_quotient = 0.0;
  return rep;
}

/// Aborts with a diagnostic when T̂ fails the sign condition at any probe frequency.
inline void require_dissipative(const ImpedanceOperator& T, const Skeleton& sk, const std::vector<Complex>& freqs,
                                std::uint64_t seed = 7) {
  const auto rep = probe_dissipativity(T, sk, freqs, 10, seed);
  if (!rep.dissipative(1e-10))
    throw DomainError("transfer operator '" + T.name + "' is not dissipative: max Re<T phi, conj phi>/|phi|^2 = " +
                      std::to_string(rep.max_quotient));
}

}  // namespace tbem
