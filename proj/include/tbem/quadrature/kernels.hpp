#pragma once

#include "tbem/core.hpp"

#include <cmath>

namespace tbem {

/// Decay rate κ = s p / a of the Laplace-domain kernel exp(−κ r) / (4π r).
inline Complex decay_rate(Complex s, const Material& mat) { return s * mat.p / mat.a; }

/// e^{−κr} / (4π r), the kernel without the 1/a² prefactor.
inline Complex yukawa(Complex kappa, double r) { return std::exp(-kappa * r) / (kFourPi * r); }

/// e^{−κr} (1 + κr) / (4π r³): ∇_y G(x − y) = h · (x − y).
inline Complex yukawa_radial(Complex kappa, double r) {
  return std::exp(-kappa * r) * (1.0 + kappa * r) / (kFourPi * r * r * r);
}

/// k̂(s, z) = exp(−s p |z| / a) / (4π a² |z|).
inline Complex kernel_eval(Complex s, const Vec3& z, const Material& mat) {
  const double r = z.norm();
  if (!(r > 0.0)) throw DomainError("kernel evaluated at z = 0 (kernel singularity)");
  return yukawa(decay_rate(s, mat), r) / (mat.a * mat.a);
}

/// a² ∂/∂n_y k̂(s, x − y); the conormal weight a² cancels the kernel prefactor.
inline Complex kernel_conormal(Complex s, const Vec3& x, const Vec3& y, const Vec3& n_y, const Material& mat) {
  const Vec3 d = x - y;
  const double r = d.norm();
  if (!(r > 0.0)) throw DomainError("conormal kernel evaluated at x = y (kernel singularity)");
  return yukawa_radial(decay_rate(s, mat), r) * d.dot(n_y);
}

}  // namespace tbem
