#pragma once

#include "tbem/core.hpp"

#include <string>

namespace tbem {

/// Causal pulse f(t) = sin⁴(π (t − t₀)/w) on [t₀, t₀ + w], zero elsewhere. C³ in t.
struct Sin4Pulse {
  double onset = 0.0;
  double width = 1.0;

  [[nodiscard]] double operator()(double t) const {
    const double u = (t - onset) / width;
    if (u <= 0.0 || u >= 1.0) return 0.0;
    return std::pow(std::sin(kPi * u), 4);
  }

  [[nodiscard]] double derivative(double t) const {
    const double u = (t - onset) / width;
    if (u <= 0.0 || u >= 1.0) return 0.0;
    const double sn = std::sin(kPi * u), cs = std::cos(kPi * u);
    return 4.0 * sn * sn * sn * cs * kPi / width;
  }

  /// Laplace transform, from sin⁴x = 3/8 − cos2x/2 + cos4x/8.
  [[nodiscard]] Complex laplace(Complex s) const {
    const double k1 = 2.0 * kPi / width, k2 = 4.0 * kPi / width;
    const Complex shape = 3.0 / (8.0 * s) - 0.5 * s / (s * s + k1 * k1) + 0.125 * s / (s * s + k2 * k2);
    return std::exp(-s * onset) * (1.0 - std::exp(-s * width)) * shape;
  }
};

/// Smooth bump on the unit sphere centered at the north pole: cos²(πθ/(2θ_c)) for θ < θ_c.
struct PolarCap {
  double theta_c = kPi / 3.0;

  [[nodiscard]] double operator()(const Vec3& x) const {
    const double r = x.norm();
    if (r == 0.0) return 0.0;
    const double theta = std::acos(std::clamp(x.z() / r, -1.0, 1.0));
    if (theta >= theta_c) return 0.0;
    const double c = std::cos(kPi * theta / (2.0 * theta_c));
    return c * c;
  }
};

/// Time-domain point source u(x, t) = f(t − p|x − y₀|/a)/(4π a² |x − y₀|), the inverse
/// Laplace transform of f̂(s) k̂(s, x − y₀).
struct RetardedPointSource {
  Vec3 y0{0.0, 0.0, 2.0};
  Sin4Pulse pulse;

  [[nodiscard]] double value(const Vec3& x, double t, const Material& m) const {
    const double r = (x - y0).norm();
    if (r == 0.0) throw DomainError("retarded point source evaluated at its center");
    return pulse(t - m.p * r / m.a) / (kFourPi * m.a * m.a * r);
  }

  /// ∂_t u at (x, t).
  [[nodiscard]] double rate(const Vec3& x, double t, const Material& m) const {
    const double r = (x - y0).norm();
    if (r == 0.0) throw DomainError("retarded point source evaluated at its center");
    return pulse.derivative(t - m.p * r / m.a) / (kFourPi * m.a * m.a * r);
  }

  /// a² ∂_n u at (x, t).
  [[nodiscard]] double conormal(const Vec3& x, const Vec3& n, double t, const Material& m) const {
    const Vec3 d = x - y0;
    const double r = d.norm();
    if (r == 0.0) throw DomainError("retarded point source evaluated at its center");
    const double tau = t - m.p * r / m.a;
    const double drdn = d.dot(n) / r;
    const double dr = -pulse(tau) / (kFourPi * r * r) - pulse.derivative(tau) * m.p / (m.a * kFourPi * r);
    return dr * drdn;
  }
};

}  // namespace tbem
