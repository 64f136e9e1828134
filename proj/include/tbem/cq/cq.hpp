#pragma once

#include "tbem/core.hpp"

#include <limits>
#include <string>
#include <vector>

namespace tbem {

enum class CqScheme { BDF1, BDF2 };

inline CqScheme parse_scheme(const std::string& s) {
  if (s == "BDF1" || s == "bdf1") return CqScheme::BDF1;
  if (s == "BDF2" || s == "bdf2") return CqScheme::BDF2;
  throw ConfigError("unknown CQ scheme '" + s + "' (expected BDF1 or BDF2)");
}

inline const char* to_string(CqScheme s) { return s == CqScheme::BDF1 ? "BDF1" : "BDF2"; }

/// Generating function δ(ζ) of the multistep scheme.
inline Complex cq_delta(CqScheme scheme, Complex z) {
  if (scheme == CqScheme::BDF1) return 1.0 - z;
  return 1.5 - 2.0 * z + 0.5 * z * z;
}

/// Contour radius λ = ε^{1/(2L)} balancing aliasing against round-off for L = N + 1 points.
inline double default_contour_radius(int steps) {
  return std::pow(std::numeric_limits<double>::epsilon(), 1.0 / (2.0 * (steps + 1)));
}

/// Frequencies s_ℓ = δ(λ ζ^ℓ)/Δt, ζ = e^{2πi/L}, L = N + 1, and the scaled DFT pair
/// mapping time samples 0..N to them and back.
struct CqContour {
  CqScheme scheme = CqScheme::BDF2;
  double dt = 0.0;
  int steps = 0;  // N
  double lambda = 0.0;

  CqContour() = default;
  CqContour(CqScheme sch, double step, int n, double radius = 0.0) : scheme(sch), dt(step), steps(n) {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw DomainError("CQ time step must be positive");
    if (n < 0) throw DomainError("CQ needs a nonnegative number of steps");
    lambda = radius == 0.0 ? default_contour_radius(n) : radius;
    if (!(lambda > 0.0 && lambda < 1.0)) throw DomainError("CQ contour radius must lie in (0, 1)");
  }

  [[nodiscard]] int points() const { return steps + 1; }
  /// Frequencies ℓ = 0..points()/2; the rest are their conjugates.
  [[nodiscard]] int independent() const { return points() / 2 + 1; }
  [[nodiscard]] Complex zeta_power(long long k) const {
    const long long L = points();
    const long long r = ((k % L) + L) % L;
    return std::polar(1.0, 2.0 * kPi * static_cast<double>(r) / static_cast<double>(L));
  }
  [[nodiscard]] Complex frequency(int l) const {
    const Complex s = cq_delta(scheme, lambda * zeta_power(l)) / dt;
    if (!(s.real() > 0.0)) throw DomainError("CQ frequency " + std::to_string(l) + " has Re s <= 0");
    return s;
  }
  [[nodiscard]] std::vector<Complex> frequencies() const {
    std::vector<Complex> f(static_cast<std::size_t>(points()));
    for (int l = 0; l < points(); ++l) f[static_cast<std::size_t>(l)] = frequency(l);
    return f;
  }
  [[nodiscard]] double time(int n) const { return n * dt; }

  /// Columns 0..N of `samples` (one time step per column) to the L Laplace samples.
  [[nodiscard]] MatrixXc forward(const MatrixXc& samples) const {
    if (samples.cols() != points()) throw DomainError("CQ forward transform needs N + 1 time samples");
    const int L = points();
    MatrixXc F(L, L);
    for (int n = 0; n < L; ++n) {
      const double ln = std::pow(lambda, n);
      for (int l = 0; l < L; ++l) F(n, l) = ln * zeta_power(static_cast<long long>(n) * l);
    }
    return samples * F;
  }

  /// Inverse of forward(): L Laplace samples (columns) back to time steps 0..N.
  [[nodiscard]] MatrixXc inverse(const MatrixXc& laplace) const {
    if (laplace.cols() != points()) throw DomainError("CQ inverse transform needs N + 1 Laplace samples");
    const int L = points();
    MatrixXc B(L, L);
    for (int l = 0; l < L; ++l)
      for (int n = 0; n < L; ++n)
        B(l, n) = std::pow(lambda, -n) / static_cast<double>(L) * zeta_power(-static_cast<long long>(n) * l);
    return laplace * B;
  }

  /// Inverse transform of a real-data problem from its independent samples ℓ = 0..L/2;
  /// the result is real up to round-off and returned as its real part.
  [[nodiscard]] MatrixXr inverse_real(const MatrixXc& half) const {
    if (half.cols() != independent()) throw DomainError("CQ real inverse needs L/2 + 1 Laplace samples");
    const int L = points();
    MatrixXc full(half.rows(), L);
    for (int l = 0; l < L; ++l) full.col(l) = l < independent() ? half.col(l) : half.col(L - l).conjugate().eval();
    return inverse(full).real();
  }
};

/// CQ weights w_n = λ^{−n}/L Σ_ℓ F(s_ℓ) ζ^{−nℓ}, n = 0..N, for a scalar or matrix symbol F.
template <class Symbol>
auto cq_weights(const CqContour& c, Symbol&& F) {
  using T = std::decay_t<decltype(F(Complex{}))>;
  const int L = c.points();
  std::vector<T> values;
  values.reserve(static_cast<std::size_t>(L));
  for (int l = 0; l < L; ++l) values.push_back(F(c.frequency(l)));
  std::vector<T> w;
  w.reserve(static_cast<std::size_t>(L));
  for (int n = 0; n < L; ++n) {
    T sum = values[0] * Complex(0.0);
    for (int l = 0; l < L; ++l) sum = sum + values[static_cast<std::size_t>(l)] * c.zeta_power(-static_cast<long long>(n) * l);
    w.push_back(sum * (std::pow(c.lambda, -n) / static_cast<double>(L)));
  }
  return w;
}

template <class Symbol>
auto cq_weights(CqScheme scheme, Symbol&& F, double dt, int steps, double lambda = 0.0) {
  return cq_weights(CqContour(scheme, dt, steps, lambda), std::forward<Symbol>(F));
}

/// Discrete convolution y_n = Σ_{k ≤ n} w_{n−k} g_k with scalar weights.
inline std::vector<Complex> cq_apply(const std::vector<Complex>& w, const std::vector<Complex>& g) {
  std::vector<Complex> y(g.size(), 0.0);
  for (std::size_t n = 0; n < g.size(); ++n)
    for (std::size_t k = 0; k <= n && n - k < w.size(); ++k) y[n] += w[n - k] * g[k];
  return y;
}

}  // namespace tbem
