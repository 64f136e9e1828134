#pragma once

#include "tbem/core.hpp"

#include <array>
#include <cmath>
#include <map>
#include <mutex>
#include <vector>

namespace tbem {

/// Gauss–Legendre nodes and weights on [0, 1].
struct GaussRule {
  std::vector<double> x;
  std::vector<double> w;
};

inline GaussRule gauss_legendre(int n) {
  if (n < 1) throw DomainError("Gauss rule needs at least one point");
  GaussRule r;
  r.x.resize(n);
  r.w.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    r.x[i] = 0.5 * (1.0 - z);
    r.x[n - 1 - i] = 0.5 * (1.0 + z);
    r.w[i] = r.w[n - 1 - i] = 0.5 * w;
  }
  return r;
}

/// Rule on the reference triangle {(u, v): u, v >= 0, u + v <= 1}.
/// A point maps to v0 + u (v1 - v0) + v (v2 - v0); weights sum to 1, so
/// ∫_T f ≈ |T| Σ w_k f(x_k).
struct TriangleRule {
  std::vector<std::array<double, 2>> uv;
  std::vector<double> w;
  int degree = 0;

  [[nodiscard]] int size() const { return static_cast<int>(w.size()); }
};

/// Collapsed (Duffy) tensor Gauss rule with n² points, exact to degree 2n − 2.
inline TriangleRule collapsed_gauss(int n) {
  const GaussRule g = gauss_legendre(n);
  TriangleRule r;
  r.degree = 2 * n - 2;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double u = g.x[i];
      r.uv.push_back({u, (1.0 - u) * g.x[j]});
      r.w.push_back(2.0 * g.w[i] * g.w[j] * (1.0 - u));
    }
  return r;
}

/// Symmetric rules: 1 point (degree 1), 3 points (degree 2), 6 points (degree 4);
/// other degrees fall back to collapsed Gauss.
inline TriangleRule triangle_rule(int degree) {
  TriangleRule r;
  auto orbit3 = [&](double a, double w) {
    const double b = 1.0 - 2.0 * a;
    r.uv.push_back({a, a});
    r.uv.push_back({b, a});
    r.uv.push_back({a, b});
    for (int k = 0; k < 3; ++k) r.w.push_back(w);
  };
  if (degree <= 1) {
    r.uv.push_back({1.0 / 3.0, 1.0 / 3.0});
    r.w.push_back(1.0);
    r.degree = 1;
  } else if (degree == 2) {
    orbit3(1.0 / 6.0, 1.0 / 3.0);
    r.degree = 2;
  } else if (degree <= 4) {
    orbit3(0.445948490915965, 0.223381589678011);
    orbit3(0.091576213509771, 0.109951743655322);
    r.degree = 4;
  } else {
    return collapsed_gauss((degree + 3) / 2);
  }
  return r;
}

/// Mean value of f over a flat triangle (6-point rule, degree 4).
template <class F>
auto triangle_average(const std::array<Vec3, 3>& v, F&& f) {
  const TriangleRule r = triangle_rule(4);
  decltype(f(v[0])) acc{};
  for (int k = 0; k < r.size(); ++k) {
    const double u = r.uv[k][0], w = r.uv[k][1];
    acc += r.w[k] * f(Vec3((1.0 - u - w) * v[0] + u * v[1] + w * v[2]));
  }
  return acc;
}

enum class PanelPairKind { Identical, SharedEdge, SharedVertex, Disjoint };

inline const char* to_string(PanelPairKind k) {
  switch (k) {
    case PanelPairKind::Identical: return "identical";
    case PanelPairKind::SharedEdge: return "shared_edge";
    case PanelPairKind::SharedVertex: return "shared_vertex";
    case PanelPairKind::Disjoint: return "disjoint";
  }
  return "?";
}

/// Classifies a pair from vertex ids; symmetric in the argument order.
inline PanelPairKind classify_pair(const std::array<int, 3>& a, const std::array<int, 3>& b) {
  int shared = 0;
  for (int i : a)
    for (int j : b) shared += i == j;
  switch (shared) {
    case 0: return PanelPairKind::Disjoint;
    case 1: return PanelPairKind::SharedVertex;
    case 2: return PanelPairKind::SharedEdge;
    case 3: return PanelPairKind::Identical;
    default: throw DomainError("panels share more than three vertices (repeated vertex ids)");
  }
}

/// Point pairs of a Sauter–Schwab rule on T̂ × T̂ with T̂ = {0 <= x2 <= x1 <= 1}.
/// Reference points are mapped by χ(x) = A + x1 (B − A) + x2 (C − B), i.e. barycentric
/// coordinates (1 − x1, x1 − x2, x2). Weights are scaled by 4 so that they sum to 1,
/// matching TriangleRule: ∫∫ f ≈ |τ_x| |τ_y| Σ w f.
/// Conventions: identical panels share (A, B, C); an edge pair shares A → B;
/// a vertex pair shares A.
struct SingularRule {
  std::vector<std::array<double, 3>> bx, by;
  std::vector<double> w;

  [[nodiscard]] int size() const { return static_cast<int>(w.size()); }
};

namespace detail {

inline std::array<double, 3> ref_bary(double x1, double x2) { return {1.0 - x1, x1 - x2, x2}; }

inline SingularRule build_singular_rule(PanelPairKind kind, int n) {
  const GaussRule g = gauss_legendre(n);
  SingularRule r;
  auto add = [&](double x1, double x2, double y1, double y2, double w) {
    r.bx.push_back(ref_bary(x1, x2));
    r.by.push_back(ref_bary(y1, y2));
    r.w.push_back(4.0 * w);
  };
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) {
          const double xi = g.x[a], e1 = g.x[b], e2 = g.x[c], e3 = g.x[d];
          const double w = g.w[a] * g.w[b] * g.w[c] * g.w[d];
          switch (kind) {
            case PanelPairKind::Identical: {
              const double j = w * xi * xi * xi * e1 * e1 * e2;
              add(xi, xi * (1 - e1 + e1 * e2), xi * (1 - e1 * e2 * e3), xi * (1 - e1), j);
              add(xi * (1 - e1 * e2 * e3), xi * (1 - e1), xi, xi * (1 - e1 + e1 * e2), j);
              add(xi, xi * e1 * (1 - e2 + e2 * e3), xi * (1 - e1 * e2), xi * e1 * (1 - e2), j);
              add(xi * (1 - e1 * e2), xi * e1 * (1 - e2), xi, xi * e1 * (1 - e2 + e2 * e3), j);
              add(xi * (1 - e1 * e2 * e3), xi * e1 * (1 - e2 * e3), xi, xi * e1 * (1 - e2), j);
              add(xi, xi * e1 * (1 - e2), xi * (1 - e1 * e2 * e3), xi * e1 * (1 - e2 * e3), j);
              break;
            }
            case PanelPairKind::SharedEdge: {
              const double j1 = w * xi * xi * xi * e1 * e1;
              const double j2 = j1 * e2;
              add(xi, xi * e1 * e3, xi * (1 - e1 * e2), xi * e1 * (1 - e2), j1);
              add(xi, xi * e1, xi * (1 - e1 * e2 * e3), xi * e1 * e2 * (1 - e3), j2);
              add(xi * (1 - e1 * e2), xi * e1 * (1 - e2), xi, xi * e1 * e2 * e3, j2);
              add(xi * (1 - e1 * e2 * e3), xi * e1 * e2 * (1 - e3), xi, xi * e1, j2);
              add(xi * (1 - e1 * e2 * e3), xi * e1 * (1 - e2 * e3), xi, xi * e1 * e2, j2);
              break;
            }
            case PanelPairKind::SharedVertex: {
              const double j = w * xi * xi * xi * e2;
              add(xi, xi * e1, xi * e2, xi * e2 * e3, j);
              add(xi * e2, xi * e2 * e3, xi, xi * e1, j);
              break;
            }
            case PanelPairKind::Disjoint:
              throw DomainError("no singular rule for disjoint panels");
          }
        }
  return r;
}

}  // namespace detail

/// Cached singular rule for the given pair kind and Gauss order.
inline const SingularRule& singular_rule(PanelPairKind kind, int order) {
  static std::mutex mutex;
  static std::map<std::pair<int, int>, SingularRule> cache;
  std::lock_guard lock(mutex);
  const auto key = std::make_pair(static_cast<int>(kind), order);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, detail::build_singular_rule(kind, order)).first;
  return it->second;
}

/// Cached tensor rule for disjoint panel pairs.
inline const TriangleRule& cached_triangle_rule(int degree) {
  static std::mutex mutex;
  static std::map<int, TriangleRule> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(degree);
  if (it == cache.end()) it = cache.emplace(degree, triangle_rule(degree)).first;
  return it->second;
}

}  // namespace tbem
