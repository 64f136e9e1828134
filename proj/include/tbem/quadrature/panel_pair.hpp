#pragma once

#include "tbem/mesh/surface_mesh.hpp"
#include "tbem/quadrature/kernels.hpp"
#include "tbem/quadrature/rules.hpp"

namespace tbem {

/// Quadrature orders for panel-pair integrals. Disjoint pairs are graded by the
/// centroid distance relative to the larger panel diameter.
struct QuadratureOrders {
  int singular = 4;        // Gauss points per dimension in the Sauter–Schwab rules
  int far_degree = 2;      // 3-point rule on each panel
  int mid_degree = 4;      // 6-point rule on each panel
  int near_gauss = 5;      // collapsed Gauss points per dimension
  double far_ratio = 4.0;
  double near_ratio = 2.0;
};

enum class KernelKind { V, K, Kp, W };

inline const char* to_string(KernelKind k) {
  switch (k) {
    case KernelKind::V: return "V";
    case KernelKind::K: return "K";
    case KernelKind::Kp: return "K'";
    case KernelKind::W: return "W";
  }
  return "?";
}

namespace detail {

// Orders the vertices of both panels so the shared ones come first in the same order.
inline void singular_permutation(const Panel& px, const Panel& py, PanelPairKind kind, std::array<int, 3>& ox,
                                 std::array<int, 3>& oy) {
  std::array<int, 3> sx{}, sy{};
  int n = 0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      if (px.local_vertex[i] == py.local_vertex[j]) {
        sx[n] = i;
        sy[n] = j;
        ++n;
      }
  const int expected = kind == PanelPairKind::Identical ? 3 : (kind == PanelPairKind::SharedEdge ? 2 : 1);
  if (n != expected) throw DomainError("panel pair does not match its classification");
  auto complete = [n](std::array<int, 3> head) {
    std::array<bool, 3> used{};
    for (int k = 0; k < n; ++k) used[head[k]] = true;
    int k = n;
    for (int i = 0; i < 3; ++i)
      if (!used[i]) head[k++] = i;
    return head;
  };
  ox = complete(sx);
  oy = complete(sy);
}

}  // namespace detail

inline PanelPairKind classify_pair(const Panel& a, const Panel& b) {
  return classify_pair(a.local_vertex, b.local_vertex);
}

/// Calls f(x, y, λ(x), λ(y), w) over a quadrature of τ_x × τ_y. The barycentric
/// weights follow each panel's own vertex order; Σ w f ≈ ∫∫ f.
template <class F>
void integrate_pair(const Panel& px, const Panel& py, PanelPairKind kind, const QuadratureOrders& q, F&& f) {
  const double area2 = px.area * py.area;
  if (kind == PanelPairKind::Disjoint) {
    const double ratio = (px.centroid - py.centroid).norm() / std::max(px.diameter, py.diameter);
    const TriangleRule& rule = ratio >= q.far_ratio    ? cached_triangle_rule(q.far_degree)
                               : ratio >= q.near_ratio ? cached_triangle_rule(q.mid_degree)
                                                       : cached_triangle_rule(2 * q.near_gauss - 2);
    const int n = rule.size();
    std::array<double, 3> lx{}, ly{};
    for (int i = 0; i < n; ++i) {
      lx = {1.0 - rule.uv[i][0] - rule.uv[i][1], rule.uv[i][0], rule.uv[i][1]};
      const Vec3 x = lx[0] * px.v[0] + lx[1] * px.v[1] + lx[2] * px.v[2];
      for (int j = 0; j < n; ++j) {
        ly = {1.0 - rule.uv[j][0] - rule.uv[j][1], rule.uv[j][0], rule.uv[j][1]};
        const Vec3 y = ly[0] * py.v[0] + ly[1] * py.v[1] + ly[2] * py.v[2];
        f(x, y, lx, ly, area2 * rule.w[i] * rule.w[j]);
      }
    }
    return;
  }
  std::array<int, 3> ox{}, oy{};
  detail::singular_permutation(px, py, kind, ox, oy);
  const SingularRule& rule = singular_rule(kind, q.singular);
  std::array<double, 3> lx{}, ly{};
  for (int i = 0; i < rule.size(); ++i) {
    for (int k = 0; k < 3; ++k) {
      lx[ox[k]] = rule.bx[i][k];
      ly[oy[k]] = rule.by[i][k];
    }
    const Vec3 x = lx[0] * px.v[0] + lx[1] * px.v[1] + lx[2] * px.v[2];
    const Vec3 y = ly[0] * py.v[0] + ly[1] * py.v[1] + ly[2] * py.v[2];
    f(x, y, lx, ly, area2 * rule.w[i]);
  }
}

/// All weakly singular integrals of one panel pair (x on τ_p, y on τ_q), with
/// G = e^{−κ|x−y|} / (4π|x−y|):
///   g        = ∫∫ G
///   dly[k]   = ∫∫ ∂_{n_y} G(x − y) λ_k^q(y)      (double layer, test on p)
///   dlx[k]   = ∫∫ ∂_{n_x} G(y − x) λ_k^p(x)      (double layer, test on q)
///   gll[k][l]= ∫∫ G λ_k^p(x) λ_l^q(y)
struct PairIntegrals {
  Complex g{0.0};
  std::array<Complex, 3> dly{};
  std::array<Complex, 3> dlx{};
  std::array<std::array<Complex, 3>, 3> gll{};
};

inline PairIntegrals compute_pair_integrals(Complex kappa, const Panel& pp, const Panel& pq, PanelPairKind kind,
                                            const QuadratureOrders& q) {
  PairIntegrals out;
  integrate_pair(pp, pq, kind, q, [&](const Vec3& x, const Vec3& y, const auto& lx, const auto& ly, double w) {
    const Vec3 d = x - y;
    const double r = d.norm();
    const Complex e = std::exp(-kappa * r) / (kFourPi * r);
    const Complex g = e * w;
    const Complex h = e * (1.0 + kappa * r) / (r * r) * w;
    out.g += g;
    const Complex hy = h * d.dot(pq.normal);
    const Complex hx = -h * d.dot(pp.normal);
    for (int k = 0; k < 3; ++k) {
      out.dly[k] += hy * ly[k];
      out.dlx[k] += hx * lx[k];
      const Complex gk = g * lx[k];
      for (int l = 0; l < 3; ++l) out.gll[k][l] += gk * ly[l];
    }
  });
  return out;
}

/// Local Galerkin matrix of one operator on a panel pair (test panel px, trial panel py):
/// V 1×1, K 1×3 (P1 trial), K′ 3×1 (P1 test), W 3×3; uses the real bilinear pairing.
inline MatrixXc panel_pair_integral(KernelKind kind, Complex s, const Panel& px, const Panel& py,
                                    PanelPairKind pair_kind, const Material& mat, const QuadratureOrders& q = {}) {
  if (!(px.area > 0.0 && py.area > 0.0)) throw DomainError("degenerate panel in pair integral");
  if (classify_pair(px, py) != pair_kind) throw DomainError("panel pair is not of the declared kind");
  const Complex kappa = decay_rate(s, mat);
  const PairIntegrals I = compute_pair_integrals(kappa, px, py, pair_kind, q);
  const double a2 = mat.a * mat.a;
  switch (kind) {
    case KernelKind::V: {
      MatrixXc m(1, 1);
      m(0, 0) = I.g / a2;
      return m;
    }
    case KernelKind::K: {
      MatrixXc m(1, 3);
      for (int k = 0; k < 3; ++k) m(0, k) = I.dly[k];
      return m;
    }
    case KernelKind::Kp: {
      // ∫∫ λ_k(x) ∂_{n_x} G(x − y) equals dlx, since G depends only on |x − y|
      MatrixXc m(3, 1);
      for (int k = 0; k < 3; ++k) m(k, 0) = I.dlx[k];
      return m;
    }
    case KernelKind::W: {
      MatrixXc m(3, 3);
      const double nn = px.normal.dot(py.normal);
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l)
          m(k, l) = a2 * (px.curl[k].dot(py.curl[l]) * I.g + kappa * kappa * nn * I.gll[k][l]);
      return m;
    }
  }
  throw DomainError("unknown kernel kind");
}

}  // namespace tbem
