#pragma once

#include "tbem/operators/assembly.hpp"

#include <vector>

namespace tbem {

enum class PotentialKind { Single, Double };

/// Value and gradient of a layer potential at one point.
struct PotentialSample {
  Complex value{0.0};
  Eigen::Vector3cd gradient = Eigen::Vector3cd::Zero();
};

namespace detail {

// Integrates a density over one panel seen from x, recursively splitting the panel
// while x is close compared to its size. Accumulates value and gradient w.r.t. x.
//   single: ∫ G(x − y) φ(y) / a²              φ constant on the panel
//   double: ∫ ∂_{n_y} G(x − y) ψ(y)           ψ linear with vertex values c
inline void panel_potential(PotentialKind kind, Complex kappa, const Vec3& x, const std::array<Vec3, 3>& v,
                            const std::array<Complex, 3>& c, const Vec3& normal, double area, int depth,
                            PotentialSample& out) {
  const Vec3 centroid = (v[0] + v[1] + v[2]) / 3.0;
  const double diam = std::max({(v[0] - v[1]).norm(), (v[1] - v[2]).norm(), (v[2] - v[0]).norm()});
  const double dist = (x - centroid).norm();
  if (dist < 3.0 * diam && depth < 12) {
    const std::array<Vec3, 3> m{0.5 * (v[0] + v[1]), 0.5 * (v[1] + v[2]), 0.5 * (v[2] + v[0])};
    const std::array<Complex, 3> cm{0.5 * (c[0] + c[1]), 0.5 * (c[1] + c[2]), 0.5 * (c[2] + c[0])};
    const double a4 = 0.25 * area;
    panel_potential(kind, kappa, x, {v[0], m[0], m[2]}, {c[0], cm[0], cm[2]}, normal, a4, depth + 1, out);
    panel_potential(kind, kappa, x, {m[0], v[1], m[1]}, {cm[0], c[1], cm[1]}, normal, a4, depth + 1, out);
    panel_potential(kind, kappa, x, {m[2], m[1], v[2]}, {cm[2], cm[1], c[2]}, normal, a4, depth + 1, out);
    panel_potential(kind, kappa, x, {m[0], m[1], m[2]}, {cm[0], cm[1], cm[2]}, normal, a4, depth + 1, out);
    return;
  }
  const TriangleRule& rule = cached_triangle_rule(dist < 6.0 * diam ? 8 : 4);
  for (int i = 0; i < rule.size(); ++i) {
    const double u = rule.uv[i][0], w = rule.uv[i][1];
    const double l0 = 1.0 - u - w;
    const Vec3 y = l0 * v[0] + u * v[1] + w * v[2];
    const Complex dens = l0 * c[0] + u * c[1] + w * c[2];
    const Vec3 d = x - y;
    const double r = d.norm();
    if (!(r > 0.0)) throw DomainError("potential evaluated on the surface");
    const Complex e = std::exp(-kappa * r) / (kFourPi * r);
    const Complex kr = kappa * r;
    const double wt = area * rule.w[i];
    if (kind == PotentialKind::Single) {
      // ∇_x G = −G (1 + κr) d / r²
      out.value += wt * dens * e;
      const Complex g = -wt * dens * e * (1.0 + kr) / (r * r);
      out.gradient += g * d.cast<Complex>();
    } else {
      // ∂_{n_y} G = h <d, n>,  h = G (1 + κr) / r²
      const Complex h = e * (1.0 + kr) / (r * r);
      const double dn = d.dot(normal);
      out.value += wt * dens * h * dn;
      // ∇_x (h <d,n>) = h n + <d,n> h'(r) d / r,  h'(r) = −G (3 + 3κr + κ²r²) / r³
      const Complex hp = -e * (3.0 + 3.0 * kr + kr * kr) / (r * r * r);
      out.gradient += (wt * dens) * (h * normal.cast<Complex>() + (dn * hp / r) * d.cast<Complex>());
    }
  }
}

}  // namespace detail

/// Distance from x to the closest point of a triangle.
inline double point_triangle_distance(const Vec3& x, const std::array<Vec3, 3>& v) {
  const Vec3 ab = v[1] - v[0], ac = v[2] - v[0], ap = x - v[0];
  const double d1 = ab.dot(ap), d2 = ac.dot(ap);
  if (d1 <= 0 && d2 <= 0) return ap.norm();
  const Vec3 bp = x - v[1];
  const double d3 = ab.dot(bp), d4 = ac.dot(bp);
  if (d3 >= 0 && d4 <= d3) return bp.norm();
  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0 && d1 >= 0 && d3 <= 0) return (x - (v[0] + d1 / (d1 - d3) * ab)).norm();
  const Vec3 cp = x - v[2];
  const double d5 = ab.dot(cp), d6 = ac.dot(cp);
  if (d6 >= 0 && d5 <= d6) return cp.norm();
  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0 && d2 >= 0 && d6 <= 0) return (x - (v[0] + d2 / (d2 - d6) * ac)).norm();
  const double va = d3 * d6 - d5 * d4;
  if (va <= 0 && (d4 - d3) >= 0 && (d5 - d6) >= 0)
    return (x - (v[1] + (d4 - d3) / ((d4 - d3) + (d5 - d6)) * (v[2] - v[1]))).norm();
  const double denom = 1.0 / (va + vb + vc);
  return (x - (v[0] + ab * (vb * denom) + ac * (vc * denom))).norm();
}

/// Ŝ(s)φ (P0 density) or D̂(s)ψ (P1 density) with gradients at the given points.
/// Points closer than 0.05 panel diameters trigger a warning; points on Γ are rejected.
inline std::vector<PotentialSample> eval_potential_samples(PotentialKind kind, Complex s,
                                                           const SubdomainSurface& surf, const VectorXc& density,
                                                           const std::vector<Vec3>& points, const Material& mat) {
  const int expected = kind == PotentialKind::Single ? surf.num_panels() : surf.num_vertices();
  if (density.size() != expected)
    throw DomainError("density has " + std::to_string(density.size()) + " entries, expected " +
                      std::to_string(expected));
  const Complex kappa = decay_rate(s, mat);
  std::vector<PotentialSample> out(points.size());
  bool warned = false;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const Vec3& x = points[i];
    for (int t = 0; t < surf.num_panels(); ++t) {
      const Panel& p = surf.panels[t];
      if ((x - p.centroid).norm() < 2.0 * p.diameter) {
        const double d = point_triangle_distance(x, p.v);
        if (d <= 1e-12 * p.diameter) throw DomainError("potential evaluated on the surface; use traces instead");
        if (d < 0.05 * p.diameter && !warned) {
          warn("evaluation point closer than 0.05 panel diameters to the surface; accuracy degrades");
          warned = true;
        }
      }
      std::array<Complex, 3> c;
      if (kind == PotentialKind::Single) c.fill(density(t));
      else
        for (int k = 0; k < 3; ++k) c[k] = density(p.local_vertex[k]);
      detail::panel_potential(kind, kappa, x, p.v, c, p.normal, p.area, 0, out[i]);
    }
    if (kind == PotentialKind::Single) {
      out[i].value /= mat.a * mat.a;
      out[i].gradient /= mat.a * mat.a;
    }
  }
  return out;
}

inline VectorXc eval_potential(PotentialKind kind, Complex s, const SubdomainSurface& surf, const VectorXc& density,
                               const std::vector<Vec3>& points, const Material& mat) {
  const auto samples = eval_potential_samples(kind, s, surf, density, points, mat);
  VectorXc v(static_cast<Eigen::Index>(samples.size()));
  for (std::size_t i = 0; i < samples.size(); ++i) v(static_cast<Eigen::Index>(i)) = samples[i].value;
  return v;
}

/// Solid-angle winding number of a closed surface around x (1 inside, 0 outside).
inline double winding_number(const SubdomainSurface& surf, const Vec3& x) {
  double omega = 0.0;
  for (const auto& p : surf.panels) {
    const Vec3 a = p.v[0] - x, b = p.v[1] - x, c = p.v[2] - x;
    const double la = a.norm(), lb = b.norm(), lc = c.norm();
    const double num = a.dot(b.cross(c));
    const double den = la * lb * lc + a.dot(b) * lc + b.dot(c) * la + c.dot(a) * lb;
    omega += 2.0 * std::atan2(num, den);
  }
  return omega / kFourPi;
}

}  // namespace tbem
