#pragma once

#include "tbem/solver/system.hpp"

namespace tbem {

/// Field u(x) = A k̂_j(s, x − y₀) of a point source at y₀ outside Ω̄. With equal
/// materials it solves the transmission problem in both subdomains.
struct PointSource {
  Vec3 y0{0.0, 0.0, 2.0};
  Complex amplitude{1.0};

  [[nodiscard]] Complex value(Complex s, const Vec3& x, const Material& m) const {
    return amplitude * kernel_eval(s, x - y0, m);
  }
  /// a² ∂_n u at x for the unit normal n.
  [[nodiscard]] Complex conormal(Complex s, const Vec3& x, const Vec3& n, const Material& m) const {
    return amplitude * kernel_conormal(s, y0, x, n, m);
  }
};

/// Consistent Laplace-domain data of a point-source field for the default impedance
/// T̂ = −a p: g_D at Γ_D vertices, d_N = γ_N u on Γ_N, d_I = γ_N u + s a p γ_D u on Γ_I.
inline FrequencyData point_source_data(Complex s, const TransmissionSetup& st, const PointSource& src) {
  const SurfaceMesh& mesh = st.skeleton.mesh;
  FrequencyData d = zero_data(mesh);
  for (int v = 0; v < mesh.num_vertices(); ++v)
    if (st.classification.touches(v, Part::D)) d.g_dirichlet(v) = src.value(s, mesh.vertices[v], st.mat.of(1));
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const Part part = mesh.parts[t];
    if (part != Part::N && part != Part::I) continue;
    const Material m = st.mat.of(mesh.membership[t] == Membership::Two ? 2 : 1);
    const auto& tri = mesh.triangles[t];
    const Vec3 n = mesh.area_normal(t).normalized();
    d.d_neumann(t) = 0.0;
    const Complex avg = triangle_average({mesh.vertices[tri[0]], mesh.vertices[tri[1]], mesh.vertices[tri[2]]},
                                         [&](const Vec3& x) {
                                           Complex g = src.conormal(s, x, n, m);
                                           if (part == Part::I) g += s * m.a * m.p * src.value(s, x, m);
                                           return g;
                                         });
    (part == Part::N ? d.d_neumann : d.d_impedance)(t) = avg;
  }
  return d;
}

/// Exact traces of the point-source field projected onto P1 / P0 on every Γ_j.
inline MultiTraceVector point_source_traces(Complex s, const Skeleton& sk, const MaterialParams& mat,
                                            const PointSource& src) {
  return project_traces(
      sk, [&](int j, const Vec3& x) { return src.value(s, x, mat.of(j)); },
      [&](int j, const Vec3& x, const Vec3& n) { return src.conormal(s, x, n, mat.of(j)); });
}

struct TraceErrors {
  double dirichlet = 0.0;  // relative L² error of the Dirichlet traces over all Γ_j
  double neumann = 0.0;    // relative L² error of the Neumann traces over all Γ_j
  double combined = 0.0;
};

/// Relative L²(Γ_j) errors of discrete traces (P1 Dirichlet, P0 Neumann) against
/// pointwise exact traces, by a 6-point rule on every panel.
inline TraceErrors trace_l2_errors(const Skeleton& sk, const MultiTraceVector& traces,
                                   const std::function<Complex(int, const Vec3&)>& value,
                                   const std::function<Complex(int, const Vec3&, const Vec3&)>& conormal) {
  const TriangleRule rule = triangle_rule(4);
  double ed = 0, nd = 0, en = 0, nn = 0;
  for (int j = 1; j <= sk.num_subdomains(); ++j) {
    const SubdomainSurface& s = sk.surface(j);
    for (int t = 0; t < s.num_panels(); ++t) {
      const Panel& p = s.panels[t];
      for (int k = 0; k < rule.size(); ++k) {
        const double u = rule.uv[k][0], w = rule.uv[k][1];
        const std::array<double, 3> l{1.0 - u - w, u, w};
        const Vec3 x = l[0] * p.v[0] + l[1] * p.v[1] + l[2] * p.v[2];
        const double wt = rule.w[k] * p.area;
        Complex uh = 0.0;
        for (int i = 0; i < 3; ++i) uh += l[i] * traces.dirichlet(j)(p.local_vertex[i]);
        const Complex ue = value(j, x);
        const Complex ne = conormal(j, x, p.normal);
        ed += wt * std::norm(uh - ue);
        nd += wt * std::norm(ue);
        en += wt * std::norm(traces.neumann(j)(t) - ne);
        nn += wt * std::norm(ne);
      }
    }
  }
  TraceErrors e;
  e.dirichlet = nd > 0 ? std::sqrt(ed / nd) : std::sqrt(ed);
  e.neumann = nn > 0 ? std::sqrt(en / nn) : std::sqrt(en);
  e.combined = (nd + nn) > 0 ? std::sqrt((ed + en) / (nd + nn)) : std::sqrt(ed + en);
  return e;
}

inline TraceErrors point_source_errors(Complex s, const Skeleton& sk, const MaterialParams& mat,
                                       const PointSource& src, const MultiTraceVector& traces) {
  return trace_l2_errors(
      sk, traces, [&](int j, const Vec3& x) { return src.value(s, x, mat.of(j)); },
      [&](int j, const Vec3& x, const Vec3& n) { return src.conormal(s, x, n, mat.of(j)); });
}

/// Relative L²(Σ) distance ‖a − b‖/‖b‖ of two discrete multi-trace vectors, using the
/// P1 mass for Dirichlet blocks and panel areas for Neumann blocks.
inline double trace_l2_difference(const Skeleton& sk, const MultiTraceVector& a, const MultiTraceVector& b) {
  if (!(a.layout == b.layout) || !(a.layout == sk.layout)) throw DomainError("trace vectors do not match the mesh");
  double num = 0.0, den = 0.0;
  for (int j = 1; j <= sk.num_subdomains(); ++j) {
    const MatrixXc M = p1_mass(sk.surface(j)).cast<Complex>();
    const VectorXr area = p0_mass(sk.surface(j));
    const VectorXc dd = a.dirichlet(j) - b.dirichlet(j);
    const VectorXc dn = a.neumann(j) - b.neumann(j);
    num += dd.dot(M * dd).real() + (area.array() * dn.array().abs2()).sum();
    den += b.dirichlet(j).dot(M * b.dirichlet(j)).real() + (area.array() * b.neumann(j).array().abs2()).sum();
  }
  return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

}  // namespace tbem
