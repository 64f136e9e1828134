#pragma once

#include "tbem/cq/cq.hpp"
#include "tbem/solver/reconstruct.hpp"
#include "tbem/solver/system.hpp"

namespace tbem {

/// Real time-domain boundary data. Any member may be empty.
struct TimeData {
  std::function<double(const Vec3&, double)> g_dirichlet;                    // on Γ_D
  // on Γ_N and Γ_I: point, outward normal of the owning Γ_j, time, material of that subdomain
  std::function<double(const Vec3&, const Vec3&, double, const Material&)> d_neumann;
  std::function<double(const Vec3&, const Vec3&, double, const Material&)> d_impedance;
};

/// Data arrays (same layout as FrequencyData) at every time step t_n = nΔt, n = 0..N.
struct TimeSamples {
  MatrixXc g_dirichlet;  // vertices × steps
  MatrixXc d_neumann;    // triangles × steps
  MatrixXc d_impedance;  // triangles × steps
};

inline TimeSamples sample_time_data(const TransmissionSetup& st, const TimeData& data, const CqContour& c) {
  const SurfaceMesh& mesh = st.skeleton.mesh;
  const int L = c.points();
  TimeSamples out{MatrixXc::Zero(mesh.num_vertices(), L), MatrixXc::Zero(mesh.num_triangles(), L),
                  MatrixXc::Zero(mesh.num_triangles(), L)};
  for (int n = 0; n < L; ++n) {
    const double t = c.time(n);
    if (data.g_dirichlet)
      for (int v = 0; v < mesh.num_vertices(); ++v)
        if (st.classification.touches(v, Part::D)) out.g_dirichlet(v, n) = data.g_dirichlet(mesh.vertices[v], t);
    for (int tr = 0; tr < mesh.num_triangles(); ++tr) {
      const Part part = mesh.parts[tr];
      const auto& fn = part == Part::N ? data.d_neumann : data.d_impedance;
      if ((part != Part::N && part != Part::I) || !fn) continue;
      const auto& tri = mesh.triangles[tr];
      const Vec3 nrm = mesh.area_normal(tr).normalized();
      const Material m = st.mat.of(mesh.membership[tr] == Membership::Two ? 2 : 1);
      const Complex avg = triangle_average({mesh.vertices[tri[0]], mesh.vertices[tri[1]], mesh.vertices[tri[2]]},
                                           [&](const Vec3& x) { return Complex(fn(x, nrm, t, m)); });
      (part == Part::N ? out.d_neumann : out.d_impedance)(tr, n) = avg;
    }
  }
  return out;
}

struct TimeMarchResult {
  CqContour contour;
  std::vector<Complex> frequencies;       // independent s_ℓ, ℓ = 0..L/2
  std::vector<MultiTraceVector> laplace;  // unscaled traces at each independent s_ℓ
  MatrixXc xi;                            // scaled single-trace unknowns, one column per s_ℓ
  MatrixXc load;                          // S(s_ℓ) ξ_ℓ, one column per s_ℓ
  MatrixXr traces;                        // unscaled multi-trace vectors, one column per time step
  MatrixXr xi_time;                       // ξ_n, one column per time step
  MatrixXr load_time;                     // (S ∗ ξ)_n, one column per time step
  double max_residual = 0.0;
  TraceLayout layout;

  [[nodiscard]] MultiTraceVector at_step(int n) const {
    return MultiTraceVector(layout, traces.col(n).cast<Complex>());
  }
};

/// All-steps-at-once CQ: forward-transform the data samples, solve the frequency problem
/// at every independent s_ℓ, transform back. Data are real, so only ℓ ≤ L/2 are solved.
inline TimeMarchResult cq_march(const TransmissionSetup& st, const TimeSamples& samples, const CqContour& c,
                                const OffsetOptions& opt = {},
                                const std::function<void(int, int)>& progress = {}) {
  const int H = c.independent();
  const MatrixXc G = c.forward(samples.g_dirichlet);
  const MatrixXc DN = c.forward(samples.d_neumann);
  const MatrixXc DI = c.forward(samples.d_impedance);
  TimeMarchResult r;
  r.contour = c;
  r.layout = st.skeleton.layout;
  const int ns = st.map.num_single();
  r.xi = MatrixXc::Zero(ns, H);
  r.load = MatrixXc::Zero(ns, H);
  MatrixXc traces(r.layout.size(), H);
  for (int l = 0; l < H; ++l) {
    const Complex s = c.frequency(l);
    r.frequencies.push_back(s);
    try {
      const TransmissionSystem sys = assemble_system(s, st);
      const MultiTraceVector b = offset_traces(st.skeleton, st.classification, G.col(l), DN.col(l), opt);
      const VectorXc rhs = assemble_rhs(sys, st, b, DI.col(l));
      const LaplaceSolveResult sol = solve_frequency(sys, st, rhs, b);
      r.max_residual = std::max(r.max_residual, sol.residual);
      r.xi.col(l) = sol.xi;
      r.load.col(l) = sys.matrix * sol.xi;
      traces.col(l) = sol.traces.data;
      r.laplace.push_back(sol.traces);
    } catch (const Error& e) {
      throw Error("CQ frequency solve " + std::to_string(l) + " at s = " + std::to_string(s.real()) + "+" +
                      std::to_string(s.imag()) + "i failed: " + e.what(),
                  e.code());
    }
    if (progress) progress(l + 1, H);
  }
  r.traces = c.inverse_real(traces);
  r.xi_time = c.inverse_real(r.xi);
  r.load_time = c.inverse_real(r.load);
  return r;
}

/// Σ_n Δt e^{−2σ₀ t_n} Re⟨(a^mix ∗ ξ)_n, ξ̄_n⟩: the discrete time-domain coercivity sum.
inline double time_coercivity_sum(const TimeMarchResult& r, double sigma0) {
  double sum = 0.0;
  for (int n = 0; n < r.xi_time.cols(); ++n)
    sum += r.contour.dt * std::exp(-2.0 * sigma0 * r.contour.time(n)) * r.xi_time.col(n).dot(r.load_time.col(n));
  return sum;
}

/// Field values u(x, t_n) at points in Ω₁ ∪ Ω₂ for all steps (points × steps), through
/// the Laplace-domain representation at every s_ℓ.
inline MatrixXr reconstruct_time(const TimeMarchResult& r, const Skeleton& sk, const MaterialParams& mat,
                                 const std::vector<Vec3>& points) {
  MatrixXc half(static_cast<Eigen::Index>(points.size()), r.contour.independent());
  for (int l = 0; l < r.contour.independent(); ++l)
    half.col(l) = reconstruct_field(r.frequencies[l], sk, mat, r.laplace[l], points).values;
  return r.contour.inverse_real(half);
}

}  // namespace tbem
