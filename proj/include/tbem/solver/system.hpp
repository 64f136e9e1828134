#pragma once

#include "tbem/solver/impedance.hpp"
#include "tbem/traces/single_trace.hpp"

namespace tbem {

/// Everything that does not depend on s: mesh, materials, constraints, transfer operator.
struct TransmissionSetup {
  Skeleton skeleton;
  MaterialParams mat;
  DofClassification classification;
  SingleTraceMap map;
  ImpedanceOperator impedance;
  QuadratureOrders quadrature;
  double sigma0 = 1.0;
};

inline TransmissionSetup make_setup(SurfaceMesh mesh, const MaterialParams& mat,
                                    std::optional<ImpedanceOperator> impedance = std::nullopt,
                                    const QuadratureOrders& q = {}, double sigma0 = 1.0) {
  mat.validate();
  TransmissionSetup st;
  st.skeleton = make_skeleton(std::move(mesh));
  st.mat = mat;
  st.classification = classify_dofs(st.skeleton.mesh);
  st.map = build_single_trace_map(st.skeleton, st.classification);
  st.impedance = impedance ? *impedance : impedance_default(st.skeleton, mat);
  st.quadrature = q;
  st.sigma0 = sigma0;
  return st;
}

/// Assembled and factorized single-trace system at one frequency.
struct TransmissionSystem {
  Complex s{1.0};
  BlockCalderon calderon;
  MatrixXc multi;     // Galerkin matrix of a⁰ on the multi-trace space (A − I/2)
  MatrixXc imp;       // Galerkin matrix of a^imp on the multi-trace space
  std::vector<MatrixXc> transfer;  // T̂(s) per Γ_j
  std::vector<MatrixXr> mass_i;    // Γ_I-restricted mixed mass per Γ_j
  MatrixXc matrix;    // Eᵀ (multi + imp) E
  Eigen::PartialPivLU<MatrixXc> lu;
  double rcond = 0.0;
};

inline void check_frequency(Complex s, double sigma0) {
  if (!std::isfinite(s.real()) || !std::isfinite(s.imag())) throw DomainError("frequency is not finite");
  if (s.real() < sigma0 / 10.0)
    throw DomainError("frequency s = " + std::to_string(s.real()) + (s.imag() < 0 ? "" : "+") +
                      std::to_string(s.imag()) + "i has Re s below sigma0/10 = " + std::to_string(sigma0 / 10.0));
}

inline TransmissionSystem assemble_system(Complex s, const TransmissionSetup& st, bool factorize = true) {
  check_frequency(s, st.sigma0);
  const Skeleton& sk = st.skeleton;
  const TraceLayout& L = sk.layout;
  TransmissionSystem sys;
  sys.s = s;
  sys.calderon = build_block_calderon(s, sk, st.mat, st.quadrature);
  sys.multi = sys.calderon.galerkin(-0.5);
  sys.transfer = st.impedance.at(s);
  sys.mass_i = skeleton_masses(sk, Part::I);
  sys.imp = MatrixXc::Zero(L.size(), L.size());
  for (int j = 1; j <= sk.num_subdomains(); ++j) {
    const int rd = L.dirichlet_offset(j), rn = L.neumann_offset(j);
    const int nd = L.nd[j - 1], nn = L.nn[j - 1];
    const MatrixXc& T = sys.transfer.at(j - 1);
    if (T.rows() != nd || T.cols() != nd) throw DomainError("transfer operator size does not match Γ_" + std::to_string(j));
    sys.imp.block(rd, rn, nd, nn) += sys.mass_i[j - 1].transpose().cast<Complex>();
    sys.imp.block(rd, rd, nd, nd) -= T;
  }
  const Eigen::SparseMatrix<Complex> E = st.map.E.cast<Complex>();
  sys.matrix = E.transpose() * ((sys.multi + sys.imp) * E);
  if (!sys.matrix.allFinite()) throw NumericalError("system matrix has non-finite entries");
  if (factorize) {
    sys.lu.compute(sys.matrix);
    sys.rcond = sys.lu.rcond();
    if (!(sys.rcond > 1e-14))
      throw NumericalError("singular system matrix at s = " + std::to_string(s.real()) + "+" +
                           std::to_string(s.imag()) + "i (rcond estimate " + std::to_string(sys.rcond) + ")");
  }
  return sys;
}

/// Right-hand side −Eᵀ (A − I/2) D(s) b̂ plus the impedance load
/// ⟨s^{−1/2} d̂_I − s^{−1/2} γ_N b̂ + s^{1/2} T̂ γ_D b̂, ψ̄_D⟩_{Γ_I}.
/// `offset` holds unscaled traces of b̂; `d_impedance` holds P0 values per global triangle.
inline VectorXc assemble_rhs(const TransmissionSystem& sys, const TransmissionSetup& st,
                             const MultiTraceVector& offset, const VectorXc& d_impedance) {
  const Skeleton& sk = st.skeleton;
  const TraceLayout& L = sk.layout;
  if (!(offset.layout == L)) throw DomainError("offset traces do not match the mesh");
  if (d_impedance.size() != sk.mesh.num_triangles()) throw DomainError("impedance data must be indexed by triangle");
  for (int t = 0; t < sk.mesh.num_triangles(); ++t)
    if (d_impedance(t) != Complex(0.0) && sk.mesh.parts[t] != Part::I)
      throw DomainError("impedance data supplied on triangle " + std::to_string(t) + " which is not on Γ_I");
  const ScalingPair sc(sys.s);
  const MultiTraceVector scaled = scale_traces(sys.s, offset, ScaleDirection::Forward);
  VectorXc load = -(sys.multi * scaled.data);
  for (int j = 1; j <= sk.num_subdomains(); ++j) {
    const SubdomainSurface& surf = sk.surface(j);
    VectorXc dI(surf.num_panels());
    for (int l = 0; l < surf.num_panels(); ++l) dI(l) = d_impedance(surf.triangles[l]);
    const VectorXc neumann = sc.inv_sqrt_s * (dI - offset.neumann(j));
    load.segment(L.dirichlet_offset(j), L.nd[j - 1]) +=
        sys.mass_i[j - 1].transpose().cast<Complex>() * neumann + sc.sqrt_s * (sys.transfer[j - 1] * offset.dirichlet(j));
  }
  return st.map.E.transpose().cast<Complex>() * load;
}

struct LaplaceSolveResult {
  Complex s{1.0};
  VectorXc xi;                    // single-trace coefficients of the scaled traces of û₀
  MultiTraceVector scaled;        // E ξ
  MultiTraceVector traces;        // unscaled traces of û = û₀ + b̂
  double residual = 0.0;          // ‖S ξ − f‖ / ‖f‖
  double rcond = 0.0;
};

inline LaplaceSolveResult solve_frequency(const TransmissionSystem& sys, const TransmissionSetup& st,
                                          const VectorXc& rhs, const MultiTraceVector& offset) {
  if (rhs.size() != sys.matrix.rows()) throw DomainError("right-hand side size does not match the system");
  LaplaceSolveResult r;
  r.s = sys.s;
  r.rcond = sys.rcond;
  r.xi = sys.lu.solve(rhs);
  if (!r.xi.allFinite()) throw NumericalError("frequency solve produced non-finite values");
  const double fn = rhs.norm();
  r.residual = fn > 0.0 ? (sys.matrix * r.xi - rhs).norm() / fn : (sys.matrix * r.xi).norm();
  if (r.residual > 1e-10) warn("relative residual " + std::to_string(r.residual) + " of the direct solve exceeds 1e-10");
  r.scaled = MultiTraceVector(st.skeleton.layout, st.map.E.cast<Complex>() * r.xi);
  r.traces = scale_traces(sys.s, r.scaled, ScaleDirection::Inverse);
  r.traces.data += offset.data;
  return r;
}

/// Boundary data of one frequency-domain solve, all in Laplace domain.
struct FrequencyData {
  VectorXc g_dirichlet;  // per global vertex, on vertices touching Γ_D
  VectorXc d_neumann;    // per global triangle, on Γ_N
  VectorXc d_impedance;  // per global triangle, on Γ_I
};

inline FrequencyData zero_data(const SurfaceMesh& mesh) {
  return {VectorXc::Zero(mesh.num_vertices()), VectorXc::Zero(mesh.num_triangles()),
          VectorXc::Zero(mesh.num_triangles())};
}

/// Assemble, build offsets and solve in one call.
inline LaplaceSolveResult solve_frequency(Complex s, const TransmissionSetup& st, const FrequencyData& data,
                                          const OffsetOptions& opt = {}) {
  const TransmissionSystem sys = assemble_system(s, st);
  const MultiTraceVector b = offset_traces(st.skeleton, st.classification, data.g_dirichlet, data.d_neumann, opt);
  const VectorXc rhs = assemble_rhs(sys, st, b, data.d_impedance);
  return solve_frequency(sys, st, rhs, b);
}

}  // namespace tbem
