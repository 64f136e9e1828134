#include "tbem/mesh/generate.hpp"
#include "tbem/solver/manufactured.hpp"
#include "tbem/solver/reconstruct.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace tbem;

namespace {

// point-source Dirichlet data does not vanish where Γ_D meets Γ_I
const OffsetOptions kLoose{false};

SurfaceMesh ball(int level) { return make_split_ball(level, kPi / 3, 2 * kPi / 3); }

const TransmissionSetup& split_setup(int level) {
  static std::map<int, TransmissionSetup> cache;
  auto it = cache.find(level);
  if (it == cache.end()) it = cache.emplace(level, make_setup(ball(level), MaterialParams{})).first;
  return it->second;
}

VectorXc random_vector(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> g;
  VectorXc v(n);
  for (auto& c : v) c = {g(rng), g(rng)};
  return v;
}

double impedance_area(const Skeleton& sk, int j) {
  double a = 0.0;
  for (const auto& p : sk.surface(j).panels) a += p.part == Part::I ? p.area : 0.0;
  return a;
}

}  // namespace

TEST(Impedance, DefaultIsScaledMass) {
  const Skeleton sk = make_skeleton(ball(1));
  const auto unit = impedance_default(sk, {}).at(1.0);
  const auto scaled = impedance_default(sk, {2.0, 2.0, 3.0, 3.0}).at(Complex(5.0, -2.0));
  for (int j = 1; j <= 2; ++j) {
    const VectorXc one = VectorXc::Ones(sk.surface(j).num_vertices());
    EXPECT_NEAR(one.dot(unit[j - 1] * one).real(), -impedance_area(sk, j), 1e-12);
    EXPECT_LT((scaled[j - 1] - 6.0 * unit[j - 1]).norm(), 1e-13);
  }
  EXPECT_GT(impedance_area(sk, 1), 0.0);
  EXPECT_EQ(impedance_area(sk, 1) + impedance_area(sk, 2), sk.mesh.part_area(Part::I));
  for (const auto& m : impedance_zero(sk).at(1.0)) EXPECT_EQ(m.norm(), 0.0);
}

TEST(Impedance, DissipativityProbe) {
  const Skeleton sk = make_skeleton(ball(1));
  const MaterialParams mat{1.5, 1.5, 0.5, 0.5};
  const auto rep = probe_dissipativity(impedance_default(sk, mat), sk, {1.0, {2.0, 3.0}}, 5, 1, &mat);
  EXPECT_TRUE(rep.dissipative());
  EXPECT_LT(rep.max_quotient, 0.0);
  EXPECT_LT(rep.max_default_defect, 1e-12);
  EXPECT_EQ(rep.conjugation_defect, 0.0);
  EXPECT_EQ(rep.samples, 20);

  ImpedanceOperator bad = impedance_default(sk, mat);
  bad.name = "flipped";
  bad.galerkin = [base = bad.galerkin](Complex s) {
    auto m = base(s);
    for (auto& x : m) x = -x;
    return m;
  };
  EXPECT_THROW(require_dissipative(bad, sk, {1.0}), DomainError);
}

TEST(System, ConjugateFrequency) {
  const auto& st = split_setup(1);
  const Complex s(1.0, 2.5);
  const TransmissionSystem a = assemble_system(s, st, false);
  const TransmissionSystem b = assemble_system(std::conj(s), st, false);
  EXPECT_LT((a.matrix.conjugate() - b.matrix).norm(), 1e-13 * a.matrix.norm());
}

TEST(System, Coercive) {
  const auto& st = split_setup(1);
  std::mt19937_64 rng(17);
  for (Complex s : {Complex(1.0, 0.0), Complex(1.0, 4.0), Complex(3.0, -2.0)}) {
    const TransmissionSystem sys = assemble_system(s, st, false);
    for (int k = 0; k < 10; ++k) {
      const VectorXc xi = random_vector(rng, st.map.num_single());
      EXPECT_GT(xi.dot(sys.matrix * xi).real(), 0.0) << s;
    }
  }
}

TEST(System, FrequencyBelowThreshold) {
  const auto& st = split_setup(0);
  EXPECT_THROW(assemble_system(Complex(0.05, 1.0), st), DomainError);
  EXPECT_NO_THROW(assemble_system(Complex(0.2, 1.0), st, false));
}

TEST(System, ImpedanceDataOffImpedancePart) {
  const auto& st = split_setup(0);
  const TransmissionSystem sys = assemble_system(1.0, st, false);
  VectorXc dI = VectorXc::Zero(st.skeleton.mesh.num_triangles());
  for (int t = 0; t < dI.size(); ++t)
    if (st.skeleton.mesh.parts[t] == Part::N) {
      dI(t) = 1.0;
      break;
    }
  EXPECT_THROW(assemble_rhs(sys, st, MultiTraceVector(st.skeleton.layout), dI), DomainError);
}

TEST(Solve, ZeroDataGivesZeroSolution) {
  const auto& st = split_setup(1);
  const LaplaceSolveResult r = solve_frequency(Complex(1.0, 1.0), st, zero_data(st.skeleton.mesh));
  EXPECT_EQ(r.traces.data.norm(), 0.0);
  EXPECT_EQ(r.xi.norm(), 0.0);
}

TEST(Solve, PointSourceOnSplitBall) {
  const Complex s(2.0, 1.0);
  const PointSource src;
  double prev = 1e300;
  for (int level : {1, 2, 3}) {
    const auto& st = split_setup(level);
    const LaplaceSolveResult r = solve_frequency(s, st, point_source_data(s, st, src), kLoose);
    EXPECT_LT(r.residual, 1e-10);
    const TraceErrors e = point_source_errors(s, st.skeleton, st.mat, src, r.traces);
    EXPECT_GT(prev / e.combined, 1.7) << "level " << level;
    prev = e.combined;
    if (level == 3) {
      const MultiTraceVector exact = point_source_traces(s, st.skeleton, st.mat, src);
      EXPECT_LT(trace_l2_difference(st.skeleton, r.traces, exact), 0.05);
    }
  }
  EXPECT_LT(prev, 0.1);
}

TEST(Solve, DirichletSphereConvergesToProjection) {
  const Complex s(2.0, 1.0);
  const PointSource src;
  double prev = 1e300;
  for (int level : {1, 2, 3}) {
    const TransmissionSetup st = make_setup(make_icosphere(level), {});
    const LaplaceSolveResult r = solve_frequency(s, st, point_source_data(s, st, src), kLoose);
    const MultiTraceVector exact = point_source_traces(s, st.skeleton, st.mat, src);
    const double d = trace_l2_difference(st.skeleton, r.traces, exact);
    EXPECT_LT(d, prev) << "level " << level;
    prev = d;
    // Dirichlet data is imposed by interpolation
    EXPECT_LT((r.traces.dirichlet(1) - exact.dirichlet(1)).norm(), 1e-14 * exact.dirichlet(1).norm());
  }
  EXPECT_LT(prev, 0.05);
}

TEST(Reconstruct, LocateAndRepresent) {
  const Complex s(2.0, 1.0);
  const PointSource src;
  const auto& st = split_setup(2);
  const Skeleton& sk = st.skeleton;
  EXPECT_EQ(locate(sk, {0.1, 0.2, 0.4}), 1);
  EXPECT_EQ(locate(sk, {0.1, 0.2, -0.4}), 2);
  EXPECT_EQ(locate(sk, {0.0, 0.0, 1.5}), 0);

  const LaplaceSolveResult r = solve_frequency(s, st, point_source_data(s, st, src), kLoose);
  // errors measured against the largest boundary value, which bounds the field inside
  const double scale = point_source_traces(s, sk, st.mat, src).data.cwiseAbs().maxCoeff();
  const std::vector<Vec3> pts{Vec3(0.1, 0.2, 0.3), Vec3(-0.2, 0.1, -0.4), Vec3(0.0, 0.0, 0.5)};
  const FieldValues f = reconstruct_field(s, sk, st.mat, r.traces, pts);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const Complex exact = src.value(s, pts[i], {});
    EXPECT_LT(std::abs(f.values(static_cast<Eigen::Index>(i)) - exact), 0.01 * scale) << i;
  }
  EXPECT_EQ(f.subdomain, (std::vector<int>{1, 2, 1}));
  EXPECT_THROW(reconstruct_field(s, sk, st.mat, r.traces, {Vec3(0, 0, 3)}), DomainError);

  // each representation vanishes outside its own subdomain
  const VectorXc outside = represent(1, s, sk, st.mat, r.traces, {Vec3(0.1, 0.2, -0.4)});
  EXPECT_LT(std::abs(outside(0)), 0.01 * scale);
}

TEST(Reconstruct, FictitiousInterfaceIsInvisible) {
  // equal materials: splitting the ball by a disk leaves the field unchanged up to discretization
  const Complex s(2.0, 1.0);
  const PointSource src;
  double prev = 1e300;
  for (int level : {1, 2}) {
    const auto& split = split_setup(level);
    const TransmissionSetup fused = make_setup(fuse_subdomains(ball(level)), {});
    const LaplaceSolveResult a = solve_frequency(s, split, point_source_data(s, split, src), kLoose);
    const LaplaceSolveResult b = solve_frequency(s, fused, point_source_data(s, fused, src), kLoose);
    const std::vector<Vec3> pts{Vec3(0.1, 0.2, 0.3), Vec3(-0.2, 0.1, -0.4)};
    const VectorXc ua = reconstruct_field(s, split.skeleton, split.mat, a.traces, pts).values;
    const VectorXc ub = reconstruct_field(s, fused.skeleton, fused.mat, b.traces, pts).values;
    const double d = (ua - ub).norm() / ub.norm();
    EXPECT_LT(d, prev) << "level " << level;
    prev = d;
  }
  EXPECT_LT(prev, 0.02);
}
