#include "tbem/mesh/generate.hpp"
#include "tbem/operators/assembly.hpp"
#include "tbem/operators/potentials.hpp"

#include <gtest/gtest.h>

#include <deque>
#include <random>

using namespace tbem;

namespace {

const SubdomainSurface& sphere(int level) {
  static std::map<int, SubdomainSurface> cache;
  auto it = cache.find(level);
  if (it == cache.end()) it = cache.emplace(level, extract_subdomain(make_icosphere(level), 1)).first;
  return it->second;
}

const OperatorSet& sphere_ops(int level, Complex s, const Material& m = {}) {
  static std::deque<std::pair<std::tuple<int, Complex, double, double>, OperatorSet>> cache;
  const auto key = std::tuple{level, s, m.a, m.p};
  for (const auto& [k, v] : cache)
    if (k == key) return v;
  cache.emplace_back(key, assemble_operators(sphere(level), s, m));
  return cache.back().second;
}

VectorXc ones(int n) { return VectorXc::Ones(n); }

}  // namespace

TEST(Operators, Shapes) {
  const auto& surf = sphere(1);
  const auto& ops = sphere_ops(1, 1.0);
  EXPECT_EQ(ops.V.rows(), surf.num_panels());
  EXPECT_EQ(ops.V.cols(), surf.num_panels());
  EXPECT_EQ(ops.K.rows(), surf.num_panels());
  EXPECT_EQ(ops.K.cols(), surf.num_vertices());
  EXPECT_EQ(ops.W.rows(), surf.num_vertices());
  const GalerkinMatrix kp = assemble_bio(KernelKind::Kp, 1.0, surf, {});
  EXPECT_EQ(kp.tag, OperatorTag::Kp);
  EXPECT_EQ(kp.test.kind, SpaceKind::P1);
  EXPECT_EQ(kp.trial.kind, SpaceKind::P0);
  EXPECT_EQ((kp.data - ops.Kp()).norm(), 0.0);
}

TEST(Operators, ComplexSymmetry) {
  const Complex s(1.0, 3.0);
  const auto& ops = sphere_ops(2, s);
  EXPECT_LE((ops.V - ops.V.transpose()).norm(), 1e-12 * ops.V.norm());
  EXPECT_LE((ops.W - ops.W.transpose()).norm(), 1e-12 * ops.W.norm());
}

TEST(Operators, ConjugateFrequency) {
  const Complex s(0.5, 2.0);
  const auto& a = sphere_ops(1, s);
  const auto& b = sphere_ops(1, std::conj(s));
  EXPECT_LE((a.V.conjugate() - b.V).norm(), 1e-14 * a.V.norm());
  EXPECT_LE((a.K.conjugate() - b.K).norm(), 1e-14 * a.K.norm());
  EXPECT_LE((a.W.conjugate() - b.W).norm(), 1e-14 * a.W.norm());
}

TEST(Operators, SingleLayerIsCoerciveForRealFrequency) {
  const auto& ops = sphere_ops(2, 2.0);
  Eigen::SelfAdjointEigenSolver<MatrixXr> eig(ops.V.real());
  EXPECT_GT(eig.eigenvalues().minCoeff(), 0.0);
  EXPECT_LE(ops.V.imag().norm(), 0.0);
}

TEST(Operators, NewtonianDoubleLayerOfConstant) {
  // ∫_Γ ∂_{n_y} G(x − y) dy = −1/2 for x on a closed surface with outward normal
  const auto& surf = sphere(2);
  const auto& ops = sphere_ops(2, 1e-10);
  const VectorXc k1 = ops.K * ones(surf.num_vertices());
  double worst = 0.0;
  for (int t = 0; t < surf.num_panels(); ++t)
    worst = std::max(worst, std::abs(k1(t) + 0.5 * surf.panels[t].area) / surf.panels[t].area);
  EXPECT_LT(worst, 5e-3);
  EXPECT_LT(std::abs(k1.sum() + 0.5 * surf.area()), 1e-4 * surf.area());
}

TEST(Operators, NewtonianHypersingularKillsConstants) {
  const auto& surf = sphere(2);
  const auto& ops = sphere_ops(2, 1e-10);
  EXPECT_LT((ops.W * ones(surf.num_vertices())).norm(), 1e-12 * ops.W.norm());
}

TEST(Operators, NewtonianSingleLayerEnergyConverges) {
  // unit sphere: S1 = 1 on Γ, so ⟨V1, 1⟩ → |Γ| = 4π
  double prev = 1e300;
  for (int level : {1, 2, 3}) {
    const auto& surf = sphere(level);
    const auto& ops = sphere_ops(level, 1e-10);
    const double e = std::abs(ones(surf.num_panels()).dot(ops.V * ones(surf.num_panels())) - 4 * kPi);
    EXPECT_LT(e, prev) << "level " << level;
    prev = e;
  }
  EXPECT_LT(prev, 0.02 * 4 * kPi);
}

TEST(Operators, MaterialScaling) {
  // V ∝ 1/a², W ∝ a², K invariant, all at decay rate s p / a
  const Complex s(1.0, 1.0);
  const auto& a = sphere_ops(1, s, {2.0, 3.0});
  const auto& b = sphere_ops(1, s * 1.5);
  EXPECT_LE((4.0 * a.V - b.V).norm(), 1e-14 * b.V.norm());
  EXPECT_LE((a.K - b.K).norm(), 1e-14 * b.K.norm());
  EXPECT_LE((a.W - 4.0 * b.W).norm(), 1e-13 * a.W.norm());
}

TEST(Operators, OpenSurfaceRejected) {
  SubdomainSurface surf = sphere(1);
  surf.panels.pop_back();
  EXPECT_THROW(assemble_operators(surf, 1.0, {}), DomainError);
}

TEST(Mass, TotalsEqualArea) {
  const auto& surf = sphere(2);
  const double area = surf.area();
  EXPECT_NEAR(ones(surf.num_panels()).real().dot(mixed_mass(surf) * ones(surf.num_vertices()).real()), area, 1e-12);
  EXPECT_NEAR(ones(surf.num_vertices()).real().dot(p1_mass(surf) * ones(surf.num_vertices()).real()), area, 1e-12);
  EXPECT_NEAR(p0_mass(surf).sum(), area, 1e-12);
}

TEST(Mass, P1MassIsSymmetricPositive) {
  const MatrixXr m = p1_mass(sphere(1));
  EXPECT_EQ((m - m.transpose()).norm(), 0.0);
  Eigen::SelfAdjointEigenSolver<MatrixXr> eig(m);
  EXPECT_GT(eig.eigenvalues().minCoeff(), 0.0);
}

TEST(Mass, InterfaceRestrictionApproachesDiskArea) {
  double prev = 1e300;
  for (int level : {1, 2, 3, 4}) {
    const SubdomainSurface surf = extract_subdomain(make_split_ball(level, kPi / 3, 2 * kPi / 3), 1);
    const double disk = p0_mass(surf, Part::J).sum();
    EXPECT_LT(disk, kPi);
    EXPECT_LT(kPi - disk, prev);
    prev = kPi - disk;
    EXPECT_NEAR(mixed_mass(surf, Part::J).sum(), disk, 1e-12);
  }
  EXPECT_LT(prev, 0.01 * kPi);
}

TEST(Mass, EmptyRestrictionIsZero) {
  const auto& surf = sphere(1);
  EXPECT_EQ(mixed_mass(surf, Part::N).norm(), 0.0);
  EXPECT_EQ(p1_mass(surf, Part::I).norm(), 0.0);
  EXPECT_EQ(p0_mass(surf, Part::J).norm(), 0.0);
}

TEST(Potentials, NewtonianDoubleLayerJump) {
  // D1 = −1 inside and 0 outside any closed surface
  const auto& surf = sphere(2);
  const std::vector<Vec3> pts{Vec3(0, 0, 0), Vec3(0.3, -0.2, 0.5), Vec3(2, 0, 0), Vec3(0.5, 1.2, -0.9)};
  const VectorXc d = eval_potential(PotentialKind::Double, 1e-10, surf, ones(surf.num_vertices()), pts, {});
  EXPECT_NEAR(d(0).real(), -1.0, 1e-6);
  EXPECT_NEAR(d(1).real(), -1.0, 1e-6);
  EXPECT_NEAR(d(2).real(), 0.0, 1e-6);
  EXPECT_NEAR(d(3).real(), 0.0, 1e-6);
}

TEST(Potentials, NewtonianSingleLayerAtCenter) {
  // all panels of the unit icosphere lie inside the unit sphere, so S1(0) > |Γ| / (4π)
  const auto& surf = sphere(3);
  const VectorXc v = eval_potential(PotentialKind::Single, 1e-10, surf, ones(surf.num_panels()), {Vec3::Zero()}, {});
  EXPECT_GT(v(0).real(), surf.area() / (4 * kPi));
  EXPECT_NEAR(v(0).real(), 1.0, 0.01);
}

TEST(Potentials, SingleLayerAtCenterOfSphere) {
  // |x| = 1 on the exact sphere gives S1(0) = e^{−κ}; level 3 perturbs it by under 2%
  const auto& surf = sphere(3);
  const Complex s(2.0, 1.0);
  const VectorXc v = eval_potential(PotentialKind::Single, s, surf, ones(surf.num_panels()), {Vec3::Zero()}, {});
  EXPECT_LT(std::abs(v(0) - std::exp(-s)), 0.02 * std::abs(std::exp(-s)));
}

TEST(Potentials, Linearity) {
  const auto& surf = sphere(1);
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g;
  VectorXc a(surf.num_panels()), b(surf.num_panels());
  for (int i = 0; i < a.size(); ++i) {
    a(i) = {g(rng), g(rng)};
    b(i) = {g(rng), g(rng)};
  }
  const Complex alpha(0.3, -1.2), s(1.5, 0.5);
  const std::vector<Vec3> pts{Vec3(0.1, 0.2, 0.3), Vec3(1.8, -0.5, 0.4)};
  const VectorXc lhs = eval_potential(PotentialKind::Single, s, surf, a + alpha * b, pts, {});
  const VectorXc rhs = eval_potential(PotentialKind::Single, s, surf, a, pts, {}) +
                       alpha * eval_potential(PotentialKind::Single, s, surf, b, pts, {});
  EXPECT_LT((lhs - rhs).norm(), 1e-13 * rhs.norm());
}

TEST(Potentials, GradientMatchesFiniteDifference) {
  const auto& surf = sphere(2);
  const Complex s(1.0, 2.0);
  const Material m{1.3, 0.7};
  const VectorXc psi = VectorXc::LinSpaced(surf.num_panels(), Complex(0.1, 0.0), Complex(1.0, -0.5));
  const Vec3 x(0.2, -0.3, 0.25);
  const double h = 1e-4;
  for (PotentialKind kind : {PotentialKind::Single, PotentialKind::Double}) {
    const VectorXc dens = kind == PotentialKind::Single ? psi : VectorXc(psi.head(surf.num_vertices()));
    const auto g = eval_potential_samples(kind, s, surf, dens, {x}, m)[0].gradient;
    for (int k = 0; k < 3; ++k) {
      const Vec3 e = h * Vec3::Unit(k);
      const VectorXc f = eval_potential(kind, s, surf, dens, {x + e, x - e}, m);
      EXPECT_LT(std::abs((f(0) - f(1)) / (2 * h) - g(k)), 1e-6 * g.norm());
    }
  }
}

TEST(Potentials, RejectsPointsOnSurface) {
  const auto& surf = sphere(1);
  const Vec3 on = surf.panels[0].v[0];
  EXPECT_THROW(eval_potential(PotentialKind::Single, 1.0, surf, ones(surf.num_panels()), {on}, {}), DomainError);
  EXPECT_THROW(eval_potential(PotentialKind::Double, 1.0, surf, ones(3), {Vec3::Zero()}, {}), DomainError);
}

TEST(Potentials, WindingNumber) {
  const auto& surf = sphere(2);
  EXPECT_NEAR(winding_number(surf, Vec3(0.1, 0.2, -0.3)), 1.0, 1e-12);
  EXPECT_NEAR(winding_number(surf, Vec3(1.5, 0.0, 0.2)), 0.0, 1e-12);
}

TEST(Dump, RoundTrip) {
  const auto& ops = sphere_ops(1, Complex(1.0, 3.0));
  const auto path = std::filesystem::temp_directory_path() / "tbem_dump_test.bin";
  dump_matrix(path, ops.K, OperatorTag::K, ops.s);
  const MatrixDump d = read_matrix_dump(path);
  EXPECT_EQ(d.tag, OperatorTag::K);
  EXPECT_EQ(d.s, ops.s);
  EXPECT_EQ(d.data.rows(), ops.K.rows());
  EXPECT_EQ(d.data.cols(), ops.K.cols());
  EXPECT_EQ((d.data - ops.K).norm(), 0.0);
  std::filesystem::resize_file(path, std::filesystem::file_size(path) - 8);
  EXPECT_THROW(read_matrix_dump(path), ParseError);
  {
    std::ofstream(path, std::ios::binary) << "NOPE and some padding bytes here";
  }
  EXPECT_THROW(read_matrix_dump(path), ParseError);
  std::filesystem::remove(path);
}

TEST(Parts, ParsePart) {
  EXPECT_EQ(parse_part("I"), Part::I);
  EXPECT_THROW(parse_part("X"), DomainError);
  EXPECT_THROW(parse_part("DN"), DomainError);
}
