#include "tbem/calderon/calderon.hpp"
#include "tbem/mesh/generate.hpp"
#include "tbem/solver/manufactured.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace tbem;

namespace {

const Skeleton& split_ball(int level) {
  static std::map<int, Skeleton> cache;
  auto it = cache.find(level);
  if (it == cache.end()) it = cache.emplace(level, make_skeleton(make_split_ball(level, kPi / 3, 2 * kPi / 3))).first;
  return it->second;
}

MultiTraceVector random_traces(const TraceLayout& layout, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  MultiTraceVector t(layout);
  for (auto& c : t.data) c = {g(rng), g(rng)};
  return t;
}

}  // namespace

TEST(Scaling, RealFrequency) {
  const auto& sk = split_ball(0);
  const MultiTraceVector one(sk.layout, VectorXc::Ones(sk.layout.size()));
  const MultiTraceVector f = scale_traces(4.0, one, ScaleDirection::Forward);
  for (int j = 1; j <= 2; ++j) {
    EXPECT_EQ((f.dirichlet(j).array() - 2.0).matrix().norm(), 0.0);
    EXPECT_EQ((f.neumann(j).array() - 0.5).matrix().norm(), 0.0);
  }
  EXPECT_EQ((scaling_diagonal(4.0, sk.layout) - f.data).norm(), 0.0);
}

TEST(Scaling, PrincipalRootAndInverse) {
  const Complex s(1.0, 1.0);
  const ScalingPair sc(s);
  EXPECT_GT(sc.sqrt_s.real(), 0.0);
  EXPECT_LT(std::abs(sc.sqrt_s * sc.sqrt_s - s), 1e-15);
  EXPECT_LT(std::abs(sc.sqrt_s * sc.inv_sqrt_s - 1.0), 1e-15);
  const auto& sk = split_ball(1);
  const MultiTraceVector t = random_traces(sk.layout, 5);
  const MultiTraceVector back =
      scale_traces(s, scale_traces(s, t, ScaleDirection::Forward), ScaleDirection::Inverse);
  EXPECT_LT((back.data - t.data).norm(), 1e-15 * t.data.norm());
}

TEST(Scaling, RejectsLeftHalfPlane) {
  EXPECT_THROW(ScalingPair(Complex(0.0, 1.0)), DomainError);
  EXPECT_THROW(ScalingPair(Complex(-1.0, 0.0)), DomainError);
}

TEST(BlockCalderon, BlocksFromOperators) {
  const auto& sk = split_ball(1);
  const Complex s(1.0, 2.0);
  const MaterialParams mat{1.0, 2.0, 1.5, 0.5};
  const BlockCalderon A = build_block_calderon(s, sk, mat);
  const MatrixXc G = A.galerkin();
  for (int j = 1; j <= 2; ++j) {
    const OperatorSet ops = assemble_operators(sk.surface(j), s, mat.of(j));
    const int d = sk.layout.dirichlet_offset(j), n = sk.layout.neumann_offset(j);
    const int nd = sk.layout.nd[j - 1], nn = sk.layout.nn[j - 1];
    EXPECT_EQ((G.block(d, d, nd, nd) - ops.W / s).norm(), 0.0);
    EXPECT_EQ((G.block(d, n, nd, nn) - ops.K.transpose()).norm(), 0.0);
    EXPECT_EQ((G.block(n, d, nn, nd) + ops.K).norm(), 0.0);
    EXPECT_EQ((G.block(n, n, nn, nn) - s * ops.V).norm(), 0.0);
    EXPECT_EQ((A.sV(j) - s * ops.V).norm(), 0.0);
    EXPECT_EQ((A.W_over_s(j) - ops.W / s).norm(), 0.0);
  }
  const int o2 = sk.layout.block_offset(2), n1 = sk.layout.block_size(1);
  EXPECT_EQ(G.block(0, o2, n1, sk.layout.block_size(2)).norm(), 0.0);
}

TEST(BlockCalderon, IdentityShift) {
  const auto& sk = split_ball(1);
  const BlockCalderon A = build_block_calderon(1.0, sk, {});
  const MatrixXc diff = A.galerkin(-0.5) - A.galerkin();
  const MatrixXr M = mixed_mass(sk.surface(1));
  const int n = sk.layout.neumann_offset(1), nd = sk.layout.nd[0], nn = sk.layout.nn[0];
  EXPECT_LT((diff.block(n, 0, nn, nd).real() + 0.5 * M).norm(), 1e-15);
  EXPECT_LT((diff.block(0, n, nd, nn).real() + 0.5 * M.transpose()).norm(), 1e-15);
  EXPECT_EQ(diff.block(0, 0, nd, nd).norm(), 0.0);
}

TEST(BlockCalderon, ConjugateFrequency) {
  const auto& sk = split_ball(1);
  const Complex s(0.7, 1.9);
  const MatrixXc a = build_block_calderon(s, sk, {}).galerkin();
  const MatrixXc b = build_block_calderon(std::conj(s), sk, {}).galerkin();
  EXPECT_LT((a.conjugate() - b).norm(), 1e-14 * a.norm());
}

TEST(BlockCalderon, RejectsBadInput) {
  const auto& sk = split_ball(0);
  EXPECT_THROW(build_block_calderon(Complex(0.0, 1.0), sk, {}), DomainError);
  EXPECT_THROW(build_block_calderon(1.0, sk, {1.0, -1.0, 1.0, 1.0}), DomainError);
}

TEST(Pairing, ConstantsGiveArea) {
  const auto& sk = split_ball(2);
  const auto mass = skeleton_masses(sk);
  const MultiTraceVector one(sk.layout, VectorXc::Ones(sk.layout.size()));
  const double area = sk.surface(1).area() + sk.surface(2).area();
  EXPECT_NEAR(pairing(1, one, one, mass).real(), 2 * area, 1e-12);
  EXPECT_NEAR(std::abs(pairing(-1, one, one, mass)), 0.0, 1e-12);
}

TEST(Pairing, Symmetries) {
  const auto& sk = split_ball(1);
  const auto mass = skeleton_masses(sk);
  const MultiTraceVector a = random_traces(sk.layout, 1), b = random_traces(sk.layout, 2);
  EXPECT_LT(std::abs(pairing(1, a, b, mass) - pairing(1, b, a, mass)), 1e-13);
  EXPECT_LT(std::abs(pairing(-1, a, b, mass) + pairing(-1, b, a, mass)), 1e-13);
  EXPECT_LT(std::abs(pairing(-1, a, a, mass)), 1e-13);
}

TEST(Pairing, RejectsBadInput) {
  const auto& sk = split_ball(1);
  const auto mass = skeleton_masses(sk);
  const MultiTraceVector a = random_traces(sk.layout, 1);
  EXPECT_THROW(pairing(0, a, a, mass), DomainError);
  EXPECT_THROW(pairing(1, a, MultiTraceVector(split_ball(0).layout), mass), DomainError);
  EXPECT_THROW(pairing(1, a, a, {mass[0]}), DomainError);
}

TEST(Residual, PointSourceTracesAreCauchyData) {
  const Complex s(2.0, 1.0);
  const MaterialParams mat;
  double prev = 1e300;
  for (int level : {1, 2}) {
    const auto& sk = split_ball(level);
    const BlockCalderon A = build_block_calderon(s, sk, mat);
    const NormSet norms = make_norm_set(sk);
    const MultiTraceVector t = scale_traces(s, point_source_traces(s, sk, mat, {}), ScaleDirection::Forward);
    const ResidualResult r = calderon_residual(A, t, norms);
    EXPECT_FALSE(r.trivial);
    EXPECT_LT(r.value, prev) << "level " << level;
    prev = r.value;
    const ResidualResult noise = calderon_residual(A, random_traces(sk.layout, 9), norms);
    EXPECT_GT(noise.value, 0.2);
    EXPECT_GT(noise.value, 5 * r.value);
  }
  EXPECT_LT(prev, 0.05);
}

TEST(Residual, ZeroTracesAreTrivial) {
  const auto& sk = split_ball(1);
  const BlockCalderon A = build_block_calderon(1.0, sk, {});
  const ResidualResult r = calderon_residual(A, MultiTraceVector(sk.layout), make_norm_set(sk));
  EXPECT_TRUE(r.trivial);
  EXPECT_EQ(r.value, 0.0);
}

TEST(Norms, BasicProperties) {
  const auto& sk = split_ball(1);
  const NormSet n = make_norm_set(sk);
  const MultiTraceVector a = random_traces(sk.layout, 3);
  MultiTraceVector b = a;
  b.data *= Complex(0.0, -3.0);
  EXPECT_EQ(discrete_norm(MultiTraceVector(sk.layout), n), 0.0);
  EXPECT_GT(discrete_norm(a, n), 0.0);
  EXPECT_NEAR(discrete_norm(b, n), 3 * discrete_norm(a, n), 1e-12 * discrete_norm(a, n));
  const double gram = std::sqrt((a.data.adjoint() * (n.multi_gram(sk.layout).cast<Complex>() * a.data))(0, 0).real());
  EXPECT_NEAR(discrete_norm(a, n), gram, 1e-12 * gram);
  EXPECT_THROW(discrete_norm(NormKind::Half, VectorXc::Ones(3), n.surfaces[0]), DomainError);
}

TEST(Norms, DualNormOfGramVector) {
  // the load of v itself has dual norm ‖v‖
  const auto& sk = split_ball(1);
  const SurfaceNorms n = make_surface_norms(sk.surface(1));
  const VectorXc v = random_traces(sk.layout, 4).dirichlet(1);
  const VectorXc f = n.half.cast<Complex>() * v;
  EXPECT_NEAR(dual_norm(n.half_llt, f), discrete_norm(NormKind::Half, v, n), 1e-10);
}
