#include "tbem/mesh/generate.hpp"
#include "tbem/mesh/io.hpp"
#include "tbem/mesh/validate.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace tbem;

namespace {

// Icosahedron with golden-ratio coordinates, counterclockwise seen from outside.
const char* kIcosahedronOff = R"(OFF
12 20 0
-1 1.618033988749895 0
1 1.618033988749895 0
-1 -1.618033988749895 0
1 -1.618033988749895 0
0 -1 1.618033988749895
0 1 1.618033988749895
0 -1 -1.618033988749895
0 1 -1.618033988749895
1.618033988749895 0 -1
1.618033988749895 0 1
-1.618033988749895 0 -1
-1.618033988749895 0 1
3 0 11 5
3 0 5 1
3 0 1 7
3 0 7 10
3 0 10 11
3 1 5 9
3 5 11 4
3 11 10 2
3 10 7 6
3 7 1 8
3 3 9 4
3 3 4 2
3 3 2 6
3 3 6 8
3 3 8 9
3 4 9 5
3 2 4 11
3 6 2 10
3 8 6 7
3 9 8 1
)";

std::string icosahedron_off_tagged() {
  std::string s = kIcosahedronOff;
  for (int i = 0; i < 20; ++i) s += "1 D\n";
  return s;
}

}  // namespace

TEST(MeshIo, TaggedIcosahedronFromOff) {
  std::istringstream in(icosahedron_off_tagged());
  const SurfaceMesh m = read_off(in);
  EXPECT_EQ(m.num_vertices(), 12);
  EXPECT_EQ(m.num_triangles(), 20);
  const MeshReport rep = validate_mesh(m);
  EXPECT_TRUE(rep.ok()) << rep.summary();
  for (int t = 0; t < 20; ++t) {
    EXPECT_EQ(m.membership[t], Membership::One);
    EXPECT_EQ(m.parts[t], Part::D);
  }
}

TEST(MeshIo, OffWithoutTagsIsRejected) {
  std::istringstream in(kIcosahedronOff);
  try {
    read_off(in);
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("untagged element"), std::string::npos);
  }
}

TEST(MeshIo, MshTriangleWithoutPhysicalTag) {
  std::istringstream in(
      "$MeshFormat\n2.2 0 8\n$EndMeshFormat\n$Nodes\n3\n1 0 0 0\n2 1 0 0\n3 0 1 0\n$EndNodes\n"
      "$Elements\n1\n1 2 0 1 2 3\n$EndElements\n");
  try {
    read_msh(in, "bad.msh");
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("untagged element"), std::string::npos) << e.what();
  }
}

TEST(MeshIo, MshSkipsNonTriangleElements) {
  std::istringstream in(
      "$MeshFormat\n2.2 0 8\n$EndMeshFormat\n$Nodes\n3\n1 0 0 0\n2 1 0 0\n3 0 1 0\n$EndNodes\n"
      "$Elements\n2\n1 1 2 11 11 1 2\n2 2 2 11 11 1 2 3\n$EndElements\n");
  const SurfaceMesh m = read_msh(in);
  ASSERT_EQ(m.num_triangles(), 1);
  EXPECT_EQ(m.parts[0], Part::N);
  EXPECT_EQ(m.membership[0], Membership::One);
}

TEST(MeshIo, UnknownPartTag) {
  std::string s = kIcosahedronOff;
  for (int i = 0; i < 20; ++i) s += i == 7 ? "1 X\n" : "1 D\n";
  std::istringstream in(s);
  EXPECT_THROW(read_off(in), ParseError);
}

TEST(MeshIo, SplitBallRoundTripIsExact) {
  const SurfaceMesh m = make_split_ball(2, kPi / 3, 2 * kPi / 3);
  for (const char* ext : {".msh", ".off"}) {
    std::stringstream buf;
    if (std::string(ext) == ".msh") write_msh(buf, m);
    else write_off(buf, m);
    const SurfaceMesh r = std::string(ext) == ".msh" ? read_msh(buf) : read_off(buf);
    ASSERT_EQ(r.num_vertices(), m.num_vertices());
    ASSERT_EQ(r.num_triangles(), m.num_triangles());
    for (int v = 0; v < m.num_vertices(); ++v)
      for (int k = 0; k < 3; ++k) EXPECT_EQ(r.vertices[v](k), m.vertices[v](k)) << ext;
    EXPECT_EQ(r.triangles, m.triangles);
    EXPECT_EQ(r.membership, m.membership);
    EXPECT_EQ(r.parts, m.parts);
    EXPECT_EQ(r.geometry, BuiltinGeometry::SplitBall);
  }
}

TEST(MeshIo, SaveAndLoadThroughFiles) {
  const auto dir = std::filesystem::temp_directory_path() / "tbem_mesh_io";
  std::filesystem::create_directories(dir);
  const SurfaceMesh m = make_icosphere(1, Part::N);
  save_mesh(dir / "sphere.off", m);
  const SurfaceMesh r = load_mesh(dir / "sphere.off");
  EXPECT_EQ(r.triangles, m.triangles);
  EXPECT_THROW(load_mesh(dir / "sphere.stl"), ParseError);
}

TEST(Generate, IcosphereCounts) {
  const SurfaceMesh m0 = make_icosphere(0);
  EXPECT_EQ(m0.num_triangles(), 20);
  EXPECT_EQ(m0.num_vertices(), 12);
  EXPECT_TRUE(validate_mesh(m0).ok());
  const SurfaceMesh m2 = make_icosphere(2);
  EXPECT_EQ(m2.num_triangles(), 320);
  EXPECT_EQ(m2.num_vertices(), 162);  // Euler: V = T/2 + 2
  EXPECT_TRUE(validate_mesh(m2).ok());
}

TEST(Generate, RefineQuadrisects) {
  const SurfaceMesh m = refine(make_icosphere(0));
  EXPECT_EQ(m.num_triangles(), 80);
  for (const auto& v : make_icosphere(3).vertices) EXPECT_NEAR(v.norm(), 1.0, 1e-14);
}

TEST(Generate, AreaIncreasesTowardSphere) {
  double prev = 0.0;
  for (int l = 0; l <= 4; ++l) {
    const double a = make_icosphere(l).total_area();
    EXPECT_GT(a, prev);
    EXPECT_LT(a, 4 * kPi);
    prev = a;
  }
  EXPECT_NEAR(prev, 4 * kPi, 0.01 * 4 * kPi);
}

TEST(Generate, SplitBallInterface) {
  const SurfaceMesh m = make_split_ball(1, kPi / 3, 2 * kPi / 3);
  EXPECT_TRUE(validate_mesh(m).ok()) << validate_mesh(m).summary();
  EXPECT_EQ(m.num_subdomains(), 2);
  int nj = 0;
  for (int t = 0; t < m.num_triangles(); ++t) {
    const bool both = m.membership[t] == Membership::Both;
    EXPECT_EQ(both, m.parts[t] == Part::J);
    if (!both) continue;
    ++nj;
    EXPECT_NEAR(m.centroid(t).z(), 0.0, 1e-15);
    EXPECT_EQ(orientation_sign(m, 1, t), 1);
    EXPECT_EQ(orientation_sign(m, 2, t), -1);
    EXPECT_LT(m.area_normal(t).z(), 0.0);  // n_Σ = n_1 points down, out of the upper half
  }
  EXPECT_GT(nj, 0);
  for (Part p : kAllParts) EXPECT_GT(m.part_area(p), 0.0) << part_char(p);
}

TEST(Generate, SplitBallBandsFollowPolarAngle) {
  const SurfaceMesh m = make_split_ball(3, kPi / 3, 2 * kPi / 3);
  for (int t = 0; t < m.num_triangles(); ++t) {
    if (m.parts[t] == Part::J) continue;
    const Vec3 c = m.centroid(t);
    const double theta = std::acos(c.z() / c.norm());
    const Part want = theta < kPi / 3 ? Part::D : (theta < 2 * kPi / 3 ? Part::I : Part::N);
    EXPECT_EQ(m.parts[t], want) << t;
  }
  // disk area tends to π
  EXPECT_NEAR(m.part_area(Part::J), kPi, 0.03 * kPi);
}

TEST(Generate, BadArguments) {
  EXPECT_THROW(make_icosphere(-1), DomainError);
  EXPECT_THROW(make_icosphere(1, Part::J), DomainError);
  EXPECT_THROW(make_split_ball(1, 2.0, 1.0), DomainError);
}

TEST(Generate, FuseSubdomainsDropsTheDisk) {
  const SurfaceMesh m = make_split_ball(2, kPi / 3, 2 * kPi / 3);
  const SurfaceMesh f = fuse_subdomains(m);
  int outer = 0;
  for (Part p : m.parts) outer += p != Part::J;
  EXPECT_EQ(f.num_triangles(), outer);
  EXPECT_EQ(f.num_subdomains(), 1);
  EXPECT_TRUE(validate_mesh(f).ok()) << validate_mesh(f).summary();
  EXPECT_NEAR(f.part_area(Part::D), m.part_area(Part::D), 1e-14);
  EXPECT_NEAR(f.part_area(Part::I), m.part_area(Part::I), 1e-14);
  EXPECT_EQ(f.num_vertices(), f.num_triangles() / 2 + 2);
}

TEST(Validate, FlippedTriangle) {
  SurfaceMesh m = make_icosphere(2);
  std::swap(m.triangles[17][1], m.triangles[17][2]);
  const MeshReport rep = validate_mesh(m);
  EXPECT_FALSE(rep.ok());
  ASSERT_EQ(rep.subdomains.size(), 1u);
  EXPECT_EQ(rep.subdomains[0].orientation_failures, 3);
  EXPECT_EQ(rep.subdomains[0].open_edges, 0);
}

TEST(Validate, SplitBallWithoutDiskIsOpen) {
  SurfaceMesh m = make_split_ball(1, kPi / 3, 2 * kPi / 3);
  SurfaceMesh cut = m;
  cut.triangles.clear();
  cut.membership.clear();
  cut.parts.clear();
  for (int t = 0; t < m.num_triangles(); ++t) {
    if (m.parts[t] == Part::J) continue;
    cut.triangles.push_back(m.triangles[t]);
    cut.membership.push_back(m.membership[t]);
    cut.parts.push_back(m.parts[t]);
  }
  const MeshReport rep = validate_mesh(cut);
  EXPECT_FALSE(rep.ok());
  ASSERT_GE(rep.subdomains.size(), 1u);
  EXPECT_FALSE(rep.subdomains[0].watertight());
}

TEST(Validate, InconsistentTags) {
  SurfaceMesh m = make_split_ball(1, kPi / 3, 2 * kPi / 3);
  for (int t = 0; t < m.num_triangles(); ++t)
    if (m.parts[t] == Part::J) {
      m.parts[t] = Part::N;
      break;
    }
  EXPECT_FALSE(validate_mesh(m).ok());
}

TEST(Validate, QualityIsAWarning) {
  SurfaceMesh m = make_icosphere(1);
  // pull one vertex toward a neighbour to create a sliver without breaking topology
  const auto& tri = m.triangles[0];
  m.vertices[tri[0]] = 0.98 * m.vertices[tri[1]] + 0.02 * m.vertices[tri[0]];
  const MeshReport rep = validate_mesh(m);
  EXPECT_LT(rep.min_quality, kQualityFloor);
  EXPECT_FALSE(rep.warnings.empty());
  EXPECT_TRUE(rep.errors.empty());
}

TEST(Validate, TriangleQualityOracle) {
  EXPECT_NEAR(triangle_quality({0, 0, 0}, {1, 0, 0}, {0.5, std::sqrt(3.0) / 2, 0}), 1.0, 1e-14);
  // right isosceles with unit legs: r_in = 1 − 1/√2, R = 1/√2
  EXPECT_NEAR(triangle_quality({0, 0, 0}, {1, 0, 0}, {0, 1, 0}), 2 * (std::sqrt(2.0) - 1), 1e-14);
  EXPECT_EQ(triangle_quality({0, 0, 0}, {1, 0, 0}, {2, 0, 0}), 0.0);
}

TEST(Orientation, IcosphereIsPositive) {
  const SurfaceMesh m = make_icosphere(1);
  for (int t = 0; t < m.num_triangles(); ++t) {
    EXPECT_EQ(orientation_sign(m, 1, t), 1);
    EXPECT_GT(m.area_normal(t).dot(m.centroid(t)), 0.0);
  }
  EXPECT_THROW(orientation_sign(m, 2, 0), DomainError);
}
