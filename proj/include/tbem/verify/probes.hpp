#pragma once

#include "tbem/cq/march.hpp"
#include "tbem/cq/signals.hpp"
#include "tbem/mesh/generate.hpp"
#include "tbem/mesh/validate.hpp"
#include "tbem/solver/manufactured.hpp"
#include "tbem/verify/report.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>
#include <optional>
#include <random>

namespace tbem {

namespace detail {

inline VectorXc complex_normal(std::mt19937_64& rng, Eigen::Index n) {
  std::normal_distribution<double> nd;
  VectorXc v(n);
  for (auto& c : v) c = {nd(rng), nd(rng)};
  return v;
}

/// Least-squares slope of log y against log x.
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw DomainError("slope fit needs at least two points");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

/// Smooth random field Σ c_k e^{i ω_k·x} with a few low wave vectors.
struct SmoothField {
  std::vector<Complex> c;
  std::vector<Vec3> w;
  Complex operator()(const Vec3& x) const {
    Complex sum = 0.0;
    for (std::size_t k = 0; k < c.size(); ++k) sum += c[k] * std::exp(Complex(0.0, w[k].dot(x)));
    return sum;
  }
};

inline SmoothField random_smooth_field(std::mt19937_64& rng, int terms = 4, double scale = 1.5) {
  std::normal_distribution<double> nd;
  SmoothField f;
  for (int k = 0; k < terms; ++k) {
    f.c.emplace_back(nd(rng), nd(rng));
    f.w.emplace_back(scale * nd(rng), scale * nd(rng), scale * nd(rng));
  }
  return f;
}

inline std::string level_key(const std::string& what, int level) { return what + " (level " + std::to_string(level) + ")"; }

inline Json complex_list(const std::vector<Complex>& v) {
  Json a = Json::array();
  for (Complex z : v) a.push_back(format_complex(z));
  return a;
}

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  [[nodiscard]] double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

}  // namespace detail

inline constexpr double kBandD = kPi / 3.0;
inline constexpr double kBandN = 2.0 * kPi / 3.0;

// ---------------------------------------------------------------------------------------
// mesh

struct MeshProbeParams {
  int level = 3;
};

inline ProbeReport probe_mesh(const MeshProbeParams& p = {}) {
  detail::Stopwatch clock;
  ProbeReport r;
  r.probe = "mesh";
  r.parameters["level"] = p.level;
  const SurfaceMesh ico = make_icosphere(p.level);
  const SurfaceMesh ball = make_split_ball(p.level, kBandD, kBandN);
  for (const auto& [name, mesh] : {std::pair<std::string, const SurfaceMesh*>{"icosphere", &ico}, {"split_ball", &ball}}) {
    const MeshReport rep = validate_mesh(*mesh);
    r.check(name + " valid", rep.ok() ? 1.0 : 0.0, Relation::AtLeast, 1.0);
    r.check(name + " tag coverage defect", rep.coverage_defect, Relation::AtMost, 1e-12);
    r.check(name + " min quality", rep.min_quality, Relation::AtLeast, kQualityFloor);
    r.info(name + " triangles", mesh->num_triangles());
  }
  SurfaceMesh flipped = ico;
  std::swap(flipped.triangles[0][1], flipped.triangles[0][2]);
  const MeshReport bad = validate_mesh(flipped);
  int failures = 0;
  for (const auto& c : bad.subdomains) failures += c.orientation_failures;
  r.check("flipped triangle orientation failures", failures, Relation::AtLeast, 3.0);
  r.check("flipped triangle rejected", bad.ok() ? 0.0 : 1.0, Relation::AtLeast, 1.0);
  r.seconds = clock.seconds();
  return r;
}

// ---------------------------------------------------------------------------------------
// jump relations

struct JumpParams {
  int level = 3;
  Complex s{1.0, 2.0};
  int densities = 10;
  int probes = 64;
  double eps_factor = 0.1;
  bool refine = true;
  std::uint64_t seed = 1;
  double tolerance = 0.05;
};

struct JumpErrors {
  double single_dirichlet = 0.0;  // [Ŝφ]_D against 0
  double single_neumann = 0.0;    // [Ŝφ]_N against −φ
  double double_dirichlet = 0.0;  // [D̂ψ]_D against ψ
  double double_neumann = 0.0;    // [D̂ψ]_N against 0
};

/// Jumps across the icosphere of the layer potentials of smooth random densities, measured
/// at point pairs centroid ± ε n with ε = eps_factor × panel diameter.
inline JumpErrors measure_jumps(int level, Complex s, int densities, int probes, double eps_factor,
                                std::uint64_t seed) {
  const Skeleton sk = make_skeleton(make_icosphere(level));
  const SubdomainSurface& surf = sk.surface(1);
  const Material mat{};
  std::mt19937_64 rng(seed);
  std::vector<int> panels(static_cast<std::size_t>(surf.num_panels()));
  std::iota(panels.begin(), panels.end(), 0);
  std::shuffle(panels.begin(), panels.end(), rng);
  panels.resize(static_cast<std::size_t>(std::min(probes, surf.num_panels())));
  std::vector<Vec3> points;
  for (int t : panels) {
    const Panel& p = surf.panels[t];
    const double eps = eps_factor * p.diameter;
    points.push_back(p.centroid + eps * p.normal);
    points.push_back(p.centroid - eps * p.normal);
  }
  double sd[2] = {0, 0}, sn[2] = {0, 0}, dd[2] = {0, 0}, dn[2] = {0, 0};
  for (int k = 0; k < densities; ++k) {
    const detail::SmoothField f = detail::random_smooth_field(rng);
    VectorXc phi(surf.num_panels()), psi(surf.num_vertices());
    for (int t = 0; t < surf.num_panels(); ++t) phi(t) = triangle_average(surf.panels[t].v, f);
    for (int v = 0; v < surf.num_vertices(); ++v) psi(v) = f(sk.mesh.vertices[surf.vertices[v]]);
    const auto S = eval_potential_samples(PotentialKind::Single, s, surf, phi, points, mat);
    const auto D = eval_potential_samples(PotentialKind::Double, s, surf, psi, points, mat);
    for (std::size_t i = 0; i < panels.size(); ++i) {
      const Panel& p = surf.panels[panels[i]];
      const Eigen::Vector3cd n = p.normal.cast<Complex>();
      const auto& sp = S[2 * i];
      const auto& sm = S[2 * i + 1];
      const auto& dp = D[2 * i];
      const auto& dm = D[2 * i + 1];
      const Complex psi_c = (psi(p.local_vertex[0]) + psi(p.local_vertex[1]) + psi(p.local_vertex[2])) / 3.0;
      const Complex s_dn = mat.a * mat.a * n.dot(sp.gradient - sm.gradient);
      const Complex d_dn = mat.a * mat.a * n.dot(dp.gradient - dm.gradient);
      sd[0] += std::norm(sp.value - sm.value);
      sd[1] += std::norm(0.5 * (sp.value + sm.value));
      sn[0] += std::norm(s_dn + phi(panels[i]));
      sn[1] += std::norm(phi(panels[i]));
      dd[0] += std::norm(dp.value - dm.value - psi_c);
      dd[1] += std::norm(psi_c);
      dn[0] += std::norm(d_dn);
      dn[1] += std::norm(0.5 * mat.a * mat.a * n.dot(dp.gradient + dm.gradient));
    }
  }
  return {std::sqrt(sd[0] / sd[1]), std::sqrt(sn[0] / sn[1]), std::sqrt(dd[0] / dd[1]), std::sqrt(dn[0] / dn[1])};
}

inline ProbeReport probe_jumps(const JumpParams& p = {}) {
  detail::Stopwatch clock;
  ProbeReport r;
  r.probe = "jumps";
  r.parameters["level"] = p.level;
  r.parameters["s"] = format_complex(p.s);
  r.parameters["densities"] = p.densities;
  r.parameters["probe_panels"] = p.probes;
  r.parameters["eps_over_diameter"] = p.eps_factor;
  r.parameters["seed"] = p.seed;
  const JumpErrors e = measure_jumps(p.level, p.s, p.densities, p.probes, p.eps_factor, p.seed);
  const auto key = [&](const char* what, int level) { return detail::level_key(what, level); };
  r.check(key("[S phi]_D error", p.level), e.single_dirichlet, Relation::AtMost, p.tolerance);
  r.check(key("[S phi]_N + phi error", p.level), e.single_neumann, Relation::AtMost, p.tolerance);
  r.check(key("[D psi]_D - psi error", p.level), e.double_dirichlet, Relation::AtMost, p.tolerance);
  r.check(key("[D psi]_N error", p.level), e.double_neumann, Relation::AtMost, p.tolerance);
  if (p.refine) {
    const int l = p.level + 1;
    const JumpErrors f = measure_jumps(l, p.s, p.densities, p.probes, p.eps_factor, p.seed);
    r.check(key("[S phi]_D error", l), f.single_dirichlet, Relation::AtMost, e.single_dirichlet);
    r.check(key("[S phi]_N + phi error", l), f.single_neumann, Relation::AtMost, e.single_neumann);
    r.check(key("[D psi]_D - psi error", l), f.double_dirichlet, Relation::AtMost, e.double_dirichlet);
    r.check(key("[D psi]_N error", l), f.double_neumann, Relation::AtMost, e.double_neumann);
  }
  r.seconds = clock.seconds();
  return r;
}

// ---------------------------------------------------------------------------------------
// Newtonian limits

struct NewtonianParams {
  int level = 3;
  double s = 1e-6;
  double tolerance = 0.02;
};

inline ProbeReport probe_newtonian(const NewtonianParams& p = {}) {
  detail::Stopwatch clock;
  ProbeReport r;
  r.probe = "newtonian";
  r.parameters["level"] = p.level;
  r.parameters["s"] = p.s;
  const Skeleton sk = make_skeleton(make_icosphere(p.level));
  const SubdomainSurface& surf = sk.surface(1);
  const OperatorSet ops = assemble_operators(surf, p.s, Material{}, QuadratureOrders{});
  const Complex v11 = ops.V.sum();
  const double area = p0_mass(surf).sum();
  const Complex kmean = ops.K.sum() / area;
  // oracles: the unit-density unit shell has Newtonian potential 1 on and inside the sphere,
  // so ∫∫ G = 4π; Gauss' identity gives ∫ ∂_{n_y} G = −1/2 on the surface
  const double v_exact = 4.0 * kPi;
  r.info("<V 1, 1>", v11.real());
  r.check("<V 1, 1> relative error vs 4 pi", std::abs(v11 - v_exact) / v_exact, Relation::AtMost, p.tolerance);
  r.info("mean of K 1", kmean.real());
  r.check("mean of K 1 relative error vs -1/2", std::abs(kmean + 0.5) / 0.5, Relation::AtMost, p.tolerance);
  const VectorXc ones = VectorXc::Ones(surf.num_panels());
  const Complex center = eval_potential(PotentialKind::Single, p.s, surf, ones, {Vec3::Zero()}, Material{})(0);
  r.check("single layer of 1 at the center vs 1", std::abs(center - 1.0), Relation::AtMost, p.tolerance);
  r.seconds = clock.seconds();
  return r;
}

// ---------------------------------------------------------------------------------------
// Calderón residual

struct CalderonParams {
  std::vector<int> levels{3, 4};
  Complex s{1.0, 2.0};
  Vec3 y0{0.0, 0.0, 2.0};
  double tolerance = 0.05;
  double max_ratio = 0.7;
};

inline ProbeReport probe_calderon(const CalderonParams& p = {}) {
  detail::Stopwatch clock;
  ProbeReport r;
  r.probe = "calderon";
  r.parameters["levels"] = p.levels;
  r.parameters["s"] = format_complex(p.s);
  r.parameters["y0"] = {p.y0.x(), p.y0.y(), p.y0.z()};
  if (p.levels.empty()) throw ConfigError("calderon probe needs at least one level");
  std::vector<double> res;
  for (int level : p.levels) {
    const Skeleton sk = make_skeleton(make_icosphere(level));
    const MaterialParams mat{};
    const BlockCalderon A = build_block_calderon(p.s, sk, mat);
    const NormSet norms = make_norm_set(sk);
    PointSource src;
    src.y0 = p.y0;
    const MultiTraceVector scaled = scale_traces(p.s, point_source_traces(p.s, sk, mat, src), ScaleDirection::Forward);
    res.push_back(calderon_residual(A, scaled, norms).value);
    if (level != p.levels.front()) r.info(detail::level_key("relative residual", level), res.back());
  }
  r.check(detail::level_key("relative residual", p.levels.front()), res.front(), Relation::AtMost, p.tolerance);
  for (std::size_t i = 1; i < res.size(); ++i)
    r.check("residual ratio level " + std::to_string(p.levels[i]) + "/" + std::to_string(p.levels[i - 1]),
            res[i] / res[i - 1], Relation::AtMost, p.max_ratio);
  r.seconds = clock.seconds();
  return r;
}

// ---------------------------------------------------------------------------------------
// pairing equivalence

struct PairingParams {
  int level = 2;
  int samples = 50;
  std::uint64_t seed = 3;
  double tolerance = 1e-10;
};

inline ProbeReport probe_pairing(const PairingParams& p = {}) {
  detail::Stopwatch clock;
  ProbeReport r;
  r.probe = "pairing";
  r.parameters["level"] = p.level;
  r.parameters["samples"] = p.samples;
  r.parameters["seed"] = p.seed;
  const TransmissionSetup st = make_setup(make_split_ball(p.level, kBandD, kBandN), MaterialParams{});
  const auto full = skeleton_masses(st.skeleton);
  const auto on_i = skeleton_masses(st.skeleton, Part::I);
  const Eigen::SparseMatrix<Complex> E = st.map.E.cast<Complex>();
  std::mt19937_64 rng(p.seed);
  double worst = 0.0, smallest = std::numeric_limits<double>::infinity();
  for (int k = 0; k < p.samples; ++k) {
    const MultiTraceVector phi(st.skeleton.layout, E * detail::complex_normal(rng, st.map.num_single()));
    const MultiTraceVector psi(st.skeleton.layout, E * detail::complex_normal(rng, st.map.num_single()));
    const Complex sigma = pairing(+1, phi, psi, full);
    const Complex gi = pairing(+1, phi, psi, on_i);
    worst = std::max(worst, std::abs(sigma - gi) / std::abs(sigma));
    smallest = std::min(smallest, std::abs(sigma));
  }
  r.check("max relative |<.,.>+_Sigma - <.,.>+_I|", worst, Relation::AtMost, p.tolerance);
  r.info("min |<.,.>+_Sigma|", smallest);
  r.seconds = clock.seconds();
  return r;
}

// ---------------------------------------------------------------------------------------
// coercivity

struct CoercivityParams {
  std::vector<int> levels{2, 3};
  std::vector<Complex> frequencies{{1.0, 0.0}, {1.0, 2.0}, {1.0, -2.0}, {5.0, 0.0}};
  int samples = 100;
  std::uint64_t seed = 5;
  double max_drop = 10.0;
};

struct CoercivityData {
  double min_a = 0.0;    // min Re⟨A Φ, Φ̄⟩+ / ‖Φ‖²_X over random multi-traces
  double min_mix = 0.0;  // min Re a^mix(ξ, ξ) / ‖Eξ‖²_X over random single traces
  double zeta = 0.0;     // min_mix |s|² / Re s
};

inline ProbeReport probe_coercivity(const CoercivityParams& p = {}) {
  detail::Stopwatch clock;
  ProbeReport r;
  r.probe = "coercivity";
  r.parameters["levels"] = p.levels;
  r.parameters["s"] = detail::complex_list(p.frequencies);
  r.parameters["samples"] = p.samples;
  r.parameters["seed"] = p.seed;
  if (p.levels.empty()) throw ConfigError("coercivity probe needs at least one level");
  std::vector<std::vector<CoercivityData>> all;
  for (int level : p.levels) {
    const TransmissionSetup st = make_setup(make_split_ball(level, kBandD, kBandN), MaterialParams{});
    const NormSet norms = make_norm_set(st.skeleton);
    const MatrixXc gram = norms.multi_gram(st.skeleton.layout).cast<Complex>();
    const Eigen::SparseMatrix<Complex> E = st.map.E.cast<Complex>();
    std::mt19937_64 rng(p.seed);
    std::vector<CoercivityData> row;
    for (Complex s : p.frequencies) {
      const TransmissionSystem sys = assemble_system(s, st, false);
      const MatrixXc A = sys.calderon.galerkin(0.0);
      CoercivityData d{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(), 0.0};
      for (int k = 0; k < p.samples; ++k) {
        const VectorXc phi = detail::complex_normal(rng, A.cols());
        d.min_a = std::min(d.min_a, phi.dot(A * phi).real() / phi.dot(gram * phi).real());
        const VectorXc xi = detail::complex_normal(rng, st.map.num_single());
        const VectorXc ex = E * xi;
        d.min_mix = std::min(d.min_mix, xi.dot(sys.matrix * xi).real() / ex.dot(gram * ex).real());
      }
      d.zeta = d.min_mix * std::norm(s) / s.real();
      const std::string tag = "s=" + format_complex(s) + ", level " + std::to_string(level);
      r.check("min Re A quotient (" + tag + ")", d.min_a, Relation::AtLeast, 0.0);
      r.check("min Re a_mix quotient (" + tag + ")", d.min_mix, Relation::AtLeast, 0.0);
      r.info("zeta estimate (" + tag + ")", d.zeta);
      row.push_back(d);
    }
    all.push_back(row);
  }
  for (std::size_t l = 1; l < all.size(); ++l)
    for (std::size_t k = 0; k < p.frequencies.size(); ++k) {
      const double ratio = all[l - 1][k].zeta / all[l][k].zeta;
      const std::string tag = "zeta ratio level " + std::to_string(p.levels[l - 1]) + "/" +
                              std::to_string(p.levels[l]) + " (s=" + format_complex(p.frequencies[k]) + ")";
      r.check(tag + " upper", ratio, Relation::AtMost, p.max_drop);
      r.check(tag + " lower", ratio, Relation::AtLeast, 1.0 / p.max_drop);
    }
  r.seconds = clock.seconds();
  return r;
}

// ---------------------------------------------------------------------------------------
// continuity

struct ContinuityParams {
  int level = 3;
  std::vector<Complex> frequencies{{1.0, 0.0}, {2.0, 0.0}, {4.0, 0.0}, {8.0, 0.0}};
  double slack = 0.3;
};

inline ProbeReport probe_continuity(const ContinuityParams& p = {}) {
  detail::Stopwatch clock;
  if (p.frequencies.size() < 4) throw ConfigError("continuity probe needs >= 4 frequencies");
  ProbeReport r;
  r.probe = "continuity";
  r.parameters["level"] = p.level;
  r.parameters["s"] = detail::complex_list(p.frequencies);
  r.parameters["slack"] = p.slack;
  const TransmissionSetup st = make_setup(make_split_ball(p.level, kBandD, kBandN), MaterialParams{});
  const NormSet norms = make_norm_set(st.skeleton);
  const SurfaceNorms& n1 = norms.surfaces[0];
  const MatrixXr gram = norms.multi_gram(st.skeleton.layout);
  const Eigen::LLT<MatrixXr> multi(gram);
  const MatrixXr Ed = st.map.dense();
  const Eigen::LLT<MatrixXr> single(Ed.transpose() * gram * Ed);
  if (multi.info() != Eigen::Success || single.info() != Eigen::Success)
    throw NumericalError("trace-space Gram matrices are not positive definite");
  const std::vector<std::string> names{"sV", "K", "K'", "W/s", "A", "a_mix"};
  const std::vector<double> bounds{1.0, 1.5, 1.5, 1.0, 2.0, 2.0};
  std::vector<std::vector<double>> norm_values(names.size());
  std::vector<double> mods;
  Json table = Json::array();
  for (Complex s : p.frequencies) {
    const TransmissionSystem sys = assemble_system(s, st, false);
    const OperatorSet& o = sys.calderon.ops[0];
    const std::vector<double> v{operator_norm(s * o.V, n1.minus_half_llt, n1.minus_half_llt),
                                operator_norm(o.K, n1.minus_half_llt, n1.half_llt),
                                operator_norm(o.Kp(), n1.half_llt, n1.minus_half_llt),
                                operator_norm(o.W / s, n1.half_llt, n1.half_llt),
                                operator_norm(sys.calderon.galerkin(0.0), multi, multi),
                                operator_norm(sys.matrix, single, single)};
    Json row;
    row["s"] = format_complex(s);
    for (std::size_t k = 0; k < names.size(); ++k) {
      norm_values[k].push_back(v[k]);
      row[names[k]] = v[k];
    }
    table.push_back(row);
    mods.push_back(std::abs(s));
  }
  r.data["norms"] = table;
  for (std::size_t k = 0; k < names.size(); ++k)
    r.check("growth exponent of " + names[k], detail::loglog_slope(mods, norm_values[k]), Relation::AtMost,
            bounds[k] + p.slack);
  r.seconds = clock.seconds();
  return r;
}

// ---------------------------------------------------------------------------------------
// dissipativity

struct DissipativityParams {
  int level = 2;
  std::vector<Complex> frequencies{{1.0, 0.0}, {1.0, 2.0}, {1.0, -2.0}, {5.0, 0.0}};
  int samples = 100;
  std::uint64_t seed = 7;
  double tolerance = 1e-12;
  MaterialParams mat{1.0, 1.5, 1.0, 0.5};
};

inline ProbeReport probe_dissipativity(const DissipativityParams& p = {}) {
  detail::Stopwatch clock;
  ProbeReport r;
  r.probe = "dissipativity";
  r.parameters["level"] = p.level;
  r.parameters["s"] = detail::complex_list(p.frequencies);
  r.parameters["samples"] = p.samples;
  r.parameters["seed"] = p.seed;
  const Skeleton sk = make_skeleton(make_split_ball(p.level, kBandD, kBandN));
  const ImpedanceOperator T = impedance_default(sk, p.mat);
  const DissipativityReport d = probe_dissipativity(T, sk, p.frequencies, p.samples, p.seed, &p.mat);
  r.check("max Re<T phi, conj phi>/|phi|^2", d.max_quotient, Relation::AtMost, p.tolerance);
  r.check("max relative defect vs -a p |phi|^2", d.max_default_defect, Relation::AtMost, p.tolerance);
  r.check("max |T(conj s) - conj T(s)|", d.conjugation_defect, Relation::AtMost, p.tolerance);
  r.info("samples", d.samples);
  r.seconds = clock.seconds();
  return r;
}

// ---------------------------------------------------------------------------------------
// fictitious interface

struct FictitiousParams {
  int level = 3;
  Complex s{1.0, 2.0};
  double a = 1.5, p = 0.8;
  Vec3 y0{0.0, 0.0, 2.0};
  double tolerance = 1e-6;
  double continuity_tolerance = 0.05;
};

/// Traces of a two-subdomain solve restricted to ∂Ω, compared with a one-subdomain solve
/// on the same ∂Ω triangles. Returns ‖u₂ − u₁‖/‖u₁‖ over Dirichlet and Neumann values.
inline double fictitious_trace_difference(const TransmissionSetup& split, const LaplaceSolveResult& r2,
                                          const TransmissionSetup& fused, const LaplaceSolveResult& r1) {
  const SurfaceMesh& ball = split.skeleton.mesh;
  const SurfaceMesh& one = fused.skeleton.mesh;
  const SubdomainSurface& s1 = fused.skeleton.surface(1);
  double num = 0.0, den = 0.0;
  int f = 0;
  for (int t = 0; t < ball.num_triangles(); ++t) {
    if (ball.parts[t] == Part::J) continue;
    const int j = ball.membership[t] == Membership::Two ? 2 : 1;
    const SubdomainSurface& s2 = split.skeleton.surface(j);
    const Complex a = r2.traces.neumann(j)(s2.local_of_triangle.at(t));
    const Complex b = r1.traces.neumann(1)(s1.local_of_triangle.at(f));
    num += ball.area(t) * std::norm(a - b);
    den += ball.area(t) * std::norm(b);
    for (int k = 0; k < 3; ++k) {
      const Complex da = r2.traces.dirichlet(j)(s2.local_of_global.at(ball.triangles[t][k]));
      const Complex db = r1.traces.dirichlet(1)(s1.local_of_global.at(one.triangles[f][k]));
      num += ball.area(t) / 3.0 * std::norm(da - db);
      den += ball.area(t) / 3.0 * std::norm(db);
    }
    ++f;
  }
  return std::sqrt(num / den);
}

inline ProbeReport probe_fictitious(const FictitiousParams& p = {}) {
  detail::Stopwatch clock;
  ProbeReport r;
  r.probe = "fictitious";
  r.parameters["level"] = p.level;
  r.parameters["s"] = format_complex(p.s);
  r.parameters["a"] = p.a;
  r.parameters["p"] = p.p;
  const MaterialParams mat = MaterialParams::uniform(p.a, p.p);
  const SurfaceMesh ball = make_split_ball(p.level, kBandD, kBandN);
  const TransmissionSetup split = make_setup(ball, mat);
  const TransmissionSetup fused = make_setup(fuse_subdomains(ball), mat);
  PointSource src;
  src.y0 = p.y0;
  OffsetOptions opt;
  opt.check_compatibility = false;
  const LaplaceSolveResult r2 = solve_frequency(p.s, split, point_source_data(p.s, split, src), opt);
  const LaplaceSolveResult r1 = solve_frequency(p.s, fused, point_source_data(p.s, fused, src), opt);
  r.check("relative trace difference split vs single domain",
          fictitious_trace_difference(split, r2, fused, r1), Relation::AtMost, p.tolerance);
  r.info("single-domain trace error vs projected exact traces",
         trace_l2_difference(fused.skeleton, r1.traces, point_source_traces(p.s, fused.skeleton, mat, src)));

  // reconstruct on each side of Γ_J at mirrored points and extrapolate to the disk
  const double delta = 0.1;
  std::vector<Vec3> up, down;
  for (double rad : {0.2, 0.45})
    for (int k = 0; k < 4; ++k) {
      const double ang = 0.3 + k * kPi / 2.0;
      up.emplace_back(rad * std::cos(ang), rad * std::sin(ang), delta);
      down.emplace_back(rad * std::cos(ang), rad * std::sin(ang), -delta);
    }
  const auto u1 = represent_samples(1, p.s, split.skeleton, mat, r2.traces, up);
  const auto u2 = represent_samples(2, p.s, split.skeleton, mat, r2.traces, down);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < up.size(); ++i) {
    const Complex top = u1[i].value - delta * u1[i].gradient.z();
    const Complex bottom = u2[i].value + delta * u2[i].gradient.z();
    num += std::norm(top - bottom);
    den += std::norm(0.5 * (top + bottom));
  }
  r.check("interface mismatch of the two representations", std::sqrt(num / den), Relation::AtMost,
          p.continuity_tolerance);
  r.seconds = clock.seconds();
  return r;
}

// ---------------------------------------------------------------------------------------
// manufactured frequency solve

struct ManufacturedParams {
  std::vector<int> levels{2, 3};
  Complex s{1.0, 2.0};
  double a = 1.5, p = 0.8;
  Vec3 y0{0.0, 0.0, 2.0};
  double tolerance = 0.05;
  std::vector<int> icosphere_levels{1, 2, 3};  // sound-soft convergence study; empty skips it
};

inline ProbeReport probe_manufactured(const ManufacturedParams& p = {}) {
  detail::Stopwatch clock;
  if (p.levels.empty()) throw ConfigError("manufactured probe needs at least one level");
  if (!p.icosphere_levels.empty() && p.icosphere_levels.size() < 3)
    throw ConfigError("convergence study needs >= 3 levels");
  ProbeReport r;
  r.probe = "manufactured";
  r.parameters["levels"] = p.levels;
  r.parameters["icosphere_levels"] = p.icosphere_levels;
  r.parameters["s"] = format_complex(p.s);
  r.parameters["a"] = p.a;
  r.parameters["p"] = p.p;
  r.parameters["bands"] = {kBandD, kBandN};
  const MaterialParams mat = MaterialParams::uniform(p.a, p.p);
  PointSource src;
  src.y0 = p.y0;
  OffsetOptions opt;
  opt.check_compatibility = false;
  std::vector<double> errs;
  for (int level : p.levels) {
    const TransmissionSetup st = make_setup(make_split_ball(level, kBandD, kBandN), mat);
    const LaplaceSolveResult sol = solve_frequency(p.s, st, point_source_data(p.s, st, src), opt);
    const MultiTraceVector exact = point_source_traces(p.s, st.skeleton, mat, src);
    errs.push_back(trace_l2_difference(st.skeleton, sol.traces, exact));
    const TraceErrors pw = point_source_errors(p.s, st.skeleton, mat, src, sol.traces);
    if (level != p.levels.back())
      r.info(detail::level_key("split_ball trace error vs projected exact", level), errs.back());
    r.info(detail::level_key("split_ball Dirichlet L2 error vs exact", level), pw.dirichlet);
    r.info(detail::level_key("split_ball Neumann L2 error vs exact", level), pw.neumann);
    r.info(detail::level_key("split_ball solve residual", level), sol.residual);
    if (level == p.levels.back()) {
      const std::vector<Vec3> pts{{0.0, 0.0, 0.5}, {0.3, 0.2, -0.4}, {-0.4, 0.1, 0.3}, {0.2, -0.5, -0.2}};
      const FieldValues fv = reconstruct_field(p.s, st.skeleton, mat, sol.traces, pts);
      double num = 0.0, den = 0.0;
      for (std::size_t i = 0; i < pts.size(); ++i) {
        const Complex ue = src.value(p.s, pts[i], mat.of(fv.subdomain[i]));
        num += std::norm(fv.values(static_cast<Eigen::Index>(i)) - ue);
        den += std::norm(ue);
      }
      r.check(detail::level_key("interior field error", level), std::sqrt(num / den), Relation::AtMost, p.tolerance);
    }
  }
  r.check(detail::level_key("split_ball trace error vs projected exact", p.levels.back()), errs.back(),
          Relation::AtMost, p.tolerance);
  for (std::size_t i = 1; i < errs.size(); ++i)
    r.check("split_ball error decrease level " + std::to_string(p.levels[i]), errs[i], Relation::AtMost, errs[i - 1]);

  std::vector<double> ico;
  for (int level : p.icosphere_levels) {
    const TransmissionSetup st = make_setup(make_icosphere(level), mat);
    const LaplaceSolveResult sol = solve_frequency(p.s, st, point_source_data(p.s, st, src), opt);
    ico.push_back(trace_l2_difference(st.skeleton, sol.traces, point_source_traces(p.s, st.skeleton, mat, src)));
    if (level != p.icosphere_levels.back())
      r.info(detail::level_key("icosphere trace error vs projected exact", level), ico.back());
    r.info(detail::level_key("icosphere Neumann L2 error vs exact", level),
           point_source_errors(p.s, st.skeleton, mat, src, sol.traces).neumann);
  }
  if (!ico.empty()) {
    r.check(detail::level_key("icosphere trace error vs projected exact", p.icosphere_levels.back()), ico.back(),
            Relation::AtMost, p.tolerance);
    for (std::size_t i = 1; i < ico.size(); ++i)
      r.check("icosphere error decrease level " + std::to_string(p.icosphere_levels[i]), ico[i], Relation::AtMost,
              ico[i - 1] * (1.0 - 1e-12));
  }
  r.seconds = clock.seconds();
  return r;
}

// ---------------------------------------------------------------------------------------
// convolution quadrature

struct CqProbeParams {
  int level = 2;
  double final_time = 4.0;
  double pulse_width = 3.0;
  Vec3 y0{0.0, 0.0, 2.0};
  std::vector<int> steps{32, 64, 128};
  int reference_factor = 4;
  int causality_steps = 32;
  int causality_onset = 10;
  int causality_window = 8;
  int symbol_steps = 32;
  double symbol_radius = 0.9;
  double sigma0 = 1.0;
  double symbol_tolerance = 1e-10;
  double causality_tolerance = 1e-8;
  double integral_tolerance = 1e-7;  // a few √ε, the contour error at the default radius
  double min_order = 1.8;
  double coercivity_floor = -1e-10;
};

struct CqSymbolErrors {
  double derivative = 0.0;   // F(s) = s, BDF1, against the backward difference
  double identity = 0.0;     // F(s) = 1, both schemes, against δ_{n0}
  double integral = 0.0;     // F(s) = 1/s, BDF1, against the left rectangle rule
};

inline CqSymbolErrors cq_symbol_errors(int steps, double radius, double dt = 0.1) {
  CqSymbolErrors e;
  const auto w = cq_weights(CqScheme::BDF1, [](Complex s) { return s; }, dt, steps, radius);
  for (int n = 0; n <= steps; ++n) {
    const double exact = n == 0 ? 1.0 / dt : (n == 1 ? -1.0 / dt : 0.0);
    e.derivative = std::max(e.derivative, std::abs(w[static_cast<std::size_t>(n)] - exact) * dt);
  }
  for (CqScheme sch : {CqScheme::BDF1, CqScheme::BDF2}) {
    const auto id = cq_weights(sch, [](Complex) { return Complex(1.0); }, dt, steps, radius);
    for (int n = 0; n <= steps; ++n)
      e.identity = std::max(e.identity, std::abs(id[static_cast<std::size_t>(n)] - (n == 0 ? 1.0 : 0.0)));
  }
  // 1/s is not a polynomial in ζ, so it gets the default aliasing-controlled radius
  const auto wi = cq_weights(CqScheme::BDF1, [](Complex s) { return 1.0 / s; }, dt, steps);
  std::vector<Complex> g(static_cast<std::size_t>(steps + 1));
  for (int n = 0; n <= steps; ++n) g[static_cast<std::size_t>(n)] = std::sin(n * dt) * std::sin(n * dt);
  const auto y = cq_apply(wi, g);
  double rect = 0.0, scale = 0.0;
  for (int n = 0; n <= steps; ++n) {
    rect += dt * g[static_cast<std::size_t>(n)].real();  // Σ_{k ≤ n} Δt g_k
    scale = std::max(scale, std::abs(rect));
    e.integral = std::max(e.integral, std::abs(y[static_cast<std::size_t>(n)] - rect));
  }
  e.integral /= scale;
  return e;
}

/// Sound-soft sphere hit by a retarded point-source pulse; returns the march result.
inline TimeMarchResult cq_pulse_run(const TransmissionSetup& st, const RetardedPointSource& src, double final_time,
                                    int steps) {
  const CqContour c(CqScheme::BDF2, final_time / steps, steps);
  TimeData td;
  td.g_dirichlet = [&](const Vec3& x, double t) { return src.value(x, t, st.mat.of(1)); };
  OffsetOptions opt;
  opt.check_compatibility = false;
  return cq_march(st, sample_time_data(st, td, c), c, opt);
}

inline ProbeReport probe_cq(const CqProbeParams& p = {}) {
  detail::Stopwatch clock;
  if (p.steps.size() < 3) throw ConfigError("CQ convergence study needs >= 3 step sizes");
  ProbeReport r;
  r.probe = "cq";
  r.parameters["level"] = p.level;
  r.parameters["scheme"] = "BDF2";
  r.parameters["final_time"] = p.final_time;
  r.parameters["pulse_width"] = p.pulse_width;
  r.parameters["steps"] = p.steps;
  r.parameters["reference_steps"] = p.steps.back() * p.reference_factor;
  r.parameters["sigma0"] = p.sigma0;

  const CqSymbolErrors sym = cq_symbol_errors(p.symbol_steps, p.symbol_radius);
  r.check("BDF1 weights of F(s)=s vs backward difference", sym.derivative, Relation::AtMost, p.symbol_tolerance);
  r.check("weights of F(s)=1 vs identity", sym.identity, Relation::AtMost, p.symbol_tolerance);
  r.check("BDF1 F(s)=1/s vs rectangle rule", sym.integral, Relation::AtMost, p.integral_tolerance);

  const TransmissionSetup st = make_setup(make_icosphere(p.level), MaterialParams{}, std::nullopt, {}, p.sigma0);

  // causality: polar-cap Dirichlet data switched on at t₀ = onset Δt
  {
    const double dt = p.final_time / p.causality_steps;
    const CqContour c(CqScheme::BDF2, dt, p.causality_steps);
    const Sin4Pulse f{p.causality_onset * dt, p.pulse_width};
    const PolarCap cap;
    TimeData td;
    td.g_dirichlet = [&](const Vec3& x, double t) { return cap(x) * f(t); };
    OffsetOptions opt;
    opt.check_compatibility = false;
    const TimeMarchResult m = cq_march(st, sample_time_data(st, td, c), c, opt);
    double peak = 0.0, early = 0.0;
    for (int n = 0; n < m.traces.cols(); ++n) {
      const double v = m.traces.col(n).norm();
      peak = std::max(peak, v);
      if (n < p.causality_window) early = std::max(early, v);
    }
    r.check("pre-onset trace norm / peak", early / peak, Relation::AtMost, p.causality_tolerance);
  }

  RetardedPointSource src;
  src.y0 = p.y0;
  src.pulse = Sin4Pulse{0.0, p.pulse_width};
  const int ref_steps = p.steps.back() * p.reference_factor;
  const TimeMarchResult ref = cq_pulse_run(st, src, p.final_time, ref_steps);
  std::vector<double> dts, errs;
  std::vector<MatrixXr> runs;
  Json table = Json::array();
  for (int n : p.steps) {
    if (ref_steps % n != 0) throw ConfigError("reference steps must be a multiple of every step count");
    const TimeMarchResult m = cq_pulse_run(st, src, p.final_time, n);
    const int stride = ref_steps / n;
    double num = 0.0, den = 0.0;
    for (int k = 0; k <= n; ++k) {
      num += (m.traces.col(k) - ref.traces.col(k * stride)).squaredNorm();
      den += ref.traces.col(k * stride).squaredNorm();
    }
    dts.push_back(p.final_time / n);
    errs.push_back(std::sqrt(num / den));
    const double tc = time_coercivity_sum(m, p.sigma0);
    table.push_back({{"steps", n}, {"dt", dts.back()}, {"error", errs.back()}, {"time_coercivity_sum", tc},
                     {"lambda", m.contour.lambda}, {"max_residual", m.max_residual}});
    r.info("error vs reference (N=" + std::to_string(n) + ")", errs.back());
    if (n == p.steps.back()) r.check("time-domain coercivity sum (N=" + std::to_string(n) + ")", tc, Relation::AtLeast, p.coercivity_floor);
    runs.push_back(m.traces);
  }
  r.data["runs"] = table;
  r.check("BDF2 fitted order", detail::loglog_slope(dts, errs), Relation::AtLeast, p.min_order);
  // plain self-convergence from successive differences, without the reference
  std::vector<double> diffs;
  for (std::size_t i = 0; i + 1 < runs.size(); ++i) {
    const int stride = p.steps[i + 1] / p.steps[i];
    double num = 0.0, den = 0.0;
    for (int k = 0; k <= p.steps[i]; ++k) {
      num += (runs[i].col(k) - runs[i + 1].col(k * stride)).squaredNorm();
      den += runs[i + 1].col(k * stride).squaredNorm();
    }
    diffs.push_back(std::sqrt(num / den));
  }
  r.info("successive-difference order", std::log2(diffs[diffs.size() - 2] / diffs.back()));
  r.seconds = clock.seconds();
  return r;
}

// ---------------------------------------------------------------------------------------
// suite

struct SuiteEntry {
  std::string name;
  std::string property;
};

/// One entry per verified property, in execution order.
inline const std::vector<SuiteEntry>& suite_manifest() {
  static const std::vector<SuiteEntry> m{
      {"mesh", "mesh validation: watertight, oriented, tagged, flipped winding rejected"},
      {"jumps", "jump relations of the single and double layer potentials"},
      {"newtonian", "Newtonian limits of V and K on the unit sphere"},
      {"calderon", "Calderon residual of point-source traces and its refinement ratio"},
      {"pairing", "equality of the Sigma pairing and the Gamma_I pairing on single traces"},
      {"coercivity", "positivity of Re A(s) and Re a_mix(s), refinement stability of zeta"},
      {"continuity", "|s| growth exponents of sV, K, K', W/s, A, a_mix"},
      {"dissipativity", "sign condition Re<T phi, conj phi> <= 0 of the default impedance"},
      {"fictitious", "invisibility of an interface between equal materials"},
      {"manufactured", "mixed point-source solve on the split ball, icosphere convergence study"},
      {"cq", "CQ weights, causality, BDF2 order and time-domain coercivity"},
  };
  return m;
}

/// Overrides for a probe run. `level` replaces the mesh level; probes that compare two
/// levels use (level, level + 1) for refinement checks and (level − 1, level) otherwise.
struct ProbeOptions {
  std::uint64_t seed_offset = 0;
  std::optional<int> level;
};

inline ProbeReport run_probe(const std::string& name, const ProbeOptions& o = {}) {
  if (o.level && (*o.level < 1 || *o.level > 5)) throw ConfigError("probe level must lie in 1..5");
  const auto lv = [&](int fallback) { return o.level.value_or(fallback); };
  if (name == "mesh") {
    MeshProbeParams p;
    p.level = lv(p.level);
    return probe_mesh(p);
  }
  if (name == "jumps") {
    JumpParams p;
    p.level = lv(p.level);
    p.seed += o.seed_offset;
    return probe_jumps(p);
  }
  if (name == "newtonian") {
    NewtonianParams p;
    p.level = lv(p.level);
    return probe_newtonian(p);
  }
  if (name == "calderon") {
    CalderonParams p;
    if (o.level) p.levels = {*o.level, *o.level + 1};
    return probe_calderon(p);
  }
  if (name == "pairing") {
    PairingParams p;
    p.level = lv(p.level);
    p.seed += o.seed_offset;
    return probe_pairing(p);
  }
  if (name == "coercivity") {
    CoercivityParams p;
    if (o.level) p.levels = {std::max(1, *o.level - 1), *o.level};
    p.seed += o.seed_offset;
    return probe_coercivity(p);
  }
  if (name == "continuity") {
    ContinuityParams p;
    p.level = lv(p.level);
    return probe_continuity(p);
  }
  if (name == "dissipativity") {
    DissipativityParams p;
    p.level = lv(p.level);
    p.seed += o.seed_offset;
    return probe_dissipativity(p);
  }
  if (name == "fictitious") {
    FictitiousParams p;
    p.level = lv(p.level);
    return probe_fictitious(p);
  }
  if (name == "manufactured") {
    ManufacturedParams p;
    if (o.level) p.levels = {std::max(1, *o.level - 1), *o.level};
    return probe_manufactured(p);
  }
  if (name == "cq") {
    CqProbeParams p;
    p.level = lv(p.level);
    return probe_cq(p);
  }
  throw ConfigError("unknown probe '" + name + "'");
}

}  // namespace tbem
