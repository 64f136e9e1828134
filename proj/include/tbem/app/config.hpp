#pragma once

#include "tbem/cq/march.hpp"
#include "tbem/cq/signals.hpp"
#include "tbem/mesh/generate.hpp"
#include "tbem/mesh/io.hpp"
#include "tbem/solver/manufactured.hpp"
#include "tbem/verify/report.hpp"

#include <fstream>
#include <regex>
#include <set>

namespace tbem {

/// Parses "2", "2+1i", "1-2i", "3i", "-i", "1e-6+2.5i".
inline Complex parse_complex(std::string text) {
  text.erase(std::remove_if(text.begin(), text.end(), [](unsigned char c) { return std::isspace(c); }), text.end());
  static const std::regex re(
      R"(^([+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)?(?:([+-])((?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)?[ij])?$)");
  static const std::regex pure(R"(^([+-]?)((?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)?[ij]$)");
  std::smatch m;
  if (std::regex_match(text, m, pure)) {
    const double v = m[2].matched ? std::stod(m[2].str()) : 1.0;
    return {0.0, m[1].str() == "-" ? -v : v};
  }
  if (!text.empty() && std::regex_match(text, m, re) && m[1].matched) {
    const double re_part = std::stod(m[1].str());
    double im = 0.0;
    if (m[2].matched) {
      im = m[3].matched ? std::stod(m[3].str()) : 1.0;
      if (m[2].str() == "-") im = -im;
    }
    return {re_part, im};
  }
  throw ConfigError("cannot parse complex number '" + text + "' (expected e.g. 2+1i)");
}

enum class DataKind { Zero, PointSource, PolarCap };

struct MeshSpec {
  std::string builtin = "icosphere";  // icosphere, split_ball; empty when `file` is set
  int level = 2;
  double theta_d = kPi / 3.0;
  double theta_n = 2.0 * kPi / 3.0;
  std::string file;
};

struct DataSpec {
  DataKind kind = DataKind::PointSource;
  Vec3 y0{0.0, 0.0, 2.0};
  double amplitude = 1.0;
  Sin4Pulse pulse{0.0, 3.0};
  double cap_angle = kPi / 3.0;
};

struct TimeSpec {
  CqScheme scheme = CqScheme::BDF2;
  double final_time = 4.0;
  int steps = 64;
  double contour_radius = 0.0;  // 0 selects the default
};

/// Everything a solve needs. Every field has a default; see README for the schema.
struct RunConfig {
  MeshSpec mesh;
  MaterialParams materials;
  DataSpec data;
  std::string impedance = "default";
  std::vector<Complex> frequencies{{1.0, 2.0}};
  TimeSpec time;
  double sigma0 = 1.0;
  std::vector<Vec3> probe_points;
  std::string output_dir = "tbem_out";
  std::string output_prefix = "run";
  std::uint64_t seed = 1;
  QuadratureOrders quadrature;
  bool check_offset_compatibility = true;
};

namespace detail {

inline void require_keys(const Json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ConfigError("'" + where + "' must be an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : obj.items())
    if (!ok.count(key)) throw ConfigError("unknown key '" + (where.empty() ? key : where + "." + key) + "'");
}

template <class T>
T field(const Json& obj, const char* key, const std::string& where, T fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError("field '" + (where.empty() ? std::string(key) : where + "." + key) + "' has the wrong type");
  }
}

inline Vec3 vec3_field(const Json& obj, const char* key, const std::string& where, const Vec3& fallback) {
  if (!obj.contains(key)) return fallback;
  const auto v = field<std::vector<double>>(obj, key, where, {});
  if (v.size() != 3) throw ConfigError("field '" + where + "." + key + "' must hold 3 numbers");
  return {v[0], v[1], v[2]};
}

inline Complex complex_value(const Json& j, const std::string& where) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_string()) return parse_complex(j.get<std::string>());
  throw ConfigError("field '" + where + "' must be a number or a string like \"2+1i\"");
}

}  // namespace detail

inline DataKind parse_data_kind(const std::string& s) {
  if (s == "point-source") return DataKind::PointSource;
  if (s == "polar-cap") return DataKind::PolarCap;
  if (s == "zero") return DataKind::Zero;
  throw ConfigError("unknown data kind '" + s + "' (expected point-source, polar-cap or zero)");
}

inline const char* to_string(DataKind k) {
  switch (k) {
    case DataKind::PointSource: return "point-source";
    case DataKind::PolarCap: return "polar-cap";
    case DataKind::Zero: return "zero";
  }
  return "?";
}

inline RunConfig parse_config(const Json& j) {
  using detail::field;
  RunConfig c;
  detail::require_keys(j, "", {"mesh", "materials", "data", "impedance", "frequencies", "time", "sigma0",
                               "probe_points", "output", "seed", "quadrature", "offset"});
  if (j.contains("mesh")) {
    const Json& m = j["mesh"];
    detail::require_keys(m, "mesh", {"builtin", "level", "theta_d", "theta_n", "file"});
    c.mesh.file = field<std::string>(m, "file", "mesh", "");
    c.mesh.builtin = field<std::string>(m, "builtin", "mesh", c.mesh.file.empty() ? "icosphere" : "");
    c.mesh.level = field<int>(m, "level", "mesh", c.mesh.level);
    c.mesh.theta_d = field<double>(m, "theta_d", "mesh", c.mesh.theta_d);
    c.mesh.theta_n = field<double>(m, "theta_n", "mesh", c.mesh.theta_n);
    if (!c.mesh.file.empty() && !c.mesh.builtin.empty()) throw ConfigError("mesh: give either 'builtin' or 'file'");
  }
  if (j.contains("materials")) {
    const Json& m = j["materials"];
    detail::require_keys(m, "materials", {"a1", "a2", "p1", "p2"});
    c.materials.a1 = field<double>(m, "a1", "materials", 1.0);
    c.materials.a2 = field<double>(m, "a2", "materials", 1.0);
    c.materials.p1 = field<double>(m, "p1", "materials", 1.0);
    c.materials.p2 = field<double>(m, "p2", "materials", 1.0);
    try {
      c.materials.validate();
    } catch (const Error& e) {
      throw ConfigError(std::string("materials: ") + e.what());
    }
  }
  if (j.contains("data")) {
    const Json& d = j["data"];
    detail::require_keys(d, "data", {"kind", "y0", "amplitude", "pulse", "cap_angle"});
    c.data.kind = parse_data_kind(field<std::string>(d, "kind", "data", "point-source"));
    c.data.y0 = detail::vec3_field(d, "y0", "data", c.data.y0);
    c.data.amplitude = field<double>(d, "amplitude", "data", 1.0);
    c.data.cap_angle = field<double>(d, "cap_angle", "data", c.data.cap_angle);
    if (d.contains("pulse")) {
      const Json& p = d["pulse"];
      detail::require_keys(p, "data.pulse", {"onset", "width"});
      c.data.pulse.onset = field<double>(p, "onset", "data.pulse", 0.0);
      c.data.pulse.width = field<double>(p, "width", "data.pulse", 3.0);
      if (!(c.data.pulse.width > 0.0)) throw ConfigError("data.pulse.width must be positive");
    }
  }
  c.impedance = field<std::string>(j, "impedance", "", c.impedance);
  if (c.impedance != "default" && c.impedance != "zero")
    throw ConfigError("unknown impedance '" + c.impedance + "' (expected default or zero)");
  if (j.contains("frequencies")) {
    c.frequencies.clear();
    const Json& f = j["frequencies"];
    if (!f.is_array()) throw ConfigError("field 'frequencies' must be an array");
    for (std::size_t i = 0; i < f.size(); ++i)
      c.frequencies.push_back(detail::complex_value(f[i], "frequencies[" + std::to_string(i) + "]"));
  }
  if (j.contains("time")) {
    const Json& t = j["time"];
    detail::require_keys(t, "time", {"scheme", "final_time", "steps", "contour_radius"});
    c.time.scheme = parse_scheme(field<std::string>(t, "scheme", "time", "BDF2"));
    c.time.final_time = field<double>(t, "final_time", "time", c.time.final_time);
    c.time.steps = field<int>(t, "steps", "time", c.time.steps);
    c.time.contour_radius = field<double>(t, "contour_radius", "time", 0.0);
    if (!(c.time.final_time > 0.0) || c.time.steps < 1) throw ConfigError("time: final_time and steps must be positive");
  }
  c.sigma0 = field<double>(j, "sigma0", "", c.sigma0);
  if (!(c.sigma0 > 0.0)) throw ConfigError("sigma0 must be positive");
  if (j.contains("probe_points")) {
    const auto pts = field<std::vector<std::vector<double>>>(j, "probe_points", "", {});
    for (const auto& p : pts) {
      if (p.size() != 3) throw ConfigError("each entry of 'probe_points' must hold 3 numbers");
      c.probe_points.emplace_back(p[0], p[1], p[2]);
    }
  }
  if (j.contains("output")) {
    const Json& o = j["output"];
    detail::require_keys(o, "output", {"dir", "prefix"});
    c.output_dir = field<std::string>(o, "dir", "output", c.output_dir);
    c.output_prefix = field<std::string>(o, "prefix", "output", c.output_prefix);
  }
  c.seed = field<std::uint64_t>(j, "seed", "", c.seed);
  if (j.contains("quadrature")) {
    const Json& q = j["quadrature"];
    detail::require_keys(q, "quadrature", {"singular", "far_degree", "mid_degree", "near_gauss", "far_ratio", "near_ratio"});
    c.quadrature.singular = field<int>(q, "singular", "quadrature", c.quadrature.singular);
    c.quadrature.far_degree = field<int>(q, "far_degree", "quadrature", c.quadrature.far_degree);
    c.quadrature.mid_degree = field<int>(q, "mid_degree", "quadrature", c.quadrature.mid_degree);
    c.quadrature.near_gauss = field<int>(q, "near_gauss", "quadrature", c.quadrature.near_gauss);
    c.quadrature.far_ratio = field<double>(q, "far_ratio", "quadrature", c.quadrature.far_ratio);
    c.quadrature.near_ratio = field<double>(q, "near_ratio", "quadrature", c.quadrature.near_ratio);
  }
  if (j.contains("offset")) {
    const Json& o = j["offset"];
    detail::require_keys(o, "offset", {"check_compatibility"});
    c.check_offset_compatibility = field<bool>(o, "check_compatibility", "offset", true);
  }
  return c;
}

inline RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return parse_config(j);
}

/// "icosphere:3" or "split_ball:2".
inline MeshSpec parse_builtin(const std::string& text) {
  MeshSpec m;
  const auto colon = text.find(':');
  m.builtin = text.substr(0, colon);
  if (colon != std::string::npos) {
    try {
      m.level = std::stoi(text.substr(colon + 1));
    } catch (const std::exception&) {
      throw ConfigError("bad builtin level in '" + text + "'");
    }
  }
  if (m.builtin != "icosphere" && m.builtin != "split_ball")
    throw ConfigError("unknown builtin geometry '" + m.builtin + "' (expected icosphere or split_ball)");
  return m;
}

inline SurfaceMesh build_mesh(const MeshSpec& m) {
  if (!m.file.empty()) return load_mesh(m.file);
  if (m.level < 0 || m.level > 7) throw ConfigError("mesh level must lie in 0..7");
  if (m.builtin == "icosphere") return make_icosphere(m.level);
  if (m.builtin == "split_ball") return make_split_ball(m.level, m.theta_d, m.theta_n);
  throw ConfigError("unknown builtin geometry '" + m.builtin + "'");
}

inline TransmissionSetup build_setup(const RunConfig& c) {
  SurfaceMesh mesh = build_mesh(c.mesh);
  const MeshReport rep = validate_mesh(mesh);
  if (!rep.ok()) throw ParseError("invalid mesh:\n" + rep.summary());
  for (const auto& w : rep.warnings) warn(w);
  const Skeleton probe_sk = make_skeleton(mesh);
  std::optional<ImpedanceOperator> imp;
  if (c.impedance == "zero") imp = impedance_zero(probe_sk);
  TransmissionSetup st = make_setup(std::move(mesh), c.materials, imp, c.quadrature, c.sigma0);
  require_dissipative(st.impedance, st.skeleton, {Complex(c.sigma0, 0.0), Complex(c.sigma0, 1.0)});
  return st;
}

/// Laplace-domain boundary data of the configured signal family at frequency s.
inline FrequencyData frequency_data(const RunConfig& c, const TransmissionSetup& st, Complex s) {
  switch (c.data.kind) {
    case DataKind::Zero: return zero_data(st.skeleton.mesh);
    case DataKind::PointSource: {
      PointSource src;
      src.y0 = c.data.y0;
      src.amplitude = c.data.amplitude;
      return point_source_data(s, st, src);
    }
    case DataKind::PolarCap: {
      const PolarCap cap{c.data.cap_angle};
      const Complex f = c.data.amplitude * c.data.pulse.laplace(s);
      FrequencyData d = zero_data(st.skeleton.mesh);
      const SurfaceMesh& mesh = st.skeleton.mesh;
      for (int v = 0; v < mesh.num_vertices(); ++v)
        if (st.classification.touches(v, Part::D)) d.g_dirichlet(v) = f * cap(mesh.vertices[v]);
      return d;
    }
  }
  throw ConfigError("unsupported data kind");
}

/// Time-domain boundary data of the configured signal family. The point source gives the
/// consistent data of u(x, t) = A f(t − p r/a)/(4π a² r) for the default impedance.
inline TimeData time_data(const RunConfig& c, const TransmissionSetup& st) {
  TimeData td;
  const double amp = c.data.amplitude;
  if (c.data.kind == DataKind::PointSource) {
    RetardedPointSource src;
    src.y0 = c.data.y0;
    src.pulse = c.data.pulse;
    const MaterialParams mat = st.mat;
    td.g_dirichlet = [=](const Vec3& x, double t) { return amp * src.value(x, t, mat.of(1)); };
    td.d_neumann = [=](const Vec3& x, const Vec3& n, double t, const Material& m) {
      return amp * src.conormal(x, n, t, m);
    };
    td.d_impedance = [=](const Vec3& x, const Vec3& n, double t, const Material& m) {
      return amp * (src.conormal(x, n, t, m) + m.a * m.p * src.rate(x, t, m));
    };
  } else if (c.data.kind == DataKind::PolarCap) {
    const PolarCap cap{c.data.cap_angle};
    const Sin4Pulse f = c.data.pulse;
    td.g_dirichlet = [=](const Vec3& x, double t) { return amp * cap(x) * f(t); };
  }
  return td;
}

}  // namespace tbem
