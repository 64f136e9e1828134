#include "tbem/tbem.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include <unistd.h>

namespace fs = std::filesystem;
using namespace tbem;

namespace {

struct CommonOptions {
  std::string config;
  std::string builtin;
  std::string mesh;
  std::string out;
  std::string prefix;
  double sigma0 = 0.0;
  bool zero_impedance = false;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("-c,--config", o.config, "JSON run configuration");
  cmd->add_option("--builtin", o.builtin, "builtin mesh, e.g. icosphere:3 or split_ball:2");
  cmd->add_option("--mesh", o.mesh, "mesh file (.off or .msh)");
  cmd->add_option("-o,--out", o.out, "output directory");
  cmd->add_option("--prefix", o.prefix, "output file prefix");
  cmd->add_option("--sigma0", o.sigma0, "abscissa sigma_0 of the admissible half-plane");
  cmd->add_flag("--zero-impedance", o.zero_impedance, "use T = 0 on Gamma_I");
}

RunConfig resolve(const CommonOptions& o) {
  RunConfig c = o.config.empty() ? RunConfig{} : load_config(o.config);
  if (!o.builtin.empty() && !o.mesh.empty()) throw ConfigError("give either --builtin or --mesh");
  if (!o.builtin.empty()) c.mesh = parse_builtin(o.builtin);
  if (!o.mesh.empty()) {
    c.mesh = MeshSpec{};
    c.mesh.builtin.clear();
    c.mesh.file = o.mesh;
  }
  if (!o.out.empty()) c.output_dir = o.out;
  if (!o.prefix.empty()) c.output_prefix = o.prefix;
  if (o.sigma0 != 0.0) {
    if (!(o.sigma0 > 0.0)) throw ConfigError("--sigma0 must be positive");
    c.sigma0 = o.sigma0;
  }
  if (o.zero_impedance) c.impedance = "zero";
  return c;
}

Json mesh_json(const SurfaceMesh& mesh) {
  Json j;
  j["vertices"] = mesh.num_vertices();
  j["triangles"] = mesh.num_triangles();
  j["subdomains"] = mesh.num_subdomains();
  j["h"] = mesh.mesh_size();
  j["area"] = mesh.total_area();
  Json parts;
  for (Part p : kAllParts) {
    int n = 0;
    for (Part q : mesh.parts) n += q == p;
    parts[std::string(1, part_char(p))] = {{"triangles", n}, {"area", mesh.part_area(p)}};
  }
  j["parts"] = parts;
  return j;
}

Json materials_json(const MaterialParams& m) { return {{"a1", m.a1}, {"a2", m.a2}, {"p1", m.p1}, {"p2", m.p2}}; }

fs::path output_path(const RunConfig& c, const std::string& suffix) {
  fs::create_directories(c.output_dir);
  return fs::path(c.output_dir) / (c.output_prefix + suffix);
}

void write_json(const fs::path& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

std::vector<std::string> trace_header() { return {"subdomain", "kind", "index", "global", "re", "im"}; }

// one row per coefficient: Dirichlet rows are P1 vertices, Neumann rows are P0 triangles
void write_trace_rows(CsvWriter& csv, const Skeleton& sk, const MultiTraceVector& t,
                      const std::vector<std::string>& lead = {}) {
  for (int j = 1; j <= sk.num_subdomains(); ++j) {
    const SubdomainSurface& surf = sk.surface(j);
    for (int l = 0; l < surf.num_vertices(); ++l) {
      auto row = lead;
      const Complex z = t.dirichlet(j)(l);
      row.insert(row.end(), {std::to_string(j), "D", std::to_string(l), std::to_string(surf.vertices[l]),
                             CsvWriter::num(z.real()), CsvWriter::num(z.imag())});
      csv.row(row);
    }
    for (int l = 0; l < surf.num_panels(); ++l) {
      auto row = lead;
      const Complex z = t.neumann(j)(l);
      row.insert(row.end(), {std::to_string(j), "N", std::to_string(l), std::to_string(surf.triangles[l]),
                             CsvWriter::num(z.real()), CsvWriter::num(z.imag())});
      csv.row(row);
    }
  }
}

int cmd_solve_frequency(const CommonOptions& o, const std::vector<std::string>& freqs, const std::string& manufactured) {
  RunConfig c = resolve(o);
  if (!freqs.empty()) {
    c.frequencies.clear();
    for (const auto& f : freqs) c.frequencies.push_back(parse_complex(f));
  }
  if (!manufactured.empty()) {
    c.data.kind = parse_data_kind(manufactured);
    if (c.data.kind == DataKind::PointSource) c.check_offset_compatibility = false;
  }
  const TransmissionSetup st = build_setup(c);
  const Skeleton& sk = st.skeleton;
  const bool exact = c.data.kind == DataKind::PointSource;
  if (exact && sk.num_subdomains() == 2 && (st.mat.a1 != st.mat.a2 || st.mat.p1 != st.mat.p2))
    warn("point-source data is a transmission solution only for equal materials; errors are not meaningful");

  CsvWriter traces(output_path(c, "_traces.csv"), [] {
    auto h = trace_header();
    h.insert(h.begin(), {"s_re", "s_im"});
    return h;
  }());
  std::unique_ptr<CsvWriter> errors;
  if (exact)
    errors = std::make_unique<CsvWriter>(output_path(c, "_errors.csv"),
                                         std::vector<std::string>{"s_re", "s_im", "dirichlet", "neumann", "combined"});
  std::unique_ptr<CsvWriter> probes;
  if (!c.probe_points.empty())
    probes = std::make_unique<CsvWriter>(output_path(c, "_probes.csv"),
                                         std::vector<std::string>{"s_re", "s_im", "point", "x", "y", "z", "subdomain",
                                                                  "re", "im"});

  PointSource src;
  src.y0 = c.data.y0;
  src.amplitude = c.data.amplitude;
  OffsetOptions opt;
  opt.check_compatibility = c.check_offset_compatibility;

  Json solves = Json::array();
  for (Complex s : c.frequencies) {
    const LaplaceSolveResult r = solve_frequency(s, st, frequency_data(c, st, s), opt);
    const std::vector<std::string> lead{CsvWriter::num(s.real()), CsvWriter::num(s.imag())};
    write_trace_rows(traces, sk, r.traces, lead);
    Json entry{{"s", format_complex(s)}, {"residual", r.residual}, {"rcond", r.rcond}};
    if (exact) {
      const TraceErrors e = point_source_errors(s, sk, st.mat, src, r.traces);
      const double proj = trace_l2_difference(sk, r.traces, point_source_traces(s, sk, st.mat, src));
      errors->row({lead[0], lead[1], CsvWriter::num(e.dirichlet), CsvWriter::num(e.neumann), CsvWriter::num(e.combined)});
      entry["error"] = {{"dirichlet", e.dirichlet}, {"neumann", e.neumann}, {"combined", e.combined},
                        {"vs_projection", proj}};
      std::cout << "s = " << format_complex(s) << ": relative L2 error D " << e.dirichlet << ", N " << e.neumann
                << ", vs projected traces " << proj << '\n';
    } else {
      std::cout << "s = " << format_complex(s) << ": solved, residual " << r.residual << '\n';
    }
    if (probes) {
      const FieldValues f = reconstruct_field(s, sk, st.mat, r.traces, c.probe_points);
      for (std::size_t i = 0; i < c.probe_points.size(); ++i) {
        const Vec3& x = c.probe_points[i];
        const Complex u = f.values(static_cast<Eigen::Index>(i));
        probes->row({lead[0], lead[1], std::to_string(i), CsvWriter::num(x.x()), CsvWriter::num(x.y()),
                     CsvWriter::num(x.z()), std::to_string(f.subdomain[i]), CsvWriter::num(u.real()),
                     CsvWriter::num(u.imag())});
      }
    }
    solves.push_back(entry);
  }

  Json meta;
  meta["schema"] = "tbem.frequency_run";
  meta["schema_version"] = kReportSchemaVersion;
  meta["mesh"] = mesh_json(sk.mesh);
  meta["materials"] = materials_json(st.mat);
  meta["data"] = to_string(c.data.kind);
  meta["impedance"] = c.impedance;
  meta["sigma0"] = c.sigma0;
  meta["single_trace_dofs"] = st.map.num_single();
  meta["solves"] = solves;
  write_json(output_path(c, "_frequency.json"), meta);
  return 0;
}

int cmd_solve_time(const CommonOptions& o, const std::string& scheme, int steps, double final_time, double radius) {
  RunConfig c = resolve(o);
  if (!scheme.empty()) c.time.scheme = parse_scheme(scheme);
  if (steps > 0) c.time.steps = steps;
  if (final_time > 0.0) c.time.final_time = final_time;
  if (radius > 0.0) c.time.contour_radius = radius;
  if (c.data.kind == DataKind::PointSource) c.check_offset_compatibility = false;
  const TransmissionSetup st = build_setup(c);
  const Skeleton& sk = st.skeleton;

  const CqContour contour(c.time.scheme, c.time.final_time / c.time.steps, c.time.steps, c.time.contour_radius);
  OffsetOptions opt;
  opt.check_compatibility = c.check_offset_compatibility;
  const TimeMarchResult r = cq_march(st, sample_time_data(st, time_data(c, st), contour), contour, opt,
                                     [tty = isatty(STDERR_FILENO) != 0](int done, int total) {
                                       if (!tty) return;
                                       std::cerr << "\rfrequency " << done << '/' << total << std::flush;
                                       if (done == total) std::cerr << '\n';
                                     });

  {
    CsvWriter csv(output_path(c, "_traces.csv"), [] {
      auto h = trace_header();
      h.insert(h.begin(), {"step", "t"});
      h.pop_back();
      h.back() = "value";
      return h;
    }());
    for (int n = 0; n < contour.points(); ++n) {
      const std::vector<std::string> lead{std::to_string(n), CsvWriter::num(contour.time(n))};
      const VectorXr col = r.traces.col(n);
      for (int j = 1; j <= sk.num_subdomains(); ++j) {
        const SubdomainSurface& surf = sk.surface(j);
        for (int l = 0; l < surf.num_vertices(); ++l)
          csv.row({lead[0], lead[1], std::to_string(j), "D", std::to_string(l), std::to_string(surf.vertices[l]),
                   CsvWriter::num(col(sk.layout.dirichlet_offset(j) + l))});
        for (int l = 0; l < surf.num_panels(); ++l)
          csv.row({lead[0], lead[1], std::to_string(j), "N", std::to_string(l), std::to_string(surf.triangles[l]),
                   CsvWriter::num(col(sk.layout.neumann_offset(j) + l))});
      }
    }
  }
  if (!c.probe_points.empty()) {
    const MatrixXr u = reconstruct_time(r, sk, st.mat, c.probe_points);
    CsvWriter csv(output_path(c, "_probes.csv"), {"step", "t", "point", "x", "y", "z", "value"});
    for (int n = 0; n < contour.points(); ++n)
      for (std::size_t i = 0; i < c.probe_points.size(); ++i) {
        const Vec3& x = c.probe_points[i];
        csv.row({std::to_string(n), CsvWriter::num(contour.time(n)), std::to_string(i), CsvWriter::num(x.x()),
                 CsvWriter::num(x.y()), CsvWriter::num(x.z()), CsvWriter::num(u(static_cast<Eigen::Index>(i), n))});
      }
  }

  double peak = 0.0;
  for (int n = 0; n < contour.points(); ++n) peak = std::max(peak, r.traces.col(n).norm());
  Json meta;
  meta["schema"] = "tbem.time_run";
  meta["schema_version"] = kReportSchemaVersion;
  meta["scheme"] = to_string(contour.scheme);
  meta["lambda"] = contour.lambda;
  meta["dt"] = contour.dt;
  meta["steps"] = contour.steps;
  meta["final_time"] = c.time.final_time;
  meta["sigma0"] = c.sigma0;
  meta["mesh"] = mesh_json(sk.mesh);
  meta["materials"] = materials_json(st.mat);
  meta["data"] = to_string(c.data.kind);
  meta["impedance"] = c.impedance;
  meta["max_residual"] = r.max_residual;
  meta["peak_trace_norm"] = peak;
  meta["coercivity_sum"] = time_coercivity_sum(r, c.sigma0);
  write_json(output_path(c, "_time.json"), meta);
  std::cout << to_string(contour.scheme) << ", N = " << contour.steps << ", dt = " << contour.dt
            << ", lambda = " << contour.lambda << ": peak trace norm " << peak << ", max residual " << r.max_residual
            << '\n';
  return 0;
}

int cmd_verify(const std::vector<std::string>& suite, std::optional<int> level, std::uint64_t seed,
               const std::string& json_path, bool list) {
  if (list) {
    for (const auto& e : suite_manifest()) std::cout << e.name << "  " << e.property << '\n';
    return 0;
  }
  std::vector<std::string> names;
  for (const auto& s : suite) {
    if (s == "all") {
      for (const auto& e : suite_manifest()) names.push_back(e.name);
      continue;
    }
    std::stringstream ss(s);
    for (std::string n; std::getline(ss, n, ',');)
      if (!n.empty()) names.push_back(n);
  }
  if (names.empty()) throw ConfigError("no probes selected (use --suite all or --list)");
  for (const auto& n : names) {
    bool known = false;
    for (const auto& e : suite_manifest()) known = known || e.name == n;
    if (!known) throw ConfigError("unknown probe '" + n + "'");
  }
  std::vector<ProbeReport> reports;
  ProbeOptions opt;
  opt.level = level;
  opt.seed_offset = seed;
  for (const auto& n : names) {
    reports.push_back(run_probe(n, opt));
    std::cout << reports.back().table() << std::flush;
  }
  const Json j = suite_json(names.size() == suite_manifest().size() ? "all" : "custom", reports);
  if (!json_path.empty()) write_json(json_path, j);
  bool ok = true;
  for (const auto& r : reports) ok = ok && r.passed();
  std::cout << (ok ? "all probes passed" : "some probes failed") << '\n';
  return ok ? 0 : static_cast<int>(ExitCode::ProbeFailure);
}

int cmd_mesh_info(const CommonOptions& o, const std::string& save) {
  const RunConfig c = resolve(o);
  const SurfaceMesh mesh = build_mesh(c.mesh);
  const MeshReport rep = validate_mesh(mesh);
  std::cout << mesh.num_vertices() << " vertices, " << mesh.num_triangles() << " triangles, " << mesh.num_subdomains()
            << " subdomain(s), h = " << mesh.mesh_size() << '\n';
  for (Part p : kAllParts) std::cout << "  area of " << part_char(p) << ": " << mesh.part_area(p) << '\n';
  std::cout << rep.summary();
  if (!save.empty()) save_mesh(save, mesh);
  return rep.ok() ? 0 : static_cast<int>(ExitCode::ConfigError);
}

int cmd_export(const CommonOptions& o, const std::string& s_text, bool system, bool constraints) {
  RunConfig c = resolve(o);
  const Complex s = s_text.empty() ? c.frequencies.front() : parse_complex(s_text);
  const TransmissionSetup st = build_setup(c);
  const Skeleton& sk = st.skeleton;
  for (int j = 1; j <= sk.num_subdomains(); ++j) {
    const OperatorSet ops = assemble_operators(sk.surface(j), s, st.mat.of(j), st.quadrature);
    const std::string g = "_gamma" + std::to_string(j) + "_";
    dump_matrix(output_path(c, g + "V.bin"), ops.V, OperatorTag::V, s);
    dump_matrix(output_path(c, g + "K.bin"), ops.K, OperatorTag::K, s);
    dump_matrix(output_path(c, g + "Kp.bin"), ops.Kp(), OperatorTag::Kp, s);
    dump_matrix(output_path(c, g + "W.bin"), ops.W, OperatorTag::W, s);
  }
  if (system) {
    const TransmissionSystem sys = assemble_system(s, st, false);
    dump_matrix(output_path(c, "_system.bin"), sys.matrix, OperatorTag::System, s);
  }
  if (constraints) export_constraint_map(output_path(c, "_constraints.mtx"), st.map);
  std::cout << "wrote operators at s = " << format_complex(s) << " to " << c.output_dir << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Boundary element solver for acoustic transmission problems with mixed boundary conditions"};
  app.require_subcommand(1);

  CommonOptions fo, to, mo, eo;
  std::vector<std::string> freqs;
  std::string manufactured;
  auto* freq = app.add_subcommand("solve-frequency", "solve the Laplace-domain problem at one or more s");
  add_common(freq, fo);
  freq->add_option("-s,--s", freqs, "complex frequency, e.g. 2+1i (repeatable)");
  freq->add_option("--manufactured", manufactured, "boundary data family: point-source, polar-cap or zero");

  std::string scheme;
  int steps = 0;
  double final_time = 0.0, radius = 0.0;
  auto* time = app.add_subcommand("solve-time", "march the time-domain problem by convolution quadrature");
  add_common(time, to);
  time->add_option("--scheme", scheme, "BDF1 or BDF2");
  time->add_option("--steps", steps, "number of time steps N");
  time->add_option("--final-time", final_time, "final time T");
  time->add_option("--contour-radius", radius, "CQ contour radius lambda in (0, 1)");

  std::vector<std::string> suite;
  std::optional<int> level;
  std::uint64_t seed = 0;
  std::string json_path;
  bool list = false;
  auto* verify = app.add_subcommand("verify", "run verification probes");
  verify->add_option("--suite", suite, "probe names, comma separated, or all")->default_str("all");
  verify->add_option("--level", level, "mesh level override");
  verify->add_option("--seed", seed, "seed offset for randomized probes");
  verify->add_option("--json", json_path, "write the suite report as JSON");
  verify->add_flag("--list", list, "list the suite manifest");

  std::string save;
  auto* info = app.add_subcommand("mesh-info", "validate a mesh and print statistics");
  add_common(info, mo);
  info->add_option("--save", save, "write the mesh (.off or .msh)");

  std::string export_s;
  bool export_system = false, export_constraints = false;
  auto* exp = app.add_subcommand("export", "dump Galerkin matrices and the single-trace constraint map");
  add_common(exp, eo);
  exp->add_option("-s,--s", export_s, "complex frequency");
  exp->add_flag("--system", export_system, "also dump the assembled single-trace system");
  exp->add_flag("--constraints", export_constraints, "write the constraint map as MatrixMarket");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : static_cast<int>(ExitCode::ConfigError);
  }

  warning_sink() = [](const std::string& msg) { std::cerr << "warning: " << msg << '\n'; };
  try {
    if (freq->parsed()) return cmd_solve_frequency(fo, freqs, manufactured);
    if (time->parsed()) return cmd_solve_time(to, scheme, steps, final_time, radius);
    if (verify->parsed()) return cmd_verify(suite.empty() ? std::vector<std::string>{"all"} : suite, level, seed,
                                            json_path, list);
    if (info->parsed()) return cmd_mesh_info(mo, save);
    if (exp->parsed()) return cmd_export(eo, export_s, export_system, export_constraints);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(ExitCode::NumericalFailure);
  }
  return 0;
}
