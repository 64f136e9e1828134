#include "tbem/app/config.hpp"
#include "tbem/io/csv.hpp"
#include "tbem/verify/probes.hpp"

#include <gtest/gtest.h>

using namespace tbem;

namespace {

std::string config_error(const Json& j) {
  try {
    parse_config(j);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(ParseComplex, Forms) {
  EXPECT_EQ(parse_complex("2"), Complex(2.0, 0.0));
  EXPECT_EQ(parse_complex("2+1i"), Complex(2.0, 1.0));
  EXPECT_EQ(parse_complex("1-2i"), Complex(1.0, -2.0));
  EXPECT_EQ(parse_complex("3i"), Complex(0.0, 3.0));
  EXPECT_EQ(parse_complex("-i"), Complex(0.0, -1.0));
  EXPECT_EQ(parse_complex("1+i"), Complex(1.0, 1.0));
  EXPECT_EQ(parse_complex("1e-6+2.5i"), Complex(1e-6, 2.5));
  EXPECT_EQ(parse_complex(" 4 - 0.5j "), Complex(4.0, -0.5));
  EXPECT_EQ(parse_complex(".5"), Complex(0.5, 0.0));
}

TEST(ParseComplex, Rejects) {
  for (const char* bad : {"", "i2", "1+2", "abc", "1++2i", "2i+1", "1e+i"}) EXPECT_THROW(parse_complex(bad), ConfigError) << bad;
}

TEST(ParseComplex, RoundTripsFormatted) {
  for (Complex z : {Complex(2.0, 1.0), Complex(1.0, -2.0), Complex(0.25, 0.0), Complex(-3.5, 1e-3)})
    EXPECT_EQ(parse_complex(format_complex(z)), z);
}

TEST(Config, Defaults) {
  const RunConfig c = parse_config(Json::object());
  EXPECT_EQ(c.mesh.builtin, "icosphere");
  EXPECT_EQ(c.mesh.level, 2);
  EXPECT_EQ(c.impedance, "default");
  EXPECT_EQ(c.frequencies, (std::vector<Complex>{{1.0, 2.0}}));
  EXPECT_EQ(c.time.scheme, CqScheme::BDF2);
  EXPECT_EQ(c.data.kind, DataKind::PointSource);
  EXPECT_EQ(c.seed, 1u);
  EXPECT_TRUE(c.check_offset_compatibility);
}

TEST(Config, FullDocument) {
  const Json j = Json::parse(R"({
    "mesh": {"builtin": "split_ball", "level": 1},
    "materials": {"a1": 1.5, "a2": 1.0, "p1": 0.8, "p2": 1.2},
    "data": {"kind": "polar-cap", "cap_angle": 0.5, "pulse": {"onset": 0.2, "width": 2.0}},
    "impedance": "zero",
    "frequencies": [1, "2+1i", "3-0.5i"],
    "time": {"scheme": "BDF1", "final_time": 2.0, "steps": 16},
    "probe_points": [[0.1, 0.2, 0.3]],
    "output": {"dir": "out", "prefix": "x"},
    "seed": 42,
    "quadrature": {"singular": 6},
    "offset": {"check_compatibility": false}
  })");
  const RunConfig c = parse_config(j);
  EXPECT_EQ(c.mesh.builtin, "split_ball");
  EXPECT_EQ(c.mesh.level, 1);
  EXPECT_EQ(c.materials.a1, 1.5);
  EXPECT_EQ(c.materials.p2, 1.2);
  EXPECT_EQ(c.data.kind, DataKind::PolarCap);
  EXPECT_EQ(c.data.pulse.width, 2.0);
  EXPECT_EQ(c.impedance, "zero");
  EXPECT_EQ(c.frequencies, (std::vector<Complex>{{1.0, 0.0}, {2.0, 1.0}, {3.0, -0.5}}));
  EXPECT_EQ(c.time.scheme, CqScheme::BDF1);
  EXPECT_EQ(c.time.steps, 16);
  ASSERT_EQ(c.probe_points.size(), 1u);
  EXPECT_EQ(c.probe_points[0], Vec3(0.1, 0.2, 0.3));
  EXPECT_EQ(c.output_dir, "out");
  EXPECT_EQ(c.seed, 42u);
  EXPECT_EQ(c.quadrature.singular, 6);
  EXPECT_FALSE(c.check_offset_compatibility);
}

TEST(Config, UnknownKeyIsNamed) {
  EXPECT_NE(config_error(Json::parse(R"({"meshh": {}})")).find("'meshh'"), std::string::npos);
  EXPECT_NE(config_error(Json::parse(R"({"mesh": {"levle": 2}})")).find("'mesh.levle'"), std::string::npos);
  EXPECT_NE(config_error(Json::parse(R"({"data": {"pulse": {"onset": 0, "w": 1}}})")).find("'data.pulse.w'"),
            std::string::npos);
}

TEST(Config, RejectsBadValues) {
  for (const char* doc : {R"({"mesh": {"level": "two"}})", R"({"materials": {"a1": -1}})",
                          R"({"data": {"kind": "plane-wave"}})", R"({"impedance": "robin"})",
                          R"({"frequencies": "2+1i"})", R"({"frequencies": [true]})", R"({"time": {"steps": 0}})",
                          R"({"time": {"scheme": "BDF4"}})", R"({"sigma0": 0})", R"({"probe_points": [[1, 2]]})",
                          R"({"data": {"y0": [0, 0]}})", R"({"mesh": {"builtin": "icosphere", "file": "a.off"}})",
                          R"({"data": {"pulse": {"width": 0}}})"})
    EXPECT_FALSE(config_error(Json::parse(doc)).empty()) << doc;
}

TEST(Config, MissingFile) { EXPECT_THROW(load_config("/nonexistent/tbem.json"), ConfigError); }

TEST(Config, MalformedFile) {
  const auto path = std::filesystem::temp_directory_path() / "tbem_bad_config.json";
  std::ofstream(path) << "{\"mesh\": ";
  EXPECT_THROW(load_config(path), ConfigError);
  std::filesystem::remove(path);
}

TEST(Config, Builtin) {
  const MeshSpec a = parse_builtin("icosphere:3");
  EXPECT_EQ(a.builtin, "icosphere");
  EXPECT_EQ(a.level, 3);
  const MeshSpec b = parse_builtin("split_ball");
  EXPECT_EQ(b.builtin, "split_ball");
  EXPECT_EQ(b.level, 2);
  EXPECT_THROW(parse_builtin("torus:2"), ConfigError);
  EXPECT_THROW(parse_builtin("icosphere:x"), ConfigError);
  MeshSpec deep = a;
  deep.level = 9;
  EXPECT_THROW(build_mesh(deep), ConfigError);
}

TEST(Config, ZeroImpedanceSetup) {
  RunConfig c;
  c.mesh = parse_builtin("split_ball:0");
  c.impedance = "zero";
  const TransmissionSetup st = build_setup(c);
  for (const auto& m : st.impedance.at(1.0)) EXPECT_EQ(m.norm(), 0.0);
}

TEST(Csv, Quoting) {
  EXPECT_EQ(CsvWriter::quote("plain"), "plain");
  EXPECT_EQ(CsvWriter::quote("a,b"), "\"a,b\"");
  EXPECT_EQ(CsvWriter::quote("say \"hi\""), "\"say \"\"hi\"\"\"");
  EXPECT_EQ(CsvWriter::quote("two\nlines"), "\"two\nlines\"");
  EXPECT_EQ(CsvWriter::quote(""), "");
}

TEST(Csv, RoundTrip) {
  const auto path = std::filesystem::temp_directory_path() / "tbem_csv_test.csv";
  const std::vector<std::string> header{"s", "note, with comma", "q\"uote"};
  const std::vector<std::string> row{"2+1i", CsvWriter::num(0.1), ""};
  {
    CsvWriter w(path, header);
    w.row(row);
  }
  std::ifstream in(path, std::ios::binary);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line.back(), '\r');
  EXPECT_EQ(split_csv_record(line), header);
  std::getline(in, line);
  const auto back = split_csv_record(line);
  EXPECT_EQ(back, row);
  EXPECT_EQ(std::stod(back[1]), 0.1);
  std::filesystem::remove(path);
}

TEST(Csv, UnwritablePath) { EXPECT_THROW(CsvWriter("/nonexistent/dir/x.csv", {"a"}), Error); }

TEST(Suite, ManifestNamesRunnableProbes) {
  const auto& m = suite_manifest();
  EXPECT_EQ(m.size(), 11u);
  std::set<std::string> names;
  for (const auto& e : m) names.insert(e.name);
  EXPECT_EQ(names.size(), m.size());
  EXPECT_THROW(run_probe("nonsense"), ConfigError);
  ProbeOptions o;
  o.level = 0;
  EXPECT_THROW(run_probe("jumps", o), ConfigError);
}

TEST(Suite, ProbeArgumentChecks) {
  ContinuityParams c;
  c.frequencies = {1.0, 2.0, 4.0};
  EXPECT_THROW(probe_continuity(c), ConfigError);
  ManufacturedParams m;
  m.icosphere_levels = {1, 2};
  try {
    probe_manufactured(m);
    FAIL() << "two levels accepted";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("needs >= 3"), std::string::npos);
  }
  CqProbeParams q;
  q.steps = {16, 32};
  EXPECT_THROW(probe_cq(q), ConfigError);
}

TEST(Suite, DeterministicUnderSeed) {
  ProbeOptions o;
  o.level = 1;
  o.seed_offset = 3;
  const ProbeReport a = run_probe("dissipativity", o);
  const ProbeReport b = run_probe("dissipativity", o);
  EXPECT_EQ(a.to_json().dump(), b.to_json().dump());
  EXPECT_TRUE(a.passed());
  const Json j = suite_json("x", {a});
  EXPECT_EQ(j["schema_version"], kReportSchemaVersion);
  EXPECT_EQ(j["probes"].size(), 1u);
}

TEST(Report, Relations) {
  ProbeReport r;
  r.check("small", 0.5, Relation::AtMost, 1.0);
  r.check("large", 2.0, Relation::AtLeast, 1.0);
  r.info("count", 3);
  EXPECT_TRUE(r.passed());
  r.check("nan", std::nan(""), Relation::AtMost, 1.0);
  EXPECT_FALSE(r.passed());
  EXPECT_FALSE(r.find("nan")->passed);
  EXPECT_EQ(r.find("missing"), nullptr);
  EXPECT_TRUE(r.to_json()["metrics"][3]["value"].is_null());
}
