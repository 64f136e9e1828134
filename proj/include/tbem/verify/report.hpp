#pragma once

#include "tbem/core.hpp"

#include <json.hpp>

#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

namespace tbem {

using Json = nlohmann::ordered_json;

inline constexpr int kReportSchemaVersion = 1;

/// "1+2i" style text for a complex number, shortest round-trip digits.
inline std::string format_complex(Complex z) {
  auto num = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.15g", v);
    return std::string(buf);
  };
  if (z.imag() == 0.0) return num(z.real());
  std::string im = num(std::abs(z.imag()));
  return num(z.real()) + (z.imag() < 0 ? "-" : "+") + (im == "1" ? "" : im) + "i";
}

enum class Relation { AtMost, AtLeast, Info };

struct Metric {
  std::string name;
  double value = 0.0;
  Relation relation = Relation::Info;
  double threshold = 0.0;
  bool passed = true;
};

/// Outcome of one verification probe: parameters, measured quantities and pass/fail
/// per threshold. Timing is kept out of the JSON so reports are reproducible.
struct ProbeReport {
  std::string probe;
  Json parameters = Json::object();
  std::vector<Metric> metrics;
  Json data = Json::object();
  std::vector<std::string> notes;
  double seconds = 0.0;

  const Metric& check(const std::string& name, double value, Relation rel, double threshold) {
    Metric m{name, value, rel, threshold, true};
    if (rel == Relation::AtMost) m.passed = std::isfinite(value) && value <= threshold;
    if (rel == Relation::AtLeast) m.passed = std::isfinite(value) && value >= threshold;
    metrics.push_back(m);
    return metrics.back();
  }
  void info(const std::string& name, double value) { metrics.push_back({name, value, Relation::Info, 0.0, true}); }
  void note(std::string text) { notes.push_back(std::move(text)); }

  [[nodiscard]] const Metric* find(const std::string& name) const {
    for (const auto& m : metrics)
      if (m.name == name) return &m;
    return nullptr;
  }
  [[nodiscard]] bool passed() const {
    for (const auto& m : metrics)
      if (!m.passed) return false;
    return true;
  }

  [[nodiscard]] Json to_json() const {
    Json j;
    j["schema"] = "tbem.probe_report";
    j["schema_version"] = kReportSchemaVersion;
    j["probe"] = probe;
    j["passed"] = passed();
    j["parameters"] = parameters;
    Json ms = Json::array();
    for (const auto& m : metrics) {
      Json e;
      e["name"] = m.name;
      e["value"] = std::isfinite(m.value) ? Json(m.value) : Json(nullptr);
      if (m.relation != Relation::Info) {
        e["relation"] = m.relation == Relation::AtMost ? "<=" : ">=";
        e["threshold"] = m.threshold;
      }
      e["passed"] = m.passed;
      ms.push_back(e);
    }
    j["metrics"] = ms;
    if (!data.empty()) j["data"] = data;
    if (!notes.empty()) j["notes"] = notes;
    return j;
  }

  [[nodiscard]] std::string table() const {
    std::ostringstream out;
    out << "probe " << probe << ": " << (passed() ? "PASS" : "FAIL") << '\n';
    for (const auto& m : metrics) {
      char line[256];
      if (m.relation == Relation::Info)
        std::snprintf(line, sizeof line, "  %-52s %12.4e\n", m.name.c_str(), m.value);
      else
        std::snprintf(line, sizeof line, "  %-52s %12.4e %s %-10.3e %s\n", m.name.c_str(), m.value,
                      m.relation == Relation::AtMost ? "<=" : ">=", m.threshold, m.passed ? "ok" : "FAIL");
      out << line;
    }
    for (const auto& n : notes) out << "  note: " << n << '\n';
    return out.str();
  }
};

inline Json suite_json(const std::string& suite, const std::vector<ProbeReport>& reports) {
  Json j;
  j["schema"] = "tbem.suite_report";
  j["schema_version"] = kReportSchemaVersion;
  j["suite"] = suite;
  bool ok = true;
  Json arr = Json::array();
  for (const auto& r : reports) {
    ok = ok && r.passed();
    arr.push_back(r.to_json());
  }
  j["passed"] = ok;
  j["probes"] = arr;
  return j;
}

}  // namespace tbem
