#include "tbem/verify/probes.hpp"

#include <cstdio>
#include <functional>
#include <iostream>
#include <map>

using namespace tbem;

namespace {

struct Criterion {
  int id;
  const char* title;
  const char* probe;
  double budget_seconds;  // 0 when the runtime is charged to another criterion
  std::function<bool(const std::string&)> selects;
};

bool all(const std::string&) { return true; }

bool starts_with(const std::string& s, const char* prefix) { return s.rfind(prefix, 0) == 0; }

}  // namespace

int main() {
  const char* const kTimeSum = "time-domain coercivity sum";
  const std::vector<Criterion> criteria{
      {1, "jump relations", "jumps", 120, all},
      {2, "Newtonian limits", "newtonian", 60, all},
      {3, "Calderon residual", "calderon", 180, all},
      {4, "coercivity", "coercivity", 180, all},
      {5, "continuity growth", "continuity", 240, all},
      {6, "dissipativity", "dissipativity", 10, all},
      {7, "pairing equivalence", "pairing", 30, all},
      {8, "fictitious interface", "fictitious", 120, all},
      {9, "manufactured mixed solve", "manufactured", 300,
       [](const std::string& m) { return starts_with(m, "split_ball") || starts_with(m, "interior field"); }},
      {10, "CQ correctness", "cq", 600, [&](const std::string& m) { return !starts_with(m, kTimeSum); }},
      {11, "time-domain coercivity", "cq", 0, [&](const std::string& m) { return starts_with(m, kTimeSum); }},
  };

  std::map<std::string, ProbeReport> reports;
  int failed = 0;
  for (const auto& c : criteria) {
    auto it = reports.find(c.probe);
    if (it == reports.end()) {
      try {
        it = reports.emplace(c.probe, run_probe(c.probe)).first;
      } catch (const Error& e) {
        std::printf("criterion %2d  FAIL  %-26s error: %s\n", c.id, c.title, e.what());
        ++failed;
        continue;
      }
    }
    const ProbeReport& r = it->second;
    bool ok = true;
    int checked = 0;
    std::string detail;
    for (const auto& m : r.metrics) {
      if (!c.selects(m.name) || m.relation == Relation::Info) continue;
      ++checked;
      ok = ok && m.passed;
      char line[256];
      std::snprintf(line, sizeof line, "    %-52s %12.4e %s %-10.3e %s\n", m.name.c_str(), m.value,
                    m.relation == Relation::AtMost ? "<=" : ">=", m.threshold, m.passed ? "ok" : "FAIL");
      detail += line;
    }
    if (checked == 0) ok = false;
    const bool in_time = c.budget_seconds == 0 || r.seconds <= c.budget_seconds;
    ok = ok && in_time;
    if (!ok) ++failed;
    char timing[64];
    if (c.budget_seconds > 0)
      std::snprintf(timing, sizeof timing, "%.1f s of %.0f s", r.seconds, c.budget_seconds);
    else
      std::snprintf(timing, sizeof timing, "timed with criterion %d", c.id - 1);
    std::printf("criterion %2d  %s  %-26s (%s)\n%s", c.id, ok ? "PASS" : "FAIL", c.title, timing, detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
