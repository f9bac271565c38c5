// Acceptance run: one line per criterion, then the individual checks.
// Exit status 1 when any criterion fails or exceeds its runtime budget.
#include <chrono>
#include <cstdio>
#include <functional>

#include "mtx/verify.hpp"

using namespace mtx;

namespace {

struct Criterion {
  int id;
  std::string title;
  double budget_seconds;
  std::function<std::vector<CheckGroup>(VerifyContext&)> run;
};

std::string fmt(double x) {
  char b[32];
  std::snprintf(b, sizeof b, "%.6g", x);
  return b;
}

}  // namespace

int main() {
  VerifyContext ctx;
  std::vector<Criterion> criteria{
      {1, "T_a isometry", 5, [](VerifyContext& c) { return std::vector{verify_isometry(c, 100, {0.25, 0.5, 0.75, 1.0})}; }},
      {2, "transformation identity", 10, [](VerifyContext& c) { return std::vector{verify_ta_identity(c, 50, {0.5, 1.0, 1.5})}; }},
      {3, "Moser limit", 30, [](VerifyContext& c) { return std::vector{verify_moser_limit(c, {0.5, 1.0, 1.5})}; }},
      {4, "strict gap on the ball", 600, [](VerifyContext& c) { return std::vector{verify_ball_gap(c, {0.0, 1.0}, 4096, 9)}; }},
      {5, "Green energy law", 120,
       [](VerifyContext& c) { return std::vector{verify_energy_law(c, {"disk", "square"}, {0.05, 0.1, 0.2})}; }},
      {6, "conformal incenter", 180,
       [](VerifyContext& c) {
         return std::vector{verify_incenter_disk(c, {0.0, 0.3, 0.5, 0.7}),
                            verify_nested_incenter(c, {"square", "l_hexagon"}, {0.5, 0.7})};
       }},
      {7, "mass law", 60, [](VerifyContext& c) { return std::vector{verify_mass_law(c)}; }},
      {8, "transport inequality", 300, [](VerifyContext& c) { return std::vector{verify_transport(c, {0.0, 1.0}, 20)}; }},
      {9, "weighted boundary bound", 120, [](VerifyContext& c) { return std::vector{verify_boundary_bound(c, {0.0, 1.0})}; }},
      {10, "concentration formula composition", 600,
       [](VerifyContext& c) {
         return std::vector{verify_composition(c, {1.0, 0.0}, true), verify_round_trip(c, 1.0), verify_round_trip(c, 0.0)};
       }},
      {11, "boundary degeneration", 120, [](VerifyContext& c) { return std::vector{verify_boundary_degeneration(c, {0.0, 1.0})}; }},
      {12, "Hardy-Littlewood small instances", 60, [](VerifyContext& c) { return std::vector{verify_hardy_littlewood(c, 7)}; }},
  };

  int failed = 0;
  for (const auto& cr : criteria) {
    auto t0 = std::chrono::steady_clock::now();
    std::vector<CheckGroup> groups;
    std::string error;
    try {
      groups = cr.run(ctx);
    } catch (const std::exception& e) {
      error = e.what();
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    bool ok = error.empty() && secs < cr.budget_seconds;
    int nchecks = 0, nfail = 0;
    for (const auto& g : groups) {
      ok = ok && g.pass();
      for (const auto& c : g.checks) {
        ++nchecks;
        nfail += !c.pass;
      }
    }
    failed += !ok;
    std::printf("%s criterion %2d %-36s %d/%d checks, %.1f s (budget %.0f s)\n", ok ? "PASS" : "FAIL", cr.id, cr.title.c_str(),
                nchecks - nfail, nchecks, secs, cr.budget_seconds);
    if (!error.empty()) std::printf("    error: %s\n", error.c_str());
    for (const auto& g : groups)
      for (const auto& c : g.checks)
        std::printf("    %-4s %-32s %s %s %s  %s\n", c.pass ? "ok" : "bad", c.id.c_str(), fmt(c.measured).c_str(), c.relation.c_str(),
                    fmt(c.allowed).c_str(), c.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
