#include "doctest.h"
#include "mtx/io.hpp"
#include "mtx/maximizer.hpp"
#include "mtx/rearrangement.hpp"

using namespace mtx;

namespace {

MeshPtr ref(const std::string& name) {
  static std::map<std::string, MeshPtr> cache;
  auto& m = cache[name];
  if (!m) m = std::make_shared<const DomainMesh>(reference_mesh(name));
  return m;
}

const GreensField& field(const std::string& name) {
  static std::map<std::string, GreensField> cache;
  auto it = cache.find(name);
  if (it == cache.end()) it = cache.emplace(name, solve_greens(ref(name), {0.0, 0.0})).first;
  return it->second;
}

const BallMaxResult& ball(double beta) {
  static std::map<double, BallMaxResult> cache;
  auto it = cache.find(beta);
  if (it == cache.end()) it = cache.emplace(beta, maximize_ball_radial(Params::critical(beta), 4096)).first;
  return it->second;
}

// (2 pi, 1) on the reference meshes, shared by the domain cases
const DomainMaxResult& domain(const std::string& name) {
  static std::map<std::string, DomainMaxResult> cache;
  auto it = cache.find(name);
  if (it == cache.end()) {
    DomainMaxOptions o;
    o.field = &field(name);
    it = cache.emplace(name, maximize_domain(Params::critical(1.0), ref(name), o)).first;
  }
  return it->second;
}

template <class R>
void check_result_invariants(const R& r, double recomputed) {
  CHECK(r.norm <= 1.0 + 1e-10);
  CHECK(std::abs(r.value - recomputed) <= 1e-10 * (1.0 + r.value));
  for (const auto& s : r.starts)
    if (!s.failed) CHECK(r.value >= s.initial_value);
  for (std::size_t i = 1; i < r.history.size(); ++i) CHECK(r.history[i] >= r.history[i - 1]);
  CHECK(r.restarts == static_cast<int>(r.starts.size()));
}

}  // namespace

TEST_CASE("ball maximizer at (4 pi, 0)") {
  const BallMaxResult& r = ball(0.0);
  check_result_invariants(r, eval_F_radial(Params::critical(0.0), r.argmax));
  CHECK(r.value > kPi * std::exp(1.0) + 1e-2);
  CHECK(r.value == doctest::Approx(10.6898871).epsilon(1e-7));
  CHECK(r.argmax.nonincreasing());
  CHECK(r.restarts >= 8);
  CHECK(r.converged);
  CHECK(r.stationarity <= 1e-6);
}

TEST_CASE("ball maximizer on the boundary line tracks J / a") {
  const BallMaxResult& r = ball(1.0);
  check_result_invariants(r, eval_F_radial(Params::critical(1.0), r.argmax));
  CHECK(r.value > 2.0 * kPi * std::exp(1.0));
  CHECK(r.value == doctest::Approx(21.3797522).epsilon(1e-7));
  // F = (1/a) J(T_a u) with the constants cancelling, so sup F = sup J / a
  CHECK(r.value == doctest::Approx(2.0 * ball(0.0).value).epsilon(1e-4));
}

TEST_CASE("rearrangement never lowers the ball objective along the ascent") {
  Params p = Params::critical(1.0);
  BallMaxOptions o;
  o.restarts = 2;
  int seen = 0, bad = 0;
  o.on_accept = [&](const RadialProfile& u, double) {
    ++seen;
    if (eval_F_radial(p, rearrange_radial(u)) < eval_F_radial(p, u) * (1.0 - 0.01)) ++bad;
  };
  BallMaxResult r = maximize_ball_radial(p, 1024, o);
  CHECK(seen > 10);
  CHECK(bad == 0);
  CHECK(r.norm <= 1.0 + 1e-10);
}

TEST_CASE("subcritical pair: converged and stable under n -> 2n") {
  Params p = Params::make(2.0 * kPi, 0.5);
  REQUIRE_FALSE(p.on_boundary);
  BallMaxResult a = maximize_ball_radial(p, 2048), b = maximize_ball_radial(p, 4096);
  CHECK(a.converged);
  CHECK(b.converged);
  CHECK(b.stationarity <= 1e-6);
  CHECK(std::abs(a.value - b.value) <= 1e-3 * b.value);
  check_result_invariants(b, eval_F_radial(p, b.argmax));
}

TEST_CASE("maximizing restarts do not concentrate") {
  const BallMaxResult& r = ball(1.0);
  REQUIRE(r.start_results.size() >= 4);
  ConcentrationReport c = concentration_report(r.start_results);
  CHECK_FALSE(c.concentrating);
  CHECK(c.verdict() == "not_concentrating");
}

TEST_CASE("ball gap reports") {
  GapReport g0 = gap_report_ball(Params::critical(0.0));
  CHECK(g0.f_delta_estimate == doctest::Approx(kPi * std::exp(1.0)).epsilon(1e-12));
  CHECK(g0.margin > 0.0);
  CHECK(g0.attained);
  CHECK(g0.margin == doctest::Approx(g0.f_sup_estimate - g0.f_delta_estimate).epsilon(1e-12));
  GapReport g1 = gap_report_ball(Params::critical(1.0));
  CHECK(g1.f_delta_estimate == doctest::Approx(2.0 * kPi * std::exp(1.0)).epsilon(1e-12));
  CHECK(g1.margin > 0.0);
  CHECK(g1.family_level == doctest::Approx(4.0 * kPi).epsilon(0.02));
  CHECK_FALSE(g1.family_name.empty());
  // with pole away from the origin there is no field at 0
  GreensField shifted = solve_greens(ref("disk"), {0.3, 0.0});
  CHECK_THROWS_AS(gap_report(Params::critical(1.0), shifted), std::invalid_argument);
}

TEST_CASE("domain maximizer on the disk matches the ball") {
  const DomainMaxResult& r = domain("disk");
  check_result_invariants(r, eval_F_grid(Params::critical(1.0), r.argmax));
  CHECK(std::abs(r.value - ball(1.0).value) <= 0.01 * ball(1.0).value);
}

TEST_CASE("domain maximizer on the square") {
  const DomainMaxResult& r = domain("square");
  check_result_invariants(r, eval_F_grid(Params::critical(1.0), r.argmax));
  CHECK(r.value >= field("square").incenter * ball(1.0).value * (1.0 - 0.005));
  CHECK(r.value >= domain("disk").value * (1.0 - 0.01));
  CHECK(r.warnings.empty());
}

TEST_CASE("domain maximizer origin checks") {
  DomainMaxOptions o;
  o.max_iter = 5;
  o.restarts = 1;
  o.ball_nodes = 256;
  o.ball_restarts = 1;
  DomainMaxResult r = maximize_domain(Params::critical(1.0), ref("rect_boundary_origin"), o);
  CHECK_FALSE(r.warnings.empty());
  MeshPtr away = std::make_shared<const DomainMesh>(ref("disk")->translated({3.0, 0.0}));
  CHECK_THROWS_AS(maximize_domain(Params::critical(1.0), away, o), std::invalid_argument);
  CHECK_NOTHROW(maximize_domain(Params::critical(0.0), away, o));
}
