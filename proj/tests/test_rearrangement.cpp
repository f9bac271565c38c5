#include <algorithm>
#include <random>

#include "doctest.h"
#include "mtx/io.hpp"
#include "mtx/rearrangement.hpp"
#include "oracles.hpp"

using namespace mtx;

namespace {

MeshPtr square_mesh() {
  static MeshPtr m = std::make_shared<const DomainMesh>(reference_mesh("square"));
  return m;
}

MeshPtr disk_mesh() {
  static MeshPtr m = std::make_shared<const DomainMesh>(reference_mesh("disk"));
  return m;
}

// Two smooth bumps with a cutoff that vanishes on the square's boundary.
GridFunction random_bump(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> c(-0.6, 0.6), w(0.15, 0.5), h(0.2, 1.0);
  Point c0{c(rng), c(rng)}, c1{c(rng), c(rng)};
  double w0 = w(rng), w1 = w(rng), h0 = h(rng), h1 = h(rng);
  GridFunction u = interpolate(square_mesh(), [&](Point x) {
    double cut = (1 - x.x * x.x) * (1 - x.y * x.y);
    Point d0 = x - c0, d1 = x - c1;
    return cut * (h0 * std::exp(-dot(d0, d0) / (w0 * w0)) + h1 * std::exp(-dot(d1, d1) / (w1 * w1)));
  });
  double e = dirichlet_energy(u);
  for (double& v : u.values) v *= std::sqrt(0.8 / e);
  return u;
}

RadialProfile radial_tent(std::size_t n = 1000) {
  return RadialProfile::sample(radial_grid(n, GridKind::uniform), [](double r) { return 1.0 - std::abs(2.0 * r - 1.0); });
}

std::vector<Atom<long long>> atoms(const std::vector<long long>& v, const std::vector<long long>& m) {
  std::vector<Atom<long long>> a;
  for (std::size_t i = 0; i < v.size(); ++i) a.push_back({v[i], m[i]});
  return a;
}

}  // namespace

TEST_CASE("radial rearrangement of the tent") {
  RadialProfile u = radial_tent();
  RadialProfile s = rearrange_radial(u);
  CHECK(s.nonincreasing());
  CHECK(s(0.0) == doctest::Approx(1.0).epsilon(1e-12));
  // {u > t} = (t/2, 1 - t/2), so |{u > t}| = pi (1 - t) and u* = 1 - r^2
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    double t = (i + 0.5) / 1000.0;
    worst = std::max(worst, std::abs(superlevel_area(s, t) - kPi * (1.0 - t)));
  }
  CHECK(worst < 1e-10);
  for (double r : {0.1, 0.4, 0.7, 0.95}) CHECK(s(r) == doctest::Approx(1.0 - r * r).epsilon(1e-6));
  CHECK(s.max_value() == u.max_value());
  CHECK(s.min_value() >= 0.0);
}

TEST_CASE("radial rearrangement: fixed points, steps, errors") {
  RadialProfile dec = RadialProfile::sample(radial_grid(200), [](double r) { return 1.0 - r * r; });
  RadialProfile s = rearrange_radial(dec);
  CHECK(s.nodes() == dec.nodes());
  CHECK(s.values() == dec.values());

  // value 1 on r < 0.3, 2 on 0.3 < r < 0.6, near-vertical ramps between
  double d = 1e-7;
  RadialProfile step({0.0, 0.3, 0.3 + d, 0.6, 0.6 + d, 1.0}, {1.0, 1.0, 2.0, 2.0, 0.0, 0.0});
  RadialProfile st = rearrange_radial(step);
  double r2 = std::sqrt(0.6 * 0.6 - 0.3 * 0.3);  // disk with the area of the value-2 annulus
  CHECK(st(r2 - 1e-4) == doctest::Approx(2.0).epsilon(1e-3));
  CHECK(st(r2 + 1e-4) == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(st(0.6 - 1e-4) == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(st(0.6 + 1e-4) == doctest::Approx(0.0));

  RadialProfile neg({0.0, 0.5, 1.0}, {-1.0, 0.5, 0.0});
  CHECK_THROWS_AS(rearrange_radial(neg), std::invalid_argument);
}

TEST_CASE("radial rearrangement: idempotence and order preservation") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> p(0.1, 0.9), h(0.2, 1.0), s(0.2, 0.9);
  for (int i = 0; i < 20; ++i) {
    double c = p(rng), a = h(rng), k = s(rng);
    RadialProfile v = RadialProfile::sample(radial_grid(400, GridKind::uniform), [&](double r) {
      return a * std::max(0.0, 1.0 - 4.0 * (r - c) * (r - c)) * (1.0 - r);
    });
    RadialProfile u = v.scaled(k);
    RadialProfile vs = rearrange_radial(v), us = rearrange_radial(u);
    RadialProfile vss = rearrange_radial(vs);
    CHECK(vss.values() == vs.values());
    for (int j = 0; j <= 50; ++j) {
      double r = j / 50.0;
      CHECK(us(r) <= vs(r) + 1e-12);
    }
    for (int j = 0; j < 200; ++j) {
      double t = v.max_value() * (j + 0.5) / 200.0;
      CHECK(std::abs(superlevel_area(v, t) - superlevel_area(vs, t)) < 1e-9);
    }
  }
}

TEST_CASE("grid rearrangement of a radial tent on the disk") {
  GridFunction u = interpolate(disk_mesh(), [](Point x) { return std::max(0.0, 1.0 - norm(x)); });
  RadialProfile s = rearrange_grid(u);
  CHECK(s.outer_radius() == doctest::Approx(std::sqrt(disk_mesh()->area() / kPi)).epsilon(1e-12));
  double worst = 0.0;
  for (int j = 0; j <= 200; ++j) {
    double r = s.outer_radius() * j / 200.0;
    worst = std::max(worst, std::abs(s(r) - std::max(0.0, 1.0 - r)));
  }
  CHECK(worst < 0.02);
  CHECK(s.max_value() == doctest::Approx(u.max_value()).epsilon(1e-12));
  auto neg = u;
  neg.values[100] = -0.1;
  CHECK_THROWS_AS(rearrange_grid(neg), std::invalid_argument);
}

TEST_CASE("grid rearrangement: F and energy inequalities on random bumps") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> T(0.0, 1.0);
  for (int i = 0; i < 50; ++i) {
    GridFunction u = random_bump(rng);
    // the 1e-11 default is kept where distributions are compared
    RadialProfile s = rearrange_grid(u, i < 3 ? 1e-11 : 1e-9);
    for (double beta : {0.0, 1.0}) {
      Params p = Params::critical(beta);
      CHECK(eval_F_grid(p, u) <= eval_F_radial(p, s) * 1.01);
    }
    CHECK(dirichlet_energy(s) <= dirichlet_energy(u) * 1.02);
    double area = square_mesh()->area();
    for (int j = 0; j < (i < 3 ? 200 : 0); ++j) {
      double t = u.max_value() * T(rng);
      CHECK(std::abs(superlevel_area(u, t) - superlevel_area(s, t)) <= 1e-8 * area);
    }
    if (i < 5) {
      std::vector<double> v = u.values;
      std::nth_element(v.begin(), v.begin() + v.size() / 2, v.end());
      double med = std::max(v[v.size() / 2], 1e-3 * u.max_value());
      TailEnergies te = polya_szego_tail(u, med);
      CHECK(te.below_star <= te.below * 1.02);
      CHECK(te.above_star <= te.above * 1.02);
    }
  }
}

TEST_CASE("Polya-Szego tails") {
  RadialProfile dec = RadialProfile::sample(radial_grid(300), [](double r) { return 1.0 - r * r; });
  TailEnergies te = polya_szego_tail(dec, 0.4);
  CHECK(te.below_star == te.below);
  CHECK(te.above_star == te.above);
  CHECK(te.below + te.above == doctest::Approx(dirichlet_energy(dec)).epsilon(1e-12));

  RadialProfile u = radial_tent();
  TailEnergies top = polya_szego_tail(u, 2.0);
  CHECK(top.below == doctest::Approx(dirichlet_energy(u)).epsilon(1e-12));
  CHECK(top.below_star == doctest::Approx(dirichlet_energy(rearrange_radial(u))).epsilon(1e-9));
  CHECK(top.below_star <= top.below);
  CHECK_THROWS_AS(polya_szego_tail(u, 0.0), std::invalid_argument);
}

TEST_CASE("modified Hardy-Littlewood on small spaces") {
  std::vector<long long> one{1, 1};
  auto s = hardy_littlewood_mod<long long>(atoms({3, 1}, one), atoms({1, 2}, one), 0);
  CHECK(s.lhs == 5);
  CHECK(s.rhs == 7);
  auto d = hardy_littlewood_mod<long long>(atoms({5, 3, 1}, {1, 2, 1}), atoms({4, 2, 2}, {1, 2, 1}), 2);
  CHECK(d.lhs == d.rhs);
  CHECK_THROWS_AS(hardy_littlewood_mod<long long>(atoms({1, 2}, {1, 1}), atoms({1, 2}, {1, 2}), 0), std::invalid_argument);
  CHECK_THROWS_AS(hardy_littlewood_mod<long long>(atoms({1, 2}, {2, 1}), atoms({1, 2}, {1, 2}), 0), std::invalid_argument);

  // every permutation pair of a 6-point value set, every threshold
  std::vector<long long> f{0, 1, 2, 3, 4, 5}, m(6, 1);
  long long bad = 0;
  do {
    std::vector<long long> g{0, 1, 2, 3, 4, 5};
    do {
      for (long long a = 0; a <= 6; ++a) {
        auto r = hardy_littlewood_mod<long long>(atoms(f, m), atoms(g, m), a);
        bad += r.lhs > r.rhs;
      }
    } while (std::next_permutation(g.begin(), g.end()));
  } while (std::next_permutation(f.begin(), f.end()));
  CHECK(bad == 0);

  // varied masses, exhaustive on 3 atoms
  bad = 0;
  for (int fw = 0; fw < 64; ++fw)
    for (int gw = 0; gw < 64; ++gw)
      for (int mw = 0; mw < 27; ++mw) {
        std::vector<long long> fv, gv, mv;
        for (int i = 0; i < 3; ++i) {
          fv.push_back((fw >> (2 * i)) & 3);
          gv.push_back((gw >> (2 * i)) & 3);
          mv.push_back(1 + (mw / (i == 0 ? 1 : i == 1 ? 3 : 9)) % 3);
        }
        for (long long a = 0; a <= 4; ++a) {
          auto r = hardy_littlewood_mod<long long>(atoms(fv, mv), atoms(gv, mv), a);
          bad += r.lhs > r.rhs;
        }
      }
  CHECK(bad == 0);
}
