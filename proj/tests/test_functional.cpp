#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>

#include "doctest.h"
#include "mtx/config.hpp"
#include "mtx/grid.hpp"
#include "mtx/io.hpp"
#include "mtx/quadrature.hpp"
#include "mtx/radial.hpp"
#include "mtx/transport.hpp"
#include "oracles.hpp"

using namespace mtx;

namespace {

MeshPtr share(DomainMesh m) { return std::make_shared<const DomainMesh>(std::move(m)); }

double rel(double x, double y) { return std::abs(x - y) / std::abs(y); }

RadialProfile tent(std::size_t n = 2000, GridKind kind = GridKind::uniform) {
  return RadialProfile::sample(radial_grid(n, kind), [](double r) { return 1.0 - r; });
}

RadialProfile random_profile(std::mt19937_64& rng, std::size_t n = 1024) {
  std::uniform_real_distribution<double> c(0.1, 1.0), q(0.5, 3.0);
  double c0 = c(rng), c1 = c(rng), q0 = q(rng), q1 = q(rng);
  auto u = RadialProfile::sample(radial_grid(n), [&](double r) { return c0 * (1 - std::pow(r, q0)) + c1 * (1 - std::pow(r, q1)); });
  return u.scaled(0.9 / std::sqrt(dirichlet_energy(u)));
}

}  // namespace

TEST_CASE("params admissibility") {
  Params p = Params::make(2.0 * kPi, 1.0);
  CHECK(p.on_boundary);
  CHECK(p.a() == 0.5);
  CHECK(Params::critical(0.0).alpha == doctest::Approx(4.0 * kPi));
  CHECK_FALSE(Params::make(kPi, 0.5).on_boundary);
  // inputs within a relative 1e-6 of the critical line are snapped onto it
  Params q = Params::make(6.2831853, 1.0);
  CHECK(q.on_boundary);
  CHECK(q.alpha == 2.0 * kPi);
  CHECK_THROWS_AS(Params::make(1.0, 2.0), std::invalid_argument);
  CHECK_THROWS_AS(Params::make(1.0, -0.1), std::invalid_argument);
  CHECK_THROWS_AS(Params::make(0.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(Params::make(3.0 * kPi, 1.0), std::invalid_argument);
  for (double beta : {0.0, 0.3, 1.0, 1.9}) {
    double a = Params::critical(beta).a();
    CHECK(a > 0.0);
    CHECK(a <= 1.0);
  }
}

TEST_CASE("radial profile invariants") {
  CHECK_THROWS_AS(RadialProfile({0.0, 0.5, 1.0}, {1.0, 0.5, 0.1}), std::invalid_argument);  // trace
  CHECK_THROWS_AS(RadialProfile({0.0, 0.5, 0.5, 1.0}, {1.0, 0.5, 0.2, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(RadialProfile({0.1, 0.5, 1.0}, {1.0, 0.5, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(RadialProfile({0.0, 1.0}, {1.0, 0.0}), std::invalid_argument);
  RadialProfile u({0.0, 0.5, 1.0}, {2.0, 1.0, 0.0});
  CHECK(u(0.25) == doctest::Approx(1.5));
  CHECK(u.max_value() == 2.0);
  CHECK(u.nonincreasing());
}

TEST_CASE("dirichlet energy of radial profiles") {
  CHECK(dirichlet_energy(tent()) == doctest::Approx(kPi).epsilon(1e-12));
  CHECK(dirichlet_energy(tent(64, GridKind::geometric)) == doctest::Approx(kPi).epsilon(1e-12));
  RadialProfile zero = RadialProfile::sample(radial_grid(100), [](double) { return 0.0; });
  CHECK(dirichlet_energy(zero) == 0.0);
  for (double eps : {0.5, 1e-2, 1e-6, std::exp(-40.0)}) CHECK(std::abs(dirichlet_energy(moser_profile(eps)) - 1.0) < 1e-10);
  // homogeneity
  RadialProfile u = tent(300, GridKind::geometric);
  CHECK(dirichlet_energy(u.scaled(3.0)) == doctest::Approx(9.0 * dirichlet_energy(u)).epsilon(1e-14));
  CHECK(dirichlet_energy_inside(u, 0.3) + dirichlet_energy_outside(u, 0.3) == doctest::Approx(dirichlet_energy(u)).epsilon(1e-13));
}

TEST_CASE("radial evaluation of F against the series oracle") {
  Params p = Params::make(2.0 * kPi, 1.0);
  double ref = 2.0 * kPi * oracle::gauss_moment(2.0 * kPi);
  CHECK(ref == doctest::Approx(292.1342737342765).epsilon(1e-13));
  for (GridKind kind : {GridKind::uniform, GridKind::geometric}) {
    // exact for piecewise-linear u = 1 - r, so only the quadrature error remains
    double f = eval_F_radial(p, tent(4096, kind));
    CHECK(rel(f, ref) < 1e-8);
  }
  // the origin cell carries r^{1-beta}; with beta = 1.5 the oracle is the
  // 1-D integral of 2 pi (e^{alpha (1-r)^2} - 1) r^{-1/2}
  Params q = Params::make(kPi, 1.5);
  double ref_q = oracle::integrate([](double s) {
    double r = s * s;  // r = s^2 removes the endpoint singularity
    return 2.0 * kPi * std::expm1(kPi * (1 - r) * (1 - r)) * 2.0;
  }, 0.0, 1.0);
  CHECK(rel(eval_F_radial(q, tent(4096, GridKind::geometric)), ref_q) < 1e-8);
}

TEST_CASE("radial F: trivial cases, weight consistency, monotonicity") {
  RadialProfile zero = RadialProfile::sample(radial_grid(100), [](double) { return 0.0; });
  for (double beta : {0.0, 0.5, 1.0, 1.5}) CHECK(eval_F_radial(Params::critical(beta), zero) == 0.0);
  CHECK_THROWS_AS(RadialQuadrature(radial_grid(10), 2.0), std::invalid_argument);

  std::mt19937_64 rng(7);
  for (int i = 0; i < 100; ++i) {
    RadialProfile u = random_profile(rng);
    double f = eval_F_radial(Params::make(4.0 * kPi, 0.0), u), j = eval_J_radial(u);
    CHECK(std::abs(f - j) <= 1e-12 * j);
  }
  std::uniform_real_distribution<double> s(0.3, 1.0);
  for (int i = 0; i < 20; ++i) {
    RadialProfile v = random_profile(rng);
    RadialProfile u = v.scaled(s(rng));
    for (double beta : {0.0, 1.0}) CHECK(eval_F_radial(Params::critical(beta), u) <= eval_F_radial(Params::critical(beta), v));
  }
  // plateau c on [0, rho] bounds J from below by the inner disk
  double c = 0.6, rho = 0.1;
  RadialProfile pl({0.0, rho, 1.0}, {c, c, 0.0});
  CHECK(eval_J_radial(pl) >= kPi * rho * rho * std::expm1(4.0 * kPi * c * c));
}

TEST_CASE("radial quadrature difference matches value differences") {
  auto nodes = radial_grid(512);
  RadialQuadrature q(nodes, 1.0);
  RadialProfile u = moser_profile(1e-3);
  std::vector<double> a(nodes.size()), b(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    a[i] = 0.9 * u(nodes[i]);
    b[i] = 0.9001 * u(nodes[i]);
  }
  double d = q.difference(2.0 * kPi, a, b);
  CHECK(d > 0.0);
  CHECK(d == doctest::Approx(q.value(2.0 * kPi, b) - q.value(2.0 * kPi, a)).epsilon(1e-6));
}

TEST_CASE("projection onto the unit Dirichlet ball") {
  RadialProfile u = tent(200);
  RadialProfile half = u.scaled(std::sqrt(0.25 / dirichlet_energy(u)));
  RadialProfile big = u.scaled(std::sqrt(4.0 / dirichlet_energy(u)));
  CHECK(project_to_unit_ball(half).values() == half.values());
  RadialProfile pb = project_to_unit_ball(big);
  CHECK(std::abs(dirichlet_energy(pb) - 1.0) < 1e-12);
  CHECK(project_to_unit_ball(pb).values() == pb.values());

  MeshPtr m = share(make_fan_mesh(square_polygon(1.0), {0.0, 0.0}, 12));
  GridFunction g = interpolate(m, [](Point x) { return (1 - x.x * x.x) * (1 - x.y * x.y); });
  GridFunction gb(m, g.values);
  for (double& v : gb.values) v *= 3.0;
  GridFunction pg = project_to_unit_ball(gb);
  CHECK(std::abs(dirichlet_energy(pg) - 1.0) < 1e-12);
  CHECK(project_to_unit_ball(pg).values == pg.values);
  CHECK(dirichlet_energy(gb) == doctest::Approx(9.0 * dirichlet_energy(g)).epsilon(1e-14));
}

TEST_CASE("quadrature rules") {
  const auto& gl = quad::gauss_legendre(6);
  for (int k = 0; k <= 11; ++k) {
    double s = 0.0;
    for (std::size_t i = 0; i < gl.x.size(); ++i) s += gl.w[i] * std::pow(gl.x[i], k);
    CHECK(s == doctest::Approx(1.0 / (k + 1)).epsilon(1e-14));
  }
  for (double gamma : {-0.5, 0.0, 0.5}) {
    const auto& gj = quad::gauss_jacobi(5, gamma);
    for (int k = 0; k <= 9; ++k) {
      double s = 0.0;
      for (std::size_t i = 0; i < gj.x.size(); ++i) s += gj.w[i] * std::pow(gj.x[i], k);
      CHECK(s == doctest::Approx(1.0 / (gamma + k + 1)).epsilon(1e-13));
    }
  }
  CHECK_THROWS_AS(quad::gauss_jacobi(4, -1.0), std::invalid_argument);
  // degree 5 on the reference triangle: int x^a y^b = a! b! / (a + b + 2)!, area 1/2
  const auto& tr = quad::dunavant5();
  auto fact = [](int n) { return std::tgamma(n + 1.0); };
  for (int a = 0; a <= 5; ++a)
    for (int b = 0; a + b <= 5; ++b) {
      double s = 0.0;
      for (std::size_t i = 0; i < tr.w.size(); ++i) s += 0.5 * tr.w[i] * std::pow(tr.bary[i][1], a) * std::pow(tr.bary[i][2], b);
      CHECK(s == doctest::Approx(fact(a) * fact(b) / fact(a + b + 2)).epsilon(1e-13));
    }
}

TEST_CASE("singular cell: polar rules against closed forms") {
  for (double delta : {0.1, 0.01})
    for (double beta : {0.5, 1.0, 1.5}) {
      double exact = 2.0 * kPi * std::pow(delta, 2.0 - beta) / (2.0 - beta);
      CHECK(rel(polar_disk_integral(delta, beta, [](Point) { return 1.0; }), exact) < 1e-10);
    }
  // right triangle with a vertex at 0: int |x|^-1 = log(1 + sqrt 2)
  double t = polar_triangle_integral({0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}, 1.0, [](Point) { return 1.0; });
  CHECK(rel(t, std::log(1.0 + std::sqrt(2.0))) < 1e-10);
  // origin strictly inside: sum over the three fans about 0
  Point a{-0.3, -0.2}, b{0.7, -0.1}, c{0.1, 0.6};
  double whole = polar_triangle_integral(a, b, c, 0.5, [](Point x) { return 1.0 + x.x * x.x; });
  double ref = 0.0;
  Point o{0.0, 0.0};
  for (auto [p, q] : {std::pair{a, b}, std::pair{b, c}, std::pair{c, a}})
    ref += polar_triangle_integral(o, p, q, 0.5, [](Point x) { return 1.0 + x.x * x.x; });
  CHECK(rel(whole, ref) < 1e-10);
}

TEST_CASE("grid evaluation of F on the square pyramid") {
  // fan mesh edges follow the diagonals, so the pyramid is exactly P1
  MeshPtr m = share(make_fan_mesh(square_polygon(1.0), {0.0, 0.0}, 40));
  GridFunction u = interpolate(m, [](Point x) { return 1.0 - std::max(std::abs(x.x), std::abs(x.y)); });
  // in polar form the double integral splits into 8 log(1 + sqrt 2) times a 1-D moment
  double ref = 8.0 * std::log(1.0 + std::sqrt(2.0)) * oracle::gauss_moment(2.0 * kPi);
  CHECK(ref == doctest::Approx(327.8329957110324).epsilon(1e-13));
  CHECK(rel(eval_F_grid(Params::make(2.0 * kPi, 1.0), u), ref) < 1e-4);
  GridFunction zero(m, std::vector<double>(m->num_vertices(), 0.0));
  CHECK(eval_F_grid(Params::make(2.0 * kPi, 1.0), zero) == 0.0);
  CHECK(eval_J_grid(zero) == 0.0);
  CHECK_THROWS_AS(GridQuadrature(*m, 2.0), std::invalid_argument);
}

TEST_CASE("grid evaluation against the radial evaluator on disk meshes") {
  auto v = RadialProfile::sample(radial_grid(4096), [](double r) { return 0.8 * (1.0 - r * r); });
  std::vector<double> errs;
  for (double h : {0.08, 0.04, 0.02}) {
    GradedMeshOptions o;
    o.h = h;
    MeshPtr m = share(make_disk_mesh(1.0, {0.0, 0.0}, {0.0, 0.0}, o));
    GridFunction u = interpolate(m, [&](Point x) { return v(std::min(1.0, norm(x))); });
    Params p = Params::make(2.0 * kPi, 1.0);
    errs.push_back(rel(eval_F_grid(p, u), eval_F_radial(p, v)));
    if (h == 0.02) {
      CHECK(errs.back() < 0.01);
      auto tentg = interpolate(m, [](Point x) { return std::max(0.0, 1.0 - norm(x)); });
      CHECK(rel(dirichlet_energy(tentg), kPi) < 0.01);
    }
  }
  CHECK(errs[1] < errs[0]);
  CHECK(errs[2] < errs[1]);
}

TEST_CASE("grid energy converges under refinement") {
  std::vector<double> errs;
  for (int levels : {8, 16, 32}) {
    MeshPtr m = share(make_fan_mesh(square_polygon(1.0), {0.0, 0.0}, levels));
    GridFunction u = interpolate(m, [](Point x) { return std::cos(kPi * x.x / 2) * std::cos(kPi * x.y / 2); });
    errs.push_back(std::abs(dirichlet_energy(u) - kPi * kPi / 2.0));
  }
  CHECK(errs[1] < errs[0]);
  CHECK(errs[2] < errs[1]);
}

TEST_CASE("mesh construction and invariants") {
  Polygon sq = square_polygon(1.0);
  CHECK(polygon_area(sq) == doctest::Approx(4.0));
  CHECK(point_in_polygon({0.0, 0.0}, sq) == 1);
  CHECK(point_in_polygon({1.0, 0.0}, sq) == 0);
  CHECK(point_in_polygon({2.0, 0.0}, sq) == -1);
  CHECK(polygon_area(l_hexagon_polygon()) == doctest::Approx(3.75));

  DomainMesh fan = make_fan_mesh(sq, {0.0, 0.0}, 4);
  CHECK(fan.origin_location() == OriginLocation::interior);
  CHECK(fan.area() == doctest::Approx(4.0));
  CHECK(fan.diameter() == doctest::Approx(2.0 * std::sqrt(2.0)));
  for (std::size_t t = 0; t < fan.num_triangles(); ++t) CHECK(fan.triangle_area(static_cast<int>(t)) > 0.0);
  for (int b : fan.boundary()) CHECK(fan.is_boundary(b));
  DomainMesh moved = fan.translated({3.0, 0.0});
  CHECK(moved.origin_location() == OriginLocation::exterior);
  CHECK(fan.translated({1.0, 0.0}).origin_location() == OriginLocation::boundary);

  // a clockwise triangle is rejected
  CHECK_THROWS_AS(DomainMesh({{0, 0}, {1, 0}, {0, 1}}, {{0, 2, 1}}, {0, 1, 2}), std::invalid_argument);
  CHECK_THROWS_AS(DomainMesh({{0, 0}, {1, 0}, {0, 1}}, {{0, 1, 2}}, {0, 2}), std::invalid_argument);
  DomainMesh tri({{0, 0}, {1, 0}, {0, 1}}, {{0, 1, 2}}, {0, 1, 2});
  CHECK(tri.origin_location() == OriginLocation::boundary);

  DomainMesh graded = make_pole_mesh(l_hexagon_polygon(), {0.0, 0.0});
  CHECK(graded.origin_location() == OriginLocation::interior);
  CHECK(graded.area() == doctest::Approx(3.75).epsilon(1e-12));
  CHECK(graded.locate({0.0, 0.0}) >= 0);
  CHECK(graded.locate({0.75, 0.75}) == -1);
  CHECK_THROWS_AS(make_pole_mesh(sq, {2.0, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(make_disk_mesh(1.0, {0.0, 0.0}, {1.5, 0.0}), std::invalid_argument);
}

TEST_CASE("grid functions carry zero trace and finite values") {
  MeshPtr m = share(make_fan_mesh(square_polygon(1.0), {0.0, 0.0}, 4));
  CHECK(interpolate(m, [](Point x) { return (1 - x.x * x.x) * (1 - x.y * x.y); }).has_zero_trace());
  // interpolation forces the trace; a raw vector need not have it
  CHECK(interpolate(m, [](Point) { return 1.0; }).has_zero_trace());
  CHECK_FALSE(GridFunction(m, std::vector<double>(m->num_vertices(), 1.0)).has_zero_trace());
  CHECK_THROWS_AS(GridFunction(m, std::vector<double>(3, 0.0)), std::invalid_argument);
  std::vector<double> bad(m->num_vertices(), 0.0);
  bad[0] = NAN;
  CHECK_THROWS_AS(GridFunction(m, bad), std::invalid_argument);
}

TEST_CASE("file formats") {
  auto dir = std::filesystem::temp_directory_path() / "mtx_io_test";
  std::filesystem::create_directories(dir);
  DomainMesh m = make_fan_mesh(square_polygon(1.0), {0.0, 0.0}, 3);
  write_mesh(m, (dir / "m.json").string());
  DomainMesh back = read_mesh((dir / "m.json").string());
  CHECK(back.vertices().size() == m.vertices().size());
  CHECK(back.vertices()[5].x == m.vertices()[5].x);
  CHECK(back.boundary() == m.boundary());

  RadialProfile u = moser_profile(0.01);
  write_profile(u, (dir / "p.csv").string());
  RadialProfile ub = read_profile((dir / "p.csv").string());
  CHECK(ub.nodes() == u.nodes());
  CHECK(ub.values() == u.values());

  CHECK_THROWS_AS(profile_from_csv("x,y\n0,1\n1,0\n"), InputError);
  CHECK_THROWS_AS(profile_from_csv("r,u\n0,1\n0.5,abc\n1,0\n"), InputError);
  CHECK_THROWS_AS(profile_from_csv("r,u\n0,1\n0.5,1\n1,0.2\n"), InputError);
  CHECK_THROWS_AS(mesh_from_json(Json::parse(R"({"vertices": [[0,0],[1,0]], "triangles": []})")), InputError);
  CHECK_THROWS_AS(mesh_from_json(Json::parse(R"({"vertices": [[0,0],[1,0],[0,1]], "triangles": [[0,2,1]], "boundary": [0,1,2]})")), InputError);
  CHECK_THROWS_AS(read_mesh((dir / "missing.json").string()), InputError);

  std::ofstream(dir / "v.csv") << "u\n0\n0.5\n";
  CHECK(read_vertex_values((dir / "v.csv").string()) == std::vector<double>{0.0, 0.5});
  std::ofstream(dir / "v.json") << R"({"values": [1, 2.5]})";
  CHECK(read_vertex_values((dir / "v.json").string()) == std::vector<double>{1.0, 2.5});
  std::filesystem::remove_all(dir);
}

TEST_CASE("reference meshes are checked against their checksums") {
  CHECK(crc32_of("123456789") == 0xCBF43926u);
  for (const auto& name : reference_mesh_names()) {
    DomainMesh m = reference_mesh(name);
    CHECK(m.num_vertices() > 1000);
  }
  CHECK(reference_mesh("rect_boundary_origin").origin_location() == OriginLocation::boundary);
  CHECK(reference_mesh("disk_offcenter").origin_location() == OriginLocation::interior);

  auto dir = std::filesystem::temp_directory_path() / "mtx_sum_test";
  std::filesystem::create_directories(dir);
  std::string text = read_text(data_dir() + "/disk.json");
  text[text.size() / 2] = text[text.size() / 2] == '1' ? '2' : '1';
  write_text((dir / "disk.json").string(), text);
  std::filesystem::copy_file(data_dir() + "/CHECKSUMS", dir / "CHECKSUMS");
  std::string saved = data_dir();
  setenv("MTX_DATA_DIR", dir.c_str(), 1);
  CHECK_THROWS_AS(reference_mesh("disk"), InputError);
  CHECK_THROWS_AS(reference_mesh("square"), InputError);  // listed but absent
  CHECK_THROWS_AS(reference_mesh("nonexistent"), InputError);
  unsetenv("MTX_DATA_DIR");
  CHECK(data_dir() == saved);
  std::filesystem::remove_all(dir);
}

TEST_CASE("tolerance configuration") {
  Tolerances t = Tolerances::defaults();
  CHECK(t.get("quad_1d") == 1e-8);
  CHECK(t.get("quad_2d") == 1e-4);
  t.apply_override("incenter=0.05");
  CHECK(t.get("incenter") == 0.05);
  CHECK_THROWS_AS(t.apply_override("nokey=1"), InputError);
  CHECK_THROWS_AS(t.apply_override("incenter"), InputError);
  CHECK_THROWS_AS(t.apply_override("incenter=abc"), InputError);
  CHECK_THROWS_AS(t.apply_override("incenter=-1"), InputError);
}
