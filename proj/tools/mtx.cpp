// mtx: batch front end for the Moser-Trudinger toolkit.
//
// Exit status: 0 success, 1 input error, 2 verification failure.

#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "mtx/config.hpp"
#include "mtx/greens.hpp"
#include "mtx/grid.hpp"
#include "mtx/io.hpp"
#include "mtx/maximizer.hpp"
#include "mtx/rearrangement.hpp"
#include "mtx/transport.hpp"
#include "mtx/verify.hpp"

using namespace mtx;

namespace {

struct Globals {
  std::string out;
  std::string format = "json";
  unsigned seed = 0;
  int threads = 0;
  std::vector<std::string> overrides;
};

struct ParamArgs {
  std::optional<double> alpha;
  double beta = 0.0;

  void add(CLI::App* c) {
    c->add_option("--alpha", alpha, "exponent alpha; defaults to the critical value 4 pi (1 - beta/2)");
    c->add_option("--beta", beta, "weight exponent beta in [0, 2)")->capture_default_str();
  }
  Params get() const {
    try {
      return alpha ? Params::make(*alpha, beta) : Params::critical(beta);
    } catch (const std::invalid_argument& e) {
      throw InputError(e.what());
    }
  }
};

std::string fmt(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

// JSON cannot hold inf or nan.
Json jnum(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

Json params_json(const Params& p) { return {{"alpha", p.alpha}, {"beta", p.beta}, {"on_boundary", p.on_boundary}}; }

Json profile_json(const RadialProfile& u) { return {{"r", u.nodes()}, {"u", u.values()}}; }

std::string vertex_csv(const GridFunction& u, const char* name) {
  std::string s = std::string("x,y,") + name + "\n";
  const auto& V = u.mesh->vertices();
  for (std::size_t i = 0; i < V.size(); ++i) s += fmt(V[i].x) + "," + fmt(V[i].y) + "," + fmt(u.values[i]) + "\n";
  return s;
}

std::string csv_table(const std::vector<std::string>& head, const std::vector<std::vector<double>>& rows) {
  std::string s;
  for (std::size_t i = 0; i < head.size(); ++i) s += (i ? "," : "") + head[i];
  s += "\n";
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) s += (i ? "," : "") + fmt(r[i]);
    s += "\n";
  }
  return s;
}

void emit(const Globals& g, const std::string& text) {
  if (g.out.empty() || g.out == "-") {
    std::cout << text;
    std::cout.flush();
  } else {
    write_text(g.out, text);
  }
}

void emit_json(const Globals& g, const Json& j) { emit(g, j.dump(2) + "\n"); }

// A path to a mesh file, or the name of a bundled reference mesh ("square" or "square.json").
MeshPtr load_mesh(const std::string& arg) {
  if (arg.empty()) throw InputError("--mesh is required");
  if (std::filesystem::exists(arg)) return std::make_shared<const DomainMesh>(read_mesh(arg));
  std::string name = std::filesystem::path(arg).filename().string();
  if (name.size() > 5 && name.substr(name.size() - 5) == ".json") name.resize(name.size() - 5);
  auto names = reference_mesh_names();
  if (std::find(names.begin(), names.end(), name) != names.end()) return std::make_shared<const DomainMesh>(reference_mesh(name));
  throw InputError("mesh '" + arg + "' not found (reference meshes: disk, disk_offcenter, square, l_hexagon, rect_boundary_origin)");
}

GreensField field_at(MeshPtr mesh, Point pole) {
  try {
    return solve_greens(std::move(mesh), pole);
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
}

// Runs fn(i) for i in [0, n) on up to `threads` workers; results are stored by index.
template <class Fn>
void parallel_map(std::size_t n, int threads, Fn&& fn) {
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  std::size_t workers = std::min<std::size_t>(n, threads > 0 ? static_cast<std::size_t>(threads) : hw);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr err;
  std::mutex m;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i; (i = next++) < n;) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lk(m);
          if (!err) err = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
}

void write_history(const std::string& path, const std::vector<double>& h) {
  if (path.empty()) return;
  std::string s = "iteration,value\n";
  for (std::size_t i = 0; i < h.size(); ++i) s += std::to_string(i) + "," + fmt(h[i]) + "\n";
  write_text(path, s);
}

Json starts_json(const std::vector<StartSummary>& starts) {
  Json a = Json::array();
  for (const auto& s : starts)
    a.push_back({{"label", s.label},
                 {"initial_value", jnum(s.initial_value)},
                 {"final_value", jnum(s.final_value)},
                 {"iterations", s.iterations},
                 {"stationarity", jnum(s.stationarity)},
                 {"failed", s.failed}});
  return a;
}

template <class R>
Json result_json(const Params& p, const R& r) {
  Json j;
  j["params"] = params_json(p);
  j["value"] = jnum(r.value);
  j["norm"] = jnum(r.norm);
  j["iterations"] = r.iterations;
  j["restarts"] = r.restarts;
  j["best_start"] = r.best_start;
  j["stationarity"] = jnum(r.stationarity);
  j["converged"] = r.converged;
  j["warnings"] = r.warnings;
  j["starts"] = starts_json(r.starts);
  return j;
}

struct AscentArgs {
  int restarts = 8;
  int max_iter = 5000;
  double tol = 1e-6;
  std::string history;

  void add(CLI::App* c) {
    c->add_option("--restarts", restarts, "number of starts")->capture_default_str()->check(CLI::PositiveNumber);
    c->add_option("--max-iter", max_iter, "iteration cap per start")->capture_default_str()->check(CLI::PositiveNumber);
    c->add_option("--ascent-tol", tol, "stationarity stopping tolerance")->capture_default_str()->check(CLI::PositiveNumber);
    c->add_option("--history", history, "write the ascent history of the best start as CSV");
  }
  void apply(AscentOptions& o, const Globals& g) const {
    o.restarts = restarts;
    o.max_iter = max_iter;
    o.tol = tol;
    o.seed = g.seed;
    o.threads = g.threads;
  }
};

std::vector<Point> parse_points(const std::string& s) {
  std::vector<Point> out;
  std::istringstream is(s);
  std::string item;
  while (std::getline(is, item, ';')) {
    double x, y;
    char comma;
    std::istringstream ps(item);
    if (!(ps >> x >> comma >> y) || comma != ',') throw InputError("points must look like 'x1,y1;x2,y2', got '" + item + "'");
    out.push_back({x, y});
  }
  if (out.empty()) throw InputError("empty point list");
  return out;
}

Point parse_point(const std::vector<double>& v, const char* what) {
  if (v.size() != 2) throw InputError(std::string(what) + " needs two coordinates x,y");
  return {v[0], v[1]};
}

Json gap_json(const GapReport& g) {
  return {{"params", params_json(g.params)},
          {"domain", g.domain},
          {"f_sup_estimate", jnum(g.f_sup_estimate)},
          {"f_delta_estimate", jnum(g.f_delta_estimate)},
          {"ball_level", jnum(g.ball_level)},
          {"family_level", jnum(g.family_level)},
          {"family_spread", jnum(g.family_spread)},
          {"family_name", g.family_name},
          {"incenter", jnum(g.incenter)},
          {"margin", jnum(g.margin)},
          {"threshold", g.threshold},
          {"attained", g.attained},
          {"iterations", g.iterations},
          {"stationarity", jnum(g.stationarity)}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical toolkit for singular Moser-Trudinger functionals"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--out", g.out, "output file (default: stdout)");
  app.add_option("--format", g.format, "output format")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
  app.add_option("--seed", g.seed, "random seed")->capture_default_str();
  app.add_option("--threads", g.threads, "worker threads (0: all cores)")->capture_default_str()->check(CLI::NonNegativeNumber);
  app.add_option("--tol-override", g.overrides, "tolerance override KEY=VAL (repeatable)");

  std::function<int()> run;

  // ball-max
  ParamArgs bp;
  AscentArgs ba;
  std::size_t ball_nodes = 4096;
  std::vector<double> beta_sweep;
  auto* ball = app.add_subcommand("ball-max", "maximize F over radial profiles on the unit ball");
  bp.add(ball);
  ba.add(ball);
  ball->add_option("--nodes", ball_nodes, "radial cells")->capture_default_str()->check(CLI::Range(8, 1 << 22));
  ball->add_option("--beta-sweep", beta_sweep, "comma-separated betas on the critical line; runs in parallel")->delimiter(',');
  ball->callback([&] {
    run = [&]() -> int {
      if (beta_sweep.empty()) {
        Params p = bp.get();
        BallMaxOptions o;
        ba.apply(o, g);
        BallMaxResult r = maximize_ball_radial(p, ball_nodes, o);
        write_history(ba.history, r.history);
        if (g.format == "csv") {
          emit(g, profile_to_csv(r.argmax));
        } else {
          Json j = result_json(p, r);
          if (p.on_boundary) j["concentration_level"] = kPi * std::exp(1.0) / p.a();
          j["nodes"] = ball_nodes;
          j["argmax"] = profile_json(r.argmax);
          emit_json(g, j);
        }
        return 0;
      }
      std::vector<Params> ps;
      for (double b : beta_sweep) {
        ParamArgs one;
        one.beta = b;
        ps.push_back(one.get());
      }
      std::vector<BallMaxResult> rs(ps.size());
      parallel_map(ps.size(), g.threads, [&](std::size_t i) {
        BallMaxOptions o;
        ba.apply(o, g);
        o.threads = 1;
        rs[i] = maximize_ball_radial(ps[i], ball_nodes, o);
      });
      if (g.format == "csv") {
        std::vector<std::vector<double>> rows;
        for (std::size_t i = 0; i < ps.size(); ++i)
          rows.push_back({ps[i].beta, ps[i].alpha, rs[i].value, kPi * std::exp(1.0) / ps[i].a(), rs[i].norm, double(rs[i].iterations), rs[i].stationarity, rs[i].converged ? 1.0 : 0.0});
        emit(g, csv_table({"beta", "alpha", "value", "concentration_level", "norm", "iterations", "stationarity", "converged"}, rows));
      } else {
        Json a = Json::array();
        for (std::size_t i = 0; i < ps.size(); ++i) {
          Json j = result_json(ps[i], rs[i]);
          j["concentration_level"] = kPi * std::exp(1.0) / ps[i].a();
          a.push_back(std::move(j));
        }
        emit_json(g, {{"nodes", ball_nodes}, {"sweep", a}});
      }
      return 0;
    };
  });

  // domain-max
  ParamArgs dp;
  AscentArgs da;
  std::string dmesh;
  std::size_t dball = 4096;
  auto* dom = app.add_subcommand("domain-max", "maximize F over a meshed domain with the weight centred at the origin");
  dp.add(dom);
  da.add(dom);
  dom->add_option("--mesh", dmesh, "mesh JSON file or reference mesh name")->required();
  dom->add_option("--ball-nodes", dball, "radial cells of the ball seed")->capture_default_str();
  dom->callback([&] {
    run = [&]() -> int {
      Params p = dp.get();
      MeshPtr mesh = load_mesh(dmesh);
      DomainMaxOptions o;
      da.apply(o, g);
      o.ball_nodes = dball;
      o.ball_restarts = da.restarts;
      DomainMaxResult r;
      try {
        r = maximize_domain(p, mesh, o);
      } catch (const std::invalid_argument& e) {
        throw InputError(e.what());
      }
      write_history(da.history, r.history);
      if (g.format == "csv") {
        emit(g, vertex_csv(r.argmax, "u"));
      } else {
        Json j = result_json(p, r);
        j["mesh"] = dmesh;
        j["vertices"] = mesh->num_vertices();
        j["argmax"] = {{"values", r.argmax.values}};
        emit_json(g, j);
      }
      return 0;
    };
  });

  // gap
  ParamArgs gp;
  std::string gmesh;
  double gthreshold = 0.0;
  std::size_t gnodes = 4096;
  int grestarts = 8;
  auto* gap = app.add_subcommand("gap", "compare the computed supremum with the concentration level I^{2-beta} pi e / a");
  gp.add(gap);
  gap->add_option("--mesh", gmesh, "mesh JSON file or reference mesh name; the unit ball when omitted");
  gap->add_option("--threshold", gthreshold, "margin required for 'attained'")->capture_default_str();
  gap->add_option("--nodes", gnodes, "radial cells of the ball problem")->capture_default_str();
  gap->add_option("--restarts", grestarts, "starts per maximization")->capture_default_str()->check(CLI::PositiveNumber);
  gap->callback([&] {
    run = [&]() -> int {
      Params p = gp.get();
      if (!p.on_boundary) throw InputError("gap needs alpha/(4 pi) + beta/2 = 1");
      GapOptions o;
      o.threshold = gthreshold;
      o.ball.restarts = o.domain.restarts = o.domain.ball_restarts = grestarts;
      o.ball.seed = o.domain.seed = g.seed;
      o.ball.threads = o.domain.threads = g.threads;
      o.domain.ball_nodes = gnodes;
      GapReport r;
      if (gmesh.empty()) {
        r = gap_report_ball(p, gnodes, o);
      } else {
        MeshPtr mesh = load_mesh(gmesh);
        if (mesh->origin_location() != OriginLocation::interior) throw InputError("gap needs the origin inside the domain");
        GreensField f = field_at(mesh, {0.0, 0.0});
        r = gap_report(p, f, o);
        r.domain = gmesh;
      }
      if (g.format == "csv") {
        emit(g, csv_table({"alpha", "beta", "f_sup_estimate", "f_delta_estimate", "ball_level", "family_level", "incenter", "margin", "attained"},
                          {{p.alpha, p.beta, r.f_sup_estimate, r.f_delta_estimate, r.ball_level, r.family_level, r.incenter, r.margin, r.attained ? 1.0 : 0.0}}));
      } else {
        emit_json(g, gap_json(r));
      }
      return 0;
    };
  });

  // greens
  std::string grmesh;
  std::vector<double> pole{0.0, 0.0};
  std::vector<double> levels{0.05, 0.1, 0.2};
  auto* gr = app.add_subcommand("greens", "Green's function, conformal incenter and level-set laws");
  gr->add_option("--mesh", grmesh, "mesh JSON file or reference mesh name")->required();
  gr->add_option("--pole", pole, "pole x,y")->delimiter(',')->expected(2);
  gr->add_option("--levels", levels, "levels t for the energy, flux and mass laws")->delimiter(',');
  gr->callback([&] {
    run = [&]() -> int {
      GreensField f = field_at(load_mesh(grmesh), parse_point(pole, "--pole"));
      if (g.format == "csv") {
        emit(g, vertex_csv(f.G_values(), "G"));
        return 0;
      }
      Json j = field_to_json(f, grmesh);
      Json ls = Json::array();
      for (double t : levels) {
        if (!(t > 0.0)) throw InputError("levels must be positive");
        LevelSet s = level_set(f, t);
        Json e{{"t", t}, {"energy_below", jnum(greens_energy_below(f, t))}, {"flux", jnum(level_flux(f, t))}, {"enclosed_area", s.enclosed_area}, {"sigma", s.sigma}, {"tau", s.tau}};
        try {
          e["mass_ratio"] = jnum(level_mass_ratio(f, t));
        } catch (const std::runtime_error&) {
          e["mass_ratio"] = nullptr;  // level curve too small for the mesh
        }
        ls.push_back(std::move(e));
      }
      j["levels"] = std::move(ls);
      emit_json(g, j);
      return 0;
    };
  });

  // incenter-map
  std::string imesh, ipoints;
  int igrid = 11;
  auto* im = app.add_subcommand("incenter-map", "conformal incenter at a list or grid of interior points");
  im->add_option("--mesh", imesh, "mesh JSON file or reference mesh name")->required();
  im->add_option("--points", ipoints, "points 'x1,y1;x2,y2;...'; a grid over the bounding box otherwise");
  im->add_option("--grid", igrid, "grid points per side")->capture_default_str()->check(CLI::Range(2, 1000));
  im->callback([&] {
    run = [&]() -> int {
      MeshPtr mesh = load_mesh(imesh);
      Polygon bnd = mesh->boundary_polygon();
      std::vector<Point> pts;
      if (!ipoints.empty()) {
        pts = parse_points(ipoints);
      } else {
        double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
        for (Point q : bnd) {
          x0 = std::min(x0, q.x), x1 = std::max(x1, q.x);
          y0 = std::min(y0, q.y), y1 = std::max(y1, q.y);
        }
        double margin = 1e-3 * mesh->diameter();
        for (int i = 0; i < igrid; ++i)
          for (int k = 0; k < igrid; ++k) {
            Point q{x0 + (x1 - x0) * i / (igrid - 1), y0 + (y1 - y0) * k / (igrid - 1)};
            if (point_in_polygon(q, bnd) > 0 && distance_to_polygon(q, bnd) > margin) pts.push_back(q);
          }
      }
      for (Point q : pts)
        if (point_in_polygon(q, bnd) <= 0) throw InputError("point (" + fmt(q.x) + ", " + fmt(q.y) + ") is not inside the domain");
      std::vector<double> inc(pts.size());
      parallel_map(pts.size(), g.threads, [&](std::size_t i) { inc[i] = solve_greens(mesh, pts[i]).incenter; });
      if (g.format == "csv") {
        std::vector<std::vector<double>> rows;
        for (std::size_t i = 0; i < pts.size(); ++i) rows.push_back({pts[i].x, pts[i].y, inc[i]});
        emit(g, csv_table({"x", "y", "incenter"}, rows));
      } else {
        Json a = Json::array();
        for (std::size_t i = 0; i < pts.size(); ++i) a.push_back({{"x", pts[i].x}, {"y", pts[i].y}, {"incenter", inc[i]}});
        emit_json(g, {{"mesh", imesh}, {"area_radius", std::sqrt(mesh->area() / kPi)}, {"points", a}});
      }
      return 0;
    };
  });

  // transport
  ParamArgs tp;
  std::string tmesh, tprofile, tvalues;
  double teps = std::exp(-12.0);
  std::optional<double> tlevel;
  std::vector<double> tpole{0.0, 0.0};
  auto* tr = app.add_subcommand("transport", "carry a radial profile to a domain along Green's level sets, or back with --values");
  tp.add(tr);
  tr->add_option("--mesh", tmesh, "mesh JSON file or reference mesh name")->required();
  tr->add_option("--pole", tpole, "pole x,y")->delimiter(',')->expected(2);
  tr->add_option("--profile", tprofile, "radial profile CSV (r,u); a Moser profile when omitted");
  tr->add_option("--moser-eps", teps, "plateau radius of the default Moser profile")->check(CLI::Range(1e-300, 0.5));
  tr->add_option("--values", tvalues, "vertex values to carry back to the ball");
  tr->add_option("--level", tlevel, "level s for the way back (required with --values)");
  tr->callback([&] {
    run = [&]() -> int {
      Params p = tp.get();
      Point x = parse_point(tpole, "--pole");
      MeshPtr mesh = load_mesh(tmesh);
      GreensField f = field_at(mesh, x);
      if (!tvalues.empty()) {
        if (!tlevel) throw InputError("--values needs --level");
        std::vector<double> vals = read_vertex_values(tvalues);
        if (vals.size() != mesh->num_vertices()) throw InputError("values: " + std::to_string(vals.size()) + " entries for a mesh with " + std::to_string(mesh->num_vertices()) + " vertices");
        GridFunction u(mesh, vals);
        DomainToBall b;
        try {
          b = domain_to_ball(u, *tlevel, f);
        } catch (const std::invalid_argument& e) {
          throw InputError(e.what());
        }
        if (g.format == "csv") {
          emit(g, profile_to_csv(b.profile));
        } else {
          emit_json(g, {{"params", params_json(p)},
                        {"s", b.s}, {"t", b.t}, {"delta", b.delta}, {"a", b.a}, {"lambda", b.lambda},
                        {"rho", b.rho}, {"eps", b.eps}, {"sigma", b.sigma}, {"tau", b.tau},
                        {"eccentricity", b.eccentricity}, {"incenter", b.incenter},
                        {"F_domain", jnum(eval_F_grid(p, u))}, {"F_ball", jnum(eval_F_radial(p, b.profile))},
                        {"energy_domain", dirichlet_energy(u)}, {"energy_ball", dirichlet_energy(b.profile)},
                        {"profile", profile_json(b.profile)}});
        }
        return 0;
      }
      RadialProfile v = tprofile.empty() ? moser_profile(teps) : read_profile(tprofile);
      if (std::abs(v.outer_radius() - 1.0) > 1e-12) throw InputError("profile must live on [0, 1]");
      GridFunction u = ball_to_domain(f, v);
      if (g.format == "csv") {
        emit(g, vertex_csv(u, "u"));
      } else {
        double fb = eval_F_radial(p, v), fd = eval_F_grid(p, u);
        double bound = std::pow(f.incenter, 2.0 - p.beta) * fb;
        emit_json(g, {{"params", params_json(p)},
                      {"incenter", f.incenter},
                      {"F_ball", jnum(fb)},
                      {"F_domain", jnum(fd)},
                      {"lower_bound", jnum(bound)},
                      {"ratio", jnum(fd / bound)},
                      {"energy_ball", dirichlet_energy(v)},
                      {"energy_domain", dirichlet_energy(u)},
                      {"values", u.values}});
      }
      return 0;
    };
  });

  // moser-limit
  double mbeta = 0.0;
  int kmin = 4, kmax = 20, mpoints = 3;
  auto* ml = app.add_subcommand("moser-limit", "sweep the concentrating family eps = 2^-k and extrapolate to eps -> 0");
  ml->add_option("--beta", mbeta, "weight exponent; alpha is critical")->capture_default_str();
  ml->add_option("--kmin", kmin, "first k")->capture_default_str()->check(CLI::Range(1, 200));
  ml->add_option("--kmax", kmax, "last k")->capture_default_str()->check(CLI::Range(1, 200));
  ml->add_option("--points", mpoints, "samples in the extrapolation polynomial")->capture_default_str()->check(CLI::Range(1, 10));
  ml->callback([&] {
    run = [&]() -> int {
      if (kmax < kmin) throw InputError("--kmax must be >= --kmin");
      ParamArgs pa;
      pa.beta = mbeta;
      Params p = pa.get();
      auto eps = dyadic_schedule(kmin, kmax);
      MoserFamily fam = mbeta == 0.0 ? standard_family(eps) : concentrating_family_F(p, eps);
      double target = 4.0 * kPi / (2.0 - mbeta);
      std::vector<double> x, ext;
      for (double e : eps) x.push_back(1.0 / std::log(1.0 / e));
      // running estimate from the samples up to each row
      for (std::size_t i = 0; i < eps.size(); ++i) {
        std::vector<double> xs(x.begin(), x.begin() + i + 1), ys(fam.values.begin(), fam.values.begin() + i + 1);
        ext.push_back(extrapolate_to_zero(xs, ys, std::min<int>(mpoints, static_cast<int>(i) + 1)).estimate);
      }
      if (g.format == "csv") {
        std::vector<std::vector<double>> rows;
        for (std::size_t i = 0; i < eps.size(); ++i)
          rows.push_back({double(kmin + static_cast<int>(i)), eps[i], std::log(1.0 / eps[i]), fam.values[i], ext[i], target});
        emit(g, csv_table({"k", "eps", "L", "value", "extrapolation", "target"}, rows));
      } else {
        Extrapolation e = extrapolate_family(fam, mpoints);
        Json rows = Json::array();
        for (std::size_t i = 0; i < eps.size(); ++i)
          rows.push_back({{"k", kmin + static_cast<int>(i)}, {"eps", eps[i]}, {"value", fam.values[i]}, {"extrapolation", ext[i]}});
        emit_json(g, {{"params", params_json(p)},
                      {"family", fam.name},
                      {"target", target},
                      {"estimate", e.estimate},
                      {"spread", e.spread()},
                      {"relative_error", (e.estimate - target) / target},
                      {"rows", rows}});
      }
      return 0;
    };
  });

  // rearrange
  std::string rprofile, rmesh, rvalues;
  auto* re = app.add_subcommand("rearrange", "symmetric decreasing rearrangement of a radial profile or of vertex values");
  re->add_option("--profile", rprofile, "radial profile CSV (r,u)");
  re->add_option("--mesh", rmesh, "mesh for --values");
  re->add_option("--values", rvalues, "vertex values (JSON or CSV)");
  re->callback([&] {
    run = [&]() -> int {
      RadialProfile star;
      double e0 = 0.0, area = 0.0;
      if (!rprofile.empty()) {
        RadialProfile u = read_profile(rprofile);
        star = rearrange_radial(u);
        e0 = dirichlet_energy(u);
        area = kPi * u.outer_radius() * u.outer_radius();
      } else {
        if (rmesh.empty() || rvalues.empty()) throw InputError("rearrange needs --profile, or --mesh with --values");
        MeshPtr mesh = load_mesh(rmesh);
        std::vector<double> vals = read_vertex_values(rvalues);
        if (vals.size() != mesh->num_vertices()) throw InputError("values: " + std::to_string(vals.size()) + " entries for a mesh with " + std::to_string(mesh->num_vertices()) + " vertices");
        GridFunction u(mesh, vals);
        star = rearrange_grid(u);
        e0 = dirichlet_energy(u);
        area = mesh->area();
      }
      if (g.format == "csv") {
        emit(g, profile_to_csv(star));
      } else {
        emit_json(g, {{"area", area}, {"energy", e0}, {"energy_rearranged", dirichlet_energy(star)}, {"max", star.max_value()}, {"profile", profile_json(star)}});
      }
      return 0;
    };
  });

  // verify
  std::string suite = "all";
  double vbeta = 1.0;
  auto* ve = app.add_subcommand("verify", "run the verification suite against the bundled reference meshes");
  std::vector<std::string> suites = verify_suite_names();
  suites.push_back("all");
  ve->add_option("--suite", suite, "suite")->check(CLI::IsMember(suites))->capture_default_str();
  ve->add_option("--beta", vbeta, "beta of the critical pair used by beta-dependent checks")->capture_default_str();
  ve->callback([&] {
    run = [&]() -> int {
      Tolerances tol = Tolerances::defaults();
      for (const auto& o : g.overrides) tol.apply_override(o);
      ParamArgs pa;
      pa.beta = vbeta;
      pa.get();
      VerifyContext ctx(tol, g.seed, g.threads);
      VerifyReport r = verify_suite(ctx, suite, vbeta);
      for (const auto& grp : r.groups) {
        std::fprintf(stderr, "%-30s %s  %.1f s\n", grp.name.c_str(), grp.pass() ? "pass" : "FAIL", grp.seconds);
        for (const auto& c : grp.checks)
          if (!c.pass) std::fprintf(stderr, "  failed %s: %.6g %s %.6g\n", c.id.c_str(), c.measured, c.relation.c_str(), c.allowed);
      }
      if (g.format == "csv") {
        std::string s = "group,id,measured,relation,allowed,pass\n";
        for (const auto& grp : r.groups)
          for (const auto& c : grp.checks) s += "\"" + grp.name + "\"," + c.id + "," + fmt(c.measured) + "," + c.relation + "," + fmt(c.allowed) + "," + (c.pass ? "1" : "0") + "\n";
        emit(g, s);
      } else {
        Json j = r.to_json();
        Json head{{"suite", suite}, {"beta", vbeta}, {"seed", g.seed}};
        Json tj;
        for (const auto& [k, v] : tol.all()) tj[k] = v;
        head["tolerances"] = tj;
        head.update(j);
        emit_json(g, head);
      }
      return r.pass() ? 0 : 2;
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }
  try {
    // overrides are validated for every command
    Tolerances t = Tolerances::defaults();
    for (const auto& o : g.overrides) t.apply_override(o);
    return run();
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
