#include "mtx/maximizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <thread>

#include "mtx/fem.hpp"
#include "mtx/rearrangement.hpp"
#include "mtx/transport.hpp"

namespace mtx {

namespace {

using Vec = std::vector<double>;

double dotv(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Smooth objective on R^n with the Dirichlet inner product <x, K y>.
struct SphereProblem {
  std::size_t n = 0;
  std::function<void(const Vec&, Vec&)> apply_K;
  // <x, K x> as a sum of nonnegative element terms
  std::function<double(const Vec&)> energy;
  std::function<Vec(const Vec&)> solve_K;
  std::function<double(const Vec&)> value;
  std::function<double(const Vec&, const Vec&)> difference;
  std::function<void(const Vec&, Vec&)> gradient;
  std::function<double(const Vec&)> max_exponent;
};

struct AscentRun {
  Vec x;
  double initial_value = 0.0;
  double value = 0.0;
  int iterations = 0;
  double stationarity = 1.0;
  bool converged = false;
  bool failed = false;
  Vec history;
};

bool normalize(const SphereProblem& P, Vec& x, Vec& Kx) {
  P.apply_K(x, Kx);
  double e = P.energy(x);
  if (!(e > 0.0) || !std::isfinite(e)) return false;
  double s = 1.0 / std::sqrt(e);
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] *= s;
    Kx[i] *= s;
  }
  return true;
}

// Geodesic ascent on {<x, K x> = 1}. Each step moves along the tangent part of
// d = K^{-1} grad, with the angle controlled by a trust region and accepted
// only when the objective increases.
AscentRun ascend(const SphereProblem& P, Vec x, const AscentOptions& opts,
                 const std::function<void(const Vec&, double)>& on_accept) {
  AscentRun run;
  Vec Kx(P.n), g(P.n), y(P.n), Ky(P.n);
  if (x.size() != P.n || !normalize(P, x, Kx)) {
    run.failed = true;
    return run;
  }
  // Scale a start that overflows into the admissible range.
  double m = P.max_exponent(x);
  if (m > opts.exponent_cap) {
    double c = std::sqrt(0.9 * opts.exponent_cap / m);
    for (double& v : x) v *= c;
  }
  double f = P.value(x);
  if (!std::isfinite(f)) {
    run.failed = true;
    return run;
  }
  run.initial_value = f;
  if (opts.record_history) run.history.push_back(f);
  if (on_accept) on_accept(x, f);
  bool on_sphere = m <= opts.exponent_cap;
  double theta = 0.05;
  const double theta_max = kPi / 4.0;
  int it = 0;
  for (; it < opts.max_iter; ++it) {
    P.gradient(x, g);
    Vec d = P.solve_K(g);
    double gd = dotv(g, d);
    if (!(gd > 0.0) || !std::isfinite(gd)) break;
    double ug = dotv(x, g);
    // tangent part: dt = d - ug x (x has unit energy), K dt = g - ug K x
    Vec dt(P.n);
    double tn2 = 0.0;
    for (std::size_t i = 0; i < P.n; ++i) {
      dt[i] = d[i] - ug * x[i];
      tn2 += dt[i] * (g[i] - ug * Kx[i]);
    }
    tn2 = std::max(tn2, 0.0);
    run.stationarity = std::sqrt(tn2 / gd);
    if (on_sphere && run.stationarity <= opts.tol) {
      run.converged = true;
      break;
    }
    double slope = std::sqrt(tn2);
    // Off the sphere (a start scaled down for overflow) the radial direction still ascends.
    const Vec& dir = on_sphere ? dt : d;
    double dir_norm = on_sphere ? slope : std::sqrt(gd);
    if (!(dir_norm > 0.0)) break;
    bool accepted = false;
    while (theta > 1e-15) {
      double c = std::cos(theta), s = std::sin(theta) / dir_norm;
      for (std::size_t i = 0; i < P.n; ++i) y[i] = c * x[i] + s * dir[i];
      if (on_sphere) {
        if (!normalize(P, y, Ky)) {
          theta *= 0.5;
          continue;
        }
      } else {
        P.apply_K(y, Ky);
        double e = P.energy(y);
        if (e > 1.0) {
          normalize(P, y, Ky);
        }
      }
      if (P.max_exponent(y) > opts.exponent_cap) {
        theta *= 0.5;
        continue;
      }
      double df = P.difference(x, y);
      if (!std::isfinite(df) || !(df > 0.0)) {
        theta *= 0.5;
        continue;
      }
      // quadratic model along the geodesic: f(t) ~ f + slope t - c2 t^2
      double c2 = (slope * theta - df) / (theta * theta);
      double next = c2 > 0.0 ? std::clamp(slope / (2.0 * c2), 0.5 * theta, 4.0 * theta) : 4.0 * theta;
      theta = std::min(next, theta_max);
      x.swap(y);
      Kx.swap(Ky);
      f += df;
      accepted = true;
      break;
    }
    if (!accepted) break;
    if (!on_sphere) {
      double e = P.energy(x);
      on_sphere = e >= 1.0 - 1e-12;
    }
    if (opts.record_history) run.history.push_back(f);
    if (on_accept) on_accept(x, f);
  }
  run.iterations = it;
  run.x = std::move(x);
  run.value = f;
  return run;
}

// Runs fn(i) for i in [0, n) on up to `threads` workers.
void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
  if (threads <= 0) threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  threads = std::min(threads, n);
  if (threads <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(threads);
  for (int w = 0; w < threads; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (int i = w; i < n; i += threads) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

int select_best(const std::vector<AscentRun>& runs) {
  int best = -1;
  for (int i = 0; i < static_cast<int>(runs.size()); ++i) {
    if (runs[i].failed) continue;
    if (best < 0 || runs[i].value > runs[best].value) best = i;
  }
  return best;
}

// Tridiagonal Dirichlet form of a radial P1 profile on the free nodes 0..n-1.
struct RadialMetric {
  Vec diag, off;  // off[i] couples i and i+1
  Vec c, dinv;    // Thomas factors

  explicit RadialMetric(const Vec& r) {
    std::size_t n = r.size() - 1;
    diag.assign(n, 0.0);
    off.assign(n > 0 ? n - 1 : 0, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      double w = kPi * (r[i + 1] + r[i]) / (r[i + 1] - r[i]);
      diag[i] += w;
      if (i + 1 < n) {
        diag[i + 1] += w;
        off[i] = -w;
      }
    }
    c.assign(n, 0.0);
    dinv.assign(n, 0.0);
    double prev = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double piv = diag[i] - (i > 0 ? off[i - 1] * prev : 0.0);
      dinv[i] = 1.0 / piv;
      prev = i + 1 < n ? off[i] * dinv[i] : 0.0;
      c[i] = prev;
    }
  }

  void apply(const Vec& x, Vec& y) const {
    std::size_t n = diag.size();
    y.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      double s = diag[i] * x[i];
      if (i > 0) s += off[i - 1] * x[i - 1];
      if (i + 1 < n) s += off[i] * x[i + 1];
      y[i] = s;
    }
  }

  double energy(const Vec& x) const {
    std::size_t n = diag.size();
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double du = (i + 1 < n ? x[i + 1] : 0.0) - x[i];
      s += (i + 1 < n ? -off[i] : diag[i] - (i > 0 ? -off[i - 1] : 0.0)) * du * du;
    }
    return s;
  }

  Vec solve(const Vec& b) const {
    std::size_t n = diag.size();
    Vec z(n);
    for (std::size_t i = 0; i < n; ++i) z[i] = (b[i] - (i > 0 ? off[i - 1] * z[i - 1] : 0.0)) * dinv[i];
    for (std::size_t i = n - 1; i-- > 0;) z[i] -= c[i] * z[i + 1];
    return z;
  }
};

// Moser profile with plateau exp(-L), pulled back by T_{1/a}: m(r^a) / sqrt(a).
double moser_value(double L, double a, double r) {
  double s = std::pow(r, a);
  double eps = std::exp(-L);
  double m = s <= eps ? std::sqrt(L / (2.0 * kPi)) : std::log(1.0 / s) / std::sqrt(2.0 * kPi * L);
  return m / std::sqrt(a);
}

struct Start {
  std::string label;
  std::function<double(double)> f;  // radial shape on B_1
};

std::vector<Start> radial_starts(const Params& p, int count, unsigned seed, std::size_t warm) {
  double a = p.a();
  std::vector<Start> out;
  for (double L : {0.5, 1.0, 2.0, 3.0, 4.0, 6.0}) {
    out.push_back({"moser L=" + std::to_string(L).substr(0, 3), [L, a](double r) { return moser_value(L, a, r); }});
  }
  out.push_back({"tent", [](double r) { return 1.0 - r; }});
  out.push_back({"tent r^a", [a](double r) { return 1.0 - std::pow(r, a); }});
  out.push_back({"bump", [](double r) { return (1.0 - r * r) * (1.0 - r * r); }});
  int need = count - static_cast<int>(warm);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0.25, 8.0);
  while (static_cast<int>(out.size()) < need) {
    double L = U(rng);
    out.push_back({"moser L=" + std::to_string(L).substr(0, 4), [L, a](double r) { return moser_value(L, a, r); }});
  }
  if (need < static_cast<int>(out.size())) out.resize(std::max(need, 0));
  return out;
}

template <class Result>
void fill_summaries(Result& res, const std::vector<AscentRun>& runs, const std::vector<std::string>& labels) {
  for (std::size_t i = 0; i < runs.size(); ++i) {
    StartSummary s;
    s.label = labels[i];
    s.initial_value = runs[i].initial_value;
    s.final_value = runs[i].value;
    s.iterations = runs[i].iterations;
    s.stationarity = runs[i].stationarity;
    s.failed = runs[i].failed;
    res.starts.push_back(s);
  }
  res.restarts = static_cast<int>(runs.size());
}

}  // namespace

BallMaxResult maximize_ball_radial(const Params& p, std::size_t n, const BallMaxOptions& opts) {
  if (n < 8) throw std::invalid_argument("ball maximizer: need at least 8 cells");
  if (opts.restarts < 1) throw std::invalid_argument("ball maximizer: need at least one start");
  Vec r = radial_grid(n, opts.grid, opts.first_node);
  RadialQuadrature quad(r, p.beta);
  RadialMetric metric(r);
  double alpha = p.alpha;
  auto lift = [&](const Vec& x) {
    Vec u(x);
    u.push_back(0.0);
    return u;
  };

  SphereProblem P;
  P.n = n;
  P.apply_K = [&](const Vec& x, Vec& y) { metric.apply(x, y); };
  P.energy = [&](const Vec& x) { return metric.energy(x); };
  P.solve_K = [&](const Vec& g) { return metric.solve(g); };
  P.value = [&](const Vec& x) { return quad.value(alpha, lift(x)); };
  P.difference = [&](const Vec& x, const Vec& y) { return quad.difference(alpha, lift(x), lift(y)); };
  P.gradient = [&](const Vec& x, Vec& g) {
    Vec full;
    quad.gradient(alpha, lift(x), full);
    full.pop_back();
    g.swap(full);
  };
  P.max_exponent = [&](const Vec& x) { return quad.max_exponent(alpha, lift(x)); };

  std::vector<Vec> inits;
  std::vector<std::string> labels;
  for (std::size_t w = 0; w < opts.warm_starts.size(); ++w) {
    const auto& ws = opts.warm_starts[w];
    Vec x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = std::abs(ws(r[i] * ws.outer_radius()));
    inits.push_back(std::move(x));
    labels.push_back("warm " + std::to_string(w));
  }
  for (const auto& s : radial_starts(p, std::max(opts.restarts, static_cast<int>(inits.size())), opts.seed,
                                     inits.size())) {
    Vec x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = s.f(r[i]);
    inits.push_back(std::move(x));
    labels.push_back(s.label);
  }

  std::vector<AscentRun> runs(inits.size());
  std::function<void(const Vec&, double)> hook;
  if (opts.on_accept) {
    hook = [&](const Vec& x, double f) { opts.on_accept(RadialProfile(r, lift(x)), f); };
  }
  parallel_for(static_cast<int>(inits.size()), opts.on_accept ? 1 : opts.threads,
               [&](int i) { runs[i] = ascend(P, inits[i], opts, hook); });

  int best = select_best(runs);
  if (best < 0) throw std::runtime_error("ball maximizer: every start failed");
  BallMaxResult res;
  fill_summaries(res, runs, labels);
  for (const auto& run : runs) {
    if (run.failed) {
      res.start_results.emplace_back();
      continue;
    }
    Vec u = lift(run.x);
    for (double& v : u) v = std::abs(v);
    res.start_results.emplace_back(r, std::move(u));
  }
  res.best_start = best;
  res.argmax = rearrange_radial(res.start_results[best]);
  res.value = eval_F_radial(p, res.argmax);
  res.norm = dirichlet_energy(res.argmax);
  res.iterations = runs[best].iterations;
  res.history = runs[best].history;
  res.stationarity = runs[best].stationarity;
  res.converged = runs[best].converged;
  return res;
}

namespace {

Point deepest_vertex(const DomainMesh& M) {
  Polygon poly = M.boundary_polygon();
  double best = -1.0;
  Point out{0.0, 0.0};
  for (std::size_t i = 0; i < M.num_vertices(); ++i) {
    if (M.is_boundary(static_cast<int>(i))) continue;
    double d = distance_to_polygon(M.vertices()[i], poly);
    if (d > best) {
      best = d;
      out = M.vertices()[i];
    }
  }
  return out;
}

}  // namespace

DomainMaxResult maximize_domain(const Params& p, MeshPtr mesh, const DomainMaxOptions& opts) {
  if (!mesh) throw std::invalid_argument("domain maximizer: missing mesh");
  const DomainMesh& M = *mesh;
  DomainMaxResult res;
  OriginLocation loc = M.origin_location();
  if (loc != OriginLocation::interior && p.beta > 0.0) {
    if (loc == OriginLocation::exterior)
      throw std::invalid_argument("domain maximizer: origin outside the domain with beta > 0");
    res.warnings.push_back("origin on the boundary with beta > 0: concentration at 0 carries no mass");
  }

  std::optional<GreensField> own;
  const GreensField* field = opts.field;
  if (!field) {
    Point pole = loc == OriginLocation::interior ? Point{0.0, 0.0} : deepest_vertex(M);
    own = solve_greens(mesh, pole);
    field = &*own;
  } else if (field->mesh.get() != mesh.get()) {
    throw std::invalid_argument("domain maximizer: field lives on another mesh");
  }

  std::vector<int> free_ids;
  std::vector<int> slot(M.num_vertices(), -1);
  for (std::size_t i = 0; i < M.num_vertices(); ++i) {
    if (!M.is_boundary(static_cast<int>(i))) {
      slot[i] = static_cast<int>(free_ids.size());
      free_ids.push_back(static_cast<int>(i));
    }
  }
  if (free_ids.empty()) throw std::invalid_argument("domain maximizer: mesh has no interior vertices");
  auto K = assemble_stiffness(M);
  DirichletSolver solver = interior_solver(M, K);
  GridQuadrature quad(M, p.beta);
  double alpha = p.alpha;
  std::size_t nv = M.num_vertices();
  auto lift = [&](const Vec& x) {
    Vec u(nv, 0.0);
    for (std::size_t k = 0; k < free_ids.size(); ++k) u[free_ids[k]] = x[k];
    return u;
  };
  auto restrict_to_free = [&](const Vec& full) {
    Vec x(free_ids.size());
    for (std::size_t k = 0; k < free_ids.size(); ++k) x[k] = full[free_ids[k]];
    return x;
  };

  SphereProblem P;
  P.n = free_ids.size();
  P.apply_K = [&](const Vec& x, Vec& y) {
    Vec u = lift(x);
    Eigen::Map<const Eigen::VectorXd> um(u.data(), static_cast<Eigen::Index>(nv));
    Eigen::VectorXd ku = K * um;
    y.resize(free_ids.size());
    for (std::size_t k = 0; k < free_ids.size(); ++k) y[k] = ku[free_ids[k]];
  };
  P.energy = [&](const Vec& x) { return dirichlet_energy(GridFunction(mesh, lift(x))); };
  P.solve_K = [&](const Vec& g) { return restrict_to_free(solver.solve(lift(g), {})); };
  P.value = [&](const Vec& x) { return quad.value(alpha, lift(x)); };
  P.difference = [&](const Vec& x, const Vec& y) { return quad.difference(alpha, lift(x), lift(y)); };
  P.gradient = [&](const Vec& x, Vec& g) {
    Vec full;
    quad.gradient(alpha, lift(x), full);
    g = restrict_to_free(full);
  };
  P.max_exponent = [&](const Vec& x) { return quad.max_exponent(alpha, lift(x)); };

  std::vector<Vec> inits;
  std::vector<std::string> labels;
  for (std::size_t w = 0; w < opts.warm_starts.size(); ++w) {
    if (opts.warm_starts[w].mesh.get() != mesh.get())
      throw std::invalid_argument("domain maximizer: warm start lives on another mesh");
    Vec x = restrict_to_free(opts.warm_starts[w].values);
    for (double& v : x) v = std::abs(v);
    inits.push_back(std::move(x));
    labels.push_back("warm " + std::to_string(w));
  }
  if (opts.ball_restarts > 0) {
    BallMaxOptions bo;
    static_cast<AscentOptions&>(bo) = opts;
    bo.restarts = opts.ball_restarts;
    Params pb = p;
    BallMaxResult ball = maximize_ball_radial(pb, opts.ball_nodes, bo);
    inits.push_back(restrict_to_free(ball_to_domain(*field, ball.argmax).values));
    labels.push_back("transported ball argmax");
  }
  int extra = std::max(0, opts.restarts - static_cast<int>(inits.size()));
  auto shapes = radial_starts(p, extra, opts.seed, 0);
  for (const auto& s : shapes) {
    auto v = RadialProfile::sample(radial_grid(2048), s.f);
    inits.push_back(restrict_to_free(ball_to_domain(*field, v).values));
    labels.push_back("transported " + s.label);
  }
  if (inits.empty()) throw std::invalid_argument("domain maximizer: no starts");

  std::vector<AscentRun> runs(inits.size());
  parallel_for(static_cast<int>(inits.size()), opts.threads,
               [&](int i) { runs[i] = ascend(P, inits[i], opts, {}); });
  int best = select_best(runs);
  if (best < 0) throw std::runtime_error("domain maximizer: every start failed");
  fill_summaries(res, runs, labels);
  for (const auto& run : runs) {
    if (run.failed) {
      res.start_results.emplace_back();
      continue;
    }
    res.start_results.emplace_back(mesh, lift(run.x));
  }
  res.best_start = best;
  res.argmax = res.start_results[best];
  res.value = eval_F_grid(p, res.argmax);
  res.norm = dirichlet_energy(res.argmax);
  res.iterations = runs[best].iterations;
  res.history = runs[best].history;
  res.stationarity = runs[best].stationarity;
  res.converged = runs[best].converged;
  return res;
}

std::vector<double> default_exclusion_radii() { return {0.4, 0.2, 0.1, 0.05}; }

std::string ConcentrationReport::verdict() const {
  if (!concentrating) return "not_concentrating";
  return "concentrating_at(" + std::to_string(x.x) + "," + std::to_string(x.y) + ")";
}

namespace {

template <class U, class Tail>
ConcentrationReport build_report(const std::vector<U>& family, Point x, const std::vector<double>& radii,
                                 double threshold, const Tail& tail) {
  if (family.size() < 4) throw std::invalid_argument("concentration report: need at least 4 members");
  if (radii.empty()) throw std::invalid_argument("concentration report: need an exclusion radius");
  ConcentrationReport rep;
  rep.x = x;
  rep.radii = radii;
  rep.threshold = threshold;
  for (const auto& u : family) {
    std::vector<double> t;
    for (double rho : radii) t.push_back(tail(u, rho));
    rep.tails.push_back(std::move(t));
    rep.norms.push_back(dirichlet_energy(u));
    rep.l2_norms.push_back(l2_norm_sq(u));
  }
  const auto& last = rep.tails.back();
  bool small = std::all_of(last.begin(), last.end(), [&](double v) { return v < threshold; });
  rep.concentrating = small && std::abs(rep.norms.back() - 1.0) < threshold;
  rep.tails_decreasing = true;
  for (std::size_t j = 0; j < radii.size(); ++j) {
    for (std::size_t i = 1; i < family.size(); ++i) {
      if (!(rep.tails[i][j] < rep.tails[i - 1][j])) rep.tails_decreasing = false;
    }
  }
  return rep;
}

}  // namespace

ConcentrationReport concentration_report(const std::vector<RadialProfile>& family, const std::vector<double>& radii,
                                         double threshold) {
  return build_report(family, Point{0.0, 0.0}, radii, threshold,
                      [](const RadialProfile& u, double rho) { return dirichlet_energy_outside(u, rho); });
}

ConcentrationReport concentration_report(const std::vector<GridFunction>& family, Point x,
                                         const std::vector<double>& radii, double threshold) {
  return build_report(family, x, radii, threshold,
                      [x](const GridFunction& u, double rho) { return dirichlet_energy_outside(u, x, rho); });
}

namespace {

void fill_levels(GapReport& g, const Params& p, const GapOptions& opts) {
  if (!p.on_boundary) throw std::invalid_argument("gap report needs alpha/(4 pi) + beta/2 = 1");
  g.params = p;
  g.ball_level = kPi * std::exp(1.0) / p.a();
  MoserFamily fam = concentrating_family_F(p, dyadic_schedule(opts.family_kmin, opts.family_kmax));
  Extrapolation ex = extrapolate_family(fam);
  g.family_level = ex.estimate;
  g.family_spread = ex.spread();
  g.family_name = fam.name;
  g.threshold = opts.threshold;
}

void finish(GapReport& g) {
  g.margin = g.f_sup_estimate - g.f_delta_estimate;
  g.attained = g.margin > g.threshold;
}

}  // namespace

GapReport gap_report_ball(const Params& p, std::size_t n, const GapOptions& opts) {
  GapReport g;
  fill_levels(g, p, opts);
  g.domain = "unit ball";
  g.incenter = 1.0;
  g.f_delta_estimate = g.ball_level;
  BallMaxResult r = maximize_ball_radial(p, n, opts.ball);
  g.f_sup_estimate = r.value;
  g.iterations = r.iterations;
  g.stationarity = r.stationarity;
  finish(g);
  return g;
}

GapReport gap_report(const Params& p, const GreensField& field, const GapOptions& opts) {
  if (!field.mesh) throw std::invalid_argument("gap report: missing Greens field");
  if (norm(field.pole) > 1e-12) throw std::invalid_argument("gap report: the Greens field must have its pole at 0");
  GapReport g;
  fill_levels(g, p, opts);
  g.domain = "mesh";
  g.incenter = field.incenter;
  g.f_delta_estimate = std::pow(field.incenter, 2.0 - p.beta) * g.ball_level;
  DomainMaxOptions dopt = opts.domain;
  dopt.field = &field;
  DomainMaxResult r = maximize_domain(p, field.mesh, dopt);
  g.f_sup_estimate = r.value;
  g.iterations = r.iterations;
  g.stationarity = r.stationarity;
  finish(g);
  return g;
}

}  // namespace mtx
