#include "mtx/rearrangement.hpp"

#include <cmath>

namespace mtx {

namespace {

void require_nonnegative(const std::vector<double>& v) {
  for (double x : v) {
    if (x < 0.0) throw std::invalid_argument("rearrangement needs u >= 0; take |u| first");
  }
}

// Exact distribution of a piecewise-linear function between consecutive
// nodal levels: mu = c0 + c1 s + c2 s^2 with s = levels[k] - t on interval k.
// The local variable keeps every piece's coefficients bounded by its area.
struct Distribution {
  std::vector<double> levels;  // distinct nodal values, descending
  std::vector<std::array<double, 3>> quad;  // per interval (levels[k+1], levels[k])
  std::vector<double> full;    // difference array of whole-piece areas

  explicit Distribution(std::vector<double> values) : levels(std::move(values)) {
    std::sort(levels.begin(), levels.end(), std::greater<>());
    levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
    quad.assign(levels.size() > 1 ? levels.size() - 1 : 0, {0.0, 0.0, 0.0});
    full.assign(levels.size(), 0.0);
  }
  std::size_t index_of(double x) const {
    return static_cast<std::size_t>(std::lower_bound(levels.begin(), levels.end(), x, std::greater<>()) - levels.begin());
  }
  // piece of area A counts fully for t < lo
  void add_full(double lo, double A) {
    std::size_t k = index_of(lo);
    if (k + 1 < levels.size()) full[k] += A;
  }
  // coef(top) gives the local coefficients on each interval inside (lo, hi)
  template <class Coef>
  void add_quad(double lo, double hi, Coef coef) {
    for (std::size_t k = index_of(hi), ke = index_of(lo); k < ke; ++k) {
      auto c = coef(levels[k]);
      quad[k][0] += c[0];
      quad[k][1] += c[1];
      quad[k][2] += c[2];
    }
  }
  void finish() {
    double acc = 0.0;
    for (std::size_t k = 0; k < quad.size(); ++k) {
      acc += full[k];
      quad[k][0] += acc;
    }
  }
  double eval(std::size_t k, double t) const {
    double x = levels[k] - t;
    return quad[k][0] + x * (quad[k][1] + x * quad[k][2]);
  }
};

Distribution distribution(const RadialProfile& u) {
  const auto& r = u.nodes();
  const auto& v = u.values();
  Distribution d(v);
  for (std::size_t c = 0; c + 1 < r.size(); ++c) {
    double u0 = v[c], u1 = v[c + 1], r0 = r[c], r1 = r[c + 1];
    double lo = std::min(u0, u1), hi = std::max(u0, u1);
    d.add_full(lo, kPi * (r1 * r1 - r0 * r0));
    if (u0 == u1) continue;
    // crossing radius r(top - s) = rt - q s
    double q = (r1 - r0) / (u1 - u0);
    double sg = u0 > u1 ? 1.0 : -1.0;
    double base = u0 > u1 ? -r0 * r0 : r1 * r1;
    d.add_quad(lo, hi, [&](double top) {
      double rt = r0 + q * (top - u0);
      return std::array<double, 3>{kPi * (base + sg * rt * rt), -kPi * sg * 2.0 * rt * q, kPi * sg * q * q};
    });
  }
  d.finish();
  return d;
}

Distribution distribution(const GridFunction& u) {
  const auto& M = *u.mesh;
  Distribution d(u.values);
  for (std::size_t k = 0; k < M.num_triangles(); ++k) {
    const auto& tri = M.triangles()[k];
    double x[3] = {u.values[tri[0]], u.values[tri[1]], u.values[tri[2]]};
    std::sort(x, x + 3, std::greater<>());
    double a = x[0], b = x[1], c = x[2];
    double A = M.triangle_area(static_cast<int>(k));
    d.add_full(c, A);
    // K (a - t)^2 on (b, a) and A - K' (t - c)^2 on (c, b)
    if (a > b) {
      double K = A / ((a - b) * (a - c));
      d.add_quad(b, a, [&](double top) {
        double e = a - top;
        return std::array<double, 3>{K * e * e, 2.0 * K * e, K};
      });
    }
    if (b > c) {
      double K = A / ((a - c) * (b - c));
      d.add_quad(c, b, [&](double top) {
        double e = top - c;
        return std::array<double, 3>{A - K * e * e, 2.0 * K * e, -K};
      });
    }
  }
  d.finish();
  return d;
}

// Star profile on [0, R] from an exact distribution, with levels inserted
// until the piecewise-linear star reproduces mu to tol between nodes.
RadialProfile star_from_distribution(const Distribution& d, double R, double tol) {
  const auto& L = d.levels;
  std::vector<double> rn{0.0}, un{L[0]};
  auto push = [&](double area, double t) {
    double rho = std::sqrt(std::max(area, 0.0) / kPi);
    if (rho <= rn.back()) {
      un.back() = std::min(un.back(), t);
      return;
    }
    rn.push_back(rho);
    un.push_back(t);
  };
  struct Seg { double t0, a0, t1, a1; int depth; };
  for (std::size_t k = 0; k + 1 < L.size(); ++k) {
    double th = L[k], tl = L[k + 1];
    // top of the interval (a plateau at L[k] shows up as a jump here)
    push(d.eval(k, th), th);
    std::vector<Seg> stack{{th, d.eval(k, th), tl, d.eval(k, tl), 0}};
    while (!stack.empty()) {
      Seg s = stack.back();
      stack.pop_back();
      double tm = 0.5 * (s.t0 + s.t1);
      double am = d.eval(k, tm);
      double rl = 0.5 * (std::sqrt(std::max(s.a0, 0.0) / kPi) + std::sqrt(std::max(s.a1, 0.0) / kPi));
      if (std::abs(kPi * rl * rl - am) <= tol || s.depth >= 40) {
        push(s.a1, s.t1);
      } else {
        // left half on top of the stack so nodes come out in order
        stack.push_back({tm, am, s.t1, s.a1, s.depth + 1});
        stack.push_back({s.t0, s.a0, tm, am, s.depth + 1});
      }
    }
  }
  // the bottom level is 0 (zero trace); pad with zeros out to R
  if (rn.back() < R) {
    rn.push_back(R);
    un.push_back(0.0);
  } else {
    rn.back() = R;
    un.back() = 0.0;
  }
  return RadialProfile(std::move(rn), std::move(un));
}

}  // namespace

double superlevel_area(const RadialProfile& u, double t) {
  const auto& r = u.nodes();
  const auto& v = u.values();
  double a = 0.0;
  for (std::size_t c = 0; c + 1 < r.size(); ++c) {
    double u0 = v[c], u1 = v[c + 1], r0 = r[c], r1 = r[c + 1];
    if (u0 > t && u1 > t) {
      a += kPi * (r1 * r1 - r0 * r0);
    } else if (u0 > t || u1 > t) {
      double rc = r0 + (t - u0) / (u1 - u0) * (r1 - r0);
      a += u0 > t ? kPi * (rc * rc - r0 * r0) : kPi * (r1 * r1 - rc * rc);
    }
  }
  return a;
}

double superlevel_area(const GridFunction& u, double t) {
  const auto& M = *u.mesh;
  const auto& V = M.vertices();
  double a = 0.0;
  for (std::size_t k = 0; k < M.num_triangles(); ++k) {
    const auto& tri = M.triangles()[k];
    std::vector<Point> poly;
    for (int e = 0; e < 3; ++e) {
      int i = tri[e], j = tri[(e + 1) % 3];
      double ui = u.values[i], uj = u.values[j];
      if (ui > t) poly.push_back(V[i]);
      if ((ui > t) != (uj > t)) poly.push_back(V[i] + ((t - ui) / (uj - ui)) * (V[j] - V[i]));
    }
    if (poly.size() >= 3) a += polygon_area(poly);
  }
  return a;
}

RadialProfile rearrange_radial(const RadialProfile& u, double area_tol) {
  require_nonnegative(u.values());
  if (u.nonincreasing()) return u;
  const double R = u.outer_radius();
  return star_from_distribution(distribution(u), R, area_tol * kPi * R * R);
}

RadialProfile rearrange_grid(const GridFunction& u, double area_tol) {
  require_nonnegative(u.values);
  const double area = u.mesh->area();
  return star_from_distribution(distribution(u), std::sqrt(area / kPi), area_tol * area);
}

double energy_below_level(const RadialProfile& u, double t) {
  const auto& r = u.nodes();
  const auto& v = u.values();
  double e = 0.0;
  for (std::size_t c = 0; c + 1 < r.size(); ++c) {
    double u0 = v[c], u1 = v[c + 1], r0 = r[c], r1 = r[c + 1];
    if (u0 == u1) continue;
    double slope = (u1 - u0) / (r1 - r0);
    double a = r0, b = r1;
    if (u0 > t && u1 > t) continue;
    if (u0 > t || u1 > t) {
      double rc = r0 + (t - u0) / slope;
      if (u0 > t) {
        a = rc;
      } else {
        b = rc;
      }
    }
    e += slope * slope * kPi * (b * b - a * a);
  }
  return e;
}

double energy_below_level(const GridFunction& u, double t) {
  const auto& M = *u.mesh;
  const auto& V = M.vertices();
  double e = 0.0;
  for (std::size_t k = 0; k < M.num_triangles(); ++k) {
    const auto& tri = M.triangles()[k];
    Point g = triangle_gradient(u, static_cast<int>(k));
    double gg = dot(g, g);
    if (gg == 0.0) continue;
    std::vector<Point> poly;
    for (int s = 0; s < 3; ++s) {
      int i = tri[s], j = tri[(s + 1) % 3];
      double ui = u.values[i], uj = u.values[j];
      if (ui <= t) poly.push_back(V[i]);
      if ((ui <= t) != (uj <= t)) poly.push_back(V[i] + ((t - ui) / (uj - ui)) * (V[j] - V[i]));
    }
    if (poly.size() >= 3) e += gg * polygon_area(poly);
  }
  return e;
}

TailEnergies polya_szego_tail(const RadialProfile& u, double t) {
  if (!(t > 0.0)) throw std::invalid_argument("polya-szego tail: t must be positive");
  RadialProfile s = rearrange_radial(u);
  double eu = dirichlet_energy(u), es = dirichlet_energy(s);
  TailEnergies r;
  r.below = energy_below_level(u, t);
  r.below_star = energy_below_level(s, t);
  // level sets of piecewise-linear functions carry no energy, so >= t is the complement
  r.above = eu - r.below;
  r.above_star = es - r.below_star;
  return r;
}

TailEnergies polya_szego_tail(const GridFunction& u, double t) {
  if (!(t > 0.0)) throw std::invalid_argument("polya-szego tail: t must be positive");
  RadialProfile s = rearrange_grid(u);
  double eu = dirichlet_energy(u), es = dirichlet_energy(s);
  TailEnergies r;
  r.below = energy_below_level(u, t);
  r.below_star = energy_below_level(s, t);
  r.above = eu - r.below;
  r.above_star = es - r.below_star;
  return r;
}

}  // namespace mtx
