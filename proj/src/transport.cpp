#include "mtx/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "mtx/rearrangement.hpp"

namespace mtx {

namespace {

void check_a(double a) {
  if (!(a > 0.0) || a > 1.0) throw std::invalid_argument("T_a needs a in (0, 1]");
}

RadialProfile power_regrid(const RadialProfile& u, double power, double value_scale) {
  std::vector<double> r(u.size()), v(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    r[i] = i == 0 ? 0.0 : std::pow(u.nodes()[i], power);
    v[i] = value_scale * u.values()[i];
    if (i > 0 && !(r[i] > r[i - 1])) throw std::runtime_error("T_a re-gridding collapsed nodes (underflow)");
  }
  return RadialProfile(std::move(r), std::move(v));
}

}  // namespace

RadialProfile transform_Ta(double a, const RadialProfile& u) {
  check_a(a);
  if (a == 1.0) return u;
  if (u.outer_radius() != 1.0) throw std::invalid_argument("T_a acts on profiles over B_1");
  return power_regrid(u, a, std::sqrt(a));
}

RadialProfile inverse_transform_Ta(double a, const RadialProfile& u) {
  check_a(a);
  if (a == 1.0) return u;
  if (u.outer_radius() != 1.0) throw std::invalid_argument("T_a acts on profiles over B_1");
  return power_regrid(u, 1.0 / a, 1.0 / std::sqrt(a));
}

double IdentityCheck::relative_error() const { return std::abs(lhs - rhs) / (1.0 + std::abs(lhs)); }

IdentityCheck check_Ta_identity(const Params& p, const RadialProfile& u) {
  if (!p.on_boundary) throw std::invalid_argument("T_a identity needs alpha/(4 pi) + beta/2 = 1");
  double a = p.a();
  IdentityCheck c;
  c.lhs = eval_F_radial(p, u);
  c.rhs = eval_J_radial(transform_Ta(a, u)) / a + kPi / a - 2.0 * kPi / (2.0 - p.beta);
  return c;
}

GridFunction ball_to_domain(const GreensField& field, const RadialProfile& v) {
  if (v.outer_radius() != 1.0) throw std::invalid_argument("ball_to_domain needs a profile on B_1");
  const auto& M = *field.mesh;
  std::vector<double> out(M.num_vertices(), 0.0);
  for (std::size_t i = 0; i < out.size(); ++i) {
    int vi = static_cast<int>(i);
    if (M.is_boundary(vi)) continue;
    double g = field.G(vi);
    double x = std::isinf(g) ? 0.0 : std::min(1.0, std::exp(-2.0 * kPi * g));
    out[i] = v(x);
  }
  return GridFunction(field.mesh, std::move(out));
}

DomainToBall domain_to_ball(const GridFunction& u, double s, const GreensField& field, double max_ecc) {
  if (u.mesh != field.mesh) throw std::invalid_argument("domain_to_ball: field and function live on different meshes");
  if (!(s > 0.0) || s > 1.0) throw std::invalid_argument("domain_to_ball needs 0 < s <= 1");
  DomainToBall r;
  r.s = s;
  r.incenter = field.incenter;
  LevelGeometry lg = level_geometry(u, s, field.pole);
  if (lg.segments == 0 || lg.area <= 0.0) throw std::invalid_argument("domain_to_ball: {u >= s} is empty");
  if (lg.touches_boundary) throw std::invalid_argument("domain_to_ball: {u >= s} touches the boundary");
  r.eccentricity = lg.inradius > 0.0 ? lg.outradius / lg.inradius - 1.0 : std::numeric_limits<double>::infinity();
  if (!(r.eccentricity <= max_ecc)) {
    throw std::invalid_argument("domain_to_ball: {u >= s} is not disk-like about the pole (eccentricity " +
                                std::to_string(r.eccentricity) + ")");
  }
  r.rho = 0.5 * (lg.inradius + lg.outradius);
  r.eps = 0.5 * (lg.outradius - lg.inradius);
  const double I = field.incenter;
  r.lambda = -std::log(r.rho / I) / (2.0 * kPi);
  // tau(t) + sigma(t) = rho - eps with sigma measured on the level set of G
  double sigma = 0.0;
  double t = r.lambda;
  for (int it = 0; it < 50; ++it) {
    double q = 1.0 - (r.eps + sigma) / r.rho;
    if (!(q > 0.0)) throw std::runtime_error("domain_to_ball: matching rule has no solution (sigma + eps >= rho)");
    double tn = r.lambda - std::log(q) / (2.0 * kPi);
    LevelSet ls = level_set(field, tn);
    double sn = ls.sigma;
    r.iterations = it + 1;
    bool done = std::abs(tn - t) <= 1e-12 * (1.0 + tn) && std::abs(sn - sigma) <= 1e-12 * ls.tau;
    t = tn;
    sigma = sn;
    if (done) break;
  }
  r.t = t;
  r.sigma = sigma;
  r.tau = I * std::exp(-2.0 * kPi * t);
  r.delta = std::exp(-2.0 * kPi * t);
  r.a = std::sqrt(lg.area / kPi);
  // inner part: u* on [0, a] squeezed to [0, delta]
  RadialProfile star = rearrange_grid(u);
  std::vector<double> rn, vn;
  const double k = r.delta / r.a;
  for (std::size_t i = 0; i < star.size(); ++i) {
    double rho = star.nodes()[i];
    if (rho >= r.a) break;
    // nodes a few ulps apart can collapse after scaling
    if (!rn.empty() && rho * k <= rn.back()) continue;
    rn.push_back(rho * k);
    vn.push_back(std::max(star.values()[i], s));
  }
  // outer part: -(s / (2 pi t)) log r on log-spaced nodes from delta to 1
  const int m = std::max(8, static_cast<int>(std::ceil(2.0 * kPi * t / 0.005)));
  for (int i = 0; i <= m; ++i) {
    double x = i == m ? 1.0 : std::exp(std::log(r.delta) * (1.0 - static_cast<double>(i) / m));
    if (!rn.empty() && x <= rn.back()) continue;
    rn.push_back(x);
    vn.push_back(i == m ? 0.0 : (i == 0 ? s : -s * std::log(x) / (2.0 * kPi * t)));
  }
  r.profile = RadialProfile(std::move(rn), std::move(vn));
  return r;
}

RadialProfile moser_profile(double eps, double log_step) {
  if (!(eps > 0.0) || !(eps < 1.0)) throw std::invalid_argument("moser profile needs eps in (0, 1)");
  if (!(log_step > 0.0)) throw std::invalid_argument("moser profile needs a positive log step");
  const double L = -std::log(eps);
  const int m = std::max(4, static_cast<int>(std::ceil(L / log_step)));
  std::vector<double> r{0.0}, u{std::sqrt(L / (2.0 * kPi))};
  const double c = 1.0 / std::sqrt(2.0 * kPi * L);
  for (int i = 0; i <= m; ++i) {
    double x = i == m ? 1.0 : std::exp(-L * (1.0 - static_cast<double>(i) / m));
    r.push_back(x);
    u.push_back(i == m ? 0.0 : c * (-std::log(x)));
  }
  u[1] = u[0];
  RadialProfile p(std::move(r), std::move(u));
  return p.scaled(1.0 / std::sqrt(dirichlet_energy(p)));
}

const char* to_string(FamilyKind k) { return k == FamilyKind::standard_J ? "standard_J" : "transformed_F"; }

std::vector<double> dyadic_schedule(int kmin, int kmax) {
  if (kmin > kmax || kmin < 1) throw std::invalid_argument("dyadic schedule needs 1 <= kmin <= kmax");
  std::vector<double> e;
  for (int k = kmin; k <= kmax; ++k) e.push_back(std::ldexp(1.0, -k));
  return e;
}

MoserFamily make_family(const Params& p, const std::vector<double>& epsilons, const FamilyGenerator& gen,
                        const std::string& name) {
  for (std::size_t i = 1; i < epsilons.size(); ++i) {
    if (!(epsilons[i] < epsilons[i - 1])) throw std::invalid_argument("family schedule must decrease");
  }
  MoserFamily f;
  f.params = p;
  f.epsilons = epsilons;
  f.name = name;
  f.kind = FamilyKind::transformed_F;
  f.members.resize(epsilons.size());
  f.values.resize(epsilons.size());
  for (std::size_t i = 0; i < epsilons.size(); ++i) {
    f.members[i] = gen(epsilons[i]);
    f.values[i] = eval_F_radial(p, f.members[i]);
  }
  return f;
}

MoserFamily standard_family(const std::vector<double>& epsilons) {
  MoserFamily f = make_family(Params::critical(0.0), epsilons, [](double e) { return moser_profile(e); }, "moser");
  f.kind = FamilyKind::standard_J;
  return f;
}

MoserFamily concentrating_family_F(const Params& p, const std::vector<double>& epsilons) {
  if (!p.on_boundary) throw std::invalid_argument("concentrating family needs p on the boundary line");
  const double a = p.a();
  if (-std::log(epsilons.back()) / a > 700.0) throw std::invalid_argument("schedule too deep: eps^(1/a) underflows");
  MoserFamily f = make_family(p, epsilons, [a](double e) {
        // re-gridding is isometric only up to the cell size; restore the unit norm
        RadialProfile v = inverse_transform_Ta(a, moser_profile(e));
        return v.scaled(1.0 / std::sqrt(dirichlet_energy(v)));
      },
                              a == 1.0 ? "moser" : "transformed_moser");
  f.kind = a == 1.0 ? FamilyKind::standard_J : FamilyKind::transformed_F;
  return f;
}

double Extrapolation::spread() const {
  double s = 0.0;
  for (double d : diagnostics) s = std::max(s, std::abs(d - estimate));
  return s;
}

namespace {

// Neville evaluation at 0 of the polynomial through the last k points
double neville_at_zero(const std::vector<double>& x, const std::vector<double>& y, int k) {
  std::vector<double> xs(x.end() - k, x.end()), p(y.end() - k, y.end());
  for (int m = 1; m < k; ++m) {
    for (int i = 0; i + m < k; ++i) {
      p[i] = (xs[i + m] * p[i] - xs[i] * p[i + 1]) / (xs[i + m] - xs[i]);
    }
  }
  return p[0];
}

}  // namespace

Extrapolation extrapolate_to_zero(const std::vector<double>& x, const std::vector<double>& y, int points) {
  if (x.size() != y.size()) throw std::invalid_argument("extrapolation: size mismatch");
  if (points < 1 || static_cast<std::size_t>(points) > x.size()) throw std::invalid_argument("extrapolation: not enough samples");
  Extrapolation e;
  e.points = points;
  e.estimate = neville_at_zero(x, y, points);
  if (points > 1) e.diagnostics.push_back(neville_at_zero(x, y, points - 1));
  if (static_cast<std::size_t>(points) < x.size()) e.diagnostics.push_back(neville_at_zero(x, y, points + 1));
  return e;
}

Extrapolation extrapolate_family(const MoserFamily& f, int points) {
  std::vector<double> x;
  for (double e : f.epsilons) x.push_back(1.0 / -std::log(e));
  return extrapolate_to_zero(x, f.values, points);
}

}  // namespace mtx
