#pragma once

#include <functional>
#include <string>
#include <vector>

#include "mtx/greens.hpp"
#include "mtx/grid.hpp"
#include "mtx/params.hpp"
#include "mtx/radial.hpp"

namespace mtx {

// T_a u (x) = sqrt(a) u(|x|^{1/a}): nodes r -> r^a, values scaled by sqrt(a).
RadialProfile transform_Ta(double a, const RadialProfile& u);
// T_{1/a}: nodes r -> r^{1/a}, values divided by sqrt(a). Same a in (0, 1].
RadialProfile inverse_transform_Ta(double a, const RadialProfile& u);

struct IdentityCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  double relative_error() const;  // |lhs - rhs| / (1 + |lhs|)
};
// F(u) against (1/a) J(T_a u) + pi/a - 2 pi/(2 - beta); needs p on the boundary line.
IdentityCheck check_Ta_identity(const Params& p, const RadialProfile& u);

// P_x v (y) = v(e^{-2 pi G(y)}) at every vertex.
GridFunction ball_to_domain(const GreensField& field, const RadialProfile& v);

struct DomainToBall {
  RadialProfile profile;
  double s = 0.0;
  double t = 0.0, delta = 0.0, a = 0.0;
  double lambda = 0.0;         // rho = I e^{-2 pi lambda}
  double rho = 0.0, eps = 0.0; // B_{rho-eps} in {u >= s} in B_{rho+eps}
  double sigma = 0.0, tau = 0.0;
  double incenter = 0.0;
  double eccentricity = 0.0;   // outradius / inradius - 1 of {u >= s}
  int iterations = 0;
  double scale() const { return a / delta; }
};

// Radial profile on B_1 built from u: the rearrangement of u on {u >= s}
// squeezed into B_delta, spliced with -(s / (2 pi t)) log r outside.
DomainToBall domain_to_ball(const GridFunction& u, double s, const GreensField& field, double max_eccentricity = 0.25);

// Plateau sqrt(L / 2 pi) on [0, eps], then log(1/r) / sqrt(2 pi L), L = log(1/eps),
// on log-spaced nodes, rescaled to unit Dirichlet energy.
RadialProfile moser_profile(double eps, double log_step = 0.005);

enum class FamilyKind { standard_J, transformed_F };
const char* to_string(FamilyKind k);

using FamilyGenerator = std::function<RadialProfile(double eps)>;

struct MoserFamily {
  FamilyKind kind = FamilyKind::standard_J;
  Params params;
  std::vector<double> epsilons;
  std::vector<RadialProfile> members;
  std::vector<double> values;  // J (standard) or F (transformed) per member
  std::string name;
};

MoserFamily standard_family(const std::vector<double>& epsilons);
// members T_{1/a} m_eps; p must lie on the boundary line
MoserFamily concentrating_family_F(const Params& p, const std::vector<double>& epsilons);
MoserFamily make_family(const Params& p, const std::vector<double>& epsilons, const FamilyGenerator& gen,
                        const std::string& name);

// eps = 2^-k for k in [kmin, kmax]
std::vector<double> dyadic_schedule(int kmin, int kmax);

struct Extrapolation {
  double estimate = 0.0;           // polynomial in 1/L through the last `points` values
  std::vector<double> diagnostics;  // same with points - 1 and points + 1 (when available)
  int points = 0;
  double spread() const;           // max |diagnostic - estimate|
};
// Extrapolates y(x) to x = 0 with the interpolating polynomial through the
// last `points` samples (x is typically 1 / log(1/eps)).
Extrapolation extrapolate_to_zero(const std::vector<double>& x, const std::vector<double>& y, int points = 3);
Extrapolation extrapolate_family(const MoserFamily& family, int points = 3);

}  // namespace mtx
