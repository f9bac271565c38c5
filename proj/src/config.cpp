#include "mtx/config.hpp"

#include <cmath>

#include "mtx/io.hpp"

namespace mtx {

Tolerances Tolerances::defaults() {
  Tolerances t;
  t.values_ = {
      {"quad_1d", 1e-8},            // 1-D quadrature self-consistency (relative)
      {"quad_2d", 1e-4},            // 2-D evaluation against an oracle (relative)
      {"isometry", 1e-6},           // Dirichlet norm under T_a
      {"identity", 1e-6},           // F against the T_a form of F
      {"moser_limit", 1e-2},        // family extrapolation against its limit
      {"gap_excess", 1e-2},         // required excess of the ball maximum over the concentration level
      {"greens_energy", 2e-2},      // energy of G below a level against the level
      {"greens_flux", 2e-2},        // flux of G through a level curve against 1
      {"incenter", 1e-2},           // conformal incenter against the disk oracle
      {"incenter_bound", 5e-3},     // slack in I <= sqrt(|Omega| / pi)
      {"nested_incenter", 2e-2},    // I of a Green superlevel set against r I
      {"mass_disk", 1e-2},          // level mass ratio on the disk
      {"mass_square", 5e-2},        // level mass ratio on the square, largest level
      {"mass_floor", 1e-7},         // deviations below this count as converged
      {"small_disks", 5e-2},        // sigma / tau at the largest level
      {"transport_slack", 5e-3},    // F(P_0 v) >= I^{2-beta} F(v) (1 - slack)
      {"transport_disk", 1e-2},     // disk: F(P_0 v) against F(v)
      {"transport_norm", 2e-2},     // Dirichlet norm of P_x v against that of v
      {"boundary_disk", 2e-2},      // weighted boundary functional, disk equality
      {"boundary_slack", 2e-2},     // weighted boundary inequality elsewhere
      {"round_trip", 2e-2},         // F through domain_to_ball and back
      {"concentration_formula", 3e-2},  // F(P_0 v) / F(v) against I^{2-beta} along the family
      {"boundary_ratio", 5e-2},     // boundary origin against interior origin, last index
      {"equimeasurability", 1e-8},  // superlevel areas of u and u* (relative to |Omega|)
      {"maximizer_disk", 1e-2},     // domain maximum on the disk against the ball maximum
  };
  return t;
}

double Tolerances::get(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw InputError("unknown tolerance '" + key + "'");
  return it->second;
}

void Tolerances::set(const std::string& key, double value) {
  auto it = values_.find(key);
  if (it == values_.end()) throw InputError("unknown tolerance '" + key + "'");
  if (!std::isfinite(value) || value < 0.0) throw InputError("tolerance '" + key + "' must be a finite number >= 0");
  it->second = value;
}

void Tolerances::apply_override(const std::string& assignment) {
  auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw InputError("tolerance override must look like KEY=VAL, got '" + assignment + "'");
  std::string key = assignment.substr(0, eq);
  std::string val = assignment.substr(eq + 1);
  double v = 0.0;
  try {
    std::size_t pos = 0;
    v = std::stod(val, &pos);
    if (pos != val.size()) throw std::invalid_argument(val);
  } catch (const std::exception&) {
    throw InputError("tolerance override '" + assignment + "': value is not a number");
  }
  set(key, v);
}

}  // namespace mtx
