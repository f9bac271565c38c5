#pragma once

#include <map>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "mtx/config.hpp"
#include "mtx/io.hpp"
#include "mtx/mesh.hpp"
#include "mtx/radial.hpp"

namespace mtx {

// One measured quantity judged against a tolerance.
struct Check {
  std::string id;
  std::string description;
  double measured = 0.0;
  double allowed = 0.0;
  std::string relation = "<=";  // "<=", ">", "==" (exact)
  bool pass = false;
  std::string detail;
};

Check check_le(std::string id, std::string description, double measured, double allowed, std::string detail = {});
Check check_gt(std::string id, std::string description, double measured, double bound, std::string detail = {});
Check check_exact(std::string id, std::string description, long long violations, std::string detail = {});

struct CheckGroup {
  std::string name;
  std::vector<Check> checks;
  double seconds = 0.0;
  bool pass() const;
};

struct VerifyReport {
  std::vector<CheckGroup> groups;
  bool pass() const;
  Json to_json() const;
};

// Shared state for a verification run: tolerances, seed and a cache of the
// reference meshes.
class VerifyContext {
 public:
  explicit VerifyContext(Tolerances tol = Tolerances::defaults(), unsigned seed = 0, int threads = 0);

  const Tolerances& tol() const { return tol_; }
  unsigned seed() const { return seed_; }
  int threads() const { return threads_; }
  MeshPtr mesh(const std::string& name);

 private:
  Tolerances tol_;
  unsigned seed_;
  int threads_;
  std::map<std::string, MeshPtr> meshes_;
};

// Smooth nonincreasing random profile on the given nodes with unit Dirichlet energy.
RadialProfile random_unit_profile(std::mt19937_64& rng, const std::vector<double>& nodes);

// Each returns one group. Arguments fix the sample sizes and parameter sets.
CheckGroup verify_isometry(VerifyContext& ctx, int count, const std::vector<double>& a_values);
CheckGroup verify_ta_identity(VerifyContext& ctx, int count, const std::vector<double>& betas);
CheckGroup verify_moser_limit(VerifyContext& ctx, const std::vector<double>& betas);
CheckGroup verify_ball_gap(VerifyContext& ctx, const std::vector<double>& betas, std::size_t nodes, int restarts);
CheckGroup verify_energy_law(VerifyContext& ctx, const std::vector<std::string>& meshes, const std::vector<double>& levels);
CheckGroup verify_flux_law(VerifyContext& ctx, const std::vector<std::string>& meshes, const std::vector<double>& levels);
CheckGroup verify_incenter_disk(VerifyContext& ctx, const std::vector<double>& pole_radii);
CheckGroup verify_incenter_reference(VerifyContext& ctx);
CheckGroup verify_incenter_bound(VerifyContext& ctx, const std::vector<std::string>& meshes);
CheckGroup verify_nested_incenter(VerifyContext& ctx, const std::vector<std::string>& meshes, const std::vector<double>& rs);
CheckGroup verify_mass_law(VerifyContext& ctx);
CheckGroup verify_small_disks(VerifyContext& ctx);
CheckGroup verify_transport(VerifyContext& ctx, const std::vector<double>& betas, int count);
CheckGroup verify_transport_norm(VerifyContext& ctx, int count);
CheckGroup verify_boundary_bound(VerifyContext& ctx, const std::vector<double>& betas);
CheckGroup verify_concentration_formula(VerifyContext& ctx, const std::vector<double>& betas);
CheckGroup verify_composition(VerifyContext& ctx, const std::vector<double>& betas, bool include_square);
CheckGroup verify_round_trip(VerifyContext& ctx, double beta);
CheckGroup verify_boundary_degeneration(VerifyContext& ctx, const std::vector<double>& betas);
CheckGroup verify_hardy_littlewood(VerifyContext& ctx, int max_atoms);
CheckGroup verify_rearrangement(VerifyContext& ctx);

std::vector<std::string> verify_suite_names();
// suite: "all" or one of verify_suite_names(); beta picks the boundary-line pair (4 pi (1 - beta/2), beta).
VerifyReport verify_suite(VerifyContext& ctx, const std::string& suite, double beta);

}  // namespace mtx
