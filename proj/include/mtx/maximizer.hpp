#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mtx/greens.hpp"
#include "mtx/grid.hpp"
#include "mtx/params.hpp"
#include "mtx/radial.hpp"

namespace mtx {

struct AscentOptions {
  int max_iter = 5000;
  double tol = 1e-6;            // stop when the projected gradient ratio drops below
  double exponent_cap = 700.0;  // steps with alpha u^2 above this are rejected
  int restarts = 8;
  int threads = 0;              // 0: hardware concurrency
  unsigned seed = 0;
  bool record_history = true;
};

// Per-start accounting, in restart order.
struct StartSummary {
  std::string label;
  double initial_value = 0.0;
  double final_value = 0.0;
  int iterations = 0;
  double stationarity = 0.0;
  bool failed = false;
};

template <class Argmax>
struct MaximizerResult {
  Argmax argmax;
  double value = 0.0;
  double norm = 0.0;          // Dirichlet energy of argmax
  int iterations = 0;         // of the selected start
  int restarts = 0;           // starts actually run
  int best_start = -1;
  std::vector<double> history;
  double stationarity = 0.0;  // |d_t|_K / |d|_K at exit, d = K^{-1} grad F
  bool converged = false;
  std::vector<StartSummary> starts;
  std::vector<Argmax> start_results;  // final iterate of every start
  std::vector<std::string> warnings;
};

using BallMaxResult = MaximizerResult<RadialProfile>;
using DomainMaxResult = MaximizerResult<GridFunction>;

struct BallMaxOptions : AscentOptions {
  GridKind grid = GridKind::geometric;
  double first_node = 1e-8;
  std::vector<RadialProfile> warm_starts;  // e.g. the argmax at a neighbouring beta
  // Called with every accepted iterate of every start (sequential runs only
  // when set, so callers need no locking).
  std::function<void(const RadialProfile&, double)> on_accept;
};

// Ascent on the unit Dirichlet sphere of piecewise-linear radial profiles with
// n cells. The returned argmax is the rearrangement of the best final iterate.
BallMaxResult maximize_ball_radial(const Params& p, std::size_t n, const BallMaxOptions& opts = {});

struct DomainMaxOptions : AscentOptions {
  std::size_t ball_nodes = 4096;
  int ball_restarts = 8;
  // Precomputed field with pole at the origin; solved on demand otherwise.
  const GreensField* field = nullptr;
  std::vector<GridFunction> warm_starts;
};

DomainMaxResult maximize_domain(const Params& p, MeshPtr mesh, const DomainMaxOptions& opts = {});

struct ConcentrationReport {
  Point x;
  std::vector<double> radii;                // exclusion radii
  std::vector<std::vector<double>> tails;   // tails[member][radius]
  std::vector<double> norms;                // Dirichlet energies
  std::vector<double> l2_norms;             // squared L2 norms
  double threshold = 0.02;
  bool concentrating = false;
  bool tails_decreasing = false;  // every radius, along the whole sequence
  std::string verdict() const;
};

std::vector<double> default_exclusion_radii();  // 0.4, 0.2, 0.1, 0.05

// Radial members are centred at the origin.
ConcentrationReport concentration_report(const std::vector<RadialProfile>& family,
                                         const std::vector<double>& radii = default_exclusion_radii(),
                                         double threshold = 0.02);
ConcentrationReport concentration_report(const std::vector<GridFunction>& family, Point x,
                                         const std::vector<double>& radii = default_exclusion_radii(),
                                         double threshold = 0.02);

struct GapReport {
  Params params;
  std::string domain;
  double f_sup_estimate = 0.0;
  double f_delta_estimate = 0.0;  // I^{2-beta} * ball_level
  double ball_level = 0.0;        // pi e / a
  double family_level = 0.0;      // extrapolated limit of the built-in family
  double family_spread = 0.0;
  std::string family_name;
  double incenter = 1.0;
  double margin = 0.0;
  double threshold = 0.0;
  bool attained = false;
  int iterations = 0;
  double stationarity = 0.0;
};

struct GapOptions {
  BallMaxOptions ball;
  DomainMaxOptions domain;
  double threshold = 0.0;
  int family_kmin = 4, family_kmax = 20;
};

GapReport gap_report_ball(const Params& p, std::size_t n = 4096, const GapOptions& opts = {});
// field must have its pole at the origin.
GapReport gap_report(const Params& p, const GreensField& field, const GapOptions& opts = {});

}  // namespace mtx
