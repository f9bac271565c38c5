#pragma once

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "mtx/grid.hpp"
#include "mtx/radial.hpp"

namespace mtx {

// |{u > t}| for piecewise-linear u (exact)
double superlevel_area(const RadialProfile& u, double t);
double superlevel_area(const GridFunction& u, double t);

// Schwarz rearrangement of a nonnegative radial profile. Nonincreasing inputs
// are returned as is; otherwise star nodes sit at every nodal value of u plus
// adaptively inserted levels until the star's distribution matches that of u
// to area_tol (relative to the disk area) between nodes.
RadialProfile rearrange_radial(const RadialProfile& u, double area_tol = 1e-11);

// Star of a nonnegative grid function on B_R with pi R^2 = |Omega|. Built the
// same way from the exact distribution of the P1 function, whose breakpoints
// are the sorted vertex values.
RadialProfile rearrange_grid(const GridFunction& u, double area_tol = 1e-11);

struct TailEnergies {
  double below_star = 0.0, below = 0.0;
  double above_star = 0.0, above = 0.0;
};
// Energies of u and u* on {. <= t} and {. >= t}.
TailEnergies polya_szego_tail(const RadialProfile& u, double t);
TailEnergies polya_szego_tail(const GridFunction& u, double t);

// Energy of u on {u <= t} / {u >= t}
double energy_below_level(const RadialProfile& u, double t);
double energy_below_level(const GridFunction& u, double t);

template <class T>
struct Atom {
  T value;
  T mass;
};

template <class T>
struct HLSides {
  T lhs;
  T rhs;
};

// int_{f >= a} f g  and  int_{f* >= a} f* g*  on a finite measure space. Atom i
// of f and atom i of g are the same point, so their masses must agree. The
// rearrangements sort by value (ties by index) and keep the masses; rhs merges
// the two step functions on [0, total mass]. Exact for exact T.
template <class T>
HLSides<T> hardy_littlewood_mod(const std::vector<Atom<T>>& f, const std::vector<Atom<T>>& g, const T& a) {
  if (f.size() != g.size()) throw std::invalid_argument("hardy-littlewood: f and g live on different spaces");
  T mf = T(0), mg = T(0);
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (f[i].mass < T(0) || g[i].mass < T(0)) throw std::invalid_argument("hardy-littlewood: negative mass");
    mf += f[i].mass;
    mg += g[i].mass;
  }
  if (mf != mg) throw std::invalid_argument("hardy-littlewood: total masses differ");
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (f[i].mass != g[i].mass) throw std::invalid_argument("hardy-littlewood: paired atoms carry different masses");
  }
  HLSides<T> r{T(0), T(0)};
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (!(f[i].value < a)) r.lhs += f[i].value * g[i].value * f[i].mass;
  }
  auto order = [](const std::vector<Atom<T>>& h) {
    std::vector<std::size_t> idx(h.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t x, std::size_t y) { return h[y].value < h[x].value; });
    return idx;
  };
  auto of = order(f), og = order(g);
  std::size_t i = 0, j = 0;
  T left_f = i < of.size() ? f[of[0]].mass : T(0);
  T left_g = j < og.size() ? g[og[0]].mass : T(0);
  while (i < of.size() && j < og.size()) {
    if (left_f == T(0)) {
      if (++i < of.size()) left_f = f[of[i]].mass;
      continue;
    }
    if (left_g == T(0)) {
      if (++j < og.size()) left_g = g[og[j]].mass;
      continue;
    }
    const T& fv = f[of[i]].value;
    if (fv < a) break;  // f* is nonincreasing, so {f* >= a} is an initial segment
    T step = left_f < left_g ? left_f : left_g;
    r.rhs += fv * g[og[j]].value * step;
    left_f -= step;
    left_g -= step;
  }
  return r;
}

}  // namespace mtx
