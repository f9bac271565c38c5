#include "delaunay.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <stdexcept>

namespace mtx::detail {

namespace {

using LD = long double;

LD orient(const Point& a, const Point& b, const Point& c) {
  return (static_cast<LD>(b.x) - a.x) * (static_cast<LD>(c.y) - a.y) -
         (static_cast<LD>(b.y) - a.y) * (static_cast<LD>(c.x) - a.x);
}

// > 0 when d lies inside the circumcircle of the ccw triangle abc.
LD incircle(const Point& a, const Point& b, const Point& c, const Point& d) {
  LD adx = static_cast<LD>(a.x) - d.x, ady = static_cast<LD>(a.y) - d.y;
  LD bdx = static_cast<LD>(b.x) - d.x, bdy = static_cast<LD>(b.y) - d.y;
  LD cdx = static_cast<LD>(c.x) - d.x, cdy = static_cast<LD>(c.y) - d.y;
  LD ad = adx * adx + ady * ady, bd = bdx * bdx + bdy * bdy, cd = cdx * cdx + cdy * cdy;
  return adx * (bdy * cd - bd * cdy) - ady * (bdx * cd - bd * cdx) + ad * (bdx * cdy - bdy * cdx);
}

struct Tri {
  std::array<int, 3> v;
  std::array<int, 3> n;  // n[k] is across the edge opposite v[k]
};

class Builder {
 public:
  explicit Builder(std::vector<Point> p) : p_(std::move(p)) {}

  std::vector<std::array<int, 3>> run() {
    const int n = static_cast<int>(p_.size());
    double xmin = p_[0].x, xmax = xmin, ymin = p_[0].y, ymax = ymin;
    for (const auto& q : p_) {
      xmin = std::min(xmin, q.x);
      xmax = std::max(xmax, q.x);
      ymin = std::min(ymin, q.y);
      ymax = std::max(ymax, q.y);
    }
    double cx = 0.5 * (xmin + xmax), cy = 0.5 * (ymin + ymax);
    double span = std::max({xmax - xmin, ymax - ymin, 1e-300}) * 1e4;
    p_.push_back({cx - 2.0 * span, cy - span});
    p_.push_back({cx + 2.0 * span, cy - span});
    p_.push_back({cx, cy + 2.0 * span});
    t_.push_back({{n, n + 1, n + 2}, {-1, -1, -1}});

    // Spatially coherent insertion order for short walks.
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    auto cell = [&](int i) {
      int gx = static_cast<int>(1023.0 * (p_[i].x - xmin) / std::max(xmax - xmin, 1e-300));
      int gy = static_cast<int>(1023.0 * (p_[i].y - ymin) / std::max(ymax - ymin, 1e-300));
      std::uint64_t d = 0;
      for (int b = 0; b < 10; ++b) {
        d |= static_cast<std::uint64_t>((gx >> b) & 1) << (2 * b);
        d |= static_cast<std::uint64_t>((gy >> b) & 1) << (2 * b + 1);
      }
      return d;
    };
    std::vector<std::uint64_t> key(n);
    for (int i = 0; i < n; ++i) key[i] = cell(i);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return key[a] < key[b]; });
    for (int i : order) insert(i);

    std::vector<std::array<int, 3>> out;
    for (const auto& t : t_) {
      if (t.v[0] >= n || t.v[1] >= n || t.v[2] >= n) continue;
      out.push_back(t.v);
    }
    return out;
  }

 private:
  int locate(const Point& q, int& edge_hit) {
    int t = last_;
    edge_hit = -1;
    for (std::size_t steps = 0; steps < 4 * t_.size() + 16; ++steps) {
      const Tri& tr = t_[t];
      int next = -1;
      int zero = -1, zeros = 0;
      for (int k = 0; k < 3; ++k) {
        const Point& a = p_[tr.v[(k + 1) % 3]];
        const Point& b = p_[tr.v[(k + 2) % 3]];
        LD o = orient(a, b, q);
        if (o < 0) {
          next = tr.n[k];
          break;
        }
        if (o == 0) {
          zero = k;
          ++zeros;
        }
      }
      if (next < 0) {
        if (zeros >= 2) throw std::runtime_error("delaunay: duplicate point");
        edge_hit = zero;
        last_ = t;
        return t;
      }
      t = next;
    }
    throw std::runtime_error("delaunay: point location failed");
  }

  void set_neighbor(int t, int old_nb, int new_nb) {
    if (t < 0) return;
    for (int k = 0; k < 3; ++k) {
      if (t_[t].n[k] == old_nb) {
        t_[t].n[k] = new_nb;
        return;
      }
    }
  }

  int opposite_index(int t, int nb) const {
    for (int k = 0; k < 3; ++k) {
      if (t_[t].n[k] == nb) return k;
    }
    return -1;
  }

  void insert(int pi) {
    int edge = -1;
    int t = locate(p_[pi], edge);
    std::vector<int> stack;
    if (edge < 0) {
      Tri old = t_[t];
      int a = old.v[0], b = old.v[1], c = old.v[2];
      int t0 = t, t1 = static_cast<int>(t_.size()), t2 = t1 + 1;
      t_[t0] = {{pi, b, c}, {old.n[0], t1, t2}};
      t_.push_back({{pi, c, a}, {old.n[1], t2, t0}});
      t_.push_back({{pi, a, b}, {old.n[2], t0, t1}});
      set_neighbor(old.n[1], t, t1);
      set_neighbor(old.n[2], t, t2);
      stack = {t0, t1, t2};
    } else {
      // Point on the edge (b, c) opposite a = v[edge]: split both sides.
      Tri old = t_[t];
      int k = edge;
      int a = old.v[k], b = old.v[(k + 1) % 3], c = old.v[(k + 2) % 3];
      int nb_ca = old.n[(k + 1) % 3], nb_ab = old.n[(k + 2) % 3];
      int u = old.n[k];
      int t0 = t, t1 = static_cast<int>(t_.size());
      if (u < 0) {
        t_[t0] = {{pi, c, a}, {nb_ca, t1, -1}};
        t_.push_back({{pi, a, b}, {nb_ab, -1, t0}});
        set_neighbor(nb_ab, t, t1);
        stack = {t0, t1};
      } else {
        Tri ou = t_[u];
        int d = ou.v[opposite_index(u, t)];
        int nb_bd = ou.n[opposite_of(ou, c)], nb_dc = ou.n[opposite_of(ou, b)];
        int t2 = t1 + 1, t3 = u;
        t_[t0] = {{pi, c, a}, {nb_ca, t1, t3}};
        t_.push_back({{pi, a, b}, {nb_ab, t2, t0}});
        t_.push_back({{pi, b, d}, {nb_bd, t3, t1}});
        t_[t3] = {{pi, d, c}, {nb_dc, t0, t2}};
        set_neighbor(nb_ab, t, t1);
        set_neighbor(nb_bd, u, t2);
        stack = {t0, t1, t2, t3};
      }
    }
    while (!stack.empty()) {
      int tt = stack.back();
      stack.pop_back();
      legalize(tt, pi, stack);
    }
  }

  static int opposite_of(const Tri& tr, int vertex) {
    for (int k = 0; k < 3; ++k) {
      if (tr.v[k] == vertex) return k;
    }
    return -1;
  }

  // Lawson flip of the edge opposite pi in triangle tt.
  void legalize(int tt, int pi, std::vector<int>& stack) {
    Tri& tr = t_[tt];
    int k = opposite_of(tr, pi);
    int nb = tr.n[k];
    if (nb < 0) return;
    int a = tr.v[(k + 1) % 3], b = tr.v[(k + 2) % 3];
    Tri& tn = t_[nb];
    int kn = opposite_index(nb, tt);
    int d = tn.v[kn];
    bool flip = incircle(p_[tr.v[0]], p_[tr.v[1]], p_[tr.v[2]], p_[d]) > 0;
    if (!flip) return;
    // Neighbors: tr has edges (pi,a) opposite b and (b,pi) opposite a.
    int n_pa = tr.n[(k + 2) % 3];  // opposite b
    int n_bp = tr.n[(k + 1) % 3];  // opposite a
    // In tn (vertices d, b, a ccw from kn): edge (d,b) opposite a, edge (a,d) opposite b.
    int ia = opposite_of(tn, a), ib = opposite_of(tn, b);
    int n_db = tn.n[ia];
    int n_ad = tn.n[ib];
    int t1 = tt, t2 = nb;
    t_[t1] = {{pi, a, d}, {n_ad, t2, n_pa}};
    t_[t2] = {{pi, d, b}, {n_db, n_bp, t1}};
    set_neighbor(n_bp, t1, t2);
    set_neighbor(n_ad, t2, t1);
    stack.push_back(t1);
    stack.push_back(t2);
  }

  std::vector<Point> p_;
  std::vector<Tri> t_;
  int last_ = 0;
};

}  // namespace

std::vector<std::array<int, 3>> delaunay(const std::vector<Point>& pts) {
  if (pts.size() < 3) throw std::invalid_argument("delaunay: need at least three points");
  Builder b(pts);
  return b.run();
}

}  // namespace mtx::detail
