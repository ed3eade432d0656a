// Brute-force reference implementations. Written against the definitions,
// without the index arithmetic and prefix tricks the library uses.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <set>
#include <vector>

#include "dyadica/dyadic.hpp"
#include "dyadica/grid.hpp"
#include "dyadica/weights.hpp"

namespace oracle {

using dyadica::Axis;
using dyadica::DyadicCube;
using dyadica::DyadicSystem;
using dyadica::GridFunction;

// Cells covered by a cube, found by scanning the whole axis.
inline std::vector<std::size_t> cells_of(const DyadicCube& q) {
  std::vector<std::size_t> out;
  const std::size_t n = q.axis.cells();
  const std::size_t width = n >> q.level;
  for (std::size_t c = 0; c < n; ++c) {
    const std::size_t shifted = (c + n - q.offset) % n;
    if (shifted / width == q.index) out.push_back(c);
  }
  return out;
}

inline bool contains(const DyadicCube& outer, const DyadicCube& inner) {
  const auto a = cells_of(outer);
  for (std::size_t c : cells_of(inner)) {
    if (!std::binary_search(a.begin(), a.end(), c)) return false;
  }
  return true;
}

// Torus distance between two points of [0, 1).
inline double point_distance(double x, double y) {
  double d = std::fmod(std::abs(x - y), 1.0);
  return std::min(d, 1.0 - d);
}

// Closed arc of a cube as [start, start + side] in absolute coordinates.
inline double arc_start(const DyadicCube& q) {
  return std::fmod(static_cast<double>(q.offset) * q.axis.cell_width() + q.index * q.side(), 1.0);
}

// Distance from a closed arc to a point, sampled over the arc's cell grid.
// The nearest point of an arc to an external point is an endpoint, and all
// endpoints here are multiples of h, so scanning the h-grid is exact.
inline double arc_point_distance(const DyadicCube& q, double p) {
  const double h = q.axis.cell_width();
  const std::size_t steps = q.cell_count();
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t <= steps; ++t) best = std::min(best, point_distance(arc_start(q) + t * h, p));
  return best;
}

inline double arc_distance(const DyadicCube& a, const DyadicCube& b) {
  const double h = a.axis.cell_width();
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t <= b.cell_count(); ++t) best = std::min(best, arc_point_distance(a, arc_start(b) + t * h));
  return best;
}

// Scans every J of the system with side(J) >= 2^r side(I).
inline bool is_good(const DyadicCube& cube, int r, double gamma) {
  const DyadicSystem sys(cube.axis, cube.offset);
  for (int level = 0; level <= cube.level - r; ++level) {
    for (std::size_t m = 0; m < sys.cubes_at(level); ++m) {
      const DyadicCube j = sys.cube(level, m);
      const double d = std::min(arc_point_distance(cube, arc_start(j)),
                                arc_point_distance(cube, arc_start(j) + j.side()));
      if (d <= j.side() * std::pow(cube.side() / j.side(), gamma)) return false;
    }
  }
  return true;
}

inline GridFunction haar(const DyadicCube& q) {
  GridFunction h(q.axis);
  const auto cells = cells_of(q);
  // Left half in the shifted frame: the first half of the cube's cells
  // counted from its start point.
  const std::size_t n = q.axis.cells();
  const std::size_t first = (q.offset + q.index * q.cell_count()) % n;
  for (std::size_t c : cells) {
    const std::size_t pos = (c + n - first) % n;
    h[c] = (pos < q.cell_count() / 2 ? 1.0 : -1.0) / std::sqrt(q.side());
  }
  return h;
}

inline GridFunction random_function(const Axis& a, std::mt19937_64& rng) {
  std::normal_distribution<double> n01;
  GridFunction f(a);
  for (auto& v : f.values()) v = n01(rng);
  return f;
}

inline GridFunction random_function(const Axis& a, const Axis& b, std::mt19937_64& rng) {
  std::normal_distribution<double> n01;
  GridFunction f(a, b);
  for (auto& v : f.values()) v = n01(rng);
  return f;
}

inline GridFunction minus_mean(GridFunction f) {
  const double m = f.mean();
  for (auto& v : f.values()) v -= m;
  return f;
}

inline double max_abs_diff(const GridFunction& a, const GridFunction& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

// A_p type suprema: direct scan of every arc (start, length), averaging cell powers afresh.
inline double arc_sup(const dyadica::Weight& w, double e_a, double pow_a, double e_b, double pow_b) {
  const std::size_t n = w.axis().cells();
  double best = 0.0;
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t len = 1; len <= n; ++len) {
      double a = 0.0;
      double b = 0.0;
      for (std::size_t t = 0; t < len; ++t) {
        a += std::pow(w[(s + t) % n], pow_a);
        b += std::pow(w[(s + t) % n], pow_b);
      }
      best = std::max(best, std::pow(a / len, e_a) * std::pow(b / len, e_b));
    }
  }
  return best;
}

inline double ap(const dyadica::Weight& w, double p) { return arc_sup(w, 1.0, 1.0, p - 1.0, 1.0 - p / (p - 1.0)); }

inline double apq(const dyadica::Weight& w, double p, double q) {
  const double pp = p / (p - 1.0);
  return arc_sup(w, 1.0, q, q / pp, -pp);
}

// Strong maximal function over every rectangle of torus arcs.
inline GridFunction strong_maximal(const GridFunction& f) {
  const std::size_t n1 = f.extent(0);
  const std::size_t n2 = f.extent(1);
  GridFunction out(f.axis(0), f.axis(1));
  for (std::size_t s1 = 0; s1 < n1; ++s1) {
    for (std::size_t l1 = 1; l1 <= n1; ++l1) {
      for (std::size_t s2 = 0; s2 < n2; ++s2) {
        for (std::size_t l2 = 1; l2 <= n2; ++l2) {
          double sum = 0.0;
          for (std::size_t a = 0; a < l1; ++a) {
            for (std::size_t b = 0; b < l2; ++b) sum += std::abs(f.at((s1 + a) % n1, (s2 + b) % n2));
          }
          const double avg = sum / static_cast<double>(l1 * l2);
          for (std::size_t a = 0; a < l1; ++a) {
            for (std::size_t b = 0; b < l2; ++b) {
              double& o = out.at((s1 + a) % n1, (s2 + b) % n2);
              o = std::max(o, avg);
            }
          }
        }
      }
    }
  }
  return out;
}

using CellSet = std::set<std::pair<std::size_t, std::size_t>>;

inline CellSet rect_cells(const DyadicCube& q, const DyadicCube& p) {
  CellSet s;
  for (auto a : oracle::cells_of(q)) {
    for (auto b : oracle::cells_of(p)) s.insert({a, b});
  }
  return s;
}

// Enumerates Omega as explicit cell sets and sums over every Haar rectangle
// whose cells all lie inside.
inline double bmo_prod(const GridFunction& b, const dyadica::ProductWeight& w, const dyadica::SystemPair& sp, int lshape_depth) {
  std::vector<CellSet> shapes;
  for (const auto& q : sp.first.haar_cubes()) {
    for (const auto& p : sp.second.haar_cubes()) shapes.push_back(rect_cells(q, p));
  }
  for (const auto& q : sp.first.cubes(1, std::min(lshape_depth, sp.first.max_level() - 1))) {
    for (const auto& p : sp.second.cubes(1, std::min(lshape_depth, sp.second.max_level() - 1))) {
      CellSet s = rect_cells(q.parent(), p);
      const CellSet t = rect_cells(q, p.parent());
      s.insert(t.begin(), t.end());
      shapes.push_back(s);
    }
  }
  const double area = b.axis(0).cell_width() * b.axis(1).cell_width();
  double best = 0.0;
  for (const CellSet& omega : shapes) {
    double mass = 0.0;
    for (const auto& [a, c] : omega) mass += w.at(a, c) * area;
    double sum = 0.0;
    for (const auto& i : sp.first.haar_cubes()) {
      for (const auto& j : sp.second.haar_cubes()) {
        const CellSet r = rect_cells(i, j);
        bool inside = true;
        double wsum = 0.0;
        for (const auto& cell : r) {
          if (!omega.count(cell)) {
            inside = false;
            break;
          }
          wsum += w.at(cell.first, cell.second);
        }
        if (!inside) continue;
        const double c = dyadica::inner_product(b, GridFunction::tensor(oracle::haar(i), oracle::haar(j)));
        sum += c * c / (wsum / static_cast<double>(r.size()));
      }
    }
    best = std::max(best, sum / mass);
  }
  return std::sqrt(best);
}

}  // namespace oracle
