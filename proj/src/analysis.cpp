#include "dyadica/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include "dyadica/errors.hpp"
#include "dyadica/haar.hpp"
#include "line_ops.hpp"

namespace dyadica {

namespace {

void require_two_axes(const GridFunction& f, const char* what) {
  if (f.dims() != 2) throw ShapeError(std::string(what) + " needs a two-axis function");
}

void require_pair(const GridFunction& f, const SystemPair& systems, const char* what) {
  require_two_axes(f, what);
  if (f.axis(0) != systems.first.axis() || f.axis(1) != systems.second.axis()) {
    throw ShapeError(std::string(what) + ": systems do not match the function's axes");
  }
}

// Largest average over torus arcs containing each cell. For a fixed start
// s the arcs through c are those longer than (c - s) mod N, so a suffix
// maximum over lengths answers every cell at once.
void arc_maximal_line(const std::vector<double>& g, std::vector<double>& out) {
  const std::size_t n = g.size();
  std::vector<double> suffix(n + 2);
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t s = 0; s < n; ++s) {
    double sum = 0.0;
    std::vector<double> avg(n + 1);
    for (std::size_t len = 1; len <= n; ++len) {
      sum += g[(s + len - 1) % n];
      avg[len] = sum / static_cast<double>(len);
    }
    suffix[n + 1] = 0.0;
    for (std::size_t len = n; len >= 1; --len) suffix[len] = std::max(suffix[len + 1], avg[len]);
    for (std::size_t d = 0; d < n; ++d) {
      double& o = out[(s + d) % n];
      o = std::max(o, suffix[d + 1]);
    }
  }
}

GridFunction level_max(const GridFunction& a, const DyadicSystem& system, int axis_index,
                       const std::function<double(int)>& scale) {
  GridFunction out(a);
  for (auto& v : out.values()) v = 0.0;
  for (int k = 0; k <= system.max_level(); ++k) {
    const GridFunction e = level_average(a, system, k, axis_index);
    const double s = scale(k);
    auto dst = out.values();
    const auto src = e.values();
    for (std::size_t c = 0; c < dst.size(); ++c) dst[c] = std::max(dst[c], s * src[c]);
  }
  return out;
}

GridFunction sqrt_of(GridFunction f) {
  for (auto& v : f.values()) v = std::sqrt(v);
  return f;
}

void require_exponent(double p, const char* name) {
  if (!(p >= 1.0) || !std::isfinite(p)) throw ParameterError(std::string(name) + " must be a finite exponent >= 1");
}

// Per-slot averages and masses of one weight factor. Slot 0 is the root.
struct SlotStats {
  std::vector<double> average;
  std::vector<double> mass;
};

SlotStats slot_stats(const Weight& w, const DyadicSystem& sys) {
  const std::size_t n = sys.axis().cells();
  SlotStats s{std::vector<double>(n), std::vector<double>(n)};
  for (std::size_t slot = 0; slot < n; ++slot) {
    const DyadicCube q = slot == 0 ? sys.root() : slot_cube(sys, slot);
    double sum = 0.0;
    for (std::size_t t = 0; t < q.cell_count(); ++t) sum += w[q.cell(t)];
    s.average[slot] = sum / static_cast<double>(q.cell_count());
    s.mass[slot] = sum * sys.axis().cell_width();
  }
  return s;
}

}  // namespace

GridFunction strong_maximal(const GridFunction& f) {
  require_two_axes(f, "strong_maximal");
  const GridFunction a = f.abs();
  const std::size_t n1 = f.extent(0);
  const std::size_t n2 = f.extent(1);
  GridFunction out(f.axis(0), f.axis(1));
  std::vector<double> col(n2);
  std::vector<double> avg(n2);
  // best[len] = 1D arc maximal (in x2) of the x1-average over [s1, s1 + len).
  std::vector<std::vector<double>> best(n1 + 2, std::vector<double>(n2, 0.0));
  for (std::size_t s1 = 0; s1 < n1; ++s1) {
    std::fill(col.begin(), col.end(), 0.0);
    for (std::size_t len = 1; len <= n1; ++len) {
      const std::size_t row = (s1 + len - 1) % n1;
      for (std::size_t c2 = 0; c2 < n2; ++c2) col[c2] += a.at(row, c2);
      for (std::size_t c2 = 0; c2 < n2; ++c2) avg[c2] = col[c2] / static_cast<double>(len);
      arc_maximal_line(avg, best[len]);
    }
    std::fill(best[n1 + 1].begin(), best[n1 + 1].end(), 0.0);
    for (std::size_t len = n1; len >= 1; --len) {
      for (std::size_t c2 = 0; c2 < n2; ++c2) best[len][c2] = std::max(best[len][c2], best[len + 1][c2]);
    }
    for (std::size_t d = 0; d < n1; ++d) {
      const std::size_t c1 = (s1 + d) % n1;
      for (std::size_t c2 = 0; c2 < n2; ++c2) out.at(c1, c2) = std::max(out.at(c1, c2), best[d + 1][c2]);
    }
  }
  return out;
}

GridFunction dyadic_maximal(const GridFunction& f, const DyadicSystem& system, int axis_index) {
  detail::require_axis_index(f, axis_index);
  if (f.axis(axis_index) != system.axis()) throw ShapeError("dyadic_maximal: system does not match the axis");
  return level_max(f.abs(), system, axis_index, [](int) { return 1.0; });
}

GridFunction dyadic_maximal(const GridFunction& f, const SystemPair& systems, MaximalMode mode) {
  require_pair(f, systems, "dyadic_maximal");
  switch (mode) {
    case MaximalMode::axis1:
      return dyadic_maximal(f, systems.first, 0);
    case MaximalMode::axis2:
      return dyadic_maximal(f, systems.second, 1);
    case MaximalMode::biparameter:
      break;
  }
  const GridFunction a = f.abs();
  GridFunction out(f.axis(0), f.axis(1));
  for (int k1 = 0; k1 <= systems.first.max_level(); ++k1) {
    const GridFunction e1 = level_average(a, systems.first, k1, 0);
    for (int k2 = 0; k2 <= systems.second.max_level(); ++k2) {
      const GridFunction e = level_average(e1, systems.second, k2, 1);
      for (std::size_t c = 0; c < out.size(); ++c) out[c] = std::max(out[c], e[c]);
    }
  }
  return out;
}

GridFunction frac_maximal(const GridFunction& f, const DyadicSystem& system, double lambda, int axis_index) {
  require_lambda(lambda);
  detail::require_axis_index(f, axis_index);
  if (f.axis(axis_index) != system.axis()) throw ShapeError("frac_maximal: system does not match the axis");
  return level_max(f.abs(), system, axis_index, [lambda](int k) { return std::exp2(-k * (1.0 - lambda)); });
}

GridFunction square_function(const GridFunction& f, const DyadicSystem& system) {
  if (f.dims() != 1) throw ShapeError("sole square function needs a one-axis function");
  if (f.axis() != system.axis()) throw ShapeError("square_function: system does not match the axis");
  GridFunction sum(f.axis());
  for (int k = 0; k < system.max_level(); ++k) {
    const GridFunction d = level_difference(f, system, k, 0);
    sum += d * d;
  }
  return sqrt_of(std::move(sum));
}

GridFunction square_function(const GridFunction& f, const SystemPair& systems, SquareMode mode) {
  if (mode == SquareMode::sole) return square_function(f, systems.first);
  require_pair(f, systems, "square_function");
  GridFunction sum(f.axis(0), f.axis(1));
  if (mode == SquareMode::axis1 || mode == SquareMode::axis2) {
    const int ax = mode == SquareMode::axis1 ? 0 : 1;
    for (int k = 0; k < systems[ax].max_level(); ++k) {
      const GridFunction d = level_difference(f, systems[ax], k, ax);
      sum += d * d;
    }
    return sqrt_of(std::move(sum));
  }
  for (int k1 = 0; k1 < systems.first.max_level(); ++k1) {
    const GridFunction d1 = level_difference(f, systems.first, k1, 0);
    for (int k2 = 0; k2 < systems.second.max_level(); ++k2) {
      const GridFunction d = level_difference(d1, systems.second, k2, 1);
      sum += d * d;
    }
  }
  return sqrt_of(std::move(sum));
}

double lp_norm(const GridFunction& f, double p, const Weight& w) {
  require_exponent(p, "p");
  if (f.dims() != 1 || f.axis() != w.axis()) throw ShapeError("lp_norm: weight axis mismatch");
  double s = 0.0;
  for (std::size_t c = 0; c < f.size(); ++c) s += std::pow(std::abs(f[c]), p) * w[c];
  return std::pow(s * f.axis().cell_width(), 1.0 / p);
}

double lp_norm(const GridFunction& f, double p) { return lp_norm(f, p, Weight::unit(f.axis())); }

double mixed_norm(const GridFunction& f, double p1, double p2, const Weight& w1, const Weight& w2) {
  require_exponent(p1, "p1");
  require_exponent(p2, "p2");
  require_two_axes(f, "mixed_norm");
  if (f.axis(0) != w1.axis() || f.axis(1) != w2.axis()) throw ShapeError("mixed_norm: weight axis mismatch");
  const double h1 = f.axis(0).cell_width();
  const double h2 = f.axis(1).cell_width();
  double outer = 0.0;
  for (std::size_t c2 = 0; c2 < f.extent(1); ++c2) {
    double inner = 0.0;
    for (std::size_t c1 = 0; c1 < f.extent(0); ++c1) inner += std::pow(std::abs(f.at(c1, c2)), p1) * w1[c1];
    outer += std::pow(inner * h1, p2 / p1) * w2[c2];
  }
  return std::pow(outer * h2, 1.0 / p2);
}

double mixed_norm(const GridFunction& f, double p1, double p2) {
  require_two_axes(f, "mixed_norm");
  return mixed_norm(f, p1, p2, Weight::unit(f.axis(0)), Weight::unit(f.axis(1)));
}

OmegaFamily::OmegaFamily(SystemPair systems) : systems_(std::move(systems)) {}

OmegaFamily OmegaFamily::rectangles_only(const SystemPair& systems) {
  OmegaFamily f(systems);
  f.add_all_rectangles();
  return f;
}

OmegaFamily OmegaFamily::standard(const SystemPair& systems, int lshape_depth) {
  OmegaFamily f = rectangles_only(systems);
  const int d1 = std::min(lshape_depth, systems.first.max_level() - 1);
  const int d2 = std::min(lshape_depth, systems.second.max_level() - 1);
  for (const DyadicCube& q : systems.first.cubes(1, d1)) {
    for (const DyadicCube& p : systems.second.cubes(1, d2)) {
      OmegaShape s;
      s.rectangles = {{q.parent(), p}, {q, p.parent()}};
      s.label = "L(" + std::to_string(q.level) + ":" + std::to_string(q.index) + "," + std::to_string(p.level) + ":" +
                std::to_string(p.index) + ")";
      f.add(std::move(s));
    }
  }
  return f;
}

void OmegaFamily::add(OmegaShape shape) {
  if (shape.rectangles.empty()) throw ParameterError("an Omega shape needs at least one rectangle");
  for (const auto& [q, p] : shape.rectangles) {
    if (!q.same_system(systems_.first.root()) || !p.same_system(systems_.second.root())) {
      throw SystemMismatchError("Omega rectangle outside the family's system pair");
    }
  }
  shapes_.push_back(std::move(shape));
}

void OmegaFamily::add_all_rectangles() { all_rectangles_ = true; }

std::size_t OmegaFamily::size() const {
  const std::size_t singles =
      all_rectangles_ ? (systems_.first.axis().cells() - 1) * (systems_.second.axis().cells() - 1) : 0;
  return singles + shapes_.size();
}

double bmo_prod_norm(const GridFunction& b, const ProductWeight& w, const OmegaFamily& family) {
  const SystemPair& sp = family.systems();
  require_pair(b, sp, "bmo_prod_norm");
  if (w.factor1().axis() != b.axis(0) || w.factor2().axis() != b.axis(1)) {
    throw ShapeError("bmo_prod_norm: weight axis mismatch");
  }
  if (family.size() == 0) throw ParameterError("bmo_prod_norm: empty Omega family");

  const HaarCoefficientMap coeff = haar_expand(b, sp.first, sp.second);
  const std::size_t n1 = b.extent(0);
  const std::size_t n2 = b.extent(1);
  const SlotStats w1 = slot_stats(w.factor1(), sp.first);
  const SlotStats w2 = slot_stats(w.factor2(), sp.second);

  // e(I, J) = |<b, h_I (x) h_J>|^2 / <w>_{I x J}, Haar slots only.
  std::vector<double> e(n1 * n2, 0.0);
  for (std::size_t s1 = 1; s1 < n1; ++s1) {
    for (std::size_t s2 = 1; s2 < n2; ++s2) {
      const double c = coeff.at(s1, s2);
      e[s1 * n2 + s2] = c * c / (w1.average[s1] * w2.average[s2]);
    }
  }

  double best = 0.0;
  if (family.has_all_rectangles()) {
    // Subtree sums: the children of slot s are 2s and 2s + 1.
    std::vector<double> t = e;
    for (std::size_t s1 = 1; s1 < n1; ++s1) {
      for (std::size_t s2 = n2 - 1; s2 >= 1; --s2) {
        if (2 * s2 < n2) t[s1 * n2 + s2] += t[s1 * n2 + 2 * s2] + t[s1 * n2 + 2 * s2 + 1];
      }
    }
    for (std::size_t s1 = n1 - 1; s1 >= 1; --s1) {
      if (2 * s1 >= n1) continue;
      for (std::size_t s2 = 1; s2 < n2; ++s2) t[s1 * n2 + s2] += t[2 * s1 * n2 + s2] + t[(2 * s1 + 1) * n2 + s2];
    }
    for (std::size_t s1 = 1; s1 < n1; ++s1) {
      for (std::size_t s2 = 1; s2 < n2; ++s2) {
        best = std::max(best, t[s1 * n2 + s2] / (w1.mass[s1] * w2.mass[s2]));
      }
    }
  }

  if (!family.shapes().empty()) {
    // Masks live in the shifted frame, where every dyadic cube is a
    // contiguous range and containment reduces to a prefix-sum count.
    const auto rect_cells = [&](const std::vector<double>& pre, std::size_t a0, std::size_t a1, std::size_t b0,
                                std::size_t b1) {
      const std::size_t m = n2 + 1;
      return pre[a1 * m + b1] - pre[a0 * m + b1] - pre[a1 * m + b0] + pre[a0 * m + b0];
    };
    const double area = b.axis(0).cell_width() * b.axis(1).cell_width();
    for (const OmegaShape& shape : family.shapes()) {
      std::vector<char> mask(n1 * n2, 0);
      for (const auto& [q, p] : shape.rectangles) {
        for (std::size_t u = q.shifted_begin(); u < q.shifted_begin() + q.cell_count(); ++u) {
          for (std::size_t v = p.shifted_begin(); v < p.shifted_begin() + p.cell_count(); ++v) mask[u * n2 + v] = 1;
        }
      }
      std::vector<double> pre((n1 + 1) * (n2 + 1), 0.0);
      double mass = 0.0;
      for (std::size_t u = 0; u < n1; ++u) {
        for (std::size_t v = 0; v < n2; ++v) {
          pre[(u + 1) * (n2 + 1) + v + 1] =
              mask[u * n2 + v] + pre[u * (n2 + 1) + v + 1] + pre[(u + 1) * (n2 + 1) + v] - pre[u * (n2 + 1) + v];
          if (mask[u * n2 + v]) mass += w.at(sp.first.unshifted(u), sp.second.unshifted(v)) * area;
        }
      }
      double sum = 0.0;
      for (std::size_t s1 = 1; s1 < n1; ++s1) {
        const DyadicCube i = slot_cube(sp.first, s1);
        for (std::size_t s2 = 1; s2 < n2; ++s2) {
          const DyadicCube j = slot_cube(sp.second, s2);
          const double inside = rect_cells(pre, i.shifted_begin(), i.shifted_begin() + i.cell_count(),
                                           j.shifted_begin(), j.shifted_begin() + j.cell_count());
          if (inside == static_cast<double>(i.cell_count() * j.cell_count())) sum += e[s1 * n2 + s2];
        }
      }
      best = std::max(best, sum / mass);
    }
  }
  return std::sqrt(best);
}

DualityReport duality_check(const GridFunction& b, const GridFunction& phi, const ProductWeight& w,
                            const OmegaFamily& family) {
  const SystemPair& sp = family.systems();
  require_pair(b, sp, "duality_check");
  require_pair(phi, sp, "duality_check");
  DualityReport r;
  const HaarCoefficientMap cb = haar_expand(b, sp.first, sp.second);
  const HaarCoefficientMap cp = haar_expand(phi, sp.first, sp.second);
  double rect = 0.0;
  for (std::size_t s1 = 1; s1 < b.extent(0); ++s1) {
    for (std::size_t s2 = 1; s2 < b.extent(1); ++s2) rect += cb.at(s1, s2) * cp.at(s1, s2);
  }
  const double full = inner_product(b, phi);
  r.pairing = std::abs(full);
  r.rect_pairing = std::abs(rect);
  r.mean_type_components = std::abs(full - rect) > 1e-12 * std::max(1.0, std::abs(full) + std::abs(rect));
  r.bmo = bmo_prod_norm(b, w, family);
  const GridFunction s = square_function(phi, sp, SquareMode::rect);
  const double area = b.axis(0).cell_width() * b.axis(1).cell_width();
  for (std::size_t c1 = 0; c1 < b.extent(0); ++c1) {
    for (std::size_t c2 = 0; c2 < b.extent(1); ++c2) r.square_l1 += s.at(c1, c2) * w.at(c1, c2) * area;
  }
  const double denom = r.bmo * r.square_l1;
  if (denom > 0.0) {
    r.ratio = r.rect_pairing / denom;
  } else if (r.rect_pairing > 0.0 || r.pairing > 0.0) {
    r.family_too_small = true;
  }
  return r;
}

DualityReport duality_check(const GridFunction& b, const GridFunction& phi, const ProductWeight& w,
                            const SystemPair& systems) {
  return duality_check(b, phi, w, OmegaFamily::standard(systems));
}

}  // namespace dyadica
