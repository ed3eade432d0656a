#include "dyadica/paracomm.hpp"

#include <algorithm>
#include <cmath>

#include "dyadica/errors.hpp"
#include "dyadica/haar.hpp"

namespace dyadica {

namespace {

enum class Op { D, E };

struct AxisOps {
  Op b;
  Op f;
};

struct TagOps {
  AxisOps first;
  AxisOps second;
};

TagOps ops_of(ParaTag tag) {
  constexpr AxisOps dd{Op::D, Op::D};
  constexpr AxisOps de{Op::D, Op::E};
  constexpr AxisOps ed{Op::E, Op::D};
  switch (tag) {
    case ParaTag::A1: return {dd, dd};
    case ParaTag::A2: return {de, dd};
    case ParaTag::A3: return {dd, de};
    case ParaTag::A4: return {de, de};
    case ParaTag::A5: return {ed, dd};
    case ParaTag::A6: return {ed, de};
    case ParaTag::A7: return {dd, ed};
    case ParaTag::A8: return {de, ed};
    case ParaTag::W: return {ed, ed};
  }
  throw ParameterError("unknown paraproduct tag");
}

GridFunction level_op(Op op, const GridFunction& g, const DyadicSystem& system, int level, int axis_index) {
  return op == Op::D ? level_difference(g, system, level, axis_index) : level_average(g, system, level, axis_index);
}

void require_pair(const GridFunction& b, const GridFunction& f, const SystemPair& systems, const char* what) {
  if (b.dims() != 2 || !b.same_shape(f)) throw ShapeError(std::string(what) + ": b and f must share a two-axis grid");
  if (b.axis(0) != systems.first.axis() || b.axis(1) != systems.second.axis()) {
    throw ShapeError(std::string(what) + ": systems do not match the grid");
  }
}

// F(a1, a2) = (E1_a1 E2_a2 b)(E1_a1 E2_a2 f).
GridFunction mean_product(const GridFunction& b, const GridFunction& f, const SystemPair& systems, int a1, int a2) {
  auto avg = [&](const GridFunction& g) {
    return level_average(level_average(g, systems.first, a1, 0), systems.second, a2, 1);
  };
  return avg(b) * avg(f);
}

// 2D prefix sums of b in the shifted frames of a system pair.
class RectAverages {
 public:
  RectAverages(const GridFunction& b, const SystemPair& systems)
      : n1_(b.extent(0)), n2_(b.extent(1)), sums_((n1_ + 1) * (n2_ + 1), 0.0) {
    for (std::size_t p1 = 0; p1 < n1_; ++p1) {
      const std::size_t c1 = systems.first.unshifted(p1);
      for (std::size_t p2 = 0; p2 < n2_; ++p2) {
        const std::size_t c2 = systems.second.unshifted(p2);
        sums_[(p1 + 1) * (n2_ + 1) + p2 + 1] = b.at(c1, c2) + sums_[p1 * (n2_ + 1) + p2 + 1] +
                                               sums_[(p1 + 1) * (n2_ + 1) + p2] - sums_[p1 * (n2_ + 1) + p2];
      }
    }
  }

  double average(const DyadicCube& q, const DyadicCube& p) const {
    const std::size_t a0 = q.shifted_begin(), a1 = a0 + q.cell_count();
    const std::size_t b0 = p.shifted_begin(), b1 = b0 + p.cell_count();
    const double s = sums_[a1 * (n2_ + 1) + b1] - sums_[a0 * (n2_ + 1) + b1] - sums_[a1 * (n2_ + 1) + b0] +
                     sums_[a0 * (n2_ + 1) + b0];
    return s / static_cast<double>(q.cell_count() * p.cell_count());
  }

 private:
  std::size_t n1_;
  std::size_t n2_;
  std::vector<double> sums_;
};

}  // namespace

const char* to_string(ParaTag tag) {
  switch (tag) {
    case ParaTag::A1: return "A1";
    case ParaTag::A2: return "A2";
    case ParaTag::A3: return "A3";
    case ParaTag::A4: return "A4";
    case ParaTag::A5: return "A5";
    case ParaTag::A6: return "A6";
    case ParaTag::A7: return "A7";
    case ParaTag::A8: return "A8";
    case ParaTag::W: return "W";
  }
  return "?";
}

ParaTag para_tag_from_string(const std::string& name) {
  for (ParaTag tag : kParaTags) {
    if (name == to_string(tag)) return tag;
  }
  throw ParameterError("unknown paraproduct tag '" + name + "'");
}

GridFunction paraproduct(ParaTag tag, const GridFunction& b, const GridFunction& f, const SystemPair& systems) {
  require_pair(b, f, systems, "paraproduct");
  const TagOps ops = ops_of(tag);
  const int l1 = systems.first.max_level();
  const int l2 = systems.second.max_level();
  GridFunction out(b.axis(0), b.axis(1));
  for (int k1 = 0; k1 < l1; ++k1) {
    const GridFunction b1 = level_op(ops.first.b, b, systems.first, k1, 0);
    const GridFunction f1 = level_op(ops.first.f, f, systems.first, k1, 0);
    for (int k2 = 0; k2 < l2; ++k2) {
      out += level_op(ops.second.b, b1, systems.second, k2, 1) * level_op(ops.second.f, f1, systems.second, k2, 1);
    }
  }
  return out;
}

GridFunction mean_corrections(const GridFunction& b, const GridFunction& f, const SystemPair& systems) {
  require_pair(b, f, systems, "mean_corrections");
  const int l1 = systems.first.max_level();
  const int l2 = systems.second.max_level();
  return mean_product(b, f, systems, 0, l2) + mean_product(b, f, systems, l1, 0) - mean_product(b, f, systems, 0, 0);
}

DecompositionReport decompose_product(const GridFunction& b, const GridFunction& f, const SystemPair& systems) {
  require_pair(b, f, systems, "decompose_product");
  DecompositionReport report{{}, mean_corrections(b, f, systems)};
  GridFunction total = report.corrections;
  for (ParaTag tag : kParaTags) {
    report.parts.push_back(paraproduct(tag, b, f, systems));
    total += report.parts.back();
  }
  const GridFunction product = b * f;
  report.residual = (product - total).max_abs();
  report.scale = product.max_abs();
  return report;
}

GridFunction commutator(const GridFunction& b, const GridFunction& f, const CommutatorSpec& spec) {
  if (!b.same_shape(f)) throw ShapeError("commutator: b and f must share a grid");
  if (spec.kind == CommutatorSpec::Kind::inner) {
    if (f.dims() == 1) return b * frac_integral(f, spec.lambda2) - frac_integral(b * f, spec.lambda2);
    return b * partial_frac_integral(f, spec.lambda2, 1) - partial_frac_integral(b * f, spec.lambda2, 1);
  }
  if (f.dims() != 2) throw ShapeError("iterated commutator needs two-axis functions");
  auto i1 = [&](const GridFunction& g) { return partial_frac_integral(g, spec.lambda1, 0); };
  auto i2 = [&](const GridFunction& g) { return partial_frac_integral(g, spec.lambda2, 1); };
  return i1(b * i2(f)) - i1(i2(b * f)) - b * i2(i1(f)) + i2(b * i1(f));
}

GridFunction shift_commutator(const GridFunction& b, const GridFunction& f, const ShiftCoefficientTable& shift1,
                              const ShiftCoefficientTable& shift2) {
  if (b.dims() != 2 || !b.same_shape(f)) throw ShapeError("shift_commutator: b and f must share a two-axis grid");
  auto s1 = [&](const GridFunction& g) { return apply_partial_shift(g, shift1, 0); };
  auto s2 = [&](const GridFunction& g) { return apply_partial_shift(g, shift2, 1); };
  return s1(b * s2(f)) - s1(s2(b * f)) - b * s2(s1(f)) + s2(b * s1(f));
}

double b_ijst(const GridFunction& b, const DyadicCube& i, const DyadicCube& j, const DyadicCube& s,
              const DyadicCube& t) {
  if (b.dims() != 2) throw ShapeError("b_ijst needs a two-axis b");
  if (!i.same_system(j) || !s.same_system(t)) throw SystemMismatchError("b_ijst: cubes from different systems");
  const SystemPair systems{DyadicSystem(i.axis, i.offset), DyadicSystem(s.axis, s.offset)};
  if (b.axis(0) != i.axis || b.axis(1) != s.axis) throw ShapeError("b_ijst: cubes do not match the grid");
  const RectAverages avg(b, systems);
  return -avg.average(i, s) + avg.average(i, t) + avg.average(j, s) - avg.average(j, t);
}

CommutatorExpansion shift_commutator_expand(const GridFunction& b, const GridFunction& f,
                                            const ShiftCoefficientTable& shift1, const ShiftCoefficientTable& shift2) {
  const SystemPair systems{shift1.system(), shift2.system()};
  require_pair(b, f, systems, "shift_commutator_expand");
  shift1.validate();
  shift2.validate();

  CommutatorExpansion out{GridFunction(b.axis(0), b.axis(1)), {}, shift_commutator(b, f, shift1, shift2)};

  auto s1 = [&](const GridFunction& g) { return apply_partial_shift(g, shift1, 0); };
  auto s2 = [&](const GridFunction& g) { return apply_partial_shift(g, shift2, 1); };
  const GridFunction s2f = s2(f);
  const GridFunction s1f = s1(f);
  const GridFunction s2s1f = s2(s1f);
  for (int k = 0; k < 8; ++k) {
    const ParaTag tag = kParaTags[k];
    out.groups.push_back(s1(paraproduct(tag, b, s2f, systems)) - s1(s2(paraproduct(tag, b, f, systems))) -
                    paraproduct(tag, b, s2s1f, systems) + s2(paraproduct(tag, b, s1f, systems)));
  }

  const HaarCoefficientMap fc = haar_expand(f, systems.first, systems.second);
  const RectAverages avg(b, systems);
  const std::size_t n2 = systems.second.axis().cells();
  std::vector<double> ec(systems.first.axis().cells() * n2, 0.0);
  const std::vector<DyadicCube> k1s = shift1.k_cubes();
  const std::vector<DyadicCube> k2s = shift2.k_cubes();
  const std::size_t ni1 = std::size_t{1} << shift1.i(), nj1 = std::size_t{1} << shift1.j();
  const std::size_t ni2 = std::size_t{1} << shift2.i(), nj2 = std::size_t{1} << shift2.j();
  for (const DyadicCube& k1 : k1s) {
    for (std::size_t ir = 0; ir < ni1; ++ir) {
      const DyadicCube ic = shift1.i_cube(k1, ir);
      for (std::size_t jr = 0; jr < nj1; ++jr) {
        const double a1 = shift1.at(k1, ir, jr);
        if (a1 == 0.0) continue;
        const DyadicCube jc = shift1.j_cube(k1, jr);
        for (const DyadicCube& k2 : k2s) {
          for (std::size_t sr = 0; sr < ni2; ++sr) {
            const DyadicCube sc = shift2.i_cube(k2, sr);
            const double fis = fc.at(haar_slot(ic), haar_slot(sc));
            if (fis == 0.0) continue;
            for (std::size_t tr = 0; tr < nj2; ++tr) {
              const double a2 = shift2.at(k2, sr, tr);
              if (a2 == 0.0) continue;
              const DyadicCube tc = shift2.j_cube(k2, tr);
              const double bijst =
                  -avg.average(ic, sc) + avg.average(ic, tc) + avg.average(jc, sc) - avg.average(jc, tc);
              ec[haar_slot(jc) * n2 + haar_slot(tc)] += bijst * a1 * a2 * fis;
            }
          }
        }
      }
    }
  }
  out.e_term = HaarCoefficientMap(systems.first, systems.second, std::move(ec)).reconstruct();

  GridFunction total = out.e_term;
  out.scale = std::max({1.0, out.direct.max_abs(), out.e_term.max_abs()});
  for (const GridFunction& g : out.groups) {
    total += g;
    out.scale = std::max(out.scale, g.max_abs());
  }
  out.residual = (out.direct - total).max_abs();
  return out;
}

std::vector<double> telescope_terms(const GridFunction& b, const DyadicCube& i_cube, const DyadicCube& k_cube,
                                    const DyadicSystem& system) {
  if (b.dims() != 1 || b.axis() != system.axis()) throw ShapeError("telescope_terms: b must be a line on the system axis");
  const DyadicCube probe = system.root();
  if (!i_cube.same_system(probe) || !k_cube.same_system(probe)) {
    throw SystemMismatchError("telescope_terms: cubes do not belong to the system");
  }
  if (!k_cube.contains(i_cube)) throw ContractError("telescope_terms: K must contain I");
  auto mean_over = [&](const DyadicCube& q) {
    double s = 0.0;
    for (std::size_t t = 0; t < q.cell_count(); ++t) s += b[q.cell(t)];
    return s / static_cast<double>(q.cell_count());
  };
  std::vector<double> terms;
  DyadicCube below = i_cube;
  for (int r = 1; r <= i_cube.level - k_cube.level; ++r) {
    const DyadicCube above = below.parent();
    terms.push_back(mean_over(below) - mean_over(above));
    below = above;
  }
  return terms;
}

}  // namespace dyadica
