#include "dyadica/fracops.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "dyadica/errors.hpp"
#include "dyadica/haar.hpp"
#include "line_ops.hpp"

namespace dyadica {

namespace {

// Level of the smallest common ancestor of two cubes given as (level, index).
int join_level(int la, std::size_t ia, int lb, std::size_t ib) {
  while (la > lb) {
    --la;
    ia >>= 1;
  }
  while (lb > la) {
    --lb;
    ib >>= 1;
  }
  while (ia != ib) {
    --la;
    ia >>= 1;
    ib >>= 1;
  }
  return la;
}

void require_mean_zero(const GridFunction& f, const char* name) {
  const double tol = 1e-12 * std::max(1.0, f.max_abs());
  if (std::abs(f.mean()) > tol) {
    throw ContractError(std::string("verify_representation: ") + name + " has mean " + std::to_string(f.mean()) +
                        "; subtract the mean (f - mean(f)) before calling");
  }
}

}  // namespace

FracKernel::FracKernel(Axis axis, double lambda) : axis_(axis), lambda_(lambda), row_(kernel_row(axis, lambda)) {}

std::vector<double> FracKernel::apply(const std::vector<double>& line) const {
  const std::size_t n = axis_.cells();
  if (line.size() != n) throw ShapeError("FracKernel::apply: line length mismatch");
  const double inv_h = 1.0 / axis_.cell_width();
  std::vector<double> out(n, 0.0);
  const std::size_t mask = n - 1;
  for (std::size_t b = 0; b < n; ++b) {
    const double v = line[b];
    if (v == 0.0) continue;
    for (std::size_t a = 0; a < n; ++a) out[a] += v * row_[(a + n - b) & mask];
  }
  for (double& x : out) x *= inv_h;
  return out;
}

GridFunction frac_integral(const GridFunction& f, double lambda) {
  require_lambda(lambda);
  if (f.dims() != 1) throw ShapeError("frac_integral needs a one-axis function; use partial_frac_integral");
  const FracKernel kernel(f.axis(), lambda);
  return GridFunction(f.axis(), kernel.apply(std::vector<double>(f.values().begin(), f.values().end())));
}

GridFunction partial_frac_integral(const GridFunction& f, double lambda, int axis_index) {
  require_lambda(lambda);
  if (f.dims() != 2) throw ShapeError("partial_frac_integral needs a two-axis function");
  detail::require_axis_index(f, axis_index);
  const FracKernel kernel(f.axis(axis_index), lambda);
  return detail::map_lines(f, axis_index,
                           [&](const std::vector<double>& in, std::vector<double>& out) { out = kernel.apply(in); });
}

ShiftCoefficient shift_coefficient(const DyadicCube& i_cube, const DyadicCube& j_cube, double lambda) {
  require_lambda(lambda);
  if (!i_cube.same_system(j_cube)) throw SystemMismatchError("shift_coefficient: cubes from different systems");
  const GridFunction hi = haar_function(i_cube);
  const GridFunction hj = haar_function(j_cube);
  const std::vector<double> row = kernel_row(i_cube.axis, lambda);
  const std::size_t n = i_cube.axis.cells();
  double raw = 0.0;
  for (std::size_t s = 0; s < j_cube.cell_count(); ++s) {
    const std::size_t a = j_cube.cell(s);
    double partial = 0.0;
    for (std::size_t t = 0; t < i_cube.cell_count(); ++t) {
      const std::size_t b = i_cube.cell(t);
      partial += hi[b] * row[(a + n - b) % n];
    }
    raw += hj[a] * partial;
  }
  const DyadicCube k = join(i_cube, j_cube);
  ShiftCoefficient out;
  out.raw = raw;
  out.normalized = raw * std::pow(k.side(), lambda) / std::sqrt(i_cube.side() * j_cube.side());
  return out;
}

ShiftMatrix::ShiftMatrix(const DyadicSystem& system, double lambda)
    : system_(system), lambda_(lambda), n_(system.axis().cells()), entries_(n_ * n_, 0.0) {
  require_lambda(lambda);
  const FracKernel kernel(system.axis(), lambda);
  const std::vector<double>& row = kernel.row();
  const double inv_h = 1.0 / system.axis().cell_width();
  const std::size_t mask = n_ - 1;
  std::vector<double> u(n_);
  for (std::size_t slot_i = 1; slot_i < n_; ++slot_i) {
    const DyadicCube cube = slot_cube(system, slot_i);
    const double amp = 1.0 / std::sqrt(cube.side());
    const std::size_t half = cube.cell_count() / 2;
    std::fill(u.begin(), u.end(), 0.0);
    for (std::size_t t = 0; t < cube.cell_count(); ++t) {
      const std::size_t b = cube.cell(t);
      const double v = (t < half ? amp : -amp) * inv_h;
      for (std::size_t a = 0; a < n_; ++a) u[a] += v * row[(a + n_ - b) & mask];
    }
    const std::vector<double> col = haar_forward(u, system);
    for (std::size_t slot_j = 0; slot_j < n_; ++slot_j) entries_[slot_j * n_ + slot_i] = col[slot_j];
  }
}

double ShiftMatrix::raw(const DyadicCube& i_cube, const DyadicCube& j_cube) const {
  if (!i_cube.same_system(system_.root()) || !j_cube.same_system(system_.root())) {
    throw SystemMismatchError("ShiftMatrix::raw: cube outside the matrix system");
  }
  return raw(haar_slot(j_cube), haar_slot(i_cube));
}

const char* to_string(SigmaKind kind) {
  switch (kind) {
    case SigmaKind::out:
      return "out";
    case SigmaKind::near:
      return "near";
    case SigmaKind::shallow_in:
      return "shallow_in";
    case SigmaKind::deep_in:
      return "deep_in";
  }
  return "unknown";
}

std::string SigmaClass::tag() const { return std::string(to_string(kind)) + (transposed ? "_transposed" : ""); }

SigmaClass classify_pair(const DyadicCube& i_cube, const DyadicCube& j_cube, const GoodParams& params) {
  params.validate();
  if (!i_cube.same_system(j_cube)) throw SystemMismatchError("classify_pair: cubes from different systems");
  if (i_cube.level < j_cube.level) throw ContractError("classify_pair: side(I) exceeds side(J); transpose the pair");
  if (j_cube.contains(i_cube)) {
    return {i_cube.level - j_cube.level <= params.r ? SigmaKind::shallow_in : SigmaKind::deep_in, false};
  }
  const double threshold = j_cube.side() * std::pow(i_cube.side() / j_cube.side(), params.gamma);
  return {cube_distance(i_cube, j_cube) > threshold ? SigmaKind::out : SigmaKind::near, false};
}

SigmaClass classify_ordered(const DyadicCube& i_cube, const DyadicCube& j_cube, const GoodParams& params) {
  if (i_cube.level >= j_cube.level) return classify_pair(i_cube, j_cube, params);
  SigmaClass c = classify_pair(j_cube, i_cube, params);
  c.transposed = true;
  return c;
}

CoefficientCensus coefficient_census(const ShiftMatrix& matrix, const GoodParams& params) {
  params.validate();
  const DyadicSystem& sys = matrix.system();
  const std::size_t n = sys.axis().cells();
  CoefficientCensus census;
  census.lambda = matrix.lambda();
  census.params = params;
  census.offset = sys.offset_cells();
  census.level = sys.max_level();
  for (int c = 0; c < 4; ++c) census.classes[c].kind = static_cast<SigmaKind>(c);

  for (std::size_t slot_i = 1; slot_i < n; ++slot_i) {
    const DyadicCube ic = slot_cube(sys, slot_i);
    if (!is_good(ic, params)) continue;
    for (std::size_t slot_j = 1; slot_j < n; ++slot_j) {
      const DyadicCube jc = slot_cube(sys, slot_j);
      if (jc.level > ic.level) break;  // slots are ordered by level
      const SigmaClass cls = classify_pair(ic, jc, params);
      const int kl = join_level(ic.level, ic.index, jc.level, jc.index);
      const int di = ic.level - kl;
      const int dj = jc.level - kl;
      const int m = std::max(di, dj);
      const double normalized = std::abs(matrix.raw(slot_j, slot_i)) * std::pow(std::ldexp(1.0, -kl), census.lambda) /
                                std::sqrt(ic.side() * jc.side());
      ClassConstant& cc = census.classes[static_cast<int>(cls.kind)];
      const bool decays = cls.kind == SigmaKind::out || cls.kind == SigmaKind::deep_in;
      cc.c_star = std::max(cc.c_star, decays ? normalized * std::exp2(0.5 * m) : normalized);
      ++cc.pairs;
      double& slot = cc.max_by_depth[m];
      slot = std::max(slot, normalized);
    }
  }
  return census;
}

double decay_exponent(const ClassConstant& cls, int max_depth) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& [m, v] : cls.max_by_depth) {
    if (m >= 1 && m <= max_depth && v > 0.0) pts.emplace_back(m, -std::log2(v));
  }
  if (pts.size() < 2) {
    throw DegenerateInputError(std::string("decay_exponent: fewer than two populated depths for class ") +
                               to_string(cls.kind));
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& [x, y] : pts) {
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double k = static_cast<double>(pts.size());
  return (k * sxy - sx * sy) / (k * sxx - sx * sx);
}

RepresentationReport verify_representation(const GridFunction& f, const GridFunction& g, double lambda,
                                           const GoodParams& params, const std::vector<DyadicSystem>& systems) {
  require_lambda(lambda);
  params.validate();
  if (f.dims() != 1 || !f.same_shape(g)) throw ShapeError("verify_representation needs one-axis f, g on one axis");
  require_mean_zero(f, "f");
  require_mean_zero(g, "g");

  RepresentationReport rep;
  rep.lambda = lambda;
  rep.params = params;
  if (systems.empty()) return rep;

  const double lhs = inner_product(g, frac_integral(f, lambda));
  const int top = f.axis().level();
  std::vector<double> signed_sum((top + 1) * (top + 1), 0.0);
  std::vector<double> abs_sum((top + 1) * (top + 1), 0.0);
  for (const DyadicSystem& sys : systems) {
    if (sys.axis() != f.axis()) throw ShapeError("verify_representation: system axis mismatch");
    const ShiftMatrix matrix(sys, lambda);
    const std::vector<double> cf = haar_forward(f.values(), sys);
    const std::vector<double> cg = haar_forward(g.values(), sys);
    const std::size_t n = cf.size();
    double rhs = 0.0;
    double mag = 0.0;
    for (std::size_t sj = 1; sj < n; ++sj) {
      const DyadicCube jc = slot_cube(sys, sj);
      for (std::size_t si = 1; si < n; ++si) {
        const double term = cg[sj] * matrix.raw(sj, si) * cf[si];
        rhs += term;
        mag += std::abs(term);
        const DyadicCube ic = slot_cube(sys, si);
        const int kl = join_level(ic.level, ic.index, jc.level, jc.index);
        const std::size_t cell = static_cast<std::size_t>((ic.level - kl) * (top + 1) + (jc.level - kl));
        signed_sum[cell] += term;
        abs_sum[cell] += std::abs(term);
      }
    }
    SystemResidual res;
    res.offset = sys.offset_cells();
    res.lhs = lhs;
    res.rhs = rhs;
    res.scale = std::max(std::abs(lhs), mag);
    res.relative = res.scale > 0.0 ? std::abs(lhs - rhs) / res.scale : 0.0;
    rep.max_relative_residual = std::max(rep.max_relative_residual, res.relative);
    rep.systems.push_back(res);
    if (rep.census.empty()) rep.census.push_back(coefficient_census(matrix, params));
  }
  const double inv = 1.0 / static_cast<double>(systems.size());
  for (int i = 0; i <= top; ++i) {
    for (int j = 0; j <= top; ++j) {
      const std::size_t cell = static_cast<std::size_t>(i * (top + 1) + j);
      if (abs_sum[cell] == 0.0) continue;
      rep.depths.push_back({i, j, signed_sum[cell] * inv, abs_sum[cell] * inv});
    }
  }
  return rep;
}

ShiftCoefficientTable::ShiftCoefficientTable(DyadicSystem system, int i, int j, double lambda)
    : system_(system), i_(i), j_(j), lambda_(lambda), top_level_(system.max_level() - 1 - std::max(i, j)) {
  require_lambda(lambda);
  if (i < 0 || j < 0) throw ParameterError("shift depths must be non-negative");
  const std::size_t k_count = top_level_ < 0 ? 0 : (std::size_t{1} << (top_level_ + 1)) - 1;
  entries_.assign(k_count << (i + j), 0.0);
}

double ShiftCoefficientTable::bound(const DyadicCube& i_cube, const DyadicCube& j_cube, const DyadicCube& k_cube,
                                    double lambda) {
  return std::sqrt(i_cube.side() * j_cube.side()) / std::pow(k_cube.side(), lambda);
}

namespace {

template <class Draw>
ShiftCoefficientTable fill_table(const DyadicSystem& system, int i, int j, double lambda, Draw&& draw) {
  ShiftCoefficientTable t(system, i, j, lambda);
  for (const DyadicCube& k : t.k_cubes()) {
    for (std::size_t a = 0; a < (std::size_t{1} << i); ++a) {
      for (std::size_t b = 0; b < (std::size_t{1} << j); ++b) {
        t.at(k, a, b) = draw() * ShiftCoefficientTable::bound(t.i_cube(k, a), t.j_cube(k, b), k, lambda);
      }
    }
  }
  return t;
}

}  // namespace

ShiftCoefficientTable ShiftCoefficientTable::maximal(const DyadicSystem& system, int i, int j, double lambda,
                                                     std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(0.5);
  return fill_table(system, i, j, lambda, [&] { return coin(rng) ? 1.0 : -1.0; });
}

ShiftCoefficientTable ShiftCoefficientTable::random(const DyadicSystem& system, int i, int j, double lambda,
                                                    std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  return fill_table(system, i, j, lambda, [&] { return u(rng); });
}

std::size_t ShiftCoefficientTable::position(const DyadicCube& k_cube, std::size_t i_rel, std::size_t j_rel) const {
  if (!k_cube.same_system(system_.root())) throw SystemMismatchError("shift table: cube from another system");
  if (k_cube.level > top_level_) throw ResolutionError("shift table: K too deep for the table depths");
  if (i_rel >= (std::size_t{1} << i_) || j_rel >= (std::size_t{1} << j_)) {
    throw ParameterError("shift table: relative index out of range");
  }
  const std::size_t k_slot = haar_slot(k_cube) - 1;
  return ((k_slot << i_) + i_rel) * (std::size_t{1} << j_) + j_rel;
}

double ShiftCoefficientTable::at(const DyadicCube& k_cube, std::size_t i_rel, std::size_t j_rel) const {
  return entries_[position(k_cube, i_rel, j_rel)];
}

double& ShiftCoefficientTable::at(const DyadicCube& k_cube, std::size_t i_rel, std::size_t j_rel) {
  return entries_[position(k_cube, i_rel, j_rel)];
}

DyadicCube ShiftCoefficientTable::i_cube(const DyadicCube& k_cube, std::size_t i_rel) const {
  return system_.cube(k_cube.level + i_, (k_cube.index << i_) + i_rel);
}

DyadicCube ShiftCoefficientTable::j_cube(const DyadicCube& k_cube, std::size_t j_rel) const {
  return system_.cube(k_cube.level + j_, (k_cube.index << j_) + j_rel);
}

std::vector<DyadicCube> ShiftCoefficientTable::k_cubes() const {
  if (top_level_ < 0) return {};
  return system_.cubes(0, top_level_);
}

void ShiftCoefficientTable::validate() const {
  for (const DyadicCube& k : k_cubes()) {
    for (std::size_t a = 0; a < (std::size_t{1} << i_); ++a) {
      for (std::size_t b = 0; b < (std::size_t{1} << j_); ++b) {
        const double limit = bound(i_cube(k, a), j_cube(k, b), k, lambda_);
        if (std::abs(at(k, a, b)) > limit * (1.0 + 1e-12)) {
          throw InvariantError("shift coefficient exceeds |I|^1/2 |J|^1/2 / |K|^lambda at K = (" +
                               std::to_string(k.level) + ", " + std::to_string(k.index) + ")");
        }
      }
    }
  }
}

namespace {

std::vector<double> shift_line(const std::vector<double>& line, const ShiftCoefficientTable& table) {
  const DyadicSystem& sys = table.system();
  const std::vector<double> c = haar_forward(line, sys);
  std::vector<double> out(c.size(), 0.0);
  const std::size_t ni = std::size_t{1} << table.i();
  const std::size_t nj = std::size_t{1} << table.j();
  for (const DyadicCube& k : table.k_cubes()) {
    const std::size_t i_base = (std::size_t{1} << (k.level + table.i())) + (k.index << table.i());
    const std::size_t j_base = (std::size_t{1} << (k.level + table.j())) + (k.index << table.j());
    for (std::size_t a = 0; a < ni; ++a) {
      const double ca = c[i_base + a];
      if (ca == 0.0) continue;
      for (std::size_t b = 0; b < nj; ++b) out[j_base + b] += table.at(k, a, b) * ca;
    }
  }
  return haar_inverse(out, sys);
}

}  // namespace

GridFunction apply_shift(const GridFunction& f, const ShiftCoefficientTable& table) {
  if (f.dims() != 1) throw ShapeError("apply_shift needs a one-axis function; use apply_partial_shift");
  if (f.axis() != table.system().axis()) throw ShapeError("apply_shift: axis mismatch");
  table.validate();
  return GridFunction(f.axis(), shift_line(std::vector<double>(f.values().begin(), f.values().end()), table));
}

GridFunction apply_shift(const GridFunction& f, const DyadicSystem& system, int i, int j, double lambda,
                         const ShiftCoefficientTable& table) {
  if (!(table.system() == system) || table.i() != i || table.j() != j || table.lambda() != lambda) {
    throw ParameterError("apply_shift: table does not match (system, i, j, lambda)");
  }
  return apply_shift(f, table);
}

GridFunction apply_partial_shift(const GridFunction& f, const ShiftCoefficientTable& table, int axis_index) {
  if (f.dims() != 2) throw ShapeError("apply_partial_shift needs a two-axis function");
  detail::require_axis_index(f, axis_index);
  if (f.axis(axis_index) != table.system().axis()) throw ShapeError("apply_partial_shift: axis mismatch");
  table.validate();
  return detail::map_lines(f, axis_index,
                           [&](const std::vector<double>& in, std::vector<double>& out) { out = shift_line(in, table); });
}

double concentric_pairing_max(const DyadicSystem& system, double lambda) {
  require_lambda(lambda);
  const Axis& a = system.axis();
  const std::size_t n = a.cells();
  const FracKernel kernel(a, lambda);
  double worst = 0.0;
  for (const DyadicCube& i : system.haar_cubes()) {
    const GridFunction h = haar_function(i);
    const std::vector<double> ih = kernel.apply(std::vector<double>(h.values().begin(), h.values().end()));
    const std::size_t mid = i.cell(i.cell_count() / 2);
    double s = 0.0;
    for (std::size_t t = 1; t <= n / 2; ++t) {
      s += ih[(mid + n - t) % n] + ih[(mid + t - 1) % n];
      worst = std::max(worst, std::abs(s * a.cell_width()));
    }
  }
  return worst;
}

GridFunction dyadic_potential(const GridFunction& f, const DyadicSystem& system, double lambda) {
  require_lambda(lambda);
  if (f.dims() != 1 || f.axis() != system.axis()) throw ShapeError("dyadic_potential: axis mismatch");
  GridFunction out(f.axis());
  const double h = f.axis().cell_width();
  for (int k = 0; k <= system.max_level(); ++k) {
    const double weight = std::pow(std::ldexp(1.0, -k), -lambda);
    for (std::size_t m = 0; m < system.cubes_at(k); ++m) {
      const DyadicCube cube = system.cube(k, m);
      double mass = 0.0;
      for (std::size_t t = 0; t < cube.cell_count(); ++t) mass += std::abs(f[cube.cell(t)]);
      mass *= h * weight;
      for (std::size_t t = 0; t < cube.cell_count(); ++t) out[cube.cell(t)] += mass;
    }
  }
  return out;
}

double domination_ratio(const GridFunction& f, double lambda, const DyadicSystem& system) {
  if (f.max_abs() == 0.0) throw DegenerateInputError("domination_ratio: f vanishes identically");
  const GridFunction a = f.abs();
  const GridFunction top = dyadic_potential(a, system, lambda);
  const GridFunction bottom = frac_integral(a, lambda);
  double ratio = 0.0;
  for (std::size_t c = 0; c < a.size(); ++c) ratio = std::max(ratio, top[c] / bottom[c]);
  return ratio;
}

}  // namespace dyadica
