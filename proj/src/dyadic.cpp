#include "dyadica/dyadic.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "dyadica/errors.hpp"

namespace dyadica {

namespace {

double wrap_unit(double x) {
  x -= std::floor(x);
  return x >= 1.0 ? 0.0 : x;
}

// Circular distance on the unit torus.
double circle_distance(double a, double b) {
  const double d = wrap_unit(a - b);
  return std::min(d, 1.0 - d);
}

void require_same_system(const DyadicCube& a, const DyadicCube& b, const char* what) {
  if (!a.same_system(b)) throw SystemMismatchError(std::string(what) + ": cubes belong to different systems");
}

}  // namespace

double DyadicCube::side() const { return std::ldexp(1.0, -level); }

double DyadicCube::start() const { return static_cast<double>(first_cell()) * axis.cell_width(); }

double DyadicCube::center() const { return wrap_unit(start() + 0.5 * side()); }

bool DyadicCube::contains_cell(std::size_t c) const {
  const std::size_t n = axis.cells();
  const std::size_t s = (c + n - offset % n) % n;
  return s >> (axis.level() - level) == index;
}

bool DyadicCube::contains(const DyadicCube& other) const {
  require_same_system(*this, other, "contains");
  if (other.level < level) return false;
  return other.index >> (other.level - level) == index;
}

DyadicCube DyadicCube::parent() const {
  if (level == 0) throw LevelUnderflowError("the level-0 cube has no parent");
  return DyadicCube{axis, offset, level - 1, index >> 1};
}

DyadicCube DyadicCube::child(int which) const {
  if (level >= axis.level()) throw ResolutionError("cube at the finest level has no children");
  if (which != 0 && which != 1) throw ParameterError("child selector must be 0 or 1");
  return DyadicCube{axis, offset, level + 1, 2 * index + static_cast<std::size_t>(which)};
}

DyadicSystem::DyadicSystem(Axis axis, std::size_t offset_cells) : axis_(axis), offset_(offset_cells) {
  if (offset_cells >= axis.cells()) {
    throw ParameterError("system offset must be below the cell count, got " + std::to_string(offset_cells));
  }
}

DyadicCube DyadicSystem::cube(int level, std::size_t index) const {
  if (level < 0 || level > axis_.level()) {
    throw ResolutionError("cube level " + std::to_string(level) + " outside [0, " + std::to_string(axis_.level()) +
                          "]");
  }
  if (index >= cubes_at(level)) throw ParameterError("cube index out of range at level " + std::to_string(level));
  return DyadicCube{axis_, offset_, level, index};
}

DyadicCube DyadicSystem::cube_containing(std::size_t cell, int level) const {
  if (cell >= axis_.cells()) throw ShapeError("cell index outside the axis");
  return cube(level, shifted(cell) >> (axis_.level() - level));
}

std::vector<DyadicCube> DyadicSystem::cubes(int min_level, int max_level) const {
  std::vector<DyadicCube> out;
  for (int k = std::max(min_level, 0); k <= std::min(max_level, axis_.level()); ++k) {
    for (std::size_t m = 0; m < cubes_at(k); ++m) out.push_back(DyadicCube{axis_, offset_, k, m});
  }
  return out;
}

GoodParams GoodParams::for_lambda(double lambda, int r) {
  require_lambda(lambda);
  GoodParams p{r, 1.0 / (2.0 * (lambda + 1.0))};
  p.validate();
  return p;
}

void GoodParams::validate() const {
  if (r < 1) throw ConfigurationError("goodness parameter r must be positive, got " + std::to_string(r));
  if (!(gamma > 0.0 && gamma < 0.5)) {
    throw ConfigurationError("goodness parameter gamma must lie in (0, 1/2), got " + std::to_string(gamma));
  }
}

DyadicSystem sample_system(const Axis& axis, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, axis.cells() - 1);
  return DyadicSystem(axis, pick(rng));
}

std::vector<DyadicSystem> all_systems(const Axis& axis) {
  std::vector<DyadicSystem> out;
  out.reserve(axis.cells());
  for (std::size_t o = 0; o < axis.cells(); ++o) out.emplace_back(axis, o);
  return out;
}

DyadicCube ancestor(const DyadicCube& cube, int i) {
  if (i < 0) throw ParameterError("ancestor depth must be non-negative");
  if (i > cube.level) {
    throw LevelUnderflowError("ancestor depth " + std::to_string(i) + " exceeds cube level " +
                              std::to_string(cube.level));
  }
  return DyadicCube{cube.axis, cube.offset, cube.level - i, cube.index >> i};
}

DyadicCube join(const DyadicCube& a, const DyadicCube& b) {
  require_same_system(a, b, "join");
  DyadicCube x = a;
  DyadicCube y = b;
  while (x.level > y.level) x = x.parent();
  while (y.level > x.level) y = y.parent();
  while (x.index != y.index) {
    x = x.parent();
    y = y.parent();
  }
  return x;
}

double distance_to_point(const DyadicCube& cube, double point) {
  const double s = wrap_unit(point - static_cast<double>(cube.offset) * cube.axis.cell_width());
  const double a0 = static_cast<double>(cube.index) * cube.side();
  const double a1 = a0 + cube.side();
  if (s >= a0 && s <= a1) return 0.0;
  return std::min(circle_distance(s, a0), circle_distance(s, a1));
}

double cube_distance(const DyadicCube& a, const DyadicCube& b) {
  require_same_system(a, b, "cube_distance");
  if (a.contains(b) || b.contains(a)) return 0.0;
  const double b0 = b.start();
  const double b1 = b0 + b.side();
  const double a0 = a.start();
  const double a1 = a0 + a.side();
  return std::min({circle_distance(a0, b0), circle_distance(a0, b1), circle_distance(a1, b0),
                   circle_distance(a1, b1)});
}

double distance_to_boundary(const DyadicCube& inner, const DyadicCube& outer) {
  require_same_system(inner, outer, "distance_to_boundary");
  const double b0 = outer.start();
  return std::min(distance_to_point(inner, b0), distance_to_point(inner, b0 + outer.side()));
}

bool is_good(const DyadicCube& cube, const GoodParams& params) {
  params.validate();
  // Lattice points of level k - d sit every P = 2^d cubes of level k. Measured
  // in units of side(I), the nearest one is min(a, P - 1 - a) away.
  for (int d = params.r; d <= cube.level; ++d) {
    const std::size_t period = std::size_t{1} << d;
    const std::size_t a = cube.index % period;
    const double gap = static_cast<double>(std::min(a, period - 1 - a));
    if (gap <= std::exp2(d * (1.0 - params.gamma))) return false;
  }
  return true;
}

PGoodEstimate estimate_pgood(const Axis& axis, const GoodParams& params, int level_k, std::size_t trials,
                             std::uint64_t seed, std::size_t reference_cell) {
  params.validate();
  if (trials == 0) throw ParameterError("estimate_pgood needs at least one trial");
  if (level_k < 0 || level_k > axis.level()) throw ResolutionError("cube level outside the axis");
  if (reference_cell >= axis.cells()) throw ShapeError("reference cell outside the axis");

  const auto good_at = [&](std::size_t offset) {
    return is_good(DyadicSystem(axis, offset).cube_containing(reference_cell, level_k), params);
  };

  PGoodEstimate out;
  std::size_t good = 0;
  if (trials >= axis.cells()) {
    for (std::size_t o = 0; o < axis.cells(); ++o) good += good_at(o) ? 1 : 0;
    out.trials = axis.cells();
    out.exhaustive = true;
    out.estimate = static_cast<double>(good) / static_cast<double>(out.trials);
    return out;
  }
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, axis.cells() - 1);
  for (std::size_t t = 0; t < trials; ++t) good += good_at(pick(rng)) ? 1 : 0;
  out.trials = trials;
  out.estimate = static_cast<double>(good) / static_cast<double>(trials);
  out.halfwidth = 1.96 * std::sqrt(out.estimate * (1.0 - out.estimate) / static_cast<double>(trials));
  return out;
}

MajorantReport majorant_check(const DyadicCube& i_cube, const DyadicCube& j_cube, const GoodParams& params,
                              double lambda) {
  require_lambda(lambda);
  require_same_system(i_cube, j_cube, "majorant_check");
  if (!is_good(i_cube, params)) throw ContractError("majorant_check: I must be good");
  if (!i_cube.disjoint(j_cube)) throw ContractError("majorant_check: I and J must be disjoint");
  if (i_cube.level < j_cube.level) throw ContractError("majorant_check: side(I) must not exceed side(J)");

  const double exponent = 1.0 / (2.0 * (lambda + 1.0));
  const double scale = std::exp2(params.r);
  MajorantReport rep{join(i_cube, j_cube)};
  rep.distance = cube_distance(i_cube, j_cube);
  rep.separation_threshold = j_cube.side() * std::pow(i_cube.side() / j_cube.side(), exponent);
  rep.near_case = rep.distance <= rep.separation_threshold;
  const double lk = rep.join.side();
  if (rep.near_case) {
    rep.lhs = lk;
    rep.rhs = scale * i_cube.side();
  } else {
    rep.lhs = lk * std::pow(i_cube.side() / lk, exponent);
    rep.rhs = scale * rep.distance;
  }
  rep.holds = rep.lhs <= rep.rhs * (1.0 + 1e-12);
  return rep;
}

}  // namespace dyadica
