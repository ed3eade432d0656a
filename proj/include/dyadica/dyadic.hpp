#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "dyadica/grid.hpp"

namespace dyadica {

/// A cube of a shifted dyadic system. In the system's shifted frame
/// (cell c maps to (c - offset) mod N) it covers the contiguous cell range
/// [index * 2^(L-level), (index + 1) * 2^(L-level)).
struct DyadicCube {
  Axis axis;
  std::size_t offset = 0;  // system offset, in finest cells
  int level = 0;
  std::size_t index = 0;

  double side() const;
  /// Left endpoint on the torus, in [0, 1).
  double start() const;
  std::size_t cell_count() const { return std::size_t{1} << (axis.level() - level); }
  /// Shifted-frame position of the first cell.
  std::size_t shifted_begin() const { return index * cell_count(); }
  /// Torus cell index of the first (leftmost) cell.
  std::size_t first_cell() const { return (offset + shifted_begin()) % axis.cells(); }
  /// Torus cell index of the t-th cell of the cube, t < cell_count().
  std::size_t cell(std::size_t t) const { return (first_cell() + t) % axis.cells(); }
  bool contains_cell(std::size_t cell) const;
  /// Torus point at the centre of the cube.
  double center() const;

  bool same_system(const DyadicCube& other) const { return axis == other.axis && offset == other.offset; }
  /// Nesting test; both cubes must belong to one system.
  bool contains(const DyadicCube& other) const;
  bool disjoint(const DyadicCube& other) const { return !contains(other) && !other.contains(*this); }
  DyadicCube parent() const;
  /// which = 0 is the left half, 1 the right half.
  DyadicCube child(int which) const;

  friend bool operator==(const DyadicCube& a, const DyadicCube& b) {
    return a.axis == b.axis && a.offset == b.offset && a.level == b.level && a.index == b.index;
  }
  friend auto operator<=>(const DyadicCube& a, const DyadicCube& b) {
    if (auto c = a.axis.level() <=> b.axis.level(); c != 0) return c;
    if (auto c = a.offset <=> b.offset; c != 0) return c;
    if (auto c = a.level <=> b.level; c != 0) return c;
    return a.index <=> b.index;
  }
};

/// The standard dyadic lattice of an axis translated by a multiple of the
/// cell width. Levels run from 0 (the whole torus) to L (single cells).
class DyadicSystem {
 public:
  DyadicSystem(Axis axis, std::size_t offset_cells);

  const Axis& axis() const { return axis_; }
  std::size_t offset_cells() const { return offset_; }
  double offset() const { return static_cast<double>(offset_) * axis_.cell_width(); }
  int max_level() const { return axis_.level(); }

  std::size_t cubes_at(int level) const { return std::size_t{1} << level; }
  DyadicCube cube(int level, std::size_t index) const;
  DyadicCube cube_containing(std::size_t cell, int level) const;
  DyadicCube root() const { return cube(0, 0); }
  /// Every cube with level in [min_level, max_level], coarse to fine.
  std::vector<DyadicCube> cubes(int min_level, int max_level) const;
  /// Cubes that carry a Haar function, levels 0..L-1.
  std::vector<DyadicCube> haar_cubes() const { return cubes(0, max_level() - 1); }

  std::size_t shifted(std::size_t cell) const { return (cell + axis_.cells() - offset_) % axis_.cells(); }
  std::size_t unshifted(std::size_t position) const { return (position + offset_) % axis_.cells(); }

  friend bool operator==(const DyadicSystem&, const DyadicSystem&) = default;

 private:
  Axis axis_;
  std::size_t offset_;
};

/// Goodness parameters: a cube is bad when some cube J of the same system
/// with side >= 2^r times its own has a boundary point within
/// side(J) * (side(I) / side(J))^gamma.
struct GoodParams {
  int r = 3;
  double gamma = 0.25;

  /// r = 3, gamma = 1 / (2 (lambda + 1)).
  static GoodParams for_lambda(double lambda, int r = 3);
  void validate() const;
};

DyadicSystem sample_system(const Axis& axis, std::uint64_t seed);
/// All 2^L translates; averaging over them realizes the expectation over
/// random systems exactly on the cell-average function space.
std::vector<DyadicSystem> all_systems(const Axis& axis);

/// One system per axis of a two-axis grid.
struct SystemPair {
  DyadicSystem first;
  DyadicSystem second;

  const DyadicSystem& operator[](int axis_index) const { return axis_index == 0 ? first : second; }
  friend bool operator==(const SystemPair&, const SystemPair&) = default;
};

/// The unique cube of level k - i containing the input. Throws
/// LevelUnderflowError if i exceeds the cube level.
DyadicCube ancestor(const DyadicCube& cube, int i);

/// Smallest common ancestor. Throws SystemMismatchError across systems.
DyadicCube join(const DyadicCube& a, const DyadicCube& b);

/// Torus distance between the closures of two cubes of one system.
double cube_distance(const DyadicCube& a, const DyadicCube& b);

/// Torus distance from the closure of a cube to a point.
double distance_to_point(const DyadicCube& cube, double point);

/// Distance from the closure of `inner` to the endpoints of `outer`.
double distance_to_boundary(const DyadicCube& inner, const DyadicCube& outer);

bool is_good(const DyadicCube& cube, const GoodParams& params);

struct PGoodEstimate {
  double estimate = 0.0;
  /// Binomial 95% half width; zero when every offset was enumerated.
  double halfwidth = 0.0;
  std::size_t trials = 0;
  bool exhaustive = false;
};

/// Fraction of systems in which the level-k cube containing the reference
/// cell is good. When trials >= 2^L every offset is enumerated once.
/// Levels below r admit no qualifying J and report 1.
PGoodEstimate estimate_pgood(const Axis& axis, const GoodParams& params, int level_k, std::size_t trials,
                             std::uint64_t seed, std::size_t reference_cell = 0);

struct MajorantReport {
  DyadicCube join;
  bool near_case = false;
  double distance = 0.0;
  /// side(J) * (side(I)/side(J))^(1/(2(lambda+1))), the case separator.
  double separation_threshold = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
};

/// For a good I disjoint from J with side(I) <= side(J), checks that the join
/// K satisfies side(K) <= 2^r side(I) when I and J are close, and
/// side(K) (side(I)/side(K))^(1/(2(lambda+1))) <= 2^r dist(I, J) otherwise.
/// Throws ContractError when the preconditions fail.
MajorantReport majorant_check(const DyadicCube& i_cube, const DyadicCube& j_cube, const GoodParams& params,
                              double lambda);

}  // namespace dyadica
