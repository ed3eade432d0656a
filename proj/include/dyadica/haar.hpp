#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "dyadica/dyadic.hpp"
#include "dyadica/grid.hpp"

namespace dyadica {

/// L2-normalized Haar function: +|I|^-1/2 on the left half, -|I|^-1/2 on the
/// right half. Throws ResolutionError for finest-level cubes.
GridFunction haar_function(const DyadicCube& cube);

/// Coefficient slot of a cube in a one-axis coefficient vector. Slot 0 holds
/// the mean; the cube (k, m), k < L, sits at 2^k + m.
inline std::size_t haar_slot(const DyadicCube& cube) { return (std::size_t{1} << cube.level) + cube.index; }
/// Inverse of haar_slot; slot must be >= 1.
DyadicCube slot_cube(const DyadicSystem& system, std::size_t slot);

/// Coefficients of one line (cell values along the system's axis):
/// out[0] = mean, out[haar_slot(I)] = <f, h_I>.
std::vector<double> haar_forward(std::span<const double> line, const DyadicSystem& system);
std::vector<double> haar_inverse(std::span<const double> coefficients, const DyadicSystem& system);

/// Haar coefficients of a one- or two-axis function. Two-axis tables are
/// indexed (slot1, slot2) x1-major; slot 0 on an axis is that axis's mean,
/// so (0, 0) is the mean of f and (I, 0) is <f, h_I (x) 1>.
class HaarCoefficientMap {
 public:
  HaarCoefficientMap(DyadicSystem system, std::vector<double> entries);
  HaarCoefficientMap(DyadicSystem system1, DyadicSystem system2, std::vector<double> entries);

  int dims() const { return system2_ ? 2 : 1; }
  const DyadicSystem& system(int axis_index = 0) const;

  double mean() const { return entries_[0]; }
  double coefficient(const DyadicCube& cube) const;
  double coefficient(const DyadicCube& i_cube, const DyadicCube& j_cube) const;
  double at(std::size_t slot1, std::size_t slot2 = 0) const { return entries_[slot1 * stride() + slot2]; }
  double& at(std::size_t slot1, std::size_t slot2 = 0) { return entries_[slot1 * stride() + slot2]; }
  std::span<const double> entries() const { return entries_; }

  /// Sum of squares of every entry, mean terms included; equals ||f||_2^2.
  double energy() const;
  /// Energy of the pure Haar part (no mean slot on any axis).
  double haar_energy() const;

  GridFunction reconstruct() const;

 private:
  std::size_t stride() const { return system2_ ? system2_->axis().cells() : 1; }

  DyadicSystem system1_;
  std::optional<DyadicSystem> system2_;
  std::vector<double> entries_;
};

HaarCoefficientMap haar_expand(const GridFunction& f, const DyadicSystem& system);
HaarCoefficientMap haar_expand(const GridFunction& f, const DyadicSystem& system1, const DyadicSystem& system2);

/// E_k along one axis: averages over the level-k cubes of the system.
GridFunction level_average(const GridFunction& f, const DyadicSystem& system, int level, int axis_index = 0);
/// D_k = E_{k+1} - E_k along one axis, level < L.
GridFunction level_difference(const GridFunction& f, const DyadicSystem& system, int level, int axis_index = 0);

/// Delta_{K,i} f = sum of Delta_I f over I with I^(i) = K, acting on one axis.
/// Requires level(K) + i < L.
GridFunction martingale_block(const GridFunction& f, const DyadicCube& k_cube, int i, int axis_index = 0);

/// E_I on one axis: the average over I inside I, zero outside.
GridFunction average_project(const GridFunction& f, const DyadicCube& cube, int axis_index = 0);

/// Delta^{i,j}_{K x V} f: the axis-1 block of K followed by the axis-2 block of V.
GridFunction rect_block(const GridFunction& f, const DyadicCube& k_cube, const DyadicCube& v_cube, int i, int j);

/// <f, h_I>_axis: integrates a two-axis f against h_I on the given axis.
/// The result lives on the other axis.
GridFunction partial_pairing(const GridFunction& f, const DyadicCube& cube, int axis_index);

}  // namespace dyadica
