#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace dyadica {

inline constexpr int kMaxLevel = 14;

/// One factor of the torus at dyadic resolution 2^-L. The circumference is 1.
class Axis {
 public:
  /// Throws ConfigurationError unless 1 <= level <= kMaxLevel.
  explicit Axis(int level);

  int level() const { return level_; }
  std::size_t cells() const { return std::size_t{1} << level_; }
  double cell_width() const;
  /// Left endpoint of a cell.
  double cell_start(std::size_t cell) const { return static_cast<double>(cell) * cell_width(); }

  friend bool operator==(const Axis&, const Axis&) = default;

 private:
  int level_;
};

Axis build_axis(int level);

/// Piecewise-constant function on one axis or on the product of two axes.
/// Every entry is the average of the represented function over its cell.
/// Two-axis storage is x1-major: value(i1, i2) = values[i1 * n2 + i2].
class GridFunction {
 public:
  explicit GridFunction(Axis axis, double fill = 0.0);
  GridFunction(Axis axis1, Axis axis2, double fill = 0.0);
  GridFunction(Axis axis, std::vector<double> values);
  GridFunction(Axis axis1, Axis axis2, std::vector<double> values);

  /// Cell averages of a continuous-in-cell function sampled through `average`,
  /// which must return the mean of the target over [x0, x1).
  static GridFunction from_averages(Axis axis, const std::function<double(double, double)>& average);
  /// Cell-midpoint sampling. Exact for functions affine on every cell.
  static GridFunction from_midpoints(Axis axis, const std::function<double(double)>& fn);
  static GridFunction tensor(const GridFunction& u, const GridFunction& v);

  int dims() const { return axis2_ ? 2 : 1; }
  const Axis& axis() const { return axis1_; }
  /// `index` is 0 or 1.
  const Axis& axis(int index) const;
  std::size_t extent(int index) const { return axis(index).cells(); }
  std::size_t size() const { return values_.size(); }
  double cell_volume() const;

  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }
  double& at(std::size_t i1, std::size_t i2) { return values_[i1 * extent(1) + i2]; }
  double at(std::size_t i1, std::size_t i2) const { return values_[i1 * extent(1) + i2]; }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }

  bool same_shape(const GridFunction& other) const;

  /// 1D slice along the given axis at a fixed index of the other axis.
  GridFunction slice(int along_axis, std::size_t fixed_index) const;
  void set_slice(int along_axis, std::size_t fixed_index, const GridFunction& line);

  double mean() const;
  double max_abs() const;
  /// Integral of f over the domain.
  double integral() const;

  GridFunction abs() const;
  GridFunction map(const std::function<double(double)>& fn) const;

  GridFunction& operator+=(const GridFunction& other);
  GridFunction& operator-=(const GridFunction& other);
  GridFunction& operator*=(double s);
  /// Pointwise product.
  GridFunction& operator*=(const GridFunction& other);

  friend GridFunction operator+(GridFunction a, const GridFunction& b) { return a += b; }
  friend GridFunction operator-(GridFunction a, const GridFunction& b) { return a -= b; }
  friend GridFunction operator*(GridFunction a, double s) { return a *= s; }
  friend GridFunction operator*(double s, GridFunction a) { return a *= s; }
  friend GridFunction operator*(GridFunction a, const GridFunction& b) { return a *= b; }

 private:
  void require_same_shape(const GridFunction& other, const char* what) const;

  Axis axis1_;
  std::optional<Axis> axis2_;
  std::vector<double> values_;
};

/// Sum over cells of f * g * cell volume. Throws ShapeError on axis mismatch.
double inner_product(const GridFunction& f, const GridFunction& g);

/// L2 norm, sqrt(<f, f>).
double l2_norm(const GridFunction& f);

/// Double integral of |x - y|^-lambda over [x0,x1] x [y0,y1] on the real line.
double interval_pair_integral(double x0, double x1, double y0, double y1, double lambda);

/// Same double integral with the unit-torus metric d(x,y) = min_k |x - y + k|.
/// Accepts any real endpoints; the kernel is treated as 1-periodic in x - y.
double torus_interval_pair_integral(double x0, double x1, double y0, double y1, double lambda);

/// Exact torus double integral of d(x,y)^-lambda over cell_a x cell_b.
/// Series evaluation replaces the closed form once the cells are four or
/// more widths apart, where the second difference loses digits.
double kernel_cell_integral(const Axis& axis, std::size_t cell_a, std::size_t cell_b, double lambda);

/// Circulant row k[d] = kernel_cell_integral(axis, 0, d, lambda), d = 0..N-1.
/// k[d] == k[N - d] holds bitwise.
std::vector<double> kernel_row(const Axis& axis, double lambda);

/// Integral of d(x, 0)^-lambda over the torus.
double torus_kernel_mass(double lambda);

void require_lambda(double lambda);

}  // namespace dyadica
