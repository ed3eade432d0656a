#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "dyadica/dyadic.hpp"
#include "dyadica/grid.hpp"

namespace dyadica {

/// Circulant fractional integral on one axis. apply() returns exact cell
/// averages of I_lambda applied to a piecewise-constant line.
class FracKernel {
 public:
  FracKernel(Axis axis, double lambda);

  const Axis& axis() const { return axis_; }
  double lambda() const { return lambda_; }
  const std::vector<double>& row() const { return row_; }
  std::vector<double> apply(const std::vector<double>& line) const;

 private:
  Axis axis_;
  double lambda_;
  std::vector<double> row_;
};

/// (I_lambda f)(a) = sum_b f(b) kernel_cell_integral(a, b) / h on a one-axis f.
GridFunction frac_integral(const GridFunction& f, double lambda);

/// I_lambda acting on one variable of a two-axis f.
GridFunction partial_frac_integral(const GridFunction& f, double lambda, int axis_index);

struct ShiftCoefficient {
  double raw = 0.0;         // <h_J, I_lambda h_I>
  double normalized = 0.0;  // raw |K|^lambda / (|I| |J|)^1/2, K = I v J
};

ShiftCoefficient shift_coefficient(const DyadicCube& i_cube, const DyadicCube& j_cube, double lambda);

/// max |<1_J, I_lambda h_I>| over the Haar cubes I of the system and every
/// interval J of whole cells centred at the midpoint of I.
double concentric_pairing_max(const DyadicSystem& system, double lambda);

/// Every raw coefficient <h_J, I_lambda h_I> of one system, indexed by Haar
/// slots (see haar_slot). Built column by column from I_lambda h_I.
class ShiftMatrix {
 public:
  ShiftMatrix(const DyadicSystem& system, double lambda);

  const DyadicSystem& system() const { return system_; }
  double lambda() const { return lambda_; }
  double raw(std::size_t slot_j, std::size_t slot_i) const { return entries_[slot_j * n_ + slot_i]; }
  double raw(const DyadicCube& i_cube, const DyadicCube& j_cube) const;

 private:
  DyadicSystem system_;
  double lambda_;
  std::size_t n_;
  std::vector<double> entries_;
};

enum class SigmaKind { out, near, shallow_in, deep_in };

const char* to_string(SigmaKind kind);

struct SigmaClass {
  SigmaKind kind = SigmaKind::out;
  bool transposed = false;
  std::string tag() const;
  friend bool operator==(const SigmaClass&, const SigmaClass&) = default;
};

/// Four-way split of a pair with side(I) <= side(J):
///   out        dist(I, J) > side(J) (side(I)/side(J))^gamma
///   near       disjoint and not out
///   shallow_in I inside J, side(I) >= 2^-r side(J)
///   deep_in    I inside J, side(I) <  2^-r side(J)
/// Throws ContractError when side(I) > side(J).
SigmaClass classify_pair(const DyadicCube& i_cube, const DyadicCube& j_cube, const GoodParams& params);

/// Classifies in whichever order satisfies the side condition and marks
/// swapped pairs as transposed.
SigmaClass classify_ordered(const DyadicCube& i_cube, const DyadicCube& j_cube, const GoodParams& params);

struct ClassConstant {
  SigmaKind kind = SigmaKind::out;
  /// max |raw| |K|^lambda w / (|I||J|)^1/2 over good-I pairs of the class,
  /// w = 2^(max(i,j)/2) for out and deep_in, 1 otherwise.
  double c_star = 0.0;
  std::size_t pairs = 0;
  /// Largest normalized coefficient per m = max(i, j).
  std::map<int, double> max_by_depth;
};

/// Scan of every good-I pair (I, J), side(I) <= side(J), of one system.
struct CoefficientCensus {
  double lambda = 0.0;
  GoodParams params;
  std::size_t offset = 0;
  int level = 0;
  std::array<ClassConstant, 4> classes;

  const ClassConstant& of(SigmaKind kind) const { return classes[static_cast<int>(kind)]; }
};

CoefficientCensus coefficient_census(const ShiftMatrix& matrix, const GoodParams& params);

/// Least-squares slope of -log2(max normalized coefficient) against
/// m = max(i, j) for 1 <= m <= max_depth. Needs two populated depths.
double decay_exponent(const ClassConstant& cls, int max_depth);

struct SystemResidual {
  std::size_t offset = 0;
  double lhs = 0.0;       // <g, I_lambda f>
  double rhs = 0.0;       // sum_{I,J} <g,h_J><h_J,I_lambda h_I><h_I,f>
  double scale = 0.0;     // max(|lhs|, sum of |terms|)
  double relative = 0.0;  // |lhs - rhs| / scale
};

struct DepthContribution {
  int i = 0;
  int j = 0;
  double signed_sum = 0.0;
  double abs_sum = 0.0;
};

struct RepresentationReport {
  double lambda = 0.0;
  GoodParams params;
  std::vector<SystemResidual> systems;
  /// Pair contributions grouped by (level(I) - level(K), level(J) - level(K)),
  /// K = I v J, summed over all systems and averaged.
  std::vector<DepthContribution> depths;
  double max_relative_residual = 0.0;
  /// Present when at least one system was supplied; census of the first one.
  std::vector<CoefficientCensus> census;
};

/// Checks the bilinear Haar identity for mean-zero f, g on each system.
/// Throws ContractError when f or g has a nonzero mean.
RepresentationReport verify_representation(const GridFunction& f, const GridFunction& g, double lambda,
                                           const GoodParams& params, const std::vector<DyadicSystem>& systems);

/// Coefficients a_{I,J,K} of one fractional dyadic shift S^{i,j}: for every
/// K with level(K) + max(i,j) < L, a dense 2^i x 2^j block over the depth-i
/// and depth-j descendants of K (left to right).
class ShiftCoefficientTable {
 public:
  ShiftCoefficientTable(DyadicSystem system, int i, int j, double lambda);

  /// Every entry at +-bound with random signs.
  static ShiftCoefficientTable maximal(const DyadicSystem& system, int i, int j, double lambda, std::uint64_t seed);
  /// Entries uniform in [-bound, bound].
  static ShiftCoefficientTable random(const DyadicSystem& system, int i, int j, double lambda, std::uint64_t seed);
  /// |I|^1/2 |J|^1/2 / |K|^lambda.
  static double bound(const DyadicCube& i_cube, const DyadicCube& j_cube, const DyadicCube& k_cube, double lambda);

  const DyadicSystem& system() const { return system_; }
  int i() const { return i_; }
  int j() const { return j_; }
  double lambda() const { return lambda_; }
  /// Deepest K level carried, L - 1 - max(i, j); negative when empty.
  int top_level() const { return top_level_; }

  double at(const DyadicCube& k_cube, std::size_t i_rel, std::size_t j_rel) const;
  double& at(const DyadicCube& k_cube, std::size_t i_rel, std::size_t j_rel);

  DyadicCube i_cube(const DyadicCube& k_cube, std::size_t i_rel) const;
  DyadicCube j_cube(const DyadicCube& k_cube, std::size_t j_rel) const;
  std::vector<DyadicCube> k_cubes() const;

  /// Throws InvariantError when an entry exceeds its bound.
  void validate() const;

 private:
  std::size_t position(const DyadicCube& k_cube, std::size_t i_rel, std::size_t j_rel) const;

  DyadicSystem system_;
  int i_;
  int j_;
  double lambda_;
  int top_level_;
  std::vector<double> entries_;
};

/// S^{i,j} f = sum_K sum a <f, h_I> h_J on a one-axis f.
GridFunction apply_shift(const GridFunction& f, const DyadicSystem& system, int i, int j, double lambda,
                         const ShiftCoefficientTable& table);
GridFunction apply_shift(const GridFunction& f, const ShiftCoefficientTable& table);

/// The shift acting on one variable of a two-axis f.
GridFunction apply_partial_shift(const GridFunction& f, const ShiftCoefficientTable& table, int axis_index);

/// sum over all cubes K of the system of |K|^-lambda int_K |f| 1_K, levels 0..L.
GridFunction dyadic_potential(const GridFunction& f, const DyadicSystem& system, double lambda);

/// max over cells of dyadic_potential(|f|) / I_lambda |f|. Throws
/// DegenerateInputError when f vanishes identically.
double domination_ratio(const GridFunction& f, double lambda, const DyadicSystem& system);

}  // namespace dyadica
