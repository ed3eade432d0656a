#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "dyadica/grid.hpp"
#include "dyadica/weights.hpp"

namespace dyadica {

/// Worker count for ensemble loops: DYADICA_THREADS if set and positive,
/// else the hardware concurrency.
std::size_t thread_cap();

/// Runs fn(0..n-1) on up to thread_cap() threads. fn must only touch its own
/// output slot.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

/// max/min - 1 over positive values; +inf if some value is not positive.
double variation(std::span<const double> values);

/// Spearman rank correlation with average ranks for ties. 0 when either
/// side is constant.
double spearman(std::span<const double> x, std::span<const double> y);

/// Piecewise-constant refinement of a coarse function onto finer axes.
GridFunction embed(const GridFunction& coarse, const Axis& fine);
GridFunction embed(const GridFunction& coarse, const Axis& fine1, const Axis& fine2);

struct StabilityRow {
  int level = 0;
  double ensemble_max = 0.0;
  std::size_t samples = 0;
  std::size_t skipped = 0;
};

struct StabilityReport {
  std::string label;
  std::vector<StabilityRow> rows;
  /// Per-sample (level, ratio), level-major, sample ids ascending.
  std::vector<double> sample_levels;
  std::vector<double> sample_ratios;
  double variation = 0.0;  // of the ensemble maxima across levels
  double spearman = 0.0;   // pooled over every (level, ratio) sample
  bool finite = true;
};

/// Builds the report from per-level sample ratios; NaN marks a skipped sample.
StabilityReport summarize(std::string label, const std::vector<int>& levels,
                          const std::vector<std::vector<double>>& ratios);

// Pointwise domination of the dyadic fractional maximal function and the
// dyadic potential by I_lambda |f|.

struct SmoothSample {
  std::string name;
  std::function<double(double)> fn;
};

/// Fixed smooth periodic test functions.
std::vector<SmoothSample> smooth_ensemble();

struct DominationConfig {
  std::vector<int> levels{6, 8, 10};
  std::vector<double> lambdas{0.3, 0.5, 0.7};
};

struct DominationRow {
  std::string function;
  double lambda = 0.0;
  int level = 0;
  double maximal_ratio = 0.0;   // max over cells of M_lambda f / I_lambda |f|
  double potential_ratio = 0.0; // max over cells of the dyadic potential / I_lambda |f|
};

struct DominationSeries {
  std::string function;
  double lambda = 0.0;
  double maximal_variation = 0.0;
  double potential_variation = 0.0;
};

struct DominationReport {
  std::vector<DominationRow> rows;
  std::vector<DominationSeries> series;
  double worst_variation = 0.0;
  bool finite = true;
};

DominationReport domination_experiment(const DominationConfig& config);

// Weighted operator-norm ratio ensembles.

enum class NormOperator { frac_integral, frac_maximal, dyadic_maximal, square, A1, A2, A3, A4 };

const char* to_string(NormOperator op);
NormOperator norm_operator_from_string(const std::string& name);
std::vector<NormOperator> all_norm_operators();

struct NormConfig {
  std::vector<int> levels{3, 4, 5};
  int design_level = 3;
  double p = 4.0 / 3.0;
  double lambda = 0.5;
  /// Power-weight exponents; weights |x - 1/2|^alpha.
  std::vector<double> alphas{-0.2, 0.0, 0.2};
  std::vector<NormOperator> operators = all_norm_operators();
  std::size_t samples = 40;
  double max_characteristic = 10.0;
  int lshape_depth = 2;
  std::uint64_t seed = 1;
};

struct NormEnsemble {
  NormOperator op = NormOperator::frac_integral;
  double alpha = 0.0;
  double characteristic = 0.0;  // max over levels of [w]_{A_{p,q}}
  StabilityReport stability;
};

/// One-axis operators: ||T f||_{L^q(w^q)} / ||f||_{L^p(w^p)} for I_lambda and
/// M_lambda, ||T f||_{L^p(w^p)} / ||f||_{L^p(w^p)} for M and S.
/// Paraproducts (levels per axis): ||A_k(b, f)||_{L^p(L^p)(sigma)} /
/// (||b||_{BMO(nu)} ||f||_{L^p(L^p)(mu)}) with mu = w_alpha^p (x) w_alpha^p,
/// sigma = w_-alpha^p (x) w_-alpha^p, nu = (mu / sigma)^(1/p).
/// Weights whose characteristic exceeds max_characteristic are dropped.
std::vector<NormEnsemble> norm_experiment(const NormConfig& config);

// Two-weight commutator ratios.

struct BloomQuadruple {
  double mu1 = 0.0;
  double sigma1 = 0.0;
  double mu2 = 0.0;
  double sigma2 = 0.0;
};

struct BloomConfig {
  std::vector<int> levels{3, 4, 5};
  int design_level = 3;
  double p1 = 4.0 / 3.0;
  double p2 = 4.0 / 3.0;
  double lambda1 = 0.5;
  double lambda2 = 0.5;
  std::vector<BloomQuadruple> quadruples{{0.0, 0.0, 0.0, 0.0}, {0.15, -0.1, 0.1, 0.2}, {-0.2, 0.2, 0.2, -0.15}};
  std::size_t samples = 50;
  int lshape_depth = 2;
  std::uint64_t seed = 1;
};

struct BloomEnsemble {
  BloomQuadruple quadruple;
  /// [mu1], [sigma1] in A_{p1,q1}; [mu2], [sigma2] in A_{p2,q2}; max over levels.
  double characteristics[4] = {0.0, 0.0, 0.0, 0.0};
  StabilityReport stability;
};

struct BloomReport {
  std::vector<BloomEnsemble> ensembles;
  /// Unit weights, b = f = h_I (x) h_J at level 4 per axis.
  double baseline = 0.0;
};

/// ||[I1, [b, I2]] f||_{L^q2(L^q1)(sigma2^q2 x sigma1^q1)} /
/// (||b||_{BMO(nu)} ||f||_{L^p2(L^p1)(mu2^p2 x mu1^p1)}), nu = mu / sigma per axis,
/// on the grid of b with offset-0 systems. NaN when the BMO norm or the norm
/// of f vanishes. BMO values are restricted-family lower bounds.
double bloom_ratio(const GridFunction& b, const GridFunction& f, const BloomQuadruple& quadruple,
                   const BloomConfig& config);

/// Ensembles of bloom_ratio over design-level samples embedded at each level.
/// Skipped samples are counted per level.
BloomReport bloom_experiment(const BloomConfig& config);

}  // namespace dyadica
