#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "dyadica/dyadic.hpp"
#include "dyadica/grid.hpp"

namespace dyadica {

/// A strictly positive one-axis function.
class Weight {
 public:
  explicit Weight(GridFunction base);
  static Weight unit(const Axis& axis);

  const GridFunction& base() const { return base_; }
  const Axis& axis() const { return base_.axis(); }
  double operator[](std::size_t cell) const { return base_[cell]; }

  /// Entrywise power of the cell values.
  Weight pow(double exponent) const;
  Weight inverse() const { return pow(-1.0); }
  Weight scaled(double c) const;

 private:
  GridFunction base_;
};

class ProductWeight {
 public:
  ProductWeight(Weight factor1, Weight factor2);
  static ProductWeight unit(const Axis& axis1, const Axis& axis2);

  const Weight& factor(int axis_index) const { return axis_index == 0 ? f1_ : f2_; }
  const Weight& factor1() const { return f1_; }
  const Weight& factor2() const { return f2_; }
  double at(std::size_t c1, std::size_t c2) const { return f1_[c1] * f2_[c2]; }
  GridFunction evaluate() const { return GridFunction::tensor(f1_.base(), f2_.base()); }

 private:
  Weight f1_;
  Weight f2_;
};

/// 1 < p < q with 1/q + 1/p' = lambda (one dimension).
struct ExponentTriple {
  double p = 0.0;
  double q = 0.0;
  double lambda = 0.0;

  double p_prime() const { return p / (p - 1.0); }
  double q_prime() const { return q / (q - 1.0); }
  /// |1/q + 1/p' - lambda|.
  double residual() const { return std::abs(1.0 / q + 1.0 / p_prime() - lambda); }
};

/// Solves 1/q = lambda - 1 + 1/p. Throws InfeasibleExponentError when no
/// finite q > p exists.
ExponentTriple exponent_solve(double p, double lambda);

/// Cell averages of d(x, center)^alpha on the torus, |alpha| < 1.
Weight power_weight(const Axis& axis, double alpha, double center);

/// Finite family of intervals over which characteristics are maximized:
/// every arc of whole cells on the torus, or the dyadic cubes (levels 0..L)
/// of the listed systems.
struct CubeFamily {
  enum class Kind { all_intervals, dyadic };
  Kind kind = Kind::all_intervals;
  std::vector<DyadicSystem> systems;

  static CubeFamily all_intervals() { return {}; }
  static CubeFamily dyadic(std::vector<DyadicSystem> systems);
  std::string describe() const;
};

/// max over the family of <w>_Q <w^(1-p')>_Q^(p-1).
double ap_characteristic(const Weight& w, double p, const CubeFamily& family = CubeFamily::all_intervals());

/// max over the family of <w^q>_Q <w^(-p')>_Q^(q/p'). Throws ParameterError
/// unless 1 < p < q.
double apq_characteristic(const Weight& w, double p, double q, const CubeFamily& family = CubeFamily::all_intervals());

/// A_p over product rectangles Q x P. For tensor weights both averages
/// factor, so this is the product of the per-axis characteristics.
double ap_characteristic(const ProductWeight& w, double p, const CubeFamily& family1, const CubeFamily& family2);

struct DerivedClassReport {
  double p = 0.0;
  double q = 0.0;
  std::string family;
  double apq = 0.0;             // [w]_{A_{p,q}}
  double wq_in_aq = 0.0;        // [w^q]_{A_q}
  double wmp_in_ap_prime = 0.0;  // [w^(-p')]_{A_{p'}}
  double wmq_in_aq_prime = 0.0;  // [w^(-q')]_{A_{q'}}
  bool all_finite = false;
};

DerivedClassReport derived_class_check(const Weight& w, double p, double q,
                                       const CubeFamily& family = CubeFamily::all_intervals());

/// nu = mu1/sigma1 (x) mu2/sigma2.
ProductWeight bloom_weight(const Weight& mu1, const Weight& sigma1, const Weight& mu2, const Weight& sigma2);

}  // namespace dyadica
