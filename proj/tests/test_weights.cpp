#include <gtest/gtest.h>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <random>

#include "dyadica/errors.hpp"
#include "dyadica/weights.hpp"
#include "oracles.hpp"

using namespace dyadica;

namespace {

Weight random_weight(const Axis& a, std::mt19937_64& rng) {
  std::lognormal_distribution<double> ln(0.0, 0.8);
  GridFunction g(a);
  for (auto& v : g.values()) v = ln(rng);
  return Weight(g);
}

}  // namespace

TEST(WeightType, RejectsNonPositive) {
  GridFunction g(build_axis(3), 1.0);
  g[4] = 0.0;
  EXPECT_THROW(Weight{g}, ParameterError);
  g[4] = -1.0;
  EXPECT_THROW(Weight{g}, ParameterError);
  EXPECT_THROW(Weight(GridFunction(build_axis(2), build_axis(2), 1.0)), ShapeError);
}

TEST(ExponentSolve, Examples) {
  const ExponentTriple t = exponent_solve(4.0 / 3.0, 0.5);
  EXPECT_NEAR(t.q, 4.0, 1e-12);
  EXPECT_NEAR(1.0 / t.q + 1.0 / t.p_prime(), 0.5, 1e-12);
  EXPECT_THROW(exponent_solve(2.0, 0.5), InfeasibleExponentError);
  EXPECT_THROW(exponent_solve(3.0, 0.3), InfeasibleExponentError);
  EXPECT_THROW(exponent_solve(1.0, 0.3), ParameterError);
  for (double lambda : {0.2, 0.5, 0.8}) {
    for (double p = 1.05; 1.0 / p > 1.0 - lambda + 1e-9; p += 0.05) {
      const ExponentTriple s = exponent_solve(p, lambda);
      EXPECT_LE(s.residual(), 1e-12);
      EXPECT_GT(s.q, s.p);
    }
  }
}

TEST(PowerWeight, ZeroExponentAndSymmetry) {
  const Axis a = build_axis(6);
  const Weight one = power_weight(a, 0.0, 0.3);
  for (std::size_t c = 0; c < a.cells(); ++c) EXPECT_EQ(one[c], 1.0);
  const Weight w = power_weight(a, 0.5, 0.5);
  for (std::size_t c = 0; c < a.cells(); ++c) EXPECT_NEAR(w[c], w[a.cells() - 1 - c], 1e-14);
  EXPECT_THROW(power_weight(a, 1.0, 0.0), ParameterError);
  EXPECT_THROW(power_weight(a, -1.2, 0.0), ParameterError);
}

TEST(PowerWeight, MatchesQuadrature) {
  const Axis a = build_axis(8);
  boost::math::quadrature::tanh_sinh<double> rule;
  for (double alpha : {-0.6, -0.3, 0.5}) {
    for (double center : {0.0, 0.3, 0.71}) {
      const Weight w = power_weight(a, alpha, center);
      for (std::size_t c = 0; c < a.cells(); c += 7) {
        const double x0 = a.cell_start(c);
        const double x1 = x0 + a.cell_width();
        // Split at the center and the antipode, where the integrand kinks.
        std::vector<double> cuts{x0, x1};
        for (double k : {-1.0, 0.0, 1.0}) {
          for (double s : {center + k, center + 0.5 + k}) {
            if (s > x0 && s < x1) cuts.push_back(s);
          }
        }
        std::sort(cuts.begin(), cuts.end());
        double integral = 0.0;
        for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
          integral += rule.integrate(
              [&](double x) {
                const double d = oracle::point_distance(x, center);
                return d == 0.0 ? 0.0 : std::pow(d, alpha);
              },
              cuts[k], cuts[k + 1]);
        }
        const double avg = integral / a.cell_width();
        EXPECT_NEAR(w[c] / avg, 1.0, 1e-8) << "alpha=" << alpha << " center=" << center << " cell=" << c;
      }
    }
  }
}

TEST(ApCharacteristic, ConstantsGiveOne) {
  const Axis a = build_axis(5);
  for (double p : {1.5, 2.0, 4.0}) {
    EXPECT_DOUBLE_EQ(ap_characteristic(Weight::unit(a), p), 1.0);
    EXPECT_NEAR(ap_characteristic(Weight::unit(a).scaled(3.7), p), 1.0, 1e-13);
    EXPECT_NEAR(apq_characteristic(Weight::unit(a).scaled(0.2), p, p + 1.0), 1.0, 1e-13);
  }
  EXPECT_THROW(ap_characteristic(Weight::unit(a), 1.0), ParameterError);
  EXPECT_THROW(apq_characteristic(Weight::unit(a), 2.0, 2.0), ParameterError);
}

TEST(ApCharacteristic, PowerWeightMatchesBruteForce) {
  const Weight w = power_weight(build_axis(8), 0.5, 0.5);
  const double fast = ap_characteristic(w, 2.0);
  EXPECT_NEAR(fast, oracle::ap(w, 2.0), 1e-12 * fast);
  EXPECT_GT(fast, 1.0);
}

TEST(ApqCharacteristic, PowerWeightMatchesBruteForce) {
  const ExponentTriple t = exponent_solve(4.0 / 3.0, 0.5);
  const Weight w = power_weight(build_axis(7), 0.3, 0.2);
  const double fast = apq_characteristic(w, t.p, t.q);
  EXPECT_TRUE(std::isfinite(fast));
  EXPECT_NEAR(fast, oracle::apq(w, t.p, t.q), 1e-12 * fast);
}

TEST(ApCharacteristic, RandomWeightsMatchBruteForceAndExceedOne) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    const Weight w = random_weight(build_axis(4), rng);
    const double ap = ap_characteristic(w, 3.0);
    const double apq = apq_characteristic(w, 1.5, 4.0);
    EXPECT_NEAR(ap, oracle::ap(w, 3.0), 1e-12 * ap);
    EXPECT_NEAR(apq, oracle::apq(w, 1.5, 4.0), 1e-12 * apq);
    EXPECT_GE(ap, 1.0);
    EXPECT_GE(apq, 1.0);
    EXPECT_NEAR(ap_characteristic(w.scaled(9.0), 3.0), ap, 1e-12 * ap);
    EXPECT_NEAR(apq_characteristic(w.scaled(0.1), 1.5, 4.0), apq, 1e-12 * apq);
  }
}

TEST(ApCharacteristic, FamilyMonotone) {
  std::mt19937_64 rng(32);
  const Axis a = build_axis(6);
  const Weight w = random_weight(a, rng);
  const DyadicSystem s0(a, 0);
  const DyadicSystem s1(a, 21);
  const double one = apq_characteristic(w, 1.5, 3.0, CubeFamily::dyadic({s0}));
  const double two = apq_characteristic(w, 1.5, 3.0, CubeFamily::dyadic({s0, s1}));
  const double all = apq_characteristic(w, 1.5, 3.0);
  EXPECT_LE(one, two);
  EXPECT_LE(two, all);
  EXPECT_LE(ap_characteristic(w, 2.0, CubeFamily::dyadic({s1})), ap_characteristic(w, 2.0));
}

TEST(ApCharacteristic, DyadicFamilyMatchesCubeScan) {
  std::mt19937_64 rng(33);
  const Axis a = build_axis(5);
  const Weight w = random_weight(a, rng);
  const DyadicSystem sys(a, 9);
  double best = 0.0;
  for (const auto& q : sys.cubes(0, 5)) {
    double s1 = 0.0;
    double s2 = 0.0;
    const auto cells = oracle::cells_of(q);
    for (std::size_t c : cells) {
      s1 += w[c];
      s2 += std::pow(w[c], -1.0);
    }
    best = std::max(best, s1 / cells.size() * s2 / cells.size());
  }
  EXPECT_NEAR(ap_characteristic(w, 2.0, CubeFamily::dyadic({sys})), best, 1e-12 * best);
}

TEST(DerivedClasses, UnitAndPowerWeights) {
  const Axis a = build_axis(6);
  const DerivedClassReport unit = derived_class_check(Weight::unit(a), 1.5, 3.0);
  EXPECT_DOUBLE_EQ(unit.apq, 1.0);
  EXPECT_NEAR(unit.wq_in_aq, 1.0, 1e-14);
  EXPECT_NEAR(unit.wmp_in_ap_prime, 1.0, 1e-14);
  EXPECT_NEAR(unit.wmq_in_aq_prime, 1.0, 1e-14);
  EXPECT_EQ(unit.p, 1.5);
  EXPECT_EQ(unit.q, 3.0);
  EXPECT_EQ(unit.family, "all grid intervals");

  const ExponentTriple t = exponent_solve(4.0 / 3.0, 0.5);
  const DerivedClassReport r = derived_class_check(power_weight(a, 0.2, 0.0), t.p, t.q);
  EXPECT_TRUE(r.all_finite);
  EXPECT_GE(r.wq_in_aq, 1.0);
}

TEST(DerivedClasses, DualityIdentities) {
  // Per cube, [w^-q']_{A_q'} = [w^q]_{A_q}^(q'-1) and
  // [w^-1]_{A_{q',p'}} = [w]_{A_{p,q}}^(p'/q); both survive the supremum.
  std::mt19937_64 rng(34);
  const double p = 1.5;
  const double q = 4.0;
  const double pp = p / (p - 1.0);
  const double qp = q / (q - 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    const Weight w = random_weight(build_axis(5), rng);
    const DerivedClassReport r = derived_class_check(w, p, q);
    EXPECT_NEAR(r.wmq_in_aq_prime, std::pow(r.wq_in_aq, qp - 1.0), 1e-10 * r.wmq_in_aq_prime);
    const double dual = apq_characteristic(w.inverse(), qp, pp);
    EXPECT_NEAR(dual, std::pow(r.apq, pp / q), 1e-10 * dual);
  }
}

TEST(BloomWeight, Examples) {
  std::mt19937_64 rng(35);
  const Axis a1 = build_axis(3);
  const Axis a2 = build_axis(4);
  const Weight m1 = random_weight(a1, rng);
  const Weight s1 = random_weight(a1, rng);
  const Weight m2 = random_weight(a2, rng);
  const ProductWeight same = bloom_weight(m1, m1, m2, m2);
  for (std::size_t c = 0; c < a2.cells(); ++c) EXPECT_NEAR(same.factor2()[c], 1.0, 1e-15);
  const ProductWeight nu = bloom_weight(m1, s1, m2, m2);
  const ProductWeight swapped = bloom_weight(s1, m1, m2, m2);
  for (std::size_t c = 0; c < a1.cells(); ++c) EXPECT_NEAR(nu.factor1()[c] * swapped.factor1()[c], 1.0, 1e-14);
}

TEST(BloomWeight, ProductA2MatchesRectangleScan) {
  const Axis a1 = build_axis(4);
  const Axis a2 = build_axis(3);
  const ProductWeight nu = bloom_weight(power_weight(a1, 0.3, 0.1), power_weight(a1, -0.2, 0.6),
                                        power_weight(a2, 0.25, 0.5), power_weight(a2, -0.1, 0.0));
  const DyadicSystem d1(a1, 5);
  const DyadicSystem d2(a2, 2);
  const GridFunction w = nu.evaluate();
  double best = 0.0;
  for (const auto& q : d1.cubes(0, 4)) {
    for (const auto& r : d2.cubes(0, 3)) {
      double s = 0.0;
      double inv = 0.0;
      std::size_t count = 0;
      for (std::size_t c1 : oracle::cells_of(q)) {
        for (std::size_t c2 : oracle::cells_of(r)) {
          s += w.at(c1, c2);
          inv += 1.0 / w.at(c1, c2);
          ++count;
        }
      }
      best = std::max(best, s / count * inv / count);
    }
  }
  const double fast = ap_characteristic(nu, 2.0, CubeFamily::dyadic({d1}), CubeFamily::dyadic({d2}));
  EXPECT_TRUE(std::isfinite(fast));
  EXPECT_NEAR(fast, best, 1e-12 * best);
}
