#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "dyadica/errors.hpp"
#include "dyadica/haar.hpp"
#include "oracles.hpp"

using namespace dyadica;

namespace {

GridFunction identity_function(const Axis& a) {
  return GridFunction::from_averages(a, [](double x0, double x1) { return 0.5 * (x0 + x1); });
}

}  // namespace

TEST(HaarFunction, UnitCube) {
  const DyadicSystem sys(build_axis(3), 0);
  const GridFunction h = haar_function(sys.root());
  for (std::size_t c = 0; c < 8; ++c) EXPECT_EQ(h[c], c < 4 ? 1.0 : -1.0);
}

TEST(HaarFunction, MeanZeroUnitNormAndMatchesOracle) {
  for (std::size_t offset : {0u, 5u, 31u}) {
    const DyadicSystem sys(build_axis(5), offset);
    for (const DyadicCube& q : sys.haar_cubes()) {
      const GridFunction h = haar_function(q);
      EXPECT_NEAR(h.mean(), 0.0, 1e-15);
      EXPECT_NEAR(inner_product(h, h), 1.0, 1e-13);
      EXPECT_EQ(oracle::max_abs_diff(h, oracle::haar(q)), 0.0);
    }
  }
}

TEST(HaarFunction, FinestCubeThrows) {
  const DyadicSystem sys(build_axis(3), 0);
  EXPECT_THROW(haar_function(sys.cube(3, 1)), ResolutionError);
}

TEST(HaarFunction, PairingWithIdentity) {
  const DyadicSystem sys(build_axis(6), 0);
  EXPECT_NEAR(inner_product(identity_function(sys.axis()), haar_function(sys.root())), -0.25, 1e-15);
}

TEST(HaarFunction, OrthonormalWithinSystem) {
  for (int level : {4, 6}) {
    const DyadicSystem sys(build_axis(level), 3);
    const auto cubes = sys.haar_cubes();
    std::vector<GridFunction> hs;
    for (const auto& q : cubes) hs.push_back(haar_function(q));
    for (std::size_t a = 0; a < hs.size(); ++a) {
      for (std::size_t b = 0; b < hs.size(); ++b) {
        EXPECT_NEAR(inner_product(hs[a], hs[b]), a == b ? 1.0 : 0.0, 1e-13);
      }
    }
  }
}

TEST(HaarExpand, SingleHaarFunction) {
  const DyadicSystem sys(build_axis(5), 9);
  const DyadicCube k = sys.cube(2, 3);
  const HaarCoefficientMap map = haar_expand(haar_function(k), sys);
  EXPECT_NEAR(map.mean(), 0.0, 1e-15);
  for (const DyadicCube& q : sys.haar_cubes()) EXPECT_NEAR(map.coefficient(q), q == k ? 1.0 : 0.0, 1e-14);
}

TEST(HaarExpand, ConstantHasOnlyMean) {
  const DyadicSystem sys(build_axis(5), 2);
  const HaarCoefficientMap map = haar_expand(GridFunction(sys.axis(), 3.5), sys);
  EXPECT_DOUBLE_EQ(map.mean(), 3.5);
  EXPECT_NEAR(map.haar_energy(), 0.0, 1e-28);
}

TEST(HaarExpand, CoefficientsMatchInnerProducts) {
  std::mt19937_64 rng(3);
  const DyadicSystem sys(build_axis(5), 17);
  const GridFunction f = oracle::random_function(sys.axis(), rng);
  const HaarCoefficientMap map = haar_expand(f, sys);
  for (const DyadicCube& q : sys.haar_cubes()) {
    EXPECT_NEAR(map.coefficient(q), inner_product(f, oracle::haar(q)), 1e-13);
  }
  EXPECT_NEAR(map.mean(), f.mean(), 1e-14);
}

TEST(HaarExpand, ReconstructionAndPlancherelOneAxis) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const DyadicSystem sys = sample_system(build_axis(6), rng());
    const GridFunction f = oracle::random_function(sys.axis(), rng);
    const HaarCoefficientMap map = haar_expand(f, sys);
    EXPECT_LE(oracle::max_abs_diff(map.reconstruct(), f), 1e-12);
    EXPECT_NEAR(map.energy(), inner_product(f, f), 1e-12 * inner_product(f, f));
  }
}

TEST(HaarExpand, ReconstructionAndPlancherelTwoAxes) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const DyadicSystem s1 = sample_system(build_axis(4), rng());
    const DyadicSystem s2 = sample_system(build_axis(3), rng());
    const GridFunction f = oracle::random_function(s1.axis(), s2.axis(), rng);
    const HaarCoefficientMap map = haar_expand(f, s1, s2);
    EXPECT_LE(oracle::max_abs_diff(map.reconstruct(), f), 1e-12);
    EXPECT_NEAR(map.energy(), inner_product(f, f), 1e-12 * inner_product(f, f));
  }
}

TEST(HaarExpand, RectangleCoefficientsMatchTensorPairings) {
  std::mt19937_64 rng(9);
  const DyadicSystem s1(build_axis(3), 5);
  const DyadicSystem s2(build_axis(4), 2);
  const GridFunction f = oracle::random_function(s1.axis(), s2.axis(), rng);
  const HaarCoefficientMap map = haar_expand(f, s1, s2);
  for (const auto& i : s1.haar_cubes()) {
    for (const auto& j : s2.haar_cubes()) {
      const GridFunction h = GridFunction::tensor(oracle::haar(i), oracle::haar(j));
      EXPECT_NEAR(map.coefficient(i, j), inner_product(f, h), 1e-13);
    }
  }
}

TEST(HaarExpand, SystemMismatchThrows) {
  const DyadicSystem sys(build_axis(4), 0);
  EXPECT_THROW(haar_expand(GridFunction(build_axis(5)), sys), ShapeError);
  const HaarCoefficientMap map = haar_expand(GridFunction(build_axis(4)), sys);
  EXPECT_THROW(map.coefficient(DyadicSystem(build_axis(4), 1).cube(1, 0)), SystemMismatchError);
}

TEST(MartingaleBlock, DifferenceIsChildAveragesMinusParentAverage) {
  std::mt19937_64 rng(10);
  const DyadicSystem sys(build_axis(5), 6);
  const GridFunction f = oracle::random_function(sys.axis(), rng);
  for (const DyadicCube& k : sys.haar_cubes()) {
    const GridFunction d = martingale_block(f, k, 0);
    const double c = inner_product(f, oracle::haar(k));
    GridFunction expected = oracle::haar(k) * c;
    EXPECT_LE(oracle::max_abs_diff(d, expected), 1e-13);
    // Restricted to K.
    for (std::size_t cell = 0; cell < 32; ++cell) {
      if (!k.contains_cell(cell)) EXPECT_EQ(d[cell], 0.0);
    }
  }
}

TEST(MartingaleBlock, TelescopesToFunction) {
  std::mt19937_64 rng(11);
  const DyadicSystem sys(build_axis(6), 40);
  const GridFunction f = oracle::random_function(sys.axis(), rng);
  GridFunction sum(sys.axis(), f.mean());
  for (const DyadicCube& k : sys.haar_cubes()) sum += martingale_block(f, k, 0);
  EXPECT_LE(oracle::max_abs_diff(sum, f), 1e-12);
}

TEST(MartingaleBlock, BlockEqualsSumOverDescendantChains) {
  std::mt19937_64 rng(12);
  const DyadicSystem sys(build_axis(6), 13);
  const GridFunction f = oracle::random_function(sys.axis(), rng);
  for (const DyadicCube& k : sys.cubes(0, 3)) {
    for (int i = 0; k.level + i < 6; ++i) {
      GridFunction expected(sys.axis());
      for (const DyadicCube& q : sys.cubes(k.level + i, k.level + i)) {
        if (ancestor(q, i) == k) expected += oracle::haar(q) * inner_product(f, oracle::haar(q));
      }
      EXPECT_LE(oracle::max_abs_diff(martingale_block(f, k, i), expected), 1e-12);
    }
  }
}

TEST(MartingaleBlock, DeeperBlockHasNoCoarserComponent) {
  std::mt19937_64 rng(13);
  const DyadicSystem sys(build_axis(5), 0);
  const GridFunction f = oracle::random_function(sys.axis(), rng);
  for (const DyadicCube& k : sys.cubes(0, 2)) {
    const GridFunction block = martingale_block(f, k, 1);
    // Averages over K's children vanish: the block lives at the grandchild scale.
    for (int which : {0, 1}) {
      const auto cells = oracle::cells_of(k.child(which));
      double s = 0.0;
      for (std::size_t c : cells) s += block[c];
      EXPECT_NEAR(s, 0.0, 1e-12);
    }
    EXPECT_NEAR(inner_product(block, oracle::haar(k)), 0.0, 1e-13);
  }
}

TEST(MartingaleBlock, DepthOverflowThrows) {
  const DyadicSystem sys(build_axis(4), 0);
  EXPECT_THROW(martingale_block(GridFunction(sys.axis()), sys.cube(2, 0), 2), ResolutionError);
  EXPECT_NO_THROW(martingale_block(GridFunction(sys.axis()), sys.cube(2, 0), 1));
}

TEST(MartingaleBlock, ActsOnOneAxisOfProduct) {
  std::mt19937_64 rng(14);
  const DyadicSystem s1(build_axis(4), 3);
  const Axis a2 = build_axis(3);
  const GridFunction u = oracle::random_function(s1.axis(), rng);
  const GridFunction v = oracle::random_function(a2, rng);
  const DyadicCube k = s1.cube(1, 1);
  const GridFunction block = martingale_block(GridFunction::tensor(u, v), k, 1, 0);
  EXPECT_LE(oracle::max_abs_diff(block, GridFunction::tensor(martingale_block(u, k, 1), v)), 1e-13);
}

TEST(AverageProject, Examples) {
  const DyadicSystem sys(build_axis(6), 0);
  const DyadicCube left = sys.cube(1, 0);
  const GridFunction one(sys.axis(), 1.0);
  const GridFunction p1 = average_project(one, left);
  for (std::size_t c = 0; c < 64; ++c) EXPECT_EQ(p1[c], c < 32 ? 1.0 : 0.0);

  const GridFunction p2 = average_project(haar_function(left), left);
  EXPECT_LE(p2.max_abs(), 1e-15);

  const GridFunction p3 = average_project(identity_function(sys.axis()), left);
  for (std::size_t c = 0; c < 64; ++c) EXPECT_NEAR(p3[c], c < 32 ? 0.25 : 0.0, 1e-15);
}

TEST(AverageProject, AxisMismatchThrows) {
  const DyadicSystem sys(build_axis(4), 0);
  EXPECT_THROW(average_project(GridFunction(build_axis(5)), sys.root()), ShapeError);
  EXPECT_THROW(average_project(GridFunction(sys.axis()), sys.root(), 1), ShapeError);
}

TEST(RectBlock, SingleRectangle) {
  const DyadicSystem s1(build_axis(4), 1);
  const DyadicSystem s2(build_axis(4), 6);
  const DyadicCube i = s1.cube(2, 1);
  const DyadicCube j = s2.cube(1, 0);
  const GridFunction h = GridFunction::tensor(haar_function(i), haar_function(j));
  EXPECT_LE(oracle::max_abs_diff(rect_block(h, i, j, 0, 0), h), 1e-13);

  std::mt19937_64 rng(15);
  const GridFunction g = GridFunction::tensor(GridFunction(s1.axis(), 1.0), oracle::random_function(s2.axis(), rng));
  EXPECT_LE(rect_block(g, i, j, 0, 0).max_abs(), 1e-13);
}

TEST(RectBlock, FullBiParameterReconstruction) {
  std::mt19937_64 rng(16);
  const DyadicSystem s1(build_axis(4), 7);
  const DyadicSystem s2(build_axis(4), 2);
  const GridFunction f = oracle::random_function(s1.axis(), s2.axis(), rng);
  GridFunction sum(s1.axis(), s2.axis());
  for (const auto& k : s1.haar_cubes()) {
    for (const auto& v : s2.haar_cubes()) sum += rect_block(f, k, v, 0, 0);
  }
  // Mixed mean terms: the x2-mean of Haar parts in x1, the x1-mean of Haar
  // parts in x2, and the overall mean.
  const GridFunction e1 = level_average(f, s1, 0, 0);
  const GridFunction e2 = level_average(f, s2, 0, 1);
  GridFunction mean_terms = e1 + e2;
  mean_terms -= GridFunction(s1.axis(), s2.axis(), f.mean());
  sum += mean_terms;
  EXPECT_LE(oracle::max_abs_diff(sum, f), 1e-12);
}

TEST(RectBlock, DepthsMatchRectangleSums) {
  std::mt19937_64 rng(17);
  const DyadicSystem s1(build_axis(4), 0);
  const DyadicSystem s2(build_axis(4), 9);
  const GridFunction f = oracle::random_function(s1.axis(), s2.axis(), rng);
  const DyadicCube k = s1.cube(1, 1);
  const DyadicCube v = s2.cube(0, 0);
  GridFunction expected(s1.axis(), s2.axis());
  for (const auto& i : s1.cubes(3, 3)) {
    if (ancestor(i, 2) != k) continue;
    for (const auto& j : s2.cubes(1, 1)) {
      const GridFunction h = GridFunction::tensor(oracle::haar(i), oracle::haar(j));
      expected += h * inner_product(f, h);
    }
  }
  EXPECT_LE(oracle::max_abs_diff(rect_block(f, k, v, 2, 1), expected), 1e-12);
}

TEST(PartialPairing, Examples) {
  std::mt19937_64 rng(18);
  const DyadicSystem s1(build_axis(4), 3);
  const Axis a2 = build_axis(3);
  const DyadicCube i = s1.cube(1, 1);
  const GridFunction g = oracle::random_function(a2, rng);
  EXPECT_LE(oracle::max_abs_diff(partial_pairing(GridFunction::tensor(haar_function(i), g), i, 0), g), 1e-13);
  EXPECT_LE(partial_pairing(GridFunction::tensor(GridFunction(s1.axis(), 1.0), g), i, 0).max_abs(), 1e-13);
  EXPECT_THROW(partial_pairing(g, s1.root(), 0), ShapeError);
}

TEST(PartialPairing, FubiniOnFiniteSums) {
  std::mt19937_64 rng(19);
  const DyadicSystem s1(build_axis(4), 5);
  const DyadicSystem s2(build_axis(4), 11);
  const GridFunction f = oracle::random_function(s1.axis(), s2.axis(), rng);
  for (const auto& i : s1.haar_cubes()) {
    const GridFunction line = partial_pairing(f, i, 0);
    for (const auto& j : s2.haar_cubes()) {
      const double iterated = inner_product(line, oracle::haar(j));
      const double direct = inner_product(f, GridFunction::tensor(oracle::haar(i), oracle::haar(j)));
      EXPECT_NEAR(iterated, direct, 1e-13);
    }
  }
  const GridFunction other = partial_pairing(f, s2.cube(2, 1), 1);
  EXPECT_EQ(other.axis(), s1.axis());
}
