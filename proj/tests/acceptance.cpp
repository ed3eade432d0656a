// Acceptance run: one PASS/FAIL line per criterion. Exit status 1 when any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "dyadica/analysis.hpp"
#include "dyadica/dyadic.hpp"
#include "dyadica/experiments.hpp"
#include "dyadica/fracops.hpp"
#include "dyadica/haar.hpp"
#include "dyadica/paracomm.hpp"
#include "dyadica/weights.hpp"
#include "oracles.hpp"

using namespace dyadica;

namespace {

// Tolerances and limits.
constexpr double kHaarTol = 1e-12;
constexpr double kHaarSeconds = 10.0;
constexpr double kRepresentationTol = 1e-8;
constexpr double kRepresentationSeconds = 60.0;
constexpr double kConcentricTol = 1e-10;
constexpr double kCStarVariation = 0.20;
constexpr double kDecayFloor = 0.45;
constexpr int kDecayMaxDepth = 5;
constexpr double kDecompositionTol = 1e-12;
constexpr double kExpansionTol = 1e-10;
constexpr double kExpansionSeconds = 120.0;
constexpr double kDominationVariation = 0.20;
constexpr double kNormVariation = 0.50;
constexpr double kNormTrend = 0.80;
constexpr double kNormCharacteristic = 10.0;
constexpr double kBloomVariation = 0.50;
constexpr double kBloomSeconds = 600.0;
constexpr double kOracleRelTol = 1e-12;
constexpr double kOracleAbsTol = 1e-13;

const std::vector<double> kLambdas{0.3, 0.5, 0.7};

int failures = 0;

void report(int id, const char* title, bool pass, const std::string& detail) {
  std::printf("[%s] %2d %s: %s\n", pass ? "PASS" : "FAIL", id, title, detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void haar_exactness() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(101);
  const Axis a6(6), a4(4);
  double worst1 = 0.0, worst2 = 0.0;
  for (int s = 0; s < 16; ++s) {
    const DyadicSystem sys = sample_system(a6, rng());
    const DyadicSystem s1 = sample_system(a4, rng()), s2 = sample_system(a4, rng());
    for (int k = 0; k < 100; ++k) {
      const GridFunction f = oracle::random_function(a6, rng);
      const HaarCoefficientMap m = haar_expand(f, sys);
      const double e = inner_product(f, f);
      worst1 = std::max({worst1, oracle::max_abs_diff(m.reconstruct(), f), std::abs(m.energy() - e) / e});
      const GridFunction g = oracle::random_function(a4, a4, rng);
      const HaarCoefficientMap m2 = haar_expand(g, s1, s2);
      const double e2 = inner_product(g, g);
      worst2 = std::max({worst2, oracle::max_abs_diff(m2.reconstruct(), g), std::abs(m2.energy() - e2) / e2});
    }
  }
  const double secs = seconds_since(t0);
  report(1, "Haar calculus exactness", worst1 <= kHaarTol && worst2 <= kHaarTol && secs <= kHaarSeconds,
         fmt("one-parameter %.2e, bi-parameter %.2e (tol %.0e), %.2f s", worst1, worst2, kHaarTol, secs));
}

void representation() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(102);
  const Axis a(6);
  const std::vector<DyadicSystem> systems = all_systems(a);
  double worst = 0.0;
  for (double lambda : kLambdas) {
    const GridFunction f = oracle::minus_mean(oracle::random_function(a, rng));
    const GridFunction g = oracle::minus_mean(oracle::random_function(a, rng));
    worst = std::max(worst,
                     verify_representation(f, g, lambda, GoodParams::for_lambda(lambda), systems).max_relative_residual);
  }
  const double secs = seconds_since(t0);
  report(2, "Representation identity", worst <= kRepresentationTol && secs <= kRepresentationSeconds,
         fmt("max relative residual %.2e over 64 offsets x 3 lambdas (tol %.0e), %.2f s", worst, kRepresentationTol,
             secs));
}

void concentric() {
  double worst = 0.0;
  for (double lambda : kLambdas) {
    for (std::size_t offset : {0u, 77u}) worst = std::max(worst, concentric_pairing_max(DyadicSystem(Axis(8), offset), lambda));
  }
  report(3, "Vanishing concentric pairing", worst <= kConcentricTol,
         fmt("max |<1_J, I h_I>| %.2e at L=8 (tol %.0e)", worst, kConcentricTol));
}

double windowed_decay(const ClassConstant& cls, int lo, int hi) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0, k = 0;
  for (const auto& [m, v] : cls.max_by_depth) {
    if (m < lo || m > hi || v <= 0.0) continue;
    const double y = -std::log2(v);
    sx += m;
    sy += y;
    sxx += double(m) * m;
    sxy += m * y;
    k += 1;
  }
  if (k < 2) return std::nan("");
  return (k * sxy - sx * sy) / (k * sxx - sx * sx);
}

void coefficient_decay() {
  // With gamma = 1/(2(lambda+1)) no cube of level >= r is good for r = 3, so
  // the census runs at lambda = 0.3, r = 4, where good cubes exist and the
  // deep_in class is populated at every level.
  const double lambda = 0.3;
  const GoodParams params = GoodParams::for_lambda(lambda, 4);
  std::vector<CoefficientCensus> census;
  for (int level : {6, 8, 10}) census.push_back(coefficient_census(ShiftMatrix(DyadicSystem(Axis(level), 0), lambda), params));

  bool pass = true;
  std::string detail = "c* variation";
  for (int k = 0; k < 4; ++k) {
    std::vector<double> values;
    for (const auto& c : census) {
      if (c.classes[k].pairs > 0) values.push_back(c.classes[k].c_star);
    }
    if (values.size() < census.size()) {
      detail += std::string(" ") + to_string(static_cast<SigmaKind>(k)) + "=unpopulated";
      continue;
    }
    const double v = variation(values);
    pass &= v <= kCStarVariation;
    detail += std::string(" ") + to_string(static_cast<SigmaKind>(k)) + fmt("=%.3f", v);
  }
  const CoefficientCensus& fine = census.back();
  const double out = windowed_decay(fine.of(SigmaKind::out), 1, kDecayMaxDepth);
  const double deep = windowed_decay(fine.of(SigmaKind::deep_in), params.r + 1, params.r + kDecayMaxDepth);
  pass &= out >= kDecayFloor && deep >= kDecayFloor;
  detail += fmt(" (limit %.2f); decay out %.3f (m<=5), deep_in %.3f (m=%g..", kCStarVariation, out, deep,
                params.r + 1.0);
  detail += fmt("%g) (floor %.2f)", params.r + kDecayMaxDepth, kDecayFloor);
  report(4, "Coefficient decay", pass, detail);
}

void majorant() {
  const double lambda = 0.5;
  const GoodParams params = GoodParams::for_lambda(lambda, 3);
  const Axis a(8);
  std::size_t pairs = 0, held = 0;
  for (const DyadicSystem& sys : all_systems(a)) {
    const std::vector<DyadicCube> cubes = sys.cubes(0, a.level());
    for (const DyadicCube& i : cubes) {
      if (!is_good(i, params)) continue;
      for (const DyadicCube& j : cubes) {
        if (j.level > i.level || !i.disjoint(j)) continue;
        ++pairs;
        held += majorant_check(i, j, params, lambda).holds;
      }
    }
  }
  report(5, "Majorant bounds", pairs > 0 && held == pairs,
         fmt("%.0f of %.0f qualifying pairs over all 256 offsets at L=8, r=3", double(held), double(pairs)));
}

void decomposition() {
  std::mt19937_64 rng(106);
  const Axis a(4);
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const SystemPair sp{sample_system(a, rng()), sample_system(a, rng())};
    const GridFunction b = oracle::random_function(a, a, rng), f = oracle::random_function(a, a, rng);
    const DecompositionReport r = decompose_product(b, f, sp);
    worst = std::max(worst, r.residual / r.scale);
  }
  report(6, "Paraproduct decomposition", worst <= kDecompositionTol,
         fmt("max residual / max|bf| %.2e over 100 pairs (tol %.0e)", worst, kDecompositionTol));
}

void expansion() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(107);
  std::uniform_int_distribution<int> depth(0, 2);
  const Axis a(4);
  double worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    const SystemPair sp{sample_system(a, rng()), sample_system(a, rng())};
    const int i = depth(rng), j = depth(rng), s = depth(rng), t = depth(rng);
    const std::uint64_t seed1 = rng(), seed2 = rng();
    const ShiftCoefficientTable t1 = k % 2 ? ShiftCoefficientTable::random(sp.first, i, j, 0.5, seed1)
                                           : ShiftCoefficientTable::maximal(sp.first, i, j, 0.5, seed1);
    const ShiftCoefficientTable t2 = k % 2 ? ShiftCoefficientTable::random(sp.second, s, t, 0.5, seed2)
                                           : ShiftCoefficientTable::maximal(sp.second, s, t, 0.5, seed2);
    const GridFunction b = oracle::random_function(a, a, rng), f = oracle::random_function(a, a, rng);
    worst = std::max(worst, shift_commutator_expand(b, f, t1, t2).residual);
  }
  const double secs = seconds_since(t0);
  report(7, "Commutator expansion identity", worst <= kExpansionTol && secs <= kExpansionSeconds,
         fmt("max |direct - E - sum groups| %.2e over 20 pairs (tol %.0e), %.2f s", worst, kExpansionTol, secs));
}

void domination() {
  DominationConfig cfg;
  cfg.levels = {6, 8, 10};
  cfg.lambdas = kLambdas;
  const DominationReport r = domination_experiment(cfg);
  report(8, "Pointwise dominations", r.finite && r.worst_variation <= kDominationVariation,
         fmt("worst variation %.3f over %.0f series (limit %.2f)", r.worst_variation, double(r.series.size()),
             kDominationVariation));
}

void norms() {
  const std::vector<NormEnsemble> out = norm_experiment(NormConfig{});
  double worst_var = 0.0, worst_rho = 0.0, worst_char = 0.0;
  bool finite = true;
  for (const NormEnsemble& e : out) {
    worst_var = std::max(worst_var, e.stability.variation);
    worst_rho = std::max(worst_rho, std::abs(e.stability.spearman));
    worst_char = std::max(worst_char, e.characteristic);
    finite &= e.stability.finite;
  }
  const bool pass = !out.empty() && finite && worst_var <= kNormVariation && worst_rho < kNormTrend &&
                    worst_char <= kNormCharacteristic;
  report(9, "Weighted-norm stability", pass,
         fmt("%.0f ensembles, worst variation %.3f (limit %.2f), worst |rho| %.3f", double(out.size()), worst_var,
             kNormVariation, worst_rho) +
             fmt(" (limit %.2f), max characteristic %.3f", kNormTrend, worst_char));
}

void bloom() {
  const auto t0 = std::chrono::steady_clock::now();
  const BloomConfig cfg;
  const BloomReport r = bloom_experiment(cfg);
  double worst = 0.0;
  bool finite = true;
  for (const BloomEnsemble& e : r.ensembles) {
    worst = std::max(worst, e.stability.variation);
    finite &= e.stability.finite;
  }
  const double secs = seconds_since(t0);
  const bool pass = r.ensembles.size() >= 3 && cfg.samples >= 50 && finite && worst <= kBloomVariation &&
                    secs <= kBloomSeconds;
  report(10, "Bloom ratio stability", pass,
         fmt("%.0f quadruples x %.0f samples, worst variation %.3f (limit %.2f)", double(r.ensembles.size()),
             double(cfg.samples), worst, kBloomVariation) +
             fmt(", %.2f s", secs));
}

void oracle_equivalence() {
  std::mt19937_64 rng(111);
  std::lognormal_distribution<double> ln(0.0, 0.7);
  auto weight = [&](const Axis& a) {
    GridFunction g(a);
    for (auto& v : g.values()) v = ln(rng);
    return Weight(g);
  };
  double ap = 0.0, sm = 0.0, bmo = 0.0;
  for (int k = 0; k < 20; ++k) {
    const Weight w = weight(Axis(4));
    const double fast_ap = ap_characteristic(w, 2.0);
    const double fast_apq = apq_characteristic(w, 4.0 / 3.0, 4.0);
    ap = std::max({ap, std::abs(fast_ap - oracle::ap(w, 2.0)) / fast_ap,
                   std::abs(fast_apq - oracle::apq(w, 4.0 / 3.0, 4.0)) / fast_apq});

    const GridFunction f = oracle::random_function(Axis(4), Axis(4), rng);
    sm = std::max(sm, oracle::max_abs_diff(strong_maximal(f), oracle::strong_maximal(f)));

    const SystemPair sp{sample_system(Axis(3), rng()), sample_system(Axis(3), rng())};
    const ProductWeight pw(weight(Axis(3)), weight(Axis(3)));
    const GridFunction b = oracle::random_function(Axis(3), Axis(3), rng);
    const double fast_bmo = bmo_prod_norm(b, pw, OmegaFamily::standard(sp, 2));
    bmo = std::max(bmo, std::abs(fast_bmo - oracle::bmo_prod(b, pw, sp, 2)) / fast_bmo);
  }
  report(11, "Oracle equivalence", ap <= kOracleRelTol && sm <= kOracleAbsTol && bmo <= kOracleRelTol,
         fmt("A_p/A_pq rel %.1e, strong maximal abs %.1e, BMO_prod rel %.1e over 20 inputs", ap, sm, bmo));
}

}  // namespace

int main() {
  const std::vector<std::function<void()>> criteria{haar_exactness, representation, concentric, coefficient_decay,
                                                    majorant,       decomposition,  expansion,  domination,
                                                    norms,          bloom,          oracle_equivalence};
  for (const auto& run : criteria) {
    try {
      run();
    } catch (const std::exception& e) {
      std::printf("[FAIL] criterion raised: %s\n", e.what());
      ++failures;
    }
  }
  std::printf("%d of %zu criteria failed\n", failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
