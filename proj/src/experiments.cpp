#include "dyadica/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numbers>
#include <random>
#include <thread>

#include "dyadica/analysis.hpp"
#include "dyadica/errors.hpp"
#include "dyadica/fracops.hpp"
#include "dyadica/haar.hpp"
#include "dyadica/paracomm.hpp"

namespace dyadica {

std::size_t thread_cap() {
  std::size_t hw = std::max<std::size_t>(1, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("DYADICA_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return hw;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min(thread_cap(), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < n; i += workers) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

double variation(std::span<const double> values) {
  if (values.empty()) return 0.0;
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  if (!(*lo > 0.0) || !std::isfinite(*hi)) return std::numeric_limits<double>::infinity();
  return *hi / *lo - 1.0;
}

namespace {

std::vector<double> average_ranks(std::span<const double> v) {
  std::vector<std::size_t> order(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = r;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw ShapeError("spearman: length mismatch");
  const std::size_t n = x.size();
  if (n < 2) return 0.0;
  const std::vector<double> rx = average_ranks(x), ry = average_ranks(y);
  const double mean = 0.5 * static_cast<double>(n + 1);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (rx[i] - mean) * (ry[i] - mean);
    sxx += (rx[i] - mean) * (rx[i] - mean);
    syy += (ry[i] - mean) * (ry[i] - mean);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

GridFunction embed(const GridFunction& coarse, const Axis& fine) {
  if (coarse.dims() != 1 || fine.level() < coarse.axis().level()) throw ShapeError("embed: target must refine a line");
  const int shift = fine.level() - coarse.axis().level();
  GridFunction out(fine);
  for (std::size_t c = 0; c < fine.cells(); ++c) out[c] = coarse[c >> shift];
  return out;
}

GridFunction embed(const GridFunction& coarse, const Axis& fine1, const Axis& fine2) {
  if (coarse.dims() != 2 || fine1.level() < coarse.axis(0).level() || fine2.level() < coarse.axis(1).level()) {
    throw ShapeError("embed: target must refine both axes");
  }
  const int s1 = fine1.level() - coarse.axis(0).level();
  const int s2 = fine2.level() - coarse.axis(1).level();
  GridFunction out(fine1, fine2);
  for (std::size_t a = 0; a < fine1.cells(); ++a) {
    for (std::size_t b = 0; b < fine2.cells(); ++b) out.at(a, b) = coarse.at(a >> s1, b >> s2);
  }
  return out;
}

StabilityReport summarize(std::string label, const std::vector<int>& levels,
                          const std::vector<std::vector<double>>& ratios) {
  StabilityReport rep;
  rep.label = std::move(label);
  std::vector<double> maxima;
  for (std::size_t l = 0; l < levels.size(); ++l) {
    StabilityRow row;
    row.level = levels[l];
    for (double r : ratios[l]) {
      if (std::isnan(r)) {
        ++row.skipped;
        continue;
      }
      if (!std::isfinite(r)) rep.finite = false;
      ++row.samples;
      row.ensemble_max = std::max(row.ensemble_max, r);
      rep.sample_levels.push_back(levels[l]);
      rep.sample_ratios.push_back(r);
    }
    maxima.push_back(row.ensemble_max);
    rep.rows.push_back(row);
  }
  rep.variation = variation(maxima);
  rep.spearman = spearman(rep.sample_levels, rep.sample_ratios);
  return rep;
}

std::vector<SmoothSample> smooth_ensemble() {
  using std::numbers::pi;
  return {
      {"cosine", [](double x) { return 1.0 + 0.5 * std::cos(2.0 * pi * x); }},
      {"exp-sine", [](double x) { return std::exp(std::sin(2.0 * pi * x)); }},
      {"bump", [](double x) { return std::exp(-8.0 * std::sin(pi * x) * std::sin(pi * x)); }},
      {"two-mode", [](double x) { return std::sin(2.0 * pi * x) + 0.3 * std::cos(6.0 * pi * x); }},
  };
}

DominationReport domination_experiment(const DominationConfig& config) {
  DominationReport rep;
  const auto funcs = smooth_ensemble();
  for (const auto& s : funcs) {
    for (double lambda : config.lambdas) {
      std::vector<double> mr, pr;
      for (int level : config.levels) {
        const Axis axis = build_axis(level);
        const DyadicSystem sys(axis, 0);
        const GridFunction f = GridFunction::from_midpoints(axis, s.fn);
        const GridFunction base = frac_integral(f.abs(), lambda);
        const GridFunction m = frac_maximal(f, sys, lambda);
        const GridFunction pot = dyadic_potential(f, sys, lambda);
        double a = 0.0, b = 0.0;
        for (std::size_t c = 0; c < axis.cells(); ++c) {
          a = std::max(a, m[c] / base[c]);
          b = std::max(b, pot[c] / base[c]);
        }
        if (!std::isfinite(a) || !std::isfinite(b)) rep.finite = false;
        rep.rows.push_back({s.name, lambda, level, a, b});
        mr.push_back(a);
        pr.push_back(b);
      }
      DominationSeries ser{s.name, lambda, variation(mr), variation(pr)};
      rep.worst_variation = std::max({rep.worst_variation, ser.maximal_variation, ser.potential_variation});
      rep.series.push_back(ser);
    }
  }
  return rep;
}

const char* to_string(NormOperator op) {
  switch (op) {
    case NormOperator::frac_integral: return "frac-integral";
    case NormOperator::frac_maximal: return "frac-maximal";
    case NormOperator::dyadic_maximal: return "dyadic-maximal";
    case NormOperator::square: return "square";
    case NormOperator::A1: return "A1";
    case NormOperator::A2: return "A2";
    case NormOperator::A3: return "A3";
    case NormOperator::A4: return "A4";
  }
  return "?";
}

std::vector<NormOperator> all_norm_operators() {
  return {NormOperator::frac_integral, NormOperator::frac_maximal, NormOperator::dyadic_maximal, NormOperator::square,
          NormOperator::A1,           NormOperator::A2,           NormOperator::A3,             NormOperator::A4};
}

NormOperator norm_operator_from_string(const std::string& name) {
  for (NormOperator op : all_norm_operators()) {
    if (name == to_string(op)) return op;
  }
  throw ParameterError("unknown operator '" + name + "'");
}

namespace {

constexpr double kWeightCenter = 0.5;

std::mt19937_64 sample_rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t id) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(id)};
  return std::mt19937_64(seq);
}

// Haar expansion with Student-t (two degrees of freedom) coefficients.
GridFunction heavy_haar(const Axis& axis, std::mt19937_64& rng) {
  std::student_t_distribution<double> t(2.0);
  std::vector<double> c(axis.cells());
  for (double& v : c) v = t(rng);
  return GridFunction(axis, haar_inverse(c, DyadicSystem(axis, 0)));
}

GridFunction heavy_haar(const Axis& a1, const Axis& a2, std::mt19937_64& rng) {
  std::student_t_distribution<double> t(2.0);
  std::vector<double> c(a1.cells() * a2.cells());
  for (double& v : c) v = t(rng);
  return HaarCoefficientMap(DyadicSystem(a1, 0), DyadicSystem(a2, 0), std::move(c)).reconstruct();
}

GridFunction random_indicator(const Axis& axis, std::mt19937_64& rng) {
  const DyadicSystem sys(axis, 0);
  const int level = std::uniform_int_distribution<int>(0, axis.level())(rng);
  const std::size_t index = std::uniform_int_distribution<std::size_t>(0, sys.cubes_at(level) - 1)(rng);
  const DyadicCube q = sys.cube(level, index);
  GridFunction out(axis);
  for (std::size_t t = 0; t < q.cell_count(); ++t) out[q.cell(t)] = 1.0;
  return out;
}

GridFunction design_line(const Axis& axis, std::mt19937_64& rng, std::size_t id) {
  if (id % 3 == 1) return random_indicator(axis, rng);
  if (id % 3 == 2) {
    const DyadicSystem sys(axis, 0);
    const int level = std::uniform_int_distribution<int>(0, axis.level() - 1)(rng);
    const std::size_t index = std::uniform_int_distribution<std::size_t>(0, sys.cubes_at(level) - 1)(rng);
    return haar_function(sys.cube(level, index)) * std::student_t_distribution<double>(2.0)(rng);
  }
  return heavy_haar(axis, rng);
}

struct DesignPair {
  GridFunction b;
  GridFunction f;
};

// Heavy-tailed b and f, an indicator tensor f, or b aligned with f.
DesignPair design_pair(const Axis& a1, const Axis& a2, std::mt19937_64& rng, std::size_t id) {
  GridFunction b = heavy_haar(a1, a2, rng);
  switch (id % 3) {
    case 0: return {b, heavy_haar(a1, a2, rng)};
    case 1: return {b, GridFunction::tensor(random_indicator(a1, rng), random_indicator(a2, rng))};
    default: return {b, b};
  }
}

ParaTag para_of(NormOperator op) {
  switch (op) {
    case NormOperator::A1: return ParaTag::A1;
    case NormOperator::A2: return ParaTag::A2;
    case NormOperator::A3: return ParaTag::A3;
    default: return ParaTag::A4;
  }
}

bool is_paraproduct(NormOperator op) {
  return op == NormOperator::A1 || op == NormOperator::A2 || op == NormOperator::A3 || op == NormOperator::A4;
}

double ratio_or_skip(double num, double den) {
  if (!(den > 0.0)) return std::numeric_limits<double>::quiet_NaN();
  return num / den;
}

std::string format_alpha(double a) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", a);
  return buf;
}

}  // namespace

std::vector<NormEnsemble> norm_experiment(const NormConfig& config) {
  const ExponentTriple ex = exponent_solve(config.p, config.lambda);
  const double p = ex.p, q = ex.q;
  for (int level : config.levels) {
    if (level < config.design_level) throw ConfigurationError("norm levels must not be below the design level");
  }
  std::vector<NormEnsemble> out;
  std::uint64_t stream = 0;
  for (NormOperator op : config.operators) {
    for (double alpha : config.alphas) {
      ++stream;
      NormEnsemble ens;
      ens.op = op;
      ens.alpha = alpha;
      for (int level : config.levels) {
        const Axis axis = build_axis(level);
        ens.characteristic = std::max(ens.characteristic, apq_characteristic(power_weight(axis, alpha, kWeightCenter), p, q));
        if (is_paraproduct(op)) {
          ens.characteristic =
              std::max(ens.characteristic, apq_characteristic(power_weight(axis, -alpha, kWeightCenter), p, q));
        }
      }
      if (!(ens.characteristic <= config.max_characteristic)) continue;

      const Axis design = build_axis(config.design_level);
      std::vector<std::vector<double>> ratios(config.levels.size(), std::vector<double>(config.samples));
      for (std::size_t l = 0; l < config.levels.size(); ++l) {
        const Axis axis = build_axis(config.levels[l]);
        const DyadicSystem sys(axis, 0);
        const Weight w = power_weight(axis, alpha, kWeightCenter);
        const Weight wp = w.pow(p), wq = w.pow(q);
        if (!is_paraproduct(op)) {
          parallel_for(config.samples, [&](std::size_t i) {
            auto rng = sample_rng(config.seed, stream, i);
            const GridFunction f = embed(design_line(design, rng, i), axis);
            const double den = lp_norm(f, p, wp);
            double num = 0.0;
            switch (op) {
              case NormOperator::frac_integral: num = lp_norm(frac_integral(f, config.lambda), q, wq); break;
              case NormOperator::frac_maximal: num = lp_norm(frac_maximal(f, sys, config.lambda), q, wq); break;
              case NormOperator::dyadic_maximal: num = lp_norm(dyadic_maximal(f, sys), p, wp); break;
              default: num = lp_norm(square_function(f, sys), p, wp); break;
            }
            ratios[l][i] = ratio_or_skip(num, den);
          });
          continue;
        }
        const SystemPair sp{sys, sys};
        const Weight w_minus = power_weight(axis, -alpha, kWeightCenter);
        const Weight sigma = w_minus.pow(p);
        const ProductWeight nu = bloom_weight(w, w_minus, w, w_minus);
        const OmegaFamily family = OmegaFamily::standard(sp, config.lshape_depth);
        parallel_for(config.samples, [&](std::size_t i) {
          auto rng = sample_rng(config.seed, stream, i);
          const DesignPair d = design_pair(design, design, rng, i);
          const GridFunction b = embed(d.b, axis, axis);
          const GridFunction f = embed(d.f, axis, axis);
          const double bmo = bmo_prod_norm(b, nu, family);
          const double den = bmo * mixed_norm(f, p, p, wp, wp);
          const double num = mixed_norm(paraproduct(para_of(op), b, f, sp), p, p, sigma, sigma);
          ratios[l][i] = ratio_or_skip(num, den);
        });
      }
      ens.stability = summarize(std::string(to_string(op)) + " alpha=" + format_alpha(alpha), config.levels, ratios);
      out.push_back(std::move(ens));
    }
  }
  return out;
}

double bloom_ratio(const GridFunction& b, const GridFunction& f, const BloomQuadruple& quadruple,
                   const BloomConfig& config) {
  if (b.dims() != 2 || !b.same_shape(f)) throw ShapeError("bloom_ratio: b and f must share a two-axis grid");
  const ExponentTriple e1 = exponent_solve(config.p1, config.lambda1);
  const ExponentTriple e2 = exponent_solve(config.p2, config.lambda2);
  const SystemPair sp{DyadicSystem(b.axis(0), 0), DyadicSystem(b.axis(1), 0)};
  const Weight mu1 = power_weight(b.axis(0), quadruple.mu1, kWeightCenter);
  const Weight sigma1 = power_weight(b.axis(0), quadruple.sigma1, kWeightCenter);
  const Weight mu2 = power_weight(b.axis(1), quadruple.mu2, kWeightCenter);
  const Weight sigma2 = power_weight(b.axis(1), quadruple.sigma2, kWeightCenter);
  const double bmo = bmo_prod_norm(b, bloom_weight(mu1, sigma1, mu2, sigma2),
                                   OmegaFamily::standard(sp, config.lshape_depth));
  const double den = bmo * mixed_norm(f, e1.p, e2.p, mu1.pow(e1.p), mu2.pow(e2.p));
  const GridFunction c = commutator(b, f, CommutatorSpec::iterated(config.lambda1, config.lambda2));
  return ratio_or_skip(mixed_norm(c, e1.q, e2.q, sigma1.pow(e1.q), sigma2.pow(e2.q)), den);
}

BloomReport bloom_experiment(const BloomConfig& config) {
  const ExponentTriple e1 = exponent_solve(config.p1, config.lambda1);
  const ExponentTriple e2 = exponent_solve(config.p2, config.lambda2);
  for (int level : config.levels) {
    if (level < config.design_level) throw ConfigurationError("bloom levels must not be below the design level");
  }
  BloomReport rep;
  {
    const DyadicSystem sys(build_axis(4), 0);
    const GridFunction h = GridFunction::tensor(haar_function(sys.cube(1, 0)), haar_function(sys.cube(2, 1)));
    rep.baseline = bloom_ratio(h, h, BloomQuadruple{}, config);
  }

  const Axis design = build_axis(config.design_level);
  std::uint64_t stream = 1000;
  for (const BloomQuadruple& quad : config.quadruples) {
    ++stream;
    BloomEnsemble ens;
    ens.quadruple = quad;
    std::vector<std::vector<double>> ratios(config.levels.size(), std::vector<double>(config.samples));
    for (std::size_t l = 0; l < config.levels.size(); ++l) {
      const Axis axis = build_axis(config.levels[l]);
      const double chars[4] = {apq_characteristic(power_weight(axis, quad.mu1, kWeightCenter), e1.p, e1.q),
                               apq_characteristic(power_weight(axis, quad.sigma1, kWeightCenter), e1.p, e1.q),
                               apq_characteristic(power_weight(axis, quad.mu2, kWeightCenter), e2.p, e2.q),
                               apq_characteristic(power_weight(axis, quad.sigma2, kWeightCenter), e2.p, e2.q)};
      for (int k = 0; k < 4; ++k) ens.characteristics[k] = std::max(ens.characteristics[k], chars[k]);
      parallel_for(config.samples, [&](std::size_t i) {
        auto rng = sample_rng(config.seed, stream, i);
        const DesignPair d = design_pair(design, design, rng, i);
        ratios[l][i] = bloom_ratio(embed(d.b, axis, axis), embed(d.f, axis, axis), quad, config);
      });
    }
    ens.stability = summarize("bloom mu=(" + format_alpha(quad.mu1) + "," + format_alpha(quad.mu2) + ") sigma=(" +
                                  format_alpha(quad.sigma1) + "," + format_alpha(quad.sigma2) + ")",
                              config.levels, ratios);
    rep.ensembles.push_back(std::move(ens));
  }
  return rep;
}

}  // namespace dyadica
