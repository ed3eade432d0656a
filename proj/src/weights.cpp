#include "dyadica/weights.hpp"

#include <algorithm>
#include <limits>
#include <span>
#include <string>

#include "dyadica/errors.hpp"

namespace dyadica {

namespace {

double wrap_half(double t) {
  t -= std::floor(t + 0.5);
  return t;
}

// int_0^s |u|^alpha du for s in [-1/2, 1/2].
double power_antiderivative(double s, double alpha) {
  const double v = std::pow(std::abs(s), alpha + 1.0) / (alpha + 1.0);
  return s < 0 ? -v : v;
}

std::vector<double> powered(const Weight& w, double exponent) {
  std::vector<double> out(w.axis().cells());
  for (std::size_t c = 0; c < out.size(); ++c) out[c] = std::pow(w[c], exponent);
  return out;
}

// max over the family of <a>_Q^ea <b>_Q^eb.
double sup_over_family(std::span<const double> a, std::span<const double> b, double ea, double eb,
                       const CubeFamily& family) {
  const std::size_t n = a.size();
  double best = 0.0;
  const auto consider = [&](double sa, double sb, double len) {
    best = std::max(best, std::pow(sa / len, ea) * std::pow(sb / len, eb));
  };
  if (family.kind == CubeFamily::Kind::all_intervals) {
    std::vector<double> pa(2 * n + 1, 0.0);
    std::vector<double> pb(2 * n + 1, 0.0);
    for (std::size_t k = 0; k < 2 * n; ++k) {
      pa[k + 1] = pa[k] + a[k % n];
      pb[k + 1] = pb[k] + b[k % n];
    }
    for (std::size_t s = 0; s < n; ++s) {
      for (std::size_t len = 1; len <= n; ++len) {
        consider(pa[s + len] - pa[s], pb[s + len] - pb[s], static_cast<double>(len));
      }
    }
    return best;
  }
  for (const DyadicSystem& sys : family.systems) {
    if (sys.axis().cells() != n) throw ShapeError("cube family system does not match the weight's axis");
    for (int k = 0; k <= sys.max_level(); ++k) {
      for (std::size_t m = 0; m < sys.cubes_at(k); ++m) {
        const DyadicCube q = sys.cube(k, m);
        double sa = 0.0;
        double sb = 0.0;
        for (std::size_t t = 0; t < q.cell_count(); ++t) {
          sa += a[q.cell(t)];
          sb += b[q.cell(t)];
        }
        consider(sa, sb, static_cast<double>(q.cell_count()));
      }
    }
  }
  return best;
}

void require_p(double p) {
  if (!(p > 1.0) || !std::isfinite(p)) throw ParameterError("exponent p must satisfy 1 < p < infinity");
}

void require_pq(double p, double q) {
  require_p(p);
  if (!(q > p) || !std::isfinite(q)) throw ParameterError("exponents must satisfy 1 < p < q < infinity");
}

}  // namespace

Weight::Weight(GridFunction base) : base_(std::move(base)) {
  if (base_.dims() != 1) throw ShapeError("a weight lives on one axis");
  for (std::size_t c = 0; c < base_.size(); ++c) {
    if (!(base_[c] > 0.0) || !std::isfinite(base_[c])) {
      throw ParameterError("weight entries must be finite and strictly positive (cell " + std::to_string(c) + ")");
    }
  }
}

Weight Weight::unit(const Axis& axis) { return Weight(GridFunction(axis, 1.0)); }

Weight Weight::pow(double exponent) const {
  return Weight(base_.map([exponent](double v) { return std::pow(v, exponent); }));
}

Weight Weight::scaled(double c) const {
  if (!(c > 0.0)) throw ParameterError("weight scale must be positive");
  return Weight(base_ * c);
}

ProductWeight::ProductWeight(Weight factor1, Weight factor2) : f1_(std::move(factor1)), f2_(std::move(factor2)) {}

ProductWeight ProductWeight::unit(const Axis& axis1, const Axis& axis2) {
  return ProductWeight(Weight::unit(axis1), Weight::unit(axis2));
}

ExponentTriple exponent_solve(double p, double lambda) {
  require_p(p);
  require_lambda(lambda);
  const double inv_q = lambda - 1.0 + 1.0 / p;
  if (!(inv_q > 0.0)) {
    throw InfeasibleExponentError("no finite q for p = " + std::to_string(p) + ", lambda = " + std::to_string(lambda) +
                                  ": need 1/p > 1 - lambda");
  }
  ExponentTriple t{p, 1.0 / inv_q, lambda};
  if (!(t.q > p) || !(t.q > 1.0)) throw InfeasibleExponentError("solved q does not exceed p");
  return t;
}

Weight power_weight(const Axis& axis, double alpha, double center) {
  if (!(std::abs(alpha) < 1.0)) throw ParameterError("power weight exponent must satisfy |alpha| < 1");
  const double h = axis.cell_width();
  GridFunction out(axis);
  for (std::size_t c = 0; c < axis.cells(); ++c) {
    if (alpha == 0.0) {
      out[c] = 1.0;
      continue;
    }
    // Cell in coordinates relative to the center, split where it crosses the
    // antipode.
    const double t0 = wrap_half(axis.cell_start(c) - center);
    const double t1 = t0 + h;
    double integral;
    if (t1 <= 0.5) {
      integral = power_antiderivative(t1, alpha) - power_antiderivative(t0, alpha);
    } else {
      integral = power_antiderivative(0.5, alpha) - power_antiderivative(t0, alpha) +
                 power_antiderivative(t1 - 1.0, alpha) - power_antiderivative(-0.5, alpha);
    }
    out[c] = integral / h;
  }
  return Weight(std::move(out));
}

CubeFamily CubeFamily::dyadic(std::vector<DyadicSystem> systems) {
  if (systems.empty()) throw ParameterError("a dyadic cube family needs at least one system");
  CubeFamily f;
  f.kind = Kind::dyadic;
  f.systems = std::move(systems);
  return f;
}

std::string CubeFamily::describe() const {
  if (kind == Kind::all_intervals) return "all grid intervals";
  std::string s = "dyadic cubes of offsets";
  for (const auto& sys : systems) s += " " + std::to_string(sys.offset_cells());
  return s;
}

double ap_characteristic(const Weight& w, double p, const CubeFamily& family) {
  require_p(p);
  const double pp = p / (p - 1.0);
  return sup_over_family(w.base().values(), powered(w, 1.0 - pp), 1.0, p - 1.0, family);
}

double apq_characteristic(const Weight& w, double p, double q, const CubeFamily& family) {
  require_pq(p, q);
  const double pp = p / (p - 1.0);
  return sup_over_family(powered(w, q), powered(w, -pp), 1.0, q / pp, family);
}

double ap_characteristic(const ProductWeight& w, double p, const CubeFamily& family1, const CubeFamily& family2) {
  return ap_characteristic(w.factor1(), p, family1) * ap_characteristic(w.factor2(), p, family2);
}

DerivedClassReport derived_class_check(const Weight& w, double p, double q, const CubeFamily& family) {
  require_pq(p, q);
  const double pp = p / (p - 1.0);
  const double qp = q / (q - 1.0);
  DerivedClassReport r;
  r.p = p;
  r.q = q;
  r.family = family.describe();
  r.apq = apq_characteristic(w, p, q, family);
  r.wq_in_aq = ap_characteristic(w.pow(q), q, family);
  r.wmp_in_ap_prime = ap_characteristic(w.pow(-pp), pp, family);
  r.wmq_in_aq_prime = ap_characteristic(w.pow(-qp), qp, family);
  r.all_finite = std::isfinite(r.apq) && std::isfinite(r.wq_in_aq) && std::isfinite(r.wmp_in_ap_prime) &&
                 std::isfinite(r.wmq_in_aq_prime);
  return r;
}

ProductWeight bloom_weight(const Weight& mu1, const Weight& sigma1, const Weight& mu2, const Weight& sigma2) {
  if (mu1.axis() != sigma1.axis() || mu2.axis() != sigma2.axis()) {
    throw ShapeError("bloom_weight: mu and sigma must share an axis");
  }
  return ProductWeight(Weight(mu1.base() * sigma1.inverse().base()), Weight(mu2.base() * sigma2.inverse().base()));
}

}  // namespace dyadica
