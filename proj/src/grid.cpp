#include "dyadica/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dyadica/errors.hpp"

namespace dyadica {

namespace {

// Second antiderivative of |t|^-lambda, even in t.
double second_antiderivative(double t, double lambda) {
  return std::pow(std::abs(t), 2.0 - lambda) / ((1.0 - lambda) * (2.0 - lambda));
}

double first_antiderivative(double t, double lambda) {
  const double v = std::pow(std::abs(t), 1.0 - lambda) / (1.0 - lambda);
  return t < 0 ? -v : v;
}

// Second antiderivative of the 1-periodic kernel d(u)^-lambda. On
// [n - 1/2, n + 1/2] it is F(u - n) plus the linear correction that keeps
// value and slope continuous across every half-integer.
double periodic_second_antiderivative(double u, double lambda) {
  const double n = std::round(u);
  const double mass = torus_kernel_mass(lambda);
  return second_antiderivative(u - n, lambda) + mass * (std::abs(n) * std::abs(u) - 0.5 * n * n);
}

// F(d+h) + F(d-h) - 2F(d) for d >= 4h as the even Taylor series
// 2 * sum_k (lambda)_{2k-2} d^{-lambda-2k+2} h^{2k} / (2k)!.
double separated_cell_series(double d, double h, double lambda) {
  const double ratio = (h / d) * (h / d);
  double rising = 1.0;  // (lambda)_{2k-2}
  double power = h * h * std::pow(d, -lambda);
  double factorial = 2.0;
  double sum = 0.0;
  for (int k = 1; k < 200; ++k) {
    const double term = 2.0 * rising * power / factorial;
    sum += term;
    if (term < 1e-18 * sum) break;
    rising *= (lambda + 2 * k - 2) * (lambda + 2 * k - 1);
    power *= ratio;
    factorial *= (2.0 * k + 1) * (2.0 * k + 2);
  }
  return sum;
}

// Antipodal cells: 2 * sum_{m>=2} (lambda)_{m-2} d^{-lambda-m+2} h^m / m!, d = 1/2.
double antipodal_cell_series(double h, double lambda) {
  const double d = 0.5;
  double rising = 1.0;
  double power = h * h * std::pow(d, -lambda);
  double factorial = 2.0;
  double sum = 0.0;
  for (int m = 2; m < 400; ++m) {
    const double term = 2.0 * rising * power / factorial;
    sum += term;
    if (term < 1e-18 * sum) break;
    rising *= lambda + m - 2;
    power *= h / d;
    factorial *= m + 1;
  }
  return sum;
}

}  // namespace

Axis::Axis(int level) : level_(level) {
  if (level < 1 || level > kMaxLevel) {
    throw ConfigurationError("axis level must lie in [1, " + std::to_string(kMaxLevel) + "], got " +
                             std::to_string(level));
  }
}

double Axis::cell_width() const { return std::ldexp(1.0, -level_); }

Axis build_axis(int level) { return Axis(level); }

GridFunction::GridFunction(Axis axis, double fill) : axis1_(axis), values_(axis.cells(), fill) {}

GridFunction::GridFunction(Axis axis1, Axis axis2, double fill)
    : axis1_(axis1), axis2_(axis2), values_(axis1.cells() * axis2.cells(), fill) {}

GridFunction::GridFunction(Axis axis, std::vector<double> values) : axis1_(axis), values_(std::move(values)) {
  if (values_.size() != axis1_.cells()) throw ShapeError("value table size does not match the axis");
}

GridFunction::GridFunction(Axis axis1, Axis axis2, std::vector<double> values)
    : axis1_(axis1), axis2_(axis2), values_(std::move(values)) {
  if (values_.size() != axis1.cells() * axis2.cells()) {
    throw ShapeError("value table size does not match the axes");
  }
}

GridFunction GridFunction::from_averages(Axis axis, const std::function<double(double, double)>& average) {
  GridFunction f(axis);
  const double h = axis.cell_width();
  for (std::size_t c = 0; c < axis.cells(); ++c) f[c] = average(c * h, (c + 1) * h);
  return f;
}

GridFunction GridFunction::from_midpoints(Axis axis, const std::function<double(double)>& fn) {
  GridFunction f(axis);
  const double h = axis.cell_width();
  for (std::size_t c = 0; c < axis.cells(); ++c) f[c] = fn((c + 0.5) * h);
  return f;
}

GridFunction GridFunction::tensor(const GridFunction& u, const GridFunction& v) {
  if (u.dims() != 1 || v.dims() != 1) throw ShapeError("tensor product needs two one-axis functions");
  GridFunction out(u.axis(), v.axis());
  const std::size_t n2 = v.size();
  for (std::size_t i = 0; i < u.size(); ++i) {
    for (std::size_t j = 0; j < n2; ++j) out.values_[i * n2 + j] = u[i] * v[j];
  }
  return out;
}

const Axis& GridFunction::axis(int index) const {
  if (index == 0) return axis1_;
  if (index == 1 && axis2_) return *axis2_;
  throw ShapeError("axis index " + std::to_string(index) + " out of range for a " + std::to_string(dims()) +
                   "-axis function");
}

double GridFunction::cell_volume() const {
  double v = axis1_.cell_width();
  if (axis2_) v *= axis2_->cell_width();
  return v;
}

bool GridFunction::same_shape(const GridFunction& other) const {
  return axis1_ == other.axis1_ && axis2_ == other.axis2_;
}

void GridFunction::require_same_shape(const GridFunction& other, const char* what) const {
  if (!same_shape(other)) throw ShapeError(std::string(what) + ": axis mismatch");
}

GridFunction GridFunction::slice(int along_axis, std::size_t fixed_index) const {
  if (dims() != 2) throw ShapeError("slice needs a two-axis function");
  GridFunction line(axis(along_axis));
  const std::size_t n = line.size();
  for (std::size_t t = 0; t < n; ++t) line[t] = along_axis == 0 ? at(t, fixed_index) : at(fixed_index, t);
  return line;
}

void GridFunction::set_slice(int along_axis, std::size_t fixed_index, const GridFunction& line) {
  if (dims() != 2 || line.dims() != 1 || line.axis() != axis(along_axis)) {
    throw ShapeError("set_slice: shape mismatch");
  }
  for (std::size_t t = 0; t < line.size(); ++t) {
    if (along_axis == 0) {
      at(t, fixed_index) = line[t];
    } else {
      at(fixed_index, t) = line[t];
    }
  }
}

double GridFunction::mean() const {
  double s = 0.0;
  for (double v : values_) s += v;
  return s / static_cast<double>(values_.size());
}

double GridFunction::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

double GridFunction::integral() const { return mean(); }

GridFunction GridFunction::abs() const {
  return map([](double v) { return std::abs(v); });
}

GridFunction GridFunction::map(const std::function<double(double)>& fn) const {
  GridFunction out = *this;
  for (double& v : out.values_) v = fn(v);
  return out;
}

GridFunction& GridFunction::operator+=(const GridFunction& other) {
  require_same_shape(other, "addition");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

GridFunction& GridFunction::operator-=(const GridFunction& other) {
  require_same_shape(other, "subtraction");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
  return *this;
}

GridFunction& GridFunction::operator*=(double s) {
  for (double& v : values_) v *= s;
  return *this;
}

GridFunction& GridFunction::operator*=(const GridFunction& other) {
  require_same_shape(other, "pointwise product");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] *= other.values_[i];
  return *this;
}

double inner_product(const GridFunction& f, const GridFunction& g) {
  if (!f.same_shape(g)) throw ShapeError("inner_product: axis mismatch");
  double s = 0.0;
  const auto fv = f.values();
  const auto gv = g.values();
  for (std::size_t i = 0; i < fv.size(); ++i) s += fv[i] * gv[i];
  return s * f.cell_volume();
}

double l2_norm(const GridFunction& f) { return std::sqrt(inner_product(f, f)); }

void require_lambda(double lambda) {
  if (!(lambda > 0.0 && lambda < 1.0)) {
    throw ParameterError("lambda must lie in (0, 1), got " + std::to_string(lambda));
  }
}

double torus_kernel_mass(double lambda) {
  require_lambda(lambda);
  return 2.0 * first_antiderivative(0.5, lambda);
}

double interval_pair_integral(double x0, double x1, double y0, double y1, double lambda) {
  require_lambda(lambda);
  const auto F = [lambda](double t) { return second_antiderivative(t, lambda); };
  return F(x1 - y0) + F(x0 - y1) - F(x1 - y1) - F(x0 - y0);
}

double torus_interval_pair_integral(double x0, double x1, double y0, double y1, double lambda) {
  require_lambda(lambda);
  const auto P = [lambda](double u) { return periodic_second_antiderivative(u, lambda); };
  return P(x1 - y0) + P(x0 - y1) - P(x1 - y1) - P(x0 - y0);
}

double kernel_cell_integral(const Axis& axis, std::size_t cell_a, std::size_t cell_b, double lambda) {
  require_lambda(lambda);
  const std::size_t n = axis.cells();
  if (cell_a >= n || cell_b >= n) throw ShapeError("kernel_cell_integral: cell index outside the axis");
  const std::size_t d = (cell_a + n - cell_b) % n;
  const std::size_t m = std::min(d, n - d);
  const double h = axis.cell_width();
  const auto F = [lambda](double t) { return second_antiderivative(t, lambda); };
  if (2 * m == n) {
    if (n < 8) {
      return 2.0 * (h * first_antiderivative(0.5, lambda) - F(0.5) + F(0.5 - h));
    }
    return antipodal_cell_series(h, lambda);
  }
  const double delta = static_cast<double>(m) * h;
  if (m < 4) return F(delta + h) + F(delta - h) - 2.0 * F(delta);
  return separated_cell_series(delta, h, lambda);
}

std::vector<double> kernel_row(const Axis& axis, double lambda) {
  const std::size_t n = axis.cells();
  std::vector<double> row(n);
  for (std::size_t d = 0; d <= n / 2; ++d) {
    row[d] = kernel_cell_integral(axis, d, 0, lambda);
    if (d != 0) row[n - d] = row[d];
  }
  return row;
}

}  // namespace dyadica
