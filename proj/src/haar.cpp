#include "dyadica/haar.hpp"

#include <bit>
#include <cmath>
#include <string>

#include "dyadica/errors.hpp"
#include "line_ops.hpp"

namespace dyadica {

namespace {

void require_axis_match(const GridFunction& f, int axis_index, const Axis& axis, const char* what) {
  detail::require_axis_index(f, axis_index);
  if (f.axis(axis_index) != axis) throw ShapeError(std::string(what) + ": function axis does not match the cube");
}

// Cell values reordered into the shifted frame of the system.
std::vector<double> to_shifted(std::span<const double> line, const DyadicSystem& s) {
  std::vector<double> out(line.size());
  for (std::size_t t = 0; t < line.size(); ++t) out[t] = line[s.unshifted(t)];
  return out;
}

// Block averages of size 2^(L - level) in the shifted frame, broadcast back.
void level_average_line(const std::vector<double>& in, std::vector<double>& out, const DyadicSystem& s, int level) {
  const std::size_t n = in.size();
  const std::size_t block = n >> level;
  for (std::size_t b = 0; b < n; b += block) {
    double sum = 0.0;
    for (std::size_t t = b; t < b + block; ++t) sum += in[s.unshifted(t)];
    const double avg = sum / static_cast<double>(block);
    for (std::size_t t = b; t < b + block; ++t) out[s.unshifted(t)] = avg;
  }
}

}  // namespace

GridFunction haar_function(const DyadicCube& cube) {
  if (cube.level >= cube.axis.level()) throw ResolutionError("Haar function needs a cube above the finest level");
  GridFunction h(cube.axis);
  const double amp = 1.0 / std::sqrt(cube.side());
  const std::size_t half = cube.cell_count() / 2;
  for (std::size_t t = 0; t < cube.cell_count(); ++t) h[cube.cell(t)] = t < half ? amp : -amp;
  return h;
}

DyadicCube slot_cube(const DyadicSystem& system, std::size_t slot) {
  if (slot == 0 || slot >= system.axis().cells()) throw ParameterError("slot does not name a Haar cube");
  const int level = static_cast<int>(std::bit_width(slot)) - 1;
  return system.cube(level, slot - (std::size_t{1} << level));
}

std::vector<double> haar_forward(std::span<const double> line, const DyadicSystem& system) {
  const std::size_t n = system.axis().cells();
  if (line.size() != n) throw ShapeError("haar_forward: line length does not match the system axis");
  std::vector<double> avg = to_shifted(line, system);
  std::vector<double> out(n, 0.0);
  for (int k = system.max_level() - 1; k >= 0; --k) {
    const std::size_t count = std::size_t{1} << k;
    const double half_root = 0.5 * std::sqrt(std::ldexp(1.0, -k));
    for (std::size_t m = 0; m < count; ++m) {
      const double left = avg[2 * m];
      const double right = avg[2 * m + 1];
      out[count + m] = half_root * (left - right);
      avg[m] = 0.5 * (left + right);
    }
  }
  out[0] = avg[0];
  return out;
}

std::vector<double> haar_inverse(std::span<const double> coefficients, const DyadicSystem& system) {
  const std::size_t n = system.axis().cells();
  if (coefficients.size() != n) throw ShapeError("haar_inverse: coefficient count does not match the system axis");
  std::vector<double> avg(n, 0.0);
  std::vector<double> next(n, 0.0);
  avg[0] = coefficients[0];
  for (int k = 0; k < system.max_level(); ++k) {
    const std::size_t count = std::size_t{1} << k;
    const double amp = 1.0 / std::sqrt(std::ldexp(1.0, -k));
    for (std::size_t m = 0; m < count; ++m) {
      const double c = coefficients[count + m] * amp;
      next[2 * m] = avg[m] + c;
      next[2 * m + 1] = avg[m] - c;
    }
    std::swap(avg, next);
  }
  std::vector<double> line(n);
  for (std::size_t t = 0; t < n; ++t) line[system.unshifted(t)] = avg[t];
  return line;
}

HaarCoefficientMap::HaarCoefficientMap(DyadicSystem system, std::vector<double> entries)
    : system1_(system), entries_(std::move(entries)) {
  if (entries_.size() != system1_.axis().cells()) throw ShapeError("coefficient table size mismatch");
}

HaarCoefficientMap::HaarCoefficientMap(DyadicSystem system1, DyadicSystem system2, std::vector<double> entries)
    : system1_(system1), system2_(system2), entries_(std::move(entries)) {
  if (entries_.size() != system1_.axis().cells() * system2_->axis().cells()) {
    throw ShapeError("coefficient table size mismatch");
  }
}

const DyadicSystem& HaarCoefficientMap::system(int axis_index) const {
  if (axis_index == 0) return system1_;
  if (axis_index == 1 && system2_) return *system2_;
  throw ShapeError("coefficient map has no axis " + std::to_string(axis_index));
}

double HaarCoefficientMap::coefficient(const DyadicCube& cube) const {
  if (dims() != 1) throw ShapeError("two-axis map needs a rectangle");
  if (!cube.same_system(system1_.root())) {
    throw SystemMismatchError("cube is not from the expansion system");
  }
  if (cube.level >= system1_.max_level()) return 0.0;
  return at(haar_slot(cube));
}

double HaarCoefficientMap::coefficient(const DyadicCube& i_cube, const DyadicCube& j_cube) const {
  if (dims() != 2) throw ShapeError("one-axis map has no rectangles");
  if (!i_cube.same_system(system1_.root()) || !j_cube.same_system(system2_->root())) {
    throw SystemMismatchError("rectangle is not from the expansion systems");
  }
  if (i_cube.level >= system1_.max_level() || j_cube.level >= system2_->max_level()) return 0.0;
  return at(haar_slot(i_cube), haar_slot(j_cube));
}

double HaarCoefficientMap::energy() const {
  double s = 0.0;
  for (double v : entries_) s += v * v;
  return s;
}

double HaarCoefficientMap::haar_energy() const {
  double s = 0.0;
  if (dims() == 1) {
    for (std::size_t a = 1; a < entries_.size(); ++a) s += entries_[a] * entries_[a];
    return s;
  }
  const std::size_t n1 = system1_.axis().cells();
  const std::size_t n2 = stride();
  for (std::size_t a = 1; a < n1; ++a) {
    for (std::size_t b = 1; b < n2; ++b) s += at(a, b) * at(a, b);
  }
  return s;
}

GridFunction HaarCoefficientMap::reconstruct() const {
  if (dims() == 1) return GridFunction(system1_.axis(), haar_inverse(entries_, system1_));
  GridFunction table(system1_.axis(), system2_->axis(), entries_);
  GridFunction stage = detail::map_lines(table, 1, [&](const std::vector<double>& in, std::vector<double>& out) {
    out = haar_inverse(in, *system2_);
  });
  return detail::map_lines(stage, 0, [&](const std::vector<double>& in, std::vector<double>& out) {
    out = haar_inverse(in, system1_);
  });
}

HaarCoefficientMap haar_expand(const GridFunction& f, const DyadicSystem& system) {
  if (f.dims() != 1 || f.axis() != system.axis()) throw ShapeError("haar_expand: axis/system mismatch");
  return HaarCoefficientMap(system, haar_forward(f.values(), system));
}

HaarCoefficientMap haar_expand(const GridFunction& f, const DyadicSystem& system1, const DyadicSystem& system2) {
  if (f.dims() != 2 || f.axis(0) != system1.axis() || f.axis(1) != system2.axis()) {
    throw ShapeError("haar_expand: axis/system mismatch");
  }
  GridFunction stage = detail::map_lines(f, 0, [&](const std::vector<double>& in, std::vector<double>& out) {
    out = haar_forward(in, system1);
  });
  stage = detail::map_lines(stage, 1, [&](const std::vector<double>& in, std::vector<double>& out) {
    out = haar_forward(in, system2);
  });
  return HaarCoefficientMap(system1, system2, std::vector<double>(stage.values().begin(), stage.values().end()));
}

GridFunction level_average(const GridFunction& f, const DyadicSystem& system, int level, int axis_index) {
  require_axis_match(f, axis_index, system.axis(), "level_average");
  if (level < 0 || level > system.max_level()) throw ResolutionError("level_average: level outside the axis");
  return detail::map_lines(f, axis_index, [&](const std::vector<double>& in, std::vector<double>& out) {
    level_average_line(in, out, system, level);
  });
}

GridFunction level_difference(const GridFunction& f, const DyadicSystem& system, int level, int axis_index) {
  if (level < 0 || level >= system.max_level()) throw ResolutionError("level_difference: level must be below L");
  return level_average(f, system, level + 1, axis_index) - level_average(f, system, level, axis_index);
}

GridFunction martingale_block(const GridFunction& f, const DyadicCube& k_cube, int i, int axis_index) {
  require_axis_match(f, axis_index, k_cube.axis, "martingale_block");
  if (i < 0) throw ParameterError("martingale_block: depth must be non-negative");
  if (k_cube.level + i >= k_cube.axis.level()) {
    throw ResolutionError("martingale_block: level(K) + i must be below L");
  }
  const std::size_t fine = k_cube.cell_count() >> (i + 1);
  const std::size_t coarse = 2 * fine;
  return detail::map_lines(f, axis_index, [&](const std::vector<double>& in, std::vector<double>& out) {
    for (std::size_t b = 0; b < k_cube.cell_count(); b += coarse) {
      double left = 0.0;
      double right = 0.0;
      for (std::size_t t = 0; t < fine; ++t) {
        left += in[k_cube.cell(b + t)];
        right += in[k_cube.cell(b + fine + t)];
      }
      const double whole = (left + right) / static_cast<double>(coarse);
      left /= static_cast<double>(fine);
      right /= static_cast<double>(fine);
      for (std::size_t t = 0; t < fine; ++t) {
        out[k_cube.cell(b + t)] = left - whole;
        out[k_cube.cell(b + fine + t)] = right - whole;
      }
    }
  });
}

GridFunction average_project(const GridFunction& f, const DyadicCube& cube, int axis_index) {
  require_axis_match(f, axis_index, cube.axis, "average_project");
  return detail::map_lines(f, axis_index, [&](const std::vector<double>& in, std::vector<double>& out) {
    double sum = 0.0;
    for (std::size_t t = 0; t < cube.cell_count(); ++t) sum += in[cube.cell(t)];
    const double avg = sum / static_cast<double>(cube.cell_count());
    for (std::size_t t = 0; t < cube.cell_count(); ++t) out[cube.cell(t)] = avg;
  });
}

GridFunction rect_block(const GridFunction& f, const DyadicCube& k_cube, const DyadicCube& v_cube, int i, int j) {
  if (f.dims() != 2) throw ShapeError("rect_block needs a two-axis function");
  return martingale_block(martingale_block(f, k_cube, i, 0), v_cube, j, 1);
}

GridFunction partial_pairing(const GridFunction& f, const DyadicCube& cube, int axis_index) {
  if (f.dims() != 2) throw ShapeError("partial_pairing needs a two-axis function");
  require_axis_match(f, axis_index, cube.axis, "partial_pairing");
  const GridFunction h = haar_function(cube);
  const int other = 1 - axis_index;
  GridFunction out(f.axis(other));
  const double width = cube.axis.cell_width();
  for (std::size_t t = 0; t < cube.cell_count(); ++t) {
    const std::size_t c = cube.cell(t);
    const double w = h[c] * width;
    for (std::size_t x = 0; x < out.size(); ++x) out[x] += w * (axis_index == 0 ? f.at(c, x) : f.at(x, c));
  }
  return out;
}

}  // namespace dyadica
