#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "dyadica/errors.hpp"
#include "dyadica/grid.hpp"

namespace dyadica::detail {

inline void require_axis_index(const GridFunction& f, int axis_index) {
  if (axis_index < 0 || axis_index >= f.dims()) {
    throw ShapeError("axis index " + std::to_string(axis_index) + " invalid for a " + std::to_string(f.dims()) +
                     "-axis function");
  }
}

// Number of lines along `axis_index` and the stride between consecutive
// entries of one line.
struct LineLayout {
  std::size_t length;
  std::size_t count;
  std::size_t stride;
  std::size_t base(std::size_t line) const { return stride == 1 ? line * length : line; }
};

inline LineLayout line_layout(const GridFunction& f, int axis_index) {
  require_axis_index(f, axis_index);
  if (f.dims() == 1) return {f.size(), 1, 1};
  if (axis_index == 0) return {f.extent(0), f.extent(1), f.extent(1)};
  return {f.extent(1), f.extent(0), 1};
}

// out = f with every line along `axis_index` replaced by fn(line, result).
// fn receives an input line and a zeroed output line of the same length.
template <class Fn>
GridFunction map_lines(const GridFunction& f, int axis_index, Fn&& fn) {
  const LineLayout lay = line_layout(f, axis_index);
  GridFunction out = f;
  std::vector<double> in(lay.length);
  std::vector<double> res(lay.length);
  const auto src = f.values();
  auto dst = out.values();
  for (std::size_t l = 0; l < lay.count; ++l) {
    const std::size_t b = lay.base(l);
    for (std::size_t t = 0; t < lay.length; ++t) in[t] = src[b + t * lay.stride];
    std::fill(res.begin(), res.end(), 0.0);
    fn(in, res);
    for (std::size_t t = 0; t < lay.length; ++t) dst[b + t * lay.stride] = res[t];
  }
  return out;
}

}  // namespace dyadica::detail
