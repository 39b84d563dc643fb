#pragma once

#include <algorithm>

#include "mlab/field.hpp"

namespace mlab {

/// Finite-difference derivative along one axis: second-order central stencils in the
/// interior and second-order one-sided stencils on the two boundary layers.
/// order 1 needs at least 3 nodes on the axis, order 2 at least 4. Stencils are written in
/// difference form so that constant fields differentiate to exactly zero.
template <typename S>
Field<S> diff(const Field<S>& f, std::size_t axis, int order = 1) {
  const Grid& g = f.grid();
  if (axis >= g.rank()) throw GridError("diff: axis out of range");
  if (order != 1 && order != 2) throw GridError("diff: order must be 1 or 2");
  const std::size_t n = g.axis(axis).count;
  if (n < static_cast<std::size_t>(order) + 2) {
    throw GridError("diff: axis too short for requested order");
  }
  const double h = g.axis(axis).spacing();
  const std::size_t s = g.stride(axis);
  const auto& v = f.values();
  typename Field<S>::Values out(v.size());
  auto at = [&](std::size_t i) { return v[static_cast<Eigen::Index>(i)]; };
  for (std::size_t i = 0; i < g.size(); ++i) {
    const std::size_t j = g.index_along(i, axis);
    S d;
    if (order == 1) {
      if (j == 0) {
        d = (3.0 * (at(i + s) - at(i)) + (at(i + s) - at(i + 2 * s))) / (2.0 * h);
      } else if (j + 1 == n) {
        d = (3.0 * (at(i) - at(i - s)) + (at(i - 2 * s) - at(i - s))) / (2.0 * h);
      } else {
        d = (at(i + s) - at(i - s)) / (2.0 * h);
      }
    } else {
      if (j == 0) {
        d = (2.0 * (at(i) - at(i + s)) - 3.0 * (at(i + s) - at(i + 2 * s)) + (at(i + 2 * s) - at(i + 3 * s))) / (h * h);
      } else if (j + 1 == n) {
        d = (2.0 * (at(i) - at(i - s)) - 3.0 * (at(i - s) - at(i - 2 * s)) + (at(i - 2 * s) - at(i - 3 * s))) / (h * h);
      } else {
        d = ((at(i + s) - at(i)) - (at(i) - at(i - s))) / (h * h);
      }
    }
    out[static_cast<Eigen::Index>(i)] = d;
  }
  return Field<S>(g, std::move(out));
}

/// Sum of second derivatives over the spatial axes.
template <typename S>
Field<S> laplacian(const Field<S>& f) {
  const Grid& g = f.grid();
  Field<S> acc = diff(f, g.space_begin(), 2);
  for (std::size_t k = g.space_begin() + 1; k < g.rank(); ++k) acc = acc + diff(f, k, 2);
  return acc;
}

/// Multilinear interpolation; throws GridError when p is outside the grid hull.
template <typename S>
S interpolate(const Field<S>& f, const Point& p) {
  const Grid& g = f.grid();
  if (!g.contains(p)) throw GridError("interpolation point outside the grid hull");
  std::array<std::size_t, max_rank> lo{};
  std::array<double, max_rank> w{};
  for (std::size_t k = 0; k < g.rank(); ++k) {
    const Axis& a = g.axis(k);
    double x = (p[k] - a.origin) / a.spacing();
    x = std::clamp(x, 0.0, static_cast<double>(a.count - 1));
    std::size_t i = static_cast<std::size_t>(x);
    if (i + 1 >= a.count) i = a.count - 2;
    lo[k] = i;
    w[k] = x - static_cast<double>(i);
  }
  S acc{};
  const std::size_t corners = std::size_t{1} << g.rank();
  for (std::size_t c = 0; c < corners; ++c) {
    double weight = 1.0;
    std::size_t l = 0;
    for (std::size_t k = 0; k < g.rank(); ++k) {
      const bool up = (c >> k) & 1U;
      weight *= up ? w[k] : 1.0 - w[k];
      l += (lo[k] + (up ? 1 : 0)) * g.stride(k);
    }
    if (weight != 0.0) acc += weight * f[l];
  }
  return acc;
}

}  // namespace mlab
