#include "mlab/grid.hpp"

#include <cmath>
#include <string>

namespace mlab {

Axis time_axis(double t0, double t1, std::size_t count) {
  return Axis{AxisKind::time, t0, t1 - t0, count};
}

Axis space_axis(double a, double b, std::size_t count) {
  return Axis{AxisKind::space, a, b - a, count};
}

Grid::Grid(std::vector<Axis> axes) : axes_(std::move(axes)) {
  if (axes_.empty() || axes_.size() > max_rank) {
    throw GridError("grid rank must be between 1 and 4");
  }
  for (std::size_t k = 0; k < axes_.size(); ++k) {
    const Axis& a = axes_[k];
    if (a.count < 3) {
      throw GridError("axis " + std::to_string(k) + " has fewer than 3 nodes");
    }
    if (!(a.extent > 0.0) || !std::isfinite(a.extent) || !std::isfinite(a.origin)) {
      throw GridError("axis " + std::to_string(k) + " needs a positive finite extent");
    }
    if (a.kind == AxisKind::time && k != 0) {
      throw GridError("the time axis must come first");
    }
  }
  std::size_t s = 1;
  for (std::size_t k = axes_.size(); k-- > 0;) {
    strides_[k] = s;
    s *= axes_[k].count;
  }
  size_ = s;
}

std::size_t Grid::linear(const Index& idx) const {
  std::size_t l = 0;
  for (std::size_t k = 0; k < rank(); ++k) l += idx[k] * strides_[k];
  return l;
}

Index Grid::unravel(std::size_t l) const {
  Index idx{};
  for (std::size_t k = 0; k < rank(); ++k) idx[k] = index_along(l, k);
  return idx;
}

Point Grid::point(std::size_t l) const {
  Point p{};
  for (std::size_t k = 0; k < rank(); ++k) p[k] = axes_[k].coord(index_along(l, k));
  return p;
}

bool Grid::interior(std::size_t l) const {
  for (std::size_t k = 0; k < rank(); ++k) {
    const std::size_t i = index_along(l, k);
    if (i == 0 || i + 1 == axes_[k].count) return false;
  }
  return true;
}

bool Grid::contains(const Point& p) const {
  for (std::size_t k = 0; k < rank(); ++k) {
    const double slack = 1e-12 * axes_[k].extent;
    if (!(p[k] >= axes_[k].origin - slack && p[k] <= axes_[k].end() + slack)) return false;
  }
  return true;
}

double Grid::cell_volume(bool space_only) const {
  double v = 1.0;
  for (std::size_t k = space_only ? space_begin() : 0; k < rank(); ++k) v *= axes_[k].spacing();
  return v;
}

Grid refine(const Grid& grid, std::size_t factor) {
  if (factor < 2) throw GridError("refinement factor must be at least 2");
  std::vector<Axis> axes = grid.axes();
  for (Axis& a : axes) a.count = (a.count - 1) * factor + 1;
  return Grid(std::move(axes));
}

Grid spatial_part(const Grid& grid) {
  if (!grid.has_time()) return grid;
  if (grid.rank() < 2) throw GridError("grid has no spatial axis");
  return Grid(std::vector<Axis>(grid.axes().begin() + 1, grid.axes().end()));
}

Grid with_time(const Axis& time, const Grid& space) {
  if (space.has_time()) throw GridError("grid already has a time axis");
  std::vector<Axis> axes{time};
  axes.front().kind = AxisKind::time;
  axes.insert(axes.end(), space.axes().begin(), space.axes().end());
  return Grid(std::move(axes));
}

void require_same_grid(const Grid& a, const Grid& b, const char* where) {
  if (!(a == b)) throw GridError(std::string(where) + ": fields live on different grids");
}

}  // namespace mlab
