#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "mlab/errors.hpp"

namespace mlab {

inline constexpr std::size_t max_rank = 4;

/// Coordinates of a node or an arbitrary location; only the first rank() entries are used.
using Point = std::array<double, max_rank>;
using Index = std::array<std::size_t, max_rank>;

enum class AxisKind { time, space };

/// One uniformly sampled axis. Nodes sit at origin + i * spacing, i in [0, count).
struct Axis {
  AxisKind kind = AxisKind::space;
  double origin = 0.0;
  double extent = 1.0;
  std::size_t count = 3;

  double spacing() const { return extent / static_cast<double>(count - 1); }
  double coord(std::size_t i) const { return origin + spacing() * static_cast<double>(i); }
  double end() const { return origin + extent; }

  bool operator==(const Axis&) const = default;
};

Axis time_axis(double t0, double t1, std::size_t count);
Axis space_axis(double a, double b, std::size_t count);

/// Tensor-product grid with up to four axes. A time axis, when present, is axis 0;
/// the remaining axes are spatial. The last axis varies fastest in memory.
class Grid {
 public:
  explicit Grid(std::vector<Axis> axes);

  std::size_t rank() const { return axes_.size(); }
  const Axis& axis(std::size_t k) const { return axes_.at(k); }
  const std::vector<Axis>& axes() const { return axes_; }
  std::size_t size() const { return size_; }
  std::size_t stride(std::size_t k) const { return strides_[k]; }

  bool has_time() const { return axes_.front().kind == AxisKind::time; }
  std::size_t space_begin() const { return has_time() ? 1 : 0; }
  std::size_t space_rank() const { return rank() - space_begin(); }

  std::size_t linear(const Index& idx) const;
  Index unravel(std::size_t linear) const;
  Point point(std::size_t linear) const;
  std::size_t index_along(std::size_t linear, std::size_t k) const {
    return (linear / strides_[k]) % axes_[k].count;
  }

  /// True unless the node lies on the outermost layer of some axis.
  bool interior(std::size_t linear) const;

  /// True when p lies inside the closed bounding box (relative slack 1e-12).
  bool contains(const Point& p) const;

  /// Product of spacings over all axes (or only the spatial ones).
  double cell_volume(bool space_only = false) const;

  bool operator==(const Grid& other) const { return axes_ == other.axes_; }

 private:
  std::vector<Axis> axes_;
  std::array<std::size_t, max_rank> strides_{};
  std::size_t size_ = 0;
};

/// Subdivides every cell: counts become (count - 1) * factor + 1, extents unchanged.
Grid refine(const Grid& grid, std::size_t factor);

/// Drops the time axis of a space-time grid.
Grid spatial_part(const Grid& grid);

/// Prepends a time axis to a purely spatial grid.
Grid with_time(const Axis& time, const Grid& space);

void require_same_grid(const Grid& a, const Grid& b, const char* where);

}  // namespace mlab
