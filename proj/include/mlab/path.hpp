#pragma once

#include <functional>
#include <vector>

#include "mlab/field.hpp"

namespace mlab {

/// Polyline through real-valued grid coordinates (waypoints may fall between nodes).
/// A closed loop repeats its first waypoint at the end.
struct PathSpec {
  std::vector<Point> waypoints;

  bool is_closed() const;
  std::size_t segments() const { return waypoints.empty() ? 0 : waypoints.size() - 1; }
};

/// Closes a polyline by appending its first point.
PathSpec closed_loop(std::vector<Point> corners);

/// Closed axis-aligned rectangle in the (axis_u, axis_v) plane, traversed counterclockwise
/// in those coordinates starting at the given corner.
PathSpec rectangle_loop(Point corner, std::size_t axis_u, double du, std::size_t axis_v, double dv);

/// Closed regular polygon approximating a circle in the (axis_u, axis_v) plane.
PathSpec polygon_loop(Point center, std::size_t axis_u, std::size_t axis_v, double radius,
                      std::size_t sides, double phase = 0.0);

/// Vector integrand evaluated at a point: one component per coordinate.
using VectorFn = std::function<Point(const Point&)>;

/// Composite trapezoid rule of integrand . dx along every segment, each split into
/// `subdivisions` equal pieces.
double line_integral(const PathSpec& path, std::size_t rank, const VectorFn& integrand,
                     std::size_t subdivisions);

/// Same rule with sampled components, one field per grid axis, multilinearly interpolated.
/// Throws GridError when a waypoint leaves the grid hull.
double line_integral(const PathSpec& path, const std::vector<RealField>& components,
                     std::size_t subdivisions);

}  // namespace mlab
