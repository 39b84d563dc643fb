#include "mlab/path.hpp"

#include <cmath>
#include <numbers>

#include "mlab/diff.hpp"

namespace mlab {

bool PathSpec::is_closed() const {
  return waypoints.size() > 2 && waypoints.front() == waypoints.back();
}

PathSpec closed_loop(std::vector<Point> corners) {
  if (corners.size() < 3) throw GridError("a loop needs at least three corners");
  corners.push_back(corners.front());
  return PathSpec{std::move(corners)};
}

PathSpec rectangle_loop(Point corner, std::size_t axis_u, double du, std::size_t axis_v, double dv) {
  Point p1 = corner, p2 = corner, p3 = corner;
  p1[axis_u] += du;
  p2[axis_u] += du;
  p2[axis_v] += dv;
  p3[axis_v] += dv;
  return closed_loop({corner, p1, p2, p3});
}

PathSpec polygon_loop(Point center, std::size_t axis_u, std::size_t axis_v, double radius,
                      std::size_t sides, double phase) {
  std::vector<Point> pts;
  for (std::size_t k = 0; k < sides; ++k) {
    const double th = phase + 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(sides);
    Point p = center;
    p[axis_u] += radius * std::cos(th);
    p[axis_v] += radius * std::sin(th);
    pts.push_back(p);
  }
  return closed_loop(std::move(pts));
}

double line_integral(const PathSpec& path, std::size_t rank, const VectorFn& integrand,
                     std::size_t subdivisions) {
  if (subdivisions == 0) throw GridError("line_integral: subdivisions must be positive");
  double total = 0.0;
  for (std::size_t s = 0; s < path.segments(); ++s) {
    const Point& a = path.waypoints[s];
    const Point& b = path.waypoints[s + 1];
    Point delta{};
    for (std::size_t k = 0; k < rank; ++k) delta[k] = b[k] - a[k];
    auto tangential = [&](double u) {
      Point x{};
      for (std::size_t k = 0; k < rank; ++k) x[k] = a[k] + u * delta[k];
      const Point f = integrand(x);
      double dot = 0.0;
      for (std::size_t k = 0; k < rank; ++k) dot += f[k] * delta[k];
      return dot;
    };
    const double du = 1.0 / static_cast<double>(subdivisions);
    double seg = 0.5 * (tangential(0.0) + tangential(1.0));
    for (std::size_t i = 1; i < subdivisions; ++i) seg += tangential(du * static_cast<double>(i));
    total += seg * du;
  }
  return total;
}

double line_integral(const PathSpec& path, const std::vector<RealField>& components,
                     std::size_t subdivisions) {
  if (components.empty()) throw GridError("line_integral: no integrand components");
  const Grid& g = components.front().grid();
  if (components.size() != g.rank()) {
    throw GridError("line_integral: need one integrand component per grid axis");
  }
  for (const RealField& c : components) require_same_grid(g, c.grid(), "line_integral");
  for (const Point& w : path.waypoints) {
    if (!g.contains(w)) throw GridError("line_integral: path exits the grid");
  }
  VectorFn fn = [&](const Point& x) {
    Point out{};
    for (std::size_t k = 0; k < g.rank(); ++k) out[k] = interpolate(components[k], x);
    return out;
  };
  return line_integral(path, g.rank(), fn, subdivisions);
}

}  // namespace mlab
