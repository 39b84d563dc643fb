#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "mlab/diff.hpp"
#include "mlab/field_io.hpp"
#include "mlab/path.hpp"

using namespace mlab;

namespace {

std::string tmp_path(const std::string& name) {
  std::filesystem::create_directories(MLAB_TEST_TMP);
  return std::string(MLAB_TEST_TMP) + "/" + name;
}

double max_error_interior(const RealField& a, const std::function<double(const Point&)>& exact) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a.grid().interior(i)) m = std::max(m, std::abs(a[i] - exact(a.grid().point(i))));
  }
  return m;
}

}  // namespace

TEST_CASE("grid construction validates axes and orders time first") {
  CHECK_THROWS_AS(Grid({space_axis(0, 1, 2)}), GridError);
  CHECK_THROWS_AS(Grid({space_axis(0, 0, 5)}), GridError);
  CHECK_THROWS_AS(Grid({space_axis(0, 1, 5), time_axis(0, 1, 5)}), GridError);
  const Grid g({time_axis(0, 1, 5), space_axis(-1, 1, 9)});
  CHECK(g.has_time());
  CHECK(g.size() == 45);
  CHECK(g.axis(1).spacing() == doctest::Approx(0.25));
  const Index idx{3, 7, 0, 0};
  CHECK(g.unravel(g.linear(idx)) == idx);
  CHECK(g.point(g.linear(idx))[1] == doctest::Approx(0.75));
}

TEST_CASE("refine keeps extents and multiplies cell counts") {
  const Grid g({time_axis(0, 2, 5), space_axis(-1, 1, 9)});
  const Grid r = refine(g, 3);
  CHECK(r.axis(0).count == 13);
  CHECK(r.axis(1).count == 25);
  CHECK(r.axis(1).extent == g.axis(1).extent);
  CHECK_THROWS_AS(refine(g, 1), GridError);
}

TEST_CASE("diff is exact on quadratics including boundary nodes") {
  const Grid g({space_axis(-1.3, 2.1, 11)});
  const RealField f = RealField::sample(g, [](const Point& p) { return 2.0 * p[0] * p[0] - 3.0 * p[0] + 0.5; });
  const RealField d1 = diff(f, 0, 1);
  const RealField d2 = diff(f, 0, 2);
  for (std::size_t i = 0; i < g.size(); ++i) {
    CHECK(d1[i] == doctest::Approx(4.0 * g.point(i)[0] - 3.0).epsilon(1e-12));
    CHECK(d2[i] == doctest::Approx(4.0).epsilon(1e-11));
  }
}

TEST_CASE("diff converges at second order on a smooth function, boundaries included") {
  double prev1 = 0, prev2 = 0;
  for (std::size_t n : {33, 65, 129}) {
    const Grid g({space_axis(0.0, 2.0, n)});
    const RealField f = RealField::sample(g, [](const Point& p) { return std::sin(2.0 * p[0]); });
    double e1 = 0, e2 = 0;
    const RealField d1 = diff(f, 0, 1), d2 = diff(f, 0, 2);
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double x = g.point(i)[0];
      e1 = std::max(e1, std::abs(d1[i] - 2.0 * std::cos(2.0 * x)));
      e2 = std::max(e2, std::abs(d2[i] + 4.0 * std::sin(2.0 * x)));
    }
    if (prev1 > 0) {
      CHECK(std::log2(prev1 / e1) > 1.8);
      CHECK(std::log2(prev2 / e2) > 1.8);
    }
    prev1 = e1;
    prev2 = e2;
  }
}

TEST_CASE("diff needs enough nodes for the stencil") {
  const Grid g({space_axis(0, 1, 3)});
  const RealField f = RealField::constant(g, 1.0);
  CHECK_NOTHROW(diff(f, 0, 1));
  CHECK_THROWS_AS(diff(f, 0, 2), GridError);
}

TEST_CASE("diff acts along the requested axis of a space-time field") {
  const Grid g({time_axis(0, 1, 9), space_axis(0, 1, 17)});
  const RealField f = RealField::sample(g, [](const Point& p) { return std::exp(p[0]) * std::cos(p[1]); });
  const RealField ft = diff(f, 0), fq = diff(f, 1);
  // Central differences err by at most h^2/6 max|f'''| at interior nodes.
  const double ht = g.axis(0).spacing(), hq = g.axis(1).spacing();
  CHECK(max_error_interior(ft, [](const Point& p) { return std::exp(p[0]) * std::cos(p[1]); }) <
        ht * ht / 6.0 * std::exp(1.0));
  CHECK(max_error_interior(fq, [](const Point& p) { return -std::exp(p[0]) * std::sin(p[1]); }) <
        hq * hq / 6.0 * std::exp(1.0));
}

TEST_CASE("multilinear interpolation reproduces bilinear functions and rejects outside points") {
  const Grid g({space_axis(0, 1, 5), space_axis(-1, 1, 7)});
  auto fn = [](const Point& p) { return 1.0 + 2.0 * p[0] - p[1] + 3.0 * p[0] * p[1]; };
  const RealField f = RealField::sample(g, fn);
  for (const Point& p : {Point{0.13, 0.77}, Point{1.0, -1.0}, Point{0.5, 0.0}}) {
    CHECK(interpolate(f, p) == doctest::Approx(fn(p)).epsilon(1e-13));
  }
  CHECK_THROWS_AS(interpolate(f, Point{1.2, 0.0}), GridError);
}

TEST_CASE("line integral of (-y/2, x/2) around a square gives its area") {
  const Grid g({space_axis(-2, 2, 9), space_axis(-2, 2, 9)});
  const RealField ax = RealField::sample(g, [](const Point& p) { return -0.5 * p[1]; });
  const RealField ay = RealField::sample(g, [](const Point& p) { return 0.5 * p[0]; });
  const double side = 1.7;
  const PathSpec loop = rectangle_loop(Point{-0.6, -0.9}, 0, side, 1, side);
  CHECK(loop.is_closed());
  CHECK(line_integral(loop, {ax, ay}, 64) == doctest::Approx(side * side).epsilon(1e-6));
}

TEST_CASE("line integral of a gradient is independent of the path") {
  const Grid g({space_axis(-1, 1, 41), space_axis(-1, 1, 41)});
  auto grad = [](const Point& p) { return Point{std::cos(p[0]) * p[1], std::sin(p[0]) + 2 * p[1]}; };
  const VectorFn fn = grad;
  const PathSpec direct{{Point{-0.5, -0.5}, Point{0.7, 0.4}}};
  const PathSpec detour{{Point{-0.5, -0.5}, Point{-0.5, 0.8}, Point{0.9, 0.8}, Point{0.7, 0.4}}};
  const double exact = (std::sin(0.7) * 0.4 + 0.16) - (std::sin(-0.5) * -0.5 + 0.25);
  CHECK(line_integral(direct, 2, fn, 2000) == doctest::Approx(exact).epsilon(1e-7));
  CHECK(line_integral(detour, 2, fn, 2000) == doctest::Approx(exact).epsilon(1e-7));
}

TEST_CASE("sampled line integral rejects paths leaving the grid") {
  const Grid g({space_axis(0, 1, 5), space_axis(0, 1, 5)});
  const RealField z = RealField::constant(g, 0.0);
  const PathSpec out{{Point{0.5, 0.5}, Point{1.5, 0.5}}};
  CHECK_THROWS_AS(line_integral(out, {z, z}, 8), GridError);
}

TEST_CASE("CSV and binary round trips are bit exact") {
  const Grid g({time_axis(0, 1, 3), space_axis(-1, 1, 5)});
  const RealField r = RealField::sample(g, [](const Point& p) { return std::exp(p[0]) / 3.0 + p[1]; });
  const ComplexField z = ComplexField::sample(g, [](const Point& p) { return std::polar(1.0 + p[1] * p[1], p[0] / 7.0); });
  save_csv(r, tmp_path("r.csv"));
  save_csv(z, tmp_path("z.csv"));
  save_binary(r, tmp_path("r"));
  save_binary(z, tmp_path("z"));
  const RealField r1 = load_csv<double>(tmp_path("r.csv"));
  const ComplexField z1 = load_csv<cplx>(tmp_path("z.csv"));
  const RealField r2 = load_binary<double>(tmp_path("r"));
  const ComplexField z2 = load_binary<cplx>(tmp_path("z"));
  CHECK(r1.grid() == g);
  CHECK((r1.values() == r.values()).all());
  CHECK((z1.values() == z.values()).all());
  CHECK((r2.values() == r.values()).all());
  CHECK((z2.values() == z.values()).all());
  CHECK_THROWS_AS(load_csv<cplx>(tmp_path("r.csv")), GridError);
}

TEST_CASE("fields reject non-finite samples and mismatched grids") {
  const Grid g({space_axis(0, 1, 4)});
  const Grid h({space_axis(0, 2, 4)});
  CHECK_THROWS_AS(RealField::constant(g, std::nan("")), GridError);
  CHECK_THROWS_AS(RealField::constant(g, 1.0) + RealField::constant(h, 1.0), GridError);
}
