#include "mlab/sampling.hpp"

#include <cmath>
#include <numbers>

namespace mlab {

SmoothFunction constant_function(double c) {
  return {[c](const Point&) { return c; }, "constant"};
}

namespace {

bool uses_axis(unsigned mask, std::size_t k) { return mask == 0 || ((mask >> k) & 1U); }

}  // namespace

SmoothFunction draw_function(const GeneratorSpec& spec, const Grid& base, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  const std::size_t rank = base.rank();
  Point center{}, half{};
  for (std::size_t k = 0; k < rank; ++k) {
    half[k] = 0.5 * base.axis(k).extent;
    center[k] = base.axis(k).origin + half[k];
  }
  const double amp = spec.amplitude;
  const double offset = spec.offset;
  switch (spec.kind) {
    case GeneratorKind::polynomial: {
      // offset + amp * sum_k (c1 y + c2 y^2 + c3 y^3) on scaled coordinates y in [-1, 1];
      // positive variants use exp of that polynomial.
      std::array<std::array<double, 3>, max_rank> c{};
      for (std::size_t k = 0; k < rank; ++k) {
        for (double& x : c[k]) x = uses_axis(spec.axes, k) ? unit(rng) / 3.0 : 0.0;
      }
      auto poly = [=](const Point& p) {
        double acc = 0.0;
        for (std::size_t k = 0; k < rank; ++k) {
          const double y = (p[k] - center[k]) / half[k];
          acc += y * (c[k][0] + y * (c[k][1] + y * c[k][2]));
        }
        return acc;
      };
      if (spec.positive) {
        return {[=](const Point& p) { return offset * std::exp(amp * poly(p)); }, "polynomial"};
      }
      return {[=](const Point& p) { return offset + amp * poly(p); }, "polynomial"};
    }
    case GeneratorKind::gaussian: {
      Point mu{}, width{};
      for (std::size_t k = 0; k < rank; ++k) {
        mu[k] = center[k] + 0.3 * half[k] * unit(rng);
        width[k] = half[k] * (0.6 + 0.2 * unit(rng));
      }
      auto bump = [=](const Point& p) {
        double r2 = 0.0;
        for (std::size_t k = 0; k < rank; ++k) {
          if (!uses_axis(spec.axes, k)) continue;
          const double y = (p[k] - mu[k]) / width[k];
          r2 += y * y;
        }
        return std::exp(-0.5 * r2);
      };
      if (spec.positive) {
        return {[=](const Point& p) { return offset * (0.25 + amp * bump(p)); }, "gaussian"};
      }
      return {[=](const Point& p) { return offset + amp * bump(p); }, "gaussian"};
    }
    case GeneratorKind::random_smooth: {
      struct Mode {
        Point k;
        double phase;
        double weight;
      };
      std::vector<Mode> modes(spec.modes);
      for (Mode& m : modes) {
        for (std::size_t k = 0; k < rank; ++k) {
          const double nyquist = std::numbers::pi / base.axis(k).spacing();
          const double kmax = std::min(nyquist / 8.0, 3.0 * std::numbers::pi / base.axis(k).extent);
          m.k[k] = uses_axis(spec.axes, k) ? kmax * unit(rng) : 0.0;
        }
        m.phase = std::numbers::pi * unit(rng);
        m.weight = unit(rng) / static_cast<double>(spec.modes);
      }
      auto noise = [=](const Point& p) {
        double acc = 0.0;
        for (const Mode& m : modes) {
          double arg = m.phase;
          for (std::size_t k = 0; k < rank; ++k) arg += m.k[k] * (p[k] - center[k]);
          acc += m.weight * std::cos(arg);
        }
        return acc;
      };
      if (spec.positive) {
        return {[=](const Point& p) { return offset * std::exp(amp * noise(p)); }, "random_smooth"};
      }
      return {[=](const Point& p) { return offset + amp * noise(p); }, "random_smooth"};
    }
  }
  throw DomainError("draw_function: unknown generator kind");
}

GeneratorKind parse_generator_kind(const std::string& name) {
  if (name == "polynomial") return GeneratorKind::polynomial;
  if (name == "gaussian") return GeneratorKind::gaussian;
  if (name == "random_smooth") return GeneratorKind::random_smooth;
  throw DomainError("unknown generator '" + name + "'");
}

std::string generator_name(GeneratorKind kind) {
  switch (kind) {
    case GeneratorKind::polynomial: return "polynomial";
    case GeneratorKind::gaussian: return "gaussian";
    case GeneratorKind::random_smooth: return "random_smooth";
  }
  return "unknown";
}

std::vector<std::pair<SmoothFunction, SmoothFunction>> SamplePlan::draw() const {
  std::mt19937_64 rng(seed);
  std::vector<std::pair<SmoothFunction, SmoothFunction>> out;
  for (const auto& [rs, ss] : pairs) {
    GeneratorSpec r = rs;
    r.positive = true;
    SmoothFunction rho = draw_function(r, grid, rng);
    SmoothFunction s = draw_function(ss, grid, rng);
    out.emplace_back(std::move(rho), std::move(s));
  }
  return out;
}

SamplePlan default_plan(const Grid& grid, std::size_t n, std::uint64_t seed) {
  SamplePlan plan{grid, {}, seed, 3};
  const GeneratorKind kinds[] = {GeneratorKind::polynomial, GeneratorKind::gaussian,
                                 GeneratorKind::random_smooth};
  for (std::size_t i = 0; i < n; ++i) {
    GeneratorSpec rho{kinds[i % 3], 0.5, 1.0, true, 0, 4};
    GeneratorSpec s{kinds[(i + 1) % 3], 1.0, 0.0, false, 0, 4};
    plan.pairs.emplace_back(rho, s);
  }
  return plan;
}

}  // namespace mlab
