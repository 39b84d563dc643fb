#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "mlab/field.hpp"

namespace mlab {

/// A smooth closed-form function of the grid coordinates, sampled on any grid so that
/// refinement studies see one underlying function.
struct SmoothFunction {
  std::function<double(const Point&)> fn;
  std::string label;

  double operator()(const Point& p) const { return fn(p); }
  RealField sample(const Grid& g) const { return RealField::sample(g, fn); }
};

SmoothFunction constant_function(double c);

enum class GeneratorKind { polynomial, gaussian, random_smooth };

/// Recipe for one random smooth function. `positive` generators produce strictly positive
/// values (densities). `axes` selects which coordinates the function depends on
/// (bit k set = depends on axis k); 0 means all axes.
struct GeneratorSpec {
  GeneratorKind kind = GeneratorKind::random_smooth;
  double amplitude = 0.5;
  double offset = 1.0;
  bool positive = false;
  unsigned axes = 0;
  std::size_t modes = 4;
};

/// Draws one function from the generator family. The grid supplies the coordinate box and
/// the spacing used for the band limit: random-smooth wavenumbers stay below 1/8 of the
/// Nyquist wavenumber of that grid.
SmoothFunction draw_function(const GeneratorSpec& spec, const Grid& base, std::mt19937_64& rng);

GeneratorKind parse_generator_kind(const std::string& name);
std::string generator_name(GeneratorKind kind);

/// (rho, S) generator pairs over a base grid with a seed. Each pair is drawn in order from
/// one engine seeded with `seed`, so the functions do not depend on evaluation order.
struct SamplePlan {
  Grid grid;
  std::vector<std::pair<GeneratorSpec, GeneratorSpec>> pairs;
  std::uint64_t seed = 1;
  std::size_t levels = 3;  ///< refinement levels (factor 2 each) for finite-difference checks

  std::vector<std::pair<SmoothFunction, SmoothFunction>> draw() const;
};

/// The default plan: n pairs cycling through the polynomial, Gaussian and random-smooth
/// families with positive densities.
SamplePlan default_plan(const Grid& grid, std::size_t n, std::uint64_t seed);

}  // namespace mlab
