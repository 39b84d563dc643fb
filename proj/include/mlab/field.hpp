#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <type_traits>
#include <utility>

#include <Eigen/Core>

#include "mlab/grid.hpp"

namespace mlab {

using cplx = std::complex<double>;

namespace detail {
template <typename T>
bool all_finite(const Eigen::Array<T, Eigen::Dynamic, 1>& v) {
  if constexpr (std::is_same_v<T, double>) {
    return v.allFinite();
  } else {
    return v.real().allFinite() && v.imag().allFinite();
  }
}
}  // namespace detail

/// Samples of a real or complex scalar on a Grid. Values are immutable once built;
/// every operation returns a new field.
template <typename Scalar>
class Field {
 public:
  using scalar_type = Scalar;
  using Values = Eigen::Array<Scalar, Eigen::Dynamic, 1>;

  Field(Grid grid, Values values) : grid_(std::move(grid)), values_(std::move(values)) {
    if (static_cast<std::size_t>(values_.size()) != grid_.size()) {
      throw GridError("field size does not match its grid");
    }
    if (!detail::all_finite(values_)) throw GridError("field contains non-finite values");
  }

  template <typename Derived>
  Field(Grid grid, const Eigen::ArrayBase<Derived>& expr) : Field(std::move(grid), Values(expr)) {}

  static Field constant(const Grid& grid, Scalar value) {
    return Field(grid, Values::Constant(static_cast<Eigen::Index>(grid.size()), value));
  }

  /// Evaluates fn(Point) at every node.
  template <typename Fn>
  static Field sample(const Grid& grid, Fn&& fn) {
    Values v(static_cast<Eigen::Index>(grid.size()));
    for (std::size_t i = 0; i < grid.size(); ++i) v[static_cast<Eigen::Index>(i)] = fn(grid.point(i));
    return Field(grid, std::move(v));
  }

  const Grid& grid() const { return grid_; }
  const Values& values() const { return values_; }
  std::size_t size() const { return grid_.size(); }
  Scalar operator[](std::size_t i) const { return values_[static_cast<Eigen::Index>(i)]; }
  Scalar at(const Index& idx) const { return (*this)[grid_.linear(idx)]; }

 private:
  Grid grid_;
  Values values_;
};

using RealField = Field<double>;
using ComplexField = Field<cplx>;

template <typename A, typename B>
using product_t = decltype(std::declval<A>() * std::declval<B>());

template <typename A, typename B>
Field<product_t<A, B>> operator*(const Field<A>& x, const Field<B>& y) {
  require_same_grid(x.grid(), y.grid(), "operator*");
  using R = product_t<A, B>;
  return {x.grid(), x.values().template cast<R>() * y.values().template cast<R>()};
}

template <typename S>
Field<S> operator+(const Field<S>& x, const Field<S>& y) {
  require_same_grid(x.grid(), y.grid(), "operator+");
  return {x.grid(), x.values() + y.values()};
}

template <typename S>
Field<S> operator-(const Field<S>& x, const Field<S>& y) {
  require_same_grid(x.grid(), y.grid(), "operator-");
  return {x.grid(), x.values() - y.values()};
}

template <typename S>
Field<S> operator-(const Field<S>& x) {
  return {x.grid(), -x.values()};
}

template <typename S>
Field<S> operator*(S k, const Field<S>& x) {
  return {x.grid(), k * x.values()};
}

template <typename S>
Field<S> operator*(const Field<S>& x, S k) {
  return {x.grid(), x.values() * k};
}

inline ComplexField operator*(cplx k, const RealField& x) {
  return {x.grid(), k * x.values().cast<cplx>()};
}

template <typename S, typename Fn>
auto map(const Field<S>& x, Fn&& fn) {
  using R = std::invoke_result_t<Fn, S>;
  typename Field<R>::Values v(static_cast<Eigen::Index>(x.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = fn(x.values()[i]);
  return Field<R>(x.grid(), std::move(v));
}

inline RealField real(const ComplexField& z) { return {z.grid(), z.values().real()}; }
inline RealField imag(const ComplexField& z) { return {z.grid(), z.values().imag()}; }
inline RealField abs(const ComplexField& z) { return {z.grid(), z.values().abs()}; }
inline RealField abs2(const ComplexField& z) { return {z.grid(), z.values().abs2()}; }
inline ComplexField to_complex(const RealField& x) { return {x.grid(), x.values().cast<cplx>()}; }
inline ComplexField make_complex(const RealField& re, const RealField& im) {
  require_same_grid(re.grid(), im.grid(), "make_complex");
  ComplexField::Values v(re.values().size());
  v.real() = re.values();
  v.imag() = im.values();
  return {re.grid(), std::move(v)};
}

/// Largest |x| over nodes, optionally restricted to interior nodes.
template <typename S>
double max_abs(const Field<S>& x, bool interior_only = false) {
  double m = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (interior_only && !x.grid().interior(i)) continue;
    m = std::max(m, std::abs(x[i]));
  }
  return m;
}

}  // namespace mlab
