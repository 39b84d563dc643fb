#pragma once

#include <string>

#include "mlab/field.hpp"

namespace mlab {

/// Version tag written into every field file.
inline constexpr const char* field_format_tag = "madelung-field/1";

// CSV layout: a "# {json}" line with the grid metadata, a column-name line, then one
// row per node in memory order holding the node coordinates followed by the value
// (real) or the real and imaginary parts (complex).
template <typename S>
void save_csv(const Field<S>& field, const std::string& path);
template <typename S>
Field<S> load_csv(const std::string& path);

// Binary layout: <stem>.json carries the grid metadata and <stem>.bin the values as
// little-endian float64 (complex values interleaved re, im).
template <typename S>
void save_binary(const Field<S>& field, const std::string& stem);
template <typename S>
Field<S> load_binary(const std::string& stem);

}  // namespace mlab
