#include "mlab/field_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

#include <json.hpp>

namespace mlab {
namespace {

using nlohmann::json;

template <typename S>
constexpr bool is_complex = !std::is_same_v<S, double>;

template <typename S>
json header_of(const Grid& g) {
  json axes = json::array();
  for (const Axis& a : g.axes()) {
    axes.push_back({{"kind", a.kind == AxisKind::time ? "time" : "space"},
                    {"origin", a.origin},
                    {"extent", a.extent},
                    {"count", a.count}});
  }
  return {{"format", field_format_tag}, {"scalar", is_complex<S> ? "complex" : "real"}, {"axes", axes}};
}

template <typename S>
Grid grid_of(const json& h, const std::string& source) {
  if (!h.contains("format") || h["format"] != field_format_tag) {
    throw GridError(source + ": missing or unsupported format tag");
  }
  const std::string expected = is_complex<S> ? "complex" : "real";
  if (h.value("scalar", "") != expected) {
    throw GridError(source + ": stored scalar type is not " + expected);
  }
  std::vector<Axis> axes;
  for (const json& a : h.at("axes")) {
    axes.push_back(Axis{a.at("kind") == "time" ? AxisKind::time : AxisKind::space,
                        a.at("origin").get<double>(), a.at("extent").get<double>(),
                        a.at("count").get<std::size_t>()});
  }
  return Grid(std::move(axes));
}

std::string column_names(const Grid& g, bool complex_values) {
  std::string s;
  std::size_t q = 1;
  for (const Axis& a : g.axes()) {
    s += a.kind == AxisKind::time ? std::string("t") : "q" + std::to_string(q++);
    s += ',';
  }
  s += complex_values ? "re,im" : "value";
  return s;
}

void put_le(std::ofstream& out, double x) {
  std::uint64_t bits = std::bit_cast<std::uint64_t>(x);
  if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
  out.write(reinterpret_cast<const char*>(&bits), sizeof bits);
}

double get_le(std::ifstream& in) {
  std::uint64_t bits = 0;
  in.read(reinterpret_cast<char*>(&bits), sizeof bits);
  if (!in) throw GridError("binary payload is truncated");
  if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
  return std::bit_cast<double>(bits);
}

}  // namespace

template <typename S>
void save_csv(const Field<S>& field, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw GridError("cannot open " + path + " for writing");
  const Grid& g = field.grid();
  out << "# " << header_of<S>(g).dump() << '\n' << column_names(g, is_complex<S>) << '\n';
  out.precision(17);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Point p = g.point(i);
    for (std::size_t k = 0; k < g.rank(); ++k) out << p[k] << ',';
    if constexpr (is_complex<S>) {
      out << field[i].real() << ',' << field[i].imag() << '\n';
    } else {
      out << field[i] << '\n';
    }
  }
}

template <typename S>
Field<S> load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw GridError("cannot open " + path);
  std::string line;
  std::getline(in, line);
  if (line.rfind("# ", 0) != 0) throw GridError(path + ": missing header line");
  const Grid g = grid_of<S>(json::parse(line.substr(2)), path);
  std::getline(in, line);
  typename Field<S>::Values v(static_cast<Eigen::Index>(g.size()));
  const std::size_t ncols = g.rank() + (is_complex<S> ? 2 : 1);
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!std::getline(in, line)) throw GridError(path + ": fewer rows than grid nodes");
    std::vector<double> cols;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cols.push_back(std::stod(cell));
    if (cols.size() != ncols) throw GridError(path + ": wrong column count in row " + std::to_string(i));
    if constexpr (is_complex<S>) {
      v[static_cast<Eigen::Index>(i)] = S(cols[g.rank()], cols[g.rank() + 1]);
    } else {
      v[static_cast<Eigen::Index>(i)] = cols[g.rank()];
    }
  }
  return Field<S>(g, std::move(v));
}

template <typename S>
void save_binary(const Field<S>& field, const std::string& stem) {
  json h = header_of<S>(field.grid());
  const std::string payload = stem + ".bin";
  h["payload"] = payload.substr(payload.find_last_of('/') + 1);
  h["byte_order"] = "little";
  {
    std::ofstream out(stem + ".json");
    if (!out) throw GridError("cannot open " + stem + ".json for writing");
    out << h.dump(2) << '\n';
  }
  std::ofstream out(payload, std::ios::binary);
  if (!out) throw GridError("cannot open " + payload + " for writing");
  for (std::size_t i = 0; i < field.size(); ++i) {
    if constexpr (is_complex<S>) {
      put_le(out, field[i].real());
      put_le(out, field[i].imag());
    } else {
      put_le(out, field[i]);
    }
  }
}

template <typename S>
Field<S> load_binary(const std::string& stem) {
  std::ifstream hin(stem + ".json");
  if (!hin) throw GridError("cannot open " + stem + ".json");
  const json h = json::parse(hin);
  const Grid g = grid_of<S>(h, stem + ".json");
  std::ifstream in(stem + ".bin", std::ios::binary);
  if (!in) throw GridError("cannot open " + stem + ".bin");
  typename Field<S>::Values v(static_cast<Eigen::Index>(g.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if constexpr (is_complex<S>) {
      const double re = get_le(in);
      v[i] = S(re, get_le(in));
    } else {
      v[i] = get_le(in);
    }
  }
  return Field<S>(g, std::move(v));
}

template void save_csv<double>(const RealField&, const std::string&);
template void save_csv<cplx>(const ComplexField&, const std::string&);
template RealField load_csv<double>(const std::string&);
template ComplexField load_csv<cplx>(const std::string&);
template void save_binary<double>(const RealField&, const std::string&);
template void save_binary<cplx>(const ComplexField&, const std::string&);
template RealField load_binary<double>(const std::string&);
template ComplexField load_binary<cplx>(const std::string&);

}  // namespace mlab
