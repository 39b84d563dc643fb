#pragma once

#include <stdexcept>
#include <string>

namespace mlab {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Grid construction, mismatched grids, out-of-hull evaluation.
class GridError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the domain of a closed-form expression (log, tan, sqrt).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Phase continuation hit a node where |psi| is below threshold.
class PhaseSingularity : public Error {
 public:
  PhaseSingularity(std::string message, std::size_t node)
      : Error(std::move(message)), node_(node) {}
  std::size_t node() const noexcept { return node_; }

 private:
  std::size_t node_;
};

/// Linear solve or stepping failure inside the time integrators.
class SolverError : public Error {
 public:
  using Error::Error;
};

/// Invalid scenario configuration; the message names the offending key path.
class ConfigError : public Error {
 public:
  ConfigError(std::string key_path, const std::string& what)
      : Error(key_path + ": " + what), key_path_(std::move(key_path)) {}
  const std::string& key_path() const noexcept { return key_path_; }

 private:
  std::string key_path_;
};

}  // namespace mlab
