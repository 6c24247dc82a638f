#pragma once

#include <stdexcept>
#include <string>

namespace auxrl {

/// Malformed formula text; `offset` is the byte position of the failure.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : std::runtime_error(what + " (at offset " + std::to_string(offset) + ")"),
        offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

/// Finite-prefix satisfaction is undefined for the formula (e.g. an
/// unbounded "always" obligation survives negation normal form).
class UnsupportedFragmentError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad map text or a state/heatmap inconsistent with the map.
class MapError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Description/embedding provider failures: unreachable endpoint, missing
/// fixture entry, malformed response, wrong embedding dimension.
class ProviderError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid arguments to clustering, selection or learning operations.
class InvalidArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The task cannot be satisfied from the map's start cell.
class InfeasibleTaskError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad or missing configuration values / files.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace auxrl
