#pragma once

#include <stdexcept>
#include <string>

namespace ks2d {

/// Invalid configuration or violated operation precondition (CLI exit code 2).
class config_error : public std::runtime_error {
 public:
  explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

/// Snapshot/report serialization failure (CLI exit code 4).
class io_error : public std::runtime_error {
 public:
  explicit io_error(const std::string& what) : std::runtime_error(what) {}
};

/// A member run of a convergence study blew up (CLI exit code 3).
class divergence_error : public std::runtime_error {
 public:
  explicit divergence_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace ks2d
