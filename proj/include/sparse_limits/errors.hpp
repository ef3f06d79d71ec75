#pragma once

#include <stdexcept>
#include <string>

namespace sparse_limits {

// Invalid argument to a library operation (out-of-range parameter,
// dimension mismatch).
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A computation was refused because it would exceed an enumeration or
// memory guard (exhaustive decoders, exact enumeration of exponents).
class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed experiment configuration. `path` names the offending key,
// e.g. "base.rho".
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string path, const std::string& message)
      : std::runtime_error(path.empty() ? message : path + ": " + message),
        path_(std::move(path)) {}

  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

namespace detail {

inline void require(bool condition, const std::string& message) {
  if (!condition) throw ParameterError(message);
}

}  // namespace detail
}  // namespace sparse_limits
