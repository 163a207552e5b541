#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ddah {

// Error taxonomy shared by every module. Argument and state errors map onto
// the standard hierarchy so callers can catch std::exception uniformly.
using InvalidArgument = std::invalid_argument;

class InvalidState : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class IoError : public std::runtime_error {
 public:
  IoError(const std::string& path, const std::string& what)
      : std::runtime_error(path + ": " + what), path_(path) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

/// Raised when a persisted artifact has the wrong magic, version or size.
class LoadError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : std::runtime_error(what + " (at position " + std::to_string(position) + ")"),
        position_(position) {}
  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

}  // namespace ddah
