#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace dgibbs {

// A flow integration stage produced a non-finite velocity; carries the point
// at which the field blew up.
class IntegrationError : public std::runtime_error {
 public:
  IntegrationError(const std::string& msg, std::vector<double> at)
      : std::runtime_error(msg), stage_point(std::move(at)) {}
  std::vector<double> stage_point;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& msg, std::size_t offset)
      : std::runtime_error(msg + " (byte " + std::to_string(offset) + ")"),
        byte_offset(offset) {}
  std::size_t byte_offset;
};

class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnsupportedModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace dgibbs
