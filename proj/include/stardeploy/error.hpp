#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace stardeploy {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid or inconsistent configuration values.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Geometry that makes an angle or direction undefined.
class GeometryError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class InvalidOrientation : public Error {
 public:
  using Error::Error;
};

class InvalidElementState : public Error {
 public:
  using Error::Error;
};

// Environment used out of order (e.g. step after the episode ended).
class LifecycleError : public Error {
 public:
  using Error::Error;
};

class CheckpointError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Training produced a non-finite loss; the message carries the diagnostic record.
class TrainingDiverged : public Error {
 public:
  using Error::Error;
};

[[noreturn]] void throw_dimension(const std::string& what, std::size_t expected, std::size_t got);

}  // namespace stardeploy
