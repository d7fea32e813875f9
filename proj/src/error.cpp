#include "stardeploy/error.hpp"

namespace stardeploy {

void throw_dimension(const std::string& what, std::size_t expected, std::size_t got) {
  throw DimensionError(what + ": expected " + std::to_string(expected) + ", got " +
                       std::to_string(got));
}

}  // namespace stardeploy
