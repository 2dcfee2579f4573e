#pragma once

#include <stdexcept>

namespace anonkit {

// Error taxonomy mirrored by the CLI exit codes: validation failures exit
// with 2, capacity/budget violations with 3, file problems with 4.
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CapacityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace anonkit
