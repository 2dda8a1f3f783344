#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mrnav {

enum class ErrorKind {
  Extent,         // world point outside the grid extent
  Index,          // cell outside the grid dimensions
  Argument,       // invalid argument (empty set, nonpositive count, ...)
  Validation,     // a domain invariant does not hold
  Parse,          // malformed input text
  Ownership,      // data handed to the wrong owner
  FrameMismatch,  // inputs disagree on grid spec / world frame
  InvalidPose,    // pose off the map or on an obstacle
  InvalidPoint,   // query point on an obstacle
  InvalidSource,  // distance-field source not traversable
  Unreachable,    // goal has no finite arrival time
  NoSpace,        // no explored free cells to sample from
  Data,           // persisted or computed values violate a contract
  Io,             // file system failure
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace mrnav
