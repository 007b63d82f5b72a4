#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ergtower {

// Raised when a request would exceed a configured size cap (qubits, enumerated
// configurations). The caller is expected to shrink the lattice.
class resource_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised when a circuit or gate table cannot be assembled consistently.
class construction_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class parse_error : public std::invalid_argument {
 public:
  parse_error(const std::string& what, std::size_t position)
      : std::invalid_argument(what + " (at position " + std::to_string(position) + ")"),
        position_(position) {}

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

}  // namespace ergtower
