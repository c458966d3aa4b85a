// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace hbrom {

// Error taxonomy shared by the whole library. The categories map onto the
// CLI exit-code contract (invalid input -> 2, solver instability -> 3,
// training divergence -> 4).
enum class ErrorKind {
    invalid_argument,
    shape,
    format,
    io,
    convergence,
    budget,
    instability,
    divergence,
    internal,
};

class Error : public std::runtime_error {
  public:
    Error(ErrorKind kind, std::string message)
        : std::runtime_error(std::move(message)), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

  private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
    throw Error(kind, message);
}

} // namespace hbrom
