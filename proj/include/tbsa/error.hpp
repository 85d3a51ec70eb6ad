#pragma once

#include <stdexcept>
#include <string>

namespace tbsa {

// Malformed corpus/embedding/lexicon input, invalid spans, bad tag strings.
struct DataError : std::runtime_error {
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

// Non-finite losses, failed gradient checks.
struct NumericError : std::runtime_error {
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace tbsa
