#pragma once

#include <stdexcept>
#include <string>

namespace semcse {

/// Raised for every contract violation in the library: bad input files,
/// violated preconditions, inconsistent configurations.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace semcse
