#pragma once

#include <stdexcept>
#include <string>

namespace seprisk {

// Bad input: malformed data, shape mismatches, violated preconditions.
// The CLI maps this to exit code 1; anything else is a runtime failure (2).
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw ValidationError(msg);
}

}  // namespace seprisk
