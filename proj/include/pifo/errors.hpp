#pragma once

#include <stdexcept>
#include <string>

namespace pifo {

// Parameter lies outside the validity region of a constructor or operation.
// Messages name the violated constraint so callers can surface it verbatim.
class domain_error : public std::runtime_error {
 public:
  explicit domain_error(const std::string& what) : std::runtime_error(what) {}
};

// An iterative routine failed to converge. Must not occur inside documented
// validity ranges; treated as a bug when it does.
class numeric_error : public std::runtime_error {
 public:
  explicit numeric_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace pifo
