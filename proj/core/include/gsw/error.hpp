#pragma once

#include <stdexcept>
#include <string>

namespace gsw {

enum class ErrorKind {
  non_finite,
  overflow,
  dimension_mismatch,
  invalid_spec,
  solver_failure,
  non_convergence,
  infeasible_theta,
  config,
};

const char* to_string(ErrorKind kind) noexcept;

/// Single exception type for the library; callers branch on kind().
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace gsw
