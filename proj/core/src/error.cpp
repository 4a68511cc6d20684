#include "gsw/error.hpp"

namespace gsw {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::non_finite: return "NonFinite";
    case ErrorKind::overflow: return "Overflow";
    case ErrorKind::dimension_mismatch: return "DimensionMismatch";
    case ErrorKind::invalid_spec: return "InvalidSpec";
    case ErrorKind::solver_failure: return "SolverFailure";
    case ErrorKind::non_convergence: return "NonConvergence";
    case ErrorKind::infeasible_theta: return "InfeasibleTheta";
    case ErrorKind::config: return "ConfigError";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

}  // namespace gsw
