#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace srqe {

// Error categories mirrored by the C API status codes.
enum class ErrorKind {
  domain,     // invalid mathematical input (negative t, zero vector, ...)
  config,     // inconsistent model / lattice / experiment configuration
  resource,   // budget exceeded (memory, dimension cap, iteration cap)
  numeric,    // algorithm failed to converge / refused to produce garbage
  range,      // query outside the computed range (never truncate silently)
  io,         // file system failure
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Eigensolver failure carrying the best Ritz data seen so far.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, std::vector<double> ritz, std::vector<double> residuals)
      : Error(ErrorKind::numeric, what), ritz_values(std::move(ritz)), ritz_residuals(std::move(residuals)) {}
  std::vector<double> ritz_values;
  std::vector<double> ritz_residuals;
};

}  // namespace srqe
