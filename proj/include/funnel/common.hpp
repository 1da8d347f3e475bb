#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace funnel {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Exit codes used by the CLI; library errors carry the matching code.
enum class ErrorCode : int { validation = 1, capacity = 2, divergence = 3 };

class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }
  int exit_code() const noexcept { return static_cast<int>(code_); }

private:
  ErrorCode code_;
};

// Bad inputs: dimensions, ranges, config keys, malformed expressions.
struct ValidationError : Error {
  explicit ValidationError(const std::string& w) : Error(ErrorCode::validation, w) {}
};

// A right-hand side produced a non-finite value for finite inputs.
struct EvaluationError : Error {
  explicit EvaluationError(const std::string& w) : Error(ErrorCode::validation, w) {}
};

// A configured cap (word count, net size, grid resolution) would be exceeded.
struct CapacityError : Error {
  explicit CapacityError(const std::string& w) : Error(ErrorCode::capacity, w) {}
};

// A trajectory left the sanity region or became non-finite.
struct DivergenceError : Error {
  explicit DivergenceError(const std::string& w) : Error(ErrorCode::divergence, w) {}
};

} // namespace funnel
