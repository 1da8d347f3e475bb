#pragma once

#include "funnel/common.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace funnel {

// Arithmetic expression over t, x1..xn, u1..um compiled to a postfix program.
// Grammar: +, -, *, / left-associative, ^ right-associative, unary minus,
// functions sin, cos, exp, abs, real literals.
class Expr {
public:
  enum class Op : std::uint8_t {
    num,
    var_t,
    var_x,
    var_u,
    add,
    sub,
    mul,
    div,
    pow,
    neg,
    fn_sin,
    fn_cos,
    fn_exp,
    fn_abs,
  };

  struct Node {
    Op op;
    int index = 0;      // 0-based component for var_x / var_u
    double value = 0.0; // literal for num
  };

  Expr() = default;
  Expr(std::vector<Node> code, int n, int m) : code_(std::move(code)), n_(n), m_(m) {}

  double eval(double t, const Vector& x, const Vector& u) const;
  // Reusable-stack variant for hot loops.
  double eval(double t, const Vector& x, const Vector& u, std::vector<double>& stack) const;

  // Canonical text form; parsing the result reproduces the same program.
  std::string str() const;

  const std::vector<Node>& code() const { return code_; }
  int state_dim() const { return n_; }
  int control_dim() const { return m_; }

private:
  std::vector<Node> code_;
  int n_ = 0;
  int m_ = 0;
};

// Parses one expression. Throws ValidationError with the byte position on
// syntax errors, unknown identifiers, or out-of-range variable indices.
Expr parse_expression(std::string_view source, int n, int m);

// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

} // namespace funnel
