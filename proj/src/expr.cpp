#include "funnel/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>

namespace funnel {

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double Expr::eval(double t, const Vector& x, const Vector& u) const {
  std::vector<double> stack;
  return eval(t, x, u, stack);
}

double Expr::eval(double t, const Vector& x, const Vector& u, std::vector<double>& stack) const {
  stack.clear();
  for (const Node& node : code_) {
    switch (node.op) {
      case Op::num: stack.push_back(node.value); break;
      case Op::var_t: stack.push_back(t); break;
      case Op::var_x: stack.push_back(x[node.index]); break;
      case Op::var_u: stack.push_back(u[node.index]); break;
      case Op::neg: stack.back() = -stack.back(); break;
      case Op::fn_sin: stack.back() = std::sin(stack.back()); break;
      case Op::fn_cos: stack.back() = std::cos(stack.back()); break;
      case Op::fn_exp: stack.back() = std::exp(stack.back()); break;
      case Op::fn_abs: stack.back() = std::abs(stack.back()); break;
      default: {
        double rhs = stack.back();
        stack.pop_back();
        double& lhs = stack.back();
        switch (node.op) {
          case Op::add: lhs += rhs; break;
          case Op::sub: lhs -= rhs; break;
          case Op::mul: lhs *= rhs; break;
          case Op::div: lhs /= rhs; break;
          case Op::pow: lhs = std::pow(lhs, rhs); break;
          default: break;
        }
      }
    }
  }
  return stack.back();
}

namespace {

// Precedence levels used by both the parser and the canonical printer.
// add/sub: 1, mul/div: 2, unary minus: 3, pow: 4, atoms: 5.
constexpr int kPrecAdd = 1;
constexpr int kPrecMul = 2;
constexpr int kPrecNeg = 3;
constexpr int kPrecPow = 4;
constexpr int kPrecAtom = 5;

class Parser {
public:
  Parser(std::string_view src, int n, int m) : src_(src), n_(n), m_(m) {}

  Expr parse() {
    if (src_.find_first_not_of(" \t\r\n") == std::string_view::npos)
      fail(0, "empty expression");
    parse_sum();
    skip_ws();
    if (pos_ != src_.size()) fail(pos_, "unexpected trailing input");
    return Expr(std::move(code_), n_, m_);
  }

private:
  [[noreturn]] void fail(std::size_t at, const std::string& msg) const {
    throw ValidationError("expression error at position " + std::to_string(at) + ": " + msg +
                          " in \"" + std::string(src_) + "\"");
  }

  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool eat(char c) {
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  char peek() {
    skip_ws();
    return pos_ < src_.size() ? src_[pos_] : '\0';
  }

  void parse_sum() {
    parse_term();
    while (true) {
      if (eat('+')) {
        parse_term();
        code_.push_back({Expr::Op::add});
      } else if (eat('-')) {
        parse_term();
        code_.push_back({Expr::Op::sub});
      } else {
        return;
      }
    }
  }

  void parse_term() {
    parse_factor();
    while (true) {
      if (eat('*')) {
        parse_factor();
        code_.push_back({Expr::Op::mul});
      } else if (eat('/')) {
        parse_factor();
        code_.push_back({Expr::Op::div});
      } else {
        return;
      }
    }
  }

  // factor := '-' factor | power;  power := atom ['^' factor]
  void parse_factor() {
    if (eat('-')) {
      parse_factor();
      code_.push_back({Expr::Op::neg});
      return;
    }
    parse_atom();
    if (eat('^')) {
      parse_factor();
      code_.push_back({Expr::Op::pow});
    }
  }

  void parse_atom() {
    skip_ws();
    if (pos_ >= src_.size()) fail(pos_, "expected value");
    char c = src_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      parse_number();
      return;
    }
    if (c == '(') {
      ++pos_;
      parse_sum();
      if (!eat(')')) fail(pos_, "expected ')'");
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      parse_identifier();
      return;
    }
    fail(pos_, std::string("unexpected character '") + c + "'");
  }

  void parse_number() {
    const char* begin = src_.data() + pos_;
    const char* end = src_.data() + src_.size();
    double value = 0.0;
    auto res = std::from_chars(begin, end, value);
    if (res.ec != std::errc{}) fail(pos_, "malformed number");
    pos_ = static_cast<std::size_t>(res.ptr - src_.data());
    code_.push_back({Expr::Op::num, 0, value});
  }

  void parse_identifier() {
    std::size_t start = pos_;
    while (pos_ < src_.size() &&
           (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
      ++pos_;
    std::string_view name = src_.substr(start, pos_ - start);

    if (name == "t") {
      code_.push_back({Expr::Op::var_t});
      return;
    }
    if (name == "sin" || name == "cos" || name == "exp" || name == "abs") {
      if (!eat('(')) fail(pos_, "function " + std::string(name) + " expects '('");
      parse_sum();
      if (!eat(')')) fail(pos_, "expected ')'");
      Expr::Op op = name == "sin"   ? Expr::Op::fn_sin
                    : name == "cos" ? Expr::Op::fn_cos
                    : name == "exp" ? Expr::Op::fn_exp
                                    : Expr::Op::fn_abs;
      code_.push_back({op});
      return;
    }
    if ((name[0] == 'x' || name[0] == 'u') && name.size() > 1) {
      int index = 0;
      auto res = std::from_chars(name.data() + 1, name.data() + name.size(), index);
      if (res.ec == std::errc{} && res.ptr == name.data() + name.size() && index >= 1) {
        int limit = name[0] == 'x' ? n_ : m_;
        if (index > limit)
          fail(start, std::string(name) + " exceeds declared dimension " + std::to_string(limit));
        code_.push_back({name[0] == 'x' ? Expr::Op::var_x : Expr::Op::var_u, index - 1});
        return;
      }
    }
    fail(start, "unknown identifier '" + std::string(name) + "'");
  }

  std::string_view src_;
  int n_;
  int m_;
  std::size_t pos_ = 0;
  std::vector<Expr::Node> code_;
};

struct Printed {
  std::string text;
  int prec;
};

std::string wrap(const Printed& p, int min_prec) {
  if (p.prec >= min_prec) return p.text;
  return "(" + p.text + ")";
}

} // namespace

Expr parse_expression(std::string_view source, int n, int m) {
  if (n < 1 || m < 1) throw ValidationError("expression dimensions must be positive");
  return Parser(source, n, m).parse();
}

std::string Expr::str() const {
  std::vector<Printed> stack;
  auto binary = [&stack](const char* sep, int prec, int lhs_min, int rhs_min) {
    Printed rhs = std::move(stack.back());
    stack.pop_back();
    Printed lhs = std::move(stack.back());
    stack.pop_back();
    stack.push_back({wrap(lhs, lhs_min) + sep + wrap(rhs, rhs_min), prec});
  };
  auto call = [&stack](const char* name) {
    Printed arg = std::move(stack.back());
    stack.pop_back();
    stack.push_back({std::string(name) + "(" + arg.text + ")", kPrecAtom});
  };
  for (const Node& node : code_) {
    switch (node.op) {
      case Op::num: stack.push_back({format_double(node.value), kPrecAtom}); break;
      case Op::var_t: stack.push_back({"t", kPrecAtom}); break;
      case Op::var_x: stack.push_back({"x" + std::to_string(node.index + 1), kPrecAtom}); break;
      case Op::var_u: stack.push_back({"u" + std::to_string(node.index + 1), kPrecAtom}); break;
      // a + (b - c) must keep its parentheses: right operands of +,- and *,/
      // print at one level above the operator's own precedence.
      case Op::add: binary(" + ", kPrecAdd, kPrecAdd, kPrecAdd + 1); break;
      case Op::sub: binary(" - ", kPrecAdd, kPrecAdd, kPrecAdd + 1); break;
      case Op::mul: binary("*", kPrecMul, kPrecMul, kPrecMul + 1); break;
      case Op::div: binary("/", kPrecMul, kPrecMul, kPrecMul + 1); break;
      case Op::pow: binary("^", kPrecPow, kPrecAtom, kPrecPow); break;
      case Op::neg: {
        Printed arg = std::move(stack.back());
        stack.pop_back();
        stack.push_back({"-" + wrap(arg, kPrecNeg), kPrecNeg});
        break;
      }
      case Op::fn_sin: call("sin"); break;
      case Op::fn_cos: call("cos"); break;
      case Op::fn_exp: call("exp"); break;
      case Op::fn_abs: call("abs"); break;
    }
  }
  return stack.back().text;
}

} // namespace funnel
