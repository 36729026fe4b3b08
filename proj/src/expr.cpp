#include "epilab/expr.hpp"

#include <cctype>
#include <cmath>
#include <limits>
#include <vector>

#include "epilab/error.hpp"

namespace epilab {

namespace {

class Parser {
 public:
  Parser(std::string_view text, const ExprVars& vars) : text_(text), vars_(vars) {}

  double parse() {
    const double v = additive();
    skip_space();
    if (pos_ != text_.size()) error("unexpected character");
    return v;
  }

 private:
  [[noreturn]] void error(const std::string& what) const {
    fail(ErrorCode::Parse, "expression \"" + std::string(text_) + "\", column " +
                               std::to_string(pos_ + 1) + ": " + what);
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  bool accept_word(std::string_view w) {
    skip_space();
    if (text_.substr(pos_, w.size()) != w) return false;
    const std::size_t end = pos_ + w.size();
    if (end < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[end])) || text_[end] == '_')) {
      return false;
    }
    pos_ = end;
    return true;
  }

  double additive() {
    double v = multiplicative();
    for (;;) {
      if (accept('+')) {
        v += multiplicative();
      } else if (accept('-')) {
        v -= multiplicative();
      } else {
        return v;
      }
    }
  }

  double multiplicative() {
    double v = unary();
    for (;;) {
      if (accept('*')) {
        v *= unary();
      } else if (accept('/')) {
        v /= unary();
      } else if (accept_word("mod")) {
        const double m = unary();
        v = v - m * std::floor(v / m);
      } else {
        return v;
      }
    }
  }

  double unary() {
    if (accept('-')) return -unary();
    if (accept('+')) return unary();
    return power();
  }

  double power() {
    const double base = primary();
    if (accept('^')) return std::pow(base, unary());
    return base;
  }

  double primary() {
    skip_space();
    if (pos_ >= text_.size()) error("unexpected end of expression");
    if (accept('(')) {
      const double v = additive();
      if (!accept(')')) error("expected ')'");
      return v;
    }
    const char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    error("unexpected character");
  }

  double number() {
    const std::string rest(text_.substr(pos_));
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(rest, &used);
    } catch (const std::exception&) {
      error("malformed number");
    }
    pos_ += used;
    return v;
  }

  double identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      ++pos_;
    }
    const std::string_view name = text_.substr(start, pos_ - start);
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == '(') {
      ++pos_;
      std::vector<double> args{additive()};
      while (accept(',')) args.push_back(additive());
      if (!accept(')')) error("expected ')'");
      return call(name, args);
    }
    if (name == "pi") return M_PI;
    if (name == "inf") return std::numeric_limits<double>::infinity();
    const auto it = vars_.find(name);
    if (it == vars_.end()) {
      pos_ = start;
      error("unknown variable '" + std::string(name) + "'");
    }
    return it->second;
  }

  double call(std::string_view name, const std::vector<double>& a) {
    auto unary_fn = [&](double (*fn)(double)) {
      if (a.size() != 1) error(std::string(name) + " takes one argument");
      return fn(a[0]);
    };
    if (name == "sqrt") return unary_fn(std::sqrt);
    if (name == "abs") return unary_fn(std::fabs);
    if (name == "exp") return unary_fn(std::exp);
    if (name == "log") return unary_fn(std::log);
    if (name == "min" || name == "max") {
      if (a.size() < 2) error(std::string(name) + " takes at least two arguments");
      double v = a[0];
      for (double x : a) v = (name == "min") ? std::min(v, x) : std::max(v, x);
      return v;
    }
    error("unknown function '" + std::string(name) + "'");
  }

  std::string_view text_;
  const ExprVars& vars_;
  std::size_t pos_ = 0;
};

}  // namespace

double eval_expression(std::string_view text, const ExprVars& vars) {
  return Parser(text, vars).parse();
}

}  // namespace epilab
