#include "epilab/extreal.hpp"

#include <cmath>
#include <ostream>

#include "epilab/error.hpp"

namespace epilab {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "invalid argument";
    case ErrorCode::DimensionMismatch: return "dimension mismatch";
    case ErrorCode::NoProxPath: return "no prox path";
    case ErrorCode::NotExactClass: return "not an exact class";
    case ErrorCode::OutsideDomain: return "outside domain";
    case ErrorCode::EmptyDomain: return "empty domain";
    case ErrorCode::UnboundedBelow: return "unbounded below";
    case ErrorCode::UndefinedArithmetic: return "undefined extended-real arithmetic";
    case ErrorCode::BrokenProx: return "broken prox";
    case ErrorCode::UnknownInfimum: return "unknown infimum";
    case ErrorCode::Parse: return "parse error";
    case ErrorCode::Schema: return "schema error";
    case ErrorCode::Io: return "I/O error";
    case ErrorCode::Internal: return "internal error";
  }
  return "unknown error";
}

ExtReal::ExtReal(double v) {
  if (std::isnan(v)) fail(ErrorCode::UndefinedArithmetic, "NaN is not an extended real");
  if (v == -std::numeric_limits<double>::infinity()) {
    fail(ErrorCode::UndefinedArithmetic, "-inf is not representable (improper function)");
  }
  if (std::isinf(v)) {
    infinite_ = true;
  } else {
    value_ = v;
  }
}

double ExtReal::value() const {
  if (infinite_) fail(ErrorCode::UndefinedArithmetic, "value() of +inf");
  return value_;
}

ExtReal ExtReal::operator+(const ExtReal& other) const {
  if (infinite_ || other.infinite_) return infinity();
  return ExtReal(value_ + other.value_);
}

ExtReal ExtReal::operator-(const ExtReal& other) const {
  if (other.infinite_) {
    fail(ErrorCode::UndefinedArithmetic,
         infinite_ ? "inf - inf is undefined" : "finite - inf would be -inf");
  }
  if (infinite_) return infinity();
  return ExtReal(value_ - other.value_);
}

ExtReal ExtReal::scaled(double alpha) const {
  if (!(alpha > 0)) fail(ErrorCode::InvalidArgument, "ExtReal scale factor must be > 0");
  if (infinite_) return infinity();
  return ExtReal(alpha * value_);
}

ExtReal min(const ExtReal& a, const ExtReal& b) { return (b < a) ? b : a; }
ExtReal max(const ExtReal& a, const ExtReal& b) { return (a < b) ? b : a; }

bool matches(const ExtReal& a, const ExtReal& b, double tol) {
  if (a.is_infinite() || b.is_infinite()) return a.is_infinite() && b.is_infinite();
  return std::abs(a.value() - b.value()) <= tol;
}

std::ostream& operator<<(std::ostream& os, const ExtReal& v) {
  if (v.is_infinite()) return os << "+inf";
  return os << v.value();
}

}  // namespace epilab
