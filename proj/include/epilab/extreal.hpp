#pragma once

#include <compare>
#include <iosfwd>
#include <limits>

namespace epilab {

/// Element of R ∪ {+∞}. There is no −∞: any operation that would produce it
/// throws ErrorCode::UndefinedArithmetic.
class ExtReal {
 public:
  constexpr ExtReal() = default;
  // Implicit on purpose: finite doubles are the common case. Passing NaN or
  // −inf throws; +inf maps to the infinite element.
  ExtReal(double v);  // NOLINT(google-explicit-constructor)

  static constexpr ExtReal infinity() { return ExtReal(Tag{}); }

  constexpr bool is_finite() const { return !infinite_; }
  constexpr bool is_infinite() const { return infinite_; }

  /// Finite value; throws when infinite.
  double value() const;
  /// Finite value or +inf as a double (for output and plotting).
  constexpr double to_double() const {
    return infinite_ ? std::numeric_limits<double>::infinity() : value_;
  }

  ExtReal operator+(const ExtReal& other) const;
  ExtReal operator-(const ExtReal& other) const;
  ExtReal& operator+=(const ExtReal& other) { return *this = *this + other; }

  /// Multiplication by a strictly positive scalar.
  ExtReal scaled(double alpha) const;

  friend bool operator==(const ExtReal& a, const ExtReal& b) {
    if (a.infinite_ || b.infinite_) return a.infinite_ == b.infinite_;
    return a.value_ == b.value_;
  }
  friend std::partial_ordering operator<=>(const ExtReal& a, const ExtReal& b) {
    if (a.infinite_ && b.infinite_) return std::partial_ordering::equivalent;
    if (a.infinite_) return std::partial_ordering::greater;
    if (b.infinite_) return std::partial_ordering::less;
    return a.value_ <=> b.value_;
  }

 private:
  struct Tag {};
  constexpr explicit ExtReal(Tag) : value_(0.0), infinite_(true) {}

  double value_ = 0.0;
  bool infinite_ = false;
};

ExtReal min(const ExtReal& a, const ExtReal& b);
ExtReal max(const ExtReal& a, const ExtReal& b);

/// |a − b| ≤ tol, with two infinities counting as a match.
bool matches(const ExtReal& a, const ExtReal& b, double tol);

std::ostream& operator<<(std::ostream& os, const ExtReal& v);

}  // namespace epilab
