#pragma once

#include <cstdint>
#include <string>
#include <utility>

#include <boost/multiprecision/cpp_int.hpp>

#include "sepgen/errors.hpp"

namespace sepgen {

// Exact arbitrary-precision integer.  All counts, bounds and interval
// endpoints in this library are computed with BigInt; no floating point is
// ever used for a quantity that feeds a comparison or a floor/ceiling.
using BigInt = boost::multiprecision::cpp_int;

// Non-negative exact count.  Thin wrapper that enforces the >= 0 invariant
// at construction and on subtraction.
class Count {
 public:
  Count() : v_(0) {}
  Count(std::uint64_t v) : v_(v) {}  // NOLINT: implicit by design
  explicit Count(BigInt v) : v_(std::move(v)) {
    if (v_ < 0) throw integrity_error("Count constructed from negative value");
  }

  const BigInt& value() const { return v_; }
  std::string str() const { return v_.str(); }

  friend Count operator+(const Count& a, const Count& b) {
    return Count(a.v_ + b.v_);
  }
  friend Count operator*(const Count& a, const Count& b) {
    return Count(a.v_ * b.v_);
  }
  // Subtraction must not underflow; a negative result is a logic error.
  friend Count operator-(const Count& a, const Count& b) {
    if (a.v_ < b.v_) throw integrity_error("Count subtraction underflow");
    return Count(a.v_ - b.v_);
  }

  friend bool operator==(const Count& a, const Count& b) { return a.v_ == b.v_; }
  friend bool operator!=(const Count& a, const Count& b) { return a.v_ != b.v_; }
  friend bool operator<(const Count& a, const Count& b) { return a.v_ < b.v_; }
  friend bool operator<=(const Count& a, const Count& b) { return a.v_ <= b.v_; }
  friend bool operator>(const Count& a, const Count& b) { return a.v_ > b.v_; }
  friend bool operator>=(const Count& a, const Count& b) { return a.v_ >= b.v_; }

 private:
  BigInt v_;
};

// base^exp for exp >= 0.
inline BigInt pow_big(const BigInt& base, std::uint64_t exp) {
  BigInt acc = 1, b = base;
  while (exp) {
    if (exp & 1) acc *= b;
    exp >>= 1;
    if (exp) b *= b;
  }
  return acc;
}

// floor(a / b) for a >= 0, b > 0.
inline BigInt floor_div(const BigInt& a, const BigInt& b) {
  if (b <= 0 || a < 0) throw invalid_input("floor_div: need a >= 0, b > 0");
  return a / b;  // cpp_int division truncates; exact floor for a, b >= 0
}

// ceil(a / b) for a >= 0, b > 0.
inline BigInt ceil_div(const BigInt& a, const BigInt& b) {
  if (b <= 0 || a < 0) throw invalid_input("ceil_div: need a >= 0, b > 0");
  return (a + b - 1) / b;
}

// Exact division; remainder must vanish.
inline BigInt div_exact(const BigInt& a, const BigInt& b, const char* what) {
  if (b == 0) throw integrity_error(std::string("div_exact by zero: ") + what);
  if (a % b != 0)
    throw integrity_error(std::string("divisibility violated: ") + what);
  return a / b;
}

// Least t >= 0 with base^(t*stride) >= x, for x >= 1, base >= 2, stride >= 1.
// Computed by exact power comparison, never by floating-point logarithms.
inline unsigned ceil_log_pow(const BigInt& x, const BigInt& base,
                             unsigned stride) {
  if (x < 1 || base < 2 || stride == 0)
    throw invalid_input("ceil_log_pow: need x >= 1, base >= 2, stride >= 1");
  const BigInt step = pow_big(base, stride);
  BigInt acc = 1;
  unsigned t = 0;
  while (acc < x) {
    acc *= step;
    ++t;
  }
  return t;
}

}  // namespace sepgen
