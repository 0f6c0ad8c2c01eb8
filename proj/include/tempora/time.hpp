#ifndef TEMPORA_TIME_HPP
#define TEMPORA_TIME_HPP

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

namespace tempora {

/// Exact rational time. All temporal reasoning is done in this type; there is
/// no floating point anywhere on a scheduling path. A single positive
/// infinity is representable (den == 0) and is used for "unreachable" /
/// "no deadline" markers.
class Time {
public:
  Time() : num_(0), den_(1) {}
  Time(long long n) : num_(n), den_(1) {}

  static Time ratio(long long num, long long den) {
    if (den == 0)
      throw std::invalid_argument("Time::ratio: zero denominator");
    return make(static_cast<__int128>(num), static_cast<__int128>(den));
  }
  static Time infinity() {
    Time t;
    t.num_ = 1;
    t.den_ = 0;
    return t;
  }

  bool is_infinite() const { return den_ == 0; }
  long long num() const { return num_; }
  long long den() const { return den_; }

  friend Time operator+(const Time &a, const Time &b) {
    if (a.is_infinite() || b.is_infinite())
      return infinity();
    return make((__int128)a.num_ * b.den_ + (__int128)b.num_ * a.den_,
                (__int128)a.den_ * b.den_);
  }
  friend Time operator-(const Time &a, const Time &b) {
    if (b.is_infinite())
      throw std::domain_error("Time: subtracting infinity");
    if (a.is_infinite())
      return infinity();
    return make((__int128)a.num_ * b.den_ - (__int128)b.num_ * a.den_,
                (__int128)a.den_ * b.den_);
  }
  Time operator-() const {
    if (is_infinite())
      throw std::domain_error("Time: negating infinity");
    Time t;
    t.num_ = -num_;
    t.den_ = den_;
    return t;
  }
  Time &operator+=(const Time &b) { return *this = *this + b; }
  Time &operator-=(const Time &b) { return *this = *this - b; }

  friend Time operator/(const Time &a, long long k) {
    if (k <= 0)
      throw std::domain_error("Time: division by non-positive integer");
    return make(static_cast<__int128>(a.num_),
                static_cast<__int128>(a.den_) * k);
  }
  friend Time operator*(const Time &a, long long k) {
    if (a.is_infinite())
      return infinity();
    return make((__int128)a.num_ * k, (__int128)a.den_);
  }
  Time div(long long k) const {
    if (k == 0)
      throw std::domain_error("Time: division by zero");
    if (is_infinite())
      return infinity();
    return make((__int128)num_, (__int128)den_ * k);
  }

  friend bool operator==(const Time &a, const Time &b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend bool operator!=(const Time &a, const Time &b) { return !(a == b); }
  friend bool operator<(const Time &a, const Time &b) {
    if (a.is_infinite())
      return false;
    if (b.is_infinite())
      return true;
    return (__int128)a.num_ * b.den_ < (__int128)b.num_ * a.den_;
  }
  friend bool operator>(const Time &a, const Time &b) { return b < a; }
  friend bool operator<=(const Time &a, const Time &b) { return !(b < a); }
  friend bool operator>=(const Time &a, const Time &b) { return !(a < b); }

  /// Parses "12", "-3", "12.5", "3/4". Throws std::invalid_argument.
  static Time parse(const std::string &s);

  /// Decimal rendering with trailing zeros trimmed ("90", "12.5").
  /// Falls back to "num/den" if the denominator is not of form 2^a*5^b.
  std::string to_string() const;

  double to_double() const {
    if (is_infinite())
      return 1e300;
    return static_cast<double>(num_) / static_cast<double>(den_);
  }

private:
  static Time make(__int128 n, __int128 d);
  long long num_;
  long long den_; // > 0, or 0 for +infinity
};

inline Time min(const Time &a, const Time &b) { return a < b ? a : b; }
inline Time max(const Time &a, const Time &b) { return a < b ? b : a; }

/// A time window for a timed precondition. lo/hi bound the interval during
/// which the action may execute; hi_strict=true means the action must end
/// strictly before hi (translated at-start/at-end windows), hi_strict=false
/// allows ending exactly at hi (closed upper endpoint for over-all windows).
struct TimeWindow {
  Time lo;
  Time hi;
  bool lo_strict = false;
  bool hi_strict = false;

  bool operator==(const TimeWindow &o) const {
    return lo == o.lo && hi == o.hi && lo_strict == o.lo_strict &&
           hi_strict == o.hi_strict;
  }
  std::string to_string() const;
};

} // namespace tempora

#endif
