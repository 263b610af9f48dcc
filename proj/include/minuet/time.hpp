#pragma once

#include <charconv>
#include <cmath>
#include <compare>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace minuet {

// Simulation time in integer microseconds. Every timestamp, delay draw and
// deadline is an exact multiple of 1 us, so sums of per-hop delays equal the
// end-to-end delay bit for bit and log round trips are lossless.
class SimTime {
 public:
  using rep = std::int64_t;

  constexpr SimTime() = default;

  static constexpr SimTime micros(rep us) { return SimTime{us}; }

  static SimTime seconds(double s) {
    if (!std::isfinite(s)) {
      throw std::invalid_argument("time value must be finite");
    }
    return SimTime{static_cast<rep>(std::llround(s * 1e6))};
  }

  static constexpr SimTime max() {
    return SimTime{std::numeric_limits<rep>::max()};
  }

  constexpr rep us() const { return us_; }
  constexpr double sec() const { return static_cast<double>(us_) * 1e-6; }

  constexpr SimTime& operator+=(SimTime o) {
    us_ += o.us_;
    return *this;
  }
  constexpr SimTime& operator-=(SimTime o) {
    us_ -= o.us_;
    return *this;
  }
  friend constexpr SimTime operator+(SimTime a, SimTime b) { return SimTime{a.us_ + b.us_}; }
  friend constexpr SimTime operator-(SimTime a, SimTime b) { return SimTime{a.us_ - b.us_}; }
  friend constexpr SimTime operator*(SimTime a, rep k) { return SimTime{a.us_ * k}; }
  friend constexpr auto operator<=>(SimTime, SimTime) = default;

 private:
  constexpr explicit SimTime(rep us) : us_(us) {}
  rep us_ = 0;
};

// Fixed-point decimal seconds with six fractional digits ("12.034000").
inline void append_seconds(std::string& out, SimTime t) {
  auto us = t.us();
  if (us < 0) {
    out.push_back('-');
    us = -us;
  }
  char buf[24];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, us / 1000000);
  out.append(buf, end);
  out.push_back('.');
  auto frac = us % 1000000;
  char digits[6];
  for (int i = 5; i >= 0; --i) {
    digits[i] = static_cast<char>('0' + frac % 10);
    frac /= 10;
  }
  out.append(digits, 6);
}

inline std::string format_seconds(SimTime t) {
  std::string s;
  append_seconds(s, t);
  return s;
}

}  // namespace minuet
