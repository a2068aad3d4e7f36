#pragma once

#include <compare>
#include <cstdint>
#include <cstdlib>
#include <string>

namespace concordance {

/// A nonnegative-or-signed multiple of 1/2, stored as a count of halves so that
/// tie-split preference counts stay exact.
class HalfCount {
 public:
  constexpr HalfCount() = default;

  static constexpr HalfCount from_halves(std::int64_t halves) { return HalfCount(halves); }
  static constexpr HalfCount whole(std::int64_t units) { return HalfCount(2 * units); }

  constexpr std::int64_t halves() const { return halves_; }
  constexpr bool is_integer() const { return halves_ % 2 == 0; }
  constexpr double value() const { return static_cast<double>(halves_) / 2.0; }

  constexpr HalfCount& operator+=(HalfCount o) {
    halves_ += o.halves_;
    return *this;
  }
  constexpr HalfCount& operator-=(HalfCount o) {
    halves_ -= o.halves_;
    return *this;
  }
  friend constexpr HalfCount operator+(HalfCount a, HalfCount b) { return a += b; }
  friend constexpr HalfCount operator-(HalfCount a, HalfCount b) { return a -= b; }
  friend constexpr auto operator<=>(HalfCount, HalfCount) = default;

  /// "20", "21.5", "-3.5"
  std::string to_string() const {
    std::string out = std::to_string(halves_ / 2);
    if (halves_ < 0 && halves_ > -2) out = "-" + out;
    if (!is_integer()) out += ".5";
    return out;
  }

 private:
  constexpr explicit HalfCount(std::int64_t halves) : halves_(halves) {}

  std::int64_t halves_ = 0;
};

}  // namespace concordance
