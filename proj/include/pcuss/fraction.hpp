#pragma once

#include <compare>
#include <cstdint>
#include <numeric>
#include <string>

namespace pcuss {

// Non-negative exact rational used for certified distances and fractions.
struct Fraction {
  std::uint64_t num = 0;
  std::uint64_t den = 1;

  constexpr Fraction() = default;
  constexpr Fraction(std::uint64_t n, std::uint64_t d) : num(n), den(d) {
    const std::uint64_t g = std::gcd(num, den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
  }

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  std::string to_string() const { return std::to_string(num) + "/" + std::to_string(den); }

  friend constexpr bool operator==(const Fraction& a, const Fraction& b) {
    return a.num == b.num && a.den == b.den;
  }
  friend constexpr std::strong_ordering operator<=>(const Fraction& a, const Fraction& b) {
    const unsigned __int128 l = static_cast<unsigned __int128>(a.num) * b.den;
    const unsigned __int128 r = static_cast<unsigned __int128>(b.num) * a.den;
    return l <=> r;
  }
};

}  // namespace pcuss
