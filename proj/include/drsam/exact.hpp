#pragma once

// Exact comparison of count ratios against user-supplied fractional
// thresholds. A threshold double is read as the decimal it prints as
// (0.7 -> 7/10), so "support > 0.7" means exactly "count/total > 7/10".

#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <string>

#include "drsam/error.hpp"

namespace drsam {

struct DecimalFraction {
  std::uint64_t num = 0;
  std::uint64_t den = 1;  // a power of ten
};

inline constexpr int kMaxThresholdDecimals = 18;

inline DecimalFraction to_decimal_fraction(double v) {
  if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
    throw ValidationError("threshold " + std::to_string(v) + " is not a fraction in [0,1]");
  }
  std::array<char, 400> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::fixed);
  if (ec != std::errc{}) throw ValidationError("threshold cannot be rendered as a decimal");
  DecimalFraction f;
  int decimals = -1;
  for (const char* p = buf.data(); p != end; ++p) {
    if (*p == '.') {
      decimals = 0;
      continue;
    }
    if (decimals >= 0 && ++decimals > kMaxThresholdDecimals) {
      throw ValidationError("threshold " + std::string(buf.data(), end) + " needs more than " +
                            std::to_string(kMaxThresholdDecimals) + " decimal places");
    }
    f.num = f.num * 10 + static_cast<std::uint64_t>(*p - '0');
  }
  for (int i = 0; i < decimals; ++i) f.den *= 10;
  return f;
}

// count/total > threshold, evaluated without rounding. total must be > 0.
inline bool ratio_exceeds(std::uint64_t count, std::uint64_t total, const DecimalFraction& threshold) {
  using wide = unsigned __int128;
  return static_cast<wide>(count) * threshold.den > static_cast<wide>(threshold.num) * total;
}

// count/total >= threshold.
inline bool ratio_reaches(std::uint64_t count, std::uint64_t total, const DecimalFraction& threshold) {
  using wide = unsigned __int128;
  return static_cast<wide>(count) * threshold.den >= static_cast<wide>(threshold.num) * total;
}

}  // namespace drsam
