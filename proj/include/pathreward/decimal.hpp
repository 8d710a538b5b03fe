/*
 * Copyright 2026 The pathreward Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <charconv>
#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace pathreward {

/// Exact decimal stored as an integer count of thousandths.
///
/// Reward weights and judge score grids are short decimal fractions
/// (0.05, 0.1, 0.3, 1.2, ...). Keeping them as scaled integers means
/// equality against grid values and config round-trips are exact; the
/// value only becomes a double inside arithmetic.
class Decimal {
 public:
  static constexpr std::int64_t kScale = 1000;

  constexpr Decimal() = default;

  static constexpr Decimal from_milli(std::int64_t milli) {
    Decimal d;
    d.milli_ = milli;
    return d;
  }

  /// Parses "0.3", "-1", "1.25", ".5". At most three fractional digits.
  static Decimal parse(std::string_view text) {
    auto fail = [&](const char* why) {
      return std::invalid_argument("invalid decimal '" + std::string(text) + "': " + why);
    };
    if (text.empty()) throw fail("empty");
    bool negative = false;
    std::size_t pos = 0;
    if (text[pos] == '-' || text[pos] == '+') {
      negative = text[pos] == '-';
      ++pos;
    }
    std::int64_t whole = 0;
    std::size_t int_digits = 0;
    while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') {
      whole = whole * 10 + (text[pos] - '0');
      if (whole > 1'000'000'000'000LL) throw fail("out of range");
      ++pos;
      ++int_digits;
    }
    std::int64_t frac = 0;
    std::size_t frac_digits = 0;
    if (pos < text.size() && text[pos] == '.') {
      ++pos;
      while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') {
        if (frac_digits == 3) {
          if (text[pos] != '0') throw fail("more than three fractional digits");
        } else {
          frac = frac * 10 + (text[pos] - '0');
          ++frac_digits;
        }
        ++pos;
      }
    }
    if (pos != text.size()) throw fail("unexpected character");
    if (int_digits == 0 && frac_digits == 0) throw fail("no digits");
    for (std::size_t i = frac_digits; i < 3; ++i) frac *= 10;
    std::int64_t milli = whole * kScale + frac;
    return from_milli(negative ? -milli : milli);
  }

  /// Nearest thousandth; used when a judge emits a JSON float.
  static Decimal from_double(double value) {
    double scaled = value * static_cast<double>(kScale);
    return from_milli(static_cast<std::int64_t>(scaled >= 0 ? scaled + 0.5 : scaled - 0.5));
  }

  constexpr std::int64_t milli() const { return milli_; }
  constexpr double to_double() const { return static_cast<double>(milli_) / kScale; }

  /// Shortest decimal form: "0.1", "1.2", "0.05", "3".
  std::string to_string() const {
    std::int64_t abs = milli_ < 0 ? -milli_ : milli_;
    std::string out = milli_ < 0 ? "-" : "";
    out += std::to_string(abs / kScale);
    std::int64_t frac = abs % kScale;
    if (frac != 0) {
      std::string digits = std::to_string(frac);
      digits.insert(0, 3 - digits.size(), '0');
      while (!digits.empty() && digits.back() == '0') digits.pop_back();
      out += "." + digits;
    }
    return out;
  }

  constexpr auto operator<=>(const Decimal&) const = default;

 private:
  std::int64_t milli_ = 0;
};

namespace literals {
constexpr Decimal operator""_milli(unsigned long long v) {
  return Decimal::from_milli(static_cast<std::int64_t>(v));
}
}  // namespace literals

}  // namespace pathreward
