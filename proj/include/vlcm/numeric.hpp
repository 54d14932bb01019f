#pragma once

#include <bit>
#include <cctype>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "vlcm/errors.hpp"

namespace vlcm {

using BigUint = boost::multiprecision::cpp_int;

inline unsigned bit_length(const BigUint& v) {
  if (v == 0) return 0;
  return static_cast<unsigned>(boost::multiprecision::msb(v)) + 1;
}

// A positive constant as parsed from hex input.  bit_width is derived from
// the value, not from the number of digits supplied.
struct LargeConstant {
  BigUint value;
  unsigned bit_width = 0;
  std::string source_hex;  // canonical: lowercase, no prefix, no leading zeros
};

inline LargeConstant parse_hex(std::string_view text) {
  if (text.empty()) throw ParseError("empty hex constant");
  std::size_t pos = 0;
  if (text.size() >= 2 && text[0] == '0' && (text[1] == 'x' || text[1] == 'X'))
    pos = 2;
  if (pos == text.size()) throw ParseError("empty hex constant");
  BigUint value = 0;
  for (std::size_t i = pos; i < text.size(); ++i) {
    char ch = text[i];
    int digit;
    if (ch >= '0' && ch <= '9') digit = ch - '0';
    else if (ch >= 'a' && ch <= 'f') digit = ch - 'a' + 10;
    else if (ch >= 'A' && ch <= 'F') digit = ch - 'A' + 10;
    else throw ParseError("invalid hex digit at position " + std::to_string(i));
    value = (value << 4) | digit;
  }
  if (value == 0) throw ParseError("constant must be nonzero");
  LargeConstant lc;
  lc.bit_width = bit_length(value);
  lc.source_hex = value.str(0, std::ios_base::hex);
  for (char& c : lc.source_hex) c = static_cast<char>(std::tolower(c));
  lc.value = std::move(value);
  return lc;
}

// Canonical signed digit form, least significant digit first.
struct CsdForm {
  std::vector<int8_t> digits;  // each in {-1, 0, +1}, no two adjacent nonzero
  unsigned nonzero_count = 0;

  BigUint value() const {
    BigUint acc = 0;
    for (std::size_t i = digits.size(); i-- > 0;) {
      acc <<= 1;
      acc += digits[i];
    }
    return acc;
  }
};

// Carry-propagating recoding: runs 011..1 become 10..0(-1).
inline CsdForm to_csd(const BigUint& c) {
  if (c <= 0) throw ParseError("CSD requires a positive value");
  CsdForm out;
  BigUint rest = c;
  while (rest != 0) {
    if (boost::multiprecision::bit_test(rest, 0)) {
      // rest mod 4 == 3 -> digit -1 with carry, else +1
      int digit = (boost::multiprecision::bit_test(rest, 1)) ? -1 : 1;
      out.digits.push_back(static_cast<int8_t>(digit));
      out.nonzero_count++;
      rest -= digit;
    } else {
      out.digits.push_back(0);
    }
    rest >>= 1;
  }
  while (!out.digits.empty() && out.digits.back() == 0) out.digits.pop_back();
  return out;
}

// Nonzero CSD digit count of a word-sized value: popcount(x ^ 3x).
inline unsigned csd_nonzeros(std::uint64_t x) {
  // 3x can overflow 64 bits for x >= 2^62; values here are << 2^32
  return static_cast<unsigned>(std::popcount(x ^ (3 * x)));
}

inline unsigned ceil_log2(std::uint64_t n) {
  unsigned s = 0;
  while ((std::uint64_t{1} << s) < n) ++s;
  return s;
}

// Minimum adder-steps of a single constant: ceil(log2 NZ(c)).
inline unsigned min_adder_steps(const BigUint& c) {
  return ceil_log2(to_csd(c).nonzero_count);
}

inline unsigned min_adder_steps_set(std::span<const BigUint> constants) {
  unsigned best = 0;
  for (const BigUint& c : constants) best = std::max(best, min_adder_steps(c));
  return best;
}

}  // namespace vlcm
