#pragma once

#include <cstdint>

#include "vlcm/numeric.hpp"

namespace vlcm {

// splitmix64: stable across platforms, used wherever output must be
// byte-reproducible for a given seed.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // uniform in [0, 2^bits), assembled 64 bits at a time
  BigUint next_bits(unsigned bits) {
    BigUint v = 0;
    for (unsigned got = 0; got < bits; got += 64) {
      v <<= 64;
      v |= next();
    }
    unsigned excess = ((bits + 63) / 64) * 64 - bits;
    return v >> excess;
  }

  // odd k-bit integer with the top bit forced to 1
  BigUint next_odd_constant(unsigned bits) {
    BigUint v = next_bits(bits);
    boost::multiprecision::bit_set(v, bits - 1);
    boost::multiprecision::bit_set(v, 0);
    return v;
  }

 private:
  std::uint64_t state_;
};

}  // namespace vlcm
