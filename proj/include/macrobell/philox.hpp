#pragma once

// Philox4x64-10 counter-based generator (Salmon, Moraes, Dror, Shaw, SC'11).
// A block is a pure function of (counter, key), so any stream position can be
// computed directly and every platform produces the same words.

#include <array>
#include <cstdint>

namespace macrobell {

class Philox4x64 {
 public:
  using Counter = std::array<std::uint64_t, 4>;
  using Key = std::array<std::uint64_t, 2>;

  static Counter block(Counter ctr, Key key) {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += kWeyl0;
        key[1] += kWeyl1;
      }
      ctr = single_round(ctr, key);
    }
    return ctr;
  }

  /// Maps a 64-bit word to a double in [0, 1) using its top 53 bits.
  static double to_unit(std::uint64_t word) { return static_cast<double>(word >> 11) * 0x1.0p-53; }

 private:
  static constexpr std::uint64_t kMul0 = 0xD2E7470EE14C6C93ULL;
  static constexpr std::uint64_t kMul1 = 0xCA5A826395121157ULL;
  static constexpr std::uint64_t kWeyl0 = 0x9E3779B97F4A7C15ULL;  // golden ratio
  static constexpr std::uint64_t kWeyl1 = 0xBB67AE8584CAA73BULL;  // sqrt(3) - 1

  static void mulhilo(std::uint64_t a, std::uint64_t b, std::uint64_t& hi, std::uint64_t& lo) {
    const unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
    hi = static_cast<std::uint64_t>(p >> 64);
    lo = static_cast<std::uint64_t>(p);
  }

  static Counter single_round(const Counter& c, const Key& k) {
    std::uint64_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, c[0], hi0, lo0);
    mulhilo(kMul1, c[2], hi1, lo1);
    return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
  }
};

}  // namespace macrobell
