#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace bomber::montecarlo {

/// Philox4x32-10 keyed counter block cipher (Salmon et al. constants).
/// Pure function of (counter, key), so any (seed, stream, run, draw)
/// coordinate maps to the same bits regardless of execution order.
inline std::array<uint32_t, 4> philox4x32(std::array<uint32_t, 4> ctr,
                                          std::array<uint32_t, 2> key) {
  constexpr uint32_t M0 = 0xD2511F53u;
  constexpr uint32_t M1 = 0xCD9E8D57u;
  constexpr uint32_t W0 = 0x9E3779B9u;
  constexpr uint32_t W1 = 0xBB67AE85u;
  for (int round = 0; round < 10; ++round) {
    const uint64_t p0 = static_cast<uint64_t>(M0) * ctr[0];
    const uint64_t p1 = static_cast<uint64_t>(M1) * ctr[2];
    const uint32_t hi0 = static_cast<uint32_t>(p0 >> 32);
    const uint32_t lo0 = static_cast<uint32_t>(p0);
    const uint32_t hi1 = static_cast<uint32_t>(p1 >> 32);
    const uint32_t lo1 = static_cast<uint32_t>(p1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += W0;
    key[1] += W1;
  }
  return ctr;
}

/// Counter-based stream keyed by (seed, stream, run). Each mission gets its
/// own stream object; draws advance a 32-bit block counter.
class RngStream {
public:
  RngStream(uint64_t seed, uint64_t stream, uint64_t run)
      : key_{static_cast<uint32_t>(seed), static_cast<uint32_t>(seed >> 32)},
        stream_(static_cast<uint32_t>(stream)),
        run_lo_(static_cast<uint32_t>(run)),
        run_hi_(static_cast<uint32_t>(run >> 32)) {}

  /// Uniform draw in [0, 1).
  double next_unit() {
    if (!have_buffered_) {
      const auto block = philox4x32({draw_++, stream_, run_lo_, run_hi_}, key_);
      buffered_ = (static_cast<uint64_t>(block[2]) << 32) | block[3];
      have_buffered_ = true;
      return to_unit((static_cast<uint64_t>(block[0]) << 32) | block[1]);
    }
    have_buffered_ = false;
    return to_unit(buffered_);
  }

  /// Exponential(1) draw; never returns inf (argument of log1p is > -1).
  double next_exponential() { return -std::log1p(-next_unit()); }

private:
  static double to_unit(uint64_t bits) { return (bits >> 11) * 0x1.0p-53; }

  std::array<uint32_t, 2> key_;
  uint32_t stream_;
  uint32_t run_lo_;
  uint32_t run_hi_;
  uint32_t draw_ = 0;
  uint64_t buffered_ = 0;
  bool have_buffered_ = false;
};

}  // namespace bomber::montecarlo
