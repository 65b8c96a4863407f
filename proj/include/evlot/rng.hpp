#pragma once

// Counter-based random number generation (Philox4x64-10) plus the inverse/
// Box-Muller transforms used throughout the simulators. Counter-based streams
// keyed by (master seed, stream id) give bitwise-reproducible replications no
// matter how the caller schedules them.

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace evlot {

namespace detail {

inline void mulhilo64(std::uint64_t a, std::uint64_t b, std::uint64_t& hi, std::uint64_t& lo) {
  const unsigned __int128 prod = static_cast<unsigned __int128>(a) * b;
  hi = static_cast<std::uint64_t>(prod >> 64);
  lo = static_cast<std::uint64_t>(prod);
}

}  // namespace detail

/// Philox4x64 with 10 rounds. One block maps a 256-bit counter and a 128-bit
/// key to four 64-bit outputs; output order and counter increment match the
/// reference implementation (verified against frozen known-answer vectors).
struct Philox4x64 {
  static constexpr std::uint64_t kMult0 = 0xD2E7470EE14C6C93ull;
  static constexpr std::uint64_t kMult1 = 0xCA5A826395121157ull;
  static constexpr std::uint64_t kWeyl0 = 0x9E3779B97F4A7C15ull;
  static constexpr std::uint64_t kWeyl1 = 0xBB67AE8584CAA73Bull;

  static std::array<std::uint64_t, 4> block(std::array<std::uint64_t, 4> ctr,
                                            std::array<std::uint64_t, 2> key) {
    for (int round = 0;;) {
      std::uint64_t hi0, lo0, hi1, lo1;
      detail::mulhilo64(kMult0, ctr[0], hi0, lo0);
      detail::mulhilo64(kMult1, ctr[2], hi1, lo1);
      ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
      if (++round == 10) break;
      key[0] += kWeyl0;
      key[1] += kWeyl1;
    }
    return ctr;
  }
};

/// One reproducible random stream: key = (master seed, stream id), counter
/// starts at zero. Also provides the variate transforms the simulators use;
/// transforms are written out explicitly (not std::distributions) so that a
/// given stream yields the same variates on any standard library.
class RngStream {
 public:
  RngStream(std::uint64_t master_seed, std::uint64_t stream_id)
      : key_{master_seed, stream_id} {}

  std::uint64_t next_u64() {
    if (buf_pos_ == 4) {
      buf_ = Philox4x64::block(counter_, key_);
      buf_pos_ = 0;
      for (int i = 0; i < 4; ++i) {
        if (++counter_[i] != 0) break;  // 256-bit little-endian increment
      }
    }
    return buf_[buf_pos_++];
  }

  /// Uniform on [0,1) with 53 random bits.
  double u01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform on (0,1]; safe to pass to log().
  double u01_open_below() { return 1.0 - u01(); }

  double exponential(double rate) { return -std::log(u01_open_below()) / rate; }

  /// Standard normal via Box-Muller; the second variate of each pair is cached.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double r = std::sqrt(-2.0 * std::log(u01_open_below()));
    const double theta = 2.0 * std::numbers::pi * u01();
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

 private:
  std::array<std::uint64_t, 4> counter_{0, 0, 0, 0};
  std::array<std::uint64_t, 2> key_;
  std::array<std::uint64_t, 4> buf_{};
  int buf_pos_ = 4;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

/// SplitMix64 finalizer; used to derive sub-seeds for sweep points so that
/// every (seed, index) pair gets an unrelated master seed.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
  return mix64(mix64(seed ^ mix64(a)) ^ mix64(b));
}

}  // namespace evlot
