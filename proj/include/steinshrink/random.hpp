#pragma once

// Counter-based random streams for reproducible parallel Monte Carlo.
//
// A stream is identified by (master seed, stream index). Every stream is an
// independent Philox4x32-10 sequence: the master seed is the key and the
// stream index occupies the upper half of the 128-bit counter, so streams
// never overlap and can be created in any order on any thread.

#include <array>
#include <cstdint>
#include <limits>
#include <random>

namespace steinshrink {

/// Philox4x32-10 (Salmon et al., SC'11). Satisfies UniformRandomBitGenerator.
class Philox4x32 {
 public:
  using result_type = std::uint32_t;

  Philox4x32(std::uint64_t key, std::uint64_t counter_hi) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept;

  /// One block of the keyed bijection; exposed for known-answer tests.
  static std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> counter,
                                            std::array<std::uint32_t, 2> key) noexcept;

 private:
  void refill() noexcept;

  std::array<std::uint32_t, 2> key_;
  std::array<std::uint32_t, 4> counter_;
  std::array<std::uint32_t, 4> buffer_{};
  unsigned used_ = 4;
};

/// Source of standard normal variates for one replication.
class RandomStream {
 public:
  RandomStream(std::uint64_t master_seed, std::uint64_t stream_index) noexcept
      : engine_(master_seed, stream_index) {}

  double normal() { return normal_(engine_); }
  /// Uniform on [0, 1).
  double uniform() { return uniform_(engine_); }

 private:
  Philox4x32 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

}  // namespace steinshrink
