#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace hestonwlse {

// Philox4x32-10 counter-based generator. The 64-bit seed is the key and the
// 64-bit stream id occupies the upper half of the counter, so every
// (seed, stream) pair is an independent, reproducible sequence of 2^64
// blocks with no state shared between streams.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  CounterRng(std::uint64_t seed, std::uint64_t stream) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept;

  // Uniform on the open interval (0, 1), 53 random bits.
  double uniform() noexcept;

  // The raw 4x32 block for a given counter; exposed for known-answer tests.
  static std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> counter,
                                            std::array<std::uint32_t, 2> key) noexcept;

 private:
  void refill() noexcept;

  std::array<std::uint32_t, 2> key_;
  std::array<std::uint32_t, 4> counter_;
  std::array<std::uint32_t, 4> buffer_{};
  int next_ = 4;
};

// Stream ids used by the path simulator: volatility and log-price draws
// never share a stream, so the X path is unaffected by how Y is generated.
inline std::uint64_t volatility_stream(std::uint64_t path_index) { return 2 * path_index; }
inline std::uint64_t price_stream(std::uint64_t path_index) { return 2 * path_index + 1; }

}  // namespace hestonwlse
