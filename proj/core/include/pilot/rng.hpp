#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace pilot {

// Philox4x32-10 block function (Salmon et al., SC'11). Exposed for the
// known-answer tests; simulation code should go through RngStream.
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter,
                                           std::array<std::uint32_t, 2> key);

// Counter-based random stream identified by (seed, substream). The n-th
// output of a stream is a pure function of (seed, substream, n), so a
// replicate's draws do not depend on which thread runs it or in what order.
//
// Satisfies UniformRandomBitGenerator.
class RngStream {
 public:
  using result_type = std::uint64_t;

  RngStream(std::uint64_t seed, std::uint64_t substream) noexcept;

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t substream() const noexcept { return substream_; }

  std::uint32_t next_u32() noexcept;
  std::uint64_t next_u64() noexcept;

  // Uniform on the open interval (0, 1) with 53 bits of resolution.
  double uniform() noexcept;

  // Child stream with the same substream id and a key derived from
  // (seed, tag). Distinct tags give statistically independent streams.
  RngStream derive(std::uint64_t tag) const noexcept;

  result_type operator()() noexcept { return next_u64(); }
  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

 private:
  void refill() noexcept;

  std::uint64_t seed_;
  std::uint64_t substream_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  int used_ = 4;
};

// SplitMix64 finalizer; used to derive seeds from (seed, tag) pairs.
std::uint64_t mix64(std::uint64_t x) noexcept;

// Seed for an independent run keyed by `tag` (e.g. a sample size in a sweep).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) noexcept;

}  // namespace pilot
