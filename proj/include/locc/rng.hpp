#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <random>

namespace locc {

namespace detail {

// Philox4x32-10 block function (Salmon et al., Random123).
inline std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> ctr,
                                                  std::array<std::uint32_t, 2> key) noexcept {
  constexpr std::uint32_t kMul0 = 0xD2511F53u;
  constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = std::uint64_t{kMul0} * ctr[0];
    const std::uint64_t p1 = std::uint64_t{kMul1} * ctr[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kWeyl0;
    key[1] += kWeyl1;
  }
  return ctr;
}

// SplitMix64 finalizer; used to derive substream ids.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace detail

/// Tags that keep the stream ids of different sampling purposes apart.
enum class StreamPurpose : std::uint64_t {
  kStates = 1,
  kPairs = 2,
  kCandidates = 3,
  kTheorem1 = 4,
  kDimension = 5,
};

/// Counter-based random stream.
///
/// The Philox key is the 64-bit seed and the upper half of the 128-bit
/// counter is the stream id, so every (seed, stream_id) names an independent
/// sequence and any draw position is reachable without stepping through the
/// ones before it. Satisfies UniformRandomBitGenerator.
class RngStream {
 public:
  using result_type = std::uint64_t;

  RngStream(std::uint64_t seed, std::uint64_t stream_id) noexcept
      : seed_(seed), stream_id_(stream_id) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }
  [[nodiscard]] std::uint64_t stream_id() const noexcept { return stream_id_; }
  [[nodiscard]] std::uint64_t position() const noexcept { return position_; }

  result_type operator()() noexcept {
    const std::uint64_t block = position_ >> 1;
    if (block != cached_block_) {
      const std::array<std::uint32_t, 4> ctr{
          static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(block >> 32),
          static_cast<std::uint32_t>(stream_id_), static_cast<std::uint32_t>(stream_id_ >> 32)};
      const std::array<std::uint32_t, 2> key{static_cast<std::uint32_t>(seed_),
                                             static_cast<std::uint32_t>(seed_ >> 32)};
      buffer_ = detail::philox4x32_10(ctr, key);
      cached_block_ = block;
    }
    const std::size_t half = (position_ & 1u) * 2;
    ++position_;
    return (std::uint64_t{buffer_[half + 1]} << 32) | buffer_[half];
  }

  /// Jump to an absolute 64-bit draw index.
  void seek(std::uint64_t position) noexcept {
    position_ = position;
    normal_.reset();
  }

  /// Standard normal deviate G(0,1).
  double normal() { return normal_(*this); }

  /// Uniform deviate in [0, 1).
  double uniform() { return std::generate_canonical<double, 53>(*this); }

  /// Child stream with the same seed and a stream id derived from this one.
  [[nodiscard]] RngStream substream(StreamPurpose purpose, std::uint64_t index) const noexcept {
    const std::uint64_t tagged =
        detail::mix64(stream_id_ ^ detail::mix64(static_cast<std::uint64_t>(purpose)));
    return {seed_, detail::mix64(tagged ^ detail::mix64(index + 0x632BE59BD9B4E019ull))};
  }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t position_ = 0;
  std::uint64_t cached_block_ = std::numeric_limits<std::uint64_t>::max();
  std::array<std::uint32_t, 4> buffer_{};
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace locc
