#pragma once

#include <cstdint>
#include <string_view>

namespace cpsep {

// Counter-based seeded PRNG (splitmix64 core) with explicit sub-stream
// derivation. Identical (seed, stream_id) pairs reproduce identical draws
// across runs; distinct stream ids give independent-quality streams, which
// is what makes parallel Monte Carlo trials reproducible.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed, std::uint64_t stream_id = 0);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  std::uint64_t next_u64();

  /// Uniform double in [0, 1) with 53 random bits.
  double next_double();

  /// Unbiased uniform integer in [0, bound). bound must be > 0.
  std::uint64_t next_below(std::uint64_t bound);

  /// Standard normal via Box-Muller (second value cached).
  double next_gaussian();

  /// Derive an independent stream from this one's identity and a label.
  RandomStream substream(std::uint64_t label) const;

  /// Stream label from an experiment name and a trial index.
  static std::uint64_t label_of(std::string_view name, std::uint64_t index);

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t state_;
  double cached_gaussian_ = 0.0;
  bool has_cached_gaussian_ = false;
};

}  // namespace cpsep
