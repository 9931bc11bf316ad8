#include "cpsep/random_stream.hpp"

#include <cmath>
#include <numbers>

namespace cpsep {
namespace {

// splitmix64 finalizer; a strong 64-bit bijective mixer.
std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

}  // namespace

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id) {
  state_ = mix64(mix64(seed + kGolden) ^ mix64(stream_id + 0x6a09e667f3bcc909ULL));
}

std::uint64_t RandomStream::next_u64() {
  std::uint64_t z = (state_ += kGolden);
  return mix64(z);
}

double RandomStream::next_double() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::uint64_t RandomStream::next_below(std::uint64_t bound) {
  // Rejection keeps the draw exactly uniform.
  const std::uint64_t excess = (0 - bound) % bound;  // 2^64 mod bound
  std::uint64_t x;
  do {
    x = next_u64();
  } while (x < excess);
  return x % bound;
}

double RandomStream::next_gaussian() {
  if (has_cached_gaussian_) {
    has_cached_gaussian_ = false;
    return cached_gaussian_;
  }
  double u1;
  do {
    u1 = next_double();
  } while (u1 <= 0.0);
  const double u2 = next_double();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  cached_gaussian_ = r * std::sin(theta);
  has_cached_gaussian_ = true;
  return r * std::cos(theta);
}

RandomStream RandomStream::substream(std::uint64_t label) const {
  return RandomStream(seed_, mix64(stream_id_ + kGolden) ^ mix64(label));
}

std::uint64_t RandomStream::label_of(std::string_view name, std::uint64_t index) {
  // FNV-1a over the name, then mix in the index.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : name) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return mix64(h ^ mix64(index + kGolden));
}

}  // namespace cpsep
