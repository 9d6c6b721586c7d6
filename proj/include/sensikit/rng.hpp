#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string_view>

namespace sensikit {

/// 64-bit FNV-1a, used to turn readable purpose tags into stream coordinates.
constexpr std::uint64_t tag(std::string_view text) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const char c : text) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Coordinates of an independent random stream. Every (master seed, purpose,
/// replicate, matrix) tuple maps to its own generator state, so results never
/// depend on the order in which streams are consumed.
struct StreamId {
  std::uint64_t master_seed = 0;
  std::uint64_t purpose = 0;
  std::uint64_t replicate = 0;
  std::uint64_t matrix = 0;
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Mixes the four stream coordinates into one 64-bit seed.
std::uint64_t stream_key(const StreamId& id) noexcept;

/// Seeded generator for one stream. Uses mt19937_64, whose output sequence is
/// fixed by the standard, with hand-rolled conversions so draws are identical
/// across standard library implementations.
class RandomStream {
 public:
  explicit RandomStream(const StreamId& id) : id_(id), engine_(stream_key(id)) {}

  const StreamId& id() const noexcept { return id_; }

  std::uint64_t next() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, bound), bound >= 1, by rejection.
  std::size_t index_below(std::size_t bound);

 private:
  StreamId id_;
  std::mt19937_64 engine_;
};

}  // namespace sensikit
