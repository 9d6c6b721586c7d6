#include "sensikit/rng.hpp"

namespace sensikit {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t stream_key(const StreamId& id) noexcept {
  std::uint64_t h = splitmix64(id.master_seed);
  h = splitmix64(h ^ id.purpose);
  h = splitmix64(h ^ id.replicate);
  h = splitmix64(h ^ id.matrix);
  return h;
}

std::size_t RandomStream::index_below(std::size_t bound) {
  const std::uint64_t b = bound;
  // Largest multiple of b representable; draws above it are rejected.
  const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % b);
  std::uint64_t r = engine_();
  while (r >= limit) r = engine_();
  return static_cast<std::size_t>(r % b);
}

}  // namespace sensikit
