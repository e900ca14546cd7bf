#include "pddrm/rng.hpp"

#include <cmath>
#include <numbers>

namespace pddrm {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t stream_key(std::uint64_t seed, std::uint64_t a, std::uint64_t b,
                         std::uint64_t c) noexcept {
  std::uint64_t k = splitmix64(seed);
  k = splitmix64(k ^ (a + 0x632be59bd9b4e019ULL));
  k = splitmix64(k ^ (b + 0x8cb92ba72f3d8dd7ULL));
  k = splitmix64(k ^ (c + 0xd6e8feb86659fd93ULL));
  return k;
}

std::uint64_t CounterRng::next_u64() noexcept {
  return splitmix64(key_ ^ splitmix64(counter_++));
}

double CounterRng::uniform() noexcept {
  // 53 random bits, shifted by half an ulp so 0 is never produced.
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

std::uint64_t CounterRng::uniform_int(std::uint64_t lo, std::uint64_t hi) noexcept {
  const std::uint64_t span = hi - lo + 1;
  if (span == 0) return next_u64();
  // Rejection keeps the distribution exactly uniform.
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
  std::uint64_t r;
  do r = next_u64();
  while (r >= limit);
  return lo + r % span;
}

double CounterRng::normal() noexcept {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(theta);
  has_spare_ = true;
  return r * std::cos(theta);
}

}  // namespace pddrm
