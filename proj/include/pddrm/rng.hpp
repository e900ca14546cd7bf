#pragma once

// Counter-based random streams. A stream is named by a key (seed plus up to
// three integer coordinates such as sample index, step and mode) and the
// i-th draw of a stream depends only on (key, i). Results therefore never
// depend on iteration order or thread scheduling.

#include <cstdint>

namespace pddrm {

std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Mixes a seed with stream coordinates into a 64-bit stream key.
std::uint64_t stream_key(std::uint64_t seed, std::uint64_t a = 0, std::uint64_t b = 0,
                         std::uint64_t c = 0) noexcept;

class CounterRng {
 public:
  explicit CounterRng(std::uint64_t key) noexcept : key_(key) {}

  std::uint64_t next_u64() noexcept;
  /// Uniform on the open interval (0, 1).
  double uniform() noexcept;
  /// Uniform integer on [lo, hi].
  std::uint64_t uniform_int(std::uint64_t lo, std::uint64_t hi) noexcept;
  /// Standard normal via Box-Muller (both outputs are used).
  double normal() noexcept;
  double normal(double mean, double stddev) noexcept { return mean + stddev * normal(); }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace pddrm
