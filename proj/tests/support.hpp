#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "pddrm/grid.hpp"
#include "pddrm/rng.hpp"

namespace testing {

inline pddrm::ScalarField random_field(pddrm::GridSpec grid, std::uint64_t seed, double scale = 1.0) {
  pddrm::CounterRng rng(pddrm::stream_key(seed, 0x7e57));
  std::vector<double> v(grid.size());
  for (double& x : v) x = scale * (2.0 * rng.uniform() - 1.0);
  return pddrm::ScalarField(grid, std::move(v));
}

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::fabs(a[i] - b[i]));
  return m;
}

// Fresh scratch directory under the build tree, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    path_ = std::filesystem::temp_directory_path() /
            ("pddrm-test-" + tag + "-" + std::to_string(std::hash<std::string>{}(tag) ^ reinterpret_cast<std::uintptr_t>(this)));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() { std::filesystem::remove_all(path_); }
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace testing
