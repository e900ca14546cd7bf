#pragma once

// Discrete domain on the unit square with homogeneous Dirichlet data.
// Only interior points are stored; boundary values are implicitly zero.

#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace pddrm {

/// Raised when two grid objects of different size are combined.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised for invalid user-supplied configuration (exit code 3 at the CLI).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class GridSpec {
 public:
  explicit GridSpec(std::size_t n_interior = 64);

  std::size_t n() const noexcept { return n_; }
  std::size_t size() const noexcept { return n_ * n_; }
  double h() const noexcept { return 1.0 / static_cast<double>(n_ + 1); }
  /// Coordinate of interior index i (0-based), i.e. (i+1)·h.
  double coord(std::size_t i) const noexcept { return static_cast<double>(i + 1) * h(); }

  friend bool operator==(const GridSpec&, const GridSpec&) = default;

 private:
  std::size_t n_;
};

/// Real field sampled on the interior grid, value(i, j) = g(x_{i+1}, y_{j+1}).
class ScalarField {
 public:
  /// Throws DimensionError on a size mismatch and std::invalid_argument on
  /// non-finite values.
  ScalarField(GridSpec grid, std::vector<double> values);

  static ScalarField zeros(GridSpec grid);
  static ScalarField sample(GridSpec grid, const std::function<double(double, double)>& g);

  const GridSpec& grid() const noexcept { return grid_; }
  std::size_t n() const noexcept { return grid_.n(); }
  std::span<const double> values() const noexcept { return values_; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return values_[i * n() + j]; }

  friend bool operator==(const ScalarField&, const ScalarField&) = default;

 private:
  GridSpec grid_;
  std::vector<double> values_;
};

ScalarField zero_field(GridSpec grid);

/// Elementwise a·x + b·y.
ScalarField combine(double a, const ScalarField& x, double b, const ScalarField& y);
/// x + c everywhere.
ScalarField shifted(const ScalarField& x, double c);

enum class Provenance { Type1, Type2, Type3, Type4, Type5, Type6, NeuralNet, External };

std::string_view to_string(Provenance p);
Provenance provenance_from_string(std::string_view s);

struct PairSample {
  PairSample(ScalarField f_, ScalarField u_, Provenance provenance_);

  ScalarField f;
  ScalarField u;
  Provenance provenance;
};

enum class Method {
  DryForward,
  DryInverse,
  DdrmForward,
  DdrmInverse,
  FdForward,
  FdInverse,
  SpectralForward,
  SpectralInverse,
};

std::string_view to_string(Method m);

struct EvalRecord {
  Method method;
  double mae;
  std::size_t sample_count;
  /// Per-sample MAE, in input order.
  std::vector<double> per_sample;
};

enum class Channel : unsigned char { U = 0, F = 1 };

std::string_view to_string(Channel c);

/// Mean absolute error over the N² interior points.
double mae(const ScalarField& a, const ScalarField& b);

/// Mean over samples of per-sample MAE against the chosen target channel.
EvalRecord eval_batch(Method method, std::span<const PairSample> pairs,
                      std::span<const ScalarField> predictions, Channel target);

}  // namespace pddrm
