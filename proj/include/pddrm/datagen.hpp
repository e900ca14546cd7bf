#pragma once

// Training/test distributions: closed-form analytical pairs (types 1-6) and
// random smooth pairs u = g_NN·x(1−x)y(1−y) whose Laplacian is computed
// exactly by second-order forward-mode propagation through the network.

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pddrm/grid.hpp"

namespace pddrm {

enum class AnalyticalKind { Type1 = 1, Type2, Type3, Type4, Type5, Type6 };

struct AnalyticalSpec {
  AnalyticalKind kind = AnalyticalKind::Type1;
  int n = 1;
  int k = 1;  // types 1-4
  int j = 1;  // types 2 and 4

  /// Throws ConfigError unless every parameter is ≥ 1.
  void validate() const;
};

/// Closed-form u and f = Δu of an analytical pair.
double analytical_u(const AnalyticalSpec& spec, double x, double y);
double analytical_f(const AnalyticalSpec& spec, double x, double y);

/// Types 1-4 sample a finite sine sum of modes up to n+j; this caps the
/// integer parameters at N/2 so every mode is resolved on the grid.
PairSample gen_analytical(const AnalyticalSpec& spec, GridSpec grid);

/// Value, gradient and Hessian of a scalar function at one point.
struct Jet2 {
  double value = 0.0;
  std::array<double, 2> grad{};
  std::array<std::array<double, 2>, 2> hess{};
};

/// Fully connected network R² → R. tanh on every layer except the last.
struct TanhNetSpec {
  struct Layer {
    std::size_t in = 0;
    std::size_t out = 0;
    std::vector<double> weight;  // out × in, row-major
    std::vector<double> bias;    // out
  };

  std::vector<Layer> layers;
  std::uint64_t seed = 0;

  /// Widths [2, w, w, w, 1]. Weights and biases of layer l are drawn from
  /// N(0, s²/fan_in) with s = input_scale for the first layer and 1 after.
  static TanhNetSpec random(std::uint64_t seed, std::size_t width = 32, double input_scale = 10.0);

  void validate() const;
};

Jet2 tanh_net_jet(const TanhNetSpec& spec, double x, double y);

/// Jets of the network at many points at once (value, ∂x, ∂y, ∂xx, ∂xy, ∂yy).
struct NetJets {
  std::vector<double> value, gx, gy, hxx, hxy, hyy;
};
NetJets tanh_net_jets(const TanhNetSpec& spec, std::span<const double> xs,
                      std::span<const double> ys);

/// u = g·b with b = x(1−x)y(1−y); f = bΔg + 2∇g·∇b + gΔb.
PairSample gen_nn_pair(const TanhNetSpec& spec, GridSpec grid);

/// Proportions over provenances; must sum to 1.
struct Mix {
  std::vector<std::pair<Provenance, double>> parts;

  /// Parses "nn", "type1", or "nn:0.5,type1:0.25,type5:0.25".
  static Mix parse(std::string_view text);
  std::string to_string() const;
  void validate() const;
};

struct DatasetOptions {
  std::size_t net_width = 32;
  double net_input_scale = 10.0;
  int max_param = 8;  // analytical integers drawn uniformly from {1..max_param}
  unsigned threads = 0;
};

/// Sample i depends only on (seed, i).
std::vector<PairSample> gen_dataset(std::size_t count, const Mix& mix, std::uint64_t seed,
                                    GridSpec grid, const DatasetOptions& opts = {});

/// The single sample gen_dataset would produce at `index`.
PairSample gen_dataset_sample(std::size_t index, const Mix& mix, std::uint64_t seed,
                              GridSpec grid, const DatasetOptions& opts = {});

}  // namespace pddrm
