#include "pddrm/grid.hpp"

#include <cmath>
#include <numeric>

#include "pddrm/simd/kernels.hpp"

namespace pddrm {

GridSpec::GridSpec(std::size_t n_interior) : n_(n_interior) {
  if (n_interior < 2) throw ConfigError("grid needs at least 2 interior points per axis");
}

ScalarField::ScalarField(GridSpec grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size())
    throw DimensionError("field has " + std::to_string(values_.size()) + " values, grid needs " +
                         std::to_string(grid_.size()));
  for (double v : values_)
    if (!std::isfinite(v)) throw std::invalid_argument("field contains a non-finite value");
}

ScalarField ScalarField::zeros(GridSpec grid) {
  return ScalarField(grid, std::vector<double>(grid.size(), 0.0));
}

ScalarField ScalarField::sample(GridSpec grid, const std::function<double(double, double)>& g) {
  const std::size_t n = grid.n();
  std::vector<double> v(grid.size());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) v[i * n + j] = g(grid.coord(i), grid.coord(j));
  return ScalarField(grid, std::move(v));
}

ScalarField zero_field(GridSpec grid) { return ScalarField::zeros(grid); }

ScalarField combine(double a, const ScalarField& x, double b, const ScalarField& y) {
  if (x.grid() != y.grid()) throw DimensionError("combine: grid mismatch");
  std::vector<double> v(x.grid().size());
  auto xv = x.values();
  auto yv = y.values();
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = a * xv[i] + b * yv[i];
  return ScalarField(x.grid(), std::move(v));
}

ScalarField shifted(const ScalarField& x, double c) {
  std::vector<double> v(x.values().begin(), x.values().end());
  for (double& e : v) e += c;
  return ScalarField(x.grid(), std::move(v));
}

std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::Type1: return "type1";
    case Provenance::Type2: return "type2";
    case Provenance::Type3: return "type3";
    case Provenance::Type4: return "type4";
    case Provenance::Type5: return "type5";
    case Provenance::Type6: return "type6";
    case Provenance::NeuralNet: return "nn";
    case Provenance::External: return "external";
  }
  return "unknown";
}

Provenance provenance_from_string(std::string_view s) {
  for (auto p : {Provenance::Type1, Provenance::Type2, Provenance::Type3, Provenance::Type4,
                 Provenance::Type5, Provenance::Type6, Provenance::NeuralNet,
                 Provenance::External})
    if (to_string(p) == s) return p;
  throw ConfigError("unknown provenance '" + std::string(s) + "'");
}

PairSample::PairSample(ScalarField f_, ScalarField u_, Provenance provenance_)
    : f(std::move(f_)), u(std::move(u_)), provenance(provenance_) {
  if (f.grid() != u.grid()) throw DimensionError("pair: f and u live on different grids");
}

std::string_view to_string(Method m) {
  switch (m) {
    case Method::DryForward: return "dry-forward";
    case Method::DryInverse: return "dry-inverse";
    case Method::DdrmForward: return "ddrm-forward";
    case Method::DdrmInverse: return "ddrm-inverse";
    case Method::FdForward: return "fd-forward";
    case Method::FdInverse: return "fd-inverse";
    case Method::SpectralForward: return "spectral-forward";
    case Method::SpectralInverse: return "spectral-inverse";
  }
  return "unknown";
}

std::string_view to_string(Channel c) { return c == Channel::U ? "u" : "f"; }

double mae(const ScalarField& a, const ScalarField& b) {
  if (a.grid() != b.grid())
    throw DimensionError("mae: grid mismatch (" + std::to_string(a.n()) + " vs " +
                         std::to_string(b.n()) + ")");
  return simd::abs_diff_sum(a.values(), b.values()) / static_cast<double>(a.grid().size());
}

EvalRecord eval_batch(Method method, std::span<const PairSample> pairs,
                      std::span<const ScalarField> predictions, Channel target) {
  if (pairs.empty()) throw ConfigError("eval_batch: empty batch");
  if (pairs.size() != predictions.size())
    throw DimensionError("eval_batch: " + std::to_string(pairs.size()) + " pairs but " +
                         std::to_string(predictions.size()) + " predictions");
  EvalRecord rec{method, 0.0, pairs.size(), {}};
  rec.per_sample.reserve(pairs.size());
  for (std::size_t s = 0; s < pairs.size(); ++s) {
    const ScalarField& truth = target == Channel::U ? pairs[s].u : pairs[s].f;
    rec.per_sample.push_back(mae(predictions[s], truth));
  }
  rec.mae = std::accumulate(rec.per_sample.begin(), rec.per_sample.end(), 0.0) /
            static_cast<double>(pairs.size());
  return rec;
}

}  // namespace pddrm
