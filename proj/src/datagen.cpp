#include "pddrm/datagen.hpp"

#include <charconv>
#include <cmath>
#include <numbers>
#include <optional>
#include <sstream>

#include "pddrm/parallel.hpp"
#include "pddrm/rng.hpp"
#include "pddrm/simd/kernels.hpp"

namespace pddrm {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr std::uint64_t kDatasetStream = 0x5044'4453;  // "PDDS"
constexpr std::uint64_t kNetStream = 0x4e45'5457;      // "NETW"

bool is_sine_sum(AnalyticalKind k) {
  return k == AnalyticalKind::Type1 || k == AnalyticalKind::Type2 ||
         k == AnalyticalKind::Type3 || k == AnalyticalKind::Type4;
}

Provenance provenance_of(AnalyticalKind k) {
  return static_cast<Provenance>(static_cast<int>(k) - 1);
}

}  // namespace

void AnalyticalSpec::validate() const {
  if (static_cast<int>(kind) < 1 || static_cast<int>(kind) > 6)
    throw ConfigError("unknown analytical pair kind");
  if (n < 1 || k < 1 || j < 1) throw ConfigError("analytical parameters must be >= 1");
}

double analytical_u(const AnalyticalSpec& s, double x, double y) {
  const double n = s.n, k = s.k, j = s.j;
  switch (s.kind) {
    case AnalyticalKind::Type1: return std::sin(n * kPi * x) * std::sin(k * kPi * y);
    case AnalyticalKind::Type2:
      return std::sin(n * kPi * x) * std::sin(k * kPi * y) * std::sin(j * kPi * x);
    case AnalyticalKind::Type3:
      return std::sin(n * kPi * x) * std::sin(k * kPi * y) * std::cos(n * kPi * x);
    case AnalyticalKind::Type4:
      return std::sin(n * kPi * x) * std::sin(k * kPi * y) * std::cos(j * kPi * x);
    case AnalyticalKind::Type5: return n * (x - 1) * x * (y - 1) * y * std::exp(x - y);
    case AnalyticalKind::Type6: return n * (x - 1) * x * (y - 1) * y * std::exp(y - x);
  }
  throw ConfigError("unknown analytical pair kind");
}

double analytical_f(const AnalyticalSpec& s, double x, double y) {
  const double n = s.n, k = s.k, j = s.j;
  const double pi2 = kPi * kPi;
  switch (s.kind) {
    case AnalyticalKind::Type1:
      return -pi2 * (n * n + k * k) * std::sin(n * kPi * x) * std::sin(k * kPi * y);
    case AnalyticalKind::Type2:
      return -pi2 *
             (-2 * j * n * std::cos(j * kPi * x) * std::cos(n * kPi * x) +
              (j * j + k * k + n * n) * std::sin(j * kPi * x) * std::sin(n * kPi * x)) *
             std::sin(k * kPi * y);
    case AnalyticalKind::Type3:
      return -0.5 * (k * k + 4 * n * n) * pi2 * std::sin(2 * n * kPi * x) * std::sin(k * kPi * y);
    case AnalyticalKind::Type4:
      return -pi2 *
             (2 * j * n * std::cos(n * kPi * x) * std::sin(j * kPi * x) +
              (j * j + k * k + n * n) * std::cos(j * kPi * x) * std::sin(n * kPi * x)) *
             std::sin(k * kPi * y);
    case AnalyticalKind::Type5:
      return 2 * std::exp(x - y) * n * x * (y - 1) * (2 + x * (y - 2) + y);
    case AnalyticalKind::Type6:
      return 2 * n * std::exp(y - x) * y * (x - 1) * (2 + x - 2 * y + x * y);
  }
  throw ConfigError("unknown analytical pair kind");
}

PairSample gen_analytical(const AnalyticalSpec& spec, GridSpec grid) {
  spec.validate();
  if (is_sine_sum(spec.kind)) {
    const int cap = static_cast<int>(grid.n() / 2);
    if (spec.n > cap || spec.k > cap || spec.j > cap)
      throw ConfigError("analytical parameters exceed N/2 = " + std::to_string(cap));
  }
  auto u = ScalarField::sample(grid, [&](double x, double y) { return analytical_u(spec, x, y); });
  auto f = ScalarField::sample(grid, [&](double x, double y) { return analytical_f(spec, x, y); });
  return PairSample(std::move(f), std::move(u), provenance_of(spec.kind));
}

TanhNetSpec TanhNetSpec::random(std::uint64_t seed, std::size_t width, double input_scale) {
  if (width < 1) throw ConfigError("network width must be >= 1");
  TanhNetSpec spec;
  spec.seed = seed;
  const std::array<std::size_t, 5> dims{2, width, width, width, 1};
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    Layer layer;
    layer.in = dims[l];
    layer.out = dims[l + 1];
    const double scale = l == 0 ? input_scale : 1.0;
    const double sd = scale / std::sqrt(static_cast<double>(layer.in));
    CounterRng rng(stream_key(seed, kNetStream, l));
    layer.weight.resize(layer.in * layer.out);
    for (double& w : layer.weight) w = rng.normal(0.0, sd);
    layer.bias.resize(layer.out);
    for (double& b : layer.bias) b = rng.normal(0.0, sd);
    spec.layers.push_back(std::move(layer));
  }
  return spec;
}

void TanhNetSpec::validate() const {
  if (layers.empty()) throw ConfigError("network has no layers");
  if (layers.front().in != 2) throw ConfigError("network input must be 2-D");
  if (layers.back().out != 1) throw ConfigError("network output must be scalar");
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const Layer& L = layers[l];
    if (L.weight.size() != L.in * L.out || L.bias.size() != L.out)
      throw ConfigError("layer " + std::to_string(l) + " has inconsistent shapes");
    if (l > 0 && layers[l - 1].out != L.in)
      throw ConfigError("layer " + std::to_string(l) + " input width mismatch");
  }
}

Jet2 tanh_net_jet(const TanhNetSpec& spec, double x, double y) {
  spec.validate();
  // Per unit: value, ∂x, ∂y, ∂xx, ∂xy, ∂yy.
  struct J {
    double v, gx, gy, hxx, hxy, hyy;
  };
  std::vector<J> cur{{x, 1, 0, 0, 0, 0}, {y, 0, 1, 0, 0, 0}};
  for (std::size_t l = 0; l < spec.layers.size(); ++l) {
    const auto& L = spec.layers[l];
    const bool activate = l + 1 < spec.layers.size();
    std::vector<J> next(L.out);
    for (std::size_t r = 0; r < L.out; ++r) {
      J z{L.bias[r], 0, 0, 0, 0, 0};
      for (std::size_t c = 0; c < L.in; ++c) {
        const double w = L.weight[r * L.in + c];
        z.v += w * cur[c].v;
        z.gx += w * cur[c].gx;
        z.gy += w * cur[c].gy;
        z.hxx += w * cur[c].hxx;
        z.hxy += w * cur[c].hxy;
        z.hyy += w * cur[c].hyy;
      }
      if (activate) {
        const double t = std::tanh(z.v);
        const double d1 = 1.0 - t * t;
        const double d2 = -2.0 * t * d1;
        z = {t,
             d1 * z.gx,
             d1 * z.gy,
             d1 * z.hxx + d2 * z.gx * z.gx,
             d1 * z.hxy + d2 * z.gx * z.gy,
             d1 * z.hyy + d2 * z.gy * z.gy};
      }
      next[r] = z;
    }
    cur = std::move(next);
  }
  Jet2 out;
  out.value = cur[0].v;
  out.grad = {cur[0].gx, cur[0].gy};
  out.hess = {{{cur[0].hxx, cur[0].hxy}, {cur[0].hxy, cur[0].hyy}}};
  return out;
}

NetJets tanh_net_jets(const TanhNetSpec& spec, std::span<const double> xs,
                      std::span<const double> ys) {
  spec.validate();
  if (xs.size() != ys.size()) throw DimensionError("tanh_net_jets: coordinate length mismatch");
  const std::size_t P = xs.size();
  const std::size_t cols = 6 * P;  // blocks: v | gx | gy | hxx | hxy | hyy

  std::vector<double> cur(2 * cols, 0.0);
  for (std::size_t p = 0; p < P; ++p) {
    cur[0 * cols + p] = xs[p];
    cur[1 * cols + p] = ys[p];
    cur[0 * cols + P + p] = 1.0;      // ∂x x
    cur[1 * cols + 2 * P + p] = 1.0;  // ∂y y
  }
  std::vector<double> next;
  for (std::size_t l = 0; l < spec.layers.size(); ++l) {
    const auto& L = spec.layers[l];
    next.assign(L.out * cols, 0.0);
    simd::gemm(L.weight, cur, next, L.out, L.in, cols);
    const bool activate = l + 1 < spec.layers.size();
    for (std::size_t r = 0; r < L.out; ++r) {
      double* row = next.data() + r * cols;
      double* v = row;
      double* gx = row + P;
      double* gy = row + 2 * P;
      double* hxx = row + 3 * P;
      double* hxy = row + 4 * P;
      double* hyy = row + 5 * P;
      const double b = L.bias[r];
      for (std::size_t p = 0; p < P; ++p) {
        v[p] += b;
        if (!activate) continue;
        const double t = std::tanh(v[p]);
        const double d1 = 1.0 - t * t;
        const double d2 = -2.0 * t * d1;
        const double zx = gx[p], zy = gy[p];
        v[p] = t;
        gx[p] = d1 * zx;
        gy[p] = d1 * zy;
        hxx[p] = d1 * hxx[p] + d2 * zx * zx;
        hxy[p] = d1 * hxy[p] + d2 * zx * zy;
        hyy[p] = d1 * hyy[p] + d2 * zy * zy;
      }
    }
    cur.swap(next);
  }
  NetJets out;
  auto block = [&](std::size_t k) {
    return std::vector<double>(cur.begin() + static_cast<std::ptrdiff_t>(k * P),
                               cur.begin() + static_cast<std::ptrdiff_t>((k + 1) * P));
  };
  out.value = block(0);
  out.gx = block(1);
  out.gy = block(2);
  out.hxx = block(3);
  out.hxy = block(4);
  out.hyy = block(5);
  return out;
}

PairSample gen_nn_pair(const TanhNetSpec& spec, GridSpec grid) {
  const std::size_t n = grid.n();
  std::vector<double> xs(grid.size()), ys(grid.size());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      xs[i * n + j] = grid.coord(i);
      ys[i * n + j] = grid.coord(j);
    }
  const NetJets g = tanh_net_jets(spec, xs, ys);
  std::vector<double> u(grid.size()), f(grid.size());
  for (std::size_t p = 0; p < grid.size(); ++p) {
    const double x = xs[p], y = ys[p];
    const double bx = x * (1 - x), by = y * (1 - y);
    const double b = bx * by;
    const double b_x = (1 - 2 * x) * by;
    const double b_y = bx * (1 - 2 * y);
    const double lap_b = -2.0 * by - 2.0 * bx;
    u[p] = g.value[p] * b;
    f[p] = b * (g.hxx[p] + g.hyy[p]) + 2.0 * (g.gx[p] * b_x + g.gy[p] * b_y) + g.value[p] * lap_b;
  }
  return PairSample(ScalarField(grid, std::move(f)), ScalarField(grid, std::move(u)),
                    Provenance::NeuralNet);
}

Mix Mix::parse(std::string_view text) {
  Mix mix;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = std::min(text.find(',', pos), text.size());
    std::string_view item = text.substr(pos, comma - pos);
    if (item.empty()) throw ConfigError("empty entry in mix '" + std::string(text) + "'");
    double weight = 1.0;
    if (const auto colon = item.find(':'); colon != std::string_view::npos) {
      const auto num = item.substr(colon + 1);
      const auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), weight);
      if (ec != std::errc() || ptr != num.data() + num.size())
        throw ConfigError("bad proportion in mix entry '" + std::string(item) + "'");
      item = item.substr(0, colon);
    }
    const Provenance p = provenance_from_string(item);
    if (p == Provenance::External) throw ConfigError("mix cannot request external samples");
    mix.parts.emplace_back(p, weight);
    pos = comma + 1;
  }
  mix.validate();
  return mix;
}

std::string Mix::to_string() const {
  std::ostringstream os;
  os.precision(17);
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) os << ',';
    os << pddrm::to_string(parts[i].first) << ':' << parts[i].second;
  }
  return os.str();
}

void Mix::validate() const {
  if (parts.empty()) throw ConfigError("mix is empty");
  double total = 0.0;
  for (const auto& [p, w] : parts) {
    if (!(w >= 0.0)) throw ConfigError("mix proportions must be non-negative");
    total += w;
  }
  if (std::fabs(total - 1.0) > 1e-9)
    throw ConfigError("mix proportions sum to " + std::to_string(total) + ", expected 1");
}

PairSample gen_dataset_sample(std::size_t index, const Mix& mix, std::uint64_t seed,
                              GridSpec grid, const DatasetOptions& opts) {
  CounterRng rng(stream_key(seed, kDatasetStream, index));
  const double pick = rng.uniform();
  Provenance chosen = mix.parts.back().first;
  double acc = 0.0;
  for (const auto& [p, w] : mix.parts) {
    acc += w;
    if (pick < acc) {
      chosen = p;
      break;
    }
  }
  if (chosen == Provenance::NeuralNet)
    return gen_nn_pair(TanhNetSpec::random(rng.next_u64(), opts.net_width, opts.net_input_scale),
                       grid);

  const auto kind = static_cast<AnalyticalKind>(static_cast<int>(chosen) + 1);
  const int cap = is_sine_sum(kind) ? std::min<int>(opts.max_param, static_cast<int>(grid.n() / 2))
                                    : opts.max_param;
  if (cap < 1) throw ConfigError("grid too small for analytical pairs");
  AnalyticalSpec spec{kind, 1, 1, 1};
  spec.n = static_cast<int>(rng.uniform_int(1, static_cast<std::uint64_t>(cap)));
  spec.k = static_cast<int>(rng.uniform_int(1, static_cast<std::uint64_t>(cap)));
  spec.j = static_cast<int>(rng.uniform_int(1, static_cast<std::uint64_t>(cap)));
  return gen_analytical(spec, grid);
}

std::vector<PairSample> gen_dataset(std::size_t count, const Mix& mix, std::uint64_t seed,
                                    GridSpec grid, const DatasetOptions& opts) {
  if (count < 1) throw ConfigError("dataset count must be >= 1");
  mix.validate();
  std::vector<std::optional<PairSample>> slots(count);
  parallel_for(count, opts.threads,
               [&](std::size_t i) { slots[i].emplace(gen_dataset_sample(i, mix, seed, grid, opts)); });
  std::vector<PairSample> out;
  out.reserve(count);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

}  // namespace pddrm
