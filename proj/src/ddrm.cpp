#include "pddrm/ddrm.hpp"

#include <cmath>
#include <cstring>

#include "pddrm/greens.hpp"
#include "pddrm/rng.hpp"

namespace pddrm {
namespace {

constexpr std::uint64_t kChainStream = 0x4348'4149;     // "CHAI"
constexpr std::uint64_t kSampleStream = 0x5341'4d50;    // "SAMP"
constexpr std::uint64_t kMarginalStream = 0x4d41'5247;  // "MARG"

std::uint64_t fnv1a(std::span<const double> values) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (double v : values) {
    unsigned char bytes[sizeof(double)];
    std::memcpy(bytes, &v, sizeof v);
    for (unsigned char b : bytes) {
      h ^= b;
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

Channel channel_of(Problem p) { return p == Problem::Forward ? Channel::U : Channel::F; }

// Standard normals for one chain step, one counter stream per mode pair so
// the values do not depend on traversal order.
void step_normals(std::uint64_t seed, std::size_t t, std::span<double> out) {
  for (std::size_t k = 0; k < out.size(); k += 2) {
    CounterRng rng(stream_key(seed, kChainStream, t, k / 2));
    out[k] = rng.normal();
    if (k + 1 < out.size()) out[k + 1] = rng.normal();
  }
}

double draw(const Gaussian& g, double z) { return g.var > 0.0 ? g.mean + std::sqrt(g.var) * z : g.mean; }

class IdentityDenoiser final : public Denoiser {
 public:
  std::string name() const override { return "identity"; }
  ScalarField predict(const ScalarField& noisy, double, Channel, const ScalarField*) const override {
    return noisy;
  }
  bool has_coefficient_path() const override { return true; }
  std::vector<double> predict_coefficients(std::span<const double> noisy, GridSpec, double, Channel,
                                           const ScalarField*) const override {
    return {noisy.begin(), noisy.end()};
  }
};

class SpectralPriorDenoiser final : public Denoiser {
 public:
  explicit SpectralPriorDenoiser(std::span<const PairSample> train) : grid_(train.front().u.grid()) {
    v_u_.assign(grid_.size(), 0.0);
    v_f_.assign(grid_.size(), 0.0);
    for (const PairSample& p : train) {
      if (p.u.grid() != grid_) throw DimensionError("spectral prior: training grids differ");
      const SpectralCoeffs cu = dst_forward(p.u);
      const SpectralCoeffs cf = dst_forward(p.f);
      for (std::size_t k = 0; k < grid_.size(); ++k) {
        v_u_[k] += cu.values()[k] * cu.values()[k];
        v_f_[k] += cf.values()[k] * cf.values()[k];
      }
    }
    const double inv = 1.0 / static_cast<double>(train.size());
    for (std::size_t k = 0; k < grid_.size(); ++k) {
      v_u_[k] *= inv;
      v_f_[k] *= inv;
    }
  }

  std::string name() const override { return "spectral-prior"; }

  ScalarField predict(const ScalarField& noisy, double sigma_t, Channel channel,
                      const ScalarField* context) const override {
    const SpectralCoeffs c = dst_forward(noisy);
    return dst_inverse(SpectralCoeffs(
        noisy.grid(), Space::Raw,
        predict_coefficients(c.values(), noisy.grid(), sigma_t, channel, context)));
  }

  bool has_coefficient_path() const override { return true; }

  std::vector<double> predict_coefficients(std::span<const double> noisy, GridSpec grid,
                                           double sigma_t, Channel channel,
                                           const ScalarField*) const override {
    if (grid != grid_) throw DimensionError("spectral prior: grid differs from training grid");
    const auto& v = channel == Channel::U ? v_u_ : v_f_;
    const double s2 = sigma_t * sigma_t;
    std::vector<double> out(noisy.size());
    for (std::size_t k = 0; k < out.size(); ++k) {
      const double denom = v[k] + s2;
      out[k] = denom > 0.0 ? noisy[k] * (v[k] / denom) : 0.0;
    }
    return out;
  }

 private:
  GridSpec grid_;
  std::vector<double> v_u_, v_f_;
};

class OracleDenoiser final : public Denoiser {
 public:
  explicit OracleDenoiser(const PairSample& truth)
      : truth_(truth), cu_(dst_forward(truth.u)), cf_(dst_forward(truth.f)) {}

  std::string name() const override { return "oracle"; }
  ScalarField predict(const ScalarField& noisy, double, Channel channel,
                      const ScalarField*) const override {
    if (noisy.grid() != truth_.u.grid()) throw DimensionError("oracle: grid mismatch");
    return channel == Channel::U ? truth_.u : truth_.f;
  }
  bool has_coefficient_path() const override { return true; }
  std::vector<double> predict_coefficients(std::span<const double>, GridSpec grid, double,
                                           Channel channel, const ScalarField*) const override {
    if (grid != truth_.u.grid()) throw DimensionError("oracle: grid mismatch");
    const auto v = (channel == Channel::U ? cu_ : cf_).values();
    return {v.begin(), v.end()};
  }

 private:
  PairSample truth_;
  SpectralCoeffs cu_, cf_;
};

}  // namespace

std::string_view to_string(Problem p) { return p == Problem::Forward ? "forward" : "inverse"; }

std::vector<double> Denoiser::predict_coefficients(std::span<const double> noisy, GridSpec grid,
                                                   double sigma_t, Channel channel,
                                                   const ScalarField* context) const {
  const ScalarField field =
      dst_inverse(SpectralCoeffs(grid, Space::Raw, std::vector<double>(noisy.begin(), noisy.end())));
  const ScalarField pred = predict(field, sigma_t, channel, context);
  if (pred.grid() != grid) throw DimensionError("denoiser '" + name() + "' returned a different grid");
  const SpectralCoeffs c = dst_forward(pred);
  return {c.values().begin(), c.values().end()};
}

std::unique_ptr<Denoiser> builtin_identity_denoiser() { return std::make_unique<IdentityDenoiser>(); }

std::unique_ptr<Denoiser> builtin_spectral_prior_denoiser(std::span<const PairSample> train) {
  if (train.empty()) throw ConfigError("spectral prior denoiser needs a non-empty training set");
  return std::make_unique<SpectralPriorDenoiser>(train);
}

std::unique_ptr<Denoiser> builtin_oracle_denoiser(const PairSample& truth) {
  return std::make_unique<OracleDenoiser>(truth);
}

void DdrmConfig::validate(Problem problem, GridSpec grid) const {
  if (!(eta >= 0.0 && eta <= 1.0)) throw ConfigError("eta must lie in [0, 1]");
  if (!(eta_b >= 0.0 && eta_b <= 1.0)) throw ConfigError("eta_b must lie in [0, 1]");
  if (problem == Problem::Forward) {
    if (!(sigma_f > 0.0) || !std::isfinite(sigma_f)) throw ConfigError("sigma_f must be > 0");
  } else {
    if (!bridge) throw ConfigError("inverse chain needs a bridge noise spec");
    if (bridge->grid() != grid) throw DimensionError("bridge spec built for a different grid");
  }
}

DdrmConfig reference_forward_config(std::uint64_t seed) {
  DdrmConfig cfg;
  cfg.eta = 8e-9;
  cfg.eta_b = 9e-9;
  cfg.sigma_f = 1e-6;
  cfg.seed = seed;
  return cfg;
}

DdrmConfig reference_inverse_config(GridSpec grid, std::uint64_t seed) {
  DdrmConfig cfg;
  cfg.eta = 8e-4;
  cfg.eta_b = 9e-4;
  cfg.bridge = BridgeSpec::constant(grid, 1e-6);
  cfg.seed = seed;
  return cfg;
}

std::vector<double> measurement_scale(Problem problem, const DdrmConfig& cfg, GridSpec grid) {
  cfg.validate(problem, grid);
  const EigenTable eig(grid);
  std::vector<double> tau(grid.size());
  if (problem == Problem::Forward) {
    const KBarTable kbar(grid);
    for (std::size_t k = 0; k < tau.size(); ++k)
      tau[k] = cfg.sigma_f * std::sqrt(kbar.values()[k]) / std::fabs(eig.values()[k]);
  } else {
    const auto sigma = cfg.bridge->sigma();
    for (std::size_t k = 0; k < tau.size(); ++k) tau[k] = sigma[k] * std::fabs(eig.values()[k]);
  }
  return tau;
}

void check_tractable(Problem problem, const DdrmConfig& cfg, GridSpec grid) {
  const auto tau = measurement_scale(problem, cfg, grid);
  const double sT = cfg.schedule.sigma_max();
  for (std::size_t k = 0; k < tau.size(); ++k) {
    if (!(sT > tau[k])) {
      const std::size_t n = k / grid.n() + 1, m = k % grid.n() + 1;
      throw ConfigError("intractable " + std::string(to_string(problem)) + " chain: sigma_T = " +
                        std::to_string(sT) + " does not exceed the measurement scale " +
                        std::to_string(tau[k]) + " of mode (" + std::to_string(n) + "," +
                        std::to_string(m) + ")");
    }
  }
}

Gaussian chain_init(double observed, double tau, double sigma_T) {
  return {observed, sigma_T * sigma_T - tau * tau};
}

Gaussian chain_transition(double predicted, double observed, double tau, double sigma_t,
                          double eta, double eta_b) {
  if (sigma_t < tau) {
    return {predicted + std::sqrt(1.0 - eta * eta) * sigma_t * (observed - predicted) / tau,
            eta * eta * sigma_t * sigma_t};
  }
  return {(1.0 - eta_b) * predicted + eta_b * observed,
          sigma_t * sigma_t - tau * tau * eta_b * eta_b};
}

ChainResult run_chain(Problem problem, const ScalarField& observation, const Denoiser& denoiser,
                      const DdrmConfig& cfg) {
  const GridSpec grid = observation.grid();
  check_tractable(problem, cfg, grid);
  const EigenTable eig(grid);
  const std::vector<double> tau = measurement_scale(problem, cfg, grid);
  const SpectralCoeffs obs = problem == Problem::Forward ? to_u_space_from_f(observation, eig)
                                                         : to_f_space_from_u(observation, eig);
  const auto ob = obs.values();
  const Channel channel = channel_of(problem);
  const std::size_t T = cfg.schedule.steps();
  const std::size_t K = grid.size();
  const bool shortcut = cfg.allow_coefficient_path && denoiser.has_coefficient_path();

  ChainTrace trace;
  trace.steps.reserve(T + 1);
  auto record = [&](std::size_t t, std::span<const double> state, std::size_t below) {
    ChainStep st;
    st.t = t;
    st.sigma = cfg.schedule.sigma(t);
    st.hash = fnv1a(state);
    st.below_threshold = below;
    if (cfg.keep_coefficients)
      st.coeffs.emplace(grid, Space::Raw, std::vector<double>(state.begin(), state.end()));
    trace.steps.push_back(std::move(st));
  };

  std::vector<double> state(K), z(K);
  step_normals(cfg.seed, T, z);
  const double sT = cfg.schedule.sigma_max();
  for (std::size_t k = 0; k < K; ++k) state[k] = draw(chain_init(ob[k], tau[k], sT), z[k]);
  record(T, state, 0);

  for (std::size_t t = T; t-- > 0;) {
    const double level = cfg.schedule.sigma(t + 1);
    std::vector<double> pred =
        shortcut ? denoiser.predict_coefficients(state, grid, level, channel, &observation)
                 : denoiser.Denoiser::predict_coefficients(state, grid, level, channel, &observation);
    ++trace.denoiser_calls;
    if (pred.size() != K) throw DimensionError("denoiser returned the wrong number of coefficients");
    const double sigma_t = cfg.schedule.sigma(t);
    step_normals(cfg.seed, t, z);
    std::size_t below = 0;
    for (std::size_t k = 0; k < K; ++k) {
      below += sigma_t < tau[k] ? 1 : 0;
      state[k] = draw(chain_transition(pred[k], ob[k], tau[k], sigma_t, cfg.eta, cfg.eta_b), z[k]);
    }
    record(t, state, below);
  }
  return {dst_inverse(SpectralCoeffs(grid, Space::Raw, std::move(state))), std::move(trace)};
}

ChainResult ddrm_forward(const ScalarField& f_obs, const Denoiser& denoiser, const DdrmConfig& cfg) {
  return run_chain(Problem::Forward, f_obs, denoiser, cfg);
}

ChainResult ddrm_inverse(const ScalarField& u_obs, const Denoiser& denoiser, const DdrmConfig& cfg) {
  return run_chain(Problem::Inverse, u_obs, denoiser, cfg);
}

std::uint64_t chain_seed_for_sample(std::uint64_t run_seed, std::size_t sample_index) {
  return stream_key(run_seed, kSampleStream, sample_index);
}

MarginalReport verify_marginal_property(Problem problem, const DdrmConfig& cfg,
                                        const PairSample& truth, std::size_t draws,
                                        std::span<const std::pair<std::size_t, std::size_t>> modes,
                                        std::span<const std::size_t> steps) {
  if (draws < 2) throw ConfigError("verify_marginal_property: need at least 2 draws");
  const GridSpec grid = truth.u.grid();
  check_tractable(problem, cfg, grid);
  const std::vector<double> tau = measurement_scale(problem, cfg, grid);
  const SpectralCoeffs clean = dst_forward(problem == Problem::Forward ? truth.u : truth.f);
  const std::size_t T = cfg.schedule.steps();
  const std::size_t N = grid.n();
  const double dn = static_cast<double>(draws);

  MarginalReport rep;
  rep.problem = problem;
  rep.draws = draws;
  bool saw_below = false, saw_above = false;
  rep.pass = true;
  for (const auto& [n, m] : modes) {
    if (n < 1 || m < 1 || n > N || m > N) throw ConfigError("verify_marginal_property: bad mode");
    const std::size_t k = (n - 1) * N + m - 1;
    for (std::size_t t : steps) {
      if (t > T) throw ConfigError("verify_marginal_property: step beyond T");
      MarginalEntry e;
      e.n = n;
      e.m = m;
      e.t = t;
      e.sigma_t = cfg.schedule.sigma(t);
      e.tau = tau[k];
      e.initial = t == T;
      e.below_threshold = !e.initial && e.sigma_t < e.tau;
      e.true_value = clean.values()[k];
      double sum = 0.0, sum_sq = 0.0;
      for (std::size_t d = 0; d < draws; ++d) {
        CounterRng rng(stream_key(cfg.seed ^ kMarginalStream, d, k, t));
        const double observed = e.true_value + e.tau * rng.normal();
        const Gaussian g = e.initial ? chain_init(observed, e.tau, e.sigma_t)
                                     : chain_transition(e.true_value, observed, e.tau, e.sigma_t,
                                                        cfg.eta, cfg.eta_b);
        const double dev = draw(g, rng.normal()) - e.true_value;
        sum += dev;
        sum_sq += dev * dev;
      }
      const double mean_dev = sum / dn;
      e.empirical_mean = e.true_value + mean_dev;
      e.empirical_var = (sum_sq - dn * mean_dev * mean_dev) / (dn - 1.0);
      const double target_var = e.sigma_t * e.sigma_t;
      // Standard errors from the target distribution N(true, σ_t²).
      e.mean_std_error = e.sigma_t / std::sqrt(dn);
      e.var_std_error = target_var * std::sqrt(2.0 / (dn - 1.0));
      if (target_var == 0.0) {
        e.pass = mean_dev == 0.0 && e.empirical_var == 0.0;
      } else {
        e.pass = std::fabs(mean_dev) <= 4.0 * e.mean_std_error &&
                 std::fabs(e.empirical_var - target_var) <= 4.0 * e.var_std_error;
      }
      if (!e.initial) (e.below_threshold ? saw_below : saw_above) = true;
      rep.pass = rep.pass && e.pass;
      rep.entries.push_back(e);
    }
  }
  rep.both_branches = saw_below && saw_above;
  return rep;
}

}  // namespace pddrm
