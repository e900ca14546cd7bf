#pragma once

// Restoration chains over sine coefficients.
//
// Forward problem (u given f): the chain state is the raw coefficients of
// u_t, conditioned on f̄ = ⟨f, s⟩/λ with per-mode measurement scale
// τ = σ_f·√K̄/|λ|. Inverse problem (f given u): the state is the raw
// coefficients of f_t, conditioned on ū = λ⟨u, s⟩ with τ = σ_{n,m}·|λ|.
//
// For every mode the initial state is drawn from N(obs, σ_T² − τ²) and each
// step t = T−1..0 from
//
//   σ_t <  τ:  N(pred + √(1−η²)·σ_t·(obs − pred)/τ,  η²σ_t²)
//   σ_t >= τ:  N((1−η_b)·pred + η_b·obs,            σ_t² − τ²η_b²)
//
// where pred is the denoiser's estimate of the clean coefficients from the
// state at level σ_{t+1}.

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pddrm/grid.hpp"
#include "pddrm/noise.hpp"
#include "pddrm/spectral.hpp"

namespace pddrm {

enum class Problem { Forward, Inverse };

std::string_view to_string(Problem p);

/// Predicts the clean field of one channel from a noisy field at level σ_t.
/// Implementations must be pure functions of their inputs and safe to call
/// concurrently.
class Denoiser {
 public:
  virtual ~Denoiser() = default;

  virtual std::string name() const = 0;

  virtual ScalarField predict(const ScalarField& noisy, double sigma_t, Channel channel,
                              const ScalarField* context) const = 0;

  /// True when predict_coefficients is implemented natively; the chain then
  /// skips the grid round trip.
  virtual bool has_coefficient_path() const { return false; }

  /// Raw sine coefficients in, raw coefficients out. The default goes
  /// through the grid: dst_forward(predict(dst_inverse(noisy))).
  virtual std::vector<double> predict_coefficients(std::span<const double> noisy, GridSpec grid,
                                                   double sigma_t, Channel channel,
                                                   const ScalarField* context) const;
};

/// Returns its input unchanged; running a chain with it gives the dry process.
std::unique_ptr<Denoiser> builtin_identity_denoiser();

/// Per-mode Wiener shrinkage c·v/(v + σ_t²), where v is the mean squared
/// training coefficient of the requested channel. Throws ConfigError on an
/// empty training set.
std::unique_ptr<Denoiser> builtin_spectral_prior_denoiser(std::span<const PairSample> train);

/// Always returns the true field of the requested channel.
std::unique_ptr<Denoiser> builtin_oracle_denoiser(const PairSample& truth);

struct DdrmConfig {
  double eta = 0.0;
  double eta_b = 0.0;
  double sigma_f = 1e-6;               // forward chain
  std::optional<BridgeSpec> bridge;    // inverse chain
  NoiseSchedule schedule = default_schedule();
  std::uint64_t seed = 0;
  bool keep_coefficients = false;      // store full states in the trace
  bool allow_coefficient_path = true;  // let built-in denoisers skip the grid

  /// η, η_b in [0, 1] and the problem's inputs present and positive.
  void validate(Problem problem, GridSpec grid) const;
};

/// η = 8e-9, η_b = 9e-9, σ_f = 1e-6.
DdrmConfig reference_forward_config(std::uint64_t seed = 0);
/// η = 8e-4, η_b = 9e-4, σ_{n,m} = 1e-6.
DdrmConfig reference_inverse_config(GridSpec grid, std::uint64_t seed = 0);

/// Per-mode measurement scale τ for the problem.
std::vector<double> measurement_scale(Problem problem, const DdrmConfig& cfg, GridSpec grid);

/// Throws ConfigError naming the first mode with σ_T <= τ.
void check_tractable(Problem problem, const DdrmConfig& cfg, GridSpec grid);

struct ChainStep {
  std::size_t t = 0;
  double sigma = 0.0;
  std::uint64_t hash = 0;  // FNV-1a over the coefficient bytes
  std::optional<SpectralCoeffs> coeffs;
  std::size_t below_threshold = 0;  // modes that took the σ_t < τ branch
};

struct ChainTrace {
  std::vector<ChainStep> steps;  // t = T, T−1, …, 0
  std::size_t denoiser_calls = 0;
};

struct ChainResult {
  ScalarField estimate;
  ChainTrace trace;
};

struct Gaussian {
  double mean = 0.0;
  double var = 0.0;
};

/// Distribution of the initial state of one mode.
Gaussian chain_init(double observed, double tau, double sigma_T);
/// Distribution of one mode at step t given the prediction of the clean value.
Gaussian chain_transition(double predicted, double observed, double tau, double sigma_t,
                          double eta, double eta_b);

ChainResult ddrm_forward(const ScalarField& f_obs, const Denoiser& denoiser, const DdrmConfig& cfg);
ChainResult ddrm_inverse(const ScalarField& u_obs, const Denoiser& denoiser, const DdrmConfig& cfg);
ChainResult run_chain(Problem problem, const ScalarField& observation, const Denoiser& denoiser,
                      const DdrmConfig& cfg);

/// Seed of the chain for one sample of a batch run.
std::uint64_t chain_seed_for_sample(std::uint64_t run_seed, std::size_t sample_index);

struct MarginalEntry {
  std::size_t n = 0, m = 0, t = 0;
  double sigma_t = 0.0;
  double tau = 0.0;
  bool below_threshold = false;  // σ_t < τ branch (never for the initial step)
  bool initial = false;
  double true_value = 0.0;
  double empirical_mean = 0.0;
  double mean_std_error = 0.0;
  double empirical_var = 0.0;
  double var_std_error = 0.0;
  bool pass = false;
};

struct MarginalReport {
  Problem problem = Problem::Forward;
  std::size_t draws = 0;
  std::vector<MarginalEntry> entries;
  bool both_branches = false;
  bool pass = false;
};

/// Monte-Carlo check that the oracle-conditioned transitions have marginal
/// N(true coefficient, σ_t²). Each draw samples a synthetic observation
/// obs = true + τ·ξ and then the step-t state given (true, obs); t = T uses
/// the initial distribution. Mean and variance must lie within 4 standard
/// errors of their targets.
MarginalReport verify_marginal_property(Problem problem, const DdrmConfig& cfg,
                                        const PairSample& truth, std::size_t draws,
                                        std::span<const std::pair<std::size_t, std::size_t>> modes,
                                        std::span<const std::size_t> steps);

}  // namespace pddrm
