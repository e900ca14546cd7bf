#include "doctest.h"

#include <cmath>

#include "pddrm/datagen.hpp"
#include "pddrm/ddrm.hpp"
#include "pddrm/external_denoiser.hpp"
#include "pddrm/noise.hpp"
#include "pddrm/spectral.hpp"
#include "support.hpp"

using namespace pddrm;

namespace {

PairSample nn_pair(std::uint64_t seed, GridSpec g = GridSpec(64)) { return gen_nn_pair(TanhNetSpec::random(seed), g); }

std::vector<PairSample> nn_set(std::size_t count, std::uint64_t seed, GridSpec g = GridSpec(64)) {
  return gen_dataset(count, Mix::parse("nn"), seed, g);
}

}  // namespace

TEST_CASE("transition branch degeneracies") {
  // Below threshold with η = 1: the observation term vanishes.
  const Gaussian a = chain_transition(0.7, 5.0, 0.5, 0.1, 1.0, 0.3);
  CHECK(a.mean == 0.7);
  CHECK(a.var == doctest::Approx(0.01));
  // Above threshold with η_b = 0: pure prediction with variance σ_t².
  const Gaussian b = chain_transition(0.7, 5.0, 0.05, 0.1, 0.3, 0.0);
  CHECK(b.mean == 0.7);
  CHECK(b.var == doctest::Approx(0.01));
  // General forms.
  const Gaussian c = chain_transition(1.0, 2.0, 0.5, 0.1, 0.6, 0.3);
  CHECK(c.mean == doctest::Approx(1.0 + 0.8 * 0.1 * 1.0 / 0.5));
  CHECK(c.var == doctest::Approx(0.36 * 0.01));
  const Gaussian d = chain_transition(1.0, 2.0, 0.05, 0.1, 0.6, 0.3);
  CHECK(d.mean == doctest::Approx(0.7 * 1.0 + 0.3 * 2.0));
  CHECK(d.var == doctest::Approx(0.01 - 0.0025 * 0.09));
  // σ_t = τ belongs to the upper branch.
  CHECK(chain_transition(1.0, 2.0, 0.1, 0.1, 0.6, 0.3).mean == doctest::Approx(1.3));
  const Gaussian init = chain_init(3.0, 0.5, 2.0);
  CHECK(init.mean == 3.0);
  CHECK(init.var == doctest::Approx(3.75));
}

TEST_CASE("measurement scales") {
  const GridSpec g(64);
  const auto cfg = reference_forward_config();
  const auto tau = measurement_scale(Problem::Forward, cfg, g);
  const double b = 1 / (2 * M_PI * M_PI) + std::log(2.0);
  CHECK(tau[0] == doctest::Approx(1e-6 * b / (2 * M_PI * M_PI)));
  const auto inv = reference_inverse_config(g);
  const auto taui = measurement_scale(Problem::Inverse, inv, g);
  CHECK(taui.back() == doctest::Approx(1e-6 * 8192 * M_PI * M_PI));
}

TEST_CASE("config validation and tractability") {
  const GridSpec g(64);
  DdrmConfig c = reference_forward_config();
  c.eta = 1.5;
  CHECK_THROWS_AS(c.validate(Problem::Forward, g), ConfigError);
  c = reference_forward_config();
  CHECK_THROWS_AS(c.validate(Problem::Inverse, g), ConfigError);  // no bridge
  c.sigma_f = 100.0;
  CHECK_THROWS_WITH_AS(check_tractable(Problem::Forward, c, g), doctest::Contains("mode (1,1)"), ConfigError);
  DdrmConfig i = reference_inverse_config(g);
  i.bridge = BridgeSpec::constant(g, 1e-3);
  CHECK_THROWS_AS(check_tractable(Problem::Inverse, i, g), ConfigError);
  CHECK_NOTHROW(check_tractable(Problem::Inverse, reference_inverse_config(g), g));
  const auto id = builtin_identity_denoiser();
  const auto p = nn_pair(1);
  CHECK_THROWS_AS(ddrm_inverse(p.u, *id, i), ConfigError);
}

TEST_CASE("chain makes T denoiser calls and records T+1 states") {
  const auto p = nn_pair(2);
  const auto id = builtin_identity_denoiser();
  for (std::size_t T : {1u, 7u, 100u}) {
    DdrmConfig c = reference_forward_config(4);
    c.schedule = make_schedule(T, 0.01, 2.0);
    const auto r = ddrm_forward(p.f, *id, c);
    CHECK(r.trace.denoiser_calls == T);
    REQUIRE(r.trace.steps.size() == T + 1);
    CHECK(r.trace.steps.front().t == T);
    CHECK(r.trace.steps.back().t == 0);
    CHECK(r.trace.steps.back().sigma == 0.0);
  }
}

TEST_CASE("exactly one branch per mode and step, decided by |lambda|") {
  const GridSpec g(64);
  const auto p = nn_pair(3);
  const auto id = builtin_identity_denoiser();
  const DdrmConfig c = reference_inverse_config(g, 1);
  const auto tau = measurement_scale(Problem::Inverse, c, g);
  const auto r = ddrm_inverse(p.u, *id, c);
  for (const auto& st : r.trace.steps) {
    if (st.t == c.schedule.steps()) continue;
    std::size_t below = 0;
    for (double t : tau) below += st.sigma < t;
    CHECK(st.below_threshold == below);
  }
  CHECK(r.trace.steps.back().below_threshold == g.size());  // σ_0 = 0
}

TEST_CASE("chains are deterministic per seed") {
  const auto p = nn_pair(5);
  const auto prior_set = nn_set(8, 77);
  const auto prior = builtin_spectral_prior_denoiser(prior_set);
  const DdrmConfig c = reference_forward_config(11);
  const auto a = ddrm_forward(p.f, *prior, c);
  const auto b = ddrm_forward(p.f, *prior, c);
  CHECK(a.estimate == b.estimate);
  for (std::size_t s = 0; s < a.trace.steps.size(); ++s) CHECK(a.trace.steps[s].hash == b.trace.steps[s].hash);
  const auto d = ddrm_forward(p.f, *prior, reference_forward_config(12));
  CHECK_FALSE(d.estimate == a.estimate);
  CHECK(chain_seed_for_sample(1, 0) != chain_seed_for_sample(1, 1));
}

TEST_CASE("grid-space and coefficient-space denoiser paths agree") {
  const auto p = nn_pair(6);
  const auto train = nn_set(8, 78);
  const auto prior = builtin_spectral_prior_denoiser(train);
  for (Problem prob : {Problem::Forward, Problem::Inverse}) {
    DdrmConfig c = prob == Problem::Forward ? reference_forward_config(2) : reference_inverse_config(GridSpec(64), 2);
    c.schedule = make_schedule(20, 0.01, 2.0);
    const ScalarField& obs = prob == Problem::Forward ? p.f : p.u;
    const auto fast = run_chain(prob, obs, *prior, c);
    c.allow_coefficient_path = false;
    const auto slow = run_chain(prob, obs, *prior, c);
    double scale = 0.0;
    for (double v : fast.estimate.values()) scale = std::max(scale, std::fabs(v));
    CHECK(testing::max_abs_diff(fast.estimate.values(), slow.estimate.values()) < 1e-9 * (1 + scale));
  }
}

TEST_CASE("oracle chain never ends worse than its initial state") {
  const GridSpec g(64);
  for (Problem prob : {Problem::Forward, Problem::Inverse}) {
    int improved = 0;
    for (std::uint64_t s = 0; s < 100; ++s) {
      const auto p = nn_pair(1000 + s);
      const auto oracle = builtin_oracle_denoiser(p);
      DdrmConfig c = prob == Problem::Forward ? reference_forward_config(s) : reference_inverse_config(g, s);
      c.keep_coefficients = true;
      const auto r = run_chain(prob, prob == Problem::Forward ? p.f : p.u, *oracle, c);
      const ScalarField& truth = prob == Problem::Forward ? p.u : p.f;
      const double init = mae(dst_inverse(*r.trace.steps.front().coeffs), truth);
      improved += mae(r.estimate, truth) <= init;
    }
    CAPTURE(to_string(prob));
    CHECK(improved >= 95);
  }
}

TEST_CASE("oracle chain beats the dry chain on the same seed") {
  const GridSpec g(64);
  const auto id = builtin_identity_denoiser();
  for (Problem prob : {Problem::Forward, Problem::Inverse}) {
    const auto p = nn_pair(40);
    const auto oracle = builtin_oracle_denoiser(p);
    const DdrmConfig c = prob == Problem::Forward ? reference_forward_config(9) : reference_inverse_config(g, 9);
    const ScalarField& obs = prob == Problem::Forward ? p.f : p.u;
    const ScalarField& truth = prob == Problem::Forward ? p.u : p.f;
    CHECK(mae(run_chain(prob, obs, *oracle, c).estimate, truth) <= mae(run_chain(prob, obs, *id, c).estimate, truth));
  }
}

TEST_CASE("identity denoiser returns its input") {
  const auto id = builtin_identity_denoiser();
  for (std::uint64_t s = 0; s < 3; ++s) {
    const auto g = testing::random_field(GridSpec(8), s);
    CHECK(id->predict(g, 0.3, Channel::U, nullptr) == g);
  }
}

TEST_CASE("spectral prior denoiser limits and shrinkage") {
  const GridSpec g(64);
  CHECK_THROWS_AS(builtin_spectral_prior_denoiser({}), ConfigError);
  const auto train = nn_set(32, 300);
  const auto prior = builtin_spectral_prior_denoiser(train);
  const auto x = testing::random_field(g, 5);
  // High-mode prior variances of smooth data are tiny, so "small" means σ = 0.
  CHECK(testing::max_abs_diff(prior->predict(x, 0.0, Channel::U, nullptr).values(), x.values()) < 1e-10);
  CHECK(testing::max_abs_diff(prior->predict(x, 1e-30, Channel::F, nullptr).values(), x.values()) < 1e-6);
  CHECK(testing::max_abs_diff(prior->predict(x, 1e12, Channel::F, nullptr).values(), zero_field(g).values()) < 1e-12);
  CHECK_THROWS_AS(prior->predict(zero_field(GridSpec(8)), 0.1, Channel::U, nullptr), DimensionError);

  const auto held = nn_set(8, 301);
  double before = 0.0, after = 0.0;
  for (std::size_t s = 0; s < held.size(); ++s) {
    const auto c = dst_forward(held[s].u);
    std::vector<double> noisy(c.values().begin(), c.values().end());
    CounterRng rng(stream_key(s, 99));
    for (double& v : noisy) v += 0.1 * rng.normal();
    const auto noisy_field = dst_inverse(SpectralCoeffs(g, Space::Raw, noisy));
    before += mae(noisy_field, held[s].u);
    after += mae(prior->predict(noisy_field, 0.1, Channel::U, nullptr), held[s].u);
  }
  CHECK(after < before);
}

TEST_CASE("marginal property holds on both branches") {
  const GridSpec g(64);
  const auto p = nn_pair(8);
  const std::vector<std::pair<std::size_t, std::size_t>> modes = {{1, 1}, {6, 6}, {64, 64}};
  const std::vector<std::size_t> steps = {1, 30, 100};
  DdrmConfig fwd = reference_forward_config(3);
  fwd.sigma_f = 1.0;
  const auto rf = verify_marginal_property(Problem::Forward, fwd, p, 4000, modes, steps);
  CHECK(rf.pass);
  CHECK(rf.both_branches);
  const auto ri = verify_marginal_property(Problem::Inverse, reference_inverse_config(g, 3), p, 4000, modes, steps);
  CHECK(ri.pass);
  CHECK(ri.both_branches);
  CHECK_THROWS_AS(verify_marginal_property(Problem::Forward, fwd, p, 100, modes, std::vector<std::size_t>{101}),
                  ConfigError);
}

#ifdef PDDRM_ECHO_DENOISER
TEST_CASE("external echo denoiser reproduces the identity chain") {
  const auto p = nn_pair(12, GridSpec(16));
  const ExternalDenoiser ext(PDDRM_ECHO_DENOISER);
  const auto id = builtin_identity_denoiser();
  DdrmConfig c = reference_inverse_config(GridSpec(16), 5);
  c.schedule = make_schedule(10, 0.01, 2.0);
  const auto a = ddrm_inverse(p.u, ext, c);
  const auto b = ddrm_inverse(p.u, *id, c);
  CHECK(a.trace.denoiser_calls == 10);
  double scale = 0.0;
  for (double v : b.estimate.values()) scale = std::max(scale, std::fabs(v));
  CHECK(testing::max_abs_diff(a.estimate.values(), b.estimate.values()) < 1e-10 * (1 + scale));
  CHECK(ext.name().rfind("external:", 0) == 0);
}

TEST_CASE("external denoiser surfaces a dead child as an error") {
  const ExternalDenoiser ext("/nonexistent/denoiser");
  CHECK_THROWS_AS(ext.predict(zero_field(GridSpec(4)), 0.1, Channel::U, nullptr), std::runtime_error);
}
#endif
