#pragma once

// Self-checks behind `pddrm verify`. Each returns a JSON report with the
// empirical statistics and an overall pass flag.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "pddrm/ddrm.hpp"
#include "pddrm/grid.hpp"

namespace pddrm {

struct VerifyReport {
  std::string target;
  bool pass = false;
  nlohmann::ordered_json details = nlohmann::ordered_json::object();
};

/// Residuals of the spectral and five-point Laplacians on every sine mode
/// against λ·s and mu·s; passes when both maxima are below 1e-10.
VerifyReport verify_eigen(GridSpec grid, unsigned threads = 0);

/// Centre-point variance of the bridge within 5% of Σσ²sin²(nπ/2)sin²(mπ/2)
/// and ten per-mode coefficient variances within 3 standard errors.
VerifyReport verify_bridge(GridSpec grid, std::size_t draws, std::uint64_t seed, double sigma = 1e-6,
                           unsigned threads = 0);

VerifyReport verify_thm2(GridSpec grid, std::size_t draws, std::uint64_t seed, double sigma_f = 1e-6);

/// Bound check on five modes plus the ×4 scaling of both sides when σ_f doubles.
VerifyReport verify_thm3(GridSpec grid, std::size_t draws, std::uint64_t seed, double sigma_f = 1e-6);

/// Oracle-conditioned marginals for five modes at four steps. The forward
/// check uses σ_f = 1 so that low modes sit below threshold at small t; the
/// inverse check uses the reference σ_{n,m} = 1e-6.
VerifyReport verify_marginal(Problem problem, GridSpec grid, std::size_t draws, std::uint64_t seed);

const std::vector<std::string>& verify_targets();

/// Dispatch by name. Throws ConfigError for an unknown target.
VerifyReport run_verify(std::string_view target, GridSpec grid, std::size_t draws, std::uint64_t seed,
                        unsigned threads = 0);

}  // namespace pddrm
