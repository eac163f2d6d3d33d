#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "mdiqrng/config.hpp"

namespace mdiqrng::commands {

// Exit-status contract shared by all subcommands:
//   0 = certified randomness, 2 = certified zero, 1 = operational error.
inline constexpr int kExitCertified = 0;
inline constexpr int kExitZero = 2;
inline constexpr int kExitError = 1;

// Emit a counts CSV from the configured model, exact expectations or
// binomial sampling with the given seed.
int cmd_simulate(const config::RunConfig& cfg, bool sampled, std::uint64_t seed,
                 const std::string& out_path);

// Certify a counts file and write the JSON report.
int cmd_certify(const config::RunConfig& cfg, const std::string& counts_path,
                const std::string& out_path);

// Brute-force intensity search; JSON result plus optional grid-trace CSV.
int cmd_optimize(const config::RunConfig& cfg, const std::string& out_path,
                 const std::string& trace_csv_path);

// Channel-loss sweep. Per loss point the intensities are optimized for the
// decoy analysis and the non-decoy column re-analyzes the same intensities.
// CSV: loss_db, <val>_decoy, <val>_nondecoy, mu_opt, nu_opt where <val> is
// h_min or fidelity depending on the sweep mode.
int cmd_sweep_loss(const config::RunConfig& cfg, const std::string& out_path);

// Signal-intensity sweep at the configured fixed loss, decoy nu re-optimized
// per point. CSV: mu, <val>_decoy, <val>_nondecoy, nu_opt.
int cmd_sweep_mu(const config::RunConfig& cfg, const std::string& out_path);

// Per-second certification of sampled counts. CSV: second, h_min, fidelity.
int cmd_stability(const config::RunConfig& cfg, std::uint64_t seed, const std::string& out_path);

// Toeplitz extraction of a raw bit file in fixed-size blocks (the final
// partial block is discarded). The seed comes from a file of exactly
// ceil((n+m-1)/8) bytes, or from a PRNG for testing only.
int cmd_extract(const config::RunConfig& cfg, const std::string& raw_path, double h_min,
                const std::string& seed_path, std::optional<std::uint64_t> test_seed,
                const std::string& out_path, const std::string& report_path);

}  // namespace mdiqrng::commands
