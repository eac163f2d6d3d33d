#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mdiqrng/decoy.hpp"
#include "mdiqrng/sim.hpp"
#include "mdiqrng/tomo.hpp"

namespace mdiqrng::entropy {

// Prefactor of the min-entropy objective. "poisson" weights the conclusive
// single-photon events by 2 a1 mu e^{-mu} (the single-photon Poisson
// probability); "literal" uses 2 a1 mu e^{+mu}. Poisson is the default: it
// is the form consistent with the reference rates this pipeline reproduces.
enum class Prefactor { Poisson, Literal };

struct CertifyOptions {
    bool decoy = true;
    Prefactor prefactor = Prefactor::Poisson;
    decoy::DarkTerm dark_term = decoy::DarkTerm::Halved;
    tomo::OptimizerSettings optimizer{};
    // When set, a fidelity lower bound against this reference model is
    // attached to the report.
    std::optional<tomo::SimModel> fidelity_reference;
    // Tomography-mode fraction q, used only for the informational
    // randomness-consumption figure (3 + log2(1/q)) f q.
    double tomography_fraction = 0.01;
};

struct CertReport {
    double mu = 0.0;
    double nu = 0.0;
    decoy::ProbabilityBounds bounds;
    tomo::ParamBounds params;      // meaningful unless no_randomness
    bool no_randomness = false;
    double a1_lower = 0.0;
    double nynz_sq_lower = 0.0;
    double h_min = 0.0;            // bits per pulse
    double bit_rate_hz = 0.0;      // h_min * clock
    std::optional<double> fidelity_lower;
    double epsilon_per_use = 0.0;
    double epsilon_total = 0.0;    // union bound over all Chernoff uses
    int chernoff_uses = 0;
    double consumption_bits_per_s = 0.0;  // informational, never subtracted
    std::vector<std::string> flags;
};

// Closed-form minimum of ny^2 + nz^2 over the bounds box: per coordinate the
// contribution is 0 if the interval contains 0, else min(lower^2, upper^2);
// the sum is capped at 1.
double nynz_sq_lower(const tomo::ParamBounds& b);

// H = -pref(a1_lower, mu) * log2((1 + sqrt(1 - nynz_sq)) / 2), floored at 0.
// nynz_sq above 1 is clamped to 1.
double min_entropy_objective(double a1_lower, double nynz_sq, double mu,
                             Prefactor prefactor = Prefactor::Poisson);

// Full certification chain: click-probability intervals -> single-photon
// intervals -> POVM parameter bounds -> min-entropy lower bound, with an
// optional fidelity lower bound. Deterministic in its inputs; estimation
// failures degrade to h_min = 0 with an explanatory flag.
CertReport certify(const decoy::CountsTable& counts, const decoy::ExperimentConfig& cfg,
                   double p_d, const CertifyOptions& options = {});

struct GridPoint {
    double mu = 0.0;
    double nu = 0.0;
    double h = 0.0;
};

struct IntensityGrid {
    double mu_step = 0.01;
    double nu_step = 0.01;
};

struct IntensitySearchResult {
    double mu_star = 0.0;
    double nu_star = 0.0;
    double h_star = 0.0;
    bool all_zero = false;  // no lattice point certified randomness
    std::vector<GridPoint> trace;
};

// Brute-force search of certify() over the (mu, nu) lattice with
// 0 < nu < mu <= 1 (non-decoy mode searches mu only) on exact-expectation
// counts. Ties break toward smaller mu, then smaller nu; the result is
// reproducible bit-for-bit and independent of scheduling.
IntensitySearchResult optimize_intensities(const sim::DetectorModel& detector,
                                           decoy::ExperimentConfig base,
                                           const IntensityGrid& grid,
                                           const CertifyOptions& options = {},
                                           sim::AfterpulseModel ap = sim::AfterpulseModel::Multiplicative,
                                           bool parallel = true);

}  // namespace mdiqrng::entropy
