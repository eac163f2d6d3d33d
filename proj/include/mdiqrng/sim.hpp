#pragma once

#include <array>
#include <cstdint>
#include <random>

#include "mdiqrng/decoy.hpp"
#include "mdiqrng/qmath.hpp"

namespace mdiqrng::sim {

// Parametric model of the time-bin detection chain.
struct DetectorModel {
    double eta = 0.55;            // single-photon detection efficiency
    double p_d = 8e-5;            // dark-count probability per gate
    double eps_afterpulse = 0.0;  // fractional extra '1' counts from afterpulsing
    double e_prep = 0.0;          // probability of preparing the orthogonal state

    void validate() const;
};

// "additional X% counts of outputting '1'": Multiplicative inflates each
// probe's click probability by (1+eps); Additive adds eps times the
// ensemble-mean click probability instead.
enum class AfterpulseModel { Multiplicative, Additive };

struct SimMode {
    enum class Kind { Expectation, Sampled };
    Kind kind = Kind::Expectation;
    std::uint64_t seed = 0;

    static SimMode expectation() { return {}; }
    static SimMode sampled(std::uint64_t seed) { return {Kind::Sampled, seed}; }
};

// Channel loss in dB scales the detection efficiency.
inline double loss_to_efficiency(double eta0, double loss_db) {
    return eta0 * std::pow(10.0, -loss_db / 10.0);
}

// Click probability of the Z-basis measurement for an ideal preparation of
// probe j at the given mean photon number: the Z0 time bin is empty (dark
// counts only), Z1 carries the full intensity, X+/Y+ split it over two bins.
double click_probability(qmath::ProbeId j, double intensity, const DetectorModel& d);

// Click probability after preparation errors: with probability e_prep the
// orthogonal state in the encoded basis is sent instead (Z0<->Z1; the X/Y
// orthogonal states hit the Z measurement identically to X+/Y+).
double prep_error_click_probability(qmath::ProbeId j, double intensity, const DetectorModel& d);

// Multiplicative afterpulse inflation p * (1 + eps_ap), capped at 1.
double apply_afterpulse(double p, double eps_ap);

// Click probabilities for all four probes at one intensity, with preparation
// error and afterpulse applied.
std::array<double, 4> ensemble_click_probabilities(double intensity, const DetectorModel& d,
                                                   AfterpulseModel ap = AfterpulseModel::Multiplicative);

// Exact-expectation counts table: clicks = round(trials * p). With
// decoy=false the whole per-probe budget N eta_j goes to the signal
// intensity and the decoy cells are left empty.
decoy::CountsTable expected_counts(const decoy::ExperimentConfig& cfg, const DetectorModel& d,
                                   AfterpulseModel ap = AfterpulseModel::Multiplicative,
                                   bool decoy = true);

// Binomial(trials, p) counts drawn from one independent PRNG stream per
// table cell, so the table is reproducible bit-for-bit for a fixed seed and
// independent of evaluation order. Expectation mode delegates to
// expected_counts.
decoy::CountsTable sample_counts(const decoy::ExperimentConfig& cfg, const DetectorModel& d,
                                 SimMode mode,
                                 AfterpulseModel ap = AfterpulseModel::Multiplicative,
                                 bool decoy = true);

// Deterministic binomial sampler. Exact CDF inversion (anchored at the mean,
// probability mass beyond 12 sigma is negligible) while trials*p < 1e4, a
// normal approximation with continuity correction above. The PRNG is
// mt19937_64; one inversion draw consumes one 64-bit word, one normal draw
// consumes two.
std::int64_t sample_binomial(std::mt19937_64& rng, std::int64_t trials, double p);

// splitmix64, used to derive independent per-cell stream seeds.
std::uint64_t splitmix64(std::uint64_t x);

std::uint64_t cell_stream_seed(std::uint64_t master_seed, int probe_index, int intensity_index);

}  // namespace mdiqrng::sim
