#pragma once

#include <string>

#include "mdiqrng/entropy.hpp"

namespace mdiqrng::config {

enum class SweepMode { Entropy, Fidelity };

struct SweepConfig {
    double loss_start_db = 0.0;
    double loss_stop_db = 15.0;
    double loss_step_db = 1.0;
    double mu_start = 0.05;
    double mu_stop = 1.0;
    double mu_step = 0.05;
    double fixed_loss_db = 2.6;  // loss used by the mu sweep
    bool reoptimize = true;      // re-optimize intensities per sweep point
    SweepMode mode = SweepMode::Entropy;
};

struct StabilityConfig {
    long long seconds = 180;
    double rounds_per_second = 3.125e6;  // f * tomography fraction
};

struct ExtractorFileConfig {
    std::size_t block_input_bits = 1'000'000;
    double eps_ext = 1e-10;
};

// One JSON document configures every subcommand; CLI flags override
// individual keys. Unknown keys are rejected.
struct RunConfig {
    decoy::ExperimentConfig experiment;
    sim::DetectorModel detector;
    entropy::CertifyOptions options;      // decoy/prefactor/dark_term/optimizer
    sim::AfterpulseModel afterpulse_model = sim::AfterpulseModel::Multiplicative;
    bool attach_fidelity = true;          // compute the fidelity bound in certify
    double loss_db = 0.0;                 // channel loss applied to detector.eta
    entropy::IntensityGrid intensity_grid;
    SweepConfig sweep;
    StabilityConfig stability;
    ExtractorFileConfig extractor;

    // Detector efficiency after channel loss.
    double effective_eta() const { return sim::loss_to_efficiency(detector.eta, loss_db); }

    // Detector with the loss folded into eta, as consumed by the simulator.
    sim::DetectorModel effective_detector() const {
        sim::DetectorModel d = detector;
        d.eta = effective_eta();
        return d;
    }

    void validate() const;
};

RunConfig parse_config(const std::string& json_text);
RunConfig load_config_file(const std::string& path);
std::string serialize_config(const RunConfig& cfg);

const char* sweep_mode_name(SweepMode m);
const char* prefactor_name(entropy::Prefactor p);
const char* dark_term_name(decoy::DarkTerm d);
const char* afterpulse_model_name(sim::AfterpulseModel m);

}  // namespace mdiqrng::config
