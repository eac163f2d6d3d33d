// Command-line front end for the measurement-device-independent QRNG
// certification pipeline: simulation, decoy-state estimation, min-entropy
// certification, intensity optimization, figure-style sweeps and Toeplitz
// extraction.
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "mdiqrng/commands.hpp"
#include "mdiqrng/counts_csv.hpp"

namespace {

using mdiqrng::config::RunConfig;

struct CommonFlags {
    std::string config_path;
    std::string out_path = "out.csv";
    std::uint64_t seed = 1;
    std::optional<std::string> mode;
    std::optional<bool> no_decoy;
    std::optional<std::string> prefactor;
    std::optional<std::string> afterpulse_model;
    std::optional<double> loss_db;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--config", f.config_path, "JSON configuration file");
    cmd->add_option("--out", f.out_path, "output file path");
    cmd->add_option("--seed", f.seed, "PRNG seed for sampled modes");
    cmd->add_flag_callback("--no-decoy", [&f] { f.no_decoy = true; },
                           "analyze without the decoy intensity");
    cmd->add_option("--prefactor", f.prefactor, "min-entropy prefactor: poisson|literal")
        ->check(CLI::IsMember({"poisson", "literal"}));
    cmd->add_option("--afterpulse-model", f.afterpulse_model, "afterpulse semantics: mult|add")
        ->check(CLI::IsMember({"mult", "add"}));
    cmd->add_option("--loss-db", f.loss_db, "channel loss in dB applied to the detector");
    cmd->add_option("--mode", f.mode, "sweep quantity: entropy|fidelity")
        ->check(CLI::IsMember({"entropy", "fidelity"}));
}

// Config-file values first, CLI flags override.
RunConfig resolve_config(const CommonFlags& f) {
    RunConfig cfg = f.config_path.empty() ? RunConfig{}
                                          : mdiqrng::config::load_config_file(f.config_path);
    if (f.no_decoy) cfg.options.decoy = false;
    if (f.prefactor) {
        cfg.options.prefactor = *f.prefactor == "literal" ? mdiqrng::entropy::Prefactor::Literal
                                                          : mdiqrng::entropy::Prefactor::Poisson;
    }
    if (f.afterpulse_model) {
        cfg.afterpulse_model = *f.afterpulse_model == "add"
                                   ? mdiqrng::sim::AfterpulseModel::Additive
                                   : mdiqrng::sim::AfterpulseModel::Multiplicative;
    }
    if (f.loss_db) cfg.loss_db = *f.loss_db;
    if (f.mode) {
        cfg.sweep.mode = *f.mode == "fidelity" ? mdiqrng::config::SweepMode::Fidelity
                                               : mdiqrng::config::SweepMode::Entropy;
    }
    cfg.validate();
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"MDI quantum random number certification pipeline"};
    app.require_subcommand(1);

    CommonFlags f;

    auto* c_simulate = app.add_subcommand("simulate", "emit a counts CSV from the detector model");
    bool sampled = false;
    c_simulate->add_flag("--sampled", sampled, "binomial sampling instead of exact expectations");
    add_common(c_simulate, f);

    auto* c_certify = app.add_subcommand("certify", "certify a counts CSV file");
    std::string counts_path;
    c_certify->add_option("counts", counts_path, "counts CSV file")->required();
    add_common(c_certify, f);

    auto* c_optimize = app.add_subcommand("optimize", "brute-force signal/decoy intensity search");
    std::string trace_path;
    c_optimize->add_option("--trace", trace_path, "also write the evaluated grid as CSV");
    add_common(c_optimize, f);

    auto* c_sweep_loss = app.add_subcommand("sweep-loss", "decoy vs non-decoy over channel loss");
    add_common(c_sweep_loss, f);

    auto* c_sweep_mu = app.add_subcommand("sweep-mu", "decoy vs non-decoy over signal intensity");
    add_common(c_sweep_mu, f);

    auto* c_stability = app.add_subcommand("stability", "per-second certification, sampled counts");
    long long seconds = -1;
    c_stability->add_option("--seconds", seconds, "number of simulated seconds");
    add_common(c_stability, f);

    auto* c_extract = app.add_subcommand("extract", "Toeplitz-hash randomness extraction");
    std::string raw_path, seed_file, report_path = "extract_report.json";
    double h_min = 0.0;
    std::optional<std::uint64_t> test_seed;
    c_extract->add_option("raw", raw_path, "raw bit file")->required();
    c_extract->add_option("--h-min", h_min, "certified min-entropy per bit")->required();
    c_extract->add_option("--seed-file", seed_file, "Toeplitz seed bit file");
    c_extract->add_option("--test-seed",
                          [&test_seed](const CLI::results_t& r) {
                              test_seed = std::stoull(r[0]);
                              return true;
                          },
                          "PRNG-expanded seed, for testing only");
    c_extract->add_option("--report", report_path, "self-test report path");
    add_common(c_extract, f);

    CLI11_PARSE(app, argc, argv);

    try {
        using namespace mdiqrng::commands;
        const RunConfig cfg = resolve_config(f);
        if (*c_simulate) return cmd_simulate(cfg, sampled, f.seed, f.out_path);
        if (*c_certify) return cmd_certify(cfg, counts_path, f.out_path);
        if (*c_optimize) return cmd_optimize(cfg, f.out_path, trace_path);
        if (*c_sweep_loss) return cmd_sweep_loss(cfg, f.out_path);
        if (*c_sweep_mu) return cmd_sweep_mu(cfg, f.out_path);
        if (*c_stability) {
            RunConfig c2 = cfg;
            if (seconds > 0) c2.stability.seconds = seconds;
            return cmd_stability(c2, f.seed, f.out_path);
        }
        if (*c_extract) {
            if (seed_file.empty() && !test_seed) {
                std::cerr << "extract: provide --seed-file or --test-seed\n";
                return kExitError;
            }
            return cmd_extract(cfg, raw_path, h_min, seed_file, test_seed, f.out_path,
                               report_path);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return mdiqrng::commands::kExitError;
    }
    return mdiqrng::commands::kExitError;
}
