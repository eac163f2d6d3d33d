#include "mdiqrng/commands.hpp"

#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include "mdiqrng/counts_csv.hpp"
#include "mdiqrng/extract.hpp"
#include "mdiqrng/report.hpp"

namespace mdiqrng::commands {

namespace {

using io::format_double;

entropy::CertifyOptions certify_options(const config::RunConfig& cfg, bool decoy,
                                        bool with_fidelity, double mu, double eta_eff) {
    entropy::CertifyOptions o = cfg.options;
    o.decoy = decoy;
    o.fidelity_reference.reset();
    if (with_fidelity) o.fidelity_reference = tomo::SimModel{mu, eta_eff};
    return o;
}

// Decoy-optimal intensities at one channel point; falls back to the
// configured intensities when nothing on the grid certifies randomness.
std::pair<double, double> optimal_intensities(const config::RunConfig& cfg,
                                              const sim::DetectorModel& det) {
    if (!cfg.sweep.reoptimize) return {cfg.experiment.mu, cfg.experiment.nu};
    entropy::CertifyOptions opts = cfg.options;
    opts.decoy = true;
    opts.fidelity_reference.reset();
    const entropy::IntensitySearchResult r = entropy::optimize_intensities(
        det, cfg.experiment, cfg.intensity_grid, opts, cfg.afterpulse_model, false);
    if (r.all_zero) return {cfg.experiment.mu, cfg.experiment.nu};
    return {r.mu_star, r.nu_star};
}

double best_nu_for_mu(const config::RunConfig& cfg, const sim::DetectorModel& det, double mu) {
    entropy::CertifyOptions opts = cfg.options;
    opts.decoy = true;
    opts.fidelity_reference.reset();
    double best_h = -1.0;
    double best_nu = cfg.intensity_grid.nu_step;
    for (int iv = 1;; ++iv) {
        const double nu = iv * cfg.intensity_grid.nu_step;
        if (nu >= mu - 1e-12) break;
        decoy::ExperimentConfig e = cfg.experiment;
        e.mu = mu;
        e.nu = nu;
        const auto counts = sim::expected_counts(e, det, cfg.afterpulse_model, true);
        const double h = entropy::certify(counts, e, det.p_d, opts).h_min;
        if (h > best_h) {
            best_h = h;
            best_nu = nu;
        }
    }
    return best_nu;
}

struct PointValues {
    double decoy_value = 0.0;
    double nondecoy_value = 0.0;
};

// Evaluate one sweep point: decoy and non-decoy analyses of the same
// intensities, reporting h_min or the fidelity lower bound.
PointValues evaluate_point(const config::RunConfig& cfg, const sim::DetectorModel& det, double mu,
                           double nu, config::SweepMode mode) {
    decoy::ExperimentConfig e = cfg.experiment;
    e.mu = mu;
    e.nu = nu;
    const bool fidelity = mode == config::SweepMode::Fidelity;
    PointValues v;
    {
        const auto counts = sim::expected_counts(e, det, cfg.afterpulse_model, true);
        const auto rep =
            entropy::certify(counts, e, det.p_d, certify_options(cfg, true, fidelity, mu, det.eta));
        v.decoy_value = fidelity ? rep.fidelity_lower.value_or(0.0) : rep.h_min;
    }
    {
        const auto counts = sim::expected_counts(e, det, cfg.afterpulse_model, false);
        const auto rep = entropy::certify(counts, e, det.p_d,
                                          certify_options(cfg, false, fidelity, mu, det.eta));
        v.nondecoy_value = fidelity ? rep.fidelity_lower.value_or(0.0) : rep.h_min;
    }
    return v;
}

}  // namespace

int cmd_simulate(const config::RunConfig& cfg, bool sampled, std::uint64_t seed,
                 const std::string& out_path) {
    const sim::SimMode mode = sampled ? sim::SimMode::sampled(seed) : sim::SimMode::expectation();
    const auto counts = sim::sample_counts(cfg.experiment, cfg.effective_detector(), mode,
                                           cfg.afterpulse_model, cfg.options.decoy);
    io::write_file_atomic(out_path, io::counts_to_csv(counts));
    return kExitCertified;
}

int cmd_certify(const config::RunConfig& cfg, const std::string& counts_path,
                const std::string& out_path) {
    const decoy::CountsTable counts = io::read_counts_csv_file(counts_path);
    const entropy::CertifyOptions opts = certify_options(
        cfg, cfg.options.decoy, cfg.attach_fidelity, cfg.experiment.mu, cfg.effective_eta());
    const entropy::CertReport rep =
        entropy::certify(counts, cfg.experiment, cfg.detector.p_d, opts);
    io::write_file_atomic(out_path, report::cert_report_json(rep));
    return rep.h_min > 0.0 ? kExitCertified : kExitZero;
}

int cmd_optimize(const config::RunConfig& cfg, const std::string& out_path,
                 const std::string& trace_csv_path) {
    entropy::CertifyOptions opts = cfg.options;
    opts.fidelity_reference.reset();
    const entropy::IntensitySearchResult res = entropy::optimize_intensities(
        cfg.effective_detector(), cfg.experiment, cfg.intensity_grid, opts, cfg.afterpulse_model);
    io::write_file_atomic(out_path, report::intensity_search_json(res));
    if (!trace_csv_path.empty()) {
        std::ostringstream csv;
        csv << "mu,nu,h_min\n";
        for (const entropy::GridPoint& p : res.trace) {
            csv << format_double(p.mu) << ',' << format_double(p.nu) << ','
                << format_double(p.h) << '\n';
        }
        io::write_file_atomic(trace_csv_path, csv.str());
    }
    return res.all_zero ? kExitZero : kExitCertified;
}

int cmd_sweep_loss(const config::RunConfig& cfg, const std::string& out_path) {
    std::vector<double> losses;
    for (double L = cfg.sweep.loss_start_db; L <= cfg.sweep.loss_stop_db + 1e-9;
         L += cfg.sweep.loss_step_db) {
        losses.push_back(L);
    }
    struct Row {
        double mu, nu;
        PointValues v;
    };
    std::vector<Row> rows(losses.size());

#pragma omp parallel for schedule(dynamic)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(losses.size()); ++i) {
        sim::DetectorModel det = cfg.detector;
        det.eta = sim::loss_to_efficiency(cfg.detector.eta, cfg.loss_db + losses[i]);
        const auto [mu, nu] = optimal_intensities(cfg, det);
        rows[i] = {mu, nu, evaluate_point(cfg, det, mu, nu, cfg.sweep.mode)};
    }

    const bool fid = cfg.sweep.mode == config::SweepMode::Fidelity;
    std::ostringstream csv;
    csv << "loss_db," << (fid ? "fidelity_decoy,fidelity_nondecoy" : "h_min_decoy,h_min_nondecoy")
        << ",mu_opt,nu_opt\n";
    for (std::size_t i = 0; i < losses.size(); ++i) {
        csv << format_double(losses[i]) << ',' << format_double(rows[i].v.decoy_value) << ','
            << format_double(rows[i].v.nondecoy_value) << ',' << format_double(rows[i].mu) << ','
            << format_double(rows[i].nu) << '\n';
    }
    io::write_file_atomic(out_path, csv.str());
    return kExitCertified;
}

int cmd_sweep_mu(const config::RunConfig& cfg, const std::string& out_path) {
    std::vector<double> mus;
    for (double mu = cfg.sweep.mu_start; mu <= cfg.sweep.mu_stop + 1e-9; mu += cfg.sweep.mu_step) {
        mus.push_back(std::min(mu, 1.0));
    }
    sim::DetectorModel det = cfg.detector;
    det.eta = sim::loss_to_efficiency(cfg.detector.eta, cfg.loss_db + cfg.sweep.fixed_loss_db);

    struct Row {
        double nu;
        PointValues v;
    };
    std::vector<Row> rows(mus.size());

#pragma omp parallel for schedule(dynamic)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(mus.size()); ++i) {
        const double nu = cfg.sweep.reoptimize ? best_nu_for_mu(cfg, det, mus[i])
                                               : std::min(cfg.experiment.nu, mus[i] / 2.0);
        rows[i] = {nu, evaluate_point(cfg, det, mus[i], nu, cfg.sweep.mode)};
    }

    const bool fid = cfg.sweep.mode == config::SweepMode::Fidelity;
    std::ostringstream csv;
    csv << "mu," << (fid ? "fidelity_decoy,fidelity_nondecoy" : "h_min_decoy,h_min_nondecoy")
        << ",nu_opt\n";
    for (std::size_t i = 0; i < mus.size(); ++i) {
        csv << format_double(mus[i]) << ',' << format_double(rows[i].v.decoy_value) << ','
            << format_double(rows[i].v.nondecoy_value) << ',' << format_double(rows[i].nu) << '\n';
    }
    io::write_file_atomic(out_path, csv.str());
    return kExitCertified;
}

int cmd_stability(const config::RunConfig& cfg, std::uint64_t seed, const std::string& out_path) {
    const long long seconds = cfg.stability.seconds;
    decoy::ExperimentConfig base = cfg.experiment;
    base.n_rounds = cfg.stability.rounds_per_second;
    const sim::DetectorModel det = cfg.effective_detector();

    struct Row {
        double h = 0.0;
        double fid = 0.0;
    };
    std::vector<Row> rows(static_cast<std::size_t>(seconds));

#pragma omp parallel for schedule(dynamic)
    for (std::int64_t s = 0; s < seconds; ++s) {
        // One independent seed per simulated second.
        const std::uint64_t ssec =
            sim::splitmix64(sim::splitmix64(seed) ^ sim::splitmix64(static_cast<std::uint64_t>(s) + 1));
        const auto counts = sim::sample_counts(base, det, sim::SimMode::sampled(ssec),
                                               cfg.afterpulse_model, cfg.options.decoy);
        const auto rep = entropy::certify(
            counts, base, det.p_d,
            certify_options(cfg, cfg.options.decoy, cfg.attach_fidelity, base.mu, det.eta));
        rows[static_cast<std::size_t>(s)] = {rep.h_min, rep.fidelity_lower.value_or(0.0)};
    }

    std::ostringstream csv;
    csv << "second,h_min,fidelity\n";
    for (long long s = 0; s < seconds; ++s) {
        csv << s << ',' << format_double(rows[static_cast<std::size_t>(s)].h) << ','
            << format_double(rows[static_cast<std::size_t>(s)].fid) << '\n';
    }
    io::write_file_atomic(out_path, csv.str());
    return kExitCertified;
}

int cmd_extract(const config::RunConfig& cfg, const std::string& raw_path, double h_min,
                const std::string& seed_path, std::optional<std::uint64_t> test_seed,
                const std::string& out_path, const std::string& report_path) {
    const std::string raw_bytes = io::read_file(raw_path);
    if (raw_bytes.empty()) throw IoError("raw input file is empty: " + raw_path);
    const std::size_t raw_bits = raw_bytes.size() * 8;

    extract::ExtractorConfig ecfg;
    ecfg.block_input_bits = cfg.extractor.block_input_bits;
    ecfg.eps_ext = cfg.extractor.eps_ext;
    ecfg.h_min = h_min;
    const std::size_t n = ecfg.block_input_bits;
    const std::size_t m = ecfg.output_bits();
    if (m < 1) throw ConfigError("no extractable bits at this h_min and block size");
    const std::size_t seed_bits = n + m - 1;

    if (test_seed) {
        // Test-only seed expanded from a PRNG; flagged in the report.
        extract::BitVector s(seed_bits);
        std::mt19937_64 rng(*test_seed);
        for (std::size_t w = 0; w < (seed_bits + 63) / 64; ++w) s.store_word(w, rng());
        ecfg.seed = std::move(s);
    } else {
        const std::string seed_bytes = io::read_file(seed_path);
        if (seed_bytes.size() != (seed_bits + 7) / 8) {
            throw IoError("seed file must be exactly " + std::to_string((seed_bits + 7) / 8) +
                          " bytes (n + m - 1 = " + std::to_string(seed_bits) + " bits)");
        }
        ecfg.seed = extract::BitVector::from_bytes(
            {reinterpret_cast<const std::uint8_t*>(seed_bytes.data()), seed_bytes.size()},
            seed_bits);
    }

    const std::size_t blocks = raw_bits / n;  // final partial block discarded
    if (blocks == 0) {
        throw IoError("raw input shorter than one extractor block (" + std::to_string(n) +
                      " bits)");
    }
    extract::BitVector output(blocks * m);
    const auto all_raw = extract::BitVector::from_bytes(
        {reinterpret_cast<const std::uint8_t*>(raw_bytes.data()), raw_bytes.size()}, raw_bits);
    for (std::size_t blk = 0; blk < blocks; ++blk) {
        extract::BitVector block(n);
        for (std::size_t w = 0; w < block.words().size(); ++w) {
            // Block boundaries are byte-unaligned in general; copy bitwise.
            std::uint64_t word = 0;
            for (std::size_t bit = 0; bit < 64 && w * 64 + bit < n; ++bit) {
                word |= static_cast<std::uint64_t>(all_raw.get(blk * n + w * 64 + bit)) << bit;
            }
            block.store_word(w, word);
        }
        const extract::BitVector ext = extract::toeplitz_extract(block, ecfg);
        for (std::size_t i = 0; i < m; ++i) output.set(blk * m + i, ext.get(i));
    }

    const auto out_bytes = output.to_bytes();
    io::write_file_atomic(out_path,
                          std::string(reinterpret_cast<const char*>(out_bytes.data()),
                                      out_bytes.size()));

    std::string rep_json;
    if (output.size() >= 100'000) {
        const extract::SelfTestReport rep = extract::uniformity_selftest(output);
        rep_json = report::selftest_json(rep, raw_bits, output.size(), test_seed.has_value());
    } else {
        extract::SelfTestReport empty{};
        empty.monobit_p = std::nan("");
        empty.chisq_byte_p = std::nan("");
        rep_json = report::selftest_json(empty, raw_bits, output.size(), test_seed.has_value());
    }
    io::write_file_atomic(report_path, rep_json);
    return kExitCertified;
}

}  // namespace mdiqrng::commands
