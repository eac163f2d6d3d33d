#include "mdiqrng/entropy.hpp"

#include <algorithm>
#include <cmath>

namespace mdiqrng::entropy {

double nynz_sq_lower(const tomo::ParamBounds& b) {
    double total = 0.0;
    for (const decoy::Interval* iv : {&b.ny, &b.nz}) {
        if (iv->lower <= 0.0 && iv->upper >= 0.0) continue;
        total += std::min(iv->lower * iv->lower, iv->upper * iv->upper);
    }
    return std::min(total, 1.0);
}

double min_entropy_objective(double a1_lower, double nynz_sq, double mu, Prefactor prefactor) {
    if (a1_lower <= 0.0 || mu <= 0.0) return 0.0;
    nynz_sq = std::clamp(nynz_sq, 0.0, 1.0);
    const double guess = 0.5 * (1.0 + std::sqrt(1.0 - nynz_sq));
    const double pref =
        2.0 * a1_lower * mu * (prefactor == Prefactor::Poisson ? std::exp(-mu) : std::exp(mu));
    return std::max(0.0, -pref * std::log2(guess));
}

CertReport certify(const decoy::CountsTable& counts, const decoy::ExperimentConfig& cfg,
                   double p_d, const CertifyOptions& options) {
    cfg.validate();
    CertReport rep;
    rep.mu = cfg.mu;
    rep.nu = options.decoy ? cfg.nu : 0.0;
    rep.epsilon_per_use = cfg.epsilon;

    decoy::ProbabilityBounds pb = decoy::click_probability_bounds(counts, cfg);
    pb = options.decoy ? decoy::single_photon_bounds_decoy(pb, cfg, p_d, options.dark_term)
                       : decoy::single_photon_bounds_nondecoy(pb, cfg.mu, p_d);
    rep.chernoff_uses = pb.chernoff_uses;
    rep.epsilon_total = cfg.epsilon * pb.chernoff_uses;

    if (options.prefactor == Prefactor::Literal) pb.flags.emplace_back("prefactor:literal");

    // a1 touching zero certifies nothing, but the collapsed region still
    // carries a (degraded) fidelity bound.
    const tomo::ParamBounds params = tomo::povm_parameter_bounds_clamped(pb.single_photon, 0.0);
    rep.no_randomness = params.a1.lower <= 0.0;
    rep.params = params;
    if (rep.no_randomness) {
        pb.flags.emplace_back("no_randomness:a1_lower_zero");
    } else {
        rep.a1_lower = params.a1.lower;
        rep.nynz_sq_lower = nynz_sq_lower(params);
        rep.h_min = min_entropy_objective(rep.a1_lower, rep.nynz_sq_lower, cfg.mu,
                                          options.prefactor);
    }
    rep.bit_rate_hz = rep.h_min * cfg.clock_hz;

    if (options.fidelity_reference) {
        const qmath::Povm ref = tomo::simulated_povm(*options.fidelity_reference);
        tomo::ParamBounds fid_box =
            rep.no_randomness ? tomo::povm_parameter_bounds_clamped(pb.single_photon, 1e-9)
                              : params;
        if (fid_box.a1.upper <= 1e-9) {
            rep.fidelity_lower = 0.0;
            pb.flags.emplace_back("fidelity:region_collapsed");
        } else {
            try {
                rep.fidelity_lower = tomo::min_fidelity(fid_box, ref, options.optimizer);
            } catch (const InfeasibleRegion&) {
                rep.fidelity_lower = 0.0;
                pb.flags.emplace_back("fidelity:infeasible_region");
            }
        }
    }

    const double q = options.tomography_fraction;
    if (q > 0.0 && q < 1.0) {
        rep.consumption_bits_per_s = (3.0 + std::log2(1.0 / q)) * cfg.clock_hz * q;
    }
    rep.flags = std::move(pb.flags);
    pb.flags.clear();
    rep.bounds = std::move(pb);
    return rep;
}

IntensitySearchResult optimize_intensities(const sim::DetectorModel& detector,
                                           decoy::ExperimentConfig base, const IntensityGrid& grid,
                                           const CertifyOptions& options, sim::AfterpulseModel ap,
                                           bool parallel) {
    if (!(grid.mu_step > 0.0) || !(grid.nu_step > 0.0)) {
        throw ConfigError("intensity grid steps must be positive");
    }
    detector.validate();

    // Lattice over 0 < nu < mu <= 1 (decoy) or just mu (non-decoy).
    std::vector<GridPoint> pts;
    const int mu_n = static_cast<int>(std::floor(1.0 / grid.mu_step + 1e-9));
    for (int im = 1; im <= mu_n; ++im) {
        const double mu = im * grid.mu_step;
        if (mu > 1.0 + 1e-12) break;
        if (options.decoy) {
            for (int iv = 1;; ++iv) {
                const double nu = iv * grid.nu_step;
                if (nu >= mu - 1e-12) break;
                pts.push_back({mu, nu, 0.0});
            }
        } else {
            pts.push_back({mu, 0.0, 0.0});
        }
    }

    CertifyOptions opts = options;
    opts.fidelity_reference.reset();  // entropy objective only on the lattice

#pragma omp parallel for schedule(dynamic, 8) if (parallel)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(pts.size()); ++i) {
        decoy::ExperimentConfig cfg = base;
        cfg.mu = pts[i].mu;
        cfg.nu = options.decoy ? pts[i].nu : 0.0;
        const decoy::CountsTable counts = sim::expected_counts(cfg, detector, ap, options.decoy);
        pts[i].h = certify(counts, cfg, detector.p_d, opts).h_min;
    }

    // Argmax with deterministic tie-breaking toward smaller mu, then nu.
    IntensitySearchResult res;
    res.h_star = -1.0;
    for (const GridPoint& p : pts) {
        if (p.h > res.h_star) {
            res.h_star = p.h;
            res.mu_star = p.mu;
            res.nu_star = p.nu;
        }
    }
    res.all_zero = res.h_star <= 0.0;
    res.trace = std::move(pts);
    return res;
}

}  // namespace mdiqrng::entropy
