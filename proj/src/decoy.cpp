#include "mdiqrng/decoy.hpp"

#include <algorithm>
#include <cmath>

namespace mdiqrng::decoy {

namespace {

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

}  // namespace

void ExperimentConfig::validate() const {
    if (!(nu >= 0.0) || !(nu < mu) || !(mu <= 1.0)) {
        throw ConfigError("intensities must satisfy 0 <= nu < mu <= 1");
    }
    double sum = 0.0;
    for (double e : eta_j) {
        if (!(e > 0.0)) throw ConfigError("every probe proportion eta_j must be positive");
        sum += e;
    }
    if (std::abs(sum - 1.0) > 1e-12) throw ConfigError("probe proportions eta_j must sum to 1");
    if (!(p_s > 0.0 && p_s < 1.0)) throw ConfigError("signal probability p_s must be in (0,1)");
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw ConfigError("epsilon must be in (0,1)");
    if (!(n_rounds >= 1.0)) throw ConfigError("n_rounds must be at least 1");
    if (!(clock_hz > 0.0)) throw ConfigError("clock_hz must be positive");
}

void CountsTable::validate() const {
    for (qmath::ProbeId j : qmath::kAllProbes) {
        for (IntensityLabel l : {IntensityLabel::Signal, IntensityLabel::Decoy}) {
            const CountsCell& c = at(j, l);
            if (c.trials < 0 || c.clicks < 0 || c.clicks > c.trials) {
                throw IncompleteData(std::string("invalid counts for probe ") +
                                     qmath::probe_name(j) + ", intensity " + intensity_name(l) +
                                     ": need 0 <= clicks <= trials");
            }
        }
    }
}

double chernoff_delta(double x, double epsilon) {
    const double lg = std::log(epsilon / 2.0);  // negative
    if (!(x > -lg)) {
        throw DegenerateStatistics("count too small for a Chernoff interval");
    }
    return (-3.0 * lg + std::sqrt(-8.0 * x * lg + lg * lg)) / (2.0 * (x + lg));
}

ExpectationInterval expectation_bounds(double clicks, double epsilon, double trials) {
    const double lg = std::log(epsilon / 2.0);
    if (!(clicks > -lg)) return {0.0, trials, true};
    const double d = chernoff_delta(clicks, epsilon);
    if (d >= 1.0) return {0.0, trials, true};
    return {clicks / (1.0 + d), clicks / (1.0 - d), false};
}

ProbabilityBounds click_probability_bounds(const CountsTable& counts,
                                           const ExperimentConfig& cfg) {
    counts.validate();
    ProbabilityBounds pb;

    int nu_cells = 0;
    for (qmath::ProbeId j : qmath::kAllProbes) {
        if (counts.at(j, IntensityLabel::Decoy).trials > 0) ++nu_cells;
        if (counts.at(j, IntensityLabel::Signal).trials <= 0) {
            throw IncompleteData(std::string("missing signal counts for probe ") +
                                 qmath::probe_name(j));
        }
    }
    if (nu_cells != 0 && nu_cells != 4) {
        throw IncompleteData("decoy counts must be present for all probes or none");
    }

    const auto rate_interval = [&](const CountsCell& cell, qmath::ProbeId j, IntensityLabel l) {
        const double trials = static_cast<double>(cell.trials);
        const ExpectationInterval e =
            expectation_bounds(static_cast<double>(cell.clicks), cfg.epsilon, trials);
        pb.chernoff_uses += 2;
        if (e.degenerate) {
            ++pb.degenerate_cells;
            pb.flags.push_back(std::string("degenerate_statistics:") + qmath::probe_name(j) + ":" +
                               intensity_name(l));
        }
        Interval iv{e.lower / trials, e.upper / trials};
        if (iv.lower < 0.0 || iv.upper > 1.0) ++pb.clamp_events;
        iv.lower = clamp01(iv.lower);
        iv.upper = clamp01(iv.upper);
        return iv;
    };

    for (qmath::ProbeId j : qmath::kAllProbes) {
        const int i = qmath::probe_index(j);
        pb.mu_rate[i] = rate_interval(counts.at(j, IntensityLabel::Signal), j,
                                      IntensityLabel::Signal);
        if (nu_cells == 4) {
            pb.nu_rate[i] = rate_interval(counts.at(j, IntensityLabel::Decoy), j,
                                          IntensityLabel::Decoy);
            pb.has_nu[i] = true;
        }
    }
    return pb;
}

ProbabilityBounds single_photon_bounds_decoy(ProbabilityBounds pb, const ExperimentConfig& cfg,
                                             double p_d, DarkTerm dark_term) {
    if (!(cfg.nu > 0.0)) {
        throw ConfigError("decoy estimation requires nu > 0; use the non-decoy bounds instead");
    }
    for (bool h : pb.has_nu) {
        if (!h) throw IncompleteData("decoy single-photon bounds need decoy-intensity counts");
    }
    const double mu = cfg.mu;
    const double nu = cfg.nu;
    const double front = mu / (mu * nu - nu * nu);
    const double dark_coef = (dark_term == DarkTerm::Halved ? 0.5 : 1.0) *
                             (mu * mu - nu * nu) / (mu * mu);
    const double e_mu = std::exp(mu);
    const double e_nu = std::exp(nu);

    // The decoy-intensity probabilities enter through the decoy counts.
    pb.flags.emplace_back("nu_rates_from_nu_counts");
    if (dark_term == DarkTerm::Full) pb.flags.emplace_back("dark_term:full");

    for (int i = 0; i < 4; ++i) {
        double lower = front * (pb.nu_rate[i].lower * e_nu -
                                pb.mu_rate[i].upper * e_mu * nu * nu / (mu * mu) -
                                dark_coef * p_d);
        double upper = pb.nu_rate[i].upper * e_nu / nu;
        if (lower < 0.0 || lower > 1.0) ++pb.clamp_events;
        if (upper > 1.0) ++pb.clamp_events;
        lower = clamp01(lower);
        upper = clamp01(upper);
        if (lower > upper) {
            ++pb.clamp_events;
            pb.flags.push_back(std::string("inconsistent_interval:") +
                               qmath::probe_name(qmath::kAllProbes[i]));
            lower = upper;
        }
        pb.single_photon[i] = {lower, upper};
    }
    pb.has_single_photon = true;
    return pb;
}

ProbabilityBounds single_photon_bounds_nondecoy(ProbabilityBounds pb, double mu, double p_d) {
    if (!(mu > 0.0)) throw ConfigError("non-decoy bounds require mu > 0");
    const double e_neg = std::exp(-mu);
    const double single_weight = mu * e_neg;
    const double multi_mass = 1.0 - e_neg - single_weight;  // worst-case multi-photon clicks

    for (int i = 0; i < 4; ++i) {
        double lower = (pb.mu_rate[i].lower - e_neg * p_d - multi_mass) / single_weight;
        double upper = pb.mu_rate[i].upper / single_weight;
        if (lower < 0.0 || upper > 1.0) ++pb.clamp_events;
        lower = clamp01(lower);
        upper = clamp01(upper);
        if (lower > upper) {
            ++pb.clamp_events;
            lower = upper;
        }
        pb.single_photon[i] = {lower, upper};
    }
    pb.has_single_photon = true;
    return pb;
}

}  // namespace mdiqrng::decoy
