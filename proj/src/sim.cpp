#include "mdiqrng/sim.hpp"

#include <algorithm>
#include <cmath>

namespace mdiqrng::sim {

void DetectorModel::validate() const {
    if (!(eta > 0.0 && eta <= 1.0)) throw ConfigError("detector eta must be in (0,1]");
    if (!(p_d >= 0.0 && p_d <= 1.0)) throw ConfigError("p_d must be in [0,1]");
    if (!(eps_afterpulse >= 0.0 && eps_afterpulse <= 1.0)) {
        throw ConfigError("eps_afterpulse must be in [0,1]");
    }
    if (!(e_prep >= 0.0 && e_prep <= 0.5)) throw ConfigError("e_prep must be in [0,0.5]");
}

namespace {

// Fraction of the pulse intensity arriving in the monitored time bin.
double bin_fraction(qmath::ProbeId j) {
    switch (j) {
        case qmath::ProbeId::Z0: return 0.0;
        case qmath::ProbeId::Z1: return 1.0;
        case qmath::ProbeId::XPlus:
        case qmath::ProbeId::YPlus: return 0.5;
    }
    return 0.0;
}

double click_for_fraction(double frac, double intensity, const DetectorModel& d) {
    if (frac == 0.0) return d.p_d;
    return 1.0 - (1.0 - d.p_d) * std::exp(-d.eta * intensity * frac);
}

}  // namespace

double click_probability(qmath::ProbeId j, double intensity, const DetectorModel& d) {
    return click_for_fraction(bin_fraction(j), intensity, d);
}

double prep_error_click_probability(qmath::ProbeId j, double intensity, const DetectorModel& d) {
    // The orthogonal of Z0 is Z1 and vice versa; the orthogonals of X+/Y+
    // split the intensity over both bins just like X+/Y+ themselves.
    double orth_frac = bin_fraction(j);
    if (j == qmath::ProbeId::Z0) orth_frac = 1.0;
    if (j == qmath::ProbeId::Z1) orth_frac = 0.0;
    const double p = click_for_fraction(bin_fraction(j), intensity, d);
    const double p_orth = click_for_fraction(orth_frac, intensity, d);
    return (1.0 - d.e_prep) * p + d.e_prep * p_orth;
}

double apply_afterpulse(double p, double eps_ap) {
    return std::min(1.0, p * (1.0 + eps_ap));
}

std::array<double, 4> ensemble_click_probabilities(double intensity, const DetectorModel& d,
                                                   AfterpulseModel ap) {
    std::array<double, 4> ps{};
    for (qmath::ProbeId j : qmath::kAllProbes) {
        ps[qmath::probe_index(j)] = prep_error_click_probability(j, intensity, d);
    }
    if (ap == AfterpulseModel::Multiplicative) {
        for (double& p : ps) p = apply_afterpulse(p, d.eps_afterpulse);
    } else {
        const double mean = (ps[0] + ps[1] + ps[2] + ps[3]) / 4.0;
        for (double& p : ps) p = std::min(1.0, p + d.eps_afterpulse * mean);
    }
    return ps;
}

namespace {

struct CellSpec {
    double trials;
    double p;
};

CellSpec cell_spec(const decoy::ExperimentConfig& cfg, const DetectorModel& d, AfterpulseModel ap,
                   bool decoy_mode, qmath::ProbeId j, decoy::IntensityLabel l) {
    const int i = qmath::probe_index(j);
    if (l == decoy::IntensityLabel::Signal) {
        const double share = decoy_mode ? cfg.p_s : 1.0;
        return {cfg.n_rounds * cfg.eta_j[i] * share,
                ensemble_click_probabilities(cfg.mu, d, ap)[i]};
    }
    if (!decoy_mode) return {0.0, 0.0};
    return {cfg.n_rounds * cfg.eta_j[i] * (1.0 - cfg.p_s),
            ensemble_click_probabilities(cfg.nu, d, ap)[i]};
}

}  // namespace

decoy::CountsTable expected_counts(const decoy::ExperimentConfig& cfg, const DetectorModel& d,
                                   AfterpulseModel ap, bool decoy_mode) {
    d.validate();
    decoy::CountsTable t;
    for (qmath::ProbeId j : qmath::kAllProbes) {
        for (auto l : {decoy::IntensityLabel::Signal, decoy::IntensityLabel::Decoy}) {
            const CellSpec s = cell_spec(cfg, d, ap, decoy_mode, j, l);
            t.at(j, l) = {std::llround(s.trials * s.p), std::llround(s.trials)};
        }
    }
    return t;
}

decoy::CountsTable sample_counts(const decoy::ExperimentConfig& cfg, const DetectorModel& d,
                                 SimMode mode, AfterpulseModel ap, bool decoy_mode) {
    if (mode.kind == SimMode::Kind::Expectation) {
        return expected_counts(cfg, d, ap, decoy_mode);
    }
    d.validate();
    decoy::CountsTable t;
    for (qmath::ProbeId j : qmath::kAllProbes) {
        for (auto l : {decoy::IntensityLabel::Signal, decoy::IntensityLabel::Decoy}) {
            const CellSpec s = cell_spec(cfg, d, ap, decoy_mode, j, l);
            const std::int64_t trials = std::llround(s.trials);
            std::mt19937_64 rng(
                cell_stream_seed(mode.seed, qmath::probe_index(j), static_cast<int>(l)));
            t.at(j, l) = {sample_binomial(rng, trials, s.p), trials};
        }
    }
    return t;
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t cell_stream_seed(std::uint64_t master_seed, int probe_index, int intensity_index) {
    return splitmix64(splitmix64(master_seed) ^
                      (static_cast<std::uint64_t>(probe_index) * 2u +
                       static_cast<std::uint64_t>(intensity_index) + 1u));
}

namespace {

double uniform01(std::mt19937_64& rng) {
    // 53 random bits in (0,1]; never returns 0 so logs are safe.
    return (static_cast<double>(rng() >> 11) + 1.0) * 0x1.0p-53;
}

double log_binom_pmf(std::int64_t t, std::int64_t k, double p) {
    return std::lgamma(static_cast<double>(t) + 1.0) - std::lgamma(static_cast<double>(k) + 1.0) -
           std::lgamma(static_cast<double>(t - k) + 1.0) + static_cast<double>(k) * std::log(p) +
           static_cast<double>(t - k) * std::log1p(-p);
}

}  // namespace

std::int64_t sample_binomial(std::mt19937_64& rng, std::int64_t trials, double p) {
    if (trials <= 0 || p <= 0.0) return 0;
    if (p >= 1.0) return trials;
    const double mean = static_cast<double>(trials) * p;
    const double sigma = std::sqrt(mean * (1.0 - p));

    if (mean < 1e4) {
        // CDF inversion anchored at mean - 12 sigma; the mass below the
        // anchor (and beyond the matching upper cap) is < 1e-26 and ignored.
        const std::int64_t k_lo =
            std::max<std::int64_t>(0, static_cast<std::int64_t>(std::floor(mean - 12.0 * sigma - 5.0)));
        const std::int64_t k_hi =
            std::min<std::int64_t>(trials, static_cast<std::int64_t>(std::ceil(mean + 14.0 * sigma + 5.0)));
        const double u = uniform01(rng);
        double pmf = std::exp(log_binom_pmf(trials, k_lo, p));
        double cdf = pmf;
        std::int64_t k = k_lo;
        while (cdf < u && k < k_hi) {
            // pmf(k+1)/pmf(k) = (t-k)/(k+1) * p/(1-p)
            pmf *= static_cast<double>(trials - k) / static_cast<double>(k + 1) * p / (1.0 - p);
            ++k;
            cdf += pmf;
        }
        return k;
    }

    // Box-Muller normal draw (two words) with continuity correction.
    const double u1 = uniform01(rng);
    const double u2 = uniform01(rng);
    const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    const double k = std::floor(mean + z * sigma + 0.5);
    return std::clamp<std::int64_t>(static_cast<std::int64_t>(k), 0, trials);
}

}  // namespace mdiqrng::sim
