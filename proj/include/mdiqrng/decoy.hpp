#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "mdiqrng/errors.hpp"
#include "mdiqrng/qmath.hpp"

namespace mdiqrng::decoy {

// Protocol-level settings shared by the simulator, the estimator and the
// certifier. Intensities are mean photon numbers of the phase-randomized
// coherent probes.
struct ExperimentConfig {
    double mu = 0.45;               // signal intensity
    double nu = 0.33;               // decoy intensity
    double n_rounds = 5.625e8;      // total test rounds N
    std::array<double, 4> eta_j = {0.25, 0.25, 0.25, 0.25};  // probe proportions
    double p_s = 0.5;               // probability of choosing the signal intensity
    double epsilon = 1e-10;         // Chernoff failure probability per use
    double clock_hz = 312.5e6;      // system frequency f

    void validate() const;  // throws ConfigError
};

enum class IntensityLabel { Signal = 0, Decoy = 1 };

inline const char* intensity_name(IntensityLabel l) {
    return l == IntensityLabel::Signal ? "signal" : "decoy";
}

struct CountsCell {
    std::int64_t clicks = 0;
    std::int64_t trials = 0;
};

// Observed '1' counts per (probe, intensity). A non-decoy experiment stores
// its data in the signal column with zero-trial decoy cells.
class CountsTable {
  public:
    CountsCell& at(qmath::ProbeId j, IntensityLabel l) {
        return cells_[qmath::probe_index(j)][static_cast<int>(l)];
    }
    const CountsCell& at(qmath::ProbeId j, IntensityLabel l) const {
        return cells_[qmath::probe_index(j)][static_cast<int>(l)];
    }

    void validate() const;  // 0 <= clicks <= trials everywhere

  private:
    std::array<std::array<CountsCell, 2>, 4> cells_{};
};

struct Interval {
    double lower = 0.0;
    double upper = 0.0;

    double width() const { return upper - lower; }
    bool contains(double v) const { return lower <= v && v <= upper; }
};

struct ExpectationInterval {
    double lower = 0.0;
    double upper = 0.0;
    bool degenerate = false;  // fallback [0, trials] was used
};

// Two-sided Chernoff half-width delta(x) for an observed count x and failure
// probability epsilon, split epsilon/2 per side. Strictly decreasing in x.
// Throws DegenerateStatistics when x <= -ln(epsilon/2), where the expression
// is undefined.
double chernoff_delta(double x, double epsilon);

// Expectation interval [m/(1+delta), m/(1-delta)] around an observed count m.
// When delta is undefined or >= 1 the trivial interval [0, trials] is
// returned with the degenerate flag set; certification then proceeds with
// the conservative interval.
ExpectationInterval expectation_bounds(double clicks, double epsilon, double trials);

// Coefficient of the dark-count subtraction in the decoy single-photon lower
// bound: Halved uses (mu^2-nu^2)/(2 mu^2) p_d, Full uses (mu^2-nu^2)/mu^2 p_d.
// Halved is the pipeline default; Full is the unconditionally conservative
// variant offered for sensitivity analysis.
enum class DarkTerm { Halved, Full };

// Per-probe click-probability and single-photon intervals, plus bookkeeping
// of every fallback and clamp applied along the way.
struct ProbabilityBounds {
    std::array<Interval, 4> mu_rate{};         // p_mu(1|j)
    std::array<Interval, 4> nu_rate{};         // p_nu(1|j), valid when has_nu
    std::array<Interval, 4> single_photon{};   // p_1(1|j)
    std::array<bool, 4> has_nu{};
    bool has_single_photon = false;
    int degenerate_cells = 0;
    int clamp_events = 0;
    int chernoff_uses = 0;
    std::vector<std::string> flags;
};

// Convert observed counts into clamped [0,1] click-probability intervals,
// dividing by each cell's recorded trial count. Signal cells are required
// for every probe; decoy cells must be either all present or all absent.
ProbabilityBounds click_probability_bounds(const CountsTable& counts,
                                           const ExperimentConfig& cfg);

// Decoy-state single-photon interval per probe:
//   lower = mu/(mu nu - nu^2) (pL_nu e^nu - pU_mu e^mu nu^2/mu^2 - c p_d)
//   upper = pU_nu e^nu / nu
// with c the DarkTerm coefficient, both clamped into [0,1]. The decoy
// probabilities are computed from the decoy-intensity counts.
ProbabilityBounds single_photon_bounds_decoy(ProbabilityBounds pb, const ExperimentConfig& cfg,
                                             double p_d, DarkTerm dark_term = DarkTerm::Halved);

// Signal-only single-photon interval: the multi-photon contribution is
// bounded by its worst case instead of being cancelled with a decoy
// intensity, so the interval is wider.
ProbabilityBounds single_photon_bounds_nondecoy(ProbabilityBounds pb, double mu, double p_d);

}  // namespace mdiqrng::decoy
