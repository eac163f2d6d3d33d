#pragma once

#include <array>

#include "mdiqrng/decoy.hpp"
#include "mdiqrng/qmath.hpp"

namespace mdiqrng::tomo {

// Interval bounds on the four POVM parameters, derived from the per-probe
// single-photon intervals. Direction components are clamped into [-1,1].
struct ParamBounds {
    decoy::Interval a1;
    decoy::Interval nx;
    decoy::Interval ny;
    decoy::Interval nz;
};

// Reference model of the measurement: a detector of efficiency eta behind
// the source of mean photon number mu, photons split evenly over the two
// time bins.
struct SimModel {
    double mu = 0.45;
    double eta = 0.55;

    void validate() const;
};

struct OptimizerSettings {
    int grid_points = 21;      // coarse lattice points per axis
    int refine_count = 10;     // best grid points used as refinement starts
    int refine_max_iter = 200; // Nelder-Mead iterations per start
    double margin = 1e-4;      // subtracted from the refined minimum
    bool parallel = true;      // OpenMP over the lattice
};

// Invert the per-probe linear relations p_1(1|j) = a1 (1 + n . r_j) into
// interval bounds on (a1, nx, ny, nz). Probe order (Z0, Z1, X+, Y+).
// Throws NoRandomness when the a1 interval touches zero.
ParamBounds povm_parameter_bounds(const std::array<decoy::Interval, 4>& p1);

// Same inversion with the a1 lower end floored at a1_floor instead of
// throwing; used by the fidelity path, where a collapsed region still has a
// well-defined (degraded) minimum.
ParamBounds povm_parameter_bounds_clamped(const std::array<decoy::Interval, 4>& p1,
                                          double a1_floor);

// Expected POVM of the reference model. No-click and double-click events
// are recorded as outcome 0; dark counts are excluded by default and can be
// folded into both bins' click probabilities for sensitivity studies.
qmath::Povm simulated_povm(const SimModel& m, double p_d = 0.0);

// True iff every parameter lies in its interval, |n| <= 1, and the
// resulting POVM elements are PSD.
bool feasible(const qmath::PovmParams& p, const ParamBounds& b);

// Certified lower bound on the fidelity between any tomography-consistent
// POVM and the reference: coarse grid over the parameter box, Nelder-Mead
// refinement from the best grid points, minus the safety margin. Throws
// InfeasibleRegion when no feasible point exists in the box.
double min_fidelity(const ParamBounds& b, const qmath::Povm& reference,
                    const OptimizerSettings& opt = {});

}  // namespace mdiqrng::tomo
