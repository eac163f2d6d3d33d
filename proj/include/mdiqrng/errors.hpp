#pragma once

#include <stdexcept>
#include <string>

namespace mdiqrng {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Chernoff interval undefined for the observed count (caller falls back to
// the trivial [0, trials] interval).
struct DegenerateStatistics : Error {
    using Error::Error;
};

// Counts table is missing a required (probe, intensity) cell.
struct IncompleteData : Error {
    using Error::Error;
};

// Probe parameters produce a non-positive-semidefinite POVM element.
struct InfeasibleParams : Error {
    using Error::Error;
};

// The single-photon lower bounds collapsed; the conclusive-outcome weight
// can be zero and no randomness is certifiable.
struct NoRandomness : Error {
    using Error::Error;
};

// The constrained parameter region contains no feasible point.
struct InfeasibleRegion : Error {
    using Error::Error;
};

// A POVM element with (near-)zero trace cannot be normalized.
struct ZeroTrace : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

}  // namespace mdiqrng
