#include "mdiqrng/qmath.hpp"

#include <algorithm>
#include <cmath>

namespace mdiqrng::qmath {

bool QubitOperator::is_hermitian(double tol) const {
    return std::abs(m_[0].imag()) <= tol && std::abs(m_[3].imag()) <= tol &&
           std::abs(m_[1] - std::conj(m_[2])) <= tol;
}

QubitOperator QubitOperator::psd_sqrt() const {
    const double tr = trace_real();
    const double det = std::max(0.0, det_hermitian());
    const double s = std::sqrt(det);
    const double denom_sq = tr + 2.0 * s;
    if (denom_sq <= 1e-300) return zero();
    const double inv = 1.0 / std::sqrt(denom_sq);
    return (*this + identity() * s) * inv;
}

const char* probe_name(ProbeId j) {
    switch (j) {
        case ProbeId::Z0: return "Z0";
        case ProbeId::Z1: return "Z1";
        case ProbeId::XPlus: return "Xplus";
        case ProbeId::YPlus: return "Yplus";
    }
    return "?";
}

std::optional<ProbeId> parse_probe(std::string_view name) {
    for (ProbeId j : kAllProbes) {
        if (name == probe_name(j)) return j;
    }
    return std::nullopt;
}

Povm params_to_povm(const PovmParams& p) {
    const QubitOperator lambda1 = QubitOperator::weighted_bloch(p.a1, p.n);
    const QubitOperator lambda0 = QubitOperator::identity() - lambda1;
    // lambda1 eigenvalues are a1 (1 +- |n|); lambda0's are 1 - a1 (1 -+ |n|).
    const double nn = p.n.norm();
    const double min_eig = std::min(p.a1 * (1.0 - nn), 1.0 - p.a1 * (1.0 + nn));
    if (min_eig < -1e-9) {
        throw InfeasibleParams("POVM parameters yield a negative eigenvalue");
    }
    return {lambda0, lambda1};
}

double probe_click_prob(const PovmParams& p, ProbeId j) {
    return p.a1 * (1.0 + p.n.dot(probe_bloch(j)));
}

double matrix_fidelity(const QubitOperator& a, const QubitOperator& b) {
    const QubitOperator sb = b.psd_sqrt();
    const QubitOperator c = sb * a * sb;
    auto eig = c.eigenvalues_hermitian();
    const double l0 = std::max(0.0, eig[0]);
    const double l1 = std::max(0.0, eig[1]);
    const double tr_sqrt = std::sqrt(l0) + std::sqrt(l1);
    return std::min(1.0, tr_sqrt * tr_sqrt);
}

namespace {

QubitOperator normalized_or_throw(const QubitOperator& m, const char* what) {
    const double t = m.trace_real();
    if (t < 1e-12) throw ZeroTrace(std::string("cannot normalize POVM element: ") + what);
    return m * (1.0 / t);
}

}  // namespace

PovmFidelityEvaluator::PovmFidelityEvaluator(const Povm& reference)
    : sqrt_ref0_(normalized_or_throw(reference.lambda0, "reference outcome 0").psd_sqrt()),
      sqrt_ref1_(normalized_or_throw(reference.lambda1, "reference outcome 1").psd_sqrt()) {}

double PovmFidelityEvaluator::operator()(const Povm& tom) const {
    const QubitOperator a0 = normalized_or_throw(tom.lambda0, "outcome 0");
    const QubitOperator a1 = normalized_or_throw(tom.lambda1, "outcome 1");
    const auto branch = [](const QubitOperator& a, const QubitOperator& sqrt_b) {
        const QubitOperator c = sqrt_b * a * sqrt_b;
        auto eig = c.eigenvalues_hermitian();
        const double t = std::sqrt(std::max(0.0, eig[0])) + std::sqrt(std::max(0.0, eig[1]));
        return std::min(1.0, t * t);
    };
    return std::min(branch(a0, sqrt_ref0_), branch(a1, sqrt_ref1_));
}

double povm_fidelity(const Povm& tom, const Povm& reference) {
    return PovmFidelityEvaluator(reference)(tom);
}

}  // namespace mdiqrng::qmath
