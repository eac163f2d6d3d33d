#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <optional>
#include <string_view>

#include "mdiqrng/errors.hpp"

namespace mdiqrng::qmath {

using Complex = std::complex<double>;

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    double norm() const { return std::sqrt(x * x + y * y + z * z); }
    double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
};

// 2x2 complex matrix with value semantics, row-major storage. The POVM
// algebra only ever needs Hermitian operators, for which the closed-form
// eigendecomposition below is exact and cheap.
class QubitOperator {
  public:
    QubitOperator() = default;
    QubitOperator(Complex m00, Complex m01, Complex m10, Complex m11)
        : m_{m00, m01, m10, m11} {}

    static QubitOperator zero() { return {}; }
    static QubitOperator identity() { return {1.0, 0.0, 0.0, 1.0}; }
    static QubitOperator pauli_x() { return {0.0, 1.0, 1.0, 0.0}; }
    static QubitOperator pauli_y() { return {0.0, Complex(0, -1), Complex(0, 1), 0.0}; }
    static QubitOperator pauli_z() { return {1.0, 0.0, 0.0, -1.0}; }
    static QubitOperator projector0() { return {1.0, 0.0, 0.0, 0.0}; }  // |0><0|
    static QubitOperator projector1() { return {0.0, 0.0, 0.0, 1.0}; }  // |1><1|

    // a * (I + n . sigma)
    static QubitOperator weighted_bloch(double a, const Vec3& n) {
        return {a * Complex(1.0 + n.z, 0.0), a * Complex(n.x, -n.y),
                a * Complex(n.x, n.y), a * Complex(1.0 - n.z, 0.0)};
    }

    // Pure state with the given unit Bloch vector.
    static QubitOperator pure_state(const Vec3& n) { return weighted_bloch(0.5, n); }

    Complex operator()(int i, int j) const { return m_[2 * i + j]; }

    QubitOperator operator+(const QubitOperator& o) const {
        return {m_[0] + o.m_[0], m_[1] + o.m_[1], m_[2] + o.m_[2], m_[3] + o.m_[3]};
    }
    QubitOperator operator-(const QubitOperator& o) const {
        return {m_[0] - o.m_[0], m_[1] - o.m_[1], m_[2] - o.m_[2], m_[3] - o.m_[3]};
    }
    QubitOperator operator*(const QubitOperator& o) const {
        return {m_[0] * o.m_[0] + m_[1] * o.m_[2], m_[0] * o.m_[1] + m_[1] * o.m_[3],
                m_[2] * o.m_[0] + m_[3] * o.m_[2], m_[2] * o.m_[1] + m_[3] * o.m_[3]};
    }
    QubitOperator operator*(double s) const { return {m_[0] * s, m_[1] * s, m_[2] * s, m_[3] * s}; }

    QubitOperator adjoint() const {
        return {std::conj(m_[0]), std::conj(m_[2]), std::conj(m_[1]), std::conj(m_[3])};
    }

    Complex trace() const { return m_[0] + m_[3]; }
    double trace_real() const { return m_[0].real() + m_[3].real(); }

    // Determinant of a Hermitian matrix (real by construction).
    double det_hermitian() const {
        return m_[0].real() * m_[3].real() - std::norm(m_[1]);
    }

    bool is_hermitian(double tol = 1e-12) const;

    // Eigenvalues of a Hermitian matrix, ascending. Closed form: the
    // discriminant ((m00-m11)/2)^2 + |m01|^2 is nonnegative, so this is
    // numerically stable.
    std::array<double, 2> eigenvalues_hermitian() const {
        const double half_tr = 0.5 * trace_real();
        const double half_diff = 0.5 * (m_[0].real() - m_[3].real());
        const double disc = std::sqrt(half_diff * half_diff + std::norm(m_[1]));
        return {half_tr - disc, half_tr + disc};
    }

    bool is_psd(double tol = 1e-12) const {
        return is_hermitian(tol) && eigenvalues_hermitian()[0] >= -tol;
    }

    // Principal square root of a PSD matrix. Uses the Cayley-Hamilton
    // identity: sqrt(M) = (M + sqrt(det) I) / sqrt(tr + 2 sqrt(det)).
    // Eigenvalues within -1e-12 of zero are treated as zero.
    QubitOperator psd_sqrt() const;

    // Decompose M = a (I + n . sigma): weight a = tr(M)/2.
    double bloch_weight() const { return 0.5 * trace_real(); }

    // Bloch direction n of M = a (I + n . sigma); requires tr(M) != 0.
    Vec3 bloch_direction() const {
        const double t = trace_real();
        return {2.0 * m_[1].real() / t, -2.0 * m_[1].imag() / t,
                (m_[0].real() - m_[3].real()) / t};
    }

  private:
    std::array<Complex, 4> m_{};
};

inline QubitOperator operator*(double s, const QubitOperator& m) { return m * s; }

// Two-outcome qubit POVM {lambda0, lambda1} with lambda0 + lambda1 = I.
struct Povm {
    QubitOperator lambda0;
    QubitOperator lambda1;
};

// The four parameters identifying a two-outcome qubit POVM: the weight a1 of
// the '1' element and its Bloch direction n, with lambda1 = a1 (I + n.sigma)
// and lambda0 = I - lambda1. The complementary weight a0 = 1 - a1 and
// direction n0 = -a1 n / a0 are derived.
struct PovmParams {
    double a1 = 0.5;
    Vec3 n;

    double a0() const { return 1.0 - a1; }
    Vec3 n0() const { return n * (-a1 / (1.0 - a1)); }
};

// Tomography probes with their canonical Bloch vectors.
enum class ProbeId { Z0 = 0, Z1 = 1, XPlus = 2, YPlus = 3 };

inline constexpr std::array<ProbeId, 4> kAllProbes = {ProbeId::Z0, ProbeId::Z1,
                                                      ProbeId::XPlus, ProbeId::YPlus};

inline int probe_index(ProbeId j) { return static_cast<int>(j); }

inline Vec3 probe_bloch(ProbeId j) {
    switch (j) {
        case ProbeId::Z0: return {0.0, 0.0, 1.0};
        case ProbeId::Z1: return {0.0, 0.0, -1.0};
        case ProbeId::XPlus: return {1.0, 0.0, 0.0};
        case ProbeId::YPlus: return {0.0, 1.0, 0.0};
    }
    return {};
}

const char* probe_name(ProbeId j);
std::optional<ProbeId> parse_probe(std::string_view name);

// Build the POVM from its four parameters. Rejects parameter sets whose
// elements have an eigenvalue below -1e-9.
Povm params_to_povm(const PovmParams& p);

// tr(rho_j lambda1) = a1 (1 + n . r_j) for the probe's Bloch vector r_j.
double probe_click_prob(const PovmParams& p, ProbeId j);

// Uhlmann fidelity (tr sqrt(sqrt(b) a sqrt(b)))^2 of two PSD matrices that
// the caller has already normalized to unit trace.
double matrix_fidelity(const QubitOperator& a, const QubitOperator& b);

// Caches the normalized reference elements and their square roots so that
// repeated evaluations against the same reference POVM stay cheap inside
// the grid kernels.
class PovmFidelityEvaluator {
  public:
    explicit PovmFidelityEvaluator(const Povm& reference);

    // min over outcomes of the fidelity between trace-normalized elements.
    double operator()(const Povm& tom) const;

  private:
    QubitOperator sqrt_ref0_;
    QubitOperator sqrt_ref1_;
};

// min_b F(tom_b / tr, ref_b / tr). Throws ZeroTrace when any element has
// trace below 1e-12.
double povm_fidelity(const Povm& tom, const Povm& reference);

}  // namespace mdiqrng::qmath
