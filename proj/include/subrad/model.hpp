// model.hpp — qubit-chain geometry and the two Hamiltonian representations.
//
// A chain of N qubits at positions x_m = m*d + delta_m*d couples through a 1D
// waveguide, giving the dense non-Hermitian Hamiltonian
//     H_mn = -(i*gamma/2) * exp(i * k0 * |x_m - x_n|),   k0 = phi / d.
// Its inverse is exactly tridiagonal plus an imaginary rank-2 boundary term,
//     H^{-1} = H0 + i*V,  V = (|1><1| + |N><N|) / gamma,
// with H0 real symmetric tridiagonal built from the spacing phases
// dphi_m = k0 * (x_{m+1} - x_m). Signs and angles below are fixed against
// direct dense inversion:
//     v_1/gamma = -cot(dphi_1),  v_N/gamma = -cot(dphi_{N-1}),
//     v_m/gamma = -cot(dphi_m) - cot(dphi_{m-1})  (bulk),
//     w_m/gamma = +csc(dphi_m).

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "subrad/rng.hpp"

namespace subrad {

using Complex = std::complex<double>;

// Spacing phase within this distance of a multiple of pi makes the
// tridiagonal inverse singular (cot/csc poles).
inline constexpr double kPoleGuard = 1e-9;

struct SingularSpacingError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------- ChainSpec

// Immutable description of one physical configuration. d = 1 throughout;
// gamma is kept as a parameter (default 1).
struct ChainSpec {
    int n_qubits = 1;
    double phi = 0.5 * std::numbers::pi;  // phi = k0 * d
    double disorder_w = 0.0;
    double gamma = 1.0;
    std::uint64_t master_seed = 0;

    ChainSpec() = default;

    ChainSpec(int n, double phi_, double w, double gamma_, std::uint64_t seed)
        : n_qubits(n), phi(phi_), disorder_w(w), gamma(gamma_), master_seed(seed) {
        validate();
    }

    void validate() const {
        if (n_qubits < 1) throw std::invalid_argument("ChainSpec: n_qubits must be >= 1");
        if (!(disorder_w >= 0.0 && disorder_w < 1.0))
            throw std::invalid_argument("ChainSpec: disorder_w must satisfy 0 <= W < 1");
        if (!(phi > 0.0 && phi <= 0.5 * std::numbers::pi))
            throw std::invalid_argument("ChainSpec: phi must satisfy 0 < phi <= pi/2");
        if (!(gamma > 0.0)) throw std::invalid_argument("ChainSpec: gamma must be positive");
        // Reject phi whose reachable spacing phases phi*(1 +- W) can touch a
        // multiple of pi; cot/csc poles there make the inverse singular.
        const double lo = phi * (1.0 - disorder_w);
        const double hi = phi * (1.0 + disorder_w);
        if (lo < kPoleGuard || hi > std::numbers::pi - kPoleGuard)
            throw std::invalid_argument(
                "ChainSpec: spacing phase range [phi(1-W), phi(1+W)] touches a multiple of pi");
    }
};

// -------------------------------------------------------------- Realization

// One disorder draw. Reconstructible bit-exactly from
// (master_seed, realization_index).
struct Realization {
    std::vector<double> offsets;         // delta_m, dimensionless
    std::vector<double> positions;       // x_m in units of d
    std::vector<double> spacing_phases;  // dphi_m = phi * (x_{m+1} - x_m)
    long realization_index = 0;

    int size() const { return static_cast<int>(positions.size()); }
};

// Uniform offsets delta_m in [-W/2, W/2]; pure function of
// (master_seed, realization_index, m), so all cells sharing a seed see the
// same underlying uniforms (common random numbers across N and W).
inline std::vector<double> sample_offsets(const ChainSpec& spec, long realization_index) {
    if (realization_index < 0)
        throw std::invalid_argument("sample_offsets: realization_index must be >= 0");
    const CounterRng rng(spec.master_seed, static_cast<std::uint64_t>(realization_index));
    std::vector<double> offsets(spec.n_qubits);
    for (int m = 0; m < spec.n_qubits; ++m) {
        // W == 0 maps to exactly +0.0 for every site.
        offsets[m] = spec.disorder_w == 0.0
                         ? 0.0
                         : spec.disorder_w * (rng.uniform01(static_cast<std::uint64_t>(m)) - 0.5);
    }
    return offsets;
}

inline Realization build_positions(const ChainSpec& spec, const std::vector<double>& offsets,
                                   long realization_index = 0) {
    const int n = spec.n_qubits;
    if (static_cast<int>(offsets.size()) != n)
        throw std::invalid_argument("build_positions: offsets length must equal n_qubits");
    const double half_w = 0.5 * spec.disorder_w;
    for (int m = 0; m < n; ++m)
        if (std::abs(offsets[m]) > half_w + 1e-15)
            throw std::invalid_argument("build_positions: offset " + std::to_string(m) +
                                        " outside [-W/2, W/2]");

    Realization r;
    r.offsets = offsets;
    r.realization_index = realization_index;
    r.positions.resize(n);
    for (int m = 0; m < n; ++m) r.positions[m] = static_cast<double>(m + 1) + offsets[m];

    r.spacing_phases.resize(n > 0 ? n - 1 : 0);
    for (int m = 0; m + 1 < n; ++m) {
        const double gap = r.positions[m + 1] - r.positions[m];
        if (!(gap > 0.0))
            throw SingularSpacingError("build_positions: non-increasing positions at site " +
                                       std::to_string(m + 1));
        const double dphi = spec.phi * gap;
        const double frac = std::abs(std::remainder(dphi, std::numbers::pi));
        if (frac < kPoleGuard)
            throw SingularSpacingError("build_positions: spacing phase " + std::to_string(m + 1) +
                                       " within pole guard of a multiple of pi");
        r.spacing_phases[m] = dphi;
    }
    return r;
}

// --------------------------------------------------------- DenseHamiltonian

struct DenseHamiltonian {
    Eigen::MatrixXcd entries;
    double gamma = 1.0;
    double phi = 0.5 * std::numbers::pi;

    int size() const { return static_cast<int>(entries.rows()); }
};

inline DenseHamiltonian build_h_eff(const Realization& r, double gamma, double phi) {
    const int n = r.size();
    DenseHamiltonian h;
    h.gamma = gamma;
    h.phi = phi;
    h.entries.resize(n, n);
    const Complex amp(0.0, -0.5 * gamma);
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            const double dist = std::abs(r.positions[i] - r.positions[j]);
            h.entries(i, j) = amp * std::exp(Complex(0.0, phi * dist));
        }
    }
    // Symmetrize exactly: |x_i - x_j| is symmetric, but exp can round
    // differently if the subtraction order differed. Mirror the lower
    // triangle so H^T == H bitwise.
    for (int j = 0; j < n; ++j)
        for (int i = j + 1; i < n; ++i) h.entries(j, i) = h.entries(i, j);
    return h;
}

// ------------------------------------------------------- TridiagonalInverse

// Symmetric tridiagonal storage of H^{-1} = H0 + i V.
struct TridiagonalInverse {
    Eigen::VectorXcd diag;     // N entries
    Eigen::VectorXcd offdiag;  // N-1 entries
    double gamma = 1.0;

    int size() const { return static_cast<int>(diag.size()); }

    Eigen::MatrixXcd to_dense() const {
        const int n = size();
        Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = diag(i);
        for (int i = 0; i + 1 < n; ++i) m(i, i + 1) = m(i + 1, i) = offdiag(i);
        return m;
    }
};

inline TridiagonalInverse build_h_inv(const Realization& r, double gamma, double phi) {
    const int n = r.size();
    TridiagonalInverse t;
    t.gamma = gamma;
    t.diag.resize(n);
    t.offdiag.resize(n > 0 ? n - 1 : 0);

    if (n == 1) {
        // Both boundary terms of V land on the single site: H^{-1} = 2i/gamma.
        t.diag(0) = Complex(0.0, 2.0 / gamma);
        return t;
    }

    const auto& dphi = r.spacing_phases;
    for (int m = 0; m + 1 < n; ++m) {
        const double s = std::sin(dphi[m]);
        if (std::abs(s) < kPoleGuard)
            throw SingularSpacingError("build_h_inv: spacing phase at a cot/csc pole");
        t.offdiag(m) = Complex(1.0 / (gamma * s), 0.0);
    }
    for (int m = 0; m < n; ++m) {
        double v = 0.0;
        if (m > 0) v -= 1.0 / std::tan(dphi[m - 1]);
        if (m + 1 < n) v -= 1.0 / std::tan(dphi[m]);
        const double im = (m == 0 || m == n - 1) ? 1.0 / gamma : 0.0;
        t.diag(m) = Complex(v / gamma, im);
    }
    return t;
}

}  // namespace subrad
