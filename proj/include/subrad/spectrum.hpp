// spectrum.hpp — single-excitation eigenmodes: decay rates, quasimomentum
// estimation, mode classification, and per-realization target selection.
//
// Decay-rate convention: Gamma_k = -Im omega_k. With a unit-norm right
// eigenvector phi of the complex-symmetric H_eff, the exact identity
//     Gamma/(Gamma^2 + Omega^2) = (|phi(1)|^2 + |phi(N)|^2) / gamma
// holds because Im H^{-1} is supported only on the two boundary sites.
// Decay rates below the dense eigensolver's resolution (~1e-14 * |H|) are
// recovered from that identity: the boundary amplitudes of a localized
// eigenvector carry exponentially small values with small *relative* error
// when computed by inverse iteration on the tridiagonal inverse, while the
// eigenvalue's imaginary part drowns in backward error.

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "subrad/linalg.hpp"
#include "subrad/model.hpp"

namespace subrad {

// Modes with Gamma from zgeev below gamma * kGammaResolutionFloor are
// recomputed from boundary amplitudes.
inline constexpr double kGammaResolutionFloor = 1e-10;

// Half-width of the quasimomentum window around phi labelled superradiant,
// and of the band-edge windows labelled strong subradiant.
inline constexpr double kSuperradiantWindow = 0.05 * std::numbers::pi;
inline constexpr double kBandEdgeWindow = 0.05 * std::numbers::pi;

enum class ModeClass { strong_subradiant, weak_subradiant, superradiant };

inline const char* to_string(ModeClass c) {
    switch (c) {
        case ModeClass::strong_subradiant: return "strong_subradiant";
        case ModeClass::weak_subradiant: return "weak_subradiant";
        case ModeClass::superradiant: return "superradiant";
    }
    return "?";
}

struct EigenMode {
    Complex omega;
    double Omega = 0.0;  // Re omega
    double Gamma = 0.0;  // -Im omega (boundary-identity value below resolution)
    Eigen::VectorXcd vector;
    double k_est = 0.0;
    int node_index = 0;  // 1-based rank in the ascending-Omega ordering
    ModeClass mode_class = ModeClass::weak_subradiant;
};

// ------------------------------------------------------- ordered dispersion

struct DispersionPoleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// omega(k) = (gamma/4) [cot((phi+k)/2) + cot((phi-k)/2)] for the ordered
// chain; real. Poles at k = phi (superradiant divergence).
inline double ordered_dispersion(double phi, double k, double gamma = 1.0) {
    if (!(k > 0.0 && k < std::numbers::pi))
        throw std::invalid_argument("ordered_dispersion: k must lie in (0, pi)");
    if (std::abs(k - phi) <= kPoleGuard)
        throw DispersionPoleError("ordered_dispersion: pole at k = phi");
    const double a = 0.5 * (phi + k);
    const double b = 0.5 * (phi - k);
    return 0.25 * gamma * (std::cos(a) / std::sin(a) + std::cos(b) / std::sin(b));
}

// ------------------------------------------------------------- mode targets

enum class TargetKind { band_edge_low, band_edge_high, fixed_k };

// How a disordered realization's mode is assigned to a target family.
// nearest_k follows the quasimomentum label (position-independent, so the
// wavepacket centers of the selected family stay uniform); nearest_omega
// tracks the spectral position (reliable mid-band, polluted by tail states
// at the band edges); min_gamma takes the longest-lived mode on the target's
// band side (biased toward bulk-centered states under strong localization).
enum class Selector { nearest_k, nearest_omega, sorted_index, min_gamma };

inline const char* to_string(TargetKind k) {
    switch (k) {
        case TargetKind::band_edge_low: return "band_edge_low";
        case TargetKind::band_edge_high: return "band_edge_high";
        case TargetKind::fixed_k: return "fixed_k";
    }
    return "?";
}

inline const char* to_string(Selector s) {
    switch (s) {
        case Selector::nearest_k: return "nearest_k";
        case Selector::nearest_omega: return "nearest_omega";
        case Selector::sorted_index: return "sorted_index";
        case Selector::min_gamma: return "min_gamma";
    }
    return "?";
}

struct ModeTarget {
    TargetKind kind = TargetKind::band_edge_low;
    double k = 0.0;  // used for fixed_k
    Selector selector = Selector::nearest_k;

    static ModeTarget band_edge_low(Selector s = Selector::nearest_k) { return {TargetKind::band_edge_low, 0.0, s}; }
    static ModeTarget band_edge_high(Selector s = Selector::nearest_k) { return {TargetKind::band_edge_high, std::numbers::pi, s}; }
    static ModeTarget fixed(double k, Selector s = Selector::nearest_omega) { return {TargetKind::fixed_k, k, s}; }

    // quasimomentum the selection aims at (band edges use the zone limits)
    double k_value() const {
        switch (kind) {
            case TargetKind::band_edge_low: return 0.0;
            case TargetKind::band_edge_high: return std::numbers::pi;
            case TargetKind::fixed_k: return k;
        }
        return k;
    }

    // Warning (not an error): a fixed-k target inside the superradiant
    // window around phi does not undergo the scaling transition.
    bool in_superradiant_window(double phi) const {
        return kind == TargetKind::fixed_k && std::abs(k - phi) < kSuperradiantWindow;
    }

    std::string label() const {
        if (kind == TargetKind::fixed_k) {
            char buf[32];
            std::snprintf(buf, sizeof buf, "fixed_k_%g", k / std::numbers::pi);
            return buf;
        }
        return to_string(kind);
    }
};

// Real target frequency: the ordered-chain dispersion at the target k, taken
// as the k -> 0 / k -> pi limit for the band edges.
inline double target_omega(double phi, const ModeTarget& target, double gamma = 1.0) {
    switch (target.kind) {
        case TargetKind::band_edge_low:
            return 0.5 * gamma * std::cos(0.5 * phi) / std::sin(0.5 * phi);
        case TargetKind::band_edge_high: {
            const double a = 0.5 * (phi + std::numbers::pi);
            const double b = 0.5 * (phi - std::numbers::pi);
            return 0.25 * gamma * (std::cos(a) / std::sin(a) + std::cos(b) / std::sin(b));
        }
        case TargetKind::fixed_k: return ordered_dispersion(phi, target.k, gamma);
    }
    throw std::logic_error("target_omega: bad kind");
}

// ---------------------------------------------------------- k estimation

// k_est = q* pi/(N+1) where q* maximizes the discrete-sine overlap
// |sum_m v(m) sin(q m pi/(N+1))|, ties broken to the smallest q.
inline double estimate_k(const Eigen::VectorXcd& vector) {
    const int n = static_cast<int>(vector.size());
    if (n < 1) throw std::invalid_argument("estimate_k: empty vector");
    // sin(j*pi/(N+1)) lookup; q*m is reduced modulo 2(N+1) with sign.
    const int period = 2 * (n + 1);
    std::vector<double> sin_table(static_cast<std::size_t>(period));
    for (int j = 0; j < period; ++j)
        sin_table[static_cast<std::size_t>(j)] =
            std::sin(std::numbers::pi * j / static_cast<double>(n + 1));
    int best_q = 1;
    double best = -1.0;
    for (int q = 1; q <= n; ++q) {
        Complex acc(0.0, 0.0);
        long idx = 0;
        for (int m = 1; m <= n; ++m) {
            idx += q;
            if (idx >= period) idx -= period;
            acc += vector(m - 1) * sin_table[static_cast<std::size_t>(idx)];
        }
        const double mag = std::abs(acc);
        if (mag > best * (1.0 + 1e-12)) {
            best = mag;
            best_q = q;
        }
    }
    return best_q * std::numbers::pi / static_cast<double>(n + 1);
}

// Triangular kernel weights on the discrete sine bins around the target
// quasimomentum; the nearest_k selector maximizes the kernel-weighted
// spectral weight sum_q K(q) |<sin_q|v>|^2. The kernel keeps the metric
// insensitive to where the mode localizes (bin-to-bin phase oscillations
// average out over the band) while ties resolve toward the target.
inline constexpr double kSelectionKernelWidth = 0.04 * std::numbers::pi;

inline std::vector<std::pair<int, double>> selection_kernel(int n, double k_target) {
    const double dk = std::numbers::pi / static_cast<double>(n + 1);
    const double width = std::max(kSelectionKernelWidth, 3.5 * dk);
    std::vector<std::pair<int, double>> bins;
    for (int q = 1; q <= n; ++q) {
        const double d = std::abs(q * dk - k_target);
        if (d < width) bins.emplace_back(q, 1.0 - d / width);
    }
    if (bins.empty()) {
        // target beyond every bin (tiny chains): fall back to the nearest bin
        int q_near = std::clamp(static_cast<int>(std::lround(k_target / dk)), 1, n);
        bins.emplace_back(q_near, 1.0);
    }
    return bins;
}

inline double spectral_weight_metric(const Eigen::VectorXcd& vector,
                                     const std::vector<std::pair<int, double>>& kernel_bins,
                                     const std::vector<double>& sin_table /* period 2(N+1) */) {
    const int n = static_cast<int>(vector.size());
    const int period = 2 * (n + 1);
    double metric = 0.0;
    for (const auto& [q, weight] : kernel_bins) {
        Complex acc(0.0, 0.0);
        long idx = 0;
        for (int m = 1; m <= n; ++m) {
            idx += q;
            if (idx >= period) idx -= period;
            acc += vector(m - 1) * sin_table[static_cast<std::size_t>(idx)];
        }
        metric += weight * std::norm(acc);
    }
    return metric;
}

inline std::vector<double> make_sin_table(int n) {
    const int period = 2 * (n + 1);
    std::vector<double> table(static_cast<std::size_t>(period));
    for (int j = 0; j < period; ++j)
        table[static_cast<std::size_t>(j)] =
            std::sin(std::numbers::pi * j / static_cast<double>(n + 1));
    return table;
}

inline ModeClass classify_mode(double k_est, double phi) {
    if (std::abs(k_est - phi) < kSuperradiantWindow) return ModeClass::superradiant;
    if (k_est < kBandEdgeWindow || k_est > std::numbers::pi - kBandEdgeWindow)
        return ModeClass::strong_subradiant;
    return ModeClass::weak_subradiant;
}

// ----------------------------------------------- boundary radiation identity

// Stable subradiant root of beta*Gamma^2 - Gamma + beta*Omega^2 = 0 with
// beta = (|phi(1)|^2 + |phi(N)|^2)/gamma; valid whenever Gamma << |Omega|.
inline double boundary_gamma(double boundary_population, double Omega, double gamma = 1.0) {
    const double beta = boundary_population / gamma;
    if (beta <= 0.0) return 0.0;
    const double disc = std::max(0.0, 1.0 - 4.0 * beta * beta * Omega * Omega);
    return 2.0 * beta * Omega * Omega / (1.0 + std::sqrt(disc));
}

struct BoundaryRate {
    double lhs = 0.0;                // Gamma / (Gamma^2 + Omega^2)
    double rhs = 0.0;                // (|phi(1)|^2 + |phi(N)|^2) / gamma
    double gamma_subradiant = 0.0;   // gamma_tilde * boundary population
};

// Returns both sides of the exact identity plus the subradiant approximation
// Gamma ~= (Omega^2/gamma) * boundary population. The proportionality
// constant is fixed to 1 by the dense-inverse oracle.
inline BoundaryRate boundary_rate_identity(const EigenMode& mode, double gamma = 1.0) {
    BoundaryRate out;
    const int n = static_cast<int>(mode.vector.size());
    const double bp = std::norm(mode.vector(0)) + std::norm(mode.vector(n - 1));
    out.lhs = mode.Gamma / (mode.Gamma * mode.Gamma + mode.Omega * mode.Omega);
    out.rhs = bp / gamma;
    out.gamma_subradiant = (mode.Omega * mode.Omega / gamma) * bp;
    return out;
}

// --------------------------------------------------------------- diagonalize

namespace detail {

// Deterministic global phase: rotate so the largest-magnitude entry
// (smallest index on ties) is real positive.
inline void canonicalize_phase(Eigen::VectorXcd& v) {
    int arg = 0;
    double best = -1.0;
    for (int i = 0; i < v.size(); ++i) {
        const double a = std::abs(v(i));
        if (a > best * (1.0 + 1e-14)) {
            best = a;
            arg = i;
        }
    }
    if (best > 0.0) v *= std::conj(v(arg)) / std::abs(v(arg));
}

}  // namespace detail

// Full eigendecomposition of the dense effective Hamiltonian: N modes with
// unit-norm right eigenvectors, sorted by ascending Omega (ties by Gamma).
inline std::vector<EigenMode> diagonalize(const DenseHamiltonian& h) {
    const int n = h.size();
    if (n < 1) throw std::invalid_argument("diagonalize: empty Hamiltonian");
    EigResult eig = eig_dense(h.entries, true);

    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        const double ra = eig.values(a).real(), rb = eig.values(b).real();
        if (ra != rb) return ra < rb;
        const double ia = -eig.values(a).imag(), ib = -eig.values(b).imag();
        if (ia != ib) return ia < ib;
        return a < b;
    });

    std::vector<EigenMode> modes(n);
    for (int rank = 0; rank < n; ++rank) {
        EigenMode& m = modes[rank];
        const int src = order[rank];
        m.omega = eig.values(src);
        m.Omega = m.omega.real();
        m.vector = eig.vectors.col(src);
        m.vector.normalize();
        detail::canonicalize_phase(m.vector);
        m.Gamma = -m.omega.imag();
        if (m.Gamma < kGammaResolutionFloor * h.gamma) {
            const double bp = std::norm(m.vector(0)) + std::norm(m.vector(n - 1));
            m.Gamma = boundary_gamma(bp, m.Omega, h.gamma);
        }
        m.k_est = estimate_k(m.vector);
        m.node_index = rank + 1;
        m.mode_class = classify_mode(m.k_est, h.phi);
    }
    return modes;
}

// --------------------------------------------------------- target selection

// Rank (0-based, ascending-Omega) of the target mode in an ordered chain of
// size n; used by the sorted_index selector.
inline int ordered_target_rank(int n, double phi, const ModeTarget& target, double gamma = 1.0) {
    std::vector<double> xo(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) xo[static_cast<std::size_t>(i)] = i + 1;
    Realization r;
    r.positions = xo;
    r.offsets.assign(static_cast<std::size_t>(n), 0.0);
    r.spacing_phases.assign(static_cast<std::size_t>(n > 0 ? n - 1 : 0), phi);
    const DenseHamiltonian h = build_h_eff(r, gamma, phi);
    EigResult eig = eig_dense(h.entries, false);
    std::vector<double> omegas(static_cast<std::size_t>(n));
    std::vector<double> gammas(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        omegas[static_cast<std::size_t>(i)] = eig.values(i).real();
        gammas[static_cast<std::size_t>(i)] = -eig.values(i).imag();
    }
    std::vector<int> order(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        return omegas[static_cast<std::size_t>(a)] < omegas[static_cast<std::size_t>(b)];
    });
    if (target.kind != TargetKind::fixed_k) {
        // Band edges: the ordered chain's target mode is its minimum-Gamma
        // mode on the matching band side (Omega > 0 for k < phi, < 0 beyond).
        int best_rank = 0;
        double best_gamma = 1e300;
        for (int rank = 0; rank < n; ++rank) {
            const int i = order[static_cast<std::size_t>(rank)];
            const bool low_side = omegas[static_cast<std::size_t>(i)] > 0.0;
            if (target.kind == TargetKind::band_edge_low ? !low_side : low_side) continue;
            if (gammas[static_cast<std::size_t>(i)] < best_gamma) {
                best_gamma = gammas[static_cast<std::size_t>(i)];
                best_rank = rank;
            }
        }
        return best_rank;
    }
    const double om_target = target_omega(phi, target, gamma);
    int best_rank = 0;
    double best = 1e300;
    for (int rank = 0; rank < n; ++rank) {
        const int i = order[static_cast<std::size_t>(rank)];
        const double d = std::abs(omegas[static_cast<std::size_t>(i)] - om_target);
        if (d < best) {
            best = d;
            best_rank = rank;
        }
    }
    return best_rank;
}

// Select one mode from an ascending-Omega mode list per the target's
// selector. min_gamma with a fixed_k target is a configuration error.
inline const EigenMode& select_target_mode(const std::vector<EigenMode>& modes,
                                           const ModeTarget& target, double phi,
                                           double gamma = 1.0) {
    if (modes.empty()) throw std::invalid_argument("select_target_mode: empty mode list");
    switch (target.selector) {
        case Selector::nearest_k: {
            const int n = static_cast<int>(modes[0].vector.size());
            const auto kernel = selection_kernel(n, target.k_value());
            const auto table = make_sin_table(n);
            int best = 0;
            double metric = -1.0;
            for (int i = 0; i < static_cast<int>(modes.size()); ++i) {
                const double mi =
                    spectral_weight_metric(modes[static_cast<std::size_t>(i)].vector, kernel, table);
                if (mi > metric * (1.0 + 1e-12)) {
                    metric = mi;
                    best = i;
                }
            }
            return modes[static_cast<std::size_t>(best)];
        }
        case Selector::nearest_omega: {
            const double om = target_omega(phi, target, gamma);
            int best = 0;
            double d = 1e300;
            for (int i = 0; i < static_cast<int>(modes.size()); ++i) {
                const double di = std::abs(modes[static_cast<std::size_t>(i)].Omega - om);
                if (di < d) {
                    d = di;
                    best = i;
                }
            }
            return modes[static_cast<std::size_t>(best)];
        }
        case Selector::min_gamma: {
            if (target.kind == TargetKind::fixed_k)
                throw std::invalid_argument(
                    "select_target_mode: min_gamma selector is for band-edge targets only");
            // restrict to the target's band side (Omega > 0 for k < phi,
            // < 0 beyond); both edges host N^-3 modes and the global
            // minimum may belong to the other family
            const bool want_low = target.kind == TargetKind::band_edge_low;
            int best = -1;
            double g = 1e300;
            for (int i = 0; i < static_cast<int>(modes.size()); ++i) {
                const auto& m = modes[static_cast<std::size_t>(i)];
                if (want_low ? !(m.Omega > 0.0) : !(m.Omega < 0.0)) continue;
                if (m.Gamma < g) {
                    g = m.Gamma;
                    best = i;
                }
            }
            if (best < 0) {  // degenerate tiny chains: fall back to the global minimum
                best = 0;
                for (int i = 1; i < static_cast<int>(modes.size()); ++i)
                    if (modes[static_cast<std::size_t>(i)].Gamma <
                        modes[static_cast<std::size_t>(best)].Gamma)
                        best = i;
            }
            return modes[static_cast<std::size_t>(best)];
        }
        case Selector::sorted_index: {
            const int rank =
                ordered_target_rank(static_cast<int>(modes.size()), phi, target, gamma);
            return modes[static_cast<std::size_t>(rank)];
        }
    }
    throw std::logic_error("select_target_mode: bad selector");
}

}  // namespace subrad
