// localization.hpp — Anderson-localization diagnostics for subradiant modes:
// participation-ratio localization lengths, wavepacket-center statistics with
// the effective potential V(x0) = -ln P(x0), and the boundary-radiation
// prediction for the typical decay exponent.

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "subrad/spectrum.hpp"

namespace subrad {

// xi_phi = (sum_x |phi(x)|^4)^{-1} for a unit-norm vector.
inline double participation_ratio(const Eigen::VectorXcd& vector) {
    double s = 0.0;
    for (int i = 0; i < vector.size(); ++i) {
        const double p = std::norm(vector(i));
        s += p * p;
    }
    if (s <= 0.0) throw std::invalid_argument("participation_ratio: zero vector");
    return 1.0 / s;
}

inline double participation_ratio(const EigenMode& mode) {
    return participation_ratio(mode.vector);
}

enum class CenterEstimator { argmax, centroid };

// Wavepacket center x0 (sites are 1..N). argmax breaks ties to the smallest
// index; centroid is sum_m m |phi(m)|^2.
inline double wavepacket_center(const Eigen::VectorXcd& vector,
                                CenterEstimator estimator = CenterEstimator::argmax) {
    const int n = static_cast<int>(vector.size());
    if (n < 1) throw std::invalid_argument("wavepacket_center: empty vector");
    if (estimator == CenterEstimator::argmax) {
        int arg = 0;
        double best = -1.0;
        for (int i = 0; i < n; ++i) {
            const double p = std::norm(vector(i));
            if (p > best * (1.0 + 1e-14)) {
                best = p;
                arg = i;
            }
        }
        return static_cast<double>(arg + 1);
    }
    double num = 0.0, den = 0.0;
    for (int i = 0; i < n; ++i) {
        const double p = std::norm(vector(i));
        num += (i + 1) * p;
        den += p;
    }
    return num / den;
}

inline double wavepacket_center(const EigenMode& mode,
                                CenterEstimator estimator = CenterEstimator::argmax) {
    return wavepacket_center(mode.vector, estimator);
}

// ---------------------------------------------------------- center histogram

enum class PotentialFit { constant, harmonic };

struct LocalizationStats {
    int n_sites = 0;
    int n_modes = 0;
    std::vector<double> bin_centers;
    std::vector<double> bin_density;    // P(x0), normalized: sum P * dx = 1
    std::vector<double> potential;      // V(x0) = -ln P(x0)
    double bin_width = 0.0;
    PotentialFit fit = PotentialFit::constant;
    double constant_level = 0.0;   // constant-fit value
    double harmonic_center = 0.0;  // harmonic-fit parameters
    double harmonic_sigma = 0.0;
    double harmonic_offset = 0.0;
    double sse_constant = 0.0;
    double sse_harmonic = 0.0;
    bool low_statistics = false;  // fewer than 500 modes
};

// Histogram of wavepacket centers over [1, N] with add-one smoothing of empty
// interior bins; V = -ln P; constant vs harmonic fit chosen by BIC on the
// interior bins, with the outermost 5% of sites excluded on each side.
inline LocalizationStats center_statistics(std::span<const double> centers, int n_sites,
                                           int n_bins = 0) {
    if (centers.empty()) throw std::invalid_argument("center_statistics: no modes");
    if (n_sites < 2) throw std::invalid_argument("center_statistics: need n_sites >= 2");
    if (n_bins <= 0) n_bins = (n_sites + 9) / 10;
    if (n_bins < 3) n_bins = 3;

    LocalizationStats out;
    out.n_sites = n_sites;
    out.n_modes = static_cast<int>(centers.size());
    out.low_statistics = out.n_modes < 500;

    const double lo = 0.5, hi = n_sites + 0.5;
    const double width = (hi - lo) / n_bins;
    out.bin_width = width;
    std::vector<double> counts(static_cast<std::size_t>(n_bins), 0.0);
    for (double c : centers) {
        int b = static_cast<int>((c - lo) / width);
        b = std::clamp(b, 0, n_bins - 1);
        counts[static_cast<std::size_t>(b)] += 1.0;
    }
    int occupied = 0;
    for (double c : counts)
        if (c > 0.0) ++occupied;
    if (occupied <= 1)
        throw std::runtime_error("center_statistics: all mass in one bin (degenerate)");

    // Add-one smoothing only on empty interior bins (keeps -ln P finite).
    for (int b = 1; b + 1 < n_bins; ++b)
        if (counts[static_cast<std::size_t>(b)] == 0.0) counts[static_cast<std::size_t>(b)] = 1.0;

    double total = 0.0;
    for (double c : counts) total += c;
    out.bin_centers.resize(static_cast<std::size_t>(n_bins));
    out.bin_density.resize(static_cast<std::size_t>(n_bins));
    out.potential.resize(static_cast<std::size_t>(n_bins));
    for (int b = 0; b < n_bins; ++b) {
        out.bin_centers[static_cast<std::size_t>(b)] = lo + (b + 0.5) * width;
        const double p = counts[static_cast<std::size_t>(b)] / (total * width);
        out.bin_density[static_cast<std::size_t>(b)] = p;
        out.potential[static_cast<std::size_t>(b)] =
            p > 0.0 ? -std::log(p) : std::numeric_limits<double>::infinity();
    }

    // Interior fit window: drop 5% of sites per side (boundary depletion).
    const double edge = 0.05 * n_sites;
    std::vector<double> xs, vs;
    for (int b = 0; b < n_bins; ++b) {
        const double x = out.bin_centers[static_cast<std::size_t>(b)];
        if (x < 1.0 + edge || x > n_sites - edge) continue;
        if (!std::isfinite(out.potential[static_cast<std::size_t>(b)])) continue;
        xs.push_back(x);
        vs.push_back(out.potential[static_cast<std::size_t>(b)]);
    }
    if (xs.size() < 4) throw std::runtime_error("center_statistics: too few interior bins to fit");
    const int m = static_cast<int>(xs.size());

    // Constant fit.
    double mean_v = 0.0;
    for (double v : vs) mean_v += v;
    mean_v /= m;
    double sse_c = 0.0;
    for (double v : vs) sse_c += (v - mean_v) * (v - mean_v);
    out.constant_level = mean_v;
    out.sse_constant = sse_c;

    // Quadratic fit V = a x^2 + b x + c by least squares (normal equations).
    double s0 = m, s1 = 0, s2 = 0, s3 = 0, s4 = 0, t0 = 0, t1 = 0, t2 = 0;
    for (int i = 0; i < m; ++i) {
        const double x = xs[static_cast<std::size_t>(i)], v = vs[static_cast<std::size_t>(i)];
        const double x2 = x * x;
        s1 += x;
        s2 += x2;
        s3 += x2 * x;
        s4 += x2 * x2;
        t0 += v;
        t1 += x * v;
        t2 += x2 * v;
    }
    Eigen::Matrix3d A;
    A << s4, s3, s2, s3, s2, s1, s2, s1, s0;
    Eigen::Vector3d rhs(t2, t1, t0);
    const Eigen::Vector3d abc = A.fullPivLu().solve(rhs);
    const double qa = abc(0), qb = abc(1), qc = abc(2);
    double sse_h = 0.0;
    for (int i = 0; i < m; ++i) {
        const double x = xs[static_cast<std::size_t>(i)];
        const double e = vs[static_cast<std::size_t>(i)] - (qa * x * x + qb * x + qc);
        sse_h += e * e;
    }
    out.sse_harmonic = sse_h;
    if (qa > 0.0) {
        out.harmonic_center = -qb / (2.0 * qa);
        out.harmonic_sigma = std::sqrt(1.0 / qa);
        out.harmonic_offset = qc - qb * qb / (4.0 * qa);
    }

    // Model choice by BIC: k = 1 for constant, 3 for the parabola. An
    // upward-opening parabola is required for a harmonic well.
    const double eps = 1e-300;
    const double bic_c = m * std::log(sse_c / m + eps) + 1.0 * std::log(static_cast<double>(m));
    const double bic_h = m * std::log(sse_h / m + eps) + 3.0 * std::log(static_cast<double>(m));
    out.fit = (qa > 0.0 && bic_h < bic_c) ? PotentialFit::harmonic : PotentialFit::constant;
    return out;
}

// Log-log slope alpha of the harmonic width sigma(N) ~ N^alpha.
inline double sigma_scaling(const std::vector<std::pair<int, double>>& widths) {
    if (widths.size() < 3)
        throw std::invalid_argument("sigma_scaling: need at least 3 system sizes");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const int n = static_cast<int>(widths.size());
    for (const auto& [size, sigma] : widths) {
        if (!(sigma > 0.0)) throw std::invalid_argument("sigma_scaling: sigma must be positive");
        const double x = std::log(static_cast<double>(size)), y = std::log(sigma);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// ------------------------------------------------- boundary-radiation model

namespace detail {

// ln cosh(z) without overflow.
inline double log_cosh(double z) {
    const double a = std::abs(z);
    return a + std::log1p(std::exp(-2.0 * a)) - std::numbers::ln2;
}

}  // namespace detail

// Exponent of the predicted typical rate for a localized wavepacket with
// center distribution P(x0):
//   integral of ln(exp(-N/xi_phi) cosh((2 x0 - N)/xi_phi)) P(x0) dx0,
// evaluated by midpoint quadrature over the histogram bins. Prefactor-free;
// meaningful for slope comparisons in N.
inline double predict_typ_rate(std::span<const double> bin_centers,
                               std::span<const double> bin_density, double bin_width,
                               double xi_phi, int n_sites) {
    if (bin_centers.size() != bin_density.size() || bin_centers.empty())
        throw std::invalid_argument("predict_typ_rate: bad histogram");
    if (!(xi_phi > 0.0)) throw std::invalid_argument("predict_typ_rate: xi_phi must be positive");
    double mass = 0.0;
    for (double p : bin_density) mass += p * bin_width;
    if (std::abs(mass - 1.0) > 1e-6)
        throw std::invalid_argument("predict_typ_rate: P(x0) is not normalized");
    const double n = static_cast<double>(n_sites);
    double acc = 0.0;
    for (std::size_t b = 0; b < bin_centers.size(); ++b) {
        const double z = (2.0 * bin_centers[b] - n) / xi_phi;
        acc += (-n / xi_phi + detail::log_cosh(z)) * bin_density[b] * bin_width;
    }
    return acc;
}

// ------------------------------------------------------- scale equivalence

struct EquivalenceRow {
    int n = 0;
    double w = 0.0;
    double xi = 0.0;
    double xi_phi = 0.0;
    double ratio = 0.0;
};

struct EquivalenceReport {
    std::vector<EquivalenceRow> rows;
    double ratio_mean = 0.0;
    double ratio_min = 0.0;
    double ratio_max = 0.0;
};

// Per-cell ratio xi / xi_phi on saturated cells. Both tables are rows of
// (n, w, value); cells qualify when a crossover size is known for w and
// n >= 2 * N_c (and w > 0).
inline EquivalenceReport equivalence_check(
    const std::vector<std::tuple<int, double, double>>& xi_rows,
    const std::vector<std::tuple<int, double, double>>& xi_phi_rows,
    const std::vector<std::pair<double, std::optional<int>>>& crossover_by_w) {
    EquivalenceReport rep;
    auto nc_of = [&](double w) -> std::optional<int> {
        for (const auto& [wv, nc] : crossover_by_w)
            if (wv == w) return nc;
        return std::nullopt;
    };
    for (const auto& [n, w, xi] : xi_rows) {
        if (!(w > 0.0)) continue;
        const auto nc = nc_of(w);
        if (!nc || !*nc || n < 2 * *nc) continue;
        for (const auto& [n2, w2, xips] : xi_phi_rows) {
            if (n2 != n || w2 != w) continue;
            if (!(xips > 0.0) || !(xi > 0.0)) continue;
            rep.rows.push_back({n, w, xi, xips, xi / xips});
        }
    }
    if (rep.rows.empty())
        throw std::runtime_error("equivalence_check: no overlapping saturated cells");
    double s = 0.0, mn = 1e300, mx = -1e300;
    for (const auto& r : rep.rows) {
        s += r.ratio;
        mn = std::min(mn, r.ratio);
        mx = std::max(mx, r.ratio);
    }
    rep.ratio_mean = s / static_cast<double>(rep.rows.size());
    rep.ratio_min = mn;
    rep.ratio_max = mx;
    return rep;
}

}  // namespace subrad
