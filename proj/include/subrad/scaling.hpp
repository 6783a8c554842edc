// scaling.hpp — power-law and exponential fits of Gamma^typ(N), the
// moment-ratio characteristic scale xi = M3/M2 - M2/M1, and crossover-size
// detection.

#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace subrad {

struct ScalingSeries {
    std::vector<int> n;        // strictly increasing sizes
    std::vector<double> value; // positive rates

    void validate() const {
        if (n.size() != value.size()) throw std::invalid_argument("ScalingSeries: length mismatch");
        for (std::size_t i = 0; i < n.size(); ++i) {
            if (i > 0 && n[i] <= n[i - 1])
                throw std::invalid_argument("ScalingSeries: sizes must be strictly increasing");
            if (!(value[i] > 0.0))
                throw std::invalid_argument("ScalingSeries: values must be positive");
        }
    }
    std::size_t size() const { return n.size(); }
};

struct FitResult {
    double slope = 0.0;      // raw slope of the linearization
    double prefactor = 0.0;  // exp(intercept)
    double r_squared = 0.0;
    double sse = 0.0;        // residual sum of squares in ln(value)
};

namespace detail {

inline FitResult linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
    const int n = static_cast<int>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    FitResult f;
    f.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    const double intercept = (sy - f.slope * sx) / n;
    f.prefactor = std::exp(intercept);
    const double mean_y = sy / n;
    double sse = 0, tss = 0;
    for (int i = 0; i < n; ++i) {
        const double e = y[i] - (intercept + f.slope * x[i]);
        sse += e * e;
        tss += (y[i] - mean_y) * (y[i] - mean_y);
    }
    f.sse = sse;
    f.r_squared = tss > 0.0 ? 1.0 - sse / tss : 1.0;
    return f;
}

}  // namespace detail

struct PowerLawFit : FitResult {
    double exponent() const { return slope; }
};

// Least squares on (ln n, ln value). Two points give the exact two-point
// slope.
inline PowerLawFit fit_power_law(const ScalingSeries& s) {
    s.validate();
    if (s.size() < 2) throw std::invalid_argument("fit_power_law: need at least 2 points");
    std::vector<double> x(s.size()), y(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        x[i] = std::log(static_cast<double>(s.n[i]));
        y[i] = std::log(s.value[i]);
    }
    PowerLawFit f;
    static_cast<FitResult&>(f) = detail::linear_fit(x, y);
    return f;
}

struct ExponentialFit : FitResult {
    double xi_inf = 0.0;  // -1/slope

    double at(double n) const { return prefactor * std::exp(-n / xi_inf); }
};

struct NotExponentialError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Least squares on (n, ln value); the slope must be negative (decay).
inline ExponentialFit fit_exponential(const ScalingSeries& s) {
    s.validate();
    if (s.size() < 3) throw std::invalid_argument("fit_exponential: need at least 3 points");
    std::vector<double> x(s.size()), y(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        x[i] = static_cast<double>(s.n[i]);
        y[i] = std::log(s.value[i]);
    }
    ExponentialFit f;
    static_cast<FitResult&>(f) = detail::linear_fit(x, y);
    if (!(f.slope < 0.0))
        throw NotExponentialError("fit_exponential: non-negative semilog slope (growth)");
    f.xi_inf = -1.0 / f.slope;
    return f;
}

// xi = M3/M2 - M2/M1 with M_q = sum_i n_i^q value_i w_i. Grid weights w_i are
// the midpoint spacings (one-sided at the ends), so a uniform grid of step d
// weighs every point by d and the ratios reduce to plain sums.
inline double xi_from_moments(const ScalingSeries& s) {
    s.validate();
    if (s.size() < 2) throw std::invalid_argument("xi_from_moments: need at least 2 points");
    const std::size_t m = s.size();
    double m1 = 0, m2 = 0, m3 = 0;
    for (std::size_t i = 0; i < m; ++i) {
        double w;
        if (i == 0)
            w = static_cast<double>(s.n[1] - s.n[0]);
        else if (i + 1 == m)
            w = static_cast<double>(s.n[m - 1] - s.n[m - 2]);
        else
            w = 0.5 * static_cast<double>(s.n[i + 1] - s.n[i - 1]);
        const double nn = static_cast<double>(s.n[i]);
        const double base = nn * s.value[i] * w;
        m1 += base;
        m2 += base * nn;
        m3 += base * nn * nn;
    }
    const double xi = m3 / m2 - m2 / m1;
    if (!(xi > 0.0))
        throw std::runtime_error("xi_from_moments: non-positive scale (degenerate series)");
    return xi;
}

struct GridMismatchError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Smallest n where the disordered series has dropped below the ordered
// reference by e^{-1} while still sitting above 2 e^{-1} of its exponential
// fit; absent when no grid point qualifies.
inline std::optional<int> detect_crossover_nc(const ScalingSeries& series,
                                              const ScalingSeries& ordered_reference,
                                              const ExponentialFit& exp_fit) {
    series.validate();
    ordered_reference.validate();
    if (series.n != ordered_reference.n)
        throw GridMismatchError("detect_crossover_nc: series and reference grids differ");
    const double drop = std::exp(-1.0);
    const double above = 2.0 * std::exp(-1.0);
    for (std::size_t i = 0; i < series.size(); ++i) {
        const double r_ref = series.value[i] / ordered_reference.value[i];
        const double r_fit = series.value[i] / exp_fit.at(static_cast<double>(series.n[i]));
        if (r_ref <= drop && r_fit >= above) return series.n[i];
    }
    return std::nullopt;
}

}  // namespace subrad
