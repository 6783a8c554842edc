// linalg.hpp — LAPACK-backed dense complex eigensolver and tridiagonal kernels.

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "subrad/rng.hpp"

extern "C" {
void zgeev_(const char* jobvl, const char* jobvr, const int* n, std::complex<double>* a,
            const int* lda, std::complex<double>* w, std::complex<double>* vl, const int* ldvl,
            std::complex<double>* vr, const int* ldvr, std::complex<double>* work, const int* lwork,
            double* rwork, int* info);
}

namespace subrad {

struct EigenSolverError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct EigResult {
    Eigen::VectorXcd values;
    Eigen::MatrixXcd vectors;  // columns; empty when not requested
};

// General dense complex (non-Hermitian) eigendecomposition via LAPACK zgeev.
inline EigResult eig_dense(const Eigen::MatrixXcd& a, bool with_vectors) {
    const int n = static_cast<int>(a.rows());
    if (a.cols() != n) throw std::invalid_argument("eig_dense: matrix must be square");
    if (n == 0) throw std::invalid_argument("eig_dense: empty matrix");

    Eigen::MatrixXcd work_a = a;
    EigResult res;
    res.values.resize(n);
    if (with_vectors) res.vectors.resize(n, n);

    std::vector<std::complex<double>> work(1);
    std::vector<double> rwork(2 * n);
    int info = 0, lwork = -1;
    const char* jobvr = with_vectors ? "V" : "N";
    std::complex<double>* vr = with_vectors ? res.vectors.data() : nullptr;

    zgeev_("N", jobvr, &n, work_a.data(), &n, res.values.data(), nullptr, &n, vr, &n, work.data(),
           &lwork, rwork.data(), &info);
    lwork = static_cast<int>(work[0].real());
    work.resize(static_cast<std::size_t>(lwork));
    zgeev_("N", jobvr, &n, work_a.data(), &n, res.values.data(), nullptr, &n, vr, &n, work.data(),
           &lwork, rwork.data(), &info);
    if (info != 0)
        throw EigenSolverError("zgeev failed to converge (info=" + std::to_string(info) + ")");
    return res;
}

namespace detail {

// Solve (tridiagonal) T x = b in place by Gaussian elimination with partial
// pivoting; sub/dia/sup are destroyed. Row swaps introduce a second
// superdiagonal of fill-in.
inline void solve_tridiagonal_pp(std::vector<std::complex<double>>& sub,
                                 std::vector<std::complex<double>>& dia,
                                 std::vector<std::complex<double>>& sup,
                                 std::vector<std::complex<double>>& rhs) {
    using C = std::complex<double>;
    const int n = static_cast<int>(dia.size());
    if (n == 1) {
        if (dia[0] == C(0.0)) dia[0] = C(1e-300, 0.0);
        rhs[0] /= dia[0];
        return;
    }
    std::vector<C> fill(n, C(0.0));  // second superdiagonal after pivoting
    for (int i = 0; i + 1 < n; ++i) {
        C next_sup = (i + 2 < n) ? sup[i + 1] : C(0.0);
        if (std::abs(sub[i]) > std::abs(dia[i])) {
            std::swap(dia[i], sub[i]);
            std::swap(sup[i], dia[i + 1]);
            std::swap(fill[i], next_sup);
            std::swap(rhs[i], rhs[i + 1]);
        }
        if (dia[i] == C(0.0)) dia[i] = C(1e-300, 0.0);
        const C m = sub[i] / dia[i];
        dia[i + 1] -= m * sup[i];
        next_sup -= m * fill[i];
        rhs[i + 1] -= m * rhs[i];
        if (i + 2 < n) sup[i + 1] = next_sup;
    }
    if (dia[n - 1] == C(0.0)) dia[n - 1] = C(1e-300, 0.0);
    rhs[n - 1] /= dia[n - 1];
    if (n >= 2) rhs[n - 2] = (rhs[n - 2] - sup[n - 2] * rhs[n - 1]) / dia[n - 2];
    for (int i = n - 3; i >= 0; --i)
        rhs[i] = (rhs[i] - sup[i] * rhs[i + 1] - fill[i] * rhs[i + 2]) / dia[i];
}

}  // namespace detail

struct TridiagonalVector {
    Eigen::VectorXcd v;       // unit norm
    double residual = 0.0;    // ||(T - lambda) v|| / |T|_max
};

// Eigenvector of the symmetric tridiagonal matrix (diag, offdiag) for a known
// eigenvalue, by inverse iteration with a deterministic seeded start vector.
// Returns the best vector found with its scaled residual; near-degenerate
// clusters or ill-conditioned eigenvalues can leave the residual above the
// target, and the caller decides what is acceptable.
inline TridiagonalVector tridiagonal_eigenvector(const Eigen::VectorXcd& diag,
                                                 const Eigen::VectorXcd& offdiag,
                                                 std::complex<double> lambda, std::uint64_t seed,
                                                 std::uint64_t stream, int max_iters = 4,
                                                 double rel_residual_tol = 1e-10) {
    using C = std::complex<double>;
    const int n = static_cast<int>(diag.size());
    Eigen::VectorXcd v(n);
    const CounterRng rng(seed, stream);

    double scale = 0.0;  // |T|_max for the residual scale
    for (int i = 0; i < n; ++i) scale = std::max(scale, std::abs(diag(i)));
    for (int i = 0; i + 1 < n; ++i) scale = std::max(scale, std::abs(offdiag(i)));
    if (scale == 0.0) scale = 1.0;

    TridiagonalVector best;
    best.residual = std::numeric_limits<double>::infinity();

    for (int attempt = 0; attempt < 2; ++attempt) {
        for (int i = 0; i < n; ++i)
            v(i) = C(rng.symmetric(2 * static_cast<std::uint64_t>(i) + 4096ull * attempt),
                     rng.symmetric(2 * static_cast<std::uint64_t>(i) + 1 + 4096ull * attempt));
        v.normalize();

        std::vector<C> sub(n > 1 ? n - 1 : 0), dia(n), sup(n > 1 ? n - 1 : 0), rhs(n);
        for (int it = 0; it < max_iters; ++it) {
            for (int i = 0; i < n; ++i) dia[i] = diag(i) - lambda;
            for (int i = 0; i + 1 < n; ++i) sub[i] = sup[i] = offdiag(i);
            for (int i = 0; i < n; ++i) rhs[i] = v(i);
            detail::solve_tridiagonal_pp(sub, dia, sup, rhs);
            for (int i = 0; i < n; ++i) v(i) = rhs[i];
            v.normalize();

            // residual ||(T - lambda) v|| against the tridiagonal form
            double res2 = 0.0;
            for (int i = 0; i < n; ++i) {
                C r = (diag(i) - lambda) * v(i);
                if (i > 0) r += offdiag(i - 1) * v(i - 1);
                if (i + 1 < n) r += offdiag(i) * v(i + 1);
                res2 += std::norm(r);
            }
            const double res = std::sqrt(res2) / scale;
            if (res < best.residual) {
                best.v = v;
                best.residual = res;
            }
            if (res <= rel_residual_tol) return best;
        }
    }
    return best;
}

}  // namespace subrad
