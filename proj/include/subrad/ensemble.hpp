// ensemble.hpp — seeded disorder ensembles over (N, W) grids.
//
// Realizations are independent work items mapped over a bounded worker pool
// into index-addressed buffers; all reductions then run single-threaded in
// realization-index order, so results are bit-identical for any worker count.
// One diagonalization per (cell, realization) serves every mode target.

#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "subrad/linalg.hpp"
#include "subrad/localization.hpp"
#include "subrad/model.hpp"
#include "subrad/spectrum.hpp"

namespace subrad {

struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Gamma^typ = exp(<ln Gamma>), reduced in fixed input order.
inline double typical(std::span<const double> values) {
    if (values.empty()) throw std::invalid_argument("typical: empty value list");
    double lo = values[0], hi = values[0];
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!(values[i] > 0.0))
            throw DataError("typical: non-positive value at realization index " +
                            std::to_string(i));
        lo = std::min(lo, values[i]);
        hi = std::max(hi, values[i]);
    }
    if (lo == hi) return lo;  // constant list: exact, no exp/log round trip
    double acc = 0.0;
    for (double v : values) acc += std::log(v);
    return std::exp(acc / static_cast<double>(values.size()));
}

struct EnsembleStats {
    int n_qubits = 0;
    double disorder_w = 0.0;
    ModeTarget target;
    int n_realizations = 0;  // successful realizations entering the stats
    double gamma_typ = 0.0;
    double gamma_avg = 0.0;
    double ln_gamma_std = 0.0;
    std::uint64_t master_seed = 0;
    long index_lo = 0;  // seed provenance: realization index range
    long index_hi = 0;
    int n_failed = 0;
    std::vector<long> failed_indices;
    bool aborted = false;  // > 1% of realizations failed
    std::string error;
};

// Per-realization summary of the selected mode (localization interface).
struct ModeSummary {
    long realization_index = 0;
    double gamma = 0.0;
    double omega_re = 0.0;
    double k_est = 0.0;
    double p_left = 0.0;   // |phi(1)|^2
    double p_right = 0.0;  // |phi(N)|^2
    double xi_phi = 0.0;
    double x0 = 0.0;
    ModeClass mode_class = ModeClass::weak_subradiant;
};

struct EnsembleOptions {
    int workers = 0;                  // <= 0: hardware concurrency
    bool collect_summaries = false;   // eigenvectors + localization summaries
    std::vector<int> summary_targets; // target indices to summarize (empty = all)
    CenterEstimator center_estimator = CenterEstimator::argmax;
    std::function<void(long, long)> progress;  // (items done, items total); may be called concurrently
};

struct EnsembleResult {
    std::vector<EnsembleStats> stats;                 // cell-major: spec * targets
    std::vector<std::vector<ModeSummary>> summaries;  // parallel to stats (may be empty)
    int vector_fallbacks = 0;  // realizations that needed the dense eigenvector path
};

namespace detail {

inline int resolve_workers(int requested) {
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

// Map fn(0..n_items) over a worker pool.
template <typename Fn>
inline void parallel_for(long n_items, int workers, Fn&& fn) {
    if (workers <= 1 || n_items <= 1) {
        for (long i = 0; i < n_items; ++i) fn(i);
        return;
    }
    std::atomic<long> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int t = 0; t < workers; ++t) {
        pool.emplace_back([&]() {
            for (;;) {
                const long i = next.fetch_add(1);
                if (i >= n_items) return;
                fn(i);
            }
        });
    }
    for (auto& th : pool) th.join();
}

struct RealizationOutput {
    std::vector<double> gamma;        // per target
    std::vector<ModeSummary> summary; // per target (only requested slots filled)
    bool failed = false;
    bool used_dense_fallback = false;
    std::string error;
};

}  // namespace detail

// Runs the per-realization pipeline (offsets -> positions -> H_eff ->
// eigenvalues -> target selection -> Gamma) for every (spec, target) cell.
// Decay rates below the eigensolver resolution floor are recovered from the
// boundary-radiation identity with eigenvectors obtained by inverse iteration
// on the tridiagonal inverse Hamiltonian.
inline EnsembleResult run_ensemble(const std::vector<ChainSpec>& specs,
                                   const std::vector<ModeTarget>& targets, int n_realizations,
                                   const EnsembleOptions& options = {}) {
    if (n_realizations < 1)
        throw std::invalid_argument("run_ensemble: n_realizations must be >= 1");
    if (specs.empty() || targets.empty())
        throw std::invalid_argument("run_ensemble: empty spec or target grid");
    for (const auto& s : specs) s.validate();
    const int n_targets = static_cast<int>(targets.size());
    const int workers = detail::resolve_workers(options.workers);

    // summary_slot[t] >= 0 when per-realization summaries are kept for target t
    std::vector<int> summary_slot(static_cast<std::size_t>(n_targets), -1);
    int n_summary_slots = 0;
    if (options.collect_summaries) {
        for (int t = 0; t < n_targets; ++t) {
            bool wanted = options.summary_targets.empty();
            for (int i : options.summary_targets)
                if (i == t) wanted = true;
            if (wanted) summary_slot[static_cast<std::size_t>(t)] = n_summary_slots++;
        }
    }

    // Ordered-chain ranks for sorted_index selectors, once per (spec, target).
    std::vector<std::vector<int>> ranks(specs.size(), std::vector<int>(targets.size(), -1));
    for (std::size_t s = 0; s < specs.size(); ++s)
        for (int t = 0; t < n_targets; ++t)
            if (targets[static_cast<std::size_t>(t)].selector == Selector::sorted_index)
                ranks[s][static_cast<std::size_t>(t)] = ordered_target_rank(
                    specs[s].n_qubits, specs[s].phi, targets[static_cast<std::size_t>(t)],
                    specs[s].gamma);

    // index-addressed output buffers: [spec][realization]
    std::vector<std::vector<detail::RealizationOutput>> buffers(specs.size());
    for (auto& b : buffers) b.resize(static_cast<std::size_t>(n_realizations));

    const long n_items = static_cast<long>(specs.size()) * n_realizations;
    std::atomic<long> done{0};
    detail::parallel_for(n_items, workers, [&](long item) {
        if (options.progress) options.progress(done.fetch_add(1), n_items);
        const std::size_t s = static_cast<std::size_t>(item) / n_realizations;
        const long r = static_cast<long>(item % n_realizations);
        const ChainSpec& spec = specs[s];
        detail::RealizationOutput& out = buffers[s][static_cast<std::size_t>(r)];
        out.gamma.assign(static_cast<std::size_t>(n_targets),
                         std::numeric_limits<double>::quiet_NaN());
        out.summary.resize(static_cast<std::size_t>(n_summary_slots));
        try {
            const auto offsets = sample_offsets(spec, r);
            const Realization real = build_positions(spec, offsets, r);
            const DenseHamiltonian h = build_h_eff(real, spec.gamma, spec.phi);
            EigResult eig = eig_dense(h.entries, false);
            const int n = spec.n_qubits;

            std::vector<int> order(static_cast<std::size_t>(n));
            for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
            std::sort(order.begin(), order.end(), [&](int a, int b) {
                const double ra = eig.values(a).real(), rb = eig.values(b).real();
                if (ra != rb) return ra < rb;
                const double ia = -eig.values(a).imag(), ib = -eig.values(b).imag();
                if (ia != ib) return ia < ib;
                return a < b;
            });

            std::optional<TridiagonalInverse> tri;
            auto need_tri = [&]() -> const TridiagonalInverse& {
                if (!tri) tri = build_h_inv(real, spec.gamma, spec.phi);
                return *tri;
            };
            // lazily computed eigenvectors + resolved Gammas, by source index
            std::vector<Eigen::VectorXcd> vectors(static_cast<std::size_t>(n));
            std::vector<double> resolved(static_cast<std::size_t>(n),
                                         std::numeric_limits<double>::quiet_NaN());
            std::optional<EigResult> dense_full;  // one shared fallback per realization
            auto vector_of = [&](int src) -> const Eigen::VectorXcd& {
                auto& v = vectors[static_cast<std::size_t>(src)];
                if (v.size() == 0) {
                    const auto& t = need_tri();
                    const Complex lambda = 1.0 / eig.values(src);
                    const std::uint64_t stream =
                        (static_cast<std::uint64_t>(r) << 20) ^ static_cast<std::uint64_t>(src) ^
                        (static_cast<std::uint64_t>(spec.n_qubits) << 44);
                    TridiagonalVector tv = tridiagonal_eigenvector(
                        t.diag, t.offdiag, lambda, spec.master_seed ^ 0xE16E54ull, stream);
                    // Accept slightly loose vectors (quasi-degenerate clusters
                    // bound the reachable residual by their splitting).
                    if (tv.residual <= 1e-6) {
                        v = std::move(tv.v);
                    } else {
                        out.used_dense_fallback = true;
                        if (!dense_full) dense_full = eig_dense(h.entries, true);
                        v = dense_full->vectors.col(src);
                        v.normalize();
                    }
                    detail::canonicalize_phase(v);
                }
                return v;
            };
            auto gamma_of = [&](int src) {
                double& g = resolved[static_cast<std::size_t>(src)];
                if (std::isnan(g)) {
                    const double geig = -eig.values(src).imag();
                    if (geig >= kGammaResolutionFloor * spec.gamma) {
                        g = geig;
                    } else {
                        const auto& v = vector_of(src);
                        const double bp = std::norm(v(0)) + std::norm(v(n - 1));
                        g = boundary_gamma(bp, eig.values(src).real(), spec.gamma);
                    }
                }
                return g;
            };
            std::vector<double> k_est_cache(static_cast<std::size_t>(n),
                                            std::numeric_limits<double>::quiet_NaN());
            auto k_est_of = [&](int src) {
                double& k = k_est_cache[static_cast<std::size_t>(src)];
                if (std::isnan(k)) k = estimate_k(vector_of(src));
                return k;
            };
            std::vector<double> sin_table;  // built on first nearest_k use
            auto need_sin_table = [&]() -> const std::vector<double>& {
                if (sin_table.empty()) sin_table = make_sin_table(n);
                return sin_table;
            };

            for (int t = 0; t < n_targets; ++t) {
                const ModeTarget& target = targets[static_cast<std::size_t>(t)];
                int pick_rank = 0;
                switch (target.selector) {
                    case Selector::nearest_k: {
                        const auto kernel = selection_kernel(n, target.k_value());
                        const auto& table = need_sin_table();
                        double best = -1.0;
                        for (int rank = 0; rank < n; ++rank) {
                            const int src = order[static_cast<std::size_t>(rank)];
                            const double m =
                                spectral_weight_metric(vector_of(src), kernel, table);
                            if (m > best * (1.0 + 1e-12)) {
                                best = m;
                                pick_rank = rank;
                            }
                        }
                        break;
                    }
                    case Selector::nearest_omega: {
                        const double om = target_omega(spec.phi, target, spec.gamma);
                        double best = 1e300;
                        for (int rank = 0; rank < n; ++rank) {
                            const double d =
                                std::abs(eig.values(order[static_cast<std::size_t>(rank)]).real() -
                                         om);
                            if (d < best) {
                                best = d;
                                pick_rank = rank;
                            }
                        }
                        break;
                    }
                    case Selector::min_gamma: {
                        if (target.kind == TargetKind::fixed_k)
                            throw std::invalid_argument(
                                "min_gamma selector is for band-edge targets only");
                        // restricted to the target's band side, as in
                        // select_target_mode
                        const bool want_low = target.kind == TargetKind::band_edge_low;
                        double best = 1e300;
                        int found = -1;
                        for (int rank = 0; rank < n; ++rank) {
                            const int src = order[static_cast<std::size_t>(rank)];
                            const double om = eig.values(src).real();
                            if (want_low ? !(om > 0.0) : !(om < 0.0)) continue;
                            const double g = gamma_of(src);
                            if (g < best) {
                                best = g;
                                found = rank;
                            }
                        }
                        if (found < 0) {
                            for (int rank = 0; rank < n; ++rank) {
                                const double g = gamma_of(order[static_cast<std::size_t>(rank)]);
                                if (g < best) {
                                    best = g;
                                    found = rank;
                                }
                            }
                        }
                        pick_rank = found;
                        break;
                    }
                    case Selector::sorted_index:
                        pick_rank = ranks[s][static_cast<std::size_t>(t)];
                        break;
                }
                const int src = order[static_cast<std::size_t>(pick_rank)];
                const double g = gamma_of(src);
                out.gamma[static_cast<std::size_t>(t)] = g;

                if (summary_slot[static_cast<std::size_t>(t)] >= 0) {
                    const auto& v = vector_of(src);
                    ModeSummary& ms =
                        out.summary[static_cast<std::size_t>(summary_slot[static_cast<std::size_t>(t)])];
                    ms.realization_index = r;
                    ms.gamma = g;
                    ms.omega_re = eig.values(src).real();
                    ms.k_est = k_est_of(src);
                    ms.p_left = std::norm(v(0));
                    ms.p_right = std::norm(v(n - 1));
                    ms.xi_phi = participation_ratio(v);
                    ms.x0 = wavepacket_center(v, options.center_estimator);
                    ms.mode_class = classify_mode(ms.k_est, spec.phi);
                }
            }
        } catch (const std::exception& e) {
            out.failed = true;
            out.error = e.what();
        }
    });

    // fixed-order reduction
    EnsembleResult result;
    result.stats.reserve(specs.size() * targets.size());
    result.summaries.resize(specs.size() * targets.size());
    for (std::size_t s = 0; s < specs.size(); ++s) {
        for (int t = 0; t < n_targets; ++t) {
            EnsembleStats st;
            st.n_qubits = specs[s].n_qubits;
            st.disorder_w = specs[s].disorder_w;
            st.target = targets[static_cast<std::size_t>(t)];
            st.master_seed = specs[s].master_seed;
            st.index_lo = 0;
            st.index_hi = n_realizations - 1;

            std::vector<double> gammas;
            gammas.reserve(static_cast<std::size_t>(n_realizations));
            auto& summary_out = result.summaries[s * targets.size() + static_cast<std::size_t>(t)];
            for (long r = 0; r < n_realizations; ++r) {
                const auto& out = buffers[s][static_cast<std::size_t>(r)];
                if (out.failed) {
                    if (t == 0 && out.used_dense_fallback) ++result.vector_fallbacks;
                    st.failed_indices.push_back(r);
                    if (st.error.empty()) st.error = out.error;
                    continue;
                }
                if (t == 0 && out.used_dense_fallback) ++result.vector_fallbacks;
                gammas.push_back(out.gamma[static_cast<std::size_t>(t)]);
                const int slot = summary_slot[static_cast<std::size_t>(t)];
                if (slot >= 0) summary_out.push_back(out.summary[static_cast<std::size_t>(slot)]);
            }
            st.n_failed = static_cast<int>(st.failed_indices.size());
            st.aborted = st.n_failed * 100 > n_realizations;
            st.n_realizations = static_cast<int>(gammas.size());
            if (!st.aborted && !gammas.empty()) {
                double lo = gammas[0], hi = gammas[0];
                for (double g : gammas) {
                    lo = std::min(lo, g);
                    hi = std::max(hi, g);
                }
                if (lo == hi) {
                    // constant cell (W = 0): exact equality, zero spread
                    st.gamma_typ = st.gamma_avg = lo;
                    st.ln_gamma_std = 0.0;
                } else {
                    st.gamma_typ = typical(gammas);
                    double sum = 0.0;
                    for (double g : gammas) sum += g;
                    st.gamma_avg = sum / static_cast<double>(gammas.size());
                    double mean_ln = 0.0;
                    for (double g : gammas) mean_ln += std::log(g);
                    mean_ln /= static_cast<double>(gammas.size());
                    double s2 = 0.0;
                    for (double g : gammas) {
                        const double d = std::log(g) - mean_ln;
                        s2 += d * d;
                    }
                    st.ln_gamma_std = gammas.size() > 1
                                          ? std::sqrt(s2 / static_cast<double>(gammas.size() - 1))
                                          : 0.0;
                }
            }
            result.stats.push_back(std::move(st));
        }
    }
    return result;
}

}  // namespace subrad
