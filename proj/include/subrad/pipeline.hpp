// pipeline.hpp — the configured ensemble run shared by the CLI and the
// acceptance suite: cell grid construction, the W = 0 single-realization
// shortcut, canonical cell ordering, and row conversion for analysis.

#pragma once

#include <functional>
#include <vector>

#include "subrad/config.hpp"
#include "subrad/ensemble.hpp"
#include "subrad/formats.hpp"

namespace subrad {

struct PipelineResult {
    std::vector<ChainSpec> specs;  // canonical cell order (disorders outer, sizes inner)
    std::vector<EnsembleStats> stats;
    std::vector<std::vector<ModeSummary>> summaries;
    int vector_fallbacks = 0;
};

inline std::vector<ChainSpec> grid_specs(const RunConfig& c) {
    std::vector<ChainSpec> specs;
    for (double w : c.disorders)
        for (int n : c.sizes) specs.emplace_back(n, c.phi, w, c.gamma, c.master_seed);
    return specs;
}

// Runs the configured grid. Ordered (W = 0) cells are deterministic and run
// with a single realization.
inline PipelineResult run_configured_ensemble(const RunConfig& config,
                                              std::function<void(long, long)> progress = {}) {
    PipelineResult out;
    out.specs = grid_specs(config);

    std::vector<ChainSpec> ordered, disordered;
    std::vector<int> group(out.specs.size());
    for (std::size_t i = 0; i < out.specs.size(); ++i) {
        if (out.specs[i].disorder_w == 0.0) {
            group[i] = 0;
            ordered.push_back(out.specs[i]);
        } else {
            group[i] = 1;
            disordered.push_back(out.specs[i]);
        }
    }

    EnsembleOptions opt;
    opt.workers = config.workers;
    opt.collect_summaries = config.analysis_localization && config.mode_summaries;
    opt.summary_targets = config.summary_targets;
    opt.progress = std::move(progress);

    EnsembleResult res_ord, res_dis;
    if (!ordered.empty()) res_ord = run_ensemble(ordered, config.targets, 1, opt);
    if (!disordered.empty())
        res_dis = run_ensemble(disordered, config.targets, config.n_realizations, opt);

    const std::size_t n_targets = config.targets.size();
    out.stats.resize(out.specs.size() * n_targets);
    out.summaries.resize(out.specs.size() * n_targets);
    std::size_t io = 0, id = 0;
    for (std::size_t i = 0; i < out.specs.size(); ++i) {
        EnsembleResult& src = group[i] == 0 ? res_ord : res_dis;
        std::size_t& idx = group[i] == 0 ? io : id;
        for (std::size_t t = 0; t < n_targets; ++t) {
            out.stats[i * n_targets + t] = std::move(src.stats[idx * n_targets + t]);
            out.summaries[i * n_targets + t] = std::move(src.summaries[idx * n_targets + t]);
        }
        ++idx;
    }
    out.vector_fallbacks = res_ord.vector_fallbacks + res_dis.vector_fallbacks;
    return out;
}

inline std::vector<EnsembleRow> ensemble_rows(const PipelineResult& pipe) {
    std::vector<EnsembleRow> rows;
    for (const EnsembleStats& st : pipe.stats) {
        if (st.aborted || st.n_realizations == 0) continue;
        EnsembleRow r;
        r.n_qubits = st.n_qubits;
        r.disorder_w = st.disorder_w;
        r.kind = st.target.kind;
        r.target_k = st.target.k;
        r.selector = st.target.selector;
        r.n_real = st.n_realizations;
        r.gamma_typ = st.gamma_typ;
        r.gamma_avg = st.gamma_avg;
        r.ln_gamma_std = st.ln_gamma_std;
        r.master_seed = st.master_seed;
        rows.push_back(r);
    }
    return rows;
}

inline std::vector<ModeRow> mode_rows(const PipelineResult& pipe,
                                      const std::vector<ModeTarget>& targets) {
    std::vector<ModeRow> rows;
    const std::size_t n_targets = targets.size();
    for (std::size_t cell = 0; cell < pipe.summaries.size(); ++cell) {
        const auto& list = pipe.summaries[cell];
        if (list.empty()) continue;
        const ChainSpec& spec = pipe.specs[cell / n_targets];
        for (const auto& ms : list) {
            ModeRow r;
            r.n_qubits = spec.n_qubits;
            r.disorder_w = spec.disorder_w;
            r.target_index = static_cast<int>(cell % n_targets);
            r.realization_index = ms.realization_index;
            r.gamma = ms.gamma;
            r.omega_re = ms.omega_re;
            r.k_est_over_pi = ms.k_est / std::numbers::pi;
            r.mode_class = to_string(ms.mode_class);
            r.p_left = ms.p_left;
            r.p_right = ms.p_right;
            r.xi_phi = ms.xi_phi;
            r.x0 = ms.x0;
            rows.push_back(r);
        }
    }
    return rows;
}

}  // namespace subrad
