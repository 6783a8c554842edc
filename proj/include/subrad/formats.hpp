// formats.hpp — on-disk schemas for ensemble outputs: ensemble.csv with a
// mirrored ensemble.json, and modes.csv with the per-realization eigenmode
// summaries consumed by the localization analysis.

#pragma once

#include <charconv>
#include <filesystem>
#include <numbers>
#include <string>
#include <vector>

#include "subrad/config.hpp"
#include "subrad/ensemble.hpp"
#include "subrad/io.hpp"

namespace subrad {

inline const std::vector<std::string> kEnsembleHeader = {
    "n_qubits", "disorder_w", "target_kind",  "target_k",   "selector",
    "n_real",   "gamma_typ",  "gamma_avg",    "ln_gamma_std", "master_seed"};

inline const std::vector<std::string> kModesHeader = {
    "n_qubits", "disorder_w", "target_index", "realization_index", "gamma",
    "omega_re", "k_est_over_pi", "class", "p_left", "p_right", "xi_phi", "x0"};

struct EnsembleRow {
    int n_qubits = 0;
    double disorder_w = 0.0;
    TargetKind kind = TargetKind::band_edge_low;
    double target_k = 0.0;  // radians
    Selector selector = Selector::min_gamma;
    int n_real = 0;
    double gamma_typ = 0.0;
    double gamma_avg = 0.0;
    double ln_gamma_std = 0.0;
    std::uint64_t master_seed = 0;

    // index of the matching entry in a target list, -1 when absent
    int match_target(const std::vector<ModeTarget>& targets) const {
        for (std::size_t t = 0; t < targets.size(); ++t) {
            const auto& tt = targets[t];
            if (tt.kind == kind && tt.selector == selector &&
                std::abs(tt.k - target_k) < 1e-12)
                return static_cast<int>(t);
        }
        return -1;
    }
};

struct ModeRow {
    int n_qubits = 0;
    double disorder_w = 0.0;
    int target_index = 0;
    long realization_index = 0;
    double gamma = 0.0;
    double omega_re = 0.0;
    double k_est_over_pi = 0.0;
    std::string mode_class;
    double p_left = 0.0;
    double p_right = 0.0;
    double xi_phi = 0.0;
    double x0 = 0.0;
};

namespace detail {

inline double parse_double(const std::string& s, const char* what) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw IoError(std::string("bad number in column ") + what + ": '" + s + "'");
    return v;
}

inline long parse_long(const std::string& s, const char* what) {
    long v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw IoError(std::string("bad integer in column ") + what + ": '" + s + "'");
    return v;
}

inline std::uint64_t parse_u64(const std::string& s, const char* what) {
    std::uint64_t v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw IoError(std::string("bad integer in column ") + what + ": '" + s + "'");
    return v;
}

inline TargetKind parse_kind(const std::string& s) {
    if (s == "band_edge_low") return TargetKind::band_edge_low;
    if (s == "band_edge_high") return TargetKind::band_edge_high;
    if (s == "fixed_k") return TargetKind::fixed_k;
    throw IoError("bad target_kind: " + s);
}

inline Selector parse_selector(const std::string& s) {
    if (s == "nearest_k") return Selector::nearest_k;
    if (s == "nearest_omega") return Selector::nearest_omega;
    if (s == "sorted_index") return Selector::sorted_index;
    if (s == "min_gamma") return Selector::min_gamma;
    throw IoError("bad selector: " + s);
}

}  // namespace detail

inline std::string ensemble_csv(const std::vector<EnsembleStats>& stats,
                                const std::vector<ModeTarget>& /*targets*/ = {}) {
    CsvWriter w(kEnsembleHeader);
    for (const auto& st : stats) {
        w.append_row({std::to_string(st.n_qubits), format_double(st.disorder_w),
                      to_string(st.target.kind), format_double(st.target.k),
                      to_string(st.target.selector), std::to_string(st.n_realizations),
                      format_double(st.gamma_typ), format_double(st.gamma_avg),
                      format_double(st.ln_gamma_std), format_u64(st.master_seed)});
    }
    return w.str();
}

inline Json ensemble_json(const std::vector<EnsembleStats>& stats) {
    Json rows = Json::array();
    for (const auto& st : stats) {
        Json r;
        r["n_qubits"] = st.n_qubits;
        r["disorder_w"] = st.disorder_w;
        r["target_kind"] = to_string(st.target.kind);
        r["target_k"] = st.target.k;
        r["selector"] = to_string(st.target.selector);
        r["n_real"] = st.n_realizations;
        r["gamma_typ"] = st.gamma_typ;
        r["gamma_avg"] = st.gamma_avg;
        r["ln_gamma_std"] = st.ln_gamma_std;
        r["master_seed"] = st.master_seed;
        r["index_lo"] = st.index_lo;
        r["index_hi"] = st.index_hi;
        r["n_failed"] = st.n_failed;
        r["aborted"] = st.aborted;
        rows.push_back(std::move(r));
    }
    return rows;
}

inline std::vector<EnsembleRow> load_ensemble_csv(const std::filesystem::path& path) {
    const CsvTable t = CsvTable::load(path);
    std::vector<EnsembleRow> rows;
    const int cn = t.column("n_qubits"), cw = t.column("disorder_w"),
              ck = t.column("target_kind"), ckk = t.column("target_k"),
              cs = t.column("selector"), cr = t.column("n_real"), cgt = t.column("gamma_typ"),
              cga = t.column("gamma_avg"), cls = t.column("ln_gamma_std"),
              cms = t.column("master_seed");
    for (const auto& r : t.rows()) {
        EnsembleRow row;
        row.n_qubits = static_cast<int>(detail::parse_long(r[cn], "n_qubits"));
        row.disorder_w = detail::parse_double(r[cw], "disorder_w");
        row.kind = detail::parse_kind(r[ck]);
        row.target_k = detail::parse_double(r[ckk], "target_k");
        row.selector = detail::parse_selector(r[cs]);
        row.n_real = static_cast<int>(detail::parse_long(r[cr], "n_real"));
        row.gamma_typ = detail::parse_double(r[cgt], "gamma_typ");
        row.gamma_avg = detail::parse_double(r[cga], "gamma_avg");
        row.ln_gamma_std = detail::parse_double(r[cls], "ln_gamma_std");
        row.master_seed = detail::parse_u64(r[cms], "master_seed");
        rows.push_back(row);
    }
    return rows;
}

inline std::string modes_csv(const EnsembleResult& result, const std::vector<ChainSpec>& specs,
                             const std::vector<ModeTarget>& targets) {
    CsvWriter w(kModesHeader);
    const std::size_t n_targets = targets.size();
    for (std::size_t cell = 0; cell < result.summaries.size(); ++cell) {
        const auto& list = result.summaries[cell];
        if (list.empty()) continue;
        const auto& spec = specs[cell / n_targets];
        const int target_index = static_cast<int>(cell % n_targets);
        for (const auto& ms : list) {
            w.append_row({std::to_string(spec.n_qubits), format_double(spec.disorder_w),
                          std::to_string(target_index), std::to_string(ms.realization_index),
                          format_double(ms.gamma), format_double(ms.omega_re),
                          format_double(ms.k_est / std::numbers::pi), to_string(ms.mode_class),
                          format_double(ms.p_left), format_double(ms.p_right),
                          format_double(ms.xi_phi), format_double(ms.x0)});
        }
    }
    return w.str();
}

inline std::vector<ModeRow> load_modes_csv(const std::filesystem::path& path) {
    const CsvTable t = CsvTable::load(path);
    std::vector<ModeRow> rows;
    const int cn = t.column("n_qubits"), cw = t.column("disorder_w"),
              ct = t.column("target_index"), cri = t.column("realization_index"),
              cg = t.column("gamma"), co = t.column("omega_re"), ck = t.column("k_est_over_pi"),
              cc = t.column("class"), cpl = t.column("p_left"), cpr = t.column("p_right"),
              cxp = t.column("xi_phi"), cx0 = t.column("x0");
    rows.reserve(t.rows().size());
    for (const auto& r : t.rows()) {
        ModeRow row;
        row.n_qubits = static_cast<int>(detail::parse_long(r[cn], "n_qubits"));
        row.disorder_w = detail::parse_double(r[cw], "disorder_w");
        row.target_index = static_cast<int>(detail::parse_long(r[ct], "target_index"));
        row.realization_index = detail::parse_long(r[cri], "realization_index");
        row.gamma = detail::parse_double(r[cg], "gamma");
        row.omega_re = detail::parse_double(r[co], "omega_re");
        row.k_est_over_pi = detail::parse_double(r[ck], "k_est_over_pi");
        row.mode_class = r[cc];
        row.p_left = detail::parse_double(r[cpl], "p_left");
        row.p_right = detail::parse_double(r[cpr], "p_right");
        row.xi_phi = detail::parse_double(r[cxp], "xi_phi");
        row.x0 = detail::parse_double(r[cx0], "x0");
        rows.push_back(row);
    }
    return rows;
}

// Dense complex matrix as CSV (row, col, re, im); exact round trip.
inline std::string matrix_csv(const Eigen::MatrixXcd& m) {
    CsvWriter w({"row", "col", "re", "im"});
    for (int j = 0; j < m.cols(); ++j)
        for (int i = 0; i < m.rows(); ++i)
            w.append_row({std::to_string(i), std::to_string(j), format_double(m(i, j).real()),
                          format_double(m(i, j).imag())});
    return w.str();
}

inline Eigen::MatrixXcd load_matrix_csv(const std::string& text) {
    const CsvTable t = CsvTable::parse(text);
    const int ci = t.column("row"), cj = t.column("col"), cre = t.column("re"),
              cim = t.column("im");
    int n = 0;
    for (const auto& r : t.rows())
        n = std::max(n, static_cast<int>(detail::parse_long(r[ci], "row")) + 1);
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
    for (const auto& r : t.rows())
        m(detail::parse_long(r[ci], "row"), detail::parse_long(r[cj], "col")) =
            Complex(detail::parse_double(r[cre], "re"), detail::parse_double(r[cim], "im"));
    return m;
}

}  // namespace subrad
