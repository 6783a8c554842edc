// analyze.hpp — the analysis pipeline over saved ensemble outputs: scaling
// fits, the xi table with crossover sizes, data collapses for xi and the
// localization length, effective-potential statistics, the xi = 2 xi_phi
// equivalence, and the per-figure plot data files.

#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "subrad/config.hpp"
#include "subrad/formats.hpp"
#include "subrad/fss.hpp"
#include "subrad/localization.hpp"
#include "subrad/scaling.hpp"

namespace subrad {

struct XiRow {
    int n_max = 0;
    double w = 0.0;
    double xi = 0.0;
    double xi_drop_min = 0.0;  // n_min sensitivity: smallest grid point removed
};

struct XiPhiRow {
    int n = 0;
    double w = 0.0;
    double xi_phi_typ = 0.0;
    double xi_phi_mean = 0.0;
    int n_modes = 0;
};

struct FitRow {
    double w = 0.0;
    bool ok_power = false;
    bool ok_exponential = false;
    PowerLawFit power;
    ExponentialFit exponential;
};

struct PotentialProfile {
    int n = 0;
    double w = 0.0;
    LocalizationStats stats;
};

struct PredictRow {
    double w = 0.0;
    int n_lo = 0;
    int n_hi = 0;
    double predicted_slope = 0.0;  // d/dN of the boundary-radiation exponent
    double measured_slope = 0.0;   // d/dN of ln Gamma^typ
};

struct TargetAnalysis {
    int target_index = 0;
    ModeTarget target;
    std::map<double, ScalingSeries> typ_series;  // by disorder W
    std::map<double, ScalingSeries> avg_series;
    std::vector<FitRow> fits;
    std::vector<XiRow> xi_rows;
    std::vector<std::pair<double, std::optional<int>>> nc_by_w;
    std::optional<CollapseResult> xi_collapse;
    // localization block (summary targets only)
    std::vector<XiPhiRow> xi_phi_rows;
    std::optional<CollapseResult> xi_phi_collapse;
    std::vector<PotentialProfile> potentials;  // at the configured disorder, by N
    std::optional<double> alpha;               // sigma(N) ~ N^alpha
    std::vector<PredictRow> predict_rows;
    std::optional<EquivalenceReport> equivalence;
};

struct AnalyzeResult {
    std::vector<TargetAnalysis> targets;
};

namespace detail {

inline ScalingSeries window(const ScalingSeries& s, int lo, int hi) {
    ScalingSeries out;
    for (std::size_t i = 0; i < s.size(); ++i)
        if (s.n[i] >= lo && s.n[i] <= hi) {
            out.n.push_back(s.n[i]);
            out.value.push_back(s.value[i]);
        }
    return out;
}

// Restrict both series to their shared size grid.
inline std::pair<ScalingSeries, ScalingSeries> intersect_grids(const ScalingSeries& a,
                                                               const ScalingSeries& b) {
    ScalingSeries oa, ob;
    std::size_t j = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        while (j < b.size() && b.n[j] < a.n[i]) ++j;
        if (j < b.size() && b.n[j] == a.n[i]) {
            oa.n.push_back(a.n[i]);
            oa.value.push_back(a.value[i]);
            ob.n.push_back(b.n[j]);
            ob.value.push_back(b.value[j]);
        }
    }
    return {oa, ob};
}

}  // namespace detail

inline AnalyzeResult analyze(const RunConfig& config, const std::vector<EnsembleRow>& rows,
                             const std::vector<ModeRow>& mode_rows) {
    AnalyzeResult result;
    const int n_targets = static_cast<int>(config.targets.size());

    // rows are keyed to config targets by (kind, k, selector)
    std::vector<int> row_target(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        row_target[i] = rows[i].match_target(config.targets);

    for (int t = 0; t < n_targets; ++t) {
        TargetAnalysis ta;
        ta.target_index = t;
        ta.target = config.targets[static_cast<std::size_t>(t)];

        // --- series ---------------------------------------------------
        std::map<double, std::vector<std::pair<int, std::pair<double, double>>>> cells;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const auto& r = rows[i];
            if (row_target[i] == t && r.n_real > 0)
                cells[r.disorder_w].push_back({r.n_qubits, {r.gamma_typ, r.gamma_avg}});
        }
        for (auto& [w, list] : cells) {
            std::sort(list.begin(), list.end());
            ScalingSeries typ, avg;
            for (const auto& [n, ga] : list) {
                if (!(ga.first > 0.0)) continue;
                typ.n.push_back(n);
                typ.value.push_back(ga.first);
                if (ga.second > 0.0) {
                    avg.n.push_back(n);
                    avg.value.push_back(ga.second);
                }
            }
            if (!typ.n.empty()) ta.typ_series[w] = std::move(typ);
            if (!avg.n.empty()) ta.avg_series[w] = std::move(avg);
        }

        // --- fits over the configured window ---------------------------
        if (config.analysis_scaling) {
            for (const auto& [w, series] : ta.typ_series) {
                FitRow fr;
                fr.w = w;
                const ScalingSeries win =
                    detail::window(series, config.fit_window[0], config.fit_window[1]);
                if (win.size() >= 3) {
                    try {
                        fr.power = fit_power_law(win);
                        fr.ok_power = true;
                    } catch (const std::exception&) {
                    }
                    try {
                        fr.exponential = fit_exponential(win);
                        fr.ok_exponential = true;
                    } catch (const std::exception&) {
                    }
                }
                ta.fits.push_back(fr);
            }
        }

        // --- xi table ---------------------------------------------------
        for (const auto& [w, series] : ta.typ_series) {
            for (std::size_t i = 0; i < series.size(); ++i) {
                const int n_max = series.n[i];
                ScalingSeries head;
                head.n.assign(series.n.begin(), series.n.begin() + static_cast<long>(i) + 1);
                head.value.assign(series.value.begin(),
                                  series.value.begin() + static_cast<long>(i) + 1);
                if (head.size() < 3) continue;
                XiRow xr;
                xr.n_max = n_max;
                xr.w = w;
                try {
                    xr.xi = xi_from_moments(head);
                } catch (const std::exception&) {
                    continue;
                }
                ScalingSeries tail = head;
                tail.n.erase(tail.n.begin());
                tail.value.erase(tail.value.begin());
                try {
                    xr.xi_drop_min = tail.size() >= 2 ? xi_from_moments(tail) : 0.0;
                } catch (const std::exception&) {
                    xr.xi_drop_min = 0.0;
                }
                ta.xi_rows.push_back(xr);
            }
        }

        // --- crossover sizes ---------------------------------------------
        const auto it0 = ta.typ_series.find(0.0);
        if (it0 != ta.typ_series.end()) {
            for (const auto& [w, series] : ta.typ_series) {
                if (!(w > 0.0)) continue;
                auto [dis, ref] = detail::intersect_grids(series, it0->second);
                const ScalingSeries win =
                    detail::window(dis, config.fit_window[0], config.fit_window[1]);
                std::optional<int> nc;
                if (win.size() >= 3 && dis.size() >= 2) {
                    try {
                        const ExponentialFit ef = fit_exponential(win);
                        nc = detect_crossover_nc(dis, ref, ef);
                    } catch (const std::exception&) {
                    }
                }
                ta.nc_by_w.emplace_back(w, nc);
            }
        }

        // --- xi collapse --------------------------------------------------
        if (config.analysis_fss) {
            std::vector<CollapsePoint> pts;
            for (const auto& xr : ta.xi_rows)
                if (xr.w > 0.0 && xr.n_max >= config.collapse_min_size && xr.xi > 0.0)
                    pts.push_back({static_cast<double>(xr.n_max), xr.w, xr.n_max / xr.xi});
            try {
                ta.xi_collapse = collapse(pts, config.collapse);
            } catch (const std::exception&) {
                ta.xi_collapse.reset();
            }
        }

        // --- localization --------------------------------------------------
        std::map<std::pair<double, int>, std::vector<const ModeRow*>> by_cell;
        for (const auto& mr : mode_rows)
            if (mr.target_index == t) by_cell[{mr.disorder_w, mr.n_qubits}].push_back(&mr);

        if (config.analysis_localization && !by_cell.empty()) {
            for (const auto& [key, list] : by_cell) {
                const auto& [w, n] = key;
                XiPhiRow xr;
                xr.w = w;
                xr.n = n;
                xr.n_modes = static_cast<int>(list.size());
                double acc_ln = 0.0, acc = 0.0;
                for (const ModeRow* m : list) {
                    acc_ln += std::log(m->xi_phi);
                    acc += m->xi_phi;
                }
                xr.xi_phi_typ = std::exp(acc_ln / static_cast<double>(list.size()));
                xr.xi_phi_mean = acc / static_cast<double>(list.size());
                ta.xi_phi_rows.push_back(xr);
            }

            if (config.analysis_fss) {
                std::vector<CollapsePoint> pts;
                for (const auto& xr : ta.xi_phi_rows)
                    if (xr.w > 0.0 && xr.n >= config.collapse_min_size && xr.xi_phi_typ > 0.0)
                        pts.push_back(
                            {static_cast<double>(xr.n), xr.w, xr.n / xr.xi_phi_typ});
                try {
                    ta.xi_phi_collapse = collapse(pts, config.collapse);
                } catch (const std::exception&) {
                    ta.xi_phi_collapse.reset();
                }
            }

            // effective potential at the configured disorder
            std::vector<std::pair<int, double>> sigmas;
            for (const auto& [key, list] : by_cell) {
                const auto& [w, n] = key;
                if (w != config.potential_disorder || n < config.potential_min_size) continue;
                std::vector<double> centers;
                centers.reserve(list.size());
                for (const ModeRow* m : list) centers.push_back(m->x0);
                try {
                    PotentialProfile pp;
                    pp.n = n;
                    pp.w = w;
                    pp.stats = center_statistics(centers, n);
                    if (pp.stats.harmonic_sigma > 0.0) sigmas.emplace_back(n, pp.stats.harmonic_sigma);
                    ta.potentials.push_back(std::move(pp));
                } catch (const std::exception&) {
                }
            }
            std::sort(ta.potentials.begin(), ta.potentials.end(),
                      [](const PotentialProfile& a, const PotentialProfile& b) { return a.n < b.n; });
            std::sort(sigmas.begin(), sigmas.end());
            // the width exponent describes the harmonic well of weak
            // subradiant families only
            const bool weak_target = ta.target.kind == TargetKind::fixed_k &&
                                     !ta.target.in_superradiant_window(config.phi);
            if (weak_target && sigmas.size() >= 3) {
                try {
                    ta.alpha = sigma_scaling(sigmas);
                } catch (const std::exception&) {
                }
            }

            // boundary-radiation prediction vs measured slope, on the
            // equivalence disorders (saturated regime)
            for (double w : config.equivalence_disorders) {
                const auto its = ta.typ_series.find(w);
                if (its == ta.typ_series.end()) continue;
                std::vector<int> ns;
                for (const auto& [key, list] : by_cell)
                    if (key.first == w && list.size() >= 100) ns.push_back(key.second);
                std::sort(ns.begin(), ns.end());
                if (ns.size() < 2) continue;
                const int n_lo = ns[ns.size() - 2], n_hi = ns[ns.size() - 1];
                auto exponent_at = [&](int n) -> std::optional<double> {
                    const auto& list = by_cell[{w, n}];
                    std::vector<double> centers;
                    for (const ModeRow* m : list) centers.push_back(m->x0);
                    double acc_ln = 0.0;
                    for (const ModeRow* m : list) acc_ln += std::log(m->xi_phi);
                    const double xi_phi = std::exp(acc_ln / static_cast<double>(list.size()));
                    try {
                        const LocalizationStats ls = center_statistics(centers, n);
                        return predict_typ_rate(ls.bin_centers, ls.bin_density, ls.bin_width,
                                                xi_phi, n);
                    } catch (const std::exception&) {
                        return std::nullopt;
                    }
                };
                const auto e_lo = exponent_at(n_lo), e_hi = exponent_at(n_hi);
                auto value_at = [&](int n) -> std::optional<double> {
                    for (std::size_t i = 0; i < its->second.size(); ++i)
                        if (its->second.n[i] == n) return its->second.value[i];
                    return std::nullopt;
                };
                const auto g_lo = value_at(n_lo), g_hi = value_at(n_hi);
                if (e_lo && e_hi && g_lo && g_hi) {
                    PredictRow pr;
                    pr.w = w;
                    pr.n_lo = n_lo;
                    pr.n_hi = n_hi;
                    pr.predicted_slope = (*e_hi - *e_lo) / static_cast<double>(n_hi - n_lo);
                    pr.measured_slope =
                        (std::log(*g_hi) - std::log(*g_lo)) / static_cast<double>(n_hi - n_lo);
                    ta.predict_rows.push_back(pr);
                }
            }

            // xi = 2 xi_phi equivalence on saturated cells
            std::vector<std::tuple<int, double, double>> xi_cells, xi_phi_cells;
            for (const auto& xr : ta.xi_rows) xi_cells.emplace_back(xr.n_max, xr.w, xr.xi);
            for (const auto& xr : ta.xi_phi_rows)
                xi_phi_cells.emplace_back(xr.n, xr.w, xr.xi_phi_typ);
            std::vector<std::pair<double, std::optional<int>>> nc_filtered;
            for (const auto& [w, nc] : ta.nc_by_w)
                for (double we : config.equivalence_disorders)
                    if (w == we) nc_filtered.emplace_back(w, nc);
            try {
                ta.equivalence = equivalence_check(xi_cells, xi_phi_cells, nc_filtered);
            } catch (const std::exception&) {
                ta.equivalence.reset();
            }
        }

        result.targets.push_back(std::move(ta));
    }
    return result;
}

// ---------------------------------------------------------------- file I/O

namespace detail {

inline std::string target_file_tag(int index, const ModeTarget& t) {
    return "t" + std::to_string(index) + "_" + t.label();
}

}  // namespace detail

// Writes fits.csv, xi_table.csv, nc_table.csv, per-target collapse and
// localization products, and the per-figure plot files fig2a..fig4d.
inline void write_analysis_files(const RunConfig& config, const AnalyzeResult& analysis,
                                 const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);

    auto finish = [&](const fs::path& p, const std::string& content) {
        write_file(p, content);
        write_sidecar(p, config);
    };

    // fits.csv
    {
        CsvWriter w({"target_index", "target", "disorder_w", "window_lo", "window_hi",
                     "power_exponent", "power_prefactor", "power_r2", "power_sse", "exp_xi_inf",
                     "exp_prefactor", "exp_r2", "exp_sse"});
        for (const auto& ta : analysis.targets) {
            for (const auto& fr : ta.fits) {
                w.append_row({std::to_string(ta.target_index), ta.target.label(),
                              format_double(fr.w), std::to_string(config.fit_window[0]),
                              std::to_string(config.fit_window[1]),
                              fr.ok_power ? format_double(fr.power.exponent()) : "",
                              fr.ok_power ? format_double(fr.power.prefactor) : "",
                              fr.ok_power ? format_double(fr.power.r_squared) : "",
                              fr.ok_power ? format_double(fr.power.sse) : "",
                              fr.ok_exponential ? format_double(fr.exponential.xi_inf) : "",
                              fr.ok_exponential ? format_double(fr.exponential.prefactor) : "",
                              fr.ok_exponential ? format_double(fr.exponential.r_squared) : "",
                              fr.ok_exponential ? format_double(fr.exponential.sse) : ""});
            }
        }
        finish(dir / "fits.csv", w.str());
    }

    // xi_table.csv
    {
        CsvWriter w({"target_index", "target", "n_max", "disorder_w", "xi", "xi_drop_min"});
        for (const auto& ta : analysis.targets)
            for (const auto& xr : ta.xi_rows)
                w.append_row({std::to_string(ta.target_index), ta.target.label(),
                              std::to_string(xr.n_max), format_double(xr.w), format_double(xr.xi),
                              xr.xi_drop_min > 0.0 ? format_double(xr.xi_drop_min) : ""});
        finish(dir / "xi_table.csv", w.str());
    }

    // nc_table.csv
    {
        CsvWriter w({"target_index", "target", "disorder_w", "n_c"});
        for (const auto& ta : analysis.targets)
            for (const auto& [wv, nc] : ta.nc_by_w)
                w.append_row({std::to_string(ta.target_index), ta.target.label(),
                              format_double(wv), nc ? std::to_string(*nc) : ""});
        finish(dir / "nc_table.csv", w.str());
    }

    auto collapse_json = [&](const CollapseResult& c) {
        Json j;
        j["w_c"] = c.w_c;
        j["nu"] = c.nu;
        j["cost"] = c.cost;
        j["w_c_err"] = c.w_c_err;
        j["nu_err"] = c.nu_err;
        j["boundary_hit"] = c.boundary_hit;
        j["no_collapse"] = c.no_collapse;
        j["meta"] = sidecar_json(config);
        return j;
    };
    auto master_csv = [&](const CollapseResult& c) {
        CsvWriter w({"x", "y"});
        for (const auto& [x, y] : c.master_curve)
            w.append_row({format_double(x), format_double(y)});
        return w.str();
    };

    for (const auto& ta : analysis.targets) {
        const std::string tag = detail::target_file_tag(ta.target_index, ta.target);
        if (ta.xi_collapse) {
            write_file(dir / ("collapse_" + tag + ".json"),
                       collapse_json(*ta.xi_collapse).dump(2) + "\n");
            finish(dir / ("master_curve_" + tag + ".csv"), master_csv(*ta.xi_collapse));
        }
        if (ta.xi_phi_collapse) {
            write_file(dir / ("collapse_xiphi_" + tag + ".json"),
                       collapse_json(*ta.xi_phi_collapse).dump(2) + "\n");
            finish(dir / ("master_curve_xiphi_" + tag + ".csv"), master_csv(*ta.xi_phi_collapse));
        }
        if (!ta.xi_phi_rows.empty()) {
            CsvWriter w({"disorder_w", "n_qubits", "xi_phi_typ", "xi_phi_mean", "n_modes"});
            auto rows = ta.xi_phi_rows;
            std::sort(rows.begin(), rows.end(), [](const XiPhiRow& a, const XiPhiRow& b) {
                return a.w != b.w ? a.w < b.w : a.n < b.n;
            });
            for (const auto& xr : rows)
                w.append_row({format_double(xr.w), std::to_string(xr.n),
                              format_double(xr.xi_phi_typ), format_double(xr.xi_phi_mean),
                              std::to_string(xr.n_modes)});
            finish(dir / ("xiphi_table_" + tag + ".csv"), w.str());
        }
        if (!ta.potentials.empty()) {
            CsvWriter w({"n_qubits", "disorder_w", "x0", "density", "potential"});
            for (const auto& pp : ta.potentials)
                for (std::size_t b = 0; b < pp.stats.bin_centers.size(); ++b)
                    w.append_row({std::to_string(pp.n), format_double(pp.w),
                                  format_double(pp.stats.bin_centers[b]),
                                  format_double(pp.stats.bin_density[b]),
                                  format_double(pp.stats.potential[b])});
            finish(dir / ("potential_" + tag + ".csv"), w.str());
        }
        if (!ta.xi_phi_rows.empty()) {
            Json j;
            j["target_index"] = ta.target_index;
            j["target"] = ta.target.label();
            j["alpha"] = ta.alpha ? Json(*ta.alpha) : Json();
            Json pots = Json::array();
            for (const auto& pp : ta.potentials) {
                Json p;
                p["n_qubits"] = pp.n;
                p["disorder_w"] = pp.w;
                p["n_modes"] = pp.stats.n_modes;
                p["fit"] = pp.stats.fit == PotentialFit::harmonic ? "harmonic" : "constant";
                p["constant_level"] = pp.stats.constant_level;
                p["harmonic_center"] = pp.stats.harmonic_center;
                p["harmonic_sigma"] = pp.stats.harmonic_sigma;
                p["sse_constant"] = pp.stats.sse_constant;
                p["sse_harmonic"] = pp.stats.sse_harmonic;
                p["low_statistics"] = pp.stats.low_statistics;
                pots.push_back(std::move(p));
            }
            j["potentials"] = std::move(pots);
            Json preds = Json::array();
            for (const auto& pr : ta.predict_rows) {
                Json p;
                p["disorder_w"] = pr.w;
                p["n_lo"] = pr.n_lo;
                p["n_hi"] = pr.n_hi;
                p["predicted_slope"] = pr.predicted_slope;
                p["measured_slope"] = pr.measured_slope;
                preds.push_back(std::move(p));
            }
            j["boundary_prediction"] = std::move(preds);
            if (ta.equivalence) {
                Json e;
                e["ratio_mean"] = ta.equivalence->ratio_mean;
                e["ratio_min"] = ta.equivalence->ratio_min;
                e["ratio_max"] = ta.equivalence->ratio_max;
                Json cells = Json::array();
                for (const auto& row : ta.equivalence->rows) {
                    Json c;
                    c["n_qubits"] = row.n;
                    c["disorder_w"] = row.w;
                    c["xi"] = row.xi;
                    c["xi_phi"] = row.xi_phi;
                    c["ratio"] = row.ratio;
                    cells.push_back(std::move(c));
                }
                e["cells"] = std::move(cells);
                j["equivalence"] = std::move(e);
            }
            j["meta"] = sidecar_json(config);
            write_file(dir / ("localization_" + tag + ".json"), j.dump(2) + "\n");
        }
    }

    // ------------------------------------------------------- figure files
    auto find_target = [&](auto pred) -> const TargetAnalysis* {
        for (const auto& ta : analysis.targets)
            if (pred(ta.target)) return &ta;
        return nullptr;
    };
    const TargetAnalysis* strong = find_target(
        [](const ModeTarget& t) { return t.kind == TargetKind::band_edge_low; });
    const TargetAnalysis* weak = find_target([](const ModeTarget& t) {
        return t.kind == TargetKind::fixed_k && std::abs(t.k / std::numbers::pi - 0.75) < 1e-9;
    });

    auto series_file = [&](const TargetAnalysis& ta, const std::vector<double>& ws,
                           const fs::path& p) {
        CsvWriter w({"n_qubits", "disorder_w", "gamma_typ", "gamma_avg"});
        for (double wv : ws) {
            const auto it = ta.typ_series.find(wv);
            if (it == ta.typ_series.end()) continue;
            const auto ia = ta.avg_series.find(wv);
            for (std::size_t i = 0; i < it->second.size(); ++i) {
                std::string avg;
                if (ia != ta.avg_series.end())
                    for (std::size_t j = 0; j < ia->second.size(); ++j)
                        if (ia->second.n[j] == it->second.n[i])
                            avg = format_double(ia->second.value[j]);
                w.append_row({std::to_string(it->second.n[i]), format_double(wv),
                              format_double(it->second.value[i]), avg});
            }
        }
        finish(p, w.str());
    };

    if (weak) series_file(*weak, {0.0, 0.4}, dir / "fig2a.csv");
    if (strong) series_file(*strong, {0.0, 0.4}, dir / "fig2b.csv");
    if (strong) {
        series_file(*strong, {0.0, 0.06}, dir / "fig2c.csv");
        CsvWriter w({"disorder_w", "n_c"});
        for (const auto& [wv, nc] : strong->nc_by_w)
            w.append_row({format_double(wv), nc ? std::to_string(*nc) : ""});
        finish(dir / "fig2c_inset.csv", w.str());
    }
    if (strong) {
        CsvWriter w({"n_max", "disorder_w", "xi"});
        for (const auto& xr : strong->xi_rows)
            w.append_row({std::to_string(xr.n_max), format_double(xr.w), format_double(xr.xi)});
        finish(dir / "fig2d.csv", w.str());
        finish(dir / "fig2e.csv", w.str());
    }

    auto collapse_fig = [&](const TargetAnalysis& ta, const fs::path& p, const fs::path& inset) {
        if (!ta.xi_collapse) return;
        finish(p, master_csv(*ta.xi_collapse));
        CsvWriter w({"w_minus_wc", "xi", "n_max"});
        for (const auto& xr : ta.xi_rows)
            if (xr.w > ta.xi_collapse->w_c)
                w.append_row({format_double(xr.w - ta.xi_collapse->w_c), format_double(xr.xi),
                              std::to_string(xr.n_max)});
        finish(inset, w.str());
    };
    if (strong) collapse_fig(*strong, dir / "fig3a.csv", dir / "fig3a_inset.csv");
    if (weak) collapse_fig(*weak, dir / "fig3b.csv", dir / "fig3b_inset.csv");

    {
        CsvWriter wc({"k_over_pi", "target", "w_c", "w_c_err"});
        CsvWriter wn({"k_over_pi", "target", "nu", "nu_err"});
        CsvWriter we({"k_over_pi", "target", "cost"});
        for (const auto& ta : analysis.targets) {
            if (!ta.xi_collapse) continue;
            const double kop = ta.target.k / std::numbers::pi;
            wc.append_row({format_double(kop), ta.target.label(),
                           format_double(ta.xi_collapse->w_c),
                           format_double(ta.xi_collapse->w_c_err)});
            wn.append_row({format_double(kop), ta.target.label(), format_double(ta.xi_collapse->nu),
                           format_double(ta.xi_collapse->nu_err)});
            we.append_row(
                {format_double(kop), ta.target.label(), format_double(ta.xi_collapse->cost)});
        }
        finish(dir / "fig3c.csv", wc.str());
        finish(dir / "fig3d.csv", wn.str());
        finish(dir / "fig3e.csv", we.str());
    }

    auto potential_fig = [&](const TargetAnalysis& ta, const fs::path& p) {
        if (ta.potentials.empty()) return;
        const auto& pp = ta.potentials.back();  // largest N
        CsvWriter w({"x0", "density", "potential", "fit", "fit_value"});
        const bool harmonic = pp.stats.fit == PotentialFit::harmonic;
        for (std::size_t b = 0; b < pp.stats.bin_centers.size(); ++b) {
            const double x = pp.stats.bin_centers[b];
            const double fit_value =
                harmonic ? pp.stats.harmonic_offset +
                               std::pow((x - pp.stats.harmonic_center) / pp.stats.harmonic_sigma, 2)
                         : pp.stats.constant_level;
            w.append_row({format_double(x), format_double(pp.stats.bin_density[b]),
                          format_double(pp.stats.potential[b]),
                          harmonic ? "harmonic" : "constant", format_double(fit_value)});
        }
        finish(p, w.str());
    };
    if (strong) potential_fig(*strong, dir / "fig4b.csv");
    if (weak) potential_fig(*weak, dir / "fig4c.csv");

    // fig4d: xi and xi_phi master curves on one plot after the multiplicative
    // rescaling of each xi_phi curve onto its xi counterpart.
    {
        CsvWriter w({"series", "x", "y"});
        auto emit = [&](const char* name, const std::vector<std::pair<double, double>>& curve,
                        double sx, double sy) {
            for (const auto& [x, y] : curve)
                w.append_row({name, format_double(x * sx), format_double(y * sy)});
        };
        for (const TargetAnalysis* ta : {strong, weak}) {
            if (!ta || !ta->xi_collapse) continue;
            const std::string base = ta->target.label();
            emit(("xi_" + base).c_str(), ta->xi_collapse->master_curve, 1.0, 1.0);
            if (ta->xi_phi_collapse) {
                try {
                    const CompareReport cr = compare_collapse(ta->xi_collapse->master_curve,
                                                              ta->xi_phi_collapse->master_curve);
                    emit(("xiphi_" + base).c_str(), ta->xi_phi_collapse->master_curve, cr.scale_x,
                         cr.scale_y);
                } catch (const std::exception&) {
                }
            }
        }
        finish(dir / "fig4d.csv", w.str());
    }
}

}  // namespace subrad
