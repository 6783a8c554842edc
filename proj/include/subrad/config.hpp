// config.hpp — declarative run configuration: one JSON document validated
// against a strict schema (unknown keys rejected, typed leaves), with dotted
// path overrides and a canonical hash embedded in every output file.

#pragma once

#include <array>
#include <cstdint>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "subrad/fss.hpp"
#include "subrad/io.hpp"
#include "subrad/spectrum.hpp"
#include "subrad/version.hpp"

namespace subrad {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    // model
    double phi = 0.5 * std::numbers::pi;
    double gamma = 1.0;
    // grids
    std::vector<int> sizes;
    std::vector<double> disorders;
    // targets
    std::vector<ModeTarget> targets;
    // ensemble
    int n_realizations = 1000;
    std::uint64_t master_seed = 20260808;
    int workers = 0;
    // analysis
    bool analysis_scaling = true;
    bool analysis_fss = true;
    bool analysis_localization = true;
    std::vector<int> summary_targets;  // targets with per-realization summaries
    std::array<int, 2> fit_window{100, 400};
    int collapse_min_size = 100;
    double potential_disorder = 0.2;  // W used for the effective-potential profiles
    int potential_min_size = 100;     // smallest N entering sigma(N) fits
    std::vector<double> equivalence_disorders{0.2, 0.3, 0.4, 0.6};
    CollapseOptions collapse;
    // output
    std::string out_dir = "out";
    bool mode_summaries = true;

    Json resolved;  // canonical document (defaults filled in)

    std::string hash() const { return fnv1a_hex(resolved.dump()); }
};

namespace detail {

[[noreturn]] inline void config_fail(const std::string& path, const std::string& what) {
    throw ConfigError("config error at " + path + ": " + what);
}

inline void expect_keys(const Json& obj, const std::string& path,
                        const std::vector<std::string>& allowed) {
    if (!obj.is_object()) config_fail(path, "expected an object");
    for (const auto& [key, value] : obj.items()) {
        bool ok = false;
        for (const auto& a : allowed)
            if (a == key) ok = true;
        if (!ok) config_fail(path + "/" + key, "unknown key");
    }
}

inline double take_number(const Json& obj, const std::string& path, const char* key,
                          double fallback) {
    if (!obj.contains(key)) return fallback;
    const Json& v = obj.at(key);
    if (!v.is_number()) config_fail(path + "/" + key, "expected a number");
    return v.get<double>();
}

inline long take_integer(const Json& obj, const std::string& path, const char* key,
                         long fallback) {
    if (!obj.contains(key)) return fallback;
    const Json& v = obj.at(key);
    if (!v.is_number_integer()) config_fail(path + "/" + key, "expected an integer");
    return v.get<long>();
}

inline bool take_bool(const Json& obj, const std::string& path, const char* key, bool fallback) {
    if (!obj.contains(key)) return fallback;
    const Json& v = obj.at(key);
    if (!v.is_boolean()) config_fail(path + "/" + key, "expected a boolean");
    return v.get<bool>();
}

inline std::string take_string(const Json& obj, const std::string& path, const char* key,
                               const std::string& fallback) {
    if (!obj.contains(key)) return fallback;
    const Json& v = obj.at(key);
    if (!v.is_string()) config_fail(path + "/" + key, "expected a string");
    return v.get<std::string>();
}

template <typename T>
inline std::vector<T> take_array(const Json& obj, const std::string& path, const char* key,
                                 const std::vector<T>& fallback) {
    if (!obj.contains(key)) return fallback;
    const Json& v = obj.at(key);
    if (!v.is_array()) config_fail(path + "/" + key, "expected an array");
    std::vector<T> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const Json& e = v.at(i);
        if constexpr (std::is_integral_v<T>) {
            if (!e.is_number_integer())
                config_fail(path + "/" + key + "/" + std::to_string(i), "expected an integer");
        } else {
            if (!e.is_number())
                config_fail(path + "/" + key + "/" + std::to_string(i), "expected a number");
        }
        out.push_back(e.get<T>());
    }
    return out;
}

inline ModeTarget parse_target(const Json& j, const std::string& path) {
    expect_keys(j, path, {"kind", "selector", "k_over_pi"});
    const std::string kind = take_string(j, path, "kind", "");
    ModeTarget t;
    if (kind == "band_edge_low")
        t.kind = TargetKind::band_edge_low;
    else if (kind == "band_edge_high")
        t.kind = TargetKind::band_edge_high;
    else if (kind == "fixed_k")
        t.kind = TargetKind::fixed_k;
    else
        config_fail(path + "/kind",
                    "expected one of band_edge_low, band_edge_high, fixed_k");
    if (t.kind == TargetKind::fixed_k) {
        if (!j.contains("k_over_pi")) config_fail(path + "/k_over_pi", "required for fixed_k");
        const double kop = take_number(j, path, "k_over_pi", 0.0);
        if (!(kop > 0.0 && kop < 1.0))
            config_fail(path + "/k_over_pi", "must lie in (0, 1)");
        t.k = kop * std::numbers::pi;
        t.selector = Selector::nearest_omega;
    } else {
        t.k = t.kind == TargetKind::band_edge_low ? 0.0 : std::numbers::pi;
        t.selector = Selector::nearest_k;
    }
    const std::string sel = take_string(j, path, "selector", to_string(t.selector));
    if (sel == "nearest_k")
        t.selector = Selector::nearest_k;
    else if (sel == "nearest_omega")
        t.selector = Selector::nearest_omega;
    else if (sel == "sorted_index")
        t.selector = Selector::sorted_index;
    else if (sel == "min_gamma")
        t.selector = Selector::min_gamma;
    else
        config_fail(path + "/selector",
                    "expected one of nearest_k, nearest_omega, sorted_index, min_gamma");
    if (t.selector == Selector::min_gamma && t.kind == TargetKind::fixed_k)
        config_fail(path + "/selector", "min_gamma applies to band-edge targets only");
    return t;
}

inline Json target_to_json(const ModeTarget& t) {
    Json j;
    j["kind"] = to_string(t.kind);
    if (t.kind == TargetKind::fixed_k) j["k_over_pi"] = t.k / std::numbers::pi;
    j["selector"] = to_string(t.selector);
    return j;
}

}  // namespace detail

inline Json default_config_json() {
    Json j;
    j["model"] = {{"phi_over_pi", 0.5}, {"gamma", 1.0}};
    j["grid"]["sizes"] = {4,  6,  8,  10, 12, 16, 20,  25,  30,  40,  50,
                          60, 80, 100, 125, 150, 200, 250, 300, 400};
    j["grid"]["disorders"] = {0.0, 0.02, 0.035, 0.06, 0.1, 0.2, 0.3, 0.4, 0.6, 0.8};
    j["targets"] = Json::array();
    j["targets"].push_back({{"kind", "band_edge_low"}, {"selector", "nearest_k"}});
    j["targets"].push_back(
        {{"kind", "fixed_k"}, {"k_over_pi", 0.75}, {"selector", "nearest_omega"}});
    j["targets"].push_back(
        {{"kind", "fixed_k"}, {"k_over_pi", 0.48}, {"selector", "nearest_omega"}});
    j["targets"].push_back(
        {{"kind", "fixed_k"}, {"k_over_pi", 0.3}, {"selector", "nearest_omega"}});
    j["targets"].push_back(
        {{"kind", "fixed_k"}, {"k_over_pi", 0.6}, {"selector", "nearest_omega"}});
    j["targets"].push_back(
        {{"kind", "fixed_k"}, {"k_over_pi", 0.9}, {"selector", "nearest_omega"}});
    j["targets"].push_back({{"kind", "band_edge_high"}, {"selector", "nearest_k"}});
    j["ensemble"] = {{"n_realizations", 1000}, {"master_seed", 20260808}, {"workers", 0}};
    j["analysis"] = {{"scaling", true},
                     {"fss", true},
                     {"localization", true},
                     {"summary_targets", {0, 1}},
                     {"fit_window", {100, 400}},
                     {"collapse_min_size", 100},
                     {"potential_disorder", 0.2},
                     {"potential_min_size", 100},
                     {"equivalence_disorders", {0.2, 0.3, 0.4, 0.6}},
                     {"collapse",
                      {{"wc_min", -0.05},
                       {"wc_max", 0.1},
                       {"nu_min", 0.5},
                       {"nu_max", 3.0},
                       {"grid", 41},
                       {"bootstrap", 100},
                       {"no_collapse_cost", 1.0}}}};
    j["output"] = {{"dir", "out"}, {"format_version", kFormatVersion}, {"mode_summaries", true}};
    return j;
}

// Parse + validate a config document; defaults fill in absent leaves and the
// fully resolved document is kept for output sidecars.
inline RunConfig parse_config(const Json& doc) {
    if (!doc.is_object()) detail::config_fail("/", "expected a JSON object");
    detail::expect_keys(doc, "", {"model", "grid", "targets", "ensemble", "analysis", "output"});
    RunConfig c;
    const Json defaults = default_config_json();

    const Json model = doc.value("model", Json::object());
    detail::expect_keys(model, "/model", {"phi_over_pi", "gamma"});
    const double phi_over_pi = detail::take_number(model, "/model", "phi_over_pi", 0.5);
    if (!(phi_over_pi > 0.0 && phi_over_pi <= 0.5))
        detail::config_fail("/model/phi_over_pi", "must lie in (0, 0.5]");
    c.phi = phi_over_pi * std::numbers::pi;
    c.gamma = detail::take_number(model, "/model", "gamma", 1.0);
    if (!(c.gamma > 0.0)) detail::config_fail("/model/gamma", "must be positive");

    const Json grid = doc.value("grid", Json::object());
    detail::expect_keys(grid, "/grid", {"sizes", "disorders"});
    c.sizes = detail::take_array<int>(grid, "/grid", "sizes",
                                      defaults["grid"]["sizes"].get<std::vector<int>>());
    c.disorders = detail::take_array<double>(
        grid, "/grid", "disorders", defaults["grid"]["disorders"].get<std::vector<double>>());
    for (int n : c.sizes)
        if (n < 1) detail::config_fail("/grid/sizes", "sizes must be >= 1");
    for (double w : c.disorders)
        if (!(w >= 0.0 && w < 1.0)) detail::config_fail("/grid/disorders", "need 0 <= W < 1");

    if (doc.contains("targets")) {
        const Json& ts = doc.at("targets");
        if (!ts.is_array() || ts.empty())
            detail::config_fail("/targets", "expected a non-empty array");
        for (std::size_t i = 0; i < ts.size(); ++i)
            c.targets.push_back(detail::parse_target(ts.at(i), "/targets/" + std::to_string(i)));
    } else {
        for (std::size_t i = 0; i < defaults["targets"].size(); ++i)
            c.targets.push_back(detail::parse_target(defaults["targets"].at(i),
                                                     "/targets/" + std::to_string(i)));
    }

    const Json ens = doc.value("ensemble", Json::object());
    detail::expect_keys(ens, "/ensemble", {"n_realizations", "master_seed", "workers"});
    c.n_realizations =
        static_cast<int>(detail::take_integer(ens, "/ensemble", "n_realizations", 1000));
    if (c.n_realizations < 1) detail::config_fail("/ensemble/n_realizations", "must be >= 1");
    if (ens.contains("master_seed")) {
        const Json& s = ens.at("master_seed");
        if (!s.is_number_integer() || s.is_number_float())
            detail::config_fail("/ensemble/master_seed", "expected an integer");
        c.master_seed = s.get<std::uint64_t>();
    }
    c.workers = static_cast<int>(detail::take_integer(ens, "/ensemble", "workers", 0));

    const Json an = doc.value("analysis", Json::object());
    detail::expect_keys(an, "/analysis",
                        {"scaling", "fss", "localization", "summary_targets", "fit_window",
                         "collapse_min_size", "potential_disorder", "potential_min_size",
                         "equivalence_disorders", "collapse"});
    c.analysis_scaling = detail::take_bool(an, "/analysis", "scaling", true);
    c.analysis_fss = detail::take_bool(an, "/analysis", "fss", true);
    c.analysis_localization = detail::take_bool(an, "/analysis", "localization", true);
    c.summary_targets = detail::take_array<int>(an, "/analysis", "summary_targets", {0, 1});
    for (int t : c.summary_targets)
        if (t < 0 || t >= static_cast<int>(c.targets.size()))
            detail::config_fail("/analysis/summary_targets", "target index out of range");
    const auto fw = detail::take_array<int>(an, "/analysis", "fit_window", {100, 400});
    if (fw.size() != 2 || fw[0] >= fw[1])
        detail::config_fail("/analysis/fit_window", "expected [lo, hi] with lo < hi");
    c.fit_window = {fw[0], fw[1]};
    c.collapse_min_size =
        static_cast<int>(detail::take_integer(an, "/analysis", "collapse_min_size", 100));
    c.potential_disorder = detail::take_number(an, "/analysis", "potential_disorder", 0.2);
    c.potential_min_size =
        static_cast<int>(detail::take_integer(an, "/analysis", "potential_min_size", 100));
    c.equivalence_disorders = detail::take_array<double>(an, "/analysis", "equivalence_disorders",
                                                         c.equivalence_disorders);
    const Json col = an.value("collapse", Json::object());
    detail::expect_keys(col, "/analysis/collapse",
                        {"wc_min", "wc_max", "nu_min", "nu_max", "grid", "bootstrap",
                         "no_collapse_cost"});
    c.collapse.wc_box = {detail::take_number(col, "/analysis/collapse", "wc_min", -0.05),
                         detail::take_number(col, "/analysis/collapse", "wc_max", 0.1)};
    c.collapse.nu_box = {detail::take_number(col, "/analysis/collapse", "nu_min", 0.5),
                         detail::take_number(col, "/analysis/collapse", "nu_max", 3.0)};
    c.collapse.grid = static_cast<int>(detail::take_integer(col, "/analysis/collapse", "grid", 41));
    c.collapse.bootstrap_resamples =
        static_cast<int>(detail::take_integer(col, "/analysis/collapse", "bootstrap", 100));
    c.collapse.no_collapse_cost =
        detail::take_number(col, "/analysis/collapse", "no_collapse_cost", 1.0);
    if (c.collapse.grid < 3) detail::config_fail("/analysis/collapse/grid", "must be >= 3");

    const Json out = doc.value("output", Json::object());
    detail::expect_keys(out, "/output", {"dir", "format_version", "mode_summaries"});
    c.out_dir = detail::take_string(out, "/output", "dir", "out");
    const long fv = detail::take_integer(out, "/output", "format_version", kFormatVersion);
    if (fv != kFormatVersion)
        detail::config_fail("/output/format_version",
                            "unsupported version (expected " + std::to_string(kFormatVersion) + ")");
    c.mode_summaries = detail::take_bool(out, "/output", "mode_summaries", true);

    // canonical resolved document; runtime-only settings (worker count,
    // output directory) are omitted so they cannot change output bytes
    Json r;
    r["model"] = {{"phi_over_pi", phi_over_pi}, {"gamma", c.gamma}};
    r["grid"] = {{"sizes", c.sizes}, {"disorders", c.disorders}};
    r["targets"] = Json::array();
    for (const auto& t : c.targets) r["targets"].push_back(detail::target_to_json(t));
    r["ensemble"] = {{"n_realizations", c.n_realizations}, {"master_seed", c.master_seed}};
    r["analysis"] = {{"scaling", c.analysis_scaling},
                     {"fss", c.analysis_fss},
                     {"localization", c.analysis_localization},
                     {"summary_targets", c.summary_targets},
                     {"fit_window", {c.fit_window[0], c.fit_window[1]}},
                     {"collapse_min_size", c.collapse_min_size},
                     {"potential_disorder", c.potential_disorder},
                     {"potential_min_size", c.potential_min_size},
                     {"equivalence_disorders", c.equivalence_disorders},
                     {"collapse",
                      {{"wc_min", c.collapse.wc_box[0]},
                       {"wc_max", c.collapse.wc_box[1]},
                       {"nu_min", c.collapse.nu_box[0]},
                       {"nu_max", c.collapse.nu_box[1]},
                       {"grid", c.collapse.grid},
                       {"bootstrap", c.collapse.bootstrap_resamples},
                       {"no_collapse_cost", c.collapse.no_collapse_cost}}}};
    r["output"] = {{"format_version", kFormatVersion}, {"mode_summaries", c.mode_summaries}};
    c.resolved = std::move(r);
    return c;
}

inline RunConfig parse_config_text(const std::string& text) {
    Json doc;
    try {
        doc = Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    return parse_config(doc);
}

// Dotted-path override: "ensemble.n_realizations=200". The value is parsed
// as JSON when possible, else taken as a string.
inline void apply_override(Json& doc, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos)
        throw ConfigError("override must look like key.path=value: " + assignment);
    const std::string path = assignment.substr(0, eq);
    const std::string value = assignment.substr(eq + 1);
    Json parsed;
    try {
        parsed = Json::parse(value);
    } catch (const Json::parse_error&) {
        parsed = value;
    }
    Json* node = &doc;
    std::size_t start = 0;
    std::vector<std::string> keys;
    while (start <= path.size()) {
        const auto dot = path.find('.', start);
        keys.push_back(path.substr(start, dot == std::string::npos ? dot : dot - start));
        if (dot == std::string::npos) break;
        start = dot + 1;
    }
    for (std::size_t i = 0; i + 1 < keys.size(); ++i) {
        if (keys[i].empty()) throw ConfigError("bad override path: " + path);
        node = &(*node)[keys[i]];
    }
    if (keys.empty() || keys.back().empty()) throw ConfigError("bad override path: " + path);
    (*node)[keys.back()] = parsed;
}

// Sidecar metadata written next to every CSV.
inline Json sidecar_json(const RunConfig& config) {
    Json meta;
    meta["artifact"] = "subrad";
    meta["version"] = kVersion;
    meta["format_version"] = kFormatVersion;
    meta["config_hash"] = config.hash();
    meta["master_seed"] = config.master_seed;
    meta["config"] = config.resolved;
    return meta;
}

inline void write_sidecar(const std::filesystem::path& csv_path, const RunConfig& config) {
    std::filesystem::path meta = csv_path;
    meta += ".meta.json";
    write_file(meta, sidecar_json(config).dump(2) + "\n");
}

}  // namespace subrad
