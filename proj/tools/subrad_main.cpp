// subrad — reproducible pipeline for disorder-driven subradiant decay-rate
// scaling in a 1D waveguide-coupled qubit chain.
//
// Subcommands:
//   spectrum   per-mode table for a single (N, W) cell
//   ensemble   seeded disorder ensembles over the configured (N, W) grid
//   analyze    fits, xi table, crossover sizes, data collapses, localization
//   report     human-readable summary of analyze outputs

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include "subrad/analyze.hpp"
#include "subrad/config.hpp"
#include "subrad/ensemble.hpp"
#include "subrad/formats.hpp"
#include "subrad/io.hpp"
#include "subrad/localization.hpp"
#include "subrad/pipeline.hpp"
#include "subrad/spectrum.hpp"
#include "subrad/version.hpp"

namespace fs = std::filesystem;
using namespace subrad;

namespace {

struct CliOptions {
    std::string config_path;
    std::string out_dir;
    std::string seed;
    int workers = -1;
    std::vector<std::string> overrides;
};

RunConfig load_config(const CliOptions& cli) {
    Json doc;
    if (!cli.config_path.empty()) {
        doc = Json::parse(read_file(cli.config_path), nullptr, true);
    } else {
        doc = default_config_json();
    }
    for (const auto& ov : cli.overrides) apply_override(doc, ov);
    if (!cli.seed.empty()) apply_override(doc, "ensemble.master_seed=" + cli.seed);
    // worker precedence: flag, then SUBRAD_WORKERS, then config, then cores
    if (cli.workers >= 0) {
        apply_override(doc, "ensemble.workers=" + std::to_string(cli.workers));
    } else if (const char* env = std::getenv("SUBRAD_WORKERS")) {
        apply_override(doc, std::string("ensemble.workers=") + env);
    }
    if (!cli.out_dir.empty()) {
        Json& out = doc["output"];
        if (!out.is_object()) out = Json::object();
        out["dir"] = cli.out_dir;
    }
    RunConfig config = parse_config(doc);
    for (const auto& t : config.targets)
        if (t.in_superradiant_window(config.phi))
            std::fprintf(stderr,
                         "warning: target %s lies within the superradiant window around phi; "
                         "it is excluded from subradiance statistics\n",
                         t.label().c_str());
    return config;
}

int cmd_spectrum(const RunConfig& config) {
    if (config.sizes.size() != 1 || config.disorders.size() != 1)
        throw ConfigError("config error at /grid: spectrum needs exactly one size and one disorder");
    const ChainSpec spec(config.sizes[0], config.phi, config.disorders[0], config.gamma,
                         config.master_seed);
    CsvWriter w({"realization_index", "mode_index", "omega_re", "omega_im", "Omega", "Gamma",
                 "k_est_over_pi", "class", "p_left", "p_right", "xi_phi", "x0"});
    for (long r = 0; r < config.n_realizations; ++r) {
        const auto offsets = sample_offsets(spec, r);
        const Realization real = build_positions(spec, offsets, r);
        const DenseHamiltonian h = build_h_eff(real, spec.gamma, spec.phi);
        const auto modes = diagonalize(h);
        for (const auto& m : modes) {
            const int n = static_cast<int>(m.vector.size());
            w.append_row({std::to_string(r), std::to_string(m.node_index),
                          format_double(m.omega.real()), format_double(m.omega.imag()),
                          format_double(m.Omega), format_double(m.Gamma),
                          format_double(m.k_est / std::numbers::pi), to_string(m.mode_class),
                          format_double(std::norm(m.vector(0))),
                          format_double(std::norm(m.vector(n - 1))),
                          format_double(participation_ratio(m)),
                          format_double(wavepacket_center(m))});
        }
    }
    const fs::path out = fs::path(config.out_dir) / "spectrum.csv";
    write_file(out, w.str());
    write_sidecar(out, config);
    std::fprintf(stderr, "wrote %s (%d realizations, N=%d, W=%g)\n", out.string().c_str(),
                 config.n_realizations, config.sizes[0], config.disorders[0]);
    return 0;
}

int cmd_ensemble(const RunConfig& config) {
    std::atomic<long> last_percent{-1};
    const PipelineResult pipe = run_configured_ensemble(config, [&](long done, long total) {
        const long pct = (100 * done) / std::max(1L, total);
        long expected = last_percent.load();
        if (pct > expected && last_percent.compare_exchange_strong(expected, pct))
            std::fprintf(stderr, "\rensemble: %ld%%", pct);
    });
    std::fprintf(stderr, "\rensemble: done\n");

    int aborted = 0;
    for (const auto& st : pipe.stats) {
        std::fprintf(stderr, "cell N=%d W=%g target=%s typ=%g avg=%g n=%d%s\n", st.n_qubits,
                     st.disorder_w, st.target.label().c_str(), st.gamma_typ, st.gamma_avg,
                     st.n_realizations, st.aborted ? " ABORTED" : "");
        if (st.aborted) ++aborted;
    }

    const fs::path dir(config.out_dir);
    fs::create_directories(dir);
    write_file(dir / "ensemble.csv", ensemble_csv(pipe.stats, config.targets));
    write_sidecar(dir / "ensemble.csv", config);
    Json mirror;
    mirror["rows"] = ensemble_json(pipe.stats);
    mirror["meta"] = sidecar_json(config);
    write_file(dir / "ensemble.json", mirror.dump(2) + "\n");
    if (config.analysis_localization && config.mode_summaries) {
        EnsembleResult merged;
        merged.stats = pipe.stats;
        merged.summaries = pipe.summaries;
        write_file(dir / "modes.csv", modes_csv(merged, pipe.specs, config.targets));
        write_sidecar(dir / "modes.csv", config);
    }

    if (aborted > 0) {
        std::fprintf(stderr, "error: %d cell(s) aborted (more than 1%% of realizations failed)\n",
                     aborted);
        return 1;
    }
    return 0;
}

int cmd_analyze(const RunConfig& config) {
    const fs::path dir(config.out_dir);
    const fs::path ens = dir / "ensemble.csv";
    if (!fs::exists(ens)) throw IoError("missing input file: " + ens.string());
    const auto rows = load_ensemble_csv(ens);
    if (rows.empty()) throw IoError("no ensemble rows in " + ens.string());
    std::vector<ModeRow> mode_rows;
    const fs::path modes = dir / "modes.csv";
    if (fs::exists(modes)) mode_rows = load_modes_csv(modes);

    const AnalyzeResult analysis = analyze(config, rows, mode_rows);
    write_analysis_files(config, analysis, dir);
    std::fprintf(stderr, "analyze: wrote tables and figure data to %s\n", dir.string().c_str());
    return 0;
}

int cmd_report(const RunConfig& config) {
    const fs::path dir(config.out_dir);
    const fs::path fits = dir / "fits.csv";
    if (!fs::exists(fits)) throw IoError("missing input file: " + fits.string() + " (run analyze first)");

    std::string md;
    md += "# subrad run report\n\n";
    md += "- version: " + std::string(kVersion) + "\n";
    md += "- config hash: " + config.hash() + "\n";
    md += "- master seed: " + format_u64(config.master_seed) + "\n\n";

    md += "## Scaling fits (window " + std::to_string(config.fit_window[0]) + ".." +
          std::to_string(config.fit_window[1]) + ")\n\n";
    md += "| target | W | power exponent | power r2 | exp xi_inf | exp r2 |\n";
    md += "|---|---|---|---|---|---|\n";
    {
        const CsvTable t = CsvTable::load(fits);
        const int ct = t.column("target"), cw = t.column("disorder_w"),
                  cpe = t.column("power_exponent"), cpr = t.column("power_r2"),
                  cxi = t.column("exp_xi_inf"), cer = t.column("exp_r2");
        for (const auto& r : t.rows())
            md += "| " + r[ct] + " | " + r[cw] + " | " + r[cpe] + " | " + r[cpr] + " | " + r[cxi] +
                  " | " + r[cer] + " |\n";
    }

    const fs::path nc = dir / "nc_table.csv";
    if (fs::exists(nc)) {
        md += "\n## Crossover sizes\n\n| target | W | N_c |\n|---|---|---|\n";
        const CsvTable t = CsvTable::load(nc);
        const int ct = t.column("target"), cw = t.column("disorder_w"), cn = t.column("n_c");
        for (const auto& r : t.rows())
            md += "| " + r[ct] + " | " + r[cw] + " | " + (r[cn].empty() ? "-" : r[cn]) + " |\n";
    }

    // directory listings are sorted so the report is byte-reproducible
    std::vector<std::string> names;
    for (const auto& entry : fs::directory_iterator(dir))
        names.push_back(entry.path().filename().string());
    std::sort(names.begin(), names.end());

    md += "\n## Data collapses\n\n| file | W_c | nu | cost | flags |\n|---|---|---|---|---|\n";
    for (const std::string& name : names) {
        if (name.rfind("collapse_", 0) != 0 || name.size() < 5 ||
            name.substr(name.size() - 5) != ".json")
            continue;
        const Json j = Json::parse(read_file(dir / name));
        std::string flags;
        if (j.value("boundary_hit", false)) flags += "boundary ";
        if (j.value("no_collapse", false)) flags += "no-collapse";
        md += "| " + name + " | " + format_double(j.value("w_c", 0.0)) + " | " +
              format_double(j.value("nu", 0.0)) + " | " + format_double(j.value("cost", 0.0)) +
              " | " + (flags.empty() ? "-" : flags) + " |\n";
    }

    md += "\n## Localization\n\n";
    for (const std::string& name : names) {
        if (name.rfind("localization_", 0) != 0 || name.size() < 5 ||
            name.substr(name.size() - 5) != ".json")
            continue;
        const Json j = Json::parse(read_file(dir / name));
        md += "### " + j.value("target", std::string("?")) + "\n\n";
        if (!j["alpha"].is_null())
            md += "- width exponent alpha = " + format_double(j["alpha"].get<double>()) + "\n";
        for (const auto& p : j.value("potentials", Json::array()))
            md += "- N=" + std::to_string(p.value("n_qubits", 0)) + " W=" +
                  format_double(p.value("disorder_w", 0.0)) + ": " +
                  p.value("fit", std::string("?")) + " fit, sigma=" +
                  format_double(p.value("harmonic_sigma", 0.0)) + "\n";
        if (j.contains("equivalence")) {
            const auto& e = j["equivalence"];
            md += "- xi / xi_phi on saturated cells: mean " +
                  format_double(e.value("ratio_mean", 0.0)) + " (range " +
                  format_double(e.value("ratio_min", 0.0)) + " .. " +
                  format_double(e.value("ratio_max", 0.0)) + ")\n";
        }
        md += "\n";
    }

    write_file(dir / "report.md", md);
    std::fprintf(stderr, "report: wrote %s\n", (dir / "report.md").string().c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"subradiant decay-rate scaling in disordered waveguide-QED chains"};
    app.set_version_flag("--version", std::string("subrad ") + kVersion);
    app.require_subcommand(1);

    CliOptions cli;
    app.add_option("--config", cli.config_path, "JSON config file (defaults apply when omitted)");
    app.add_option("--out", cli.out_dir, "output directory (overrides config)");
    app.add_option("--seed", cli.seed, "master seed (overrides config)");
    app.add_option("--workers", cli.workers, "worker threads (0 = hardware)");
    app.add_option("--set", cli.overrides, "dotted-path config override, e.g. grid.sizes=[2]");

    auto* sc_spectrum = app.add_subcommand("spectrum", "per-mode table for one (N, W) cell");
    auto* sc_ensemble = app.add_subcommand("ensemble", "run the disorder ensembles");
    auto* sc_analyze = app.add_subcommand("analyze", "analyze saved ensemble outputs");
    auto* sc_report = app.add_subcommand("report", "summarize analyze outputs as markdown");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        const RunConfig config = load_config(cli);
        if (sc_spectrum->parsed()) return cmd_spectrum(config);
        if (sc_ensemble->parsed()) return cmd_ensemble(config);
        if (sc_analyze->parsed()) return cmd_analyze(config);
        if (sc_report->parsed()) return cmd_report(config);
        std::fprintf(stderr, "error: no subcommand\n");
        return 2;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return 2;
    } catch (const Json::exception& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
