// acceptance — end-to-end verification of the artifact against its numerical
// targets. Runs the full disorder-ensemble pipeline at production statistics
// (1000 realizations unless SUBRAD_ACCEPT_REALIZATIONS overrides it for
// smoke runs) and prints one PASS/FAIL line per criterion.

#include <atomic>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "subrad/analyze.hpp"
#include "subrad/config.hpp"
#include "subrad/ensemble.hpp"
#include "subrad/formats.hpp"
#include "subrad/io.hpp"
#include "subrad/linalg.hpp"
#include "subrad/localization.hpp"
#include "subrad/model.hpp"
#include "subrad/pipeline.hpp"
#include "subrad/scaling.hpp"
#include "subrad/spectrum.hpp"

using namespace subrad;
using std::numbers::pi;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void gate(const std::string& id, bool ok, const std::string& detail) {
    std::printf("%s %s: %s\n", ok ? "PASS" : "FAIL", id.c_str(), detail.c_str());
    std::fflush(stdout);
    if (!ok) ++g_failures;
}

std::string fmt(const char* f, ...) {
    va_list ap;
    va_start(ap, f);
    char buf[512];
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

int env_int(const char* name, int fallback) {
    const char* v = std::getenv(name);
    return v ? std::atoi(v) : fallback;
}

// ---------------------------------------------------------------- criterion 1

void criterion_1() {
    bool tri_ok = true, bsup_ok = true;
    double tri_worst = 0.0, bsup_worst = 0.0;
    for (int n = 2; n <= 12; ++n) {
        const ChainSpec spec(n, 0.5 * pi, 0.4, 1.0, 900 + n);
        for (long idx = 0; idx < 100; ++idx) {
            const auto r = build_positions(spec, sample_offsets(spec, idx), idx);
            const auto h = build_h_eff(r, 1.0, spec.phi);
            const auto t = build_h_inv(r, 1.0, spec.phi);
            const double err =
                (t.to_dense() * h.entries - Eigen::MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff();
            tri_worst = std::max(tri_worst, err);
            tri_ok &= err < 1e-10;
            const Eigen::MatrixXcd inv = h.entries.inverse();
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    const double im = inv(i, j).imag();
                    const bool corner = (i == 0 && j == 0) || (i == n - 1 && j == n - 1);
                    const double dev = corner ? std::abs(im - 1.0) : std::abs(im);
                    bsup_worst = std::max(bsup_worst, dev);
                    bsup_ok &= dev < 1e-10;
                }
        }
    }
    gate("criterion 1a", tri_ok,
         fmt("tridiagonal inverse vs dense, N=2..12 x100: worst |T*H-I| = %.2e (tol 1e-10)",
             tri_worst));
    gate("criterion 1b", bsup_ok,
         fmt("Im(H^-1) boundary support: worst deviation %.2e (tol 1e-10)", bsup_worst));

    bool res_ok = true, trace_ok = true, brate_ok = true;
    double res_worst = 0.0, trace_worst = 0.0, brate_worst = 0.0;
    for (int n : {2, 5, 8, 12, 24, 48}) {
        const ChainSpec spec(n, 0.5 * pi, 0.4, 1.0, 300 + n);
        for (long idx = 0; idx < 10; ++idx) {
            const auto r = build_positions(spec, sample_offsets(spec, idx), idx);
            const auto h = build_h_eff(r, 1.0, spec.phi);
            const auto modes = diagonalize(h);
            const double hnorm = h.entries.norm();
            double trace = 0.0;
            for (const auto& m : modes) {
                const double res = (h.entries * m.vector - m.omega * m.vector).norm() / hnorm;
                res_worst = std::max(res_worst, res);
                res_ok &= res < 1e-10;
                trace += -m.omega.imag();
                // the identity is exact only for true eigenvectors; at the
                // N = 2..12 sizes of this suite the spectra are well
                // separated and dense eigenvectors reach it
                if (n <= 12) {
                    const BoundaryRate br = boundary_rate_identity(m, 1.0);
                    const double dev = std::abs(br.lhs - br.rhs) / br.lhs;
                    brate_worst = std::max(brate_worst, dev);
                    brate_ok &= dev < 1e-10;
                }
            }
            trace_worst = std::max(trace_worst, std::abs(trace - n / 2.0));
            trace_ok &= std::abs(trace - n / 2.0) < 1e-9;
        }
    }
    gate("criterion 1c", res_ok, fmt("eigen-residuals: worst %.2e (tol 1e-10)", res_worst));
    gate("criterion 1d", trace_ok,
         fmt("trace identity sum Gamma = N gamma/2: worst |dev| = %.2e (tol 1e-9)", trace_worst));
    gate("criterion 1e", brate_ok,
         fmt("boundary-rate identity, N=2..12: worst relative deviation %.2e (tol 1e-10)",
             brate_worst));
}

// ---------------------------------------------------------------- criterion 2

void criterion_2() {
    ScalingSeries min_g, weak_g;
    const double weak_target = ordered_dispersion(0.5 * pi, 0.75 * pi);
    for (int n : {50, 100, 200, 400}) {
        const ChainSpec spec(n, 0.5 * pi, 0.0, 1.0, 0);
        const auto r = build_positions(spec, std::vector<double>(n, 0.0));
        const auto h = build_h_eff(r, 1.0, spec.phi);
        const auto eig = eig_dense(h.entries, false);
        double gmin = 1e300, gweak = 0.0, best = 1e300;
        for (int i = 0; i < n; ++i) {
            gmin = std::min(gmin, -eig.values(i).imag());
            const double d = std::abs(eig.values(i).real() - weak_target);
            if (d < best) {
                best = d;
                gweak = -eig.values(i).imag();
            }
        }
        min_g.n.push_back(n);
        min_g.value.push_back(gmin);
        weak_g.n.push_back(n);
        weak_g.value.push_back(gweak);
    }
    const double s3 = fit_power_law(min_g).exponent();
    const double s1 = fit_power_law(weak_g).exponent();
    gate("criterion 2a", std::abs(s3 + 3.0) <= 0.1,
         fmt("ordered min-Gamma slope = %.4f (want -3.0 +- 0.1)", s3));
    gate("criterion 2b", std::abs(s1 + 1.0) <= 0.1,
         fmt("ordered k=0.75pi slope = %.4f (want -1.0 +- 0.1)", s1));
}

// ------------------------------------------------- master ensemble criteria

struct Master {
    RunConfig config;
    AnalyzeResult analysis;
    std::vector<EnsembleRow> rows;
    std::vector<EnsembleStats> stats;
};

const TargetAnalysis& target_of(const Master& m, int idx) {
    return m.analysis.targets.at(static_cast<std::size_t>(idx));
}

void criterion_3(const Master& m) {
    for (int t : {0, 1}) {
        const auto& ta = target_of(m, t);
        const FitRow* fr = nullptr;
        for (const auto& f : ta.fits)
            if (f.w == 0.4) fr = &f;
        const bool have = fr && fr->ok_exponential && fr->ok_power;
        const bool r2_ok = have && fr->exponential.r_squared > 0.99;
        const bool resid_ok = have && fr->exponential.sse < fr->power.sse;
        gate(fmt("criterion 3%c", 'a' + t), r2_ok && resid_ok,
             have ? fmt("W=0.4 %s: semilog r2 = %.5f (want > 0.99), exp SSE %.3g < power SSE %.3g: %s",
                        ta.target.label().c_str(), fr->exponential.r_squared, fr->exponential.sse,
                        fr->power.sse, resid_ok ? "yes" : "no")
                  : std::string("fits unavailable at W=0.4"));
    }
}

void criterion_4(const Master& m) {
    const auto& ta = target_of(m, 0);
    std::map<double, std::optional<int>> nc;
    for (const auto& [w, v] : ta.nc_by_w) nc[w] = v;

    // W = 0: the series equals its reference, no crossover by construction
    bool absent_w0 = true;
    const auto it0 = ta.typ_series.find(0.0);
    if (it0 != ta.typ_series.end()) {
        try {
            const ExponentialFit ef = fit_exponential(it0->second);
            absent_w0 = !detect_crossover_nc(it0->second, it0->second, ef).has_value();
        } catch (const std::exception&) {
            absent_w0 = true;  // not even exponential-fittable: no crossover
        }
    }

    const std::vector<double> ws{0.06, 0.1, 0.2, 0.4};
    bool present = true;
    std::string values;
    for (double w : ws) {
        const bool have = nc.count(w) && nc[w].has_value();
        present &= have;
        values += fmt("N_c(%g)=%s ", w, have ? std::to_string(*nc[w]).c_str() : "absent");
    }
    bool decreasing = present;
    if (present)
        for (std::size_t i = 1; i < ws.size(); ++i) decreasing &= *nc[ws[i]] < *nc[ws[i - 1]];
    gate("criterion 4", present && decreasing && absent_w0,
         values + (absent_w0 ? "; absent at W=0" : "; UNEXPECTED crossover at W=0") +
             (decreasing ? "; strictly decreasing" : "; NOT strictly decreasing"));
}

void criterion_5(const Master& m) {
    const auto& ta = target_of(m, 0);
    auto xi_at = [&](double w, int n_max) -> std::optional<double> {
        for (const auto& xr : ta.xi_rows)
            if (xr.w == w && xr.n_max == n_max && xr.xi > 0.0) return xr.xi;
        return std::nullopt;
    };

    bool saturated = true;
    std::string sat_detail;
    for (double w : {0.3, 0.4, 0.6, 0.8}) {
        double lo = 1e300, hi = 0.0;
        for (int n : {200, 250, 300, 400}) {
            const auto xi = xi_at(w, n);
            if (!xi) continue;
            lo = std::min(lo, *xi);
            hi = std::max(hi, *xi);
        }
        const double var = hi / lo - 1.0;
        saturated &= (hi > 0.0 && var < 0.10);
        sat_detail += fmt("W=%g: %.1f%% ", w, 100 * var);
    }
    gate("criterion 5a", saturated,
         "xi variation over N in [200,400] at W >= 0.3: " + sat_detail + "(want < 10%)");

    bool grows = true;
    std::string grow_detail;
    for (double w : {0.02, 0.035}) {
        std::vector<double> xs;
        for (int n : {200, 250, 300, 400}) {
            const auto xi = xi_at(w, n);
            if (xi) xs.push_back(*xi);
        }
        bool inc = xs.size() == 4;
        for (std::size_t i = 1; i < xs.size(); ++i) inc &= xs[i] > xs[i - 1];
        grows &= inc;
        if (xs.size() == 4)
            grow_detail += fmt("W=%g: xi(200..400) = %.1f -> %.1f %s ", w, xs.front(), xs.back(),
                               inc ? "increasing" : "NOT increasing");
    }
    gate("criterion 5b", grows, "xi grows with N at W <= 0.05: " + grow_detail);
}

void criterion_6(const Master& m) {
    const auto& strong = target_of(m, 0);
    const auto& weak = target_of(m, 1);
    const auto& super = target_of(m, 2);

    const bool s_ok = strong.xi_collapse && std::abs(strong.xi_collapse->w_c) <= 0.03 &&
                      std::abs(strong.xi_collapse->nu - 1.5) <= 0.2;
    gate("criterion 6a", s_ok,
         strong.xi_collapse
             ? fmt("strong collapse: W_c = %.4f +- %.4f (want 0 +- 0.03), nu = %.3f +- %.3f "
                   "(want 1.5 +- 0.2), cost %.3f",
                   strong.xi_collapse->w_c, strong.xi_collapse->w_c_err, strong.xi_collapse->nu,
                   strong.xi_collapse->nu_err, strong.xi_collapse->cost)
             : std::string("strong collapse unavailable"));

    const bool w_ok = weak.xi_collapse && std::abs(weak.xi_collapse->nu - 1.95) <= 0.25;
    gate("criterion 6b", w_ok,
         weak.xi_collapse ? fmt("weak collapse: W_c = %.4f, nu = %.3f +- %.3f (want 1.95 +- 0.25), "
                                "cost %.3f",
                                weak.xi_collapse->w_c, weak.xi_collapse->nu,
                                weak.xi_collapse->nu_err, weak.xi_collapse->cost)
                          : std::string("weak collapse unavailable"));

    const bool have_costs = strong.xi_collapse && weak.xi_collapse && super.xi_collapse;
    const double sub_cost =
        have_costs ? std::max(strong.xi_collapse->cost, weak.xi_collapse->cost) : 0.0;
    const bool sr_ok = have_costs && super.xi_collapse->cost >= 5.0 * sub_cost;
    gate("criterion 6c", sr_ok,
         have_costs ? fmt("superradiant target cost %.3f vs subradiant max %.3f (want >= 5x)",
                          super.xi_collapse->cost, sub_cost)
                    : std::string("collapse costs unavailable"));
}

void criterion_7(const Master& m) {
    const auto& strong = target_of(m, 0);
    const auto& weak = target_of(m, 1);

    const bool s_ok = strong.xi_phi_collapse && std::abs(strong.xi_phi_collapse->nu - 1.51) <= 0.25;
    gate("criterion 7a", s_ok,
         strong.xi_phi_collapse
             ? fmt("strong xi_phi collapse: nu = %.3f +- %.3f (want 1.51 +- 0.25), W_c = %.4f",
                   strong.xi_phi_collapse->nu, strong.xi_phi_collapse->nu_err,
                   strong.xi_phi_collapse->w_c)
             : std::string("xi_phi collapse unavailable"));

    const bool w_ok = weak.xi_phi_collapse && std::abs(weak.xi_phi_collapse->nu - 1.93) <= 0.25;
    gate("criterion 7b", w_ok,
         weak.xi_phi_collapse
             ? fmt("weak xi_phi collapse: nu = %.3f +- %.3f (want 1.93 +- 0.25)",
                   weak.xi_phi_collapse->nu, weak.xi_phi_collapse->nu_err)
             : std::string("xi_phi collapse unavailable"));

    bool ratio_ok = strong.equivalence.has_value();
    std::string detail = "xi/xi_phi on saturated cells: ";
    for (const TargetAnalysis* ta : {&strong, &weak}) {
        if (!ta->equivalence) continue;
        ratio_ok &= ta->equivalence->ratio_min >= 1.6 && ta->equivalence->ratio_max <= 2.4;
        detail += fmt("%s: [%.2f, %.2f] over %zu cells; ", ta->target.label().c_str(),
                      ta->equivalence->ratio_min, ta->equivalence->ratio_max,
                      ta->equivalence->rows.size());
    }
    if (!strong.equivalence) detail += "strong equivalence unavailable";
    gate("criterion 7c", ratio_ok, detail + "(want within [1.6, 2.4])");
}

void criterion_8(const Master& m) {
    const auto& strong = target_of(m, 0);
    const auto& weak = target_of(m, 1);

    const PotentialProfile* s_prof = strong.potentials.empty() ? nullptr : &strong.potentials.back();
    const bool s_ok = s_prof && s_prof->stats.fit == PotentialFit::constant;
    gate("criterion 8a", s_ok,
         s_prof ? fmt("strong V(x0) at N=%d, W=%g: %s fit preferred (SSE const %.3g, harmonic %.3g)",
                      s_prof->n, s_prof->w,
                      s_prof->stats.fit == PotentialFit::constant ? "constant" : "harmonic",
                      s_prof->stats.sse_constant, s_prof->stats.sse_harmonic)
               : std::string("strong potential profile unavailable"));

    const PotentialProfile* w_prof = nullptr;
    for (const auto& pp : weak.potentials)
        if (!w_prof || std::abs(pp.n - 200) < std::abs(w_prof->n - 200)) w_prof = &pp;
    const bool harm_ok = w_prof && w_prof->stats.fit == PotentialFit::harmonic;
    const bool alpha_ok = weak.alpha && *weak.alpha > 1.0;
    gate("criterion 8b", harm_ok && alpha_ok,
         fmt("weak V(x0): %s at N=%d; alpha = %s (want harmonic fit and alpha > 1 over >= 3 sizes)",
             w_prof ? (w_prof->stats.fit == PotentialFit::harmonic ? "harmonic" : "constant")
                    : "unavailable",
             w_prof ? w_prof->n : 0, weak.alpha ? fmt("%.3f", *weak.alpha).c_str() : "unavailable"));
}

void criterion_9(const Master& m) {
    for (int t : {0, 1}) {
        const auto& ta = target_of(m, t);
        const auto it = ta.avg_series.find(0.4);
        bool ok = false;
        double slope = 0.0;
        if (it != ta.avg_series.end()) {
            const auto win = subrad::detail::window(it->second, m.config.fit_window[0],
                                                    m.config.fit_window[1]);
            if (win.size() >= 3) {
                slope = fit_power_law(win).exponent();
                ok = std::abs(slope + 1.0) <= 0.3;
            }
        }
        gate(fmt("criterion 9%c", 'a' + t), ok,
             fmt("W=0.4 %s mean-rate slope = %.3f (want -1.0 +- 0.3)", ta.target.label().c_str(),
                 slope));
    }
    bool amgm = true;
    int cells = 0;
    for (const auto& st : m.stats) {
        if (st.n_realizations == 0 || st.aborted) continue;
        ++cells;
        amgm &= st.gamma_typ <= st.gamma_avg * (1.0 + 1e-12);
    }
    gate("criterion 9c", amgm, fmt("AM-GM gamma_typ <= gamma_avg in all %d cells", cells));
}

// --------------------------------------------------------------- criterion 10

bool operation_examples_ok(std::string& detail) {
    bool ok = true;
    auto expect = [&](bool cond, const char* what) {
        if (!cond) {
            ok = false;
            detail += std::string(what) + "; ";
        }
    };
    // model examples
    {
        const ChainSpec spec(3, 0.5 * pi, 0.4, 1.0, 1);
        const auto r = build_positions(spec, {0.1, -0.2, 0.0});
        expect(std::abs(r.positions[0] - 1.1) < 1e-15 && std::abs(r.positions[1] - 1.8) < 1e-15 &&
                   std::abs(r.positions[2] - 3.0) < 1e-15,
               "positions");
        expect(std::abs(r.spacing_phases[0] - 0.35 * pi) < 1e-14, "spacing phase");
        const ChainSpec zero(8, 0.5 * pi, 0.0, 1.0, 5);
        for (double v : sample_offsets(zero, 3)) expect(v == 0.0, "W=0 offsets");
        Realization two;
        two.positions = {1.0, 2.0};
        two.offsets = {0.0, 0.0};
        two.spacing_phases = {0.5 * pi};
        const auto h2 = build_h_eff(two, 1.0, 0.5 * pi);
        expect(std::abs(h2.entries(0, 1) - Complex(0.5, 0.0)) < 1e-15, "h_eff N=2");
        const auto t2 = build_h_inv(two, 1.0, 0.5 * pi);
        expect(std::abs(t2.diag(0) - Complex(0.0, 1.0)) < 1e-12 &&
                   std::abs(t2.offdiag(0) - Complex(1.0, 0.0)) < 1e-12,
               "h_inv N=2");
    }
    // dispersion + selection examples
    {
        expect(std::abs(ordered_dispersion(0.5 * pi, 0.75 * pi) + std::sqrt(2.0) / 2.0) < 1e-9,
               "dispersion 0.75pi");
        bool pole = false;
        try {
            (void)ordered_dispersion(0.5 * pi, 0.5 * pi);
        } catch (const DispersionPoleError&) {
            pole = true;
        }
        expect(pole, "dispersion pole");
    }
    // typical + fits + moments
    {
        expect(std::abs(typical(std::vector<double>{std::exp(-1.0), std::exp(-3.0)}) -
                        std::exp(-2.0)) < 1e-15,
               "typical");
        ScalingSeries two;
        two.n = {1, 2};
        two.value = {2.0, 1.0};
        expect(std::abs(fit_power_law(two).exponent() + 1.0) < 1e-12, "two-point slope");
        ScalingSeries geo;
        const double r = std::exp(-0.1);
        for (int n = 1; n <= 600; ++n) {
            geo.n.push_back(n);
            geo.value.push_back(std::pow(r, n));
        }
        expect(std::abs(xi_from_moments(geo) - 2.0 * r / (1.0 - r * r)) < 1e-8, "geometric xi");
    }
    // cost + localization examples
    {
        std::vector<CollapsePoint> alt{{1, 1, 0.0}, {2, 1, 1.0}, {3, 1, 0.0}, {4, 1, 1.0}};
        expect(std::abs(cost_function(alt, 0.0, 1.0) - 2.0) < 1e-14, "cost (0,1,0,1)");
        Eigen::VectorXcd e3 = Eigen::VectorXcd::Zero(4);
        e3(2) = 1.0;
        expect(wavepacket_center(e3) == 3.0, "wavepacket center");
        expect(std::abs(participation_ratio(e3) - 1.0) < 1e-14, "participation ratio");
        const std::vector<double> bc{50.0};
        const std::vector<double> bd{1.0};
        expect(std::abs(predict_typ_rate(bc, bd, 1.0, 5.0, 100) + 100.0 / 5.0) < 1e-12,
               "predicted exponent");
    }
    return ok;
}

void criterion_10(int workers) {
    std::string detail;
    const bool ex_ok = operation_examples_ok(detail);
    gate("criterion 10a", ex_ok,
         ex_ok ? "operation examples hold as stated" : "failed: " + detail);

    // synthetic FSS generator recovery within +-0.1
    bool fss_ok = true;
    std::string fss_detail;
    for (double nu_true : {1.5, 2.0}) {
        std::vector<CollapsePoint> pts;
        for (double n : {100.0, 200.0, 400.0})
            for (int i = 0; i < 13; ++i) {
                const double w = 0.05 * std::pow(0.6 / 0.05, i / 12.0);
                const double xi = std::min(n, 2.0 * std::pow(w, -nu_true));
                pts.push_back({n, w, n / xi});
            }
        CollapseOptions opt;
        opt.bootstrap_resamples = 0;
        const auto res = collapse(pts, opt);
        fss_ok &= std::abs(res.nu - nu_true) <= 0.1;
        fss_detail += fmt("nu_true=%.1f -> %.3f ", nu_true, res.nu);
    }
    gate("criterion 10b", fss_ok, "synthetic collapse recovery: " + fss_detail + "(tol 0.1)");

    // byte determinism, 1 vs k workers
    RunConfig cfg = parse_config(default_config_json());
    Json doc = default_config_json();
    apply_override(doc, "grid.sizes=[10,14]");
    apply_override(doc, "grid.disorders=[0.0,0.3]");
    apply_override(doc, "ensemble.n_realizations=30");
    apply_override(doc, "analysis.summary_targets=[0,1]");
    cfg = parse_config(doc);
    cfg.workers = 1;
    const PipelineResult a = run_configured_ensemble(cfg);
    cfg.workers = std::max(2, workers);
    const PipelineResult b = run_configured_ensemble(cfg);
    EnsembleResult ra, rb;
    ra.stats = a.stats;
    ra.summaries = a.summaries;
    rb.stats = b.stats;
    rb.summaries = b.summaries;
    const bool bytes_ok = ensemble_csv(a.stats, cfg.targets) == ensemble_csv(b.stats, cfg.targets) &&
                          modes_csv(ra, a.specs, cfg.targets) == modes_csv(rb, b.specs, cfg.targets);
    gate("criterion 10c", bytes_ok,
         fmt("1-worker vs %d-worker ensemble and mode files byte-identical", cfg.workers));

    // standard-error sanity: doubling realizations moves ln gamma_typ by
    // less than 3 SE in >= 95% of cells
    std::vector<ChainSpec> specs;
    for (double w : {0.05, 0.1, 0.2, 0.4})
        for (int n : {10, 15, 20, 25, 30}) specs.emplace_back(n, 0.5 * pi, w, 1.0, 606);
    const std::vector<ModeTarget> ts{ModeTarget::band_edge_low()};
    EnsembleOptions opt;
    opt.workers = workers;
    const auto r400 = run_ensemble(specs, ts, 400, opt);
    const auto r800 = run_ensemble(specs, ts, 800, opt);
    int pass_cells = 0;
    for (std::size_t i = 0; i < specs.size(); ++i) {
        const double d =
            std::abs(std::log(r800.stats[i].gamma_typ) - std::log(r400.stats[i].gamma_typ));
        const double se = r400.stats[i].ln_gamma_std / std::sqrt(400.0);
        if (d < 3.0 * se) ++pass_cells;
    }
    gate("criterion 10d", pass_cells >= static_cast<int>(0.95 * specs.size()),
         fmt("doubling realizations within 3 SE in %d/%zu cells (want >= 95%%)", pass_cells,
             specs.size()));
}

// ------------------------------------------------------ module property gates

void properties(const Master& m) {
    // ordered chains: xi_phi grows with N; disordered xi_phi saturates
    const auto& strong = target_of(m, 0);
    auto xiphi_at = [&](double w, int n) -> std::optional<double> {
        for (const auto& xr : strong.xi_phi_rows)
            if (xr.w == w && xr.n == n) return xr.xi_phi_typ;
        return std::nullopt;
    };
    const auto o100 = xiphi_at(0.0, 100), o400 = xiphi_at(0.0, 400);
    const bool ordered_ok = o100 && o400 && (*o400 / *o100 > 3.0);
    const auto d200 = xiphi_at(0.3, 200), d400 = xiphi_at(0.3, 400);
    const bool sat_ok = d200 && d400 && (*d400 / *d200 < 1.15);
    gate("property P1", ordered_ok && sat_ok,
         fmt("xi_phi: ordered grows with N (x%.2f from 100 to 400, want > 3); W=0.3 saturates "
             "(ratio %.3f over 200->400, want < 1.15)",
             (o100 && o400) ? *o400 / *o100 : 0.0, (d200 && d400) ? *d400 / *d200 : 0.0));

    // boundary-radiation prediction within 20% of the measured slope
    bool pred_ok = !strong.predict_rows.empty();
    std::string detail;
    for (const auto& pr : strong.predict_rows) {
        const double rel = std::abs(pr.predicted_slope / pr.measured_slope - 1.0);
        pred_ok &= rel <= 0.2;
        detail += fmt("W=%g: pred %.4f vs meas %.4f (%.0f%%) ", pr.w, pr.predicted_slope,
                      pr.measured_slope, 100 * rel);
    }
    gate("property P2", pred_ok,
         "typical-rate exponent slope vs measurement: " + detail + "(want within 20%)");
}

}  // namespace

int main() {
    const int workers = env_int("SUBRAD_WORKERS", 0);
    const int n_real = env_int("SUBRAD_ACCEPT_REALIZATIONS", 1000);
    const char* out_env = std::getenv("SUBRAD_ACCEPT_OUT");
    const fs::path out_dir = out_env ? fs::path(out_env) : fs::path("acceptance_out");

    std::printf("acceptance: %d realizations, output under %s\n", n_real,
                out_dir.string().c_str());
    std::fflush(stdout);

    criterion_1();
    criterion_2();

    // master ensemble over the full grid
    Json doc = default_config_json();
    doc["grid"]["sizes"] = {4,  6,  8,  10, 12, 16, 20,  25,  30,  40,
                            50, 60, 80, 100, 125, 150, 200, 250, 300, 400};
    doc["grid"]["disorders"] = {0.0, 0.02, 0.035, 0.06, 0.1, 0.2, 0.3, 0.4, 0.6, 0.8};
    doc["targets"] = Json::array();
    doc["targets"].push_back({{"kind", "band_edge_low"}, {"selector", "nearest_k"}});
    doc["targets"].push_back({{"kind", "fixed_k"}, {"k_over_pi", 0.75}, {"selector", "nearest_omega"}});
    doc["targets"].push_back({{"kind", "fixed_k"}, {"k_over_pi", 0.48}, {"selector", "nearest_omega"}});
    doc["ensemble"]["n_realizations"] = n_real;
    doc["ensemble"]["workers"] = workers;
    doc["analysis"]["summary_targets"] = {0, 1};
    doc["output"]["dir"] = out_dir.string();

    Master m;
    m.config = parse_config(doc);

    std::atomic<long> last_pct{-1};
    const PipelineResult pipe = run_configured_ensemble(m.config, [&](long done, long total) {
        const long pct = (100 * done) / std::max(1L, total);
        long expected = last_pct.load();
        if (pct > expected && last_pct.compare_exchange_strong(expected, pct)) {
            std::fprintf(stderr, "\rmaster ensemble: %ld%%  ", pct);
            std::fflush(stderr);
        }
    });
    std::fprintf(stderr, "\rmaster ensemble: done\n");

    m.stats = pipe.stats;
    m.rows = ensemble_rows(pipe);
    const auto modes = mode_rows(pipe, m.config.targets);
    m.analysis = analyze(m.config, m.rows, modes);

    // persist the run for inspection and figure data
    fs::create_directories(out_dir);
    write_file(out_dir / "ensemble.csv", ensemble_csv(pipe.stats, m.config.targets));
    write_sidecar(out_dir / "ensemble.csv", m.config);
    EnsembleResult as_result;
    as_result.stats = pipe.stats;
    as_result.summaries = pipe.summaries;
    write_file(out_dir / "modes.csv", modes_csv(as_result, pipe.specs, m.config.targets));
    write_sidecar(out_dir / "modes.csv", m.config);
    write_analysis_files(m.config, m.analysis, out_dir);

    criterion_3(m);
    criterion_4(m);
    criterion_5(m);
    criterion_6(m);
    criterion_7(m);
    criterion_8(m);
    criterion_9(m);
    criterion_10(workers);
    properties(m);

    if (g_failures == 0)
        std::printf("acceptance: all criteria PASS\n");
    else
        std::printf("acceptance: %d gate(s) FAILED\n", g_failures);
    return g_failures == 0 ? 0 : 1;
}
