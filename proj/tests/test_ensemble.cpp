#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "subrad/ensemble.hpp"
#include "subrad/formats.hpp"

using namespace subrad;
using std::numbers::pi;

TEST_CASE("typical value definition") {
    const double e1 = std::exp(-1.0), e3 = std::exp(-3.0);
    CHECK(typical(std::vector<double>{e1, e3}) == doctest::Approx(std::exp(-2.0)).epsilon(1e-14));
    CHECK(typical(std::vector<double>{0.37, 0.37, 0.37}) == 0.37);  // exact
    CHECK(typical(std::vector<double>{1.0, 4.0}) == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("typical rejects non-positive data naming the index") {
    try {
        typical(std::vector<double>{1.0, 0.0, 2.0});
        FAIL("expected DataError");
    } catch (const DataError& e) {
        CHECK(std::string(e.what()).find("1") != std::string::npos);
    }
    CHECK_THROWS_AS(typical(std::vector<double>{}), std::invalid_argument);
}

TEST_CASE("zero disorder: typ equals avg equals the ordered value, zero spread") {
    const ChainSpec spec(2, 0.5 * pi, 0.0, 1.0, 10);
    const auto res =
        run_ensemble({spec}, {ModeTarget::band_edge_low()}, 5, EnsembleOptions{.workers = 1});
    REQUIRE(res.stats.size() == 1);
    const auto& st = res.stats[0];
    CHECK(st.gamma_typ == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(st.gamma_typ == st.gamma_avg);
    CHECK(st.ln_gamma_std == 0.0);
    CHECK(st.n_failed == 0);
}

TEST_CASE("worker count does not change a single byte") {
    std::vector<ChainSpec> specs;
    for (int n : {16, 24}) specs.emplace_back(n, 0.5 * pi, 0.2, 1.0, 20260808);
    const std::vector<ModeTarget> targets{ModeTarget::band_edge_low(),
                                          ModeTarget::fixed(0.75 * pi)};
    EnsembleOptions a{.workers = 1, .collect_summaries = true};
    EnsembleOptions b{.workers = 3, .collect_summaries = true};
    const auto ra = run_ensemble(specs, targets, 40, a);
    const auto rb = run_ensemble(specs, targets, 40, b);
    CHECK(ensemble_csv(ra.stats, targets) == ensemble_csv(rb.stats, targets));
    CHECK(modes_csv(ra, specs, targets) == modes_csv(rb, specs, targets));
}

TEST_CASE("AM-GM inequality in every cell") {
    std::vector<ChainSpec> specs;
    for (int n : {10, 20})
        for (double w : {0.1, 0.4}) specs.emplace_back(n, 0.5 * pi, w, 1.0, 4);
    const auto res = run_ensemble(specs, {ModeTarget::band_edge_low(), ModeTarget::fixed(0.6 * pi)},
                                  50, EnsembleOptions{.workers = 2});
    for (const auto& st : res.stats) {
        CHECK(st.gamma_typ <= st.gamma_avg * (1.0 + 1e-12));
        CHECK(st.gamma_typ > 0.0);
    }
}

TEST_CASE("disorder suppresses the typical band-edge rate") {
    const int n = 60;
    const ChainSpec spec(n, 0.5 * pi, 0.4, 1.0, 77);
    const auto res =
        run_ensemble({spec}, {ModeTarget::band_edge_low()}, 60, EnsembleOptions{.workers = 2});
    // ordered reference
    const ChainSpec ord(n, 0.5 * pi, 0.0, 1.0, 0);
    const auto ref =
        run_ensemble({ord}, {ModeTarget::band_edge_low()}, 1, EnsembleOptions{.workers = 1});
    CHECK(res.stats[0].gamma_typ < ref.stats[0].gamma_typ);
}

TEST_CASE("summaries carry normalized localization data") {
    const ChainSpec spec(30, 0.5 * pi, 0.3, 1.0, 8);
    EnsembleOptions opt{.workers = 2, .collect_summaries = true};
    const auto res = run_ensemble({spec}, {ModeTarget::band_edge_low()}, 25, opt);
    REQUIRE(res.summaries.size() == 1);
    REQUIRE(res.summaries[0].size() == 25);
    for (const auto& ms : res.summaries[0]) {
        CHECK(ms.gamma > 0.0);
        CHECK(ms.xi_phi >= 1.0);
        CHECK(ms.xi_phi <= 30.0);
        CHECK(ms.x0 >= 1.0);
        CHECK(ms.x0 <= 30.0);
        CHECK(ms.p_left > 0.0);
        CHECK(ms.p_right > 0.0);
        CHECK(ms.k_est > 0.0);
        CHECK(ms.k_est < pi);
    }
}

TEST_CASE("boundary-identity Gamma agrees with the eigensolver where both resolve") {
    // validates the tridiagonal inverse-iteration eigenvector tails
    const ChainSpec spec(48, 0.5 * pi, 0.35, 1.0, 15);
    for (long idx = 0; idx < 4; ++idx) {
        const auto real = build_positions(spec, sample_offsets(spec, idx), idx);
        const auto h = build_h_eff(real, 1.0, spec.phi);
        const auto tri = build_h_inv(real, 1.0, spec.phi);
        const auto eig = eig_dense(h.entries, false);
        for (int i = 0; i < spec.n_qubits; ++i) {
            const double geig = -eig.values(i).imag();
            if (geig < 1e-9 || geig > 1e-3) continue;
            const auto tv = tridiagonal_eigenvector(tri.diag, tri.offdiag, 1.0 / eig.values(i),
                                                    spec.master_seed, static_cast<std::uint64_t>(i));
            REQUIRE(tv.residual < 1e-9);
            const auto& v = tv.v;
            const double bp = std::norm(v(0)) + std::norm(v(spec.n_qubits - 1));
            const double gbd = boundary_gamma(bp, eig.values(i).real(), 1.0);
            CHECK(gbd == doctest::Approx(geig).epsilon(1e-6));
        }
    }
}
