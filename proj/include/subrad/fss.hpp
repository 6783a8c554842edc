// fss.hpp — finite-size-scaling data collapse. Estimates (W_c, nu) for the
// scaling form N/xi = F[N (W - W_c)^nu] by minimizing a total-variation
// collapse cost (0 = perfect collapse) over a coarse grid followed by
// Nelder-Mead refinement, with bootstrap uncertainties over disorder columns.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "subrad/rng.hpp"

namespace subrad {

struct CollapsePoint {
    double n = 0.0;  // system size
    double w = 0.0;  // disorder strength
    double y = 0.0;  // scaled observable N/xi, > 0
};

// Total variation of y along the x-sorted point set, over the y-range, minus
// one; zero iff y is monotonic along x = N (W - W_c)^nu.
inline double cost_function(const std::vector<CollapsePoint>& points, double w_c, double nu) {
    if (points.size() < 3) throw std::invalid_argument("cost_function: need at least 3 points");
    std::vector<std::pair<double, double>> xy;
    xy.reserve(points.size());
    for (const auto& p : points) {
        if (!(p.w > w_c))
            throw std::domain_error("cost_function: all disorder values must exceed w_c");
        xy.emplace_back(p.n * std::pow(p.w - w_c, nu), p.y);
    }
    std::sort(xy.begin(), xy.end());
    double tv = 0.0, lo = xy.front().second, hi = lo;
    for (std::size_t i = 1; i < xy.size(); ++i) {
        tv += std::abs(xy[i].second - xy[i - 1].second);
        lo = std::min(lo, xy[i].second);
        hi = std::max(hi, xy[i].second);
    }
    if (!(hi > lo)) throw std::runtime_error("cost_function: zero y-range (degenerate)");
    return tv / (hi - lo) - 1.0;
}

struct CollapseResult {
    double w_c = 0.0;
    double nu = 0.0;
    double cost = 0.0;
    std::vector<std::pair<double, double>> master_curve;  // (x, y) sorted by x
    double w_c_err = 0.0;  // bootstrap half-widths
    double nu_err = 0.0;
    bool boundary_hit = false;  // optimizer stopped on the search box edge
    bool no_collapse = false;   // cost above the configured threshold
};

struct CollapseOptions {
    std::array<double, 2> wc_box{-0.05, 0.1};
    std::array<double, 2> nu_box{0.5, 3.0};
    int grid = 41;
    int bootstrap_resamples = 100;
    std::uint64_t bootstrap_seed = 0x5EEDC0117A75Eull;
    double no_collapse_cost = 1.0;
};

namespace detail {

inline double safe_cost(const std::vector<CollapsePoint>& points, double w_c, double nu) {
    double w_min = 1e300;
    for (const auto& p : points) w_min = std::min(w_min, p.w);
    if (w_c >= w_min) return std::numeric_limits<double>::infinity();
    return cost_function(points, w_c, nu);
}

// Deterministic 2D Nelder-Mead with box projection.
inline std::array<double, 2> nelder_mead_2d(const std::function<double(double, double)>& f,
                                            std::array<double, 2> start,
                                            std::array<double, 2> step,
                                            const std::array<double, 2>& lo,
                                            const std::array<double, 2>& hi, int max_iters,
                                            bool* hit_boundary) {
    using P = std::array<double, 2>;
    auto clamp = [&](P p) {
        p[0] = std::clamp(p[0], lo[0], hi[0]);
        p[1] = std::clamp(p[1], lo[1], hi[1]);
        return p;
    };
    std::array<P, 3> v{clamp(start), clamp({start[0] + step[0], start[1]}),
                       clamp({start[0], start[1] + step[1]})};
    std::array<double, 3> fv{f(v[0][0], v[0][1]), f(v[1][0], v[1][1]), f(v[2][0], v[2][1])};

    for (int it = 0; it < max_iters; ++it) {
        std::array<int, 3> idx{0, 1, 2};
        std::sort(idx.begin(), idx.end(), [&](int a, int b) { return fv[a] < fv[b]; });
        const P &best = v[idx[0]], &worst = v[idx[2]];
        if (std::abs(fv[idx[2]] - fv[idx[0]]) < 1e-12 &&
            std::hypot(worst[0] - best[0], worst[1] - best[1]) < 1e-10)
            break;
        const P mid{0.5 * (v[idx[0]][0] + v[idx[1]][0]), 0.5 * (v[idx[0]][1] + v[idx[1]][1])};
        auto blend = [&](double t) {
            return clamp(P{mid[0] + t * (mid[0] - worst[0]), mid[1] + t * (mid[1] - worst[1])});
        };
        const P refl = blend(1.0);
        const double fr = f(refl[0], refl[1]);
        if (fr < fv[idx[0]]) {
            const P exp_ = blend(2.0);
            const double fe = f(exp_[0], exp_[1]);
            if (fe < fr) {
                v[idx[2]] = exp_;
                fv[idx[2]] = fe;
            } else {
                v[idx[2]] = refl;
                fv[idx[2]] = fr;
            }
        } else if (fr < fv[idx[1]]) {
            v[idx[2]] = refl;
            fv[idx[2]] = fr;
        } else {
            const P con = blend(-0.5);
            const double fc = f(con[0], con[1]);
            if (fc < fv[idx[2]]) {
                v[idx[2]] = con;
                fv[idx[2]] = fc;
            } else {  // shrink toward best
                for (int j : {idx[1], idx[2]}) {
                    v[j] = clamp(P{0.5 * (v[j][0] + best[0]), 0.5 * (v[j][1] + best[1])});
                    fv[j] = f(v[j][0], v[j][1]);
                }
            }
        }
    }
    int ib = 0;
    for (int j = 1; j < 3; ++j)
        if (fv[j] < fv[ib]) ib = j;
    if (hit_boundary) {
        const double tol_w = 1e-9 * (hi[0] - lo[0]), tol_n = 1e-9 * (hi[1] - lo[1]);
        *hit_boundary = std::abs(v[ib][0] - lo[0]) < tol_w || std::abs(v[ib][0] - hi[0]) < tol_w ||
                        std::abs(v[ib][1] - lo[1]) < tol_n || std::abs(v[ib][1] - hi[1]) < tol_n;
    }
    return v[ib];
}

// Grid scan; averages the positions of all cells tying with the best cost
// (flat valleys are centered instead of edge-picked).
inline std::array<double, 2> grid_search(const std::vector<CollapsePoint>& points,
                                         const CollapseOptions& opt) {
    double best = std::numeric_limits<double>::infinity();
    std::vector<std::array<double, 2>> ties;
    for (int i = 0; i < opt.grid; ++i) {
        const double wc =
            opt.wc_box[0] + (opt.wc_box[1] - opt.wc_box[0]) * i / static_cast<double>(opt.grid - 1);
        for (int j = 0; j < opt.grid; ++j) {
            const double nu = opt.nu_box[0] +
                              (opt.nu_box[1] - opt.nu_box[0]) * j / static_cast<double>(opt.grid - 1);
            const double c = safe_cost(points, wc, nu);
            if (c < best - 1e-12) {
                best = c;
                ties.clear();
                ties.push_back({wc, nu});
            } else if (c <= best + 1e-12) {
                ties.push_back({wc, nu});
            }
        }
    }
    if (ties.empty() || !std::isfinite(best))
        throw std::runtime_error("collapse: no admissible (w_c, nu) grid cell");
    std::array<double, 2> c{0.0, 0.0};
    for (const auto& t : ties) {
        c[0] += t[0];
        c[1] += t[1];
    }
    c[0] /= static_cast<double>(ties.size());
    c[1] /= static_cast<double>(ties.size());
    return c;
}

}  // namespace detail

// Full collapse: coarse grid + simplex refinement + bootstrap over disorder
// columns (xi values within one W column share realizations, so columns are
// the exchangeable unit).
inline CollapseResult collapse(const std::vector<CollapsePoint>& points,
                               const CollapseOptions& opt = {}) {
    std::vector<double> ws;
    std::vector<double> ns;
    for (const auto& p : points) {
        ws.push_back(p.w);
        ns.push_back(p.n);
    }
    std::sort(ws.begin(), ws.end());
    ws.erase(std::unique(ws.begin(), ws.end()), ws.end());
    std::sort(ns.begin(), ns.end());
    ns.erase(std::unique(ns.begin(), ns.end()), ns.end());
    if (ns.size() < 3 || ws.size() < 5)
        throw std::invalid_argument("collapse: need >= 3 sizes and >= 5 disorder values");

    auto optimize = [&](const std::vector<CollapsePoint>& pts,
                        std::array<double, 2> start, bool* hit) {
        auto f = [&pts](double wc, double nu) { return detail::safe_cost(pts, wc, nu); };
        const std::array<double, 2> step{0.02 * (opt.wc_box[1] - opt.wc_box[0]),
                                         0.02 * (opt.nu_box[1] - opt.nu_box[0])};
        return detail::nelder_mead_2d(f, start, step, {opt.wc_box[0], opt.nu_box[0]},
                                      {opt.wc_box[1], opt.nu_box[1]}, 400, hit);
    };

    CollapseResult res;
    const auto coarse = detail::grid_search(points, opt);
    bool hit = false;
    const auto best = optimize(points, coarse, &hit);
    res.w_c = best[0];
    res.nu = best[1];
    res.cost = detail::safe_cost(points, res.w_c, res.nu);
    res.boundary_hit = hit;
    res.no_collapse = !(res.cost < opt.no_collapse_cost);

    res.master_curve.reserve(points.size());
    for (const auto& p : points)
        res.master_curve.emplace_back(p.n * std::pow(p.w - res.w_c, res.nu), p.y);
    std::sort(res.master_curve.begin(), res.master_curve.end());

    // Bootstrap: resample W columns with replacement, refine from the
    // full-data optimum, spread of the re-fits = half-widths.
    if (opt.bootstrap_resamples > 0) {
        const CounterRng rng(opt.bootstrap_seed, 0);
        std::vector<double> wcs, nus;
        std::uint64_t ctr = 0;
        for (int b = 0; b < opt.bootstrap_resamples; ++b) {
            std::vector<double> chosen;
            for (std::size_t j = 0; j < ws.size(); ++j) {
                const auto pick = static_cast<std::size_t>(rng.uniform01(ctr++) * ws.size());
                chosen.push_back(ws[std::min(pick, ws.size() - 1)]);
            }
            std::vector<CollapsePoint> pts;
            for (double w : chosen)
                for (const auto& p : points)
                    if (p.w == w) pts.push_back(p);
            double n_distinct = 0;
            std::vector<double> cw = chosen;
            std::sort(cw.begin(), cw.end());
            cw.erase(std::unique(cw.begin(), cw.end()), cw.end());
            n_distinct = static_cast<double>(cw.size());
            if (n_distinct < 3) continue;
            try {
                const auto rb = optimize(pts, best, nullptr);
                wcs.push_back(rb[0]);
                nus.push_back(rb[1]);
            } catch (const std::exception&) {
                // degenerate resample; skip
            }
        }
        auto half_width = [](std::vector<double>& v) {
            if (v.size() < 2) return 0.0;
            double m = 0;
            for (double x : v) m += x;
            m /= static_cast<double>(v.size());
            double s2 = 0;
            for (double x : v) s2 += (x - m) * (x - m);
            return std::sqrt(s2 / static_cast<double>(v.size() - 1));
        };
        res.w_c_err = half_width(wcs);
        res.nu_err = half_width(nus);
    }
    return res;
}

// ------------------------------------------------------ collapse comparison

struct CompareReport {
    double scale_x = 1.0;  // multiplicative rescaling applied to b
    double scale_y = 1.0;
    double residual_rms = 0.0;  // in log y over the overlapping range
};

// Fits one multiplicative rescaling of b's master curve onto a's by least
// squares in log coordinates over the overlapping x-range.
inline CompareReport compare_collapse(const std::vector<std::pair<double, double>>& a,
                                      const std::vector<std::pair<double, double>>& b) {
    if (a.size() < 2 || b.size() < 2)
        throw std::invalid_argument("compare_collapse: need at least 2 points per curve");
    std::vector<std::pair<double, double>> la, lb;  // (ln x, ln y), positive entries only
    for (const auto& [x, y] : a)
        if (x > 0 && y > 0) la.emplace_back(std::log(x), std::log(y));
    for (const auto& [x, y] : b)
        if (x > 0 && y > 0) lb.emplace_back(std::log(x), std::log(y));
    std::sort(la.begin(), la.end());
    std::sort(lb.begin(), lb.end());
    if (la.size() < 2 || lb.size() < 2)
        throw std::invalid_argument("compare_collapse: curves need positive (x, y)");

    auto interp_a = [&](double lx) {
        auto it = std::lower_bound(la.begin(), la.end(), std::make_pair(lx, -1e300));
        if (it == la.begin() || it == la.end()) return std::numeric_limits<double>::quiet_NaN();
        const auto& [x1, y1] = *(it - 1);
        const auto& [x2, y2] = *it;
        return x2 > x1 ? y1 + (y2 - y1) * (lx - x1) / (x2 - x1) : y1;
    };

    // For a given shift u = ln scale_x, the optimal ln scale_y is the mean
    // residual; scan u then golden-section refine.
    auto objective = [&](double u, double* v_out, int* n_out) {
        double sum = 0.0;
        int n = 0;
        for (const auto& [lx, ly] : lb) {
            const double ya = interp_a(lx + u);
            if (std::isnan(ya)) continue;
            sum += ya - ly;
            ++n;
        }
        if (n < 2) {
            if (n_out) *n_out = n;
            return std::numeric_limits<double>::infinity();
        }
        const double v = sum / n;
        double sse = 0.0;
        for (const auto& [lx, ly] : lb) {
            const double ya = interp_a(lx + u);
            if (std::isnan(ya)) continue;
            const double e = ya - (ly + v);
            sse += e * e;
        }
        if (v_out) *v_out = v;
        if (n_out) *n_out = n;
        return sse / n;
    };

    const double span = (la.back().first - la.front().first) + (lb.back().first - lb.front().first);
    double best_u = 0.0, best_f = std::numeric_limits<double>::infinity();
    bool any = false;
    for (int i = 0; i <= 200; ++i) {
        const double u = -span + 2.0 * span * i / 200.0;
        int n = 0;
        const double fu = objective(u, nullptr, &n);
        if (n >= 2 && fu < best_f) {
            best_f = fu;
            best_u = u;
            any = true;
        }
    }
    if (!any) throw std::runtime_error("compare_collapse: disjoint x-ranges");
    // golden-section around the best grid cell
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double lo = best_u - 2.0 * span / 200.0, hi = best_u + 2.0 * span / 200.0;
    double c = hi - gr * (hi - lo), d = lo + gr * (hi - lo);
    double fc = objective(c, nullptr, nullptr), fd = objective(d, nullptr, nullptr);
    for (int it = 0; it < 60; ++it) {
        if (fc < fd) {
            hi = d;
            d = c;
            fd = fc;
            c = hi - gr * (hi - lo);
            fc = objective(c, nullptr, nullptr);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + gr * (hi - lo);
            fd = objective(d, nullptr, nullptr);
        }
    }
    const double u = 0.5 * (lo + hi);
    double v = 0.0;
    int n = 0;
    const double mse = objective(u, &v, &n);
    if (!std::isfinite(mse)) throw std::runtime_error("compare_collapse: disjoint x-ranges");

    CompareReport rep;
    rep.scale_x = std::exp(u);
    rep.scale_y = std::exp(v);
    rep.residual_rms = std::sqrt(mse);
    return rep;
}

}  // namespace subrad
