#include "heisbcp/bcp_check.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "heisbcp/parallel.hpp"
#include "json.hpp"
#include "json_num.hpp"

namespace heis {

namespace {

constexpr double kMarginTol = 1e-9;   // certification / witness threshold
constexpr double kEigenTol = 1e-6;    // Hessian eigenvalue dead-band

struct GridPoint {
    Vec2 v;
    double frac;
    double theta;
};

// Stratified radial x angular grid: angles offset off the axes, radial
// fractions geometrically refined toward 0 and toward the boundary of K.
std::vector<GridPoint> make_grid(const Domain& dom, int radial, int angular, double f_min) {
    std::vector<GridPoint> pts;
    pts.reserve(static_cast<std::size_t>(radial) * angular);
    const double f_edge = 1e-6;  // distance-to-boundary floor (as a fraction)
    for (int j = 0; j < angular; ++j) {
        const double theta = 2.0 * M_PI * (j + 0.5) / angular;
        const Vec2 nu(std::cos(theta), std::sin(theta));
        const double rhat = dom.support_radius(nu);
        for (int i = 0; i < radial; ++i) {
            const double u = (i + 0.5) / radial;
            double f;
            if (u < 0.5)
                f = f_min * std::pow(0.5 / f_min, 2.0 * u);
            else
                f = 1.0 - f_edge * std::pow(0.5 / f_edge, 2.0 * (1.0 - u));
            pts.push_back({(f * rhat) * nu, f, theta});
        }
    }
    return pts;
}

double fit_loglog_slope(const std::vector<std::pair<double, double>>& xy) {
    // least squares slope of log(y) against log(x); caller filters y > 0
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(xy.size());
    for (const auto& [x, y] : xy) {
        const double lx = std::log(x), ly = std::log(y);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double den = n * sxx - sx * sx;
    if (den == 0.0) return 0.0;
    return (n * sxy - sx * sy) / den;
}

void finalize_grid_meta(GridMeta& g) {
    g.skip_flagged = g.total > 0 && g.skipped > g.total / 20;
}

void cap_witnesses(CheckReport& rep, std::size_t limit = 100) {
    if (rep.witnesses.size() > limit) {
        const std::size_t dropped = rep.witnesses.size() - limit;
        rep.witnesses.resize(limit);
        if (!rep.note.empty()) rep.note += "; ";
        rep.note += std::to_string(dropped) + " further witnesses omitted";
    }
}

}  // namespace

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::BcpCertifiedSufficient: return "BCP_CERTIFIED_SUFFICIENT";
        case Verdict::NonBcpNecessaryViolation: return "NONBCP_NECESSARY_VIOLATION";
        case Verdict::Inconclusive: return "INCONCLUSIVE";
    }
    return "INCONCLUSIVE";
}

namespace {

// max over unit w with angle(v,w) <= alpha of <g, w>. With beta the unoriented
// angle between v and g this is |g| for beta <= alpha and |g| cos(beta - alpha)
// otherwise; computed from dot and omega directly since arccos is badly
// conditioned near (anti)parallel v, g.
double cone_max_inner(Vec2 v, Vec2 g, double alpha) {
    const double ng = g.norm();
    if (ng == 0.0) return 0.0;
    const double c = dot(v, g);               // |v||g| cos(beta)
    const double s = std::abs(omega(v, g));   // |v||g| sin(beta)
    if (std::atan2(s, c) <= alpha) return ng;
    // |g| cos(beta - alpha) = |g| (cos(beta)cos(alpha) + sin(beta)sin(alpha))
    return (c * std::cos(alpha) + s * std::sin(alpha)) / v.norm();
}

}  // namespace

double cone_margin(const Profile& p, Vec2 v, double alpha_cone) {
    if (!(alpha_cone > 0.0 && alpha_cone < M_PI / 2))
        throw std::invalid_argument("cone_margin: alpha must lie in (0, pi/2)");
    const double nv = v.norm();
    if (nv == 0.0) throw std::domain_error("cone_margin: v must be nonzero");
    return cone_max_inner(v, p.grad(v), alpha_cone) / nv;
}

CheckReport sufficient_check(const Profile& p) {
    const auto grid = default_alpha_grid();
    return sufficient_check(p, grid);
}

CheckReport sufficient_check(const Profile& p, std::span<const double> alpha_grid,
                             int radial_grid, int angular_grid, std::uint64_t seed) {
    if (alpha_grid.empty() || radial_grid < 1 || angular_grid < 1)
        throw std::invalid_argument("sufficient_check: grids must be nonempty");
    CheckReport rep;
    rep.profile = p.name();
    rep.check = "sufficient";
    rep.checks_run = {"sufficient"};
    rep.grid = {radial_grid, angular_grid, seed, 0, 0, false};

    const auto pts = make_grid(p.domain(), radial_grid, angular_grid, 1e-6);
    rep.grid.total = static_cast<int>(pts.size());

    struct PointGrad {
        bool ok = false;
        Vec2 v;
        Vec2 g;
    };
    std::vector<PointGrad> per_point(pts.size());
    parallel_for(pts.size(), [&](std::size_t i) {
        try {
            per_point[i] = {true, pts[i].v, p.grad(pts[i].v)};
        } catch (const std::exception&) {
            per_point[i].ok = false;
        }
    });

    double best_m = -std::numeric_limits<double>::infinity();
    double best_alpha = alpha_grid[0];
    for (const double alpha : alpha_grid) {
        double worst = -std::numeric_limits<double>::infinity();
        for (const auto& pm : per_point) {
            if (!pm.ok) continue;
            worst = std::max(worst, cone_max_inner(pm.v, pm.g, alpha) / pm.v.norm());
        }
        const double m_alpha = -worst;
        if (m_alpha > best_m) {
            best_m = m_alpha;
            best_alpha = alpha;
        }
    }
    rep.grid.skipped = static_cast<int>(
        std::count_if(per_point.begin(), per_point.end(), [](const auto& pm) { return !pm.ok; }));
    finalize_grid_meta(rep.grid);

    // Near-origin gradient bound: kappa is the largest candidate disc inside
    // int(K) where the ratio ||grad phi|| / ||v|| stays finite. Finitely many
    // samples are always finite, so boundedness additionally requires the
    // ratio not to blow up as s -> 0 (log-log slope fit, as in the rotational
    // check): ||grad phi|| <= M ||v|| demands a bounded sup, not a max.
    const double ir = p.domain().inradius();
    const double kappa_candidates[] = {0.5 * ir, 0.25 * ir, 0.1 * ir, 0.05 * ir};
    double kappa = 0.0;
    double M_hat = std::numeric_limits<double>::infinity();
    for (const double kc : kappa_candidates) {
        double worst_ratio = 0.0;
        bool failed = false;
        std::vector<std::pair<double, double>> ratios;
        const int levels = 48;
        for (int i = 0; i < levels && !failed; ++i) {
            const double s = kc * std::pow(1e-6, 1.0 - (i + 0.5) / levels);
            double level_worst = 0.0;
            for (int j = 0; j < angular_grid; ++j) {
                const double theta = 2.0 * M_PI * (j + 0.5) / angular_grid;
                const Vec2 v = s * Vec2(std::cos(theta), std::sin(theta));
                try {
                    const double ratio = p.grad(v).norm() / s;
                    if (!std::isfinite(ratio)) {
                        failed = true;
                        break;
                    }
                    level_worst = std::max(level_worst, ratio);
                } catch (const std::exception&) {
                    failed = true;
                    break;
                }
            }
            if (!failed) {
                worst_ratio = std::max(worst_ratio, level_worst);
                if (level_worst > 0.0) ratios.push_back({s, level_worst});
            }
        }
        if (failed) continue;
        if (ratios.size() >= 4) {
            const double slope = fit_loglog_slope(ratios);
            if (slope <= -0.2 && worst_ratio > 10.0) continue;  // ratio diverges at 0
        }
        kappa = kc;
        M_hat = worst_ratio;
        break;
    }

    SufficientParams params{best_m, best_alpha, kappa, M_hat};
    rep.params = params;
    if (best_m > kMarginTol && std::isfinite(M_hat)) {
        rep.verdict = Verdict::BcpCertifiedSufficient;
    } else {
        rep.verdict = Verdict::Inconclusive;
        rep.note = std::isfinite(M_hat)
                       ? "sufficient conditions not met on the sampled grid; this certifies nothing"
                       : "near-origin gradient ratio appears unbounded: the linear gradient "
                         "bound fails, so nothing is certified";
    }
    return rep;
}

CheckReport rotational_check(const Profile& p, int grid) {
    if (p.kind() != ProfileKind::Radial)
        throw std::invalid_argument("rotational_check requires a radial profile");
    if (grid < 8) throw std::invalid_argument("rotational_check: grid too small");
    CheckReport rep;
    rep.profile = p.name();
    rep.check = "rotational";
    rep.checks_run = {"rotational"};
    rep.grid = {grid, 1, 0, 0, 0, false};

    const double rd = p.domain().radius;

    // sup of phi'(s)/s over (0, r_d), geometric refinement toward both ends
    double sup_ratio = -std::numeric_limits<double>::infinity();
    double arg_sup = 0.0;
    const double f_min = 1e-6, f_edge = 1e-9;
    for (int i = 0; i < grid; ++i) {
        const double u = (i + 0.5) / grid;
        double f;
        if (u < 0.5)
            f = f_min * std::pow(0.5 / f_min, 2.0 * u);
        else
            f = 1.0 - f_edge * std::pow(0.5 / f_edge, 2.0 * (1.0 - u));
        const double s = f * rd;
        ++rep.grid.total;
        try {
            const double ratio = p.radial_derivative(s) / s;
            if (ratio > sup_ratio) {
                sup_ratio = ratio;
                arg_sup = s;
            }
        } catch (const std::exception&) {
            ++rep.grid.skipped;
        }
    }
    finalize_grid_meta(rep.grid);

    // regularity gate: |phi'(s)/s| essentially bounded near 0
    const double kappa = 0.05 * rd;
    std::vector<std::pair<double, double>> near0;
    double near0_sup = 0.0;
    for (int i = 0; i < 32; ++i) {
        const double s = kappa * std::pow(1e-5, 1.0 - (i + 0.5) / 32.0);
        try {
            const double a = std::abs(p.radial_derivative(s) / s);
            near0_sup = std::max(near0_sup, a);
            if (a > 0.0) near0.push_back({s, a});
        } catch (const std::exception&) {
            ++rep.grid.skipped;
        }
    }
    bool divergent = false;
    if (near0.size() >= 4) {
        const double slope = fit_loglog_slope(near0);
        // |phi'(s)/s| ~ s^slope near 0: a markedly negative exponent means blow-up
        divergent = slope <= -0.2 && near0_sup > 10.0;
    }

    if (divergent) {
        rep.verdict = Verdict::Inconclusive;
        rep.note = "near-origin ratio |phi'(s)/s| appears unbounded; the rotational "
                   "characterization does not apply";
        return rep;
    }

    SufficientParams params{-sup_ratio, M_PI / 4, kappa, near0_sup};
    rep.params = params;
    if (sup_ratio < -kMarginTol) {
        rep.verdict = Verdict::BcpCertifiedSufficient;
    } else {
        rep.verdict = Verdict::NonBcpNecessaryViolation;
        rep.witnesses.push_back({Vec2(arg_sup, 0.0), "radial_derivative_ratio", sup_ratio,
                                 "sup phi'(s)/s is not negative: no admissible margin constant"});
    }
    return rep;
}

CheckReport necessary_gradient_check(const Profile& p, int radial_grid, int angular_grid,
                                     std::uint64_t seed) {
    if (radial_grid < 1 || angular_grid < 1)
        throw std::invalid_argument("necessary_gradient_check: grids must be nonempty");
    CheckReport rep;
    rep.profile = p.name();
    rep.check = "necessary_gradient";
    rep.checks_run = {"necessary_gradient"};
    rep.grid = {radial_grid, angular_grid, seed, 0, 0, false};

    // Inner radial cutoff 0.05: every C^2 profile has <grad phi(w), w> = O(|w|^2),
    // so an absolute threshold is only meaningful away from the origin. The
    // near-origin regime is covered by origin_regularity_check / hessian_check.
    const auto pts = make_grid(p.domain(), radial_grid, angular_grid, 0.05);
    rep.grid.total = static_cast<int>(pts.size());

    struct PointOut {
        int status = 0;  // 0 skipped, 1 ok
        double radial_ip = 0.0;
        double lemma1 = 0.0, lemma2 = 0.0;
    };
    std::vector<PointOut> out(pts.size());
    parallel_for(pts.size(), [&](std::size_t i) {
        try {
            const Vec2 w = pts[i].v;
            const Vec2 g = p.grad(w);
            const Vec2 u = (1.0 / w.norm()) * w;
            PointOut o;
            o.status = 1;
            o.radial_ip = dot(g, w);
            o.lemma1 = dot(g, u) + 0.5 * omega(u, w);
            o.lemma2 = dot(g, u) - 0.5 * omega(u, w);
            out[i] = o;
        } catch (const std::exception&) {
            out[i].status = 0;
        }
    });

    int usable = 0, nonstrict = 0;
    std::vector<CheckWitness> ae_examples;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const auto& o = out[i];
        if (o.status == 0) {
            ++rep.grid.skipped;
            continue;
        }
        ++usable;
        const Vec2 w = pts[i].v;
        if (o.radial_ip > kMarginTol)
            rep.witnesses.push_back({w, "radial_inner_product", o.radial_ip,
                                     "<grad phi(w), w> > 0"});
        if (o.lemma1 > kMarginTol)
            rep.witnesses.push_back({w, "cone_inequality_plus", o.lemma1,
                                     "<grad phi(w), v> + omega(v,w)/2 > 0 for v = w/|w|"});
        if (o.lemma2 > kMarginTol)
            rep.witnesses.push_back({w, "cone_inequality_minus", o.lemma2,
                                     "<grad phi(w), v> - omega(v,w)/2 > 0 for v = w/|w|"});
        if (o.radial_ip >= -kMarginTol) {
            ++nonstrict;
            if (ae_examples.size() < 5)
                ae_examples.push_back({w, "ae_strictness", o.radial_ip,
                                       "<grad phi(w), w> not strictly negative"});
        }
    }
    finalize_grid_meta(rep.grid);
    cap_witnesses(rep);

    const double frac = usable > 0 ? static_cast<double>(nonstrict) / usable : 0.0;
    if (frac > 0.01) {
        rep.note = "strict negativity of <grad phi(w), w> fails on " +
                   std::to_string(nonstrict) + "/" + std::to_string(usable) +
                   " sampled points: positive-measure violation";
        for (auto& w : ae_examples) rep.witnesses.push_back(w);
    }
    rep.verdict = rep.witnesses.empty() ? Verdict::Inconclusive : Verdict::NonBcpNecessaryViolation;
    return rep;
}

CheckReport radial_monotone_check(const Profile& p, int directions, int steps) {
    if (directions < 2 || steps < 2)
        throw std::invalid_argument("radial_monotone_check: counts must be >= 2");
    CheckReport rep;
    rep.profile = p.name();
    rep.check = "radial_monotone";
    rep.checks_run = {"radial_monotone"};
    rep.grid = {steps, directions, 0, 0, 0, false};

    const double phi0 = p.eval(Vec2(0.0, 0.0));
    for (int j = 0; j < directions; ++j) {
        const double theta = 2.0 * M_PI * (j + 0.5) / directions;
        const Vec2 nu(std::cos(theta), std::sin(theta));
        const Vec2 w = p.domain().support_radius(nu) * nu;
        double prev = phi0;
        for (int k = 1; k <= steps; ++k) {
            const double t = static_cast<double>(k) / steps;
            ++rep.grid.total;
            double val;
            try {
                val = p.eval(t * w);
            } catch (const std::exception&) {
                ++rep.grid.skipped;
                continue;
            }
            if (val > prev + kMarginTol)
                rep.witnesses.push_back({t * w, "ray_monotonicity", val - prev,
                                         "phi increases along the ray t -> phi(t w)"});
            if (val > phi0 + kMarginTol)
                rep.witnesses.push_back({t * w, "max_at_origin", val - phi0,
                                         "phi exceeds phi(0)"});
            prev = val;
        }
    }
    finalize_grid_meta(rep.grid);
    rep.verdict = rep.witnesses.empty() ? Verdict::Inconclusive : Verdict::NonBcpNecessaryViolation;
    if (rep.witnesses.empty())
        rep.note = "profile is non-increasing along sampled rays with its maximum at 0 "
                   "(necessary only; certifies nothing)";
    cap_witnesses(rep);
    return rep;
}

CheckReport origin_regularity_check(const Profile& p) {
    const std::vector<double> h_grid = {0.1, 0.05, 0.02, 0.01, 0.005, 0.002, 0.001};
    return origin_regularity_check(p, h_grid);
}

CheckReport origin_regularity_check(const Profile& p, std::span<const double> h_grid) {
    if (h_grid.empty()) throw std::invalid_argument("origin_regularity_check: empty h grid");
    for (std::size_t i = 0; i + 1 < h_grid.size(); ++i)
        if (!(h_grid[i] > h_grid[i + 1]) || !(h_grid[i + 1] > 0.0))
            throw std::invalid_argument("origin_regularity_check: h grid must be positive decreasing");
    CheckReport rep;
    rep.profile = p.name();
    rep.check = "origin_regularity";
    rep.checks_run = {"origin_regularity"};
    const int dirs = 64;
    rep.grid = {static_cast<int>(h_grid.size()), dirs, 0, 0, 0, false};

    const double ir = p.domain().inradius();
    const double phi0 = p.eval(Vec2(0.0, 0.0));
    std::vector<std::pair<double, double>> usable;  // (h, R(h))
    Vec2 worst_dir(1.0, 0.0);
    for (const double h : h_grid) {
        if (!(h < 0.999 * ir)) continue;
        double R = 0.0;
        for (int j = 0; j < dirs; ++j) {
            const double theta = 2.0 * M_PI * (j + 0.5) / dirs;
            const Vec2 u(std::cos(theta), std::sin(theta));
            ++rep.grid.total;
            try {
                const double val = std::abs(p.eval(h * u) - phi0) / h;
                if (val > R) {
                    R = val;
                    worst_dir = u;
                }
            } catch (const std::exception&) {
                ++rep.grid.skipped;
            }
        }
        if (R > 0.0) usable.push_back({h, R});
    }
    finalize_grid_meta(rep.grid);

    if (usable.size() < 2) {
        rep.verdict = Verdict::Inconclusive;
        rep.note = "difference quotients vanish or too few usable scales; no evidence either way";
        return rep;
    }
    const double slope = fit_loglog_slope(usable);
    if (slope <= 0.1) {
        rep.verdict = Verdict::NonBcpNecessaryViolation;
        rep.witnesses.push_back({usable.back().second * worst_dir, "origin_differentiability", slope,
                                 "max difference quotient R(h) does not decay as h -> 0 "
                                 "(log-log slope <= 0.1): phi cannot be differentiable at 0 "
                                 "with vanishing gradient"});
    } else {
        rep.verdict = Verdict::Inconclusive;
        rep.note = "R(h) decays (log-log slope " + std::to_string(slope) +
                   "); consistent with differentiability at 0";
    }
    return rep;
}

namespace {

struct Sym2 {
    double xx = 0.0, yy = 0.0, xy = 0.0;
};

Sym2 fd_hessian(const Profile& p, double h) {
    const double f0 = p.eval(Vec2(0.0, 0.0));
    const double fpx = p.eval(Vec2(h, 0.0)), fmx = p.eval(Vec2(-h, 0.0));
    const double fpy = p.eval(Vec2(0.0, h)), fmy = p.eval(Vec2(0.0, -h));
    const double fpp = p.eval(Vec2(h, h)), fpm = p.eval(Vec2(h, -h));
    const double fmp = p.eval(Vec2(-h, h)), fmm = p.eval(Vec2(-h, -h));
    Sym2 H;
    H.xx = (fpx - 2.0 * f0 + fmx) / (h * h);
    H.yy = (fpy - 2.0 * f0 + fmy) / (h * h);
    H.xy = (fpp - fpm - fmp + fmm) / (4.0 * h * h);
    return H;
}

}  // namespace

CheckReport hessian_check(const Profile& p, double h, bool assume_c2,
                          bool assume_hessian_differentiable_at_0) {
    if (!assume_c2)
        throw std::invalid_argument(
            "hessian_check: requires the caller to assert C^2 regularity near the tested points");
    if (!(h > 1e-6 && h < 1e-2))
        throw std::invalid_argument("hessian_check: h must lie in (1e-6, 1e-2)");
    if (!(std::sqrt(2.0) * h < p.domain().inradius()))
        throw std::invalid_argument("hessian_check: stencil leaves the domain");

    CheckReport rep;
    rep.profile = p.name();
    rep.check = "hessian";
    rep.checks_run = {"hessian"};

    const Sym2 Dh = fd_hessian(p, h);
    const Sym2 Dh2 = fd_hessian(p, 0.5 * h);
    const Sym2 H{(4.0 * Dh2.xx - Dh.xx) / 3.0, (4.0 * Dh2.yy - Dh.yy) / 3.0,
                 (4.0 * Dh2.xy - Dh.xy) / 3.0};
    const double tr = H.xx + H.yy;
    const double disc = std::sqrt(std::max(0.0, (H.xx - H.yy) * (H.xx - H.yy) + 4.0 * H.xy * H.xy));
    const double l1 = 0.5 * (tr + disc);
    const double l2 = 0.5 * (tr - disc);
    rep.hessian_eigenvalues = {l1, l2};

    if (l1 > kEigenTol)
        rep.witnesses.push_back({Vec2(0.0, 0.0), "hessian_semidefinite", l1,
                                 "largest Hessian eigenvalue at 0 is positive"});
    else if (std::abs(l1) <= kEigenTol && assume_hessian_differentiable_at_0)
        rep.witnesses.push_back({Vec2(0.0, 0.0), "hessian_definite", l1,
                                 "Hessian at 0 is singular; definiteness fails under the asserted "
                                 "differentiability of the Hessian"});

    // strict radial condition at sampled C^2 points; the grid includes the axes
    int strict_total = 0, strict_skipped = 0;
    for (int j = 0; j < 16; ++j) {
        const double theta = j * M_PI / 8.0;
        const Vec2 nu(std::cos(theta), std::sin(theta));
        const double rhat = p.domain().support_radius(nu);
        for (int k = 1; k <= 9; ++k) {
            const Vec2 w = (0.1 * k * rhat) * nu;
            ++strict_total;
            try {
                const double val = dot(p.grad(w), w);
                if (val >= -kMarginTol)
                    rep.witnesses.push_back({w, "radial_strict", val,
                                             "<grad phi(w), w> is not strictly negative at a C^2 point"});
            } catch (const std::exception&) {
                ++strict_skipped;
            }
        }
    }
    rep.grid = {9, 16, 0, strict_skipped, strict_total, false};
    finalize_grid_meta(rep.grid);
    cap_witnesses(rep);

    rep.verdict = rep.witnesses.empty() ? Verdict::Inconclusive : Verdict::NonBcpNecessaryViolation;
    if (rep.witnesses.empty())
        rep.note = "Hessian at 0 is negative definite within tolerance and the strict radial "
                   "condition holds at sampled points";
    return rep;
}

namespace {

bool strip_eval(const Profile& p, const StripWitness& w, CheckReport& rep,
                std::vector<double>& gap_constants);

}  // namespace

bool strip_witness_check(const Profile& p, const StripWitness& w) {
    CheckReport rep;
    std::vector<double> gaps;
    return strip_eval(p, w, rep, gaps);
}

namespace {

bool strip_eval(const Profile& p, const StripWitness& w, CheckReport& rep,
                std::vector<double>& gap_constants) {
    if (std::abs(w.v.norm() - 1.0) > 1e-9)
        throw std::invalid_argument("strip witness: direction must be a unit vector");
    if (!(w.a > 0.0)) throw std::invalid_argument("strip witness: gap constant a must be positive");
    if (w.t_plus.empty() || w.t_plus.size() != w.t_minus.size())
        throw std::invalid_argument("strip witness: scale sequences must be nonempty and aligned");
    for (std::size_t n = 0; n < w.t_plus.size(); ++n) {
        if (!(w.t_plus[n] > 0.0) || !(w.t_minus[n] > 0.0))
            throw std::invalid_argument("strip witness: scales must be positive");
        if (n + 1 < w.t_plus.size() && !(w.t_plus[n] > w.t_plus[n + 1]))
            throw std::invalid_argument("strip witness: t_plus must be strictly decreasing");
    }
    if (!(w.T >= w.t_plus.front()))
        throw std::invalid_argument("strip witness: T must reach past the largest scale");

    const double rhat = p.domain().support_radius(w.v);
    const double T = std::min(w.T, rhat);
    for (std::size_t n = 0; n < w.t_plus.size(); ++n) {
        const double tp = w.t_plus[n], tm = w.t_minus[n];
        double ztop, zneg;
        try {
            ztop = p.eval(tp * w.v);
            zneg = p.eval((-tm) * w.v);
        } catch (const std::exception&) {
            rep.witnesses.push_back({tp * w.v, "strip_eval_failure", 0.0,
                                     "profile evaluation failed at a strip scale"});
            return false;
        }
        const double gap = ztop - zneg;
        gap_constants.push_back(-gap / (tp + tm));
        if (!(gap < -w.a * (tp + tm) - 1e-12)) {
            rep.witnesses.push_back({tp * w.v, "strip_gap", gap,
                                     "gap inequality phi(t+ v) - phi(-t- v) < -a (t+ + t-) fails"});
            return false;
        }
        const int grid = 256;
        for (int k = 0; k <= grid; ++k) {
            const double t = tp + (T - tp) * k / grid;
            double val;
            try {
                val = p.eval(t * w.v);
            } catch (const std::exception&) {
                continue;
            }
            if (val > ztop + 1e-12) {
                rep.witnesses.push_back({t * w.v, "strip_emptiness", val - ztop,
                                         "the strip above z = phi(t+ v) meets the ball"});
                return false;
            }
        }
    }
    return true;
}

}  // namespace

CheckReport strip_witness_report(const Profile& p, const StripWitness& w) {
    CheckReport rep;
    rep.profile = p.name();
    rep.check = "strip";
    rep.checks_run = {"strip"};

    std::vector<double> gap_constants;
    if (!strip_eval(p, w, rep, gap_constants)) {
        rep.verdict = Verdict::Inconclusive;
        rep.note = "strip witness rejected";
        return rep;
    }

    rep.note = "gap and emptiness hold at all listed scales (finite truncation)";
    bool stable = false;
    if (gap_constants.size() >= 3) {
        const auto last = gap_constants.end();
        const double a1 = *(last - 1), a2 = *(last - 2), a3 = *(last - 3);
        const double lo = std::min({a1, a2, a3}), hi = std::max({a1, a2, a3});
        stable = lo >= w.a && hi <= 1.1 * lo;
    }
    if (stable) {
        rep.verdict = Verdict::NonBcpNecessaryViolation;
        rep.witnesses.push_back({w.t_plus.back() * w.v, "strip_criterion", gap_constants.back(),
                                 "gap constant stable across the last three scales"});
        rep.note += "; gap constant stable across the last three scales";
    } else {
        rep.verdict = Verdict::Inconclusive;
        rep.note += "; gap constant not yet stable across scales";
    }
    return rep;
}

CheckReport verdict_aggregate(std::span<const CheckReport> reports) {
    if (reports.empty()) throw std::invalid_argument("verdict_aggregate: no reports");
    const std::string& profile = reports.front().profile;
    for (const auto& r : reports)
        if (r.profile != profile)
            throw std::invalid_argument("verdict_aggregate: reports concern different profiles");

    CheckReport out;
    out.profile = profile;
    out.check = "aggregate";
    bool any_nonbcp = false, any_cert = false;
    for (const auto& r : reports) {
        for (const auto& c : r.checks_run) out.checks_run.push_back(c);
        if (r.verdict == Verdict::NonBcpNecessaryViolation) {
            any_nonbcp = true;
            for (const auto& w : r.witnesses) out.witnesses.push_back(w);
        }
        if (r.verdict == Verdict::BcpCertifiedSufficient) {
            any_cert = true;
            if (!out.params) out.params = r.params;
        }
    }
    if (any_nonbcp && any_cert)
        throw VerdictConflictError(
            "verdict_aggregate: profile '" + profile +
            "' is both certified and witnessed non-BCP; the conditions are mutually exclusive, "
            "so tolerances or the implementation are wrong");
    out.verdict = any_nonbcp ? Verdict::NonBcpNecessaryViolation
                             : (any_cert ? Verdict::BcpCertifiedSufficient : Verdict::Inconclusive);
    return out;
}

std::string report_to_json(const CheckReport& r) {
    nlohmann::json j;
    j["profile"] = r.profile;
    j["check"] = r.check;
    j["verdict"] = to_string(r.verdict);
    if (r.params) {
        j["params"] = {{"m_hat", json_num(r.params->m_hat)},
                       {"alpha_cone", json_num(r.params->alpha_cone)},
                       {"kappa", json_num(r.params->kappa)},
                       {"M_hat", json_num(r.params->M_hat)}};
    }
    nlohmann::json ws = nlohmann::json::array();
    for (const auto& w : r.witnesses)
        ws.push_back({{"point", nlohmann::json::array({json_num(w.v.x), json_num(w.v.y)})},
                      {"condition", w.condition},
                      {"value", json_num(w.value)},
                      {"context", w.context}});
    j["witnesses"] = ws;
    j["grid"] = {{"radial", r.grid.radial},
                 {"angular", r.grid.angular},
                 {"seed", r.grid.seed},
                 {"skipped", r.grid.skipped},
                 {"total", r.grid.total},
                 {"skip_flagged", r.grid.skip_flagged}};
    j["checks_run"] = r.checks_run;
    if (r.hessian_eigenvalues)
        j["hessian_eigenvalues"] = nlohmann::json::array(
            {json_num((*r.hessian_eigenvalues)[0]), json_num((*r.hessian_eigenvalues)[1])});
    if (!r.note.empty()) j["note"] = r.note;
    return j.dump();
}

}  // namespace heis
