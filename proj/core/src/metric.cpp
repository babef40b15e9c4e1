#include "heisbcp/metric.hpp"

#include <cmath>
#include <stdexcept>

#include "json.hpp"
#include "json_num.hpp"
#include "rng.hpp"

namespace heis {

DistanceOracle DistanceOracle::gauge(Profile p, double tol, int max_iter) {
    if (!(tol > 0.0) || tol > 1e-6)
        throw std::invalid_argument("DistanceOracle: tol must lie in (0, 1e-6]");
    if (max_iter < 64) throw std::invalid_argument("DistanceOracle: max_iter must be >= 64");
    DistanceOracle o;
    o.name_ = p.name().empty() ? "gauge" : p.name();
    o.profile_ = std::move(p);
    o.tol_ = tol;
    o.max_iter_ = max_iter;
    return o;
}

DistanceOracle DistanceOracle::closed_form(const std::string& name, double param) {
    DistanceOracle o;
    o.name_ = name;
    o.param_ = param;
    if (name == "koranyi") {
        o.form_ = ClosedForm::Koranyi;
    } else if (name == "d_eps") {
        if (!(param > 0.0)) throw std::invalid_argument("closed_form d_eps: eps must be positive");
        o.form_ = ClosedForm::DEps;
    } else if (name == "d_inf") {
        o.form_ = ClosedForm::DInf;
    } else if (name == "rho_inf") {
        o.form_ = ClosedForm::RhoInf;
    } else {
        throw std::invalid_argument("no closed form for '" + name + "'");
    }
    return o;
}

const Profile& DistanceOracle::profile() const {
    if (!profile_) throw std::logic_error("DistanceOracle: no profile behind a closed form");
    return *profile_;
}

namespace {

double koranyi_norm(GroupPoint g) {
    const double n2 = g.v.norm2();
    return std::pow(n2 * n2 + 16.0 * g.z * g.z, 0.25);
}

double closed_norm(ClosedForm form, double param, GroupPoint g) {
    switch (form) {
        case ClosedForm::Koranyi: return koranyi_norm(g);
        case ClosedForm::DEps: {
            const double d0 = koranyi_norm(g);
            return std::sqrt(param * param * g.v.norm2() + d0 * d0);
        }
        case ClosedForm::DInf: return std::max(g.v.norm(), 2.0 * std::sqrt(std::abs(g.z)));
        case ClosedForm::RhoInf:
            return std::max({std::abs(g.v.x), std::abs(g.v.y), std::sqrt(2.0 * std::abs(g.z))});
        case ClosedForm::None: break;
    }
    throw std::logic_error("closed_norm: no form");
}

}  // namespace

double gauge_distance(const Profile& p, GroupPoint a, GroupPoint b, double tol, int max_iter) {
    const GroupPoint g = group_inv(a) * b;
    if (g.v.x == 0.0 && g.v.y == 0.0 && g.z == 0.0) return 0.0;

    const auto member = [&](double t) { return p.ball_contains(dilate(1.0 / t, g), 1e-12); };

    double lo, hi;
    if (member(1.0)) {
        hi = 1.0;
        lo = 0.5;
        int it = 0;
        while (member(lo)) {
            hi = lo;
            lo *= 0.5;
            if (++it > max_iter || lo < 1e-300) return 0.0;
        }
    } else {
        lo = 1.0;
        hi = 2.0;
        int it = 0;
        while (!member(hi)) {
            lo = hi;
            hi *= 2.0;
            if (++it > max_iter || hi > 1e300)
                throw std::runtime_error("gauge_distance: bracketing failed (malformed profile?)");
        }
    }
    // absolute width <= tol once t >= 1, relative below; either way the
    // returned midpoint is within tol of the true gauge value
    int it = 0;
    while (hi - lo > tol * std::min(1.0, hi) && ++it <= max_iter) {
        const double mid = 0.5 * (lo + hi);
        if (member(mid))
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi);
}

double closed_form_distance(const std::string& name, double param, GroupPoint a, GroupPoint b) {
    const DistanceOracle o = DistanceOracle::closed_form(name, param);
    return o.distance(a, b);
}

double DistanceOracle::distance(GroupPoint p, GroupPoint q) const {
    if (profile_) return gauge_distance(*profile_, p, q, tol_, max_iter_);
    return closed_norm(form_, param_, group_inv(p) * q);
}

bool ball_contains_point(const DistanceOracle& o, const Ball& b, GroupPoint q) {
    return o.distance(b.center, q) <= b.radius + o.tol();
}

DistanceOracle zoo_oracle(const std::string& name, double param, double tol, int max_iter) {
    if (name == "koranyi" || name == "d_eps" || name == "d_inf" || name == "rho_inf")
        return DistanceOracle::closed_form(name, name == "d_eps" ? param : 0.0);
    return DistanceOracle::gauge(zoo_profile(name, param), tol, max_iter);
}

AxiomReport axioms_check(const DistanceOracle& o, int samples, std::uint64_t seed) {
    if (samples < 1) throw std::invalid_argument("axioms_check: samples must be >= 1");
    AxiomReport rep;
    rep.samples = samples;
    rep.seed = seed;
    Rng rng(seed);
    const auto pt = [&] { return GroupPoint(rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)); };

    for (int i = 0; i < samples; ++i) {
        const GroupPoint p = pt(), q = pt(), r = pt(), g = pt();
        const double t = rng.uniform(0.05, 4.0);
        const double dpq = o.distance(p, q);
        rep.max_symmetry = std::max(rep.max_symmetry, std::abs(o.distance(q, p) - dpq));
        rep.max_left_invariance =
            std::max(rep.max_left_invariance, std::abs(o.distance(g * p, g * q) - dpq));
        rep.max_homogeneity =
            std::max(rep.max_homogeneity, std::abs(o.distance(dilate(t, p), dilate(t, q)) - t * dpq));
        const double viol = o.distance(p, r) - dpq - o.distance(q, r);
        rep.max_triangle = std::max(rep.max_triangle, viol);
    }
    rep.max_triangle = std::max(rep.max_triangle, 0.0);
    return rep;
}

std::string axioms_to_json(const DistanceOracle& o, const AxiomReport& r) {
    nlohmann::json j;
    j["distance"] = o.name();
    j["max_symmetry"] = json_num(r.max_symmetry);
    j["max_left_invariance"] = json_num(r.max_left_invariance);
    j["max_homogeneity"] = json_num(r.max_homogeneity);
    j["max_triangle"] = json_num(r.max_triangle);
    j["samples"] = r.samples;
    j["seed"] = r.seed;
    return j.dump();
}

}  // namespace heis
