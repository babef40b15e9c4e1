#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "heisbcp/profile.hpp"

namespace heis {

namespace {

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

Profile make_phi1() {
    Profile p = Profile::make(ProfileKind::General, Domain::disc(1.0), "1.25 - y^2/(1-x^2)", "phi1");
    p = p.with_boundary_value(Vec2(1.0, 0.0), 0.25).with_boundary_value(Vec2(-1.0, 0.0), 0.25);
    return p.with_note(
        "formula is 0/0 at (+-1,0); stored boundary values use the limit along the unit "
        "circle (1/4), while the limit along the x-axis is 5/4 (the profile is discontinuous there)");
}

Profile make_phi2() {
    Profile p = Profile::make(ProfileKind::General, Domain::disc(1.0),
                              "2.25 - y^2/(1-x^2) - x^2 - y^2", "phi2");
    p = p.with_boundary_value(Vec2(1.0, 0.0), 0.25).with_boundary_value(Vec2(-1.0, 0.0), 0.25);
    return p.with_note("phi1 plus the concave bump 1 - x^2 - y^2; discontinuous at (+-1,0)");
}

}  // namespace

const std::vector<ZooInfo>& zoo_list() {
    static const std::vector<ZooInfo> entries = {
        {"koranyi", false, "", "Koranyi distance (||v||^4 + 16 z^2)^(1/4); radial profile 0.25*sqrt(1-s^4)"},
        {"d_eps", true, "eps", "(eps^2 ||v||^2 + d0^2)^(1/2); radial profile 0.25*sqrt((1-eps^2 s^2)^2 - s^4)"},
        {"d_alpha", true, "alpha", "Euclidean-ball distance; radial profile sqrt(alpha^2 - s^2)"},
        {"d_inf", false, "", "max(||v||, 2 sqrt|z|); constant radial profile 1/4"},
        {"rho_inf", false, "", "max(|x|, |y|, sqrt(2|z|)); constant profile 1/2 on the unit square"},
        {"quasi", false, "", "quasi-distance (||v||^2 + |z|)^(1/2); radial profile 1 - s^2"},
        {"phi1", false, "", "1/4 + 1 - y^2/(1-x^2) on the unit disc; discontinuous at (+-1,0)"},
        {"phi2", false, "", "phi1 + 1 - x^2 - y^2 on the unit disc"},
    };
    return entries;
}

bool zoo_has(const std::string& name) {
    for (const auto& e : zoo_list())
        if (e.name == name) return true;
    return false;
}

Profile zoo_profile(const std::string& name, double param) {
    if (name == "koranyi")
        return Profile::make(ProfileKind::Radial, Domain::disc(1.0), "0.25*sqrt(1-s^4)", "koranyi");
    if (name == "d_eps") {
        if (!(param > 0.0)) throw std::invalid_argument("d_eps requires eps > 0");
        const double e2 = param * param;
        const double r = 1.0 / std::sqrt(1.0 + e2);
        return Profile::make(ProfileKind::Radial, Domain::disc(r),
                             "0.25*sqrt((1-" + fmt(e2) + "*s^2)^2 - s^4)", "d_eps");
    }
    if (name == "d_alpha") {
        if (!(param > 0.0)) throw std::invalid_argument("d_alpha requires alpha > 0");
        return Profile::make(ProfileKind::Radial, Domain::disc(param),
                             "sqrt(" + fmt(param * param) + " - s^2)", "d_alpha");
    }
    if (name == "d_inf")
        return Profile::make(ProfileKind::Radial, Domain::disc(1.0), "0.25", "d_inf");
    if (name == "rho_inf")
        return Profile::make(ProfileKind::General,
                             Domain::polygon({Vec2(1, 1), Vec2(-1, 1), Vec2(-1, -1), Vec2(1, -1)}),
                             "0.5", "rho_inf");
    if (name == "quasi")
        return Profile::make(ProfileKind::Radial, Domain::disc(1.0), "1 - s^2", "quasi");
    if (name == "phi1") return make_phi1();
    if (name == "phi2") return make_phi2();
    throw std::invalid_argument("unknown zoo profile '" + name + "'");
}

}  // namespace heis
