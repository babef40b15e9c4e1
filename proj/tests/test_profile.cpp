#include <cmath>
#include <random>

#include "doctest.h"
#include "heisbcp/profile.hpp"

using namespace heis;

namespace {

Vec2 unit(double theta) { return Vec2(std::cos(theta), std::sin(theta)); }

// central-difference gradient oracle for phi
Vec2 fd_grad(const Profile& p, Vec2 v, double h = 1e-6) {
    return Vec2((p.eval(Vec2(v.x + h, v.y)) - p.eval(Vec2(v.x - h, v.y))) / (2 * h),
                (p.eval(Vec2(v.x, v.y + h)) - p.eval(Vec2(v.x, v.y - h))) / (2 * h));
}

}  // namespace

TEST_CASE("support_radius") {
    const Domain disc = Domain::disc(1.0);
    CHECK(disc.support_radius(Vec2(0, 1)) == 1.0);

    const Domain square = Domain::polygon({Vec2(1, 1), Vec2(-1, 1), Vec2(-1, -1), Vec2(1, -1)});
    CHECK(square.support_radius(Vec2(1, 0)) == doctest::Approx(1.0).epsilon(1e-14));
    const double c = std::sqrt(2.0) / 2.0;
    CHECK(square.support_radius(Vec2(c, c)) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));

    CHECK_THROWS_AS(disc.support_radius(Vec2(2, 0)), std::domain_error);
}

TEST_CASE("polygon domain validation") {
    CHECK_THROWS_AS(Domain::polygon({Vec2(1, 1), Vec2(-1, 1), Vec2(0, -1)}), std::invalid_argument);
    // not symmetric
    CHECK_THROWS_AS(Domain::polygon({Vec2(2, 1), Vec2(-1, 1), Vec2(-2, -1), Vec2(1, -2)}),
                    std::invalid_argument);
    // hexagon, symmetric and convex
    std::vector<Vec2> hex;
    for (int k = 0; k < 6; ++k) hex.push_back(unit(M_PI * k / 3.0));
    const Domain d = Domain::polygon(hex);
    CHECK(d.inradius() == doctest::Approx(std::sqrt(3.0) / 2.0));
    CHECK(d.diameter() == doctest::Approx(2.0));
    CHECK(d.contains(Vec2(0.5, 0.5), 1e-12));
    CHECK(!d.contains(Vec2(0.99, 0.5), 1e-12));
}

TEST_CASE("phi_eval on the zoo") {
    const Profile ko = zoo_profile("koranyi");
    CHECK(ko.eval(Vec2(0, 0)) == 0.25);
    CHECK(ko.eval(Vec2(1, 0)) == 0.0);

    const Profile de = zoo_profile("d_eps", 1.0);
    const double r1 = 1.0 / std::sqrt(2.0);
    CHECK(de.domain().radius == doctest::Approx(r1).epsilon(1e-15));
    // the profile vanishes at s = r_eps; the square-root profile has infinite
    // slope there, so double rounding of r_eps itself already costs ~sqrt(ulp)
    CHECK(std::abs(de.eval(Vec2(r1, 0))) <= 1e-6);

    const Profile p1 = zoo_profile("phi1");
    CHECK(p1.eval(Vec2(0, 0)) == 1.25);
    // stored boundary values at the two singular formula points
    CHECK(p1.eval(Vec2(1, 0)) == 0.25);
    CHECK(p1.eval(Vec2(-1, 0)) == 0.25);
    // elsewhere on the circle the formula itself gives 1/4
    CHECK(p1.eval(unit(1.0)) == doctest::Approx(0.25).epsilon(1e-12));

    CHECK_THROWS_AS(ko.eval(Vec2(1.1, 0)), std::domain_error);
}

TEST_CASE("phi_grad") {
    const Profile da = zoo_profile("d_alpha", 1.0);
    const Vec2 g = da.grad(Vec2(0.6, 0.0));
    CHECK(g.x == doctest::Approx(-0.75).epsilon(1e-12));
    CHECK(g.y == 0.0);

    const Profile p1 = zoo_profile("phi1");
    const Vec2 g1 = p1.grad(Vec2(0.5, 0.0));
    CHECK(g1.x == 0.0);
    CHECK(g1.y == 0.0);

    const Profile p2 = zoo_profile("phi2");
    const Vec2 g2 = p2.grad(Vec2(0.0, 0.0));
    CHECK(g2.x == 0.0);
    CHECK(g2.y == 0.0);

    CHECK_THROWS_AS(da.grad(Vec2(0, 0)), std::domain_error);  // radial kind at 0
}

TEST_CASE("phi_grad matches central finite differences") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (const char* name : {"koranyi", "d_eps", "d_alpha", "quasi", "phi1", "phi2"}) {
        const Profile p = zoo_profile(name, 1.0);
        int done = 0;
        while (done < 1000) {
            const double theta = 2 * M_PI * u(rng);
            const Vec2 nu = unit(theta);
            const double f = 0.05 + 0.85 * u(rng);
            const Vec2 v = (f * p.domain().support_radius(nu)) * nu;
            Vec2 g, g_fd;
            try {
                g = p.grad(v);
                g_fd = fd_grad(p, v);
            } catch (const std::exception&) {
                continue;
            }
            CHECK(std::abs(g.x - g_fd.x) <= 1e-6 * (1.0 + std::abs(g.x)));
            CHECK(std::abs(g.y - g_fd.y) <= 1e-6 * (1.0 + std::abs(g.y)));
            ++done;
        }
    }
}

TEST_CASE("ball_contains") {
    const Profile ko = zoo_profile("koranyi");
    CHECK(ko.ball_contains(GroupPoint(0, 0, 0.25)));
    CHECK(!ko.ball_contains(GroupPoint(0, 0, 0.26)));
    CHECK(ko.ball_contains(GroupPoint(1, 0, 0)));
    CHECK(!ko.ball_contains(GroupPoint(1.001, 0, 0)));
}

TEST_CASE("ball symmetry: q in B iff q^{-1} in B") {
    std::mt19937_64 rng(37);
    std::uniform_real_distribution<double> u(-1.2, 1.2);
    for (const char* name : {"koranyi", "d_eps", "d_alpha", "d_inf", "rho_inf", "quasi", "phi1", "phi2"}) {
        const Profile p = zoo_profile(name, 1.0);
        for (int i = 0; i < 10000; ++i) {
            const GroupPoint q(u(rng), u(rng), u(rng));
            CHECK(p.ball_contains(q) == p.ball_contains(group_inv(q)));
        }
    }
}

TEST_CASE("star-shapedness: q in B implies delta_t(q) in B") {
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (const char* name : {"koranyi", "d_alpha", "quasi", "phi1", "phi2", "rho_inf"}) {
        const Profile p = zoo_profile(name, 1.0);
        int inside = 0;
        for (int i = 0; i < 10000; ++i) {
            const double theta = 2 * M_PI * u(rng);
            const Vec2 nu = unit(theta);
            const Vec2 v = ((1.0 - 1e-9) * std::sqrt(u(rng)) * p.domain().support_radius(nu)) * nu;
            const double lo = -p.eval(-v), hi = p.eval(v);
            const GroupPoint q(v, lo + (hi - lo) * u(rng));
            if (!p.ball_contains(q)) continue;
            ++inside;
            CHECK(p.ball_contains(dilate(u(rng), q), 1e-9));
        }
        CHECK(inside >= 5000);
    }
}

TEST_CASE("radial continuity toward the boundary, and phi1's two discontinuities") {
    // A ray direction is flagged discontinuous when the boundary gap is both
    // large at t = 0.999 and not shrinking relative to t = 0.9. Near-pole rays
    // of phi1/phi2 converge slowly but do shrink, so they are not flagged.
    const auto flagged = [](const Profile& p, Vec2 w) {
        const double phi_w = p.eval(w);
        const double g9 = std::abs(p.eval(0.9 * w) - phi_w);
        const double g99 = std::abs(p.eval(0.99 * w) - phi_w);
        const double g999 = std::abs(p.eval(0.999 * w) - phi_w);
        CHECK(g999 <= g99 + 1e-12);
        CHECK(g99 <= g9 + 1e-12);
        return g999 > 0.05 && g999 > 0.5 * g9;
    };
    for (const char* name : {"koranyi", "d_eps", "d_alpha", "d_inf", "rho_inf", "quasi"}) {
        const Profile p = zoo_profile(name, 1.0);
        for (int j = 0; j < 32; ++j) {
            const double theta = 2 * M_PI * (j + 0.5) / 32;
            const Vec2 w = p.domain().support_radius(unit(theta)) * unit(theta);
            CHECK(!flagged(p, w));
        }
    }
    // phi1 and phi2: the radial limit at (+-1,0) is the x-axis value while the
    // stored boundary value is the circle limit, so the gap stays ~1 and the
    // two discontinuity points are detected; all sampled off-pole rays pass
    for (const char* name : {"phi1", "phi2"}) {
        const Profile p = zoo_profile(name);
        CHECK(flagged(p, Vec2(1, 0)));
        CHECK(flagged(p, Vec2(-1, 0)));
        for (int j = 0; j < 64; ++j) {
            const double theta = 2 * M_PI * (j + 0.5) / 64;
            CHECK(!flagged(p, unit(theta)));
        }
    }
}

TEST_CASE("validate_profile flags across the zoo") {
    // phi1 certifies a homogeneous distance via the concavity route
    const auto r1 = validate_profile(zoo_profile("phi1"), 10000, 42);
    CHECK(r1.lower_bound_ok);
    CHECK(r1.concavity_ok);
    CHECK(r1.ball_axiom_ok);
    CHECK(r1.certifies_distance());
    CHECK(r1.lower_bound == doctest::Approx(0.25));

    // koranyi fails the diam^2/16 bound (phi -> 0 at the boundary) but the
    // direct sampled ball axiom passes: it is a distance
    const auto rk = validate_profile(zoo_profile("koranyi"), 10000, 42);
    CHECK(!rk.lower_bound_ok);
    CHECK(rk.concavity_ok);
    CHECK(rk.ball_axiom_ok);

    // the quasi-distance profile fails the ball axiom with a concrete witness
    const auto rq = validate_profile(zoo_profile("quasi"), 10000, 42);
    CHECK(!rq.ball_axiom_ok);
    REQUIRE(!rq.witnesses.empty());
    bool has_ball_witness = false;
    for (const auto& w : rq.witnesses) has_ball_witness |= w.condition == "ball_axiom";
    CHECK(has_ball_witness);

    const auto r2 = validate_profile(zoo_profile("phi2"), 10000, 42);
    CHECK(r2.certifies_distance());
    const auto ri = validate_profile(zoo_profile("d_inf"), 10000, 42);
    CHECK(ri.lower_bound_ok);
    CHECK(ri.ball_axiom_ok);
    const auto rr = validate_profile(zoo_profile("rho_inf"), 10000, 42);
    CHECK(rr.lower_bound_ok);
    CHECK(rr.ball_axiom_ok);
    for (double eps : {0.1, 0.5, 1.0}) {
        const auto re = validate_profile(zoo_profile("d_eps", eps), 5000, 42);
        CHECK(re.concavity_ok);
        CHECK(re.ball_axiom_ok);
    }
    const auto ra = validate_profile(zoo_profile("d_alpha", 1.0), 5000, 42);
    CHECK(ra.concavity_ok);
    CHECK(ra.ball_axiom_ok);
}

TEST_CASE("radial profiles must be even and positive") {
    CHECK_THROWS_AS(Profile::make(ProfileKind::Radial, Domain::disc(1.0), "1 + s", "odd"),
                    std::invalid_argument);
    CHECK_THROWS_AS(
        Profile::make(ProfileKind::Radial, Domain::disc(1.0), "0.3 - s^2/2 + (s^3)/2", "odd3"),
        std::invalid_argument);
    CHECK_THROWS_AS(Profile::make(ProfileKind::Radial, Domain::disc(1.0), "s^2 - 0.5", "negative"),
                    std::invalid_argument);
    CHECK_THROWS_AS(
        Profile::make(ProfileKind::Radial, Domain::polygon({Vec2(1, 1), Vec2(-1, 1), Vec2(-1, -1),
                                                            Vec2(1, -1)}),
                      "0.25", "square-radial"),
        std::invalid_argument);
    // abs makes the kink profile even: accepted
    CHECK_NOTHROW(Profile::make(ProfileKind::Radial, Domain::disc(1.0), "0.3 - abs(s)/2 + s^2", "kink"));
}

TEST_CASE("profile JSON round trip") {
    std::mt19937_64 rng(43);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (const char* name : {"koranyi", "d_eps", "rho_inf", "phi1"}) {
        const Profile p = zoo_profile(name, 0.7);
        const Profile q = profile_from_json(profile_to_json(p));
        CHECK(q.name() == p.name());
        CHECK(q.kind() == p.kind());
        for (int i = 0; i < 200; ++i) {
            const double theta = 2 * M_PI * u(rng);
            const Vec2 nu = unit(theta);
            const Vec2 v = (0.95 * u(rng) * p.domain().support_radius(nu)) * nu;
            CHECK(p.eval(v) == q.eval(v));
        }
        // boundary overrides survive the round trip
        if (std::string(name) == "phi1") CHECK(q.eval(Vec2(1, 0)) == 0.25);
    }
    CHECK_THROWS(profile_from_json("{\"kind\":\"radial\"}"));
    CHECK_THROWS(profile_from_json("{\"kind\":\"circular\",\"domain\":{\"type\":\"disc\",\"radius\":1},\"phi\":\"1\"}"));
}
