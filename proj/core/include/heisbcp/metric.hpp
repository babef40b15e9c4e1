#pragma once

// Homogeneous distances: the gauge d(p,q) = inf{t>0 : delta_{1/t}(p^{-1} q) in B}
// evaluated by bracketing + bisection, plus closed forms for the zoo distances
// that have one.

#include <cstdint>
#include <optional>
#include <string>

#include "heisbcp/heis.hpp"
#include "heisbcp/profile.hpp"

namespace heis {

struct Ball {
    GroupPoint center;
    double radius = 1.0;
};

enum class ClosedForm { None, Koranyi, DEps, DInf, RhoInf };

class DistanceOracle {
public:
    static DistanceOracle gauge(Profile p, double tol = 1e-12, int max_iter = 200);
    // name: koranyi | d_eps (param = eps > 0) | d_inf | rho_inf
    static DistanceOracle closed_form(const std::string& name, double param = 0.0);

    double distance(GroupPoint p, GroupPoint q) const;
    double operator()(GroupPoint p, GroupPoint q) const { return distance(p, q); }

    bool is_gauge() const { return profile_.has_value(); }
    const Profile& profile() const;
    ClosedForm form() const { return form_; }
    double tol() const { return tol_; }
    const std::string& name() const { return name_; }

private:
    DistanceOracle() = default;
    std::optional<Profile> profile_;
    ClosedForm form_ = ClosedForm::None;
    double param_ = 0.0;
    double tol_ = 1e-12;
    int max_iter_ = 200;
    std::string name_;
};

double gauge_distance(const Profile& p, GroupPoint a, GroupPoint b,
                      double tol = 1e-12, int max_iter = 200);
double closed_form_distance(const std::string& name, double param, GroupPoint a, GroupPoint b);

bool ball_contains_point(const DistanceOracle& o, const Ball& b, GroupPoint q);

// Oracle for a zoo entry: closed form where one exists, gauge otherwise.
DistanceOracle zoo_oracle(const std::string& name, double param = 1.0,
                          double tol = 1e-12, int max_iter = 200);

struct AxiomReport {
    double max_symmetry = 0.0;
    double max_left_invariance = 0.0;
    double max_homogeneity = 0.0;
    double max_triangle = 0.0;   // positive part of d(p,r) - d(p,q) - d(q,r)
    int samples = 0;
    std::uint64_t seed = 0;
};

AxiomReport axioms_check(const DistanceOracle& o, int samples, std::uint64_t seed);
std::string axioms_to_json(const DistanceOracle& o, const AxiomReport& r);

}  // namespace heis
