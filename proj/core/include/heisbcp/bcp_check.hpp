#pragma once

// Grid-sampled verifiers for the sufficient and necessary BCP conditions on a
// profile. Sufficient side: a uniform negative cone margin away from 0 plus a
// linear gradient bound near 0 certify BCP. Necessary side: violations of the
// radial-derivative sign conditions, of monotonicity along rays, of
// differentiability at 0, or of the Hessian sign conditions witness non-BCP.

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "heisbcp/profile.hpp"

namespace heis {

enum class Verdict { BcpCertifiedSufficient, NonBcpNecessaryViolation, Inconclusive };
std::string to_string(Verdict v);

struct SufficientParams {
    double m_hat = 0.0;       // fitted cone-margin constant
    double alpha_cone = 0.0;  // cone half-angle
    double kappa = 0.0;       // near-origin radius
    double M_hat = 0.0;       // near-origin gradient/radius bound
};

struct CheckWitness {
    Vec2 v;
    std::string condition;
    double value = 0.0;
    std::string context;
};

struct GridMeta {
    int radial = 0;
    int angular = 0;
    std::uint64_t seed = 0;
    int skipped = 0;   // grid points where gradient evaluation failed
    int total = 0;
    bool skip_flagged = false;  // more than 5% of points skipped
};

struct CheckReport {
    std::string profile;
    std::string check;
    Verdict verdict = Verdict::Inconclusive;
    std::optional<SufficientParams> params;
    std::vector<CheckWitness> witnesses;
    GridMeta grid;
    std::vector<std::string> checks_run;
    std::optional<std::array<double, 2>> hessian_eigenvalues;  // hessian check only
    std::string note;
};

std::string report_to_json(const CheckReport& r);

struct VerdictConflictError : std::logic_error {
    using std::logic_error::logic_error;
};

// max over unit w with angle(v,w) <= alpha of <grad phi(v), w> / ||v||.
// Condition (phi-2) holds at v with constant m iff this value <= -m.
double cone_margin(const Profile& p, Vec2 v, double alpha_cone);

inline std::vector<double> default_alpha_grid() {
    return {M_PI / 32, M_PI / 16, M_PI / 8, M_PI / 4, 3 * M_PI / 8};
}

CheckReport sufficient_check(const Profile& p, std::span<const double> alpha_grid,
                             int radial_grid = 96, int angular_grid = 64,
                             std::uint64_t seed = 1);
CheckReport sufficient_check(const Profile& p);

// Radial characterization: BCP iff phi'(s) <= -m s (given |phi'(s)/s| bounded near 0).
CheckReport rotational_check(const Profile& p, int grid = 400);

CheckReport necessary_gradient_check(const Profile& p, int radial_grid = 64,
                                     int angular_grid = 64, std::uint64_t seed = 1);

CheckReport radial_monotone_check(const Profile& p, int directions = 64, int steps = 128);

CheckReport origin_regularity_check(const Profile& p, std::span<const double> h_grid);
CheckReport origin_regularity_check(const Profile& p);

// Finite-difference Hessian at 0 (Richardson-refined) plus the strict radial
// condition <grad phi(w), w> < 0 at sampled points. The sign conclusions need
// smoothness hypotheses the tool cannot infer, so the caller asserts them.
CheckReport hessian_check(const Profile& p, double h, bool assume_c2,
                          bool assume_hessian_differentiable_at_0 = false);

struct StripWitness {
    Vec2 v;                        // unit direction
    double a = 0.0;                // gap constant, > 0
    std::vector<double> t_plus;    // decreasing positive scales
    std::vector<double> t_minus;   // matching positive scales
    double T = 0.0;                // outer end of the empty strip
};

// True iff every listed scale satisfies the gap inequality
//   phi(t+ v) - phi(-t- v) < -a (t+ + t-)   (margin 1e-12)
// and phi(t v) <= phi(t+ v) on a grid over [t+, T].
bool strip_witness_check(const Profile& p, const StripWitness& w);

// Same check as a report; escalates to a non-BCP verdict only when the fitted
// gap constant is stable across the last three scales.
CheckReport strip_witness_report(const Profile& p, const StripWitness& w);

// NONBCP dominates; certificate next; conflict (both present) is a hard error.
CheckReport verdict_aggregate(std::span<const CheckReport> reports);

}  // namespace heis
