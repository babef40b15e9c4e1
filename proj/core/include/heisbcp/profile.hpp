#pragma once

// Unit-ball profiles phi: K -> [0,inf) of homogeneous distances on H.
// The unit ball is B = {(v,z): v in K, -phi(-v) <= z <= phi(v)} for a compact
// convex symmetric K with 0 in its interior.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "heisbcp/expr.hpp"
#include "heisbcp/heis.hpp"

namespace heis {

struct Domain {
    enum class Type { Disc, Polygon };
    Type type = Type::Disc;
    double radius = 1.0;          // disc only
    std::vector<Vec2> vertices;   // polygon only, counter-clockwise

    static Domain disc(double radius);
    // Vertices may be given in any order; they are sorted counter-clockwise.
    // Must be convex, symmetric (closed under negation) with 0 strictly inside.
    static Domain polygon(std::vector<Vec2> vertices);

    // r_hat(nu) = max{s>0 : s*nu in K} for a unit direction nu.
    double support_radius(Vec2 nu) const;
    bool contains(Vec2 v, double tol = 1e-12) const;
    double diameter() const;
    double inradius() const;
};

enum class ProfileKind { Radial, General };

class Profile {
public:
    // Parses and structurally checks the profile: radial profiles must live on a
    // disc and be even (sampled), and phi must be positive on sampled interior
    // points. Throws std::invalid_argument on violation.
    static Profile make(ProfileKind kind, Domain domain, const std::string& phi_src,
                        std::string name = "",
                        std::optional<std::pair<std::string, std::string>> grad_src = std::nullopt,
                        int check_samples = 10000, std::uint64_t check_seed = 0x9e3779b9u);

    ProfileKind kind() const { return kind_; }
    const Domain& domain() const { return domain_; }
    const std::string& name() const { return name_; }
    const std::string& phi_source() const { return phi_src_; }
    const std::string& note() const { return note_; }
    bool has_analytic_grad() const { return grad_x_ != nullptr; }

    double eval(Vec2 v) const;                   // pre: v in K (tol 1e-12)
    Vec2 grad(Vec2 v) const;                     // pre: v in int(K), v != 0 for radial
    bool ball_contains(GroupPoint q, double tol = 1e-12) const;

    // Radial-kind helpers (signed s allowed; phi is even).
    double eval_radial(double s) const;
    double radial_derivative(double s) const;    // phi'(s), pre: radial kind

    Profile with_boundary_value(Vec2 v, double value) const;  // pointwise override
    Profile with_note(std::string note) const;
    const std::vector<std::pair<Vec2, double>>& boundary_values() const { return boundary_values_; }

private:
    Profile() = default;
    ProfileKind kind_ = ProfileKind::Radial;
    Domain domain_;
    std::string name_;
    std::string phi_src_;
    std::string note_;
    ExprPtr phi_;
    ExprPtr grad_x_;
    ExprPtr grad_y_;
    std::string grad_x_src_, grad_y_src_;
    std::vector<std::pair<Vec2, double>> boundary_values_;

    friend Profile profile_from_json_impl(const std::string&);
    friend std::string profile_to_json(const Profile&);
};

struct ValidationWitness {
    std::string condition;
    Vec2 v;
    double value = 0.0;
    std::string context;
};

// Three independent flags: (a) min phi >= diam(K)^2/16, (b) midpoint concavity,
// (c) sampled ball axiom delta_t(p)*delta_{1-t}(q) in B. (a)+(b) certify a
// homogeneous distance; (c) is the direct sampled fallback.
struct ValidationReport {
    bool lower_bound_ok = false;
    bool concavity_ok = false;
    bool ball_axiom_ok = false;
    double min_phi = 0.0;
    double lower_bound = 0.0;   // diam(K)^2 / 16
    int samples = 0;
    std::uint64_t seed = 0;
    int eval_failures = 0;
    std::vector<ValidationWitness> witnesses;

    bool certifies_distance() const { return lower_bound_ok && concavity_ok; }
};

ValidationReport validate_profile(const Profile& p, int samples, std::uint64_t seed);
std::string validation_to_json(const Profile& p, const ValidationReport& r);

// Profile JSON document:
// {"name": str, "kind": "radial"|"general",
//  "domain": {"type":"disc","radius":r} | {"type":"polygon","vertices":[[x,y],...]},
//  "phi": "<expression>", "grad": ["<expr_x>","<expr_y>"]?,
//  "boundary_values": [[x,y,value],...]? }
Profile profile_from_json(const std::string& json_text);
Profile profile_from_file(const std::string& path);
std::string profile_to_json(const Profile& p);

// Distance zoo. Parameterized entries: d_eps(eps), d_alpha(alpha).
struct ZooInfo {
    std::string name;
    bool parameterized = false;
    std::string param_name;
    std::string summary;
};
const std::vector<ZooInfo>& zoo_list();
bool zoo_has(const std::string& name);
Profile zoo_profile(const std::string& name, double param = 1.0);

}  // namespace heis
