#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "heisbcp/bcp_check.hpp"
#include "heisbcp/family_search.hpp"
#include "heisbcp/metric.hpp"
#include "json.hpp"

using namespace heis;
using nlohmann::json;

namespace {

// floats are quantized to 12 significant digits so identical invocations are
// byte-identical
json num(double x) {
    if (!std::isfinite(x)) return nullptr;
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return json::parse(buf);
}

struct ProfileArgs {
    std::string name;
    double eps = 1.0;
    double alpha = 1.0;

    Profile load() const {
        if (zoo_has(name)) {
            const double param = name == "d_eps" ? eps : alpha;
            return zoo_profile(name, param);
        }
        return profile_from_file(name);
    }

    DistanceOracle oracle() const {
        if (zoo_has(name)) return zoo_oracle(name, name == "d_eps" ? eps : alpha);
        return DistanceOracle::gauge(profile_from_file(name));
    }
};

GroupPoint parse_point(const std::string& text) {
    double x, y, z;
    if (std::sscanf(text.c_str(), "%lf,%lf,%lf", &x, &y, &z) != 3)
        throw CLI::ValidationError("point", "expected x,y,z");
    return GroupPoint(x, y, z);
}

void emit(const std::string& line) { std::cout << line << "\n"; }

[[noreturn]] void fail(int code, const std::string& message) {
    json j;
    j["error"] = message;
    std::cerr << j.dump() << "\n";
    std::exit(code);
}

void add_profile_flags(CLI::App* cmd, ProfileArgs& args, const char* flag, const char* what,
                       bool prefixed_params = false) {
    cmd->add_option(flag, args.name, what)->required();
    // `net` keeps --eps for the separation, so its zoo parameters are prefixed
    cmd->add_option(prefixed_params ? "--param-eps" : "--eps", args.eps, "parameter for d_eps");
    cmd->add_option(prefixed_params ? "--param-alpha" : "--alpha", args.alpha,
                    "parameter for d_alpha");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"homogeneous distances on the first Heisenberg group: profile zoo, "
                 "distance evaluation, BCP checkers, and Besicovitch family search"};
    app.require_subcommand(1);

    // zoo list
    auto* zoo_cmd = app.add_subcommand("zoo", "profile zoo");
    zoo_cmd->require_subcommand(1);
    auto* zoo_list_cmd = zoo_cmd->add_subcommand("list", "list zoo entries");

    // dist
    auto* dist_cmd = app.add_subcommand("dist", "evaluate a distance");
    ProfileArgs dist_args;
    std::string p_text, q_text;
    add_profile_flags(dist_cmd, dist_args, "--distance", "zoo name or profile JSON file");
    dist_cmd->add_option("--p", p_text, "first point x,y,z")->required();
    dist_cmd->add_option("--q", q_text, "second point x,y,z")->required();

    // check
    auto* check_cmd = app.add_subcommand("check", "run BCP checkers");
    std::string which;
    check_cmd->add_option("kind", which, "sufficient|rotational|necessary|hessian|all")
        ->required()
        ->check(CLI::IsMember({"sufficient", "rotational", "necessary", "hessian", "all"}));
    ProfileArgs check_args;
    add_profile_flags(check_cmd, check_args, "--profile", "zoo name or profile JSON file");
    int radial_grid = 96, angular_grid = 64;
    std::uint64_t check_seed = 1;
    double hessian_h = 5e-3;
    bool assume_c2 = false, assume_hdiff = false;
    std::vector<double> alpha_grid;
    check_cmd->add_option("--radial-grid", radial_grid, "radial grid count");
    check_cmd->add_option("--angular-grid", angular_grid, "angular grid count");
    check_cmd->add_option("--seed", check_seed, "grid seed");
    check_cmd->add_option("--fd-step", hessian_h, "finite-difference step for the Hessian");
    check_cmd->add_option("--alpha-grid", alpha_grid, "candidate cone half-angles");
    check_cmd->add_flag("--assume-c2", assume_c2,
                        "assert the profile is C^2 near the tested points");
    check_cmd->add_flag("--assume-hessian-diff", assume_hdiff,
                        "assert the Hessian is differentiable at 0");

    // validate
    auto* val_cmd = app.add_subcommand("validate", "structural profile validation");
    ProfileArgs val_args;
    add_profile_flags(val_cmd, val_args, "--profile", "zoo name or profile JSON file");
    int val_samples = 10000;
    std::uint64_t val_seed = 1;
    val_cmd->add_option("--samples", val_samples, "sample count");
    val_cmd->add_option("--seed", val_seed, "RNG seed");

    // search family
    auto* search_cmd = app.add_subcommand("search", "stochastic searches");
    search_cmd->require_subcommand(1);
    auto* family_cmd = search_cmd->add_subcommand("family", "search for a Besicovitch family");
    ProfileArgs search_args;
    add_profile_flags(family_cmd, search_args, "--distance", "zoo name or profile JSON file");
    SearchConfig scfg;
    std::string out_path, trace_path, strategy = "anneal";
    family_cmd->add_option("--budget", scfg.budget, "distance-evaluation budget");
    family_cmd->add_option("--seed", scfg.seed, "RNG seed");
    family_cmd->add_option("--strategy", strategy, "greedy|anneal")
        ->check(CLI::IsMember({"greedy", "anneal"}));
    family_cmd->add_option("--r-min", scfg.r_min, "smallest ball radius");
    family_cmd->add_option("--r-max", scfg.r_max, "largest ball radius");
    family_cmd->add_option("--slack", scfg.slack, "verifier slack");
    family_cmd->add_option("--out", out_path, "write the family JSON to this file");
    family_cmd->add_option("--trace", trace_path, "write the trace CSV to this file");

    // net
    auto* net_cmd = app.add_subcommand("net", "greedy eps-net in the unit ball");
    ProfileArgs net_args;
    add_profile_flags(net_cmd, net_args, "--distance", "zoo name or profile JSON file", true);
    double net_eps = 0.5;
    int net_candidates = 10000;
    std::uint64_t net_seed = 1;
    net_cmd->add_option("--eps", net_eps, "separation")->required();
    net_cmd->add_option("--candidates", net_candidates, "candidate count");
    net_cmd->add_option("--seed", net_seed, "RNG seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        json j;
        j["error"] = std::string("usage: ") + e.what();
        std::cerr << j.dump() << "\n";
        return 2;
    }

    try {
        if (*zoo_list_cmd) {
            json entries = json::array();
            for (const auto& e : zoo_list()) {
                json je;
                je["name"] = e.name;
                je["parameterized"] = e.parameterized;
                if (e.parameterized) je["param"] = e.param_name;
                je["summary"] = e.summary;
                entries.push_back(je);
            }
            emit(json{{"zoo", entries}}.dump());
            return 0;
        }

        if (*dist_cmd) {
            const DistanceOracle o = dist_args.oracle();
            const GroupPoint p = parse_point(p_text), q = parse_point(q_text);
            json j;
            j["distance"] = o.name();
            j["p"] = json::array({num(p.v.x), num(p.v.y), num(p.z)});
            j["q"] = json::array({num(q.v.x), num(q.v.y), num(q.z)});
            j["value"] = num(o.distance(p, q));
            emit(j.dump());
            return 0;
        }

        if (*check_cmd) {
            const Profile prof = check_args.load();
            std::vector<CheckReport> reports;
            const bool radial = prof.kind() == ProfileKind::Radial;
            if (which == "sufficient" || which == "all") {
                if (alpha_grid.empty()) alpha_grid = default_alpha_grid();
                reports.push_back(
                    sufficient_check(prof, alpha_grid, radial_grid, angular_grid, check_seed));
            }
            if (which == "rotational" || (which == "all" && radial)) {
                reports.push_back(rotational_check(prof));
            }
            if (which == "necessary" || which == "all") {
                reports.push_back(necessary_gradient_check(prof, radial_grid, angular_grid, check_seed));
                reports.push_back(radial_monotone_check(prof));
                reports.push_back(origin_regularity_check(prof));
            }
            if (which == "hessian" || (which == "all" && assume_c2)) {
                reports.push_back(hessian_check(prof, hessian_h, assume_c2, assume_hdiff));
            }
            const CheckReport merged =
                reports.size() == 1 ? reports.front()
                                    : verdict_aggregate(std::span<const CheckReport>(reports));
            emit(report_to_json(merged));
            return 0;
        }

        if (*val_cmd) {
            const Profile prof = val_args.load();
            emit(validation_to_json(prof, validate_profile(prof, val_samples, val_seed)));
            return 0;
        }

        if (*family_cmd) {
            const DistanceOracle o = search_args.oracle();
            scfg.strategy = strategy == "greedy" ? SearchConfig::Strategy::Greedy
                                                 : SearchConfig::Strategy::Anneal;
            const SearchResult res = search_family(o, scfg);
            const FamilyCheck chk = verify_family(o, res.family, scfg.slack);
            const std::string family_json = family_to_json(res.family);
            if (!out_path.empty()) {
                std::ofstream out(out_path);
                if (!out) throw std::runtime_error("cannot write " + out_path);
                out << family_json << "\n";
            }
            if (!trace_path.empty()) {
                std::ofstream tr(trace_path);
                if (!tr) throw std::runtime_error("cannot write " + trace_path);
                tr << trace_to_csv(res.trace);
            }
            json j;
            j["distance"] = o.name();
            j["cardinality"] = res.family.balls.size();
            j["evaluations"] = res.evaluations_used;
            j["verified"] = chk.ok;
            j["family"] = json::parse(family_json);
            emit(j.dump());
            return 0;
        }

        if (*net_cmd) {
            const DistanceOracle o = net_args.oracle();
            const auto net = eps_net_greedy(o, net_eps, net_candidates, net_seed);
            json pts = json::array();
            for (const GroupPoint& m : net)
                pts.push_back(json::array({num(m.v.x), num(m.v.y), num(m.z)}));
            json j;
            j["distance"] = o.name();
            j["eps"] = num(net_eps);
            j["size"] = net.size();
            j["points"] = pts;
            emit(j.dump());
            return 0;
        }
    } catch (const VerdictConflictError& e) {
        fail(3, e.what());
    } catch (const CLI::ValidationError& e) {
        fail(2, e.what());
    } catch (const std::exception& e) {
        fail(2, e.what());
    }
    return 0;
}
