#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>

#include "doctest.h"
#include "json.hpp"

namespace {

std::string cli_path() {
    const char* p = std::getenv("HEISBCP_CLI");
    REQUIRE_MESSAGE(p != nullptr, "HEISBCP_CLI must point at the CLI binary");
    return p;
}

struct RunResult {
    int exit_code;
    std::string out;
};

RunResult run(const std::string& args) {
    const std::string cmd = cli_path() + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string out;
    std::array<char, 4096> buf;
    while (std::size_t n = std::fread(buf.data(), 1, buf.size(), pipe)) out.append(buf.data(), n);
    const int status = pclose(pipe);
    return {WEXITSTATUS(status), out};
}

}  // namespace

TEST_CASE("zoo list") {
    const auto r = run("zoo list");
    CHECK(r.exit_code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j.at("zoo").size() == 8);
}

TEST_CASE("dist examples") {
    const auto r = run("dist --distance koranyi --p 0,0,0 --q 0,0,1");
    CHECK(r.exit_code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j.at("value").get<double>() == 2.0);

    const auto r2 = run("dist --distance d_eps --eps 1.0 --p 0,0,0 --q 1,0,0");
    const auto j2 = nlohmann::json::parse(r2.out);
    CHECK(j2.at("value").get<double>() == doctest::Approx(std::sqrt(2.0)).epsilon(1e-11));
}

TEST_CASE("check verdicts through the CLI") {
    const auto ko = run("check rotational --profile koranyi");
    CHECK(ko.exit_code == 0);
    CHECK(nlohmann::json::parse(ko.out).at("verdict") == "NONBCP_NECESSARY_VIOLATION");

    const auto de = run("check rotational --profile d_eps --eps 1.0");
    const auto jde = nlohmann::json::parse(de.out);
    CHECK(jde.at("verdict") == "BCP_CERTIFIED_SUFFICIENT");
    CHECK(jde.at("params").at("m_hat").get<double>() >= 0.4999);

    const auto p1 = run("check hessian --profile phi1 --assume-c2 --assume-hessian-diff");
    CHECK(nlohmann::json::parse(p1.out).at("verdict") == "NONBCP_NECESSARY_VIOLATION");

    // hessian without the smoothness assertion is a usage error
    const auto nof = run("check hessian --profile phi1");
    CHECK(nof.exit_code == 2);
}

TEST_CASE("usage errors exit with 2 and a JSON diagnostic") {
    const auto r = run("frobnicate");
    CHECK(r.exit_code == 2);
    CHECK(nlohmann::json::parse(r.out).contains("error"));

    const auto unknown = run("dist --distance koranyi --p 0,0,0 --q 0,0,1 --bogus 3");
    CHECK(unknown.exit_code == 2);

    const auto badzoo = run("check rotational --profile no_such_profile");
    CHECK(badzoo.exit_code == 2);
}

TEST_CASE("verdict contradiction exits with 3") {
    // a user-supplied analytic gradient that contradicts phi itself: the
    // sufficient check certifies from the gradient while the monotonicity
    // check sees phi increase, which trips the aggregate's exclusivity guard
    const char* path = "cli_contradictory_profile.json";
    {
        std::ofstream f(path);
        f << R"json({"name":"contradictory","kind":"general",)json"
          << R"json("domain":{"type":"disc","radius":1.0},)json"
          << R"json("phi":"0.3 + 0.1*(x^2+y^2)","grad":["-x","-y"]})json";
    }
    const auto r = run(std::string("check all --profile ") + path);
    CHECK(r.exit_code == 3);
    CHECK(nlohmann::json::parse(r.out).contains("error"));
    std::remove(path);
}

TEST_CASE("profile files load") {
    const char* path = "cli_test_profile.json";
    {
        std::ofstream f(path);
        f << R"({"name":"parabolic","kind":"radial",)"
          << R"("domain":{"type":"disc","radius":1.0},"phi":"0.5 - 0.2*s^2"})";
    }
    const auto r = run(std::string("validate --profile ") + path + " --samples 2000 --seed 9");
    CHECK(r.exit_code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j.at("concavity_ok") == true);
    std::remove(path);
}

TEST_CASE("search family writes verified output and a monotone trace") {
    const char* fam = "cli_family.json";
    const char* csv = "cli_trace.csv";
    const auto r = run(std::string("search family --distance koranyi --budget 20000 --seed 2 --out ") +
                       fam + " --trace " + csv);
    CHECK(r.exit_code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j.at("verified") == true);
    CHECK(j.at("cardinality").get<int>() >= 5);

    std::ifstream famf(fam);
    REQUIRE(famf.good());
    nlohmann::json fj;
    famf >> fj;
    CHECK(fj.at("balls").size() == j.at("cardinality").get<std::size_t>());

    std::ifstream csvf(csv);
    REQUIRE(csvf.good());
    std::string header;
    std::getline(csvf, header);
    CHECK(header == "evaluations,best_cardinality");
    long long prev_e = -1;
    int prev_c = 0;
    std::string line;
    while (std::getline(csvf, line)) {
        long long e;
        int c;
        REQUIRE(std::sscanf(line.c_str(), "%lld,%d", &e, &c) == 2);
        CHECK(e >= prev_e);
        CHECK(c > prev_c);
        prev_e = e;
        prev_c = c;
    }
    std::remove(fam);
    std::remove(csv);
}

TEST_CASE("identical invocations are byte-identical") {
    for (const char* cmd : {"check sufficient --profile phi2",
                            "net --distance koranyi --eps 0.7 --candidates 3000 --seed 4",
                            "validate --profile koranyi --samples 3000 --seed 11",
                            "search family --distance d_eps --eps 1.0 --budget 20000 --seed 6"}) {
        const std::string s(cmd);
        const auto a = run(s);
        const auto b = run(s);
        CHECK(a.exit_code == 0);
        CHECK_MESSAGE(a.out == b.out, s);
    }
}
