#include <benchmark/benchmark.h>

#include "heisbcp/bcp_check.hpp"
#include "heisbcp/family_search.hpp"

using namespace heis;

namespace {

void BM_RotationalCheck(benchmark::State& state) {
    const Profile p = zoo_profile("d_eps", 1.0);
    for (auto _ : state) benchmark::DoNotOptimize(rotational_check(p));
}
BENCHMARK(BM_RotationalCheck);

void BM_SufficientCheckPhi2(benchmark::State& state) {
    const Profile p = zoo_profile("phi2");
    const auto grid = default_alpha_grid();
    for (auto _ : state)
        benchmark::DoNotOptimize(sufficient_check(p, grid, state.range(0), 32, 1));
}
BENCHMARK(BM_SufficientCheckPhi2)->Arg(24)->Arg(96);

void BM_FamilySearchGreedy(benchmark::State& state) {
    const DistanceOracle o = DistanceOracle::closed_form("koranyi");
    SearchConfig cfg;
    cfg.budget = state.range(0);
    cfg.strategy = SearchConfig::Strategy::Greedy;
    for (auto _ : state) benchmark::DoNotOptimize(search_family(o, cfg));
}
BENCHMARK(BM_FamilySearchGreedy)->Arg(10000);

void BM_EpsNet(benchmark::State& state) {
    const DistanceOracle o = DistanceOracle::closed_form("koranyi");
    for (auto _ : state) benchmark::DoNotOptimize(eps_net_greedy(o, 0.5, state.range(0), 42));
}
BENCHMARK(BM_EpsNet)->Arg(10000);

}  // namespace

BENCHMARK_MAIN();
