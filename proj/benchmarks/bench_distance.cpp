#include <benchmark/benchmark.h>

#include <random>

#include "heisbcp/metric.hpp"

using namespace heis;

namespace {

std::vector<std::pair<GroupPoint, GroupPoint>> make_pairs(int n) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    std::vector<std::pair<GroupPoint, GroupPoint>> pairs;
    pairs.reserve(n);
    for (int i = 0; i < n; ++i)
        pairs.emplace_back(GroupPoint(u(rng), u(rng), u(rng)), GroupPoint(u(rng), u(rng), u(rng)));
    return pairs;
}

void BM_ClosedFormKoranyi(benchmark::State& state) {
    const DistanceOracle o = DistanceOracle::closed_form("koranyi");
    const auto pairs = make_pairs(1024);
    std::size_t i = 0;
    for (auto _ : state) {
        const auto& [p, q] = pairs[i++ & 1023];
        benchmark::DoNotOptimize(o.distance(p, q));
    }
}
BENCHMARK(BM_ClosedFormKoranyi);

void BM_GaugeKoranyi(benchmark::State& state) {
    const DistanceOracle o = DistanceOracle::gauge(zoo_profile("koranyi"));
    const auto pairs = make_pairs(1024);
    std::size_t i = 0;
    for (auto _ : state) {
        const auto& [p, q] = pairs[i++ & 1023];
        benchmark::DoNotOptimize(o.distance(p, q));
    }
}
BENCHMARK(BM_GaugeKoranyi);

void BM_GaugePhi1(benchmark::State& state) {
    const DistanceOracle o = DistanceOracle::gauge(zoo_profile("phi1"));
    const auto pairs = make_pairs(1024);
    std::size_t i = 0;
    for (auto _ : state) {
        const auto& [p, q] = pairs[i++ & 1023];
        benchmark::DoNotOptimize(o.distance(p, q));
    }
}
BENCHMARK(BM_GaugePhi1);

void BM_BallMembership(benchmark::State& state) {
    const Profile p = zoo_profile("phi2");
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<GroupPoint> pts;
    for (int i = 0; i < 1024; ++i) pts.push_back(GroupPoint(u(rng), u(rng), 2.0 * u(rng)));
    std::size_t i = 0;
    for (auto _ : state) benchmark::DoNotOptimize(p.ball_contains(pts[i++ & 1023]));
}
BENCHMARK(BM_BallMembership);

}  // namespace

BENCHMARK_MAIN();
