#pragma once

// Empirical side of BCP: Besicovitch-family verification and search, the
// scale-bucket decomposition of sorted radius lists, and greedy eps-nets in
// the unit ball.

#include <cstdint>
#include <string>
#include <vector>

#include "heisbcp/metric.hpp"

namespace heis {

struct BesicovitchFamily {
    GroupPoint common_point;
    std::vector<Ball> balls;
};

struct FamilyCheck {
    bool ok = false;
    std::string diagnostics;  // names the first violated pair on failure
};

// Besicovitch family: the common point lies in every ball (within slack) and
// no ball's center lies in another ball (within slack).
FamilyCheck verify_family(const DistanceOracle& o, const BesicovitchFamily& f, double slack);

struct SearchConfig {
    long long budget = 100000;  // distance evaluations
    std::uint64_t seed = 1;
    enum class Strategy { Greedy, Anneal };
    Strategy strategy = Strategy::Anneal;
    double r_min = 0.25;
    double r_max = 1.0;
    double slack = 1e-8;  // must be >= 10x the oracle tolerance
};

struct TracePoint {
    long long evaluations;
    int best_cardinality;
};

struct SearchResult {
    BesicovitchFamily family;
    std::vector<TracePoint> trace;  // non-decreasing cardinality
    long long evaluations_used = 0;
};

// Centers are placed on spheres around the common point 0 (center = delta_r of
// a unit-sphere point), so 0 lies on every ball boundary. Budget exhaustion
// returns the best family found so far, never an invalid one.
SearchResult search_family(const DistanceOracle& o, const SearchConfig& cfg);

struct BucketDecomposition {
    double eps = 0.0;
    std::vector<int> leaders;               // i_k
    std::vector<std::vector<int>> buckets;  // I_k, a partition of all indices
};

// Iterative rule i_{k+1} = min{ j > i_k : r_j < eps * r_{i_k} } on a
// descending radius list.
BucketDecomposition scale_buckets(const std::vector<double>& radii_desc, double eps);

// Greedy maximal eps-separated subset of `candidates` random points of the
// unit ball around 0.
std::vector<GroupPoint> eps_net_greedy(const DistanceOracle& o, double eps, int candidates,
                                       std::uint64_t seed);
// Pool-explicit variant: scans the given candidates in order.
std::vector<GroupPoint> eps_net_greedy(const DistanceOracle& o, double eps,
                                       const std::vector<GroupPoint>& candidates);
// The candidate pool the seeded variant scans (delta_rho of unit-sphere
// points, rho = U^(1/4): uniform for the homogeneous volume).
std::vector<GroupPoint> unit_ball_sample(const DistanceOracle& o, int count, std::uint64_t seed);

std::string family_to_json(const BesicovitchFamily& f);
BesicovitchFamily family_from_json(const std::string& text);
std::string trace_to_csv(const std::vector<TracePoint>& trace);

}  // namespace heis
