#pragma once

// Reference values for the family search, computed independently of it:
// candidate ball centers come from a fixed quantized lattice of directions at
// three radius scales, and the largest Besicovitch family over those
// candidates is found by exhaustive branch-and-bound max clique.

#include <vector>

#include "heisbcp/family_search.hpp"

namespace heis_test {

struct LatticeFamilyResult {
    int cardinality = 0;
    heis::BesicovitchFamily family;
};

LatticeFamilyResult lattice_family_max(const heis::DistanceOracle& o, int angles = 12);

// Greedy eps-net over the same deterministic lattice (no RNG).
int lattice_net_size(const heis::DistanceOracle& o, double eps);

}  // namespace heis_test
