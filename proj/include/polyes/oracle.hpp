#pragma once

#include <cstddef>
#include <vector>

#include "polyes/fitness.hpp"

namespace polyes {

struct OracleResult {
    std::vector<int> argmin;
    double best_cost = 0.0;
    double runner_up_cost = 0.0;  // best cost among all other tuples
    std::size_t evaluated = 0;

    bool unique() const { return runner_up_cost > best_cost; }
};

/// Exhaustive search over non-decreasing integer pitch tuples in
/// [low, high]^notes. Chromosome cost is order-independent, so this covers
/// every chord. Ties resolve to the lexicographically smallest tuple.
OracleResult brute_force_oracle(const FitnessContext& ctx, int low, int high, std::size_t notes,
                                std::size_t threads = 1);

}  // namespace polyes
