#pragma once

#include <vector>

#include "fatigue_bandit/model.hpp"
#include "fatigue_bandit/rng.hpp"

// Shared generators for randomized tests. Abandonment stays below 0.5 and
// an extra safety margin keeps q away from the degenerate q = 1 corner.

namespace test_helpers {

inline fatigue_bandit::ProblemInstance random_instance(int n_items, fatigue_bandit::SplitMix64& rng,
                                                       double u_hi = 1.0) {
    std::vector<double> rewards(n_items), prefs(n_items);
    for (double& r : rewards) r = fatigue_bandit::uniform01(rng);
    for (double& u : prefs) u = u_hi * fatigue_bandit::uniform01(rng);
    const double p = 0.02 + 0.48 * fatigue_bandit::uniform01(rng);
    const double cost = fatigue_bandit::uniform01(rng);
    return fatigue_bandit::ProblemInstance(rewards, prefs, p, cost);
}

// Random nonempty ordered subset of {0..n_items-1}.
inline fatigue_bandit::Sequence random_sequence(int n_items, fatigue_bandit::SplitMix64& rng) {
    std::vector<int> pool(n_items);
    for (int i = 0; i < n_items; ++i) pool[i] = i;
    for (int i = n_items - 1; i > 0; --i) {
        const int j = static_cast<int>(rng() % static_cast<std::uint64_t>(i + 1));
        std::swap(pool[i], pool[j]);
    }
    const int len = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(n_items));
    pool.resize(len);
    return fatigue_bandit::Sequence(pool);
}

// The worked instance used across the test suite: r=(0.9,0.5,0.2),
// u=(0.3,0.6,0.1), p=0.1, c=0.5. Its best sequence is (0,1); the third
// item's margin is negative.
inline fatigue_bandit::ProblemInstance worked_instance() {
    return fatigue_bandit::ProblemInstance({0.9, 0.5, 0.2}, {0.3, 0.6, 0.1}, 0.1, 0.5);
}

}  // namespace test_helpers
