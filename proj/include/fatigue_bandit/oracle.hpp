#pragma once

#include <algorithm>
#include <stdexcept>
#include <utility>
#include <vector>

#include "fatigue_bandit/model.hpp"

// Offline planner: given parameters (u, q), rewards r and abandonment cost
// c, the expected-utility-maximizing sequence ranks items by the score
//   theta_i = (r_i u_i - c (1-q) (1-u_i)) / (1 - q (1-u_i))
// in decreasing order and keeps exactly the items with positive numerator
// (the per-item margin): appending an item with margin <= 0 can never help,
// and any positive-margin item improves the tail it heads.

namespace fatigue_bandit {

struct ScoredItem {
    int item = 0;
    double score = 0.0;   // theta_i
    double margin = 0.0;  // r_i u_i - c (1-q) (1-u_i), the score's numerator
};

// Scores for every item, in item order. Throws std::domain_error when a
// denominator 1 - q (1 - u_i) is not strictly positive (only possible at
// q = 1 with u_i = 0, where the session never ends).
inline std::vector<ScoredItem> score_items(const ParamVector& params,
                                           const std::vector<double>& rewards, double cost) {
    if (rewards.size() != params.n_items())
        throw std::invalid_argument("score_items: rewards size mismatch");
    const double q = params.continue_prob;
    std::vector<ScoredItem> scored(params.n_items());
    for (std::size_t i = 0; i < params.n_items(); ++i) {
        const double u = params.preferences[i];
        const double margin = rewards[i] * u - cost * (1.0 - q) * (1.0 - u);
        const double denom = 1.0 - q * (1.0 - u);
        if (!(denom > 0.0)) throw std::domain_error("score_items: degenerate instance (q = 1 with u_i = 0)");
        scored[i] = {static_cast<int>(i), margin / denom, margin};
    }
    return scored;
}

// Best sequence: positive-margin items sorted by decreasing score, ties
// broken by ascending item index.
inline Sequence optimal_sequence(const ParamVector& params, const std::vector<double>& rewards,
                                 double cost) {
    std::vector<ScoredItem> scored = score_items(params, rewards, cost);
    std::sort(scored.begin(), scored.end(), [](const ScoredItem& a, const ScoredItem& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.item < b.item;
    });
    std::vector<int> items;
    for (const ScoredItem& s : scored)
        if (s.margin > 0.0) items.push_back(s.item);
    return Sequence(std::move(items));
}

inline Sequence optimal_sequence(const ProblemInstance& instance) {
    return optimal_sequence(instance.params(), instance.rewards(), instance.cost());
}

namespace detail {

// Visits every ordered arrangement of every subset of {0..n-1}, including
// the empty one. Depth-first, extending by ascending unused index, so the
// visit order is deterministic.
template <class Visit>
void for_each_sequence(int n, Visit&& visit) {
    std::vector<int> path;
    std::vector<bool> used(n, false);
    auto walk = [&](auto&& self) -> void {
        visit(path);
        for (int i = 0; i < n; ++i) {
            if (used[i]) continue;
            used[i] = true;
            path.push_back(i);
            self(self);
            path.pop_back();
            used[i] = false;
        }
    };
    walk(walk);
}

template <class Better>
std::pair<Sequence, double> brute_force_extremum(const ParamVector& params,
                                                 const std::vector<double>& rewards, double cost,
                                                 int max_n, Better better) {
    const int n = static_cast<int>(params.n_items());
    if (n > max_n)
        throw std::invalid_argument("brute force refused: " + std::to_string(n) + " items exceeds max_n " +
                                    std::to_string(max_n));
    std::vector<int> best_items;
    double best_value = 0.0;  // value of the empty sequence
    bool first = true;
    for_each_sequence(n, [&](const std::vector<int>& path) {
        const double value = expected_utility(params, rewards, cost, Sequence(path));
        if (first || better(value, best_value)) {
            best_value = value;
            best_items = path;
            first = false;
        }
    });
    return {Sequence(std::move(best_items)), best_value};
}

}  // namespace detail

// Exhaustive maximizer over all ordered subsets. Deliberately shares no
// logic with optimal_sequence so the two can cross-check each other.
inline std::pair<Sequence, double> brute_force_optimal(const ParamVector& params,
                                                       const std::vector<double>& rewards,
                                                       double cost, int max_n = 7) {
    return detail::brute_force_extremum(params, rewards, cost, max_n,
                                        [](double a, double b) { return a > b; });
}

// Exhaustive minimizer; used by tests as a maximally bad reference policy.
inline std::pair<Sequence, double> brute_force_worst(const ParamVector& params,
                                                     const std::vector<double>& rewards,
                                                     double cost, int max_n = 7) {
    return detail::brute_force_extremum(params, rewards, cost, max_n,
                                        [](double a, double b) { return a < b; });
}

}  // namespace fatigue_bandit
