#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "fatigue_bandit/model.hpp"
#include "fatigue_bandit/oracle.hpp"
#include "fatigue_bandit/rng.hpp"
#include "helpers.hpp"

using namespace fatigue_bandit;
using Catch::Approx;

TEST_CASE("score_items reproduces the worked scores") {
    const ProblemInstance inst = test_helpers::worked_instance();
    const auto scored = score_items(inst.params(), inst.rewards(), inst.cost());
    REQUIRE(scored.size() == 3);
    REQUIRE(scored[0].score == Approx(0.235 / 0.37).epsilon(1e-12));
    REQUIRE(scored[1].score == Approx(0.28 / 0.64).epsilon(1e-12));
    REQUIRE(scored[2].margin == Approx(-0.025).epsilon(1e-12));
    REQUIRE(scored[0].margin > 0.0);
    REQUIRE(scored[1].margin > 0.0);
}

TEST_CASE("optimal_sequence keeps positive-margin items in score order") {
    SECTION("worked instance drops the losing third item") {
        REQUIRE(optimal_sequence(test_helpers::worked_instance()) == Sequence({0, 1}));
    }
    SECTION("a certain winner is offered alone") {
        REQUIRE(optimal_sequence(ParamVector({1.0}, 0.5), {1.0}, 0.7) == Sequence({0}));
    }
    SECTION("unselectable items are never offered") {
        REQUIRE(optimal_sequence(ParamVector({0.0, 0.0}, 0.9), {0.9, 0.9}, 0.5).empty());
    }
    SECTION("score ties break by ascending item index") {
        const ParamVector params({0.4, 0.4, 0.4}, 0.9);
        REQUIRE(optimal_sequence(params, {0.8, 0.8, 0.8}, 0.1) == Sequence({0, 1, 2}));
    }
    SECTION("degenerate q = 1 with u = 0 is rejected") {
        REQUIRE_THROWS_AS(optimal_sequence(ParamVector({0.5, 0.0}, 1.0), {0.5, 0.5}, 0.5),
                          std::domain_error);
    }
}

TEST_CASE("optimal_sequence output is ordered by score") {
    SplitMix64 rng(7101);
    for (int rep = 0; rep < 100; ++rep) {
        const int n = 2 + static_cast<int>(rng() % 6);
        const ProblemInstance inst = test_helpers::random_instance(n, rng);
        const auto scored = score_items(inst.params(), inst.rewards(), inst.cost());
        const Sequence best = optimal_sequence(inst);
        for (std::size_t k = 0; k + 1 < best.size(); ++k)
            REQUIRE(scored[best[k]].score >= scored[best[k + 1]].score);
        for (int it : best) REQUIRE(scored[it].margin > 0.0);
    }
}

TEST_CASE("brute_force_optimal handles the trivial cases") {
    SECTION("single positive-margin item") {
        const auto [seq, value] = brute_force_optimal(ParamVector({0.6}, 0.9), {0.8}, 0.1);
        REQUIRE(seq == Sequence({0}));
        REQUIRE(value == Approx(0.8 * 0.6 - 0.1 * 0.1 * 0.4).epsilon(1e-12));
    }
    SECTION("worthless items leave the empty sequence") {
        const auto [seq, value] = brute_force_optimal(ParamVector({0.0, 0.0}, 0.9), {0.9, 0.9}, 0.5);
        REQUIRE(seq.empty());
        REQUIRE(value == 0.0);
    }
    SECTION("too many items are refused") {
        const ParamVector params(std::vector<double>(8, 0.5), 0.9);
        REQUIRE_THROWS_AS(brute_force_optimal(params, std::vector<double>(8, 0.5), 0.5),
                          std::invalid_argument);
    }
}

TEST_CASE("closed-form planner matches exhaustive search") {
    SplitMix64 rng(424242);
    for (int n = 2; n <= 6; ++n) {
        for (int rep = 0; rep < 50; ++rep) {
            const ProblemInstance inst = test_helpers::random_instance(n, rng);
            const Sequence fast = optimal_sequence(inst);
            const auto [slow, slow_value] = brute_force_optimal(inst.params(), inst.rewards(), inst.cost());
            REQUIRE(expected_utility(inst, fast) == Approx(slow_value).margin(1e-9));
        }
    }
}

TEST_CASE("appending a negative-margin item lowers utility") {
    SplitMix64 rng(99);
    int exercised = 0;
    for (int rep = 0; rep < 200 && exercised < 50; ++rep) {
        const int n = 3 + static_cast<int>(rng() % 4);
        const ProblemInstance inst = test_helpers::random_instance(n, rng);
        const auto scored = score_items(inst.params(), inst.rewards(), inst.cost());
        const Sequence best = optimal_sequence(inst);
        for (const ScoredItem& s : scored) {
            if (s.margin > 0.0) continue;
            std::vector<int> extended = best.items();
            extended.push_back(s.item);
            REQUIRE(expected_utility(inst, Sequence(extended)) <=
                    expected_utility(inst, best) + 1e-12);
            ++exercised;
        }
    }
    REQUIRE(exercised >= 50);
}

TEST_CASE("brute_force_worst finds a sequence no better than doing nothing") {
    const ProblemInstance inst = test_helpers::worked_instance();
    const auto [seq, value] = brute_force_worst(inst.params(), inst.rewards(), inst.cost());
    REQUIRE(value <= 0.0);
    REQUIRE(value <= expected_utility(inst, Sequence({2})));
}
