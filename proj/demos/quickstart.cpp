// Minimal tour: plan a sequence for a known instance, then run a short
// bandit experiment and print the final regret per policy.

#include <cstdio>

#include "fatigue_bandit/fatigue_bandit.hpp"

namespace fb = fatigue_bandit;

int main() {
    const fb::ProblemInstance instance({0.9, 0.5, 0.2}, {0.3, 0.6, 0.1}, 0.1, 0.5);

    const fb::Sequence plan = fb::optimal_sequence(instance.params(), instance.rewards(), instance.cost());
    std::printf("optimal sequence:");
    for (int item : plan) std::printf(" %d", item);
    std::printf("  (expected utility %.4f)\n",
                fb::expected_utility(instance.params(), instance.rewards(), instance.cost(), plan));

    fb::ExperimentConfig cfg;
    cfg.n_items = 10;
    cfg.horizon = 5'000;
    cfg.replications = 4;
    cfg.seed = 42;
    cfg.policies = {fb::PolicyKind::BetaTs, fb::PolicyKind::Sbors, fb::PolicyKind::UcbBaseline};
    const fb::AggregateResult result = fb::run_experiment(cfg);
    for (const fb::PolicyAggregate& agg : result.policies)
        std::printf("%-8s final mean cumulative regret %8.2f over %zu replications\n",
                    fb::to_string(agg.policy).c_str(), agg.mean.back(), agg.replications.size());
    return 0;
}
