#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "fatigue_bandit/interaction.hpp"
#include "fatigue_bandit/model.hpp"
#include "fatigue_bandit/oracle.hpp"
#include "fatigue_bandit/policies.hpp"
#include "fatigue_bandit/posterior.hpp"
#include "fatigue_bandit/rng.hpp"

// One learning run: repeat select -> simulate -> update for T rounds and
// record pseudo-regret against the true optimum. Policy randomness and
// user randomness come from separate seeds, and the user stream is
// re-derived per round, so runs with different policies but equal user
// seeds face identical luck round by round.

namespace fatigue_bandit {

struct RegretTrace {
    std::vector<double> per_round;   // E[U(S*)] - E[U(S^t)], true parameters
    std::vector<double> cumulative;  // running sum of per_round
    std::vector<int> offered_lengths;
    std::vector<double> realized;  // realized utilities, diagnostics only
    double optimal_utility = 0.0;  // E[U(S*)]
};

// Gap to the best sequence under the true parameters; >= 0 up to rounding.
inline double pseudo_regret(const ProblemInstance& instance, const Sequence& seq) {
    const Sequence best = optimal_sequence(instance);
    return expected_utility(instance, best) - expected_utility(instance, seq);
}

struct EpisodeSeeds {
    std::uint64_t policy_stream = 0;
    std::uint64_t user_stream = 0;
};

inline RegretTrace run_episode(const ProblemInstance& instance, PolicyKind policy,
                               const PolicyConfig& cfg, std::int64_t horizon, EpisodeSeeds seeds) {
    if (horizon < 1) throw std::invalid_argument("run_episode: horizon must be >= 1");

    const Sequence best = optimal_sequence(instance);
    const double best_utility = expected_utility(instance, best);

    // Truth-based hooks offer one fixed sequence every round.
    const bool fixed_policy = policy == PolicyKind::OracleTruth || policy == PolicyKind::WorstTruth;
    Sequence fixed_seq;
    if (policy == PolicyKind::OracleTruth) fixed_seq = best;
    if (policy == PolicyKind::WorstTruth)
        fixed_seq = brute_force_worst(instance.params(), instance.rewards(), instance.cost()).first;

    PosteriorState state(instance.n_items());
    std::mt19937_64 policy_rng(seeds.policy_stream);

    RegretTrace trace;
    trace.optimal_utility = best_utility;
    trace.per_round.reserve(horizon);
    trace.cumulative.reserve(horizon);
    trace.offered_lengths.reserve(horizon);
    trace.realized.reserve(horizon);

    double cumulative = 0.0;
    for (std::int64_t t = 1; t <= horizon; ++t) {
        const Sequence seq = fixed_policy
                                 ? fixed_seq
                                 : select_sequence(policy, state, cfg, t, instance.rewards(),
                                                   instance.cost(), policy_rng);
        SplitMix64 user_rng(derive_substream(seeds.user_stream, static_cast<std::uint64_t>(t)));
        const InteractionOutcome outcome = simulate_user(instance, seq, user_rng);
        state = update_posterior(std::move(state), seq, outcome);

        const double regret = best_utility - expected_utility(instance, seq);
        cumulative += regret;
        trace.per_round.push_back(regret);
        trace.cumulative.push_back(cumulative);
        trace.offered_lengths.push_back(static_cast<int>(seq.size()));
        trace.realized.push_back(outcome.realized_utility);
    }
    return trace;
}

}  // namespace fatigue_bandit
