#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "fatigue_bandit/interaction.hpp"
#include "fatigue_bandit/model.hpp"

// Sufficient statistics for the unknown parameters. Every view of item i
// is a Bernoulli(u_i) trial (select_counts vs fail_counts), and every
// declined view is a Bernoulli(q) trial for the continuation probability
// (no_abandon_count vs abandon_count). All counters start at 1, which both
// seeds the Beta priors and keeps ratio estimates defined.

namespace fatigue_bandit {

struct PosteriorState {
    std::vector<std::int64_t> select_counts;  // c_i
    std::vector<std::int64_t> fail_counts;    // f_i
    std::int64_t no_abandon_count = 1;        // n_e
    std::int64_t abandon_count = 1;           // n_a

    explicit PosteriorState(int n_items)
        : select_counts(static_cast<std::size_t>(n_items), 1),
          fail_counts(static_cast<std::size_t>(n_items), 1) {
        if (n_items < 1) throw std::invalid_argument("PosteriorState: need at least one item");
    }

    int n_items() const { return static_cast<int>(select_counts.size()); }
    std::int64_t views(int i) const { return select_counts[i] + fail_counts[i]; }  // T_i
    std::int64_t q_trials() const { return no_abandon_count + abandon_count; }     // N_q
};

struct Estimates {
    std::vector<double> u_hat;
    double q_hat = 0.0;
};

// Plug-in ratio estimates u_hat_i = c_i / T_i and q_hat = n_e / N_q.
inline Estimates unbiased_estimates(const PosteriorState& state) {
    Estimates est;
    est.u_hat.resize(state.select_counts.size());
    for (int i = 0; i < state.n_items(); ++i)
        est.u_hat[i] = static_cast<double>(state.select_counts[i]) / static_cast<double>(state.views(i));
    est.q_hat = static_cast<double>(state.no_abandon_count) / static_cast<double>(state.q_trials());
    return est;
}

// Folds one session into the counts. Every item viewed and declined gets a
// preference failure; declining without abandoning is evidence for q, and
// the abandonment click itself is evidence against it. A selection updates
// only the selected item's success count.
inline PosteriorState update_posterior(PosteriorState state, const Sequence& seq,
                                       const InteractionOutcome& outcome) {
    const int k = outcome.viewed_count;
    const int m = static_cast<int>(seq.size());
    if (k < 0 || k > m) throw std::invalid_argument("update_posterior: viewed_count out of range");
    for (int it : seq)
        if (it >= state.n_items()) throw std::invalid_argument("update_posterior: sequence item out of range");

    switch (outcome.event) {
        case TerminalEvent::Selected:
            if (k < 1 || outcome.item != seq[k - 1])
                throw std::invalid_argument("update_posterior: selected item does not match viewed position");
            break;
        case TerminalEvent::Abandoned:
            if (k < 1) throw std::invalid_argument("update_posterior: abandonment requires a viewed item");
            break;
        case TerminalEvent::ExhaustedNoSelect:
            if (k != m) throw std::invalid_argument("update_posterior: exhaustion must view the whole sequence");
            break;
    }

    for (int pos = 0; pos + 1 < k; ++pos) {  // declined and moved on
        state.fail_counts[seq[pos]] += 1;
        state.no_abandon_count += 1;
    }
    if (k >= 1) {
        const int last = seq[k - 1];
        switch (outcome.event) {
            case TerminalEvent::Selected:
                state.select_counts[last] += 1;
                break;
            case TerminalEvent::Abandoned:
                state.fail_counts[last] += 1;
                state.abandon_count += 1;
                break;
            case TerminalEvent::ExhaustedNoSelect:
                state.fail_counts[last] += 1;
                state.no_abandon_count += 1;
                break;
        }
    }
    return state;
}

}  // namespace fatigue_bandit
