#pragma once

#include <stdexcept>

#include "fatigue_bandit/model.hpp"
#include "fatigue_bandit/rng.hpp"

// One simulated session: walk the offered sequence position by position,
// drawing select-or-not and stay-or-abandon Bernoullis per view, exactly
// mirroring the generative story behind the closed-form probabilities.

namespace fatigue_bandit {

enum class TerminalEvent {
    Selected,          // clicked the item at position viewed_count
    Abandoned,         // left after declining the item at position viewed_count
    ExhaustedNoSelect  // saw everything (viewed_count == |S|) without selecting
};

struct InteractionOutcome {
    int viewed_count = 0;  // number of items seen, in [0, |S|]
    TerminalEvent event = TerminalEvent::ExhaustedNoSelect;
    int item = -1;                  // selected item, -1 unless Selected
    double realized_utility = 0.0;  // r_item, -cost, or 0
};

template <class Rng>
InteractionOutcome simulate_user(const ProblemInstance& instance, const Sequence& seq, Rng& rng) {
    for (int it : seq)
        if (it >= instance.n_items())
            throw std::invalid_argument("simulate_user: sequence item out of range");
    InteractionOutcome out;
    for (std::size_t pos = 0; pos < seq.size(); ++pos) {
        const int it = seq[pos];
        out.viewed_count = static_cast<int>(pos) + 1;
        if (uniform01(rng) < instance.preferences()[it]) {
            out.event = TerminalEvent::Selected;
            out.item = it;
            out.realized_utility = instance.rewards()[it];
            return out;
        }
        if (uniform01(rng) < instance.abandon_prob()) {
            out.event = TerminalEvent::Abandoned;
            out.realized_utility = -instance.cost();
            return out;
        }
    }
    out.event = TerminalEvent::ExhaustedNoSelect;  // also covers the empty sequence
    return out;
}

}  // namespace fatigue_bandit
