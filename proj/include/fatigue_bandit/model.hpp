#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

// User model for sequential recommendation with abandonment.
//
// A sequence S = (I(1), .., I(m)) of distinct items is shown one by one.
// At each position the user selects the shown item with probability u_i,
// otherwise abandons the session with probability p = 1 - q, otherwise
// moves on. Reaching the end without selecting exhausts the session.
// Exactly one of {select item, abandon, exhaust} happens, and abandonment
// incurs a cost c, so the expected utility of offering S is
//   E[U(S)] = sum_i p_i(S) r_i - c * p_a(S).

namespace fatigue_bandit {

inline double clamp01(double x) { return x < 0.0 ? 0.0 : (x > 1.0 ? 1.0 : x); }

// Ordered list of distinct item indices.
class Sequence {
public:
    Sequence() = default;

    explicit Sequence(std::vector<int> items) : items_(std::move(items)) {
        std::vector<bool> seen;
        for (int it : items_) {
            if (it < 0) throw std::invalid_argument("Sequence: negative item index");
            if (static_cast<std::size_t>(it) >= seen.size()) seen.resize(it + 1, false);
            if (seen[it]) throw std::invalid_argument("Sequence: duplicate item " + std::to_string(it));
            seen[it] = true;
        }
    }

    std::size_t size() const { return items_.size(); }
    bool empty() const { return items_.empty(); }
    int operator[](std::size_t pos) const { return items_[pos]; }
    const std::vector<int>& items() const { return items_; }

    auto begin() const { return items_.begin(); }
    auto end() const { return items_.end(); }

    friend bool operator==(const Sequence& a, const Sequence& b) { return a.items_ == b.items_; }

private:
    std::vector<int> items_;
};

// Preference vector plus continuation probability, as used both for the
// true environment and for sampled/optimistic parameters. Values are
// clamped into [0, 1] at construction; non-finite input is rejected.
struct ParamVector {
    std::vector<double> preferences;
    double continue_prob = 1.0;

    ParamVector(std::vector<double> prefs, double q)
        : preferences(std::move(prefs)), continue_prob(q) {
        if (!std::isfinite(q)) throw std::invalid_argument("ParamVector: non-finite continue_prob");
        for (double& u : preferences) {
            if (!std::isfinite(u)) throw std::invalid_argument("ParamVector: non-finite preference");
            u = clamp01(u);
        }
        continue_prob = clamp01(continue_prob);
    }

    std::size_t n_items() const { return preferences.size(); }
};

// Immutable description of one bandit environment.
class ProblemInstance {
public:
    ProblemInstance(std::vector<double> rewards, std::vector<double> preferences,
                    double abandon_prob, double cost)
        : rewards_(std::move(rewards)),
          preferences_(std::move(preferences)),
          abandon_prob_(abandon_prob),
          cost_(cost) {
        if (rewards_.empty()) throw std::invalid_argument("ProblemInstance: no items");
        if (rewards_.size() != preferences_.size())
            throw std::invalid_argument("ProblemInstance: rewards/preferences size mismatch");
        for (double r : rewards_)
            if (!(r >= 0.0 && r <= 1.0)) throw std::invalid_argument("ProblemInstance: reward outside [0, 1]");
        for (double u : preferences_)
            if (!(u >= 0.0 && u <= 1.0)) throw std::invalid_argument("ProblemInstance: preference outside [0, 1]");
        if (!(abandon_prob_ >= 0.0 && abandon_prob_ <= 1.0))
            throw std::invalid_argument("ProblemInstance: abandon_prob outside [0, 1]");
        if (!(cost_ >= 0.0) || !std::isfinite(cost_))
            throw std::invalid_argument("ProblemInstance: cost must be finite and >= 0");
    }

    int n_items() const { return static_cast<int>(rewards_.size()); }
    const std::vector<double>& rewards() const { return rewards_; }
    const std::vector<double>& preferences() const { return preferences_; }
    double abandon_prob() const { return abandon_prob_; }
    double continue_prob() const { return 1.0 - abandon_prob_; }
    double cost() const { return cost_; }

    ParamVector params() const { return ParamVector(preferences_, continue_prob()); }

private:
    std::vector<double> rewards_;
    std::vector<double> preferences_;
    double abandon_prob_;
    double cost_;
};

namespace detail {

inline void check_items(const ParamVector& params, const Sequence& seq) {
    for (int it : seq)
        if (static_cast<std::size_t>(it) >= params.n_items())
            throw std::invalid_argument("sequence item " + std::to_string(it) + " out of range");
}

}  // namespace detail

// P(item is selected when S is offered): u_i at position 1, and at
// position l >= 2 the user must decline and not abandon l - 1 times,
// i.e. q^(l-1) * prod_{k<l} (1 - u_{I(k)}) * u_i. Zero for items not in S.
inline double selection_prob(const ParamVector& params, const Sequence& seq, int item) {
    detail::check_items(params, seq);
    if (item < 0 || static_cast<std::size_t>(item) >= params.n_items())
        throw std::invalid_argument("selection_prob: item out of range");
    const double q = params.continue_prob;
    double decline = 1.0;  // prod over earlier positions of (1 - u)
    for (std::size_t l = 0; l < seq.size(); ++l) {
        if (seq[l] == item) return std::pow(q, static_cast<double>(l)) * decline * params.preferences[item];
        decline *= 1.0 - params.preferences[seq[l]];
    }
    return 0.0;
}

// P(user abandons during S) = sum_{k=1..m} q^(k-1) (1-q) prod_{j<=k} (1 - u_{I(j)}).
inline double abandonment_prob(const ParamVector& params, const Sequence& seq) {
    detail::check_items(params, seq);
    const double q = params.continue_prob;
    double total = 0.0;
    double decline = 1.0;
    for (std::size_t k = 0; k < seq.size(); ++k) {
        decline *= 1.0 - params.preferences[seq[k]];
        total += std::pow(q, static_cast<double>(k)) * (1.0 - q) * decline;
    }
    return total;
}

// P(user views all of S without selecting or abandoning) = q^m prod (1 - u).
inline double exhaust_prob(const ParamVector& params, const Sequence& seq) {
    detail::check_items(params, seq);
    double result = 1.0;
    for (int it : seq) result *= params.continue_prob * (1.0 - params.preferences[it]);
    return result;
}

// E[U(S)] in one forward pass: w carries the probability of reaching the
// current position, contributing w*u*r for a selection and w*(1-u)*p*c for
// an abandonment at that position.
inline double expected_utility(const ParamVector& params, const std::vector<double>& rewards,
                               double cost, const Sequence& seq) {
    detail::check_items(params, seq);
    if (rewards.size() != params.n_items())
        throw std::invalid_argument("expected_utility: rewards size mismatch");
    const double q = params.continue_prob;
    double value = 0.0;
    double reach = 1.0;
    for (int it : seq) {
        const double u = params.preferences[it];
        value += reach * u * rewards[it];
        value -= cost * reach * (1.0 - u) * (1.0 - q);
        reach *= (1.0 - u) * q;
    }
    return value;
}

inline double expected_utility(const ProblemInstance& instance, const Sequence& seq) {
    return expected_utility(instance.params(), instance.rewards(), instance.cost(), seq);
}

}  // namespace fatigue_bandit
