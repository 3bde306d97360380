#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "fatigue_bandit/interaction.hpp"
#include "fatigue_bandit/model.hpp"
#include "fatigue_bandit/oracle.hpp"
#include "fatigue_bandit/posterior.hpp"
#include "fatigue_bandit/rng.hpp"

// Statistical self-checks: empirical verification of the concentration,
// monotonicity and Lipschitz properties the regret analysis rests on, plus
// an estimator-unbiasedness check. Each returns a report rather than
// throwing, so callers can print counterexamples.

namespace fatigue_bandit {

// Utility evaluation used by the lemma checks; injectable so the test
// suite can prove the checks are not vacuous by corrupting it.
using UtilityFn =
    std::function<double(const ParamVector&, const std::vector<double>&, double, const Sequence&)>;

// Deliberately wrong utility (abandonment term sign flipped). Exists only
// to self-test the checkers: running them with this must report violations.
inline double mutant_pa_sign_utility(const ParamVector& params, const std::vector<double>& rewards,
                                     double cost, const Sequence& seq) {
    return expected_utility(params, rewards, cost, seq) + 2.0 * cost * abandonment_prob(params, seq);
}

struct ConcentrationCase {
    double u = 0.0;          // true Bernoulli mean
    double rho = 0.0;        // grid point
    std::int64_t trials = 0;
    std::int64_t violations = 0;
    double rate = 0.0;       // violations / trials
    double bound = 0.0;      // 2 / rho^(2 beta)
    double allowed = 0.0;    // bound with the finite-sample slack factor
    bool passed = false;
};

struct ConcentrationReport {
    std::vector<ConcentrationCase> cases;
    bool passed = true;
};

// Draws `views` Bernoulli(u) observations per trial and tests how often
// the empirical mean leaves the radius
//   sqrt(alpha u_hat (1 - u_hat) log rho / (views + 1)) + sqrt(beta log rho / views).
// The miss rate must stay within 2x of the analytical bound 2 / rho^(2 beta).
inline ConcentrationReport check_concentration(std::int64_t trials, double beta,
                                               const std::vector<double>& rho_grid,
                                               std::uint64_t seed, double alpha = 1.0,
                                               const std::vector<double>& u_grid = {0.0, 0.1, 0.5,
                                                                                    0.9},
                                               int views = 100) {
    if (trials < 1) throw std::invalid_argument("check_concentration: trials must be >= 1");
    ConcentrationReport report;
    const double slack = 2.0;
    for (double u : u_grid) {
        SplitMix64 rng(derive_substream(seed, static_cast<std::uint64_t>(u * 1e6)));
        std::vector<std::int64_t> violations(rho_grid.size(), 0);
        for (std::int64_t trial = 0; trial < trials; ++trial) {
            int successes = 0;
            for (int v = 0; v < views; ++v)
                if (uniform01(rng) < u) ++successes;
            const double u_hat = static_cast<double>(successes) / views;
            const double dev = std::abs(u_hat - u);
            for (std::size_t r = 0; r < rho_grid.size(); ++r) {
                const double log_rho = std::log(rho_grid[r]);
                const double radius = std::sqrt(alpha * u_hat * (1.0 - u_hat) * log_rho / (views + 1.0)) +
                                      std::sqrt(beta * log_rho / views);
                if (dev >= radius) ++violations[r];
            }
        }
        for (std::size_t r = 0; r < rho_grid.size(); ++r) {
            ConcentrationCase c;
            c.u = u;
            c.rho = rho_grid[r];
            c.trials = trials;
            c.violations = violations[r];
            c.rate = static_cast<double>(violations[r]) / static_cast<double>(trials);
            c.bound = 2.0 / std::pow(rho_grid[r], 2.0 * beta);
            c.allowed = slack * c.bound;
            c.passed = c.rate <= c.allowed;
            report.passed = report.passed && c.passed;
            report.cases.push_back(c);
        }
    }
    return report;
}

struct LemmaReport {
    std::string name;
    std::int64_t checked = 0;
    std::int64_t violations = 0;
    double max_excess = 0.0;  // worst (violating side minus allowed side)
    std::string first_counterexample;
    bool passed = true;
};

namespace detail {

inline UtilityFn resolve_utility(UtilityFn util) {
    if (util) return util;
    return [](const ParamVector& p, const std::vector<double>& r, double c, const Sequence& s) {
        return expected_utility(p, r, c, s);
    };
}

inline std::string describe_pair(const std::vector<double>& v, double q_v,
                                 const std::vector<double>& w, double q_w,
                                 const std::vector<double>& rewards, double cost,
                                 const Sequence& seq, double lhs, double rhs) {
    std::ostringstream os;
    os.precision(17);
    auto list = [&os](const char* name, const std::vector<double>& xs) {
        os << name << "=[";
        for (std::size_t i = 0; i < xs.size(); ++i) os << (i ? "," : "") << xs[i];
        os << "] ";
    };
    list("v", v);
    os << "q_v=" << q_v << " ";
    list("w", w);
    os << "q_w=" << q_w << " ";
    list("r", rewards);
    os << "cost=" << cost << " seq=[";
    for (std::size_t i = 0; i < seq.size(); ++i) os << (i ? "," : "") << seq[i];
    os << "] lhs=" << lhs << " rhs=" << rhs;
    return os.str();
}

}  // namespace detail

// For random parameter pairs, the utility of the v-optimal sequence may
// move by at most sum over its items of 2|v_i - w_i| + (N+1)|q_v - q_w|.
inline LemmaReport check_lipschitz(int n_items, std::int64_t pairs, std::uint64_t seed,
                                   double tol = 1e-9, UtilityFn util = {}) {
    const UtilityFn u_fn = detail::resolve_utility(std::move(util));
    SplitMix64 rng(seed);
    LemmaReport report;
    report.name = "lipschitz";
    for (std::int64_t k = 0; k < pairs; ++k) {
        std::vector<double> v(n_items), w(n_items), rewards(n_items);
        for (double& x : v) x = uniform01(rng);
        for (double& x : w) x = uniform01(rng);
        for (double& x : rewards) x = uniform01(rng);
        const double q_v = uniform01(rng);
        const double q_w = uniform01(rng);
        const double cost = uniform01(rng);
        const ParamVector pv(v, q_v), pw(w, q_w);
        const Sequence seq = optimal_sequence(pv, rewards, cost);
        const double lhs = std::abs(u_fn(pv, rewards, cost, seq) - u_fn(pw, rewards, cost, seq));
        double rhs = 0.0;
        for (int it : seq) rhs += 2.0 * std::abs(v[it] - w[it]) + (n_items + 1.0) * std::abs(q_v - q_w);
        ++report.checked;
        if (lhs > rhs + tol) {
            ++report.violations;
            report.max_excess = std::max(report.max_excess, lhs - rhs);
            if (report.first_counterexample.empty())
                report.first_counterexample =
                    detail::describe_pair(v, q_v, w, q_w, rewards, cost, seq, lhs, rhs);
        }
    }
    report.passed = report.violations == 0;
    return report;
}

// For dominating parameters (w >= v coordinate-wise, q_w >= q_v), the
// v-optimal sequence cannot lose utility when evaluated under (w, q_w).
inline LemmaReport check_monotonicity(int n_items, std::int64_t pairs, std::uint64_t seed,
                                      double tol = 1e-9, UtilityFn util = {}) {
    const UtilityFn u_fn = detail::resolve_utility(std::move(util));
    SplitMix64 rng(seed);
    LemmaReport report;
    report.name = "monotonicity";
    for (std::int64_t k = 0; k < pairs; ++k) {
        std::vector<double> v(n_items), w(n_items), rewards(n_items);
        for (double& x : v) x = uniform01(rng);
        for (int i = 0; i < n_items; ++i) w[i] = v[i] + (1.0 - v[i]) * uniform01(rng);
        for (double& x : rewards) x = uniform01(rng);
        const double q_v = uniform01(rng);
        const double q_w = q_v + (1.0 - q_v) * uniform01(rng);
        const double cost = uniform01(rng);
        const ParamVector pv(v, q_v), pw(w, q_w);
        const Sequence seq = optimal_sequence(pv, rewards, cost);
        const double low = u_fn(pv, rewards, cost, seq);
        const double high = u_fn(pw, rewards, cost, seq);
        ++report.checked;
        if (high < low - tol) {
            ++report.violations;
            report.max_excess = std::max(report.max_excess, low - high);
            if (report.first_counterexample.empty())
                report.first_counterexample =
                    detail::describe_pair(v, q_v, w, q_w, rewards, cost, seq, high, low);
        }
    }
    report.passed = report.violations == 0;
    return report;
}

struct UnbiasednessReport {
    std::vector<int> checked_items;
    std::vector<double> u_true, u_hat, u_radius;  // radius = 3 sqrt(u_hat (1-u_hat) / T_i)
    double q_true = 0.0, q_hat = 0.0, q_radius = 0.0;
    bool passed = true;
};

// Offers one fixed sequence for `rounds` sessions and checks the ratio
// estimates land within three standard errors of the truth.
inline UnbiasednessReport check_unbiasedness(const ProblemInstance& instance, const Sequence& seq,
                                             std::int64_t rounds, std::uint64_t seed) {
    if (rounds < 1) throw std::invalid_argument("check_unbiasedness: rounds must be >= 1");
    PosteriorState state(instance.n_items());
    for (std::int64_t t = 1; t <= rounds; ++t) {
        SplitMix64 rng(derive_substream(seed, static_cast<std::uint64_t>(t)));
        state = update_posterior(std::move(state), seq, simulate_user(instance, seq, rng));
    }
    const Estimates est = unbiased_estimates(state);
    UnbiasednessReport report;
    for (int it : seq) {
        const double u_hat = est.u_hat[it];
        const double radius =
            3.0 * std::sqrt(u_hat * (1.0 - u_hat) / static_cast<double>(state.views(it)));
        report.checked_items.push_back(it);
        report.u_true.push_back(instance.preferences()[it]);
        report.u_hat.push_back(u_hat);
        report.u_radius.push_back(radius);
        report.passed = report.passed && std::abs(u_hat - instance.preferences()[it]) <= radius;
    }
    report.q_true = instance.continue_prob();
    report.q_hat = est.q_hat;
    report.q_radius = 3.0 * std::sqrt(est.q_hat * (1.0 - est.q_hat) /
                                      static_cast<double>(state.q_trials()));
    report.passed = report.passed && std::abs(report.q_hat - report.q_true) <= report.q_radius;
    return report;
}

}  // namespace fatigue_bandit
