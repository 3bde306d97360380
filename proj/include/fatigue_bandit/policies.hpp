#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "fatigue_bandit/model.hpp"
#include "fatigue_bandit/oracle.hpp"
#include "fatigue_bandit/posterior.hpp"

// Online policies. Each round a policy turns the posterior counts into a
// ParamVector (posterior sample or optimistic index) and offers the
// planner-optimal sequence under it. Outputs are clamped into [0,1]; the
// continuation probability additionally stays below 1 so the planner's
// score denominators remain positive.

namespace fatigue_bandit {

inline constexpr double kMaxContinueProb = 1.0 - 1e-9;

enum class PolicyKind {
    BetaTs,       // Thompson sampling with Beta posteriors
    Sbors,        // correlated-Gaussian optimistic sampling
    UcbBaseline,  // mean + sqrt(2 log t / T) bonus
    UcbV,         // variance-aware UCB
    OracleTruth,  // test hook: always offers the true optimum
    WorstTruth,   // test hook: always offers the utility minimizer
};

inline std::string to_string(PolicyKind kind) {
    switch (kind) {
        case PolicyKind::BetaTs: return "beta-ts";
        case PolicyKind::Sbors: return "sbors";
        case PolicyKind::UcbBaseline: return "ucb";
        case PolicyKind::UcbV: return "ucb-v";
        case PolicyKind::OracleTruth: return "oracle";
        case PolicyKind::WorstTruth: return "worst";
    }
    throw std::logic_error("to_string: unknown PolicyKind");
}

inline PolicyKind policy_from_name(const std::string& name) {
    if (name == "beta-ts") return PolicyKind::BetaTs;
    if (name == "sbors") return PolicyKind::Sbors;
    if (name == "ucb") return PolicyKind::UcbBaseline;
    if (name == "ucb-v") return PolicyKind::UcbV;
    if (name == "oracle") return PolicyKind::OracleTruth;
    if (name == "worst") return PolicyKind::WorstTruth;
    throw std::invalid_argument("unknown policy '" + name +
                                "' (expected beta-ts, sbors, ucb, ucb-v, oracle or worst)");
}

struct SborsConfig {
    double alpha = 1.0;   // scales the binomial-variance term
    double beta = 2.0;    // scales the 1/T exploration term; > 0, warn below 2
    int n_samples = 10;   // R, optimistic samples per round

    void validate() const {
        if (!(alpha > 0.0) || !std::isfinite(alpha))
            throw std::invalid_argument("sbors alpha must be finite and > 0");
        if (!(beta > 0.0) || !std::isfinite(beta))
            throw std::invalid_argument("sbors beta must be finite and > 0");
        if (n_samples < 1) throw std::invalid_argument("sbors n_samples must be >= 1");
    }
};

struct UcbVConfig {
    double support_bound = 1.0;  // b in the second-order bonus b log t / T

    void validate() const {
        if (!(support_bound > 0.0) || !std::isfinite(support_bound))
            throw std::invalid_argument("ucb-v support_bound must be finite and > 0");
    }
};

struct PolicyConfig {
    SborsConfig sbors;
    UcbVConfig ucb_v;
};

namespace detail {

inline ParamVector finalize_policy_params(std::vector<double> u, double q) {
    return ParamVector(std::move(u), std::min(q, kMaxContinueProb));
}

// Beta(a, b) via the two-Gamma construction; falls back to the mean in the
// measure-zero event that both Gamma draws underflow to 0.
template <class Rng>
double beta_draw(double a, double b, Rng& rng) {
    std::gamma_distribution<double> ga(a, 1.0), gb(b, 1.0);
    const double x = ga(rng);
    const double y = gb(rng);
    const double den = x + y;
    return den > 0.0 ? x / den : a / (a + b);
}

}  // namespace detail

// Algorithm step (a): u'_i ~ Beta(c_i, f_i), q' ~ Beta(n_e, n_a).
template <class Rng>
ParamVector beta_ts_sample(const PosteriorState& state, Rng& rng) {
    std::vector<double> u(state.select_counts.size());
    for (int i = 0; i < state.n_items(); ++i)
        u[i] = detail::beta_draw(static_cast<double>(state.select_counts[i]),
                                 static_cast<double>(state.fail_counts[i]), rng);
    const double q = detail::beta_draw(static_cast<double>(state.no_abandon_count),
                                       static_cast<double>(state.abandon_count), rng);
    return detail::finalize_policy_params(std::move(u), q);
}

struct SborsStats {
    std::vector<double> u_hat, sigma_u;
    double q_hat = 0.0, sigma_q = 0.0;
};

// Gaussian approximation around the ratio estimates:
//   sigma = sqrt(alpha * m(1-m) / (n+1)) + sqrt(beta / n).
inline SborsStats sbors_stats(const PosteriorState& state, const SborsConfig& cfg) {
    cfg.validate();
    auto sigma = [&](double mean, std::int64_t n) {
        return std::sqrt(cfg.alpha * mean * (1.0 - mean) / (static_cast<double>(n) + 1.0)) +
               std::sqrt(cfg.beta / static_cast<double>(n));
    };
    const Estimates est = unbiased_estimates(state);
    SborsStats stats;
    stats.u_hat = est.u_hat;
    stats.sigma_u.resize(est.u_hat.size());
    for (int i = 0; i < state.n_items(); ++i) stats.sigma_u[i] = sigma(est.u_hat[i], state.views(i));
    stats.q_hat = est.q_hat;
    stats.sigma_q = sigma(est.q_hat, state.q_trials());
    return stats;
}

// Correlated optimistic sample for given standard-normal draws: one shared
// theta per sample j perturbs every item and q, and the element-wise max
// over j is returned unclamped. With sigma >= 0 that max is simply
// mean + sigma * max_j theta_j.
inline std::pair<std::vector<double>, double> sbors_sample_raw(const PosteriorState& state,
                                                               const SborsConfig& cfg,
                                                               std::span<const double> normal_draws) {
    if (normal_draws.empty()) throw std::invalid_argument("sbors_sample_raw: no draws");
    const SborsStats stats = sbors_stats(state, cfg);
    const double theta = *std::max_element(normal_draws.begin(), normal_draws.end());
    std::vector<double> u(stats.u_hat.size());
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = stats.u_hat[i] + theta * stats.sigma_u[i];
    return {std::move(u), stats.q_hat + theta * stats.sigma_q};
}

template <class Rng>
ParamVector sbors_sample(const PosteriorState& state, const SborsConfig& cfg, Rng& rng) {
    cfg.validate();
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> draws(static_cast<std::size_t>(cfg.n_samples));
    for (double& d : draws) d = normal(rng);
    auto [u, q] = sbors_sample_raw(state, cfg, draws);
    for (double& v : u) v = clamp01(v);
    return detail::finalize_policy_params(std::move(u), clamp01(q));
}

// Variance-aware optimistic indices:
//   u: u_hat + sqrt(2 u_hat (1 - u_hat) log t / T_i) + b log t / T_i
//   q: q_hat + sqrt(2 log t / N_q)
inline ParamVector ucb_v_indices(const PosteriorState& state, const UcbVConfig& cfg, std::int64_t t) {
    cfg.validate();
    if (t < 1) throw std::invalid_argument("ucb_v_indices: round number must be >= 1");
    const double log_t = std::log(static_cast<double>(t));
    const Estimates est = unbiased_estimates(state);
    std::vector<double> u(est.u_hat.size());
    for (int i = 0; i < state.n_items(); ++i) {
        const double m = est.u_hat[i];
        const double n = static_cast<double>(state.views(i));
        u[i] = clamp01(m + std::sqrt(2.0 * m * (1.0 - m) * log_t / n) + cfg.support_bound * log_t / n);
    }
    const double q =
        clamp01(est.q_hat + std::sqrt(2.0 * log_t / static_cast<double>(state.q_trials())));
    return detail::finalize_policy_params(std::move(u), q);
}

// Plain optimistic indices: mean + sqrt(2 log t / n) for u and q alike.
inline ParamVector ucb_baseline_indices(const PosteriorState& state, std::int64_t t) {
    if (t < 1) throw std::invalid_argument("ucb_baseline_indices: round number must be >= 1");
    const double log_t = std::log(static_cast<double>(t));
    const Estimates est = unbiased_estimates(state);
    std::vector<double> u(est.u_hat.size());
    for (int i = 0; i < state.n_items(); ++i)
        u[i] = clamp01(est.u_hat[i] + std::sqrt(2.0 * log_t / static_cast<double>(state.views(i))));
    const double q =
        clamp01(est.q_hat + std::sqrt(2.0 * log_t / static_cast<double>(state.q_trials())));
    return detail::finalize_policy_params(std::move(u), q);
}

// One decision: build the policy's ParamVector and plan under it. The two
// truth-based test hooks bypass the posterior and are handled by the
// episode runner instead.
template <class Rng>
Sequence select_sequence(PolicyKind policy, const PosteriorState& state, const PolicyConfig& cfg,
                         std::int64_t t, const std::vector<double>& rewards, double cost, Rng& rng) {
    switch (policy) {
        case PolicyKind::BetaTs: return optimal_sequence(beta_ts_sample(state, rng), rewards, cost);
        case PolicyKind::Sbors:
            return optimal_sequence(sbors_sample(state, cfg.sbors, rng), rewards, cost);
        case PolicyKind::UcbBaseline:
            return optimal_sequence(ucb_baseline_indices(state, t), rewards, cost);
        case PolicyKind::UcbV: return optimal_sequence(ucb_v_indices(state, cfg.ucb_v, t), rewards, cost);
        case PolicyKind::OracleTruth:
        case PolicyKind::WorstTruth:
            throw std::invalid_argument("select_sequence: truth-based policies need the true instance");
    }
    throw std::logic_error("select_sequence: unknown PolicyKind");
}

}  // namespace fatigue_bandit
