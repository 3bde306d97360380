// Command-line front end: run experiments, compare policies under common
// random numbers, sweep a parameter, verify the statistical properties the
// analysis relies on, and cross-check the planner against brute force.
//
// Exit codes: 0 success, 1 runtime or verification failure, 2 usage or
// config error.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "fatigue_bandit/fatigue_bandit.hpp"

namespace fb = fatigue_bandit;

namespace {

struct InlineFlags {
    std::string config_path;
    std::vector<std::string> policies;
    int n_items = 30;
    std::int64_t horizon = 10'000;
    int reps = 10;
    std::uint64_t seed = 1;
    double p = 0.1;
    double cost = 0.5;
    double u_max = 1.0;
    double alpha = 1.0;
    double beta = 2.0;
    int n_samples = 10;
    double support_bound = 1.0;
    std::string out;
};

// Registers the shared run/compare/sweep flags on a subcommand. Returns the
// option pointers that conflict with --config so the caller can detect
// mixed usage.
std::vector<CLI::Option*> add_experiment_flags(CLI::App* cmd, InlineFlags& flags) {
    cmd->add_option("--config", flags.config_path, "JSON config file (replaces inline flags)");
    std::vector<CLI::Option*> inline_opts;
    inline_opts.push_back(cmd->add_option("--policy", flags.policies, "Policy to run (repeatable)")
                              ->check(CLI::IsMember({"beta-ts", "sbors", "ucb", "ucb-v", "oracle",
                                                     "worst"})));
    inline_opts.push_back(cmd->add_option("--n-items", flags.n_items, "Catalog size"));
    inline_opts.push_back(cmd->add_option("--horizon", flags.horizon, "Rounds per replication"));
    inline_opts.push_back(cmd->add_option("--reps", flags.reps, "Independent replications"));
    inline_opts.push_back(cmd->add_option("--seed", flags.seed, "Master seed"));
    inline_opts.push_back(cmd->add_option("--p", flags.p, "Abandonment probability"));
    inline_opts.push_back(cmd->add_option("--cost", flags.cost, "Abandonment cost"));
    inline_opts.push_back(
        cmd->add_option("--u-max", flags.u_max, "Preferences drawn uniformly from [0, u-max]"));
    inline_opts.push_back(cmd->add_option("--alpha", flags.alpha, "Gaussian width: variance scale"));
    inline_opts.push_back(cmd->add_option("--beta", flags.beta, "Gaussian width: exploration scale"));
    inline_opts.push_back(cmd->add_option("--R", flags.n_samples, "Optimistic samples per round"));
    inline_opts.push_back(cmd->add_option("--b", flags.support_bound, "Second-order bonus scale"));
    cmd->add_option("--out", flags.out, "Output CSV path");
    return inline_opts;
}

fb::ExperimentConfig assemble_config(const InlineFlags& flags,
                                     const std::vector<CLI::Option*>& inline_opts) {
    fb::ExperimentConfig cfg;
    if (!flags.config_path.empty()) {
        for (const CLI::Option* opt : inline_opts)
            if (opt->count() > 0)
                throw fb::ConfigError("--config cannot be combined with " + opt->get_name());
        cfg = fb::config_from_file(flags.config_path);
    } else {
        cfg.n_items = flags.n_items;
        cfg.horizon = flags.horizon;
        cfg.replications = flags.reps;
        cfg.seed = flags.seed;
        cfg.abandon_prob = flags.p;
        cfg.cost = flags.cost;
        cfg.pref_dist = fb::DistSpec::uniform(0.0, flags.u_max);
        cfg.policy_cfg.sbors.alpha = flags.alpha;
        cfg.policy_cfg.sbors.beta = flags.beta;
        cfg.policy_cfg.sbors.n_samples = flags.n_samples;
        cfg.policy_cfg.ucb_v.support_bound = flags.support_bound;
        cfg.policies.clear();
        if (flags.policies.empty()) cfg.policies.push_back(fb::PolicyKind::BetaTs);
        for (const std::string& name : flags.policies)
            cfg.policies.push_back(fb::policy_from_name(name));
    }
    if (!flags.out.empty()) cfg.out_path = flags.out;
    if (cfg.out_path.empty()) throw fb::ConfigError("--out (or config key \"out\") is required");
    cfg.validate();
    for (const std::string& warning : cfg.warnings()) std::cerr << "warning: " << warning << "\n";
    return cfg;
}

void print_policy_summaries(const fb::AggregateResult& result, const std::string& prefix = "") {
    for (const fb::PolicyAggregate& pa : result.policies)
        std::printf("%s%s: mean final cumulative regret %.6g over %zu replications\n",
                    prefix.c_str(), fb::to_string(pa.policy).c_str(), pa.mean.back(),
                    pa.replications.size());
}

int cmd_run(const fb::ExperimentConfig& cfg, bool print_ratios) {
    const fb::AggregateResult result = fb::run_experiment(cfg);
    fb::emit_csv(result, cfg.out_path);
    fb::emit_meta_json(cfg, cfg.out_path);
    print_policy_summaries(result);
    if (print_ratios && result.policies.size() > 1) {
        const double reference = result.policies[0].mean.back();
        const std::string ref_name = fb::to_string(result.policies[0].policy);
        for (std::size_t p = 1; p < result.policies.size(); ++p) {
            const std::string name = fb::to_string(result.policies[p].policy);
            if (reference > 0.0)
                std::printf("paired regret ratio %s/%s: %.4g\n", name.c_str(), ref_name.c_str(),
                            result.policies[p].mean.back() / reference);
            else
                std::printf("paired regret ratio %s/%s: n/a (reference regret 0)\n", name.c_str(),
                            ref_name.c_str());
        }
    }
    return 0;
}

struct SweepSpec {
    std::string key;
    std::vector<std::string> tokens;
};

SweepSpec parse_sweep(const std::string& arg) {
    const auto eq = arg.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 >= arg.size())
        throw fb::ConfigError("--sweep expects key=v1,v2,... (keys: u-max, alpha, beta, R)");
    SweepSpec spec;
    spec.key = arg.substr(0, eq);
    std::string rest = arg.substr(eq + 1);
    std::size_t pos = 0;
    while (pos <= rest.size()) {
        const std::size_t comma = rest.find(',', pos);
        const std::string tok = rest.substr(pos, comma == std::string::npos ? comma : comma - pos);
        if (tok.empty()) throw fb::ConfigError("--sweep: empty value in list");
        spec.tokens.push_back(tok);
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    if (spec.key != "u-max" && spec.key != "alpha" && spec.key != "beta" && spec.key != "R")
        throw fb::ConfigError("--sweep: unsupported key '" + spec.key +
                              "' (keys: u-max, alpha, beta, R)");
    return spec;
}

fb::ExperimentConfig apply_sweep_value(fb::ExperimentConfig cfg, const std::string& key,
                                       const std::string& token) {
    try {
        if (key == "u-max") cfg.pref_dist = fb::DistSpec::uniform(0.0, std::stod(token));
        else if (key == "alpha") cfg.policy_cfg.sbors.alpha = std::stod(token);
        else if (key == "beta") cfg.policy_cfg.sbors.beta = std::stod(token);
        else if (key == "R") cfg.policy_cfg.sbors.n_samples = std::stoi(token);
    } catch (const std::logic_error&) {
        throw fb::ConfigError("--sweep: cannot parse value '" + token + "'");
    }
    return cfg;
}

int cmd_sweep(const fb::ExperimentConfig& base, const std::string& sweep_arg) {
    const SweepSpec spec = parse_sweep(sweep_arg);
    std::vector<std::pair<std::string, fb::AggregateResult>> scenarios;
    for (const std::string& token : spec.tokens) {
        const fb::ExperimentConfig cfg = apply_sweep_value(base, spec.key, token);
        cfg.validate();
        const std::string label = spec.key + "=" + token;
        scenarios.emplace_back(label, fb::run_experiment(cfg));
        print_policy_summaries(scenarios.back().second, label + " ");
    }
    fb::emit_csv(scenarios, base.out_path);
    fb::emit_meta_json(base, base.out_path,
                       nlohmann::json{{"sweep", spec.key}, {"values", spec.tokens}});
    return 0;
}

int cmd_verify(std::int64_t trials, std::int64_t pairs, std::uint64_t seed, bool mutant) {
    const fb::UtilityFn utility = mutant ? fb::UtilityFn(fb::mutant_pa_sign_utility) : fb::UtilityFn();
    bool all_passed = true;
    std::string first_counterexample;

    const fb::ProblemInstance worked({0.9, 0.5, 0.2}, {0.3, 0.6, 0.1}, 0.1, 0.5);
    const fb::UnbiasednessReport unbiased =
        fb::check_unbiasedness(worked, fb::Sequence({0, 1, 2}), 100'000, seed);
    std::printf("unbiasedness: %s (q_hat %.4f vs %.4f)\n", unbiased.passed ? "PASS" : "FAIL",
                unbiased.q_hat, unbiased.q_true);
    all_passed = all_passed && unbiased.passed;

    const fb::ConcentrationReport conc =
        fb::check_concentration(trials, 2.0, {5.0, 10.0, 50.0}, seed);
    double worst_ratio = 0.0;
    for (const fb::ConcentrationCase& c : conc.cases) {
        worst_ratio = std::max(worst_ratio, c.allowed > 0 ? c.rate / c.allowed : 0.0);
        if (!c.passed && first_counterexample.empty())
            first_counterexample = "concentration: u=" + std::to_string(c.u) +
                                   " rho=" + std::to_string(c.rho) +
                                   " rate=" + std::to_string(c.rate) +
                                   " allowed=" + std::to_string(c.allowed);
    }
    std::printf("concentration: %s (%zu cases, worst rate/allowed %.3g)\n",
                conc.passed ? "PASS" : "FAIL", conc.cases.size(), worst_ratio);
    all_passed = all_passed && conc.passed;

    for (const char* which : {"lipschitz", "monotonicity"}) {
        const fb::LemmaReport report =
            std::string(which) == "lipschitz"
                ? fb::check_lipschitz(8, pairs, seed + 1, 1e-9, utility)
                : fb::check_monotonicity(8, pairs, seed + 2, 1e-9, utility);
        std::printf("%s: %s (%lld pairs, %lld violations)\n", which,
                    report.passed ? "PASS" : "FAIL",
                    static_cast<long long>(report.checked),
                    static_cast<long long>(report.violations));
        if (!report.passed && first_counterexample.empty())
            first_counterexample = report.name + ": " + report.first_counterexample;
        all_passed = all_passed && report.passed;
    }

    if (!all_passed) {
        if (!first_counterexample.empty())
            std::fprintf(stderr, "first counterexample: %s\n", first_counterexample.c_str());
        return 1;
    }
    return 0;
}

int cmd_oracle_check(int max_n, int instances, std::uint64_t seed) {
    const int lo = max_n >= 2 ? 2 : 1;
    double worst_gap = 0.0;
    for (int n = lo; n <= max_n; ++n) {
        for (int k = 0; k < instances; ++k) {
            fb::SplitMix64 rng(fb::derive_substream(seed, static_cast<std::uint64_t>(n) * 1'000'000 +
                                                              static_cast<std::uint64_t>(k)));
            std::vector<double> rewards(n), prefs(n);
            for (double& r : rewards) r = fb::uniform01(rng);
            for (double& u : prefs) u = fb::uniform01(rng);
            const double p = 0.5 * fb::uniform01(rng);
            const double cost = fb::uniform01(rng);
            const fb::ParamVector params(prefs, 1.0 - p);
            const fb::Sequence fast = fb::optimal_sequence(params, rewards, cost);
            const auto [slow, slow_value] = fb::brute_force_optimal(params, rewards, cost, max_n);
            const double fast_value = fb::expected_utility(params, rewards, cost, fast);
            const double gap = std::abs(fast_value - slow_value);
            worst_gap = std::max(worst_gap, gap);
            if (gap > 1e-9) {
                const nlohmann::json counterexample{{"n", n},          {"rewards", rewards},
                                                    {"preferences", prefs}, {"p", p},
                                                    {"cost", cost},    {"planner_value", fast_value},
                                                    {"brute_value", slow_value}};
                std::fprintf(stderr, "oracle-check: FAIL %s\n", counterexample.dump().c_str());
                return 1;
            }
        }
    }
    std::printf("oracle-check: PASS (N in [%d..%d], %d instances each, max gap %.3g)\n", lo, max_n,
                instances, worst_gap);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fatigue-aware recommendation bandit experiments"};
    app.require_subcommand(1);

    InlineFlags run_flags, compare_flags, sweep_flags;
    std::string sweep_arg;

    CLI::App* run = app.add_subcommand("run", "Run one experiment and write a regret CSV");
    const auto run_inline = add_experiment_flags(run, run_flags);

    CLI::App* compare = app.add_subcommand(
        "compare", "Run several policies on shared instances and user randomness");
    const auto compare_inline = add_experiment_flags(compare, compare_flags);

    CLI::App* sweep = app.add_subcommand("sweep", "Run one config across a list of parameter values");
    const auto sweep_inline = add_experiment_flags(sweep, sweep_flags);
    sweep->add_option("--sweep", sweep_arg, "key=v1,v2,... (keys: u-max, alpha, beta, R)")
        ->required();

    std::int64_t verify_trials = 1'000'000;
    std::int64_t verify_pairs = 10'000;
    std::uint64_t verify_seed = 1;
    bool mutant_pa_sign = false;
    CLI::App* verify = app.add_subcommand("verify", "Check the statistical properties empirically");
    verify->add_option("--trials", verify_trials, "Concentration trials");
    verify->add_option("--pairs", verify_pairs, "Random parameter pairs per lemma check");
    verify->add_option("--seed", verify_seed, "Seed");
    verify->add_flag("--mutant-pa-sign", mutant_pa_sign)->group("");  // self-test hook, hidden

    int oracle_max_n = 5;
    int oracle_instances = 200;
    std::uint64_t oracle_seed = 1;
    CLI::App* oracle = app.add_subcommand("oracle-check", "Planner vs exhaustive search");
    oracle->add_option("--max-n", oracle_max_n, "Largest catalog size (must be <= 7)");
    oracle->add_option("--instances", oracle_instances, "Instances per catalog size");
    oracle->add_option("--seed", oracle_seed, "Seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        app.exit(e);
        return 2;
    }

    try {
        if (run->parsed()) return cmd_run(assemble_config(run_flags, run_inline), false);
        if (compare->parsed())
            return cmd_run(assemble_config(compare_flags, compare_inline), true);
        if (sweep->parsed())
            return cmd_sweep(assemble_config(sweep_flags, sweep_inline), sweep_arg);
        if (verify->parsed())
            return cmd_verify(verify_trials, verify_pairs, verify_seed, mutant_pa_sign);
        if (oracle->parsed()) {
            if (oracle_max_n < 1 || oracle_max_n > 7) {
                std::fprintf(stderr, "oracle-check: --max-n must be in [1, 7]\n");
                return 2;
            }
            if (oracle_instances < 1) {
                std::fprintf(stderr, "oracle-check: --instances must be >= 1\n");
                return 2;
            }
            return cmd_oracle_check(oracle_max_n, oracle_instances, oracle_seed);
        }
    } catch (const fb::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 2;
}
