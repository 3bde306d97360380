#pragma once

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "fatigue_bandit/episode.hpp"
#include "fatigue_bandit/model.hpp"
#include "fatigue_bandit/policies.hpp"
#include "fatigue_bandit/rng.hpp"

// Replication runner: samples a fresh instance per replication, fans
// episodes out over a worker pool, and reduces traces to per-checkpoint
// aggregates. Seeds are derived per (replication, stream kind), never from
// thread scheduling, so results are independent of the worker count, and
// instance/user streams ignore the policy so compared policies face
// identical environments and user luck.

namespace fatigue_bandit {

inline constexpr const char* kBuildStamp = "fatigue-bandit-v0.1.0";

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Per-item sampling law: uniform over a closed interval, or an explicit
// per-item vector (held fixed across replications).
struct DistSpec {
    enum class Kind { Uniform, Explicit };
    Kind kind = Kind::Uniform;
    double lo = 0.0, hi = 1.0;
    std::vector<double> values;

    static DistSpec uniform(double lo, double hi) {
        DistSpec d;
        d.kind = Kind::Uniform;
        d.lo = lo;
        d.hi = hi;
        return d;
    }

    static DistSpec explicit_values(std::vector<double> v) {
        DistSpec d;
        d.kind = Kind::Explicit;
        d.values = std::move(v);
        return d;
    }

    void validate(int n_items, const std::string& field) const {
        if (kind == Kind::Uniform) {
            if (!(lo >= 0.0 && hi <= 1.0 && lo <= hi))
                throw ConfigError(field + ": uniform bounds must satisfy 0 <= lo <= hi <= 1");
        } else {
            if (static_cast<int>(values.size()) != n_items)
                throw ConfigError(field + ": explicit vector needs exactly n_items values");
            for (double v : values)
                if (!(v >= 0.0 && v <= 1.0)) throw ConfigError(field + ": values must lie in [0, 1]");
        }
    }

    std::vector<double> materialize(int n_items, SplitMix64& rng) const {
        if (kind == Kind::Explicit) return values;
        std::vector<double> out(static_cast<std::size_t>(n_items));
        for (double& x : out) x = lo + (hi - lo) * uniform01(rng);
        return out;
    }
};

struct ExperimentConfig {
    int n_items = 30;
    std::int64_t horizon = 10000;
    int replications = 10;
    std::uint64_t seed = 1;
    std::vector<PolicyKind> policies = {PolicyKind::BetaTs};
    DistSpec reward_dist = DistSpec::uniform(0.0, 1.0);
    DistSpec pref_dist = DistSpec::uniform(0.0, 1.0);
    double abandon_prob = 0.1;
    double cost = 0.5;
    PolicyConfig policy_cfg;
    std::string out_path;
    bool keep_traces = false;
    int workers = 0;  // 0: FATIGUE_BANDIT_WORKERS env var, then hardware

    void validate() const {
        if (n_items < 1) throw ConfigError("n_items: must be >= 1");
        if (horizon < 1) throw ConfigError("horizon: must be >= 1");
        if (horizon >= (std::int64_t{1} << 40)) throw ConfigError("horizon: must be < 2^40");
        if (replications < 1) throw ConfigError("replications: must be >= 1");
        if (replications > 0xffff) throw ConfigError("replications: must be <= 65535");
        if (policies.empty()) throw ConfigError("policies: need at least one policy");
        for (std::size_t i = 0; i < policies.size(); ++i)
            for (std::size_t j = i + 1; j < policies.size(); ++j)
                if (policies[i] == policies[j])
                    throw ConfigError("policies: duplicate entry '" + to_string(policies[i]) + "'");
        reward_dist.validate(n_items, "reward_dist");
        pref_dist.validate(n_items, "pref_dist");
        if (!(abandon_prob >= 0.0 && abandon_prob <= 1.0))
            throw ConfigError("abandon_prob: must lie in [0, 1]");
        if (!(cost >= 0.0) || !std::isfinite(cost)) throw ConfigError("cost: must be finite and >= 0");
        if (workers < 0) throw ConfigError("workers: must be >= 0");
        try {
            policy_cfg.sbors.validate();
            policy_cfg.ucb_v.validate();
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
    }

    std::vector<std::string> warnings() const {
        std::vector<std::string> out;
        if (policy_cfg.sbors.beta < 2.0)
            out.push_back("sbors beta = " + std::to_string(policy_cfg.sbors.beta) +
                          " is below 2; the regret analysis assumes beta >= 2");
        return out;
    }
};

struct ReplicationResult {
    std::uint64_t episode_seed = 0;  // policy stream seed, echoed into the CSV
    std::vector<double> cumulative_regret;    // at the checkpoint grid
    std::vector<double> mean_offered_length;  // running mean up to each checkpoint
};

struct PolicyAggregate {
    PolicyKind policy = PolicyKind::BetaTs;
    std::vector<ReplicationResult> replications;
    std::vector<double> mean, median, stddev;  // cumulative regret, per checkpoint
    double episode_seconds = 0.0;              // summed episode wall time
    std::vector<RegretTrace> traces;           // populated only when keep_traces
};

struct AggregateResult {
    std::vector<std::int64_t> checkpoints;  // ascending, last == horizon
    std::vector<PolicyAggregate> policies;
};

// 100 log-spaced rounds plus the horizon itself, deduplicated.
inline std::vector<std::int64_t> checkpoint_grid(std::int64_t horizon) {
    if (horizon < 1) throw std::invalid_argument("checkpoint_grid: horizon must be >= 1");
    std::vector<std::int64_t> grid;
    const double log_t = std::log(static_cast<double>(horizon));
    for (int i = 0; i < 100; ++i) {
        const double x = std::exp(log_t * static_cast<double>(i) / 99.0);
        grid.push_back(std::clamp<std::int64_t>(std::llround(x), 1, horizon));
    }
    grid.push_back(horizon);
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    return grid;
}

namespace detail {

inline ReplicationResult reduce_trace(const RegretTrace& trace,
                                      const std::vector<std::int64_t>& grid, std::uint64_t seed) {
    ReplicationResult rr;
    rr.episode_seed = seed;
    double length_sum = 0.0;
    std::size_t g = 0;
    for (std::int64_t t = 1; t <= static_cast<std::int64_t>(trace.per_round.size()) && g < grid.size();
         ++t) {
        length_sum += trace.offered_lengths[t - 1];
        while (g < grid.size() && grid[g] == t) {
            rr.cumulative_regret.push_back(trace.cumulative[t - 1]);
            rr.mean_offered_length.push_back(length_sum / static_cast<double>(t));
            ++g;
        }
    }
    return rr;
}

inline int resolve_workers(int configured) {
    if (configured > 0) return configured;
    if (const char* env = std::getenv("FATIGUE_BANDIT_WORKERS")) {
        const int parsed = std::atoi(env);
        if (parsed > 0) return parsed;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

inline double median_of(std::vector<double> xs) {
    std::sort(xs.begin(), xs.end());
    const std::size_t n = xs.size();
    return n % 2 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

}  // namespace detail

inline AggregateResult run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    const std::vector<std::int64_t> grid = checkpoint_grid(cfg.horizon);

    struct Job {
        std::size_t policy_idx;
        int replication;
    };
    std::vector<Job> jobs;
    for (std::size_t p = 0; p < cfg.policies.size(); ++p)
        for (int r = 0; r < cfg.replications; ++r) jobs.push_back({p, r});

    struct JobResult {
        ReplicationResult reduced;
        RegretTrace trace;
        double seconds = 0.0;
    };
    std::vector<JobResult> results(jobs.size());

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto work = [&]() {
        for (;;) {
            const std::size_t j = next.fetch_add(1);
            if (j >= jobs.size()) return;
            try {
                const Job job = jobs[j];
                const PolicyKind policy = cfg.policies[job.policy_idx];
                const auto rep = static_cast<std::uint32_t>(job.replication);
                SplitMix64 inst_rng(derive_seed(cfg.seed, StreamKind::Instance, rep));
                const std::vector<double> rewards = cfg.reward_dist.materialize(cfg.n_items, inst_rng);
                const std::vector<double> prefs = cfg.pref_dist.materialize(cfg.n_items, inst_rng);
                const ProblemInstance instance(rewards, prefs, cfg.abandon_prob, cfg.cost);
                const EpisodeSeeds seeds{
                    derive_seed(cfg.seed, StreamKind::Policy, rep, static_cast<std::uint64_t>(policy)),
                    derive_seed(cfg.seed, StreamKind::User, rep)};
                const auto start = std::chrono::steady_clock::now();
                RegretTrace trace = run_episode(instance, policy, cfg.policy_cfg, cfg.horizon, seeds);
                results[j].seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
                results[j].reduced = detail::reduce_trace(trace, grid, seeds.policy_stream);
                if (cfg.keep_traces) results[j].trace = std::move(trace);
            } catch (...) {
                const std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                return;
            }
        }
    };

    const int n_workers = std::min<int>(detail::resolve_workers(cfg.workers),
                                        static_cast<int>(jobs.size()));
    if (n_workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < n_workers; ++w) pool.emplace_back(work);
        for (std::thread& th : pool) th.join();
    }
    if (failure) std::rethrow_exception(failure);

    AggregateResult agg;
    agg.checkpoints = grid;
    for (std::size_t p = 0; p < cfg.policies.size(); ++p) {
        PolicyAggregate pa;
        pa.policy = cfg.policies[p];
        for (std::size_t j = 0; j < jobs.size(); ++j) {
            if (jobs[j].policy_idx != p) continue;
            pa.replications.push_back(std::move(results[j].reduced));
            pa.episode_seconds += results[j].seconds;
            if (cfg.keep_traces) pa.traces.push_back(std::move(results[j].trace));
        }
        const std::size_t n_cp = grid.size();
        pa.mean.assign(n_cp, 0.0);
        pa.median.assign(n_cp, 0.0);
        pa.stddev.assign(n_cp, 0.0);
        for (std::size_t k = 0; k < n_cp; ++k) {
            std::vector<double> at_k;
            for (const ReplicationResult& rr : pa.replications) at_k.push_back(rr.cumulative_regret[k]);
            double sum = 0.0;
            for (double x : at_k) sum += x;
            const double mean = sum / static_cast<double>(at_k.size());
            double ss = 0.0;
            for (double x : at_k) ss += (x - mean) * (x - mean);
            pa.mean[k] = mean;
            pa.median[k] = detail::median_of(at_k);
            pa.stddev[k] = at_k.size() > 1 ? std::sqrt(ss / static_cast<double>(at_k.size() - 1)) : 0.0;
        }
        agg.policies.push_back(std::move(pa));
    }
    return agg;
}

// Shortest decimal that parses back to the same double.
inline std::string format_double(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

namespace detail {

inline void write_csv_rows(std::ostream& os, const AggregateResult& result,
                           const std::string& scenario) {
    for (const PolicyAggregate& pa : result.policies) {
        const std::string policy = to_string(pa.policy);
        for (std::size_t r = 0; r < pa.replications.size(); ++r) {
            const ReplicationResult& rr = pa.replications[r];
            for (std::size_t k = 0; k < result.checkpoints.size(); ++k) {
                if (!scenario.empty()) os << scenario << ',';
                os << policy << ',' << r << ',' << result.checkpoints[k] << ','
                   << format_double(rr.cumulative_regret[k]) << ','
                   << format_double(rr.mean_offered_length[k]) << ',' << rr.episode_seed << '\n';
            }
        }
    }
}

}  // namespace detail

inline constexpr const char* kCsvHeader = "policy,replication,round,cumulative_regret,mean_offered_length,seed";

// One row per (policy, replication, checkpoint). A non-empty scenario label
// prepends a scenario column (used by parameter sweeps).
inline void emit_csv(const std::vector<std::pair<std::string, AggregateResult>>& scenarios,
                     const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("emit_csv: cannot open '" + path + "' for writing");
    const bool with_scenario = scenarios.size() > 1 || (!scenarios.empty() && !scenarios.front().first.empty());
    os << (with_scenario ? "scenario," : "") << kCsvHeader << '\n';
    for (const auto& [label, result] : scenarios)
        detail::write_csv_rows(os, result, with_scenario ? label : std::string());
    os.flush();
    if (!os) throw std::runtime_error("emit_csv: failed writing '" + path + "'");
}

inline void emit_csv(const AggregateResult& result, const std::string& path) {
    emit_csv({{std::string(), result}}, path);
}

inline nlohmann::json dist_to_json(const DistSpec& d) {
    if (d.kind == DistSpec::Kind::Uniform) return nlohmann::json{{"uniform", {d.lo, d.hi}}};
    return nlohmann::json{{"values", d.values}};
}

inline DistSpec dist_from_json(const nlohmann::json& j, const std::string& field) {
    if (!j.is_object() || j.size() != 1)
        throw ConfigError(field + ": expected {\"uniform\": [lo, hi]} or {\"values\": [...]}");
    if (j.contains("uniform")) {
        const auto& arr = j.at("uniform");
        if (!arr.is_array() || arr.size() != 2)
            throw ConfigError(field + ": uniform expects [lo, hi]");
        return DistSpec::uniform(arr[0].get<double>(), arr[1].get<double>());
    }
    if (j.contains("values")) return DistSpec::explicit_values(j.at("values").get<std::vector<double>>());
    throw ConfigError(field + ": unknown distribution key '" + j.begin().key() + "'");
}

inline nlohmann::json config_to_json(const ExperimentConfig& cfg) {
    nlohmann::json policies = nlohmann::json::array();
    for (PolicyKind p : cfg.policies) policies.push_back(to_string(p));
    return nlohmann::json{
        {"n_items", cfg.n_items},
        {"horizon", cfg.horizon},
        {"replications", cfg.replications},
        {"seed", cfg.seed},
        {"policies", policies},
        {"reward_dist", dist_to_json(cfg.reward_dist)},
        {"pref_dist", dist_to_json(cfg.pref_dist)},
        {"abandon_prob", cfg.abandon_prob},
        {"cost", cfg.cost},
        {"sbors", {{"alpha", cfg.policy_cfg.sbors.alpha},
                   {"beta", cfg.policy_cfg.sbors.beta},
                   {"n_samples", cfg.policy_cfg.sbors.n_samples}}},
        {"ucb_v", {{"support_bound", cfg.policy_cfg.ucb_v.support_bound}}},
        {"out", cfg.out_path},
        {"keep_traces", cfg.keep_traces},
        {"workers", cfg.workers},
    };
}

inline ExperimentConfig config_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("config: expected a JSON object");
    static const std::vector<std::string> known = {
        "n_items", "horizon", "replications", "seed", "policies", "reward_dist", "pref_dist",
        "abandon_prob", "cost", "sbors", "ucb_v", "out", "keep_traces", "workers"};
    for (const auto& [key, value] : j.items())
        if (std::find(known.begin(), known.end(), key) == known.end())
            throw ConfigError("config: unknown key '" + key + "'");

    ExperimentConfig cfg;
    try {
        if (j.contains("n_items")) cfg.n_items = j.at("n_items").get<int>();
        if (j.contains("horizon")) cfg.horizon = j.at("horizon").get<std::int64_t>();
        if (j.contains("replications")) cfg.replications = j.at("replications").get<int>();
        if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("policies")) {
            cfg.policies.clear();
            for (const auto& name : j.at("policies")) cfg.policies.push_back(policy_from_name(name.get<std::string>()));
        }
        if (j.contains("reward_dist")) cfg.reward_dist = dist_from_json(j.at("reward_dist"), "reward_dist");
        if (j.contains("pref_dist")) cfg.pref_dist = dist_from_json(j.at("pref_dist"), "pref_dist");
        if (j.contains("abandon_prob")) cfg.abandon_prob = j.at("abandon_prob").get<double>();
        if (j.contains("cost")) cfg.cost = j.at("cost").get<double>();
        if (j.contains("sbors")) {
            const auto& s = j.at("sbors");
            for (const auto& [key, value] : s.items())
                if (key != "alpha" && key != "beta" && key != "n_samples")
                    throw ConfigError("sbors: unknown key '" + key + "'");
            if (s.contains("alpha")) cfg.policy_cfg.sbors.alpha = s.at("alpha").get<double>();
            if (s.contains("beta")) cfg.policy_cfg.sbors.beta = s.at("beta").get<double>();
            if (s.contains("n_samples")) cfg.policy_cfg.sbors.n_samples = s.at("n_samples").get<int>();
        }
        if (j.contains("ucb_v")) {
            const auto& u = j.at("ucb_v");
            for (const auto& [key, value] : u.items())
                if (key != "support_bound") throw ConfigError("ucb_v: unknown key '" + key + "'");
            if (u.contains("support_bound"))
                cfg.policy_cfg.ucb_v.support_bound = u.at("support_bound").get<double>();
        }
        if (j.contains("out")) cfg.out_path = j.at("out").get<std::string>();
        if (j.contains("keep_traces")) cfg.keep_traces = j.at("keep_traces").get<bool>();
        if (j.contains("workers")) cfg.workers = j.at("workers").get<int>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return cfg;
}

inline ExperimentConfig config_from_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("config: cannot open '" + path + "'");
    nlohmann::json j;
    try {
        is >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config: parse error in '" + path + "': " + e.what());
    }
    return config_from_json(j);
}

// Writes `<csv_path>.meta.json` echoing the config plus a build stamp.
inline void emit_meta_json(const ExperimentConfig& cfg, const std::string& csv_path,
                           const nlohmann::json& extras = {}) {
    const std::string path = csv_path + ".meta.json";
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("emit_meta_json: cannot open '" + path + "' for writing");
    nlohmann::json meta{{"build", kBuildStamp}, {"csv", csv_path}, {"config", config_to_json(cfg)}};
    if (extras.is_object())
        for (const auto& [key, value] : extras.items()) meta[key] = value;
    os << meta.dump(2) << '\n';
    os.flush();
    if (!os) throw std::runtime_error("emit_meta_json: failed writing '" + path + "'");
}

}  // namespace fatigue_bandit
