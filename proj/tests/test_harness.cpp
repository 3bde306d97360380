#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fatigue_bandit/episode.hpp"
#include "fatigue_bandit/harness.hpp"
#include "helpers.hpp"

using namespace fatigue_bandit;
using Catch::Approx;

namespace {

std::filesystem::path temp_path(const std::string& name) {
    return std::filesystem::temp_directory_path() / name;
}

std::string slurp(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

struct CsvRow {
    std::string policy;
    int replication;
    std::int64_t round;
    double cumulative_regret;
    double mean_offered_length;
    std::uint64_t seed;
};

std::vector<CsvRow> parse_csv(const std::filesystem::path& path) {
    std::ifstream is(path);
    std::string line;
    REQUIRE(std::getline(is, line));
    REQUIRE(line == kCsvHeader);
    std::vector<CsvRow> rows;
    while (std::getline(is, line)) {
        std::istringstream ls(line);
        std::string field;
        CsvRow row;
        std::getline(ls, row.policy, ',');
        std::getline(ls, field, ',');
        row.replication = std::stoi(field);
        std::getline(ls, field, ',');
        row.round = std::stoll(field);
        std::getline(ls, field, ',');
        row.cumulative_regret = std::strtod(field.c_str(), nullptr);
        std::getline(ls, field, ',');
        row.mean_offered_length = std::strtod(field.c_str(), nullptr);
        std::getline(ls, field, ',');
        row.seed = std::stoull(field);
        rows.push_back(row);
    }
    return rows;
}

ExperimentConfig small_config() {
    ExperimentConfig cfg;
    cfg.n_items = 5;
    cfg.horizon = 200;
    cfg.replications = 3;
    cfg.seed = 99;
    cfg.policies = {PolicyKind::BetaTs};
    cfg.pref_dist = DistSpec::uniform(0.0, 0.4);
    cfg.abandon_prob = 0.1;
    cfg.cost = 0.5;
    cfg.workers = 1;
    return cfg;
}

}  // namespace

TEST_CASE("checkpoint_grid is log-spaced, deduplicated and ends at the horizon") {
    for (std::int64_t horizon : {std::int64_t{1}, std::int64_t{7}, std::int64_t{100},
                                 std::int64_t{1000}, std::int64_t{100'000}}) {
        const auto grid = checkpoint_grid(horizon);
        REQUIRE(!grid.empty());
        REQUIRE(grid.front() >= 1);
        REQUIRE(grid.back() == horizon);
        REQUIRE(grid.size() <= 101);
        for (std::size_t i = 1; i < grid.size(); ++i) REQUIRE(grid[i] > grid[i - 1]);
    }
    REQUIRE(checkpoint_grid(1) == std::vector<std::int64_t>{1});
    REQUIRE(checkpoint_grid(5).size() == 5);
}

TEST_CASE("config validation reports the offending field") {
    ExperimentConfig cfg = small_config();
    cfg.n_items = 0;
    REQUIRE_THROWS_WITH(cfg.validate(), Catch::Matchers::ContainsSubstring("n_items"));
    cfg = small_config();
    cfg.pref_dist = DistSpec::uniform(0.2, 1.4);
    REQUIRE_THROWS_WITH(cfg.validate(), Catch::Matchers::ContainsSubstring("pref_dist"));
    cfg = small_config();
    cfg.reward_dist = DistSpec::explicit_values({0.5, 0.5});
    REQUIRE_THROWS_WITH(cfg.validate(), Catch::Matchers::ContainsSubstring("reward_dist"));
    cfg = small_config();
    cfg.policies = {PolicyKind::BetaTs, PolicyKind::BetaTs};
    REQUIRE_THROWS_WITH(cfg.validate(), Catch::Matchers::ContainsSubstring("duplicate"));
    cfg = small_config();
    cfg.policy_cfg.sbors.beta = -1.0;
    REQUIRE_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("a beta below two earns a warning") {
    ExperimentConfig cfg = small_config();
    REQUIRE(cfg.warnings().empty());
    cfg.policy_cfg.sbors.beta = 0.2;
    REQUIRE_NOTHROW(cfg.validate());
    const auto warnings = cfg.warnings();
    REQUIRE(warnings.size() == 1);
    REQUIRE(warnings[0].find("beta") != std::string::npos);
}

TEST_CASE("run_experiment with the oracle hook reports zero regret") {
    ExperimentConfig cfg = small_config();
    cfg.replications = 1;
    cfg.policies = {PolicyKind::OracleTruth};
    const AggregateResult result = run_experiment(cfg);
    REQUIRE(result.policies.size() == 1);
    for (double m : result.policies[0].mean) REQUIRE(m == 0.0);
}

TEST_CASE("run_experiment is deterministic and aggregation is linear") {
    const ExperimentConfig cfg = small_config();
    const AggregateResult a = run_experiment(cfg);
    const AggregateResult b = run_experiment(cfg);
    REQUIRE(a.checkpoints == b.checkpoints);
    for (std::size_t p = 0; p < a.policies.size(); ++p) {
        REQUIRE(a.policies[p].mean == b.policies[p].mean);
        REQUIRE(a.policies[p].median == b.policies[p].median);
        REQUIRE(a.policies[p].stddev == b.policies[p].stddev);
        for (std::size_t r = 0; r < a.policies[p].replications.size(); ++r)
            REQUIRE(a.policies[p].replications[r].cumulative_regret ==
                    b.policies[p].replications[r].cumulative_regret);
    }

    for (std::size_t k = 0; k < a.checkpoints.size(); ++k) {
        double sum = 0.0;
        for (const ReplicationResult& rr : a.policies[0].replications)
            sum += rr.cumulative_regret[k];
        REQUIRE(a.policies[0].mean[k] ==
                Approx(sum / a.policies[0].replications.size()).margin(1e-12));
    }
}

TEST_CASE("worker count does not change the numbers") {
    ExperimentConfig serial = small_config();
    serial.policies = {PolicyKind::BetaTs, PolicyKind::UcbBaseline};
    ExperimentConfig parallel = serial;
    parallel.workers = 4;
    const AggregateResult a = run_experiment(serial);
    const AggregateResult b = run_experiment(parallel);
    for (std::size_t p = 0; p < a.policies.size(); ++p) {
        REQUIRE(a.policies[p].mean == b.policies[p].mean);
        for (std::size_t r = 0; r < a.policies[p].replications.size(); ++r)
            REQUIRE(a.policies[p].replications[r].cumulative_regret ==
                    b.policies[p].replications[r].cumulative_regret);
    }
}

TEST_CASE("user luck depends on the user stream only") {
    SplitMix64 rng(808);
    const ProblemInstance inst = test_helpers::random_instance(5, rng, 0.5);
    // Same offered sequences (oracle hook), different policy streams, same
    // user stream: identical outcomes round for round.
    const RegretTrace x = run_episode(inst, PolicyKind::OracleTruth, {}, 100, {111, 777});
    const RegretTrace y = run_episode(inst, PolicyKind::OracleTruth, {}, 100, {222, 777});
    REQUIRE(x.realized == y.realized);
    const RegretTrace z = run_episode(inst, PolicyKind::OracleTruth, {}, 100, {111, 778});
    REQUIRE(x.realized != z.realized);
}

TEST_CASE("replications draw fresh instances") {
    ExperimentConfig cfg = small_config();
    cfg.replications = 2;
    const AggregateResult result = run_experiment(cfg);
    REQUIRE(result.policies[0].replications[0].cumulative_regret.back() !=
            result.policies[0].replications[1].cumulative_regret.back());
}

TEST_CASE("emit_csv writes one row per policy, replication and checkpoint") {
    ExperimentConfig cfg = small_config();
    cfg.horizon = 50;
    cfg.replications = 2;
    cfg.policies = {PolicyKind::BetaTs, PolicyKind::UcbBaseline};
    const AggregateResult result = run_experiment(cfg);

    const auto path = temp_path("fb_test_rows.csv");
    emit_csv(result, path.string());
    const std::vector<CsvRow> rows = parse_csv(path);
    REQUIRE(rows.size() == 2 * 2 * result.checkpoints.size());

    SECTION("round-trip reproduces the stored values exactly") {
        std::size_t idx = 0;
        for (const PolicyAggregate& pa : result.policies) {
            for (std::size_t r = 0; r < pa.replications.size(); ++r) {
                for (std::size_t k = 0; k < result.checkpoints.size(); ++k, ++idx) {
                    REQUIRE(rows[idx].policy == to_string(pa.policy));
                    REQUIRE(rows[idx].replication == static_cast<int>(r));
                    REQUIRE(rows[idx].round == result.checkpoints[k]);
                    REQUIRE(rows[idx].cumulative_regret == pa.replications[r].cumulative_regret[k]);
                    REQUIRE(rows[idx].mean_offered_length ==
                            pa.replications[r].mean_offered_length[k]);
                    REQUIRE(rows[idx].seed == pa.replications[r].episode_seed);
                }
            }
        }
    }
    std::filesystem::remove(path);
}

TEST_CASE("emit_csv with scenarios prepends the scenario column") {
    ExperimentConfig cfg = small_config();
    cfg.horizon = 20;
    cfg.replications = 1;
    const AggregateResult result = run_experiment(cfg);
    const auto path = temp_path("fb_test_scenario.csv");
    emit_csv({{"u-max=0.1", result}, {"u-max=0.2", result}}, path.string());
    std::ifstream is(path);
    std::string header;
    REQUIRE(std::getline(is, header));
    REQUIRE(header == std::string("scenario,") + kCsvHeader);
    std::string line;
    std::size_t rows = 0;
    while (std::getline(is, line)) {
        ++rows;
        REQUIRE(line.find("u-max=0.") == 0);
    }
    REQUIRE(rows == 2 * result.checkpoints.size());
    is.close();
    std::filesystem::remove(path);
}

TEST_CASE("emit_csv surfaces unwritable paths") {
    const AggregateResult empty;
    REQUIRE_THROWS_WITH(emit_csv(empty, "/no/such/dir/out.csv"),
                        Catch::Matchers::ContainsSubstring("/no/such/dir/out.csv"));
}

TEST_CASE("config JSON round-trips and rejects unknown keys") {
    ExperimentConfig cfg = small_config();
    cfg.policies = {PolicyKind::Sbors, PolicyKind::UcbV};
    cfg.policy_cfg.sbors.beta = 0.2;
    cfg.policy_cfg.sbors.n_samples = 100;
    cfg.reward_dist = DistSpec::explicit_values({0.1, 0.2, 0.3, 0.4, 0.5});
    cfg.out_path = "out.csv";

    const nlohmann::json j = config_to_json(cfg);
    const ExperimentConfig back = config_from_json(j);
    REQUIRE(back.n_items == cfg.n_items);
    REQUIRE(back.horizon == cfg.horizon);
    REQUIRE(back.seed == cfg.seed);
    REQUIRE(back.policies == cfg.policies);
    REQUIRE(back.policy_cfg.sbors.beta == cfg.policy_cfg.sbors.beta);
    REQUIRE(back.policy_cfg.sbors.n_samples == cfg.policy_cfg.sbors.n_samples);
    REQUIRE(back.reward_dist.values == cfg.reward_dist.values);
    REQUIRE(back.pref_dist.lo == cfg.pref_dist.lo);
    REQUIRE(back.pref_dist.hi == cfg.pref_dist.hi);
    REQUIRE(back.out_path == cfg.out_path);

    SECTION("unknown keys are rejected at every level") {
        nlohmann::json bad = j;
        bad["horizonn"] = 10;
        REQUIRE_THROWS_WITH(config_from_json(bad), Catch::Matchers::ContainsSubstring("horizonn"));
        nlohmann::json bad_sbors = j;
        bad_sbors["sbors"]["gamma"] = 1.0;
        REQUIRE_THROWS_WITH(config_from_json(bad_sbors), Catch::Matchers::ContainsSubstring("gamma"));
        nlohmann::json bad_dist = j;
        bad_dist["pref_dist"] = {{"gaussian", {0.0, 1.0}}};
        REQUIRE_THROWS_AS(config_from_json(bad_dist), ConfigError);
    }
    SECTION("malformed values are config errors") {
        nlohmann::json bad = j;
        bad["policies"] = {"beta-ts", "bogus"};
        REQUIRE_THROWS_AS(config_from_json(bad), ConfigError);
        nlohmann::json bad_type = j;
        bad_type["horizon"] = "soon";
        REQUIRE_THROWS_AS(config_from_json(bad_type), ConfigError);
    }
}

TEST_CASE("the meta sidecar echoes the config") {
    ExperimentConfig cfg = small_config();
    const auto csv = temp_path("fb_test_meta.csv");
    emit_meta_json(cfg, csv.string());
    const auto meta_path = csv.string() + ".meta.json";
    const nlohmann::json meta = nlohmann::json::parse(slurp(meta_path));
    REQUIRE(meta.at("build").get<std::string>() == kBuildStamp);
    REQUIRE(meta.at("config").at("n_items").get<int>() == cfg.n_items);
    REQUIRE(meta.at("config").at("seed").get<std::uint64_t>() == cfg.seed);
    const ExperimentConfig back = config_from_json(meta.at("config"));
    REQUIRE(back.horizon == cfg.horizon);
    std::filesystem::remove(meta_path);
}

TEST_CASE("format_double round-trips doubles exactly") {
    SplitMix64 rng(13);
    for (int i = 0; i < 1000; ++i) {
        const double x = (uniform01(rng) - 0.5) * std::pow(10.0, static_cast<int>(rng() % 13) - 6);
        REQUIRE(std::strtod(format_double(x).c_str(), nullptr) == x);
    }
    REQUIRE(format_double(0.1) == "0.1");
    REQUIRE(format_double(0.0) == "0");
}
