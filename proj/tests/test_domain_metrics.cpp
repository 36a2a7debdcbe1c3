#include <catch2/catch_amalgamated.hpp>

#include "rlrank/domain_metrics.hpp"

using namespace rlrank;
using Catch::Matchers::WithinAbs;

namespace {

DiscretizedEpisode make_ep(std::vector<long long> states, std::vector<long long> actions,
                           std::vector<double> rewards, EpisodeKind kind = EpisodeKind::Train,
                           std::string name = "Run-0") {
    DiscretizedEpisode e;
    e.run_name = std::move(name);
    e.kind = kind;
    e.states = std::move(states);
    e.actions = std::move(actions);
    e.rewards = std::move(rewards);
    return e;
}

} // namespace

TEST_CASE("metric names are stable and column-ordered", "[domain_metrics]") {
    CHECK(std::string(domain_metric_name(0)) == "mean_reward");
    CHECK(std::string(domain_metric_name(1)) == "state_coverage");
    CHECK(std::string(domain_metric_name(2)) == "unified_coverage");
    CHECK(std::string(domain_metric_name(3)) == "best_sequences");
    CHECK(std::string(domain_metric_name(4)) == "median_reward");
    CHECK_THROWS_AS(domain_metric_name(5), std::invalid_argument);
    MetricValues v{1, 2, 3, 4, 5};
    for (int i = 0; i < kDomainMetricCount; ++i)
        CHECK_THAT(v.value(i), WithinAbs(i + 1.0, 1e-12));
}

TEST_CASE("mean reward pools steps rather than averaging episode means", "[domain_metrics]") {
    auto m = mean_reward_metric({make_ep({0, 0}, {0, 0}, {1.0, 2.0}),
                                 make_ep({0}, {0}, {4.0}, EpisodeKind::Train, "Run-1")});
    CHECK_THAT(m, WithinAbs(7.0 / 3.0, 1e-12)); // mean-of-means would give 2.75
}

TEST_CASE("median reward takes the middle exploit-episode mean", "[domain_metrics]") {
    CHECK_THAT(median_mean_reward_metric({1.0, 9.0, 2.0}), WithinAbs(2.0, 1e-12));
    CHECK_THAT(median_mean_reward_metric({1.5, 4.0}), WithinAbs(2.75, 1e-12));
    CHECK_THROWS_AS(median_mean_reward_metric({}), InputError);
}

TEST_CASE("sequence comparison is the percent of best-ending sequences", "[domain_metrics]") {
    std::vector<SequenceRecord> seqs(4);
    seqs[0].is_best = true;
    seqs[1].is_best = true;
    seqs[2].is_best = true;
    CHECK_THAT(sequence_comparison_metric(seqs), WithinAbs(75.0, 1e-12));
    CHECK_THROWS_AS(sequence_comparison_metric({}), InputError);
}

TEST_CASE("state coverage arithmetic: 13 of 45 is 28.889 percent", "[domain_metrics]") {
    CHECK_THAT(state_coverage_pct(13, 45), WithinAbs(28.889, 5e-4));
}

TEST_CASE("state coverage counts only valid visited states", "[domain_metrics]") {
    // 100 and 0 are valid under the default mask; 10 (hospitalized bin 2) is not.
    auto valid = enumerate_valid(ValidityMask::defaults(), {5, 5, 5});
    auto m = state_coverage_metric({make_ep({100, 10, 0, 100}, {0, 0, 0, 0}, {0, 0, 0, 0})}, valid);
    CHECK_THAT(m, WithinAbs(100.0 * 2.0 / 50.0, 1e-12));
}

TEST_CASE("unified coverage blends state and pair fractions", "[domain_metrics]") {
    // 25 of 50 valid states, pair budget fully spent -> 0.5*0.5 + 0.5*1.
    CHECK_THAT(unified_coverage_pct(25, 50, 25, 200, 8, 0.5), WithinAbs(75.0, 1e-12));
    // One state, one pair, budget 8 -> 0.5*(1/50) + 0.5*(1/8).
    CHECK_THAT(unified_coverage_pct(1, 50, 1, 1, 8, 0.5), WithinAbs(7.25, 1e-12));
    // Pair fraction saturates at 1.
    CHECK_THAT(unified_coverage_pct(1, 50, 1, 99, 8, 0.5), WithinAbs(51.0, 1e-12));
    // Weight 1 reduces to plain state coverage.
    CHECK_THAT(unified_coverage_pct(13, 45, 13, 7, 8, 1.0), WithinAbs(28.889, 5e-4));
    CHECK_THROWS_AS(unified_coverage_pct(1, 0, 1, 1, 8, 0.5), InputError);
}

TEST_CASE("dense metric ranking matches the published best-sequence column", "[domain_metrics]") {
    std::map<std::string, double> col{{"A", 100.0}, {"B", 100.0}, {"C", 78.57}, {"D", 34.55},
                                      {"E", 0.0},   {"F", 0.0},   {"G", 0.0},  {"H", 0.0}};
    auto ranks = rank_by_metric(col);
    CHECK(ranks.at("A") == 1);
    CHECK(ranks.at("B") == 1);
    CHECK(ranks.at("C") == 2);
    CHECK(ranks.at("D") == 3);
    CHECK(ranks.at("E") == 4);
    CHECK(ranks.at("F") == 4);
    CHECK(ranks.at("G") == 4);
    CHECK(ranks.at("H") == 4);
}

TEST_CASE("metric ranking needs at least two algorithms", "[domain_metrics]") {
    CHECK_THROWS_AS(rank_by_metric({{"only", 1.0}}), InputError);
}

TEST_CASE("aggregate ranks dense-rank into published final positions", "[domain_metrics]") {
    // Aggregate column {9,14,15,15,18,21,22,26} must yield finals
    // {1,2,3,3,4,5,6,7}. Constructed as four all-tied metrics plus one carrying
    // the aggregate remainder.
    std::vector<std::pair<std::string, int>> aggregates{
            {"TD3", 9},        {"NR_BN_TD3", 14}, {"DDPG", 15},    {"BN_DDPG", 15},
            {"NR_BN_DDPG", 18}, {"BN_TD3", 21},    {"NR_DDPG", 22}, {"NR_TD3", 26}};
    std::map<std::string, std::map<std::string, int>> per_metric;
    for (int i = 0; i < kDomainMetricCount; ++i)
        for (const auto& [name, agg] : aggregates)
            per_metric[domain_metric_name(i)][name] = (i == 0) ? agg - 4 : 1;
    auto table = aggregate_ranking(per_metric);

    std::map<std::string, int> expected_final{{"TD3", 1},        {"NR_BN_TD3", 2}, {"DDPG", 3},
                                              {"BN_DDPG", 3},    {"NR_BN_DDPG", 4}, {"BN_TD3", 5},
                                              {"NR_DDPG", 6},    {"NR_TD3", 7}};
    for (const auto& [name, agg] : aggregates) {
        CHECK(table.rows.at(name).aggregate == agg);
        CHECK(table.rows.at(name).final_rank == expected_final.at(name));
    }
}

TEST_CASE("aggregate ranking demands complete metric maps", "[domain_metrics]") {
    std::map<std::string, std::map<std::string, int>> per_metric;
    for (int i = 0; i < kDomainMetricCount; ++i)
        per_metric[domain_metric_name(i)] = {{"A", 1}, {"B", 2}};
    SECTION("missing metric") {
        per_metric.erase("median_reward");
        CHECK_THROWS_AS(aggregate_ranking(per_metric), InputError);
    }
    SECTION("missing algorithm under one metric") {
        per_metric["median_reward"].erase("B");
        CHECK_THROWS_AS(aggregate_ranking(per_metric), InputError);
    }
}

TEST_CASE("rank table built from metric values", "[domain_metrics]") {
    MetricTable metrics;
    metrics["X"] = {3.0, 40.0, 50.0, 100.0, 3.0}; // best everywhere
    metrics["Y"] = {2.0, 30.0, 40.0, 50.0, 2.0};
    metrics["Z"] = {1.0, 30.0, 30.0, 0.0, 1.0};
    auto table = build_rank_table(metrics);
    CHECK(table.rows.at("X").aggregate == 5);
    CHECK(table.rows.at("Y").aggregate == 2 + 2 + 2 + 2 + 2);
    CHECK(table.rows.at("Z").aggregate == 3 + 2 + 3 + 3 + 3);
    CHECK(table.rows.at("X").final_rank == 1);
    CHECK(table.rows.at("Y").final_rank == 2);
    CHECK(table.rows.at("Z").final_rank == 3);
    CHECK(table.rows.at("Y").metric_ranks[1] == 2); // tied state coverage
    CHECK(table.rows.at("Z").metric_ranks[1] == 2);
}

TEST_CASE("improving one metric never worsens the aggregate", "[domain_metrics]") {
    MetricTable metrics;
    metrics["A"] = {3.0, 40.0, 50.0, 100.0, 3.0};
    metrics["B"] = {2.0, 30.0, 40.0, 50.0, 2.0};
    metrics["C"] = {1.0, 20.0, 30.0, 0.0, 1.0};
    auto base = build_rank_table(metrics);
    for (const auto& [name, values] : metrics)
        for (int m = 0; m < kDomainMetricCount; ++m) {
            MetricTable bumped = metrics;
            MetricValues v = values;
            double raised = v.value(m) + 15.0;
            switch (m) {
                case 0: v.mean_reward = raised; break;
                case 1: v.state_coverage = raised; break;
                case 2: v.unified_coverage = raised; break;
                case 3: v.best_sequence_pct = raised; break;
                case 4: v.median_reward = raised; break;
            }
            bumped[name] = v;
            auto after = build_rank_table(bumped);
            CHECK(after.rows.at(name).aggregate <= base.rows.at(name).aggregate);
        }
}

TEST_CASE("domain metrics computed end-to-end from one trace set", "[domain_metrics]") {
    TraceSet t;
    t.algorithm_name = "Demo";
    t.experiment_name = "E";
    auto add_step = [](Episode& e, long long tick, std::vector<double> obs, double reward) {
        Step s;
        s.tick = tick;
        s.observation = std::move(obs);
        s.action = std::vector<double>(8, 0.0);
        s.reward = reward;
        e.steps.push_back(s);
    };
    Episode train;
    train.run_name = "Run-0";
    train.kind = EpisodeKind::Train;
    for (int i = 0; i < 4; ++i) add_step(train, i, {0.25, 0.01, 0.02}, 1.0 + i); // state 100
    Episode exploit;
    exploit.run_name = "Run-1-Exploit";
    exploit.kind = EpisodeKind::Exploit;
    add_step(exploit, 0, {0.25, 0.01, 0.02}, 2.0); // state 100
    add_step(exploit, 1, {0.01, 0.01, 0.01}, 4.0); // state 0, the best state
    t.episodes = {train, exploit};

    auto m = domain_metrics(t, AnalysisParams{});
    CHECK_THAT(m.mean_reward, WithinAbs(2.5, 1e-12));
    CHECK_THAT(m.state_coverage, WithinAbs(100.0 / 50.0, 1e-12));  // train visits state 100 only
    // Unified: state fraction 1/50, one pair of budget 8.
    CHECK_THAT(m.unified_coverage, WithinAbs(7.25, 1e-12));
    CHECK_THAT(m.best_sequence_pct, WithinAbs(100.0, 1e-12));
    CHECK_THAT(m.median_reward, WithinAbs(3.0, 1e-12));
}
