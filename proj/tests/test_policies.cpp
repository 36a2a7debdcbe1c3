#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "rlrank/policies.hpp"

using namespace rlrank;
using Catch::Matchers::WithinAbs;

namespace {

Observation obs_of(double infected, double hospitalized, double bpl) {
    Observation o;
    o.infected_frac = infected;
    o.hospitalized_frac = hospitalized;
    o.bpl_frac = bpl;
    return o;
}

// One state, three actions (first component split in three, the rest single-bin).
BinningSpec bandit_spec() {
    BinningSpec spec;
    spec.state_edges = {{0, 1}, {0, 1}, {0, 1}};
    spec.action_edges = {{0, 2.5, 5, 7}, {0, 7}, {0, 7}, {0, 7}, {0, 7}, {0, 7}, {0, 7}, {0, 7}};
    return spec;
}

SimConfig tiny_sim() {
    SimConfig c;
    c.population = 60;
    c.households = 20;
    c.offices = 3;
    c.schools = 2;
    c.shops = 2;
    c.days = 7;
    c.initial_exposed = 4;
    c.mask_stock_high = 20;
    c.mask_stock_low = 40;
    c.beta = 0.05;
    return c;
}

} // namespace

TEST_CASE("random policy stays in bounds and is seed-reproducible", "[policies]") {
    RandomPolicy a(5), b(5), c(6);
    for (int i = 0; i < 50; ++i) {
        PolicyAction x = a.act(Observation{});
        PolicyAction y = b.act(Observation{});
        CHECK(x.v == y.v);
        for (double v : x.v) {
            CHECK(v >= 0.0);
            CHECK(v <= 7.0);
        }
    }
    bool differs = false;
    RandomPolicy a2(5);
    for (int i = 0; i < 10; ++i)
        if (a2.act(Observation{}).v != c.act(Observation{}).v) differs = true;
    CHECK(differs);
}

TEST_CASE("heuristic policy scales lockdown with infections", "[policies]") {
    HeuristicPolicy h;
    auto low = h.act(obs_of(0.1, 0.0, 0.0));
    CHECK(low.v == std::array<double, 8>{0, 3.5, 0, 3.5, 0, 3.5, 0, 7});
    auto saturated = h.act(obs_of(0.5, 0.0, 0.0));
    CHECK_THAT(saturated.v[1], WithinAbs(7.0, 1e-12));
    // Economic distress vetoes the lockdown.
    auto poor = h.act(obs_of(0.5, 0.0, 0.2));
    CHECK_THAT(poor.v[1], WithinAbs(0.0, 1e-12));
    // The vaccination drives run regardless.
    CHECK_THAT(poor.v[7], WithinAbs(7.0, 1e-12));
}

TEST_CASE("q policy maps observations and actions to published indices", "[policies]") {
    BinnedQPolicy q(BinningSpec::defaults(), QLearnConfig{}, 40, 1);
    CHECK(q.state_of({0.25, 0.01, 0.02}) == 100);
    CHECK(q.state_of({0.01, 0.01, 0.01}) == 0);
    CHECK(q.state_of({0.07, 0.01, 0.01}) == 25);
    CHECK(q.action_index_of({3, 1, 4, 0.5, 2, 1, 2, 6.5}) == 2432);
}

TEST_CASE("q policy ties resolve to the lowest action index", "[policies]") {
    BinnedQPolicy q(BinningSpec::defaults(), QLearnConfig{}, 40, 1);
    CHECK(q.greedy_action(100) == 0); // empty table: everything ties at zero
    q.begin_episode(0, /*training=*/false);
    auto a = q.act(obs_of(0.25, 0.01, 0.02));
    // Action 0 decodes to the first bin midpoint of every component.
    CHECK(a.v == std::array<double, 8>{1.25, 1.25, 1.25, 1.25, 1.25, 1.25, 1.25, 1.25});
}

TEST_CASE("q updates move cells toward the target at the learning rate", "[policies]") {
    BinnedQPolicy q(BinningSpec::defaults(), QLearnConfig{}, 40, 1);
    q.update(0, 5, 1.0);
    CHECK_THAT(q.q_value(0, 5), WithinAbs(0.1, 1e-12));
    q.update(0, 5, 1.0);
    CHECK_THAT(q.q_value(0, 5), WithinAbs(0.19, 1e-12));
}

TEST_CASE("greedy exploitation picks the highest-valued action", "[policies]") {
    BinnedQPolicy q(BinningSpec::defaults(), QLearnConfig{}, 40, 1);
    for (int i = 0; i < 100; ++i) q.update(100, 2432, 10.0);
    CHECK(q.greedy_action(100) == 2432);
    q.begin_episode(0, /*training=*/false);
    auto a = q.act(obs_of(0.25, 0.01, 0.02));
    // 2432 decodes to bins [1,0,1,0,0,0,0,2] -> midpoints below.
    CHECK(a.v == std::array<double, 8>{3.75, 1.25, 3.75, 1.25, 1.25, 1.25, 1.25, 6.0});
}

TEST_CASE("learning replays an episode with one-step bootstrapping", "[policies]") {
    BinnedQPolicy q(BinningSpec::defaults(), QLearnConfig{}, 40, 1);
    Episode ep;
    ep.run_name = "Run-0";
    ep.kind = EpisodeKind::Train;
    Step s0;
    s0.tick = 0;
    s0.observation = {0.25, 0.01, 0.02}; // state 100
    s0.action = std::vector<double>(8, 1.25); // action 0
    s0.reward = 1.0;
    Step s1;
    s1.tick = 42;
    s1.observation = {0.01, 0.01, 0.01}; // state 0
    s1.action = std::vector<double>(8, 1.25);
    s1.reward = 2.0;
    ep.steps = {s0, s1};
    q.learn(ep);
    // Step 0 bootstraps from the pre-update table (all zeros), the final step
    // has no successor term.
    CHECK_THAT(q.q_value(100, 0), WithinAbs(0.1 * 1.0, 1e-12));
    CHECK_THAT(q.q_value(0, 0), WithinAbs(0.1 * 2.0, 1e-12));
    // A second replay now sees max_q(state 0) = 0.2.
    q.learn(ep);
    CHECK_THAT(q.q_value(100, 0), WithinAbs(0.1 + 0.1 * (1.0 + 0.95 * 0.2 - 0.1), 1e-12));
}

TEST_CASE("training explores while exploitation is deterministic", "[policies]") {
    BinnedQPolicy q(BinningSpec::defaults(), QLearnConfig{}, 40, 9);
    Observation o = obs_of(0.25, 0.01, 0.02);
    q.begin_episode(0, /*training=*/true); // epsilon 0.2
    bool explored = false;
    for (int i = 0; i < 200; ++i)
        if (q.act(o).v != std::array<double, 8>{1.25, 1.25, 1.25, 1.25, 1.25, 1.25, 1.25, 1.25})
            explored = true;
    CHECK(explored);
    q.begin_episode(0, /*training=*/false);
    for (int i = 0; i < 20; ++i)
        CHECK(q.act(o).v == std::array<double, 8>{1.25, 1.25, 1.25, 1.25, 1.25, 1.25, 1.25, 1.25});
}

TEST_CASE("a three-armed bandit converges to the best arm", "[policies]") {
    for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
        BinnedQPolicy q(bandit_spec(), QLearnConfig{}, 20, seed);
        Rng env(derive_seed(seed, "bandit"));
        const double base[3] = {0.2, 1.0, 0.5};
        q.begin_episode(0, /*training=*/true);
        Observation o = obs_of(0.5, 0.5, 0.5);
        for (int t = 0; t < 500; ++t) {
            if (t % 25 == 0) q.begin_episode(t / 25, /*training=*/true);
            long long a = q.action_index_of(q.act(o).to_vector());
            q.update(0, a, base[a] + env.normal(0.0, 0.05));
        }
        CHECK(q.greedy_action(0) == 1);
    }
}

TEST_CASE("action noise perturbs within bounds and reproducibly", "[policies]") {
    auto wrapped = ActionNoiseWrapper(std::make_unique<HeuristicPolicy>(), 0.1, 77);
    auto again = ActionNoiseWrapper(std::make_unique<HeuristicPolicy>(), 0.1, 77);
    HeuristicPolicy clean;
    Observation o = obs_of(0.1, 0.0, 0.0);
    bool differs = false;
    for (int i = 0; i < 20; ++i) {
        PolicyAction a = wrapped.act(o);
        CHECK(a.v == again.act(o).v);
        for (double v : a.v) {
            CHECK(v >= 0.0);
            CHECK(v <= 7.0);
        }
        if (a.v != clean.act(o).v) differs = true;
    }
    CHECK(differs);
}

TEST_CASE("observation noise changes what the inner policy perceives", "[policies]") {
    auto wrapped = ObservationNoiseWrapper(std::make_unique<HeuristicPolicy>(), 0.5, 31);
    HeuristicPolicy clean;
    Observation calm = obs_of(0.0, 0.0, 0.0);
    bool differs = false;
    for (int i = 0; i < 20; ++i)
        if (wrapped.act(calm).v != clean.act(calm).v) differs = true;
    CHECK(differs);
}

TEST_CASE("variant labels compose prefixes in a fixed order", "[policies]") {
    PolicyVariant v;
    v.base = PolicyVariant::Base::Heuristic;
    CHECK(v.label() == "Heuristic");
    v.action_noise = true;
    CHECK(v.label() == "NR_Heuristic");
    v.observation_noise = true;
    CHECK(v.label() == "NR_BN_Heuristic");
    v.action_noise = false;
    CHECK(v.label() == "BN_Heuristic");
    CHECK(PolicyVariant::base_from_name("BinnedQ") == PolicyVariant::Base::BinnedQ);
    CHECK_THROWS_AS(PolicyVariant::base_from_name("DQN"), InputError);
}

TEST_CASE("the stock roster crosses both bases with every noise mode", "[policies]") {
    auto variants = default_variants();
    REQUIRE(variants.size() == 8);
    std::set<std::string> labels;
    for (const auto& v : variants) labels.insert(v.label());
    CHECK(labels == std::set<std::string>{"Heuristic", "BN_Heuristic", "NR_Heuristic",
                                          "NR_BN_Heuristic", "BinnedQ", "BN_BinnedQ", "NR_BinnedQ",
                                          "NR_BN_BinnedQ"});
}

TEST_CASE("a variant run produces a complete, valid trace set", "[policies]") {
    PolicyVariant v;
    v.base = PolicyVariant::Base::BinnedQ;
    v.action_noise = true;
    BenchOptions opts;
    opts.train_episodes = 3;
    opts.exploit_episodes = 2;
    opts.seed = 11;
    auto run = run_variant(tiny_sim(), "Mini", v, BinningSpec::defaults(), QLearnConfig{}, opts);
    CHECK(run.traces.algorithm_name == "NR_BinnedQ");
    CHECK(run.traces.experiment_name == "Mini");
    CHECK(run.traces.meta.at("base") == "BinnedQ");
    CHECK(run.traces.meta.at("action_noise") == "true");
    CHECK(run.traces.meta.at("observation_noise") == "false");
    REQUIRE(run.traces.episodes.size() == 5);
    CHECK(run.traces.episodes[0].run_name == "Run-0");
    CHECK(run.traces.episodes[0].kind == EpisodeKind::Train);
    CHECK(run.traces.episodes[3].run_name == "Run-3-Exploit");
    CHECK(run.traces.episodes[3].kind == EpisodeKind::Exploit);
    CHECK(run.traces.episodes[4].run_name == "Run-4-Exploit");
    CHECK(validate_traces(run.traces).empty());

    // Same options, same bytes.
    auto rerun = run_variant(tiny_sim(), "Mini", v, BinningSpec::defaults(), QLearnConfig{}, opts);
    for (std::size_t e = 0; e < 5; ++e)
        for (std::size_t t = 0; t < run.traces.episodes[e].steps.size(); ++t) {
            CHECK(run.traces.episodes[e].steps[t].reward ==
                  rerun.traces.episodes[e].steps[t].reward);
            CHECK(run.traces.episodes[e].steps[t].action ==
                  rerun.traces.episodes[e].steps[t].action);
        }
}

TEST_CASE("variant runs demand at least one episode of each kind", "[policies]") {
    BenchOptions opts;
    opts.train_episodes = 0;
    CHECK_THROWS_AS(run_variant(tiny_sim(), "Mini", PolicyVariant{}, BinningSpec::defaults(),
                                QLearnConfig{}, opts),
                    InputError);
}

TEST_CASE("different variants draw independent seed streams", "[policies]") {
    BenchOptions opts;
    opts.train_episodes = 1;
    opts.exploit_episodes = 1;
    PolicyVariant heuristic; // Heuristic base acts deterministically...
    PolicyVariant noisy = heuristic;
    noisy.action_noise = true; // ...so any difference comes from the noise stream
    auto a = run_variant(tiny_sim(), "Mini", heuristic, BinningSpec::defaults(), QLearnConfig{},
                         opts);
    auto b = run_variant(tiny_sim(), "Mini", noisy, BinningSpec::defaults(), QLearnConfig{}, opts);
    CHECK(a.traces.episodes[0].steps[0].action != b.traces.episodes[0].steps[0].action);
}
