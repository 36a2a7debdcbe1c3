#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <numeric>

#include "rlrank/epi_sim.hpp"

using namespace rlrank;
using Catch::Matchers::WithinAbs;

namespace {

PolicyAction action_from(std::array<double, 8> v) {
    PolicyAction a;
    a.v = v;
    return a;
}

int count_of(const World& w, Compartment c) {
    return w.compartment_counts()[static_cast<int>(c)];
}

} // namespace

TEST_CASE("default configuration is valid and sized as documented", "[epi_sim]") {
    SimConfig c;
    CHECK_NOTHROW(c.validate());
    CHECK(c.total_ticks() == 600);
    CHECK(c.policy_steps() == 14);
    CHECK(c.hospital_capacity() == 100);
}

TEST_CASE("configuration validation names the offending field", "[epi_sim]") {
    auto message_of = [](SimConfig c) {
        try {
            c.validate();
        } catch (const InputError& e) {
            return std::string(e.what());
        }
        return std::string();
    };
    SimConfig c;
    c.population = 0;
    CHECK(message_of(c).find("population") != std::string::npos);
    c = SimConfig{};
    c.policy_period_ticks = 40;
    CHECK(message_of(c).find("whole days") != std::string::npos);
    c = SimConfig{};
    c.households = 0;
    CHECK(message_of(c).find("household") != std::string::npos);
    c = SimConfig{};
    c.beta = 1.5;
    CHECK(message_of(c).find("beta") != std::string::npos);
    c = SimConfig{};
    c.age_group_fractions = {0.5, 0.5, 0.5};
    CHECK(message_of(c).find("sum to 1") != std::string::npos);
    c = SimConfig{};
    c.mean_days_mild = 0.5;
    CHECK(message_of(c).find("dwell") != std::string::npos);
}

TEST_CASE("under-30s are students, everyone else works", "[epi_sim]") {
    CHECK(role_for_age(0) == Role::Student);
    CHECK(role_for_age(29) == Role::Student);
    CHECK(role_for_age(30) == Role::Employed);
    CHECK(role_for_age(99) == Role::Employed);
}

TEST_CASE("reward rewards low burdens", "[epi_sim]") {
    Observation o;
    CHECK_THAT(reward(o), WithinAbs(3.0, 1e-12));
    o.infected_frac = 0.5;
    o.hospitalized_frac = 0.25;
    o.bpl_frac = 1.0;
    CHECK_THAT(reward(o), WithinAbs(0.5 + 0.75 + 0.0, 1e-12));
    CHECK_THAT(reward(o, {2.0, 0.0, 1.0}), WithinAbs(1.0, 1e-12));
}

TEST_CASE("exposure probability composes independent contacts", "[epi_sim]") {
    CHECK_THAT(World::exposure_probability(0.5, 1, 0.8, 0.8), WithinAbs(0.02, 1e-12));
    CHECK_THAT(World::exposure_probability(0.5, 2, 0.8, 0.8), WithinAbs(1.0 - 0.98 * 0.98, 1e-12));
    CHECK_THAT(World::exposure_probability(0.5, 3, 0.0, 0.0), WithinAbs(1.0 - std::pow(0.5, 3), 1e-12));
    CHECK(World::exposure_probability(0.5, 0, 0.0, 0.0) == 0.0);
}

TEST_CASE("only the symptomless-to-severe band transmits", "[epi_sim]") {
    CHECK(World::infectious(Compartment::Asymptomatic));
    CHECK(World::infectious(Compartment::InfectedMild));
    CHECK(World::infectious(Compartment::InfectedSevere));
    CHECK_FALSE(World::infectious(Compartment::Exposed));
    CHECK_FALSE(World::infectious(Compartment::Hospitalized));
    CHECK_FALSE(World::infectious(Compartment::Susceptible));
    CHECK_FALSE(World::infectious(Compartment::Deceased));
}

TEST_CASE("action clamping pins every component into the week", "[epi_sim]") {
    std::vector<std::string> warnings;
    auto a = World::clamp_action(
            action_from({std::numeric_limits<double>::quiet_NaN(), 9.0, -1.0, 3.0, 0.0, 7.0,
                         std::numeric_limits<double>::infinity(), 2.0}),
            &warnings);
    CHECK(a.v[0] == 0.0);
    CHECK(a.v[1] == 7.0);
    CHECK(a.v[2] == 0.0);
    CHECK(a.v[3] == 3.0);
    CHECK(a.v[6] == 0.0);
    CHECK(warnings.size() == 4);
}

TEST_CASE("world construction distributes people, masks and seeds", "[epi_sim]") {
    SimConfig c;
    World w(c, 11);
    REQUIRE(w.agents().size() == 1000);
    CHECK(count_of(w, Compartment::Exposed) == 10);
    CHECK(count_of(w, Compartment::Susceptible) == 990);
    int high = 0, low = 0, none = 0, students = 0;
    for (const Agent& a : w.agents()) {
        if (a.mask == MaskType::HighEff) ++high;
        else if (a.mask == MaskType::LowEff) ++low;
        else ++none;
        if (a.role == Role::Student) {
            ++students;
            CHECK(a.age < 30);
            CHECK(a.work_location >= w.school_base());
            CHECK(a.work_location < w.shop_base());
        } else {
            CHECK(a.work_location >= w.office_base());
            CHECK(a.work_location < w.school_base());
        }
        CHECK(a.household >= 0);
        CHECK(a.household < c.households);
    }
    CHECK(high == 500);
    CHECK(low == 500); // stock 1000, but only 500 agents left unmasked
    CHECK(none == 0);
    // Age < 30 spans the whole 0-17 group (22%) plus the 18-29 slice of the
    // 18-59 group (12/42 of 58%), about 38.6% of the population.
    CHECK(students > 300);
    CHECK(students < 470);
}

TEST_CASE("lockdown day-values translate into the published tick range", "[epi_sim]") {
    SimConfig c;
    c.beta = 0.0;
    c.initial_exposed = 0;
    World w(c, 3);
    w.apply_policy(action_from({2.5, 2.5, 0, 0, 0, 0, 0, 0}));
    for (int t = 0; t < c.policy_period_ticks; ++t) {
        bool expect = t >= 15 && t < 30;
        INFO("window tick " << t);
        CHECK(w.lockdown_active() == expect);
        w.step_tick();
    }
}

TEST_CASE("vaccination drives cover the days their interval overlaps", "[epi_sim]") {
    SimConfig c;
    World w(c, 3);
    w.apply_policy(action_from({0, 0, 5, 2, 2.5, 2.5, 0, 0}));
    // Group 0: [5, 7) -> days 5, 6. Group 1: [2.5, 5) -> days 2, 3, 4.
    for (int d = 0; d < 7; ++d) {
        CHECK(w.drive_active(0, d) == (d == 5 || d == 6));
        CHECK(w.drive_active(1, d) == (d >= 2 && d <= 4));
        CHECK_FALSE(w.drive_active(2, d)); // zero duration
    }
}

TEST_CASE("daily vaccine quotas protect exactly on schedule", "[epi_sim]") {
    SimConfig c;
    c.beta = 0.0;
    c.initial_exposed = 0;
    c.protection_delay_days = 0;
    c.vaccine_eff = {1.0, 1.0};
    World w(c, 5);
    w.apply_policy(action_from({0, 0, 0, 0, 0, 7, 0, 0})); // adults all week
    for (int t = 0; t < 6; ++t) w.step_tick();
    CHECK(count_of(w, Compartment::Protected) == 12); // 6 + 6 doses, all take
    int v1 = 0, v2 = 0;
    for (const Agent& a : w.agents()) {
        if (a.vaccine == VaccineType::V1) ++v1;
        if (a.vaccine == VaccineType::V2) ++v2;
        if (a.vaccine != VaccineType::None) {
            CHECK(a.age >= 18);
            CHECK(a.age <= 59);
        }
    }
    CHECK(v1 == 6);
    CHECK(v2 == 6);
    for (int t = 0; t < 6; ++t) w.step_tick();
    CHECK(count_of(w, Compartment::Protected) == 24);
}

TEST_CASE("failed vaccinations stay susceptible and are marked", "[epi_sim]") {
    SimConfig c;
    c.beta = 0.0;
    c.initial_exposed = 0;
    c.protection_delay_days = 0;
    c.vaccine_eff = {0.0, 0.0};
    World w(c, 5);
    w.apply_policy(action_from({0, 0, 0, 0, 0, 7, 0, 0}));
    for (int t = 0; t < 6; ++t) w.step_tick();
    CHECK(count_of(w, Compartment::Protected) == 0);
    int failed = 0;
    for (const Agent& a : w.agents())
        if (a.vaccination_day == -2) ++failed;
    CHECK(failed == 12);
}

TEST_CASE("the protection delay postpones the outcome roll", "[epi_sim]") {
    SimConfig c;
    c.beta = 0.0;
    c.initial_exposed = 0;
    c.protection_delay_days = 3;
    c.vaccine_eff = {1.0, 1.0};
    World w(c, 5);
    w.apply_policy(action_from({0, 0, 0, 0, 0, 7, 0, 0}));
    for (int day = 0; day < 3; ++day) {
        for (int t = 0; t < 6; ++t) w.step_tick();
        CHECK(count_of(w, Compartment::Protected) == 0); // vaccinated but waiting
    }
    for (int t = 0; t < 6; ++t) w.step_tick();
    CHECK(count_of(w, Compartment::Protected) == 12); // day-0 batch matures on day 3
}

TEST_CASE("household economy: working week with guaranteed shopping", "[epi_sim]") {
    SimConfig c;
    c.population = 4;
    c.households = 1;
    c.offices = 1;
    c.schools = 1;
    c.shops = 1;
    c.days = 7;
    c.age_group_fractions = {0.0, 1.0, 0.0}; // all employed adults
    c.initial_exposed = 0;
    c.beta = 0.0;
    c.shop_probability = 1.0;
    World w(c, 1);
    w.apply_policy(PolicyAction{}); // no lockdown
    for (int t = 0; t < 42; ++t) w.step_tick();
    // Each day: 4 agents earn 1 apiece, the first shopper banks it, the
    // household eats 1 -> net +3 per day on the initial 10.
    CHECK_THAT(w.households()[0].stock, WithinAbs(31.0, 1e-9));
    CHECK_THAT(w.observe().bpl_frac, WithinAbs(0.0, 1e-12));
}

TEST_CASE("household economy: permanent lockdown starves households", "[epi_sim]") {
    SimConfig c;
    c.beta = 0.0;
    c.initial_exposed = 0;
    c.days = 14;
    World w(c, 1);
    for (int week = 0; week < 2; ++week) {
        w.apply_policy(action_from({0, 7, 0, 0, 0, 0, 0, 0}));
        for (int t = 0; t < 42; ++t) w.step_tick();
    }
    // Stock 10 drains by 1 a day with no income: below the threshold of 2
    // after day 9, for every household.
    CHECK_THAT(w.observe().bpl_frac, WithinAbs(1.0, 1e-12));
    CHECK_THAT(reward(w.observe()), WithinAbs(2.0, 1e-12));
}

TEST_CASE("a zero-transmission world never grows the infection", "[epi_sim]") {
    SimConfig c;
    c.beta = 0.0;
    auto roll = run_episode(c, [](const Observation&) { return PolicyAction{}; }, 42, "Run-0",
                            EpisodeKind::Train, true);
    World w(c, 42);
    CHECK(w.ever_infected_count() == 10);
    for (const auto& counts : roll.tick_counts) {
        int exposed_or_later = 0;
        for (int i = 0; i < kCompartmentCount; ++i)
            if (i != static_cast<int>(Compartment::Susceptible) &&
                i != static_cast<int>(Compartment::Protected))
                exposed_or_later += counts[i];
        CHECK(exposed_or_later == 10);
    }
}

TEST_CASE("compartment counts conserve the population every tick", "[epi_sim]") {
    SimConfig c;
    c.beta = 0.5; // deliberately explosive
    auto roll = run_episode(c, [](const Observation&) { return PolicyAction{}; }, 7, "Run-0",
                            EpisodeKind::Train, true);
    REQUIRE(roll.tick_counts.size() == 600);
    int max_hosp = 0;
    for (const auto& counts : roll.tick_counts) {
        CHECK(std::accumulate(counts.begin(), counts.end(), 0) == 1000);
        int hosp = counts[static_cast<int>(Compartment::Hospitalized)];
        CHECK(hosp <= c.hospital_capacity());
        max_hosp = std::max(max_hosp, hosp);
    }
    CHECK(max_hosp > 0); // the cap check must not be vacuous
}

TEST_CASE("episodes record one step per policy window", "[epi_sim]") {
    SimConfig c;
    auto roll = run_episode(c, [](const Observation&) { return PolicyAction{}; }, 9, "Run-3",
                            EpisodeKind::Exploit);
    CHECK(roll.episode.run_name == "Run-3");
    CHECK(roll.episode.kind == EpisodeKind::Exploit);
    REQUIRE(roll.episode.steps.size() == 14);
    for (int i = 0; i < 14; ++i) {
        const Step& s = roll.episode.steps[static_cast<std::size_t>(i)];
        CHECK(s.tick == static_cast<long long>(i) * 42);
        CHECK(s.observation.size() == 3);
        CHECK(s.action.size() == 8);
        CHECK(s.reward >= 0.0);
        CHECK(s.reward <= 3.0);
    }
}

TEST_CASE("policy warnings surface through the rollout", "[epi_sim]") {
    SimConfig c;
    c.days = 7;
    auto roll = run_episode(
            c, [](const Observation&) { return action_from({9, 0, 0, 0, 0, 0, 0, 0}); }, 9, "Run-0",
            EpisodeKind::Train);
    REQUIRE(roll.warnings.size() == 1);
    CHECK(roll.warnings[0].find("component 0") != std::string::npos);
    // The recorded action is the applied (clamped) one.
    CHECK(roll.episode.steps[0].action[0] == 7.0);
}

TEST_CASE("identical seeds reproduce the episode, different seeds do not", "[epi_sim]") {
    SimConfig c;
    c.days = 28;
    c.beta = 0.5;
    auto decide = [](const Observation& o) {
        return action_from({o.infected_frac * 7.0, 2.0, 0, 0, 1.0, 3.0, 0, 0});
    };
    auto a = run_episode(c, decide, 1234, "Run-0", EpisodeKind::Train);
    auto b = run_episode(c, decide, 1234, "Run-0", EpisodeKind::Train);
    REQUIRE(a.episode.steps.size() == b.episode.steps.size());
    for (std::size_t i = 0; i < a.episode.steps.size(); ++i) {
        CHECK(a.episode.steps[i].observation == b.episode.steps[i].observation);
        CHECK(a.episode.steps[i].action == b.episode.steps[i].action);
        CHECK(a.episode.steps[i].reward == b.episode.steps[i].reward);
    }
    auto other = run_episode(c, decide, 1235, "Run-0", EpisodeKind::Train);
    bool any_diff = false;
    for (std::size_t i = 0; i < a.episode.steps.size(); ++i)
        if (a.episode.steps[i].reward != other.episode.steps[i].reward) any_diff = true;
    CHECK(any_diff);
}

TEST_CASE("hospitalized and deceased agents stay home", "[epi_sim]") {
    SimConfig c;
    World w(c, 2);
    w.apply_policy(PolicyAction{});
    Agent& a = w.agents()[0];
    a.comp = Compartment::Hospitalized;
    CHECK(w.schedule_location(a, 3) == a.household);
    a.comp = Compartment::Deceased;
    CHECK(w.schedule_location(a, 3) == a.household);
    a.comp = Compartment::Susceptible;
    CHECK(w.schedule_location(a, 3) == a.work_location);
}
