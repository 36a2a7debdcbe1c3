#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "rlrank/errors.hpp"
#include "rlrank/rng.hpp"
#include "rlrank/trace.hpp"

namespace rlrank {

// ---------------------------------------------------------------------------
// Disease states

enum class Compartment : std::uint8_t {
    Susceptible,
    Exposed,
    Asymptomatic,
    InfectedMild,
    InfectedSevere,
    Hospitalized,
    Recovered,
    Deceased,
    Protected, // vaccinated, past the protection delay, vaccine took effect
};

constexpr int kCompartmentCount = 9;

inline const char* compartment_name(Compartment c) {
    switch (c) {
        case Compartment::Susceptible: return "susceptible";
        case Compartment::Exposed: return "exposed";
        case Compartment::Asymptomatic: return "asymptomatic";
        case Compartment::InfectedMild: return "infected_mild";
        case Compartment::InfectedSevere: return "infected_severe";
        case Compartment::Hospitalized: return "hospitalized";
        case Compartment::Recovered: return "recovered";
        case Compartment::Deceased: return "deceased";
        case Compartment::Protected: return "protected";
    }
    return "?";
}

enum class MaskType : std::uint8_t { None, HighEff, LowEff };
enum class VaccineType : std::uint8_t { None, V1, V2 };
enum class Role : std::uint8_t { Student, Employed };

// Under-30s attend school, everyone else goes to an office.
inline Role role_for_age(int age) { return age < 30 ? Role::Student : Role::Employed; }

// ---------------------------------------------------------------------------
// Policy interface

// The weekly control vector, all components in days within [0, 7]:
//   [0] lockdown start    [1] lockdown duration
//   [2] drive start 0-17  [3] drive duration 0-17
//   [4] drive start 18-59 [5] drive duration 18-59
//   [6] drive start 60-99 [7] drive duration 60-99
struct PolicyAction {
    static constexpr int kComponents = 8;
    static constexpr double kLo = 0.0;
    static constexpr double kHi = 7.0;

    std::array<double, kComponents> v{};

    double lockdown_start() const { return v[0]; }
    double lockdown_duration() const { return v[1]; }
    double drive_start(int age_group) const { return v[2 + 2 * age_group]; }
    double drive_duration(int age_group) const { return v[3 + 2 * age_group]; }

    std::vector<double> to_vector() const { return {v.begin(), v.end()}; }

    static PolicyAction from_vector(const std::vector<double>& values) {
        if (values.size() != kComponents)
            throw std::invalid_argument("PolicyAction: expected " + std::to_string(kComponents) +
                                        " components, got " + std::to_string(values.size()));
        PolicyAction a;
        std::copy(values.begin(), values.end(), a.v.begin());
        return a;
    }
};

// What the policy sees each week. Fractions of the population (or of
// households for the poverty component).
struct Observation {
    double infected_frac = 0.0;     // asymptomatic + mild + severe, not yet hospitalized
    double hospitalized_frac = 0.0;
    double bpl_frac = 0.0;          // households below the poverty-line stock threshold

    std::vector<double> to_vector() const { return {infected_frac, hospitalized_frac, bpl_frac}; }
};

// Weekly reward: how far each burden indicator sits below its worst case.
inline double reward(const Observation& obs, const std::array<double, 3>& weights = {1.0, 1.0,
                                                                                     1.0}) {
    return weights[0] * (1.0 - obs.infected_frac) + weights[1] * (1.0 - obs.hospitalized_frac) +
           weights[2] * (1.0 - obs.bpl_frac);
}

// ---------------------------------------------------------------------------
// Configuration

struct SimConfig {
    int population = 1000;
    int days = 100;
    int ticks_per_day = 6;
    int policy_period_ticks = 42; // one calendar week

    int households = 300;
    int offices = 25;
    int schools = 12;
    int shops = 15;
    std::array<double, 3> age_group_fractions{0.22, 0.58, 0.20}; // 0-17, 18-59, 60-99

    int initial_exposed = 10;
    double beta = 0.02; // per-tick transmission probability per infectious contact

    double mask_eff_high = 0.8;
    double mask_eff_low = 0.4;
    int mask_stock_high = 500;
    int mask_stock_low = 1000;

    std::array<double, 2> vaccine_eff{0.8, 0.6};      // V1, V2 success probability
    std::array<int, 2> vaccine_doses_per_day{6, 6};   // V1, V2 global daily quota
    int protection_delay_days = 10;
    double vaccine_consent = 1.0;

    // Mean dwell times in days; exits are geometric with rate 1/mean.
    double mean_days_exposed = 3.0;
    double mean_days_asymptomatic = 5.0;
    double mean_days_mild = 6.0;
    double mean_days_severe = 3.0;
    double mean_days_hospitalized = 8.0;
    double p_exposed_to_asymptomatic = 0.4;
    double p_mild_to_severe = 0.12;
    double p_hospitalized_death = 0.15;
    double hospital_cap_frac = 0.10;

    double initial_household_stock = 10.0;
    double household_daily_consumption = 1.0;
    double employed_daily_income = 1.0;
    double bpl_threshold = 2.0;
    double shop_probability = 0.5;

    std::array<double, 3> reward_weights{1.0, 1.0, 1.0};

    int total_ticks() const { return days * ticks_per_day; }
    int policy_steps() const { return total_ticks() / policy_period_ticks; }
    int hospital_capacity() const {
        return static_cast<int>(hospital_cap_frac * static_cast<double>(population));
    }

    void validate() const {
        auto fail = [](const std::string& msg) { throw InputError("simulation config: " + msg); };
        if (population <= 0) fail("population must be positive");
        if (days <= 0) fail("days must be positive");
        if (ticks_per_day <= 0) fail("ticks_per_day must be positive");
        if (policy_period_ticks <= 0) fail("policy_period_ticks must be positive");
        if (policy_period_ticks % ticks_per_day != 0)
            fail("policy_period_ticks must cover whole days");
        if (policy_steps() < 1) fail("run too short for a single policy step");
        if (households <= 0) fail("need at least one household");
        if (households > population) fail("more households than agents");
        if (offices <= 0 || schools <= 0 || shops <= 0)
            fail("need at least one office, school, and shop");
        double frac_sum = age_group_fractions[0] + age_group_fractions[1] + age_group_fractions[2];
        if (std::abs(frac_sum - 1.0) > 1e-9) fail("age group fractions must sum to 1");
        if (initial_exposed < 0 || initial_exposed > population)
            fail("initial_exposed outside [0, population]");
        if (beta < 0.0 || beta > 1.0) fail("beta outside [0, 1]");
        for (double e : {mask_eff_high, mask_eff_low})
            if (e < 0.0 || e > 1.0) fail("mask effectiveness outside [0, 1]");
        if (mask_stock_high < 0 || mask_stock_low < 0) fail("negative mask stock");
        for (double e : vaccine_eff)
            if (e < 0.0 || e > 1.0) fail("vaccine efficacy outside [0, 1]");
        for (int d : vaccine_doses_per_day)
            if (d < 0) fail("negative daily dose quota");
        if (protection_delay_days < 0) fail("negative protection delay");
        if (vaccine_consent < 0.0 || vaccine_consent > 1.0) fail("consent outside [0, 1]");
        for (double m : {mean_days_exposed, mean_days_asymptomatic, mean_days_mild,
                         mean_days_severe, mean_days_hospitalized})
            if (m < 1.0) fail("mean dwell time below one day");
        for (double p : {p_exposed_to_asymptomatic, p_mild_to_severe, p_hospitalized_death})
            if (p < 0.0 || p > 1.0) fail("branch probability outside [0, 1]");
        if (hospital_cap_frac < 0.0 || hospital_cap_frac > 1.0)
            fail("hospital_cap_frac outside [0, 1]");
        if (household_daily_consumption < 0.0) fail("negative consumption");
        if (employed_daily_income < 0.0) fail("negative income");
        if (shop_probability < 0.0 || shop_probability > 1.0)
            fail("shop_probability outside [0, 1]");
        for (double w : reward_weights)
            if (w < 0.0) fail("negative reward weight");
    }
};

// ---------------------------------------------------------------------------
// World state

struct Agent {
    std::int32_t id = 0;
    int age = 0;
    Role role = Role::Employed;
    std::int32_t household = 0;
    std::int32_t work_location = 0;
    double shop_pref = 0.5;
    bool vaccine_consent = true;
    MaskType mask = MaskType::None;
    VaccineType vaccine = VaccineType::None;
    int vaccination_day = -1; // -1 never vaccinated, -2 vaccine failed to take
    Compartment comp = Compartment::Susceptible;
    int days_in_compartment = 0;
};

struct Household {
    double stock = 0.0;
    double pending_income = 0.0;
};

// A population of rational-but-simple agents on a home/work/shop location
// graph with tick-level transmission, day-level disease progression, a
// household stock economy, and weekly lockdown / vaccination controls.
class World {
public:
    World(const SimConfig& config, std::uint64_t seed) : config_(config), rng_(seed) {
        config_.validate();
        build();
    }

    const SimConfig& config() const { return config_; }
    std::vector<Agent>& agents() { return agents_; }
    const std::vector<Agent>& agents() const { return agents_; }
    const std::vector<Household>& households() const { return households_; }
    int current_day() const { return day_; }

    // Location ids: homes come first, then offices, schools, shops.
    int home_location(const Agent& a) const { return a.household; }
    int office_base() const { return config_.households; }
    int school_base() const { return config_.households + config_.offices; }
    int shop_base() const { return config_.households + config_.offices + config_.schools; }
    int location_count() const { return shop_base() + config_.shops; }

    std::array<int, kCompartmentCount> compartment_counts() const {
        std::array<int, kCompartmentCount> counts{};
        for (const Agent& a : agents_) ++counts[static_cast<int>(a.comp)];
        return counts;
    }

    int hospitalized_count() const { return hospitalized_; }

    // Agents that have ever carried the infection (everything that is neither
    // still susceptible nor vaccine-protected got there by being exposed).
    int ever_infected_count() const {
        auto counts = compartment_counts();
        return config_.population - counts[static_cast<int>(Compartment::Susceptible)] -
               counts[static_cast<int>(Compartment::Protected)];
    }

    double mask_effectiveness(const Agent& a) const {
        switch (a.mask) {
            case MaskType::HighEff: return config_.mask_eff_high;
            case MaskType::LowEff: return config_.mask_eff_low;
            case MaskType::None: return 0.0;
        }
        return 0.0;
    }

    // -----------------------------------------------------------------------
    // Weekly policy

    // Clamps every component into [0, 7]; one warning per adjusted component.
    static PolicyAction clamp_action(const PolicyAction& action,
                                     std::vector<std::string>* warnings) {
        PolicyAction out = action;
        for (int i = 0; i < PolicyAction::kComponents; ++i) {
            double& x = out.v[i];
            double original = x;
            if (!std::isfinite(x)) x = PolicyAction::kLo;
            x = std::clamp(x, PolicyAction::kLo, PolicyAction::kHi);
            if (x != original && warnings) {
                std::ostringstream msg;
                msg << "policy component " << i << ": " << original << " clamped to " << x;
                warnings->push_back(msg.str());
            }
        }
        return out;
    }

    // Starts a new policy window: resets the window clock and translates the
    // day-valued action into a lockdown tick range and per-group drive days.
    PolicyAction apply_policy(const PolicyAction& action,
                              std::vector<std::string>* warnings = nullptr) {
        PolicyAction a = clamp_action(action, warnings);
        window_tick_ = 0;
        double tpd = static_cast<double>(config_.ticks_per_day);
        lockdown_from_ = static_cast<int>(std::floor(a.lockdown_start() * tpd));
        lockdown_to_ = static_cast<int>(std::floor((a.lockdown_start() + a.lockdown_duration()) * tpd));
        lockdown_to_ = std::min(lockdown_to_, config_.policy_period_ticks);
        for (int g = 0; g < 3; ++g) {
            drive_start_[g] = a.drive_start(g);
            drive_duration_[g] = a.drive_duration(g);
        }
        return a;
    }

    bool lockdown_active() const {
        return window_tick_ >= lockdown_from_ && window_tick_ < lockdown_to_;
    }

    // A drive covers the days of the window its [start, start+duration)
    // interval overlaps.
    bool drive_active(int age_group, int day_of_window) const {
        double lo = drive_start_[age_group];
        double hi = lo + drive_duration_[age_group];
        return static_cast<double>(day_of_window) < hi && static_cast<double>(day_of_window) + 1.0 > lo;
    }

    // -----------------------------------------------------------------------
    // Tick schedule

    // Ticks 0-1: home. Ticks 2-4: work or school, unless a lockdown is active
    // or the agent is hospitalized or deceased (they stay home). Tick 5:
    // shopping trip with probability shop_pref, otherwise home.
    int schedule_location(const Agent& a, int tick_of_day) {
        if (a.comp == Compartment::Deceased || a.comp == Compartment::Hospitalized)
            return home_location(a);
        if (lockdown_active()) return home_location(a);
        if (tick_of_day >= 2 && tick_of_day <= 4) return a.work_location;
        if (tick_of_day == 5 && rng_.bernoulli(a.shop_pref))
            return shop_base() + static_cast<int>(rng_.below(static_cast<std::uint64_t>(config_.shops)));
        return home_location(a);
    }

    // -----------------------------------------------------------------------
    // Transmission

    // Probability that one susceptible agent gets exposed this tick, given
    // n_infectious co-located infectious agents, their mean mask
    // effectiveness, and the target's own mask: each contact transmits
    // independently with the mask-scaled beta.
    static double exposure_probability(double beta, int n_infectious, double mean_source_mask_eff,
                                       double target_mask_eff) {
        if (n_infectious <= 0) return 0.0;
        double effective = beta * (1.0 - mean_source_mask_eff) * (1.0 - target_mask_eff);
        return 1.0 - std::pow(1.0 - effective, static_cast<double>(n_infectious));
    }

    static bool infectious(Compartment c) {
        return c == Compartment::Asymptomatic || c == Compartment::InfectedMild ||
               c == Compartment::InfectedSevere;
    }

    // -----------------------------------------------------------------------
    // One tick

    double step_tick() {
        int tod = window_tick_ % config_.ticks_per_day;
        place_agents(tod);
        transmit();
        double r = reward(observe(), config_.reward_weights);
        if (tod == config_.ticks_per_day - 1) end_of_day();
        ++window_tick_;
        ++global_tick_;
        return r;
    }

    Observation observe() const {
        auto counts = compartment_counts();
        Observation o;
        o.infected_frac = static_cast<double>(counts[static_cast<int>(Compartment::Asymptomatic)] +
                                              counts[static_cast<int>(Compartment::InfectedMild)] +
                                              counts[static_cast<int>(Compartment::InfectedSevere)]) /
                          static_cast<double>(config_.population);
        o.hospitalized_frac = static_cast<double>(hospitalized_) /
                              static_cast<double>(config_.population);
        int poor = 0;
        for (const Household& h : households_)
            if (h.stock < config_.bpl_threshold) ++poor;
        o.bpl_frac = static_cast<double>(poor) / static_cast<double>(households_.size());
        return o;
    }

private:
    // -----------------------------------------------------------------------
    // Construction

    void build() {
        agents_.resize(static_cast<std::size_t>(config_.population));
        households_.assign(static_cast<std::size_t>(config_.households),
                           Household{config_.initial_household_stock, 0.0});
        // Balanced household sizes with shuffled membership.
        std::vector<std::int32_t> household_of(agents_.size());
        for (std::size_t i = 0; i < household_of.size(); ++i)
            household_of[i] = static_cast<std::int32_t>(i % static_cast<std::size_t>(config_.households));
        shuffle(household_of);

        for (std::size_t i = 0; i < agents_.size(); ++i) {
            Agent& a = agents_[i];
            a.id = static_cast<std::int32_t>(i);
            a.age = draw_age();
            a.role = role_for_age(a.age);
            a.household = household_of[i];
            a.work_location =
                    a.role == Role::Student
                            ? school_base() + static_cast<int>(rng_.below(static_cast<std::uint64_t>(config_.schools)))
                            : office_base() + static_cast<int>(rng_.below(static_cast<std::uint64_t>(config_.offices)));
            a.shop_pref = config_.shop_probability;
            a.vaccine_consent = rng_.bernoulli(config_.vaccine_consent);
        }

        // Masks: the high-effectiveness stock goes to a random slice of the
        // population, the low-effectiveness stock to the next slice.
        std::vector<std::int32_t> order(agents_.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<std::int32_t>(i);
        shuffle(order);
        std::size_t given = 0;
        for (int k = 0; k < config_.mask_stock_high && given < order.size(); ++k, ++given)
            agents_[static_cast<std::size_t>(order[given])].mask = MaskType::HighEff;
        for (int k = 0; k < config_.mask_stock_low && given < order.size(); ++k, ++given)
            agents_[static_cast<std::size_t>(order[given])].mask = MaskType::LowEff;

        // Seed infections.
        shuffle(order);
        for (int k = 0; k < config_.initial_exposed; ++k)
            agents_[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])].comp =
                    Compartment::Exposed;

        location_of_.assign(agents_.size(), 0);
        infectious_at_.assign(static_cast<std::size_t>(location_count()), 0);
        mask_sum_at_.assign(static_cast<std::size_t>(location_count()), 0.0);
    }

    int draw_age() {
        double u = rng_.uniform();
        if (u < age_group_fractions_cum(0)) return static_cast<int>(rng_.below(18));
        if (u < age_group_fractions_cum(1)) return 18 + static_cast<int>(rng_.below(42));
        return 60 + static_cast<int>(rng_.below(40));
    }

    double age_group_fractions_cum(int g) const {
        double acc = 0.0;
        for (int i = 0; i <= g; ++i) acc += config_.age_group_fractions[static_cast<std::size_t>(i)];
        return acc;
    }

    template <class T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i)
            std::swap(v[i - 1], v[static_cast<std::size_t>(rng_.below(i))]);
    }

    // -----------------------------------------------------------------------
    // Tick pieces

    void place_agents(int tod) {
        for (Agent& a : agents_) {
            int loc = schedule_location(a, tod);
            location_of_[static_cast<std::size_t>(a.id)] = loc;
            // Work attendance accrues a day's income over the three work ticks.
            if (a.role == Role::Employed && loc == a.work_location && tod >= 2 && tod <= 4 &&
                a.comp != Compartment::Deceased)
                households_[static_cast<std::size_t>(a.household)].pending_income +=
                        config_.employed_daily_income / 3.0;
            // A shopper converts the household's earnings into stock.
            if (tod == config_.ticks_per_day - 1 && loc >= shop_base()) {
                Household& h = households_[static_cast<std::size_t>(a.household)];
                h.stock += h.pending_income;
                h.pending_income = 0.0;
            }
        }
    }

    void transmit() {
        if (config_.beta <= 0.0) return;
        std::fill(infectious_at_.begin(), infectious_at_.end(), 0);
        std::fill(mask_sum_at_.begin(), mask_sum_at_.end(), 0.0);
        for (const Agent& a : agents_) {
            if (!infectious(a.comp)) continue;
            auto loc = static_cast<std::size_t>(location_of_[static_cast<std::size_t>(a.id)]);
            ++infectious_at_[loc];
            mask_sum_at_[loc] += mask_effectiveness(a);
        }
        newly_exposed_.clear();
        for (const Agent& a : agents_) {
            if (a.comp != Compartment::Susceptible) continue;
            auto loc = static_cast<std::size_t>(location_of_[static_cast<std::size_t>(a.id)]);
            int n = infectious_at_[loc];
            if (n == 0) continue;
            double source_mask = mask_sum_at_[loc] / static_cast<double>(n);
            double p = exposure_probability(config_.beta, n, source_mask, mask_effectiveness(a));
            if (rng_.bernoulli(p)) newly_exposed_.push_back(a.id);
        }
        for (std::int32_t id : newly_exposed_) {
            Agent& a = agents_[static_cast<std::size_t>(id)];
            a.comp = Compartment::Exposed;
            a.days_in_compartment = 0;
        }
    }

    void end_of_day() {
        for (Household& h : households_) h.stock -= config_.household_daily_consumption;
        dispense_vaccines();
        progress_disease();
        ++day_;
    }

    void dispense_vaccines() {
        int day_of_window = window_tick_ / config_.ticks_per_day;
        std::array<int, 2> quota = config_.vaccine_doses_per_day;
        for (int g = 0; g < 3; ++g) {
            if (!drive_active(g, day_of_window)) continue;
            if (quota[0] + quota[1] <= 0) break;
            std::vector<std::int32_t> eligible;
            int lo = g == 0 ? 0 : (g == 1 ? 18 : 60);
            int hi = g == 0 ? 17 : (g == 1 ? 59 : 99);
            for (const Agent& a : agents_)
                if (a.comp == Compartment::Susceptible && a.vaccine == VaccineType::None &&
                    a.vaccine_consent && a.age >= lo && a.age <= hi)
                    eligible.push_back(a.id);
            while (!eligible.empty() && quota[0] + quota[1] > 0) {
                std::size_t pick = static_cast<std::size_t>(rng_.below(eligible.size()));
                Agent& a = agents_[static_cast<std::size_t>(eligible[pick])];
                if (quota[0] > 0) {
                    a.vaccine = VaccineType::V1;
                    --quota[0];
                } else {
                    a.vaccine = VaccineType::V2;
                    --quota[1];
                }
                a.vaccination_day = day_;
                eligible[pick] = eligible.back();
                eligible.pop_back();
            }
        }
    }

    void progress_disease() {
        for (Agent& a : agents_) {
            ++a.days_in_compartment;
            switch (a.comp) {
                case Compartment::Susceptible:
                    // The protection delay has passed: the vaccine either takes
                    // (Protected for good) or is marked as failed.
                    if (a.vaccination_day >= 0 && day_ - a.vaccination_day >= config_.protection_delay_days) {
                        double eff = config_.vaccine_eff[a.vaccine == VaccineType::V1 ? 0 : 1];
                        if (rng_.bernoulli(eff)) {
                            set_compartment(a, Compartment::Protected);
                        } else {
                            a.vaccination_day = -2;
                        }
                    }
                    break;
                case Compartment::Exposed:
                    if (exits(config_.mean_days_exposed))
                        set_compartment(a, rng_.bernoulli(config_.p_exposed_to_asymptomatic)
                                                   ? Compartment::Asymptomatic
                                                   : Compartment::InfectedMild);
                    break;
                case Compartment::Asymptomatic:
                    if (exits(config_.mean_days_asymptomatic))
                        set_compartment(a, Compartment::Recovered);
                    break;
                case Compartment::InfectedMild:
                    if (exits(config_.mean_days_mild))
                        set_compartment(a, rng_.bernoulli(config_.p_mild_to_severe)
                                                   ? Compartment::InfectedSevere
                                                   : Compartment::Recovered);
                    break;
                case Compartment::InfectedSevere:
                    // Severe cases need a bed; past the cap they wait where
                    // they are and retry the next day.
                    if (exits(config_.mean_days_severe) && hospitalized_ < config_.hospital_capacity()) {
                        set_compartment(a, Compartment::Hospitalized);
                        ++hospitalized_;
                    }
                    break;
                case Compartment::Hospitalized:
                    if (exits(config_.mean_days_hospitalized)) {
                        --hospitalized_;
                        set_compartment(a, rng_.bernoulli(config_.p_hospitalized_death)
                                                   ? Compartment::Deceased
                                                   : Compartment::Recovered);
                    }
                    break;
                case Compartment::Recovered:
                case Compartment::Deceased:
                case Compartment::Protected:
                    break;
            }
        }
    }

    bool exits(double mean_days) { return rng_.bernoulli(1.0 / mean_days); }

    static void set_compartment(Agent& a, Compartment c) {
        a.comp = c;
        a.days_in_compartment = 0;
    }

    SimConfig config_;
    Rng rng_;
    std::vector<Agent> agents_;
    std::vector<Household> households_;
    std::vector<int> location_of_;
    std::vector<int> infectious_at_;
    std::vector<double> mask_sum_at_;
    std::vector<std::int32_t> newly_exposed_;
    int hospitalized_ = 0;
    int day_ = 0;
    int global_tick_ = 0;
    int window_tick_ = 0;
    int lockdown_from_ = 0;
    int lockdown_to_ = 0; // empty range: no lockdown until a policy sets one
    std::array<double, 3> drive_start_{0.0, 0.0, 0.0};
    std::array<double, 3> drive_duration_{0.0, 0.0, 0.0};
};

// ---------------------------------------------------------------------------
// Episode driver

struct EpisodeRollout {
    Episode episode; // one step per policy decision
    std::vector<std::array<int, kCompartmentCount>> tick_counts;
    std::vector<std::string> warnings;
};

// Runs one seeded episode: every policy_period the policy sees the current
// observation and sets the next window's action; the recorded reward is the
// mean per-tick reward over that window. Ticks beyond the last full window
// are simulated intervention-free but produce no step record.
inline EpisodeRollout run_episode(const SimConfig& config,
                                  const std::function<PolicyAction(const Observation&)>& decide,
                                  std::uint64_t seed, const std::string& run_name,
                                  EpisodeKind kind, bool record_tick_counts = false) {
    World world(config, seed);
    EpisodeRollout out;
    out.episode.run_name = run_name;
    out.episode.kind = kind;
    int steps = config.policy_steps();
    for (int i = 0; i < steps; ++i) {
        Observation obs = world.observe();
        PolicyAction applied = world.apply_policy(decide(obs), &out.warnings);
        double acc = 0.0;
        for (int t = 0; t < config.policy_period_ticks; ++t) {
            acc += world.step_tick();
            if (record_tick_counts) out.tick_counts.push_back(world.compartment_counts());
        }
        Step step;
        step.tick = static_cast<long long>(i) * config.policy_period_ticks;
        step.observation = obs.to_vector();
        step.action = applied.to_vector();
        step.reward = acc / static_cast<double>(config.policy_period_ticks);
        out.episode.steps.push_back(std::move(step));
    }
    int trailing = config.total_ticks() - steps * config.policy_period_ticks;
    if (trailing > 0) {
        world.apply_policy(PolicyAction{}, nullptr);
        for (int t = 0; t < trailing; ++t) {
            world.step_tick();
            if (record_tick_counts) out.tick_counts.push_back(world.compartment_counts());
        }
    }
    return out;
}

} // namespace rlrank
