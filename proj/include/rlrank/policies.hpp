#pragma once

#include <algorithm>
#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "rlrank/discretize.hpp"
#include "rlrank/epi_sim.hpp"
#include "rlrank/rng.hpp"
#include "rlrank/trace.hpp"

namespace rlrank {

// ---------------------------------------------------------------------------
// Policy interface

class Policy {
public:
    virtual ~Policy() = default;
    virtual PolicyAction act(const Observation& obs) = 0;
    // Called before each episode; training == false during exploitation.
    virtual void begin_episode(int episode_index, bool training) {
        (void)episode_index;
        (void)training;
    }
    // Called once after each completed training episode.
    virtual void learn(const Episode& episode) { (void)episode; }
};

// Uniform action in [0, 7]^8, independent of the observation.
class RandomPolicy : public Policy {
public:
    explicit RandomPolicy(std::uint64_t seed) : rng_(seed) {}

    PolicyAction act(const Observation&) override {
        PolicyAction a;
        for (double& x : a.v) x = rng_.uniform(PolicyAction::kLo, PolicyAction::kHi);
        return a;
    }

private:
    Rng rng_;
};

// Fixed reactive rule: lock down in proportion to the infected fraction
// unless households are already hurting, and keep week-long vaccination
// drives running for the elderly with half-week drives for everyone else.
class HeuristicPolicy : public Policy {
public:
    PolicyAction act(const Observation& obs) override {
        PolicyAction a;
        double lockdown_days = 7.0 * std::min(1.0, obs.infected_frac / 0.2);
        if (obs.bpl_frac > 0.1) lockdown_days = 0.0;
        a.v = {0.0, lockdown_days, 0.0, 3.5, 0.0, 3.5, 0.0, 7.0};
        return a;
    }
};

// ---------------------------------------------------------------------------
// Tabular Q-learning on the binned observation/action spaces

struct QLearnConfig {
    double learning_rate = 0.1;
    double gamma = 0.95;
    double epsilon_start = 0.2;
    double epsilon_end = 0.02;
};

// Q-learning over the binned state space with actions drawn from the binned
// action grid (each action index decodes to its bin midpoints). Exploration
// is epsilon-greedy with epsilon annealed linearly across training episodes;
// exploitation is pure greedy with ties going to the lowest action index.
class BinnedQPolicy : public Policy {
public:
    BinnedQPolicy(const BinningSpec& spec, const QLearnConfig& cfg, int train_episodes,
                  std::uint64_t seed)
        : spec_(spec),
          cfg_(cfg),
          train_episodes_(train_episodes),
          rng_(seed),
          state_radices_(spec.state_radices()),
          action_radices_(spec.action_radices()),
          state_count_(index_space_size(state_radices_)),
          action_count_(index_space_size(action_radices_)),
          q_(static_cast<std::size_t>(state_count_ * action_count_), 0.0) {
        // Precompute index -> action vector (bin midpoints).
        action_values_.resize(static_cast<std::size_t>(action_count_));
        for (long long idx = 0; idx < action_count_; ++idx) {
            auto bins = decode(idx, action_radices_);
            std::vector<double> v(bins.size());
            for (std::size_t i = 0; i < bins.size(); ++i) {
                const auto& edges = spec_.action_edges[i];
                v[i] = 0.5 * (edges[static_cast<std::size_t>(bins[i])] +
                              edges[static_cast<std::size_t>(bins[i]) + 1]);
            }
            action_values_[static_cast<std::size_t>(idx)] = std::move(v);
        }
    }

    void begin_episode(int episode_index, bool training) override {
        training_ = training;
        if (!training || train_episodes_ <= 1) {
            epsilon_ = training ? cfg_.epsilon_start : 0.0;
            return;
        }
        double t = static_cast<double>(std::min(episode_index, train_episodes_ - 1)) /
                   static_cast<double>(train_episodes_ - 1);
        epsilon_ = cfg_.epsilon_start + t * (cfg_.epsilon_end - cfg_.epsilon_start);
    }

    PolicyAction act(const Observation& obs) override {
        long long s = state_of(obs.to_vector());
        long long a = (training_ && rng_.bernoulli(epsilon_))
                              ? static_cast<long long>(rng_.below(static_cast<std::uint64_t>(action_count_)))
                              : greedy_action(s);
        return PolicyAction::from_vector(action_values_[static_cast<std::size_t>(a)]);
    }

    void learn(const Episode& episode) override {
        std::size_t n = episode.steps.size();
        for (std::size_t t = 0; t < n; ++t) {
            const Step& step = episode.steps[t];
            long long s = state_of(step.observation);
            long long a = action_index_of(step.action);
            double target = step.reward;
            if (t + 1 < n) target += cfg_.gamma * max_q(state_of(episode.steps[t + 1].observation));
            double& cell = q_at(s, a);
            cell += cfg_.learning_rate * (target - cell);
        }
    }

    long long greedy_action(long long state) const {
        long long best = 0;
        double best_q = q_at(state, 0);
        for (long long a = 1; a < action_count_; ++a) {
            double q = q_at(state, a);
            if (q > best_q) {
                best_q = q;
                best = a;
            }
        }
        return best;
    }

    long long state_of(const std::vector<double>& observation) const {
        std::vector<int> bins(observation.size());
        for (std::size_t i = 0; i < observation.size(); ++i)
            bins[i] = bin_component(observation[i], spec_.state_edges[i]);
        return encode(bins, state_radices_);
    }

    long long action_index_of(const std::vector<double>& action) const {
        std::vector<int> bins(action.size());
        for (std::size_t i = 0; i < action.size(); ++i)
            bins[i] = bin_component(action[i], spec_.action_edges[i]);
        return encode(bins, action_radices_);
    }

    double q_value(long long state, long long action) const { return q_at(state, action); }

    void update(long long state, long long action, double target) {
        double& cell = q_at(state, action);
        cell += cfg_.learning_rate * (target - cell);
    }

private:
    double max_q(long long state) const { return q_at(state, greedy_action(state)); }

    double& q_at(long long s, long long a) {
        return q_[static_cast<std::size_t>(s * action_count_ + a)];
    }
    const double& q_at(long long s, long long a) const {
        return q_[static_cast<std::size_t>(s * action_count_ + a)];
    }

    BinningSpec spec_;
    QLearnConfig cfg_;
    int train_episodes_;
    Rng rng_;
    std::vector<int> state_radices_;
    std::vector<int> action_radices_;
    long long state_count_;
    long long action_count_;
    std::vector<double> q_;
    std::vector<std::vector<double>> action_values_;
    bool training_ = true;
    double epsilon_ = 0.0;
};

// ---------------------------------------------------------------------------
// Noise wrappers

// "NR_": adds Gaussian noise to every emitted action component (stddev =
// scale times the action range), then clamps back into [0, 7]. Active during
// training and exploitation alike.
class ActionNoiseWrapper : public Policy {
public:
    ActionNoiseWrapper(std::unique_ptr<Policy> inner, double scale, std::uint64_t seed)
        : inner_(std::move(inner)), scale_(scale), rng_(seed) {}

    PolicyAction act(const Observation& obs) override {
        PolicyAction a = inner_->act(obs);
        for (double& x : a.v) {
            x += rng_.normal(0.0, scale_ * (PolicyAction::kHi - PolicyAction::kLo));
            x = std::clamp(x, PolicyAction::kLo, PolicyAction::kHi);
        }
        return a;
    }

    void begin_episode(int episode_index, bool training) override {
        inner_->begin_episode(episode_index, training);
    }

    // The recorded episode already contains the noisy executed actions.
    void learn(const Episode& episode) override { inner_->learn(episode); }

private:
    std::unique_ptr<Policy> inner_;
    double scale_;
    Rng rng_;
};

// "BN_": the inner policy perceives a noise-corrupted observation (Gaussian
// per component, clamped to [0, 1]) while the environment and the trace keep
// the true one. Learning sees the same corruption.
class ObservationNoiseWrapper : public Policy {
public:
    ObservationNoiseWrapper(std::unique_ptr<Policy> inner, double scale, std::uint64_t seed)
        : inner_(std::move(inner)), scale_(scale), rng_(seed) {}

    PolicyAction act(const Observation& obs) override {
        Observation noisy = obs;
        noisy.infected_frac = corrupt(obs.infected_frac);
        noisy.hospitalized_frac = corrupt(obs.hospitalized_frac);
        noisy.bpl_frac = corrupt(obs.bpl_frac);
        return inner_->act(noisy);
    }

    void begin_episode(int episode_index, bool training) override {
        inner_->begin_episode(episode_index, training);
    }

    void learn(const Episode& episode) override {
        Episode noisy = episode;
        for (Step& step : noisy.steps)
            for (double& x : step.observation) x = corrupt(x);
        inner_->learn(noisy);
    }

private:
    double corrupt(double x) {
        return std::clamp(x + rng_.normal(0.0, scale_), kObservationLo, kObservationHi);
    }

    std::unique_ptr<Policy> inner_;
    double scale_;
    Rng rng_;
};

// ---------------------------------------------------------------------------
// Variants and the bench

struct PolicyVariant {
    enum class Base { Random, Heuristic, BinnedQ };

    Base base = Base::Heuristic;
    bool action_noise = false;      // NR_ prefix
    bool observation_noise = false; // BN_ prefix
    double noise_scale = 0.1;

    static const char* base_name(Base b) {
        switch (b) {
            case Base::Random: return "Random";
            case Base::Heuristic: return "Heuristic";
            case Base::BinnedQ: return "BinnedQ";
        }
        return "?";
    }

    static Base base_from_name(const std::string& name) {
        if (name == "Random") return Base::Random;
        if (name == "Heuristic") return Base::Heuristic;
        if (name == "BinnedQ") return Base::BinnedQ;
        throw InputError("unknown policy base '" + name + "'");
    }

    std::string label() const {
        std::string out;
        if (action_noise) out += "NR_";
        if (observation_noise) out += "BN_";
        out += base_name(base);
        return out;
    }
};

// The stock roster: both deterministic bases crossed with every noise
// combination.
inline std::vector<PolicyVariant> default_variants() {
    std::vector<PolicyVariant> out;
    for (PolicyVariant::Base base : {PolicyVariant::Base::Heuristic, PolicyVariant::Base::BinnedQ})
        for (bool nr : {false, true})
            for (bool bn : {false, true}) {
                PolicyVariant v;
                v.base = base;
                v.action_noise = nr;
                v.observation_noise = bn;
                out.push_back(v);
            }
    return out;
}

inline std::unique_ptr<Policy> make_policy(const PolicyVariant& variant, const BinningSpec& spec,
                                           const QLearnConfig& qcfg, int train_episodes,
                                           std::uint64_t seed) {
    std::unique_ptr<Policy> p;
    switch (variant.base) {
        case PolicyVariant::Base::Random:
            p = std::make_unique<RandomPolicy>(derive_seed(seed, variant.label() + "/base"));
            break;
        case PolicyVariant::Base::Heuristic:
            p = std::make_unique<HeuristicPolicy>();
            break;
        case PolicyVariant::Base::BinnedQ:
            p = std::make_unique<BinnedQPolicy>(spec, qcfg, train_episodes,
                                                derive_seed(seed, variant.label() + "/base"));
            break;
    }
    if (variant.observation_noise)
        p = std::make_unique<ObservationNoiseWrapper>(std::move(p), variant.noise_scale,
                                                      derive_seed(seed, variant.label() + "/bn"));
    if (variant.action_noise)
        p = std::make_unique<ActionNoiseWrapper>(std::move(p), variant.noise_scale,
                                                 derive_seed(seed, variant.label() + "/nr"));
    return p;
}

struct BenchOptions {
    int train_episodes = 40;
    int exploit_episodes = 10;
    std::uint64_t seed = 1;
    bool record_tick_counts = false;
};

struct VariantRun {
    TraceSet traces;
    // Per episode (trace order), per tick: compartment counts. Only filled
    // when BenchOptions::record_tick_counts is set.
    std::vector<std::vector<std::array<int, kCompartmentCount>>> tick_counts;
    std::vector<std::string> warnings;
};

// Trains (where applicable) and exploits one variant on one experiment,
// producing its full trace set. Fresh training episodes first, then greedy
// exploitation episodes with the learned behavior frozen.
inline VariantRun run_variant(const SimConfig& sim, const std::string& experiment_name,
                              const PolicyVariant& variant, const BinningSpec& spec,
                              const QLearnConfig& qcfg, const BenchOptions& options) {
    if (options.train_episodes < 1 || options.exploit_episodes < 1)
        throw InputError("policy bench: need at least one training and one exploit episode");
    std::string label = variant.label();
    std::uint64_t stream = derive_seed(options.seed, experiment_name + "/" + label);
    auto policy = make_policy(variant, spec, qcfg, options.train_episodes, stream);

    VariantRun run;
    run.traces.algorithm_name = label;
    run.traces.experiment_name = experiment_name;
    run.traces.meta = {{"base", PolicyVariant::base_name(variant.base)},
                       {"action_noise", variant.action_noise ? "true" : "false"},
                       {"observation_noise", variant.observation_noise ? "true" : "false"},
                       {"noise_scale", std::to_string(variant.noise_scale)},
                       {"seed", std::to_string(options.seed)}};

    auto decide = [&policy](const Observation& obs) { return policy->act(obs); };
    for (int e = 0; e < options.train_episodes; ++e) {
        policy->begin_episode(e, /*training=*/true);
        EpisodeRollout rollout =
                run_episode(sim, decide, derive_seed(stream, "train-" + std::to_string(e)),
                            "Run-" + std::to_string(e), EpisodeKind::Train,
                            options.record_tick_counts);
        policy->learn(rollout.episode);
        run.traces.episodes.push_back(std::move(rollout.episode));
        if (options.record_tick_counts) run.tick_counts.push_back(std::move(rollout.tick_counts));
        for (std::string& w : rollout.warnings)
            run.warnings.push_back(label + " train " + std::to_string(e) + ": " + std::move(w));
    }
    for (int e = 0; e < options.exploit_episodes; ++e) {
        int index = options.train_episodes + e;
        policy->begin_episode(index, /*training=*/false);
        EpisodeRollout rollout =
                run_episode(sim, decide, derive_seed(stream, "exploit-" + std::to_string(e)),
                            "Run-" + std::to_string(index) + "-Exploit", EpisodeKind::Exploit,
                            options.record_tick_counts);
        run.traces.episodes.push_back(std::move(rollout.episode));
        if (options.record_tick_counts) run.tick_counts.push_back(std::move(rollout.tick_counts));
        for (std::string& w : rollout.warnings)
            run.warnings.push_back(label + " exploit " + std::to_string(e) + ": " + std::move(w));
    }
    return run;
}

} // namespace rlrank
