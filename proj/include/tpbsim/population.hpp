#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "tpbsim/error.hpp"
#include "tpbsim/model.hpp"
#include "tpbsim/rng.hpp"

namespace tpb {

struct Range {
    double lo = 0.0;
    double hi = 0.0;

    bool operator==(const Range&) const = default;
};

// Initial-attitude ranges for the majority and minority groups.
inline std::pair<Range, Range> default_ranges(BehaviorType behavior) noexcept {
    if (behavior == BehaviorType::Beneficial) return {{0.0, 0.4}, {0.6, 0.7}};
    return {{0.6, 1.0}, {0.3, 0.4}};
}

struct PopulationConfig {
    std::size_t n = 300;
    double alpha = 0.9;  // majority fraction
    BehaviorType behavior = BehaviorType::Beneficial;
    Range majority = default_ranges(BehaviorType::Beneficial).first;
    Range minority = default_ranges(BehaviorType::Beneficial).second;
    std::uint64_t seed = 0;

    static PopulationConfig defaults_for(BehaviorType behavior) {
        PopulationConfig c;
        c.behavior = behavior;
        std::tie(c.majority, c.minority) = default_ranges(behavior);
        return c;
    }

    // floor(alpha * n); the epsilon absorbs representation error such as 0.9 * 300.
    std::size_t majority_size() const noexcept {
        return static_cast<std::size_t>(std::floor(alpha * static_cast<double>(n) + 1e-9));
    }

    void validate() const {
        if (n < 1) throw ConfigError("n must be >= 1");
        if (!(alpha >= 0.5 && alpha <= 1.0)) throw ConfigError("alpha must lie in [0.5,1]");
        auto check = [](const Range& r, const char* name) {
            if (!(r.lo >= 0.0 && r.hi <= 1.0 && r.lo <= r.hi))
                throw ConfigError(std::string(name) + " must satisfy 0 <= lo <= hi <= 1");
        };
        check(majority, "majority_range");
        check(minority, "minority_range");
    }

    bool operator==(const PopulationConfig&) const = default;
};

// Stream layout under a population seed s:
//   derive_seed(s, 0)      initial attitudes, drawn in agent index order
//   derive_seed(s, i + 1)  agent i's action draws, one per step
inline RandomStream init_stream(std::uint64_t seed) { return RandomStream(derive_seed(seed, 0)); }
inline RandomStream agent_stream(std::uint64_t seed, std::size_t i) { return RandomStream(derive_seed(seed, i + 1)); }

/// Full population state. Each agent owns its RNG substream, so results
/// do not depend on the order in which agents are visited within a step.
struct Population {
    std::vector<AgentState> agents;
    std::vector<RandomStream> streams;
    std::int64_t t = 0;
    std::size_t adopters = 0;  // number of agents with y = 1

    std::size_t size() const noexcept { return agents.size(); }
    double y_avg() const noexcept {
        return static_cast<double>(adopters) / static_cast<double>(agents.size());
    }

    bool operator==(const Population&) const = default;
};

inline Population init_population(const PopulationConfig& config, const ModelParams& params) {
    config.validate();
    params.validate();
    Population pop;
    pop.agents.resize(config.n);
    pop.streams.reserve(config.n);
    RandomStream init = init_stream(config.seed);
    const std::size_t m = config.majority_size();
    for (std::size_t i = 0; i < config.n; ++i) {
        const Range& r = i < m ? config.majority : config.minority;
        AgentState& a = pop.agents[i];
        a.x0 = init.uniform(r.lo, r.hi);
        a.x = a.x0;
        a.z = a.x0;
        a.p = choice_probability(a.z, params.beta);
        pop.streams.emplace_back(agent_stream(config.seed, i));
        a.y = sample_action(a.p, pop.streams.back());
        a.h = a.y;
        pop.adopters += static_cast<std::size_t>(a.y);
    }
    return pop;
}

/// Advances every agent one step: attitude, intention, probability, action.
/// All agents read the adoption rate of the previous step.
inline void step(Population& pop, const ModelParams& params) {
    const double norm = pop.y_avg();
    std::size_t adopters = 0;
    for (std::size_t i = 0; i < pop.agents.size(); ++i) {
        AgentState& a = pop.agents[i];
        a.x = attitude_update(a.x0, params.lambda, a.h, params.behavior);
        a.z = intention_update(a.x, norm, params.phi);
        a.p = choice_probability(a.z, params.beta);
        a.y = sample_action(a.p, pop.streams[i]);
        a.h = cumulative_count_update(a.h, a.y);
        adopters += static_cast<std::size_t>(a.y);
    }
    pop.adopters = adopters;
    ++pop.t;
}

struct Trajectory {
    ModelParams params;
    PopulationConfig config;
    std::vector<double> y_avg;          // entries t = 0..T
    std::vector<std::size_t> adopters;  // y_avg[t] == adopters[t] / n
    std::vector<std::vector<AgentState>> snapshots;  // empty unless requested

    std::size_t horizon() const noexcept { return y_avg.empty() ? 0 : y_avg.size() - 1; }
};

inline Trajectory run(const PopulationConfig& config, const ModelParams& params, std::int64_t horizon,
                      bool record_states = false) {
    if (horizon < 1) throw ConfigError("horizon must be >= 1");
    Trajectory traj{params, config, {}, {}, {}};
    traj.y_avg.reserve(static_cast<std::size_t>(horizon) + 1);
    traj.adopters.reserve(static_cast<std::size_t>(horizon) + 1);
    Population pop = init_population(config, params);
    auto record = [&] {
        traj.y_avg.push_back(pop.y_avg());
        traj.adopters.push_back(pop.adopters);
        if (record_states) traj.snapshots.push_back(pop.agents);
    };
    record();
    for (std::int64_t t = 0; t < horizon; ++t) {
        step(pop, params);
        record();
    }
    return traj;
}

}  // namespace tpb
