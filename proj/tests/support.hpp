#pragma once

#include <cstddef>
#include <vector>

#include "hrcl/domain.hpp"
#include "hrcl/rng.hpp"

namespace hrcl::test {

inline PlanSet make_set(int agent, const std::vector<std::vector<double>>& values,
                        const std::vector<double>& discomfort, std::size_t groups = 1) {
    std::vector<Plan> plans;
    for (std::size_t k = 0; k < values.size(); ++k) plans.push_back({values[k], discomfort[k]});
    return PlanSet(agent, std::move(plans), groups);
}

/// U agents with K plans of D uniform values in [-2, 2] and linear discomforts.
inline std::vector<PlanSet> random_sets(Xoshiro256& rng, std::size_t agents, std::size_t plans, std::size_t dim) {
    std::vector<PlanSet> sets;
    for (std::size_t u = 0; u < agents; ++u) {
        std::vector<Plan> list;
        for (std::size_t k = 0; k < plans; ++k) {
            Plan p;
            for (std::size_t d = 0; d < dim; ++d) p.values.push_back(rng.uniform(-2.0, 2.0));
            p.discomfort = plans > 1 ? static_cast<double>(k) / static_cast<double>(plans - 1) : 0.0;
            list.push_back(std::move(p));
        }
        sets.emplace_back(static_cast<int>(u), std::move(list));
    }
    return sets;
}

inline Target random_target(Xoshiro256& rng, std::size_t dim, double scale = 3.0) {
    Target t;
    for (std::size_t d = 0; d < dim; ++d) t.values.push_back(rng.uniform(-scale, scale));
    return t;
}

inline ExperimentConfig small_config() {
    ExperimentConfig c;
    c.agents = 4;
    c.plans = 4;
    c.dim = 4;
    c.periods = 3;
    c.groups = 2;
    c.ranges = 2;
    c.iterations = 5;
    c.episodes = 6;
    c.batch = 8;
    c.hidden = 8;
    c.epochs = 2;
    c.minibatch = 8;
    c.seeds = {1, 2};
    return c;
}

}  // namespace hrcl::test
