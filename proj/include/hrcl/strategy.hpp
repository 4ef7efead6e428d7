#pragma once

// High-level action semantics: a joint discrete action picks a plan group
// (restricting low-level selection) and a behavior range (fixing beta).

#include <cstddef>

#include "hrcl/domain.hpp"

namespace hrcl {

/// Joint action (group i in [0, I), behavior range m in [1, M]) flattened as i * M + (m - 1).
struct AgentAction {
    std::size_t group = 0;
    std::size_t range = 1;
    std::size_t flat = 0;

    bool operator==(const AgentAction&) const = default;
};

/// Shape of the joint action space.
struct ActionSpace {
    std::size_t groups = 1;  // I
    std::size_t ranges = 1;  // M

    std::size_t size() const noexcept { return groups * ranges; }

    AgentAction encode(std::size_t group, std::size_t range) const;
    AgentAction decode(std::size_t flat) const;
};

/// Index range of group `action.group` in the (sorted) plan set.
IndexRange restrict_planset(const PlanSet& set, const AgentAction& action);

/// Midpoint of the m-th of M equal sub-ranges of [0, 1]: m / M - 1 / (2M).
Behavior behavior_from_range(std::size_t m, std::size_t count);

}  // namespace hrcl
