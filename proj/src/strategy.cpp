#include "hrcl/strategy.hpp"

#include <string>

#include "hrcl/error.hpp"

namespace hrcl {

AgentAction ActionSpace::encode(std::size_t group, std::size_t range) const {
    if (group >= groups) throw PreconditionError("group index " + std::to_string(group) + " out of range");
    if (range < 1 || range > ranges) throw PreconditionError("behavior range " + std::to_string(range) + " out of range");
    return {group, range, group * ranges + (range - 1)};
}

AgentAction ActionSpace::decode(std::size_t flat) const {
    if (flat >= size()) throw PreconditionError("action index " + std::to_string(flat) + " out of range");
    return {flat / ranges, flat % ranges + 1, flat};
}

IndexRange restrict_planset(const PlanSet& set, const AgentAction& action) {
    return set.group(action.group);
}

Behavior behavior_from_range(std::size_t m, std::size_t count) {
    if (count < 1 || m < 1 || m > count)
        throw PreconditionError("behavior range " + std::to_string(m) + " not in [1, " + std::to_string(count) + "]");
    const double M = static_cast<double>(count);
    return Behavior(static_cast<double>(m) / M - 1.0 / (2.0 * M));
}

}  // namespace hrcl
