#pragma once

// Method variants over the shared engine. They differ only in the decision layer.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hrcl/marl.hpp"

namespace hrcl {

struct MethodSpec {
    MethodId method = MethodId::hrcl;
    std::optional<double> beta;  // fixed behavior of the EPOS variants
    bool sweep = false;          // EPOS-P
    PolicyLayout layout;

    bool learning() const noexcept { return layout.kind != PolicyKind::none; }
    /// Total action-space size over all policy levels (0 without a policy).
    std::size_t action_space_size() const { return layout.action_space_size(); }
    /// e.g. "I*M=16", "K=8", "I+maxG=4+2".
    std::string action_space() const;
};

MethodSpec method_spec(const ExperimentConfig& config);

/// {0, midpoints of the M behavior ranges, 1}.
std::vector<double> epos_p_grid(int ranges);

struct MethodRun {
    MethodSpec spec;
    Rollout evaluation;
    std::vector<CurveRow> curve;
    std::vector<LossReport> losses;
    std::optional<Checkpoint> checkpoint;
    double beta = 0.0;                               // behavior used (EPOS variants)
    std::vector<std::pair<double, double>> sweep;    // EPOS-P: (beta, total combined cost)
};

MethodRun run_epos_variant(const Scenario& scenario, const ExperimentConfig& config, const MethodSpec& spec);
MethodRun run_mappo(const Scenario& scenario, const ExperimentConfig& config);
MethodRun run_hrl(const Scenario& scenario, const ExperimentConfig& config);
/// Dispatches on config.method.
MethodRun run_method(const Scenario& scenario, const ExperimentConfig& config);

}  // namespace hrcl
