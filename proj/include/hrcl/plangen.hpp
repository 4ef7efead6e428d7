#pragma once

// Plan generation for the two scenarios (standard-normal synthetic plans and
// load-shifted energy demand), plus target construction and evolution.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "hrcl/costs.hpp"
#include "hrcl/domain.hpp"

namespace hrcl {

struct SyntheticSpec {
    std::size_t plans = 16;
    std::size_t dim = 100;
    std::uint64_t seed = 1;
    std::size_t groups = 1;
};

/// K plans of D independent N(0, 1) samples from the substream derive_seed(seed, {agent_id});
/// discomforts ramp linearly over [0, 1] with plan index (0 when K = 1).
PlanSet generate_synthetic_planset(const SyntheticSpec& spec, int agent_id);

struct LoadShiftSpec {
    Vector base;                       // measured demand, kW per interval
    std::vector<int> offsets_minutes;  // one extra plan per offset
    int resolution_minutes = 5;
    std::size_t groups = 1;
};

/// The nine default offsets: 75, 150 and 720 minutes in both directions,
/// then 225 and 300 until nine shifted variants exist.
std::vector<int> default_shift_offsets(std::size_t count = 9);

/// First plan is the base profile (discomfort 0); every offset adds the base
/// circularly shifted by offset / resolution positions with discomfort |offset|.
PlanSet generate_loadshift_planset(const LoadShiftSpec& spec, int agent_id);

/// Synthetic household demand over D five-minute intervals (kW, non-negative):
/// a base load, a midday and an evening peak, a few appliance pulses and noise.
Vector synthetic_demand_profile(std::uint64_t stream_seed, std::size_t dim);

struct CosineTargetSpec {
    double amplitude = 1.0;
    double omega = 0.1308996938995747;  // pi / 24
    std::size_t dim = 100;
};

/// tau_0[d] = amplitude * cos(omega * d)
Target cosine_target(const CosineTargetSpec& spec);

/// tau_{t+1} = tau_t - g_t, period incremented.
Target update_target(const Target& previous, const GlobalPlan& global);

/// Reachability default: U * (mean absolute plan value) * 0.5.
double default_amplitude(const std::vector<PlanSet>& sets);

enum class Split { train, eval };

/// Everything an episode needs from the environment: per-period plan sets,
/// the initial target and its evolution, and the inefficiency metric.
class Scenario {
public:
    explicit Scenario(const ExperimentConfig& config);

    ScenarioKind kind() const noexcept { return kind_; }
    InefficiencyMetric metric() const noexcept {
        return kind_ == ScenarioKind::energy ? InefficiencyMetric::variance : InefficiencyMetric::rmse;
    }
    int agents() const noexcept { return agents_; }
    int plans() const noexcept { return plans_; }
    int dim() const noexcept { return dim_; }
    int periods() const noexcept { return periods_; }
    double amplitude() const noexcept { return amplitude_; }
    std::uint64_t seed() const noexcept { return seed_; }
    bool from_dataset() const noexcept { return !dataset_.empty(); }
    std::string generator_name() const;

    /// Plan set of one agent in one period. Training episodes draw fresh subsets
    /// from the training split; evaluation always sees the held-out split.
    PlanSet planset(Split split, int episode, int period, int agent, std::size_t groups) const;
    std::vector<PlanSet> plansets(Split split, int episode, int period, std::size_t groups) const;

    Target initial_target() const;
    Target next_target(const Target& target, const GlobalPlan& global) const;

    /// Aggregate of every agent's zero-discomfort plan (the do-nothing outcome).
    static GlobalPlan baseline(const std::vector<PlanSet>& sets);

    /// Writes agent_<id>.plans (evaluation split, period 0) and dataset.meta.
    void write_dataset(const std::filesystem::path& dir) const;

    /// Hash over the evaluation plan sets of period 0 and the target; identifies the dataset.
    std::string dataset_hash() const;

private:
    PlanSet synthetic_planset(Split split, int episode, int period, int agent, std::size_t groups) const;
    PlanSet energy_planset(Split split, int episode, int period, int agent, std::size_t groups) const;

    ScenarioKind kind_;
    int agents_;
    int plans_;
    int dim_;
    int periods_;
    std::uint64_t seed_;
    double omega_;
    double amplitude_ = 0.0;
    std::vector<int> offsets_;
    std::vector<std::vector<Vector>> pools_;  // synthetic: per agent, 5K candidate vectors
    std::vector<PlanSet> dataset_;           // loaded from data_dir, reused every period
};

}  // namespace hrcl
