#pragma once

// Objective and reward functions: discomfort, inefficiency (RMSE against a
// target, or variance of the global plan), the behavior-weighted selection
// objective and the shared reward.

#include <span>

#include "hrcl/domain.hpp"

namespace hrcl {

enum class InefficiencyMetric { rmse, variance };

/// Normalizers and reward weights. Scales must be strictly positive.
struct RewardWeights {
    double sigma1 = 0.5;
    double sigma2 = 0.5;
    double discomfort_scale = 1.0;
    double inefficiency_scale = 1.0;
};

struct CostReport {
    double mean_discomfort = 0.0;          // raw, averaged over agents
    double inefficiency = 0.0;             // raw f_i
    double normalized_discomfort = 0.0;    // mean over agents of discomfort / agent scale
    double normalized_inefficiency = 0.0;  // inefficiency / period scale
    double combined = 0.0;                 // sigma1 * normalized_discomfort + sigma2 * normalized_inefficiency
    int period = 0;
};

double mean_discomfort(std::span<const Plan> selected);
double mean_discomfort(std::span<const Plan* const> selected);

double inefficiency_rmse(const Target& target, const GlobalPlan& global);
double inefficiency_variance(const GlobalPlan& global);

/// Raw-vector form used on hot paths; `target` is ignored for the variance metric.
double inefficiency(InefficiencyMetric metric, std::span<const double> target, std::span<const double> global);

/// beta * discomfort / discomfort_scale + (1 - beta) * f_i(target, candidate) / inefficiency_scale
double combined_objective(const Plan& plan, const GlobalPlan& candidate_global, const Target& target,
                          Behavior beta, const RewardWeights& weights,
                          InefficiencyMetric metric = InefficiencyMetric::rmse);

/// Per-agent discomfort normalizer: max discomfort of the agent's plan set, 1 if that is 0.
double discomfort_scale(const PlanSet& set) noexcept;

/// Inefficiency normalizer for one period: the cost of the do-nothing outcome.
/// RMSE: f_i(target, 0). Variance: variance of `baseline` (the aggregate of the
/// zero-discomfort plans). Falls back to 1 when that cost is 0.
double inefficiency_scale(InefficiencyMetric metric, const Target& target, const GlobalPlan& baseline);

/// Full cost breakdown of one period. `discomfort_scales` holds one entry per agent.
CostReport evaluate_costs(std::span<const Plan* const> selected, std::span<const double> discomfort_scales,
                          const Target& target, const GlobalPlan& global, InefficiencyMetric metric,
                          double inefficiency_scale, double sigma1, double sigma2);

/// Shared reward -sigma1 * normalized mean discomfort - sigma2 * normalized inefficiency.
double compute_reward(const CostReport& report, double sigma1, double sigma2) noexcept;
double compute_reward(std::span<const Plan* const> selected, std::span<const double> discomfort_scales,
                      const Target& target, const GlobalPlan& global, const RewardWeights& weights,
                      InefficiencyMetric metric = InefficiencyMetric::rmse);

}  // namespace hrcl
