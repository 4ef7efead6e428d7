#include "hrcl/costs.hpp"

#include <cmath>

#include "hrcl/error.hpp"

namespace hrcl {

namespace {

void require_finite(double v, const char* what) {
    if (!std::isfinite(v)) throw PreconditionError(std::string(what) + " must be finite");
}

double rmse(std::span<const double> a, std::span<const double> b) {
    double sum = 0.0;
    for (std::size_t d = 0; d < a.size(); ++d) {
        const double diff = a[d] - b[d];
        sum += diff * diff;
    }
    return std::sqrt(sum / static_cast<double>(a.size()));
}

double population_variance(std::span<const double> g) {
    double mean = 0.0;
    for (double v : g) mean += v;
    mean /= static_cast<double>(g.size());
    double sum = 0.0;
    for (double v : g) sum += (v - mean) * (v - mean);
    return sum / static_cast<double>(g.size());
}

}  // namespace

double mean_discomfort(std::span<const Plan> selected) {
    if (selected.empty()) throw PreconditionError("mean_discomfort: empty selection");
    double sum = 0.0;
    for (const auto& p : selected) sum += p.discomfort;
    return sum / static_cast<double>(selected.size());
}

double mean_discomfort(std::span<const Plan* const> selected) {
    if (selected.empty()) throw PreconditionError("mean_discomfort: empty selection");
    double sum = 0.0;
    for (const Plan* p : selected) sum += p->discomfort;
    return sum / static_cast<double>(selected.size());
}

double inefficiency_rmse(const Target& target, const GlobalPlan& global) {
    require_same_dim(target.dim(), global.dim(), "inefficiency_rmse");
    if (global.dim() == 0) throw DimensionError("inefficiency_rmse: empty vectors");
    return rmse(target.values, global.values);
}

double inefficiency_variance(const GlobalPlan& global) {
    if (global.dim() == 0) throw DimensionError("inefficiency_variance: empty vector");
    return population_variance(global.values);
}

double inefficiency(InefficiencyMetric metric, std::span<const double> target, std::span<const double> global) {
    if (metric == InefficiencyMetric::variance) return population_variance(global);
    return rmse(target, global);
}

double combined_objective(const Plan& plan, const GlobalPlan& candidate_global, const Target& target,
                          Behavior beta, const RewardWeights& weights, InefficiencyMetric metric) {
    require_finite(plan.discomfort, "plan discomfort");
    for (double v : candidate_global.values) require_finite(v, "candidate global plan");
    if (metric == InefficiencyMetric::rmse) {
        require_same_dim(target.dim(), candidate_global.dim(), "combined_objective");
        for (double v : target.values) require_finite(v, "target");
    }
    const double ineff = inefficiency(metric, target.values, candidate_global.values);
    const double b = beta.beta();
    return b * (plan.discomfort / weights.discomfort_scale) + (1.0 - b) * (ineff / weights.inefficiency_scale);
}

double discomfort_scale(const PlanSet& set) noexcept {
    const double m = set.max_discomfort();
    return m > 0.0 ? m : 1.0;
}

double inefficiency_scale(InefficiencyMetric metric, const Target& target, const GlobalPlan& baseline) {
    double cost = 0.0;
    if (metric == InefficiencyMetric::rmse) {
        const Vector zero(target.dim(), 0.0);
        cost = rmse(target.values, zero);
    } else {
        cost = inefficiency_variance(baseline);
    }
    return cost > 0.0 ? cost : 1.0;
}

CostReport evaluate_costs(std::span<const Plan* const> selected, std::span<const double> discomfort_scales,
                          const Target& target, const GlobalPlan& global, InefficiencyMetric metric,
                          double ineff_scale, double sigma1, double sigma2) {
    if (selected.empty()) throw PreconditionError("evaluate_costs: empty selection");
    require_same_dim(selected.size(), discomfort_scales.size(), "evaluate_costs scales");
    if (metric == InefficiencyMetric::rmse) require_same_dim(target.dim(), global.dim(), "evaluate_costs");

    CostReport r;
    r.period = target.period;
    double norm_sum = 0.0;
    for (std::size_t u = 0; u < selected.size(); ++u) norm_sum += selected[u]->discomfort / discomfort_scales[u];
    r.mean_discomfort = mean_discomfort(selected);
    r.normalized_discomfort = norm_sum / static_cast<double>(selected.size());
    r.inefficiency = inefficiency(metric, target.values, global.values);
    r.normalized_inefficiency = r.inefficiency / ineff_scale;
    r.combined = sigma1 * r.normalized_discomfort + sigma2 * r.normalized_inefficiency;
    return r;
}

double compute_reward(const CostReport& report, double sigma1, double sigma2) noexcept {
    return -sigma1 * report.normalized_discomfort - sigma2 * report.normalized_inefficiency;
}

double compute_reward(std::span<const Plan* const> selected, std::span<const double> discomfort_scales,
                      const Target& target, const GlobalPlan& global, const RewardWeights& weights,
                      InefficiencyMetric metric) {
    const CostReport r = evaluate_costs(selected, discomfort_scales, target, global, metric,
                                        weights.inefficiency_scale, weights.sigma1, weights.sigma2);
    return compute_reward(r, weights.sigma1, weights.sigma2);
}

}  // namespace hrcl
