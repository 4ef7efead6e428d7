#pragma once

// Core value types shared by every module: plans, plan sets, targets,
// global plans, behaviors and the experiment configuration.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hrcl {

using Vector = std::vector<double>;

/// Half-open index range [begin, end) into a PlanSet.
struct IndexRange {
    std::size_t begin = 0;
    std::size_t end = 0;

    std::size_t size() const noexcept { return end - begin; }
    bool contains(std::size_t k) const noexcept { return k >= begin && k < end; }
    bool operator==(const IndexRange&) const = default;
};

/// One candidate course of action: D values plus the discomfort of executing it.
struct Plan {
    Vector values;
    double discomfort = 0.0;

    std::size_t dim() const noexcept { return values.size(); }
    bool operator==(const Plan&) const = default;
};

/// Throws PreconditionError unless discomfort >= 0 and every entry is finite.
void validate_plan(const Plan& plan);

/// Splits K sorted items into `groups` contiguous, non-empty bins. Earlier bins
/// absorb the remainder, e.g. K=5, groups=2 gives {[0,3), [3,5)}.
std::vector<IndexRange> quantile_groups(std::size_t count, std::size_t groups);

/// The K plans one agent may choose from in one period, sorted ascending by
/// discomfort (stable) and partitioned into I contiguous groups.
class PlanSet {
public:
    PlanSet() = default;
    PlanSet(int agent_id, std::vector<Plan> plans, std::size_t groups = 1);

    int agent_id() const noexcept { return agent_id_; }
    std::size_t size() const noexcept { return plans_.size(); }
    std::size_t dim() const noexcept { return plans_.empty() ? 0 : plans_.front().dim(); }
    std::size_t group_count() const noexcept { return groups_.size(); }

    const Plan& operator[](std::size_t k) const { return plans_.at(k); }
    std::span<const Plan> plans() const noexcept { return plans_; }
    std::span<const IndexRange> groups() const noexcept { return groups_; }
    const IndexRange& group(std::size_t i) const;
    IndexRange whole() const noexcept { return {0, plans_.size()}; }

    /// Re-partitions the same sorted plans into a different number of groups.
    PlanSet regrouped(std::size_t groups) const;

    /// Largest discomfort in the set; the per-agent discomfort normalizer.
    double max_discomfort() const noexcept;

    bool operator==(const PlanSet&) const = default;

private:
    int agent_id_ = 0;
    std::vector<Plan> plans_;
    std::vector<IndexRange> groups_;
};

/// The system goal the global plan should match in period `period`.
struct Target {
    Vector values;
    int period = 0;

    std::size_t dim() const noexcept { return values.size(); }
    bool operator==(const Target&) const = default;
};

/// Element-wise sum of all selected plans.
struct GlobalPlan {
    Vector values;

    std::size_t dim() const noexcept { return values.size(); }
    bool operator==(const GlobalPlan&) const = default;
};

/// Selfishness weight in [0, 1]: 1 only cares about discomfort, 0 only about
/// inefficiency.
class Behavior {
public:
    Behavior() = default;
    explicit Behavior(double beta);

    double beta() const noexcept { return beta_; }
    bool operator==(const Behavior&) const = default;

private:
    double beta_ = 0.5;
};

struct Selection {
    int agent_id = 0;
    std::size_t plan_index = 0;
    int period = 0;

    bool operator==(const Selection&) const = default;
};

/// Element-wise sum of the plans, accumulated in the given (agent-id) order.
GlobalPlan aggregate_global_plan(std::span<const Plan> selected);
GlobalPlan aggregate_global_plan(std::span<const Plan* const> selected);

/// Plan dataset files: one `cost:v1,v2,...,vD` line per plan, any order.
std::string format_planset(const PlanSet& set);
PlanSet parse_planset(std::string_view text, int agent_id, std::size_t groups = 1);
std::filesystem::path planset_path(const std::filesystem::path& dir, int agent_id);
void write_planset_file(const std::filesystem::path& dir, const PlanSet& set);
PlanSet read_planset_file(const std::filesystem::path& dir, int agent_id, std::size_t groups = 1);

/// Throws DimensionError when the two lengths differ.
void require_same_dim(std::size_t a, std::size_t b, const char* what);

enum class ScenarioKind { synthetic, energy };
enum class MethodId { epos, epos_selfish, epos_altruistic, epos_p, mappo, hrl, hrcl, hrcl_p, hrcl_b };

/// How a parent decides on its children's changes.
enum class ApprovalMode {
    /// Children are tested one after another against the running aggregate
    /// (previous global plan plus the changes approved so far); the decision
    /// covers the child's whole subtree.
    sequential,
    /// Each child's own plan change is tested alone against the previous global
    /// plan, all other agents held at their previous plans.
    independent,
    /// Every node reports one subtree option per own plan; the parent picks its
    /// own plan and one option per child jointly, minimizing the subtree share
    /// of the selection objective. The top-down message carries the choice.
    joint,
};

std::string to_string(ScenarioKind kind);
std::string to_string(MethodId method);
ScenarioKind parse_scenario(const std::string& text);
MethodId parse_method(const std::string& text);
std::span<const MethodId> all_methods() noexcept;

/// True for the methods that train a policy.
bool is_learning_method(MethodId method) noexcept;

struct ExperimentConfig {
    ScenarioKind scenario = ScenarioKind::synthetic;
    MethodId method = MethodId::hrcl;

    int agents = 8;        // U
    int plans = 8;         // K
    int dim = 16;          // D
    int periods = 8;       // T
    int groups = 4;        // I
    int ranges = 4;        // M
    int iterations = 20;   // L
    int episodes = 500;    // training episodes
    int batch = 64;        // H
    int hidden = 64;       // W
    int epochs = 4;
    int minibatch = 64;
    double gamma = 0.95;
    double clip = 0.2;
    double sigma1 = 0.5;
    double sigma2 = 0.5;
    double beta = 0.5;     // fixed behavior of EPOS and HRCL-P
    double learning_rate = 3e-4;
    double entropy = 0.01;
    bool normalize_advantage = true;
    double omega = 0.1308996938995747;  // pi / 24
    double amplitude = -1.0;            // < 0 selects the reachability default
    bool guard = true;
    ApprovalMode approval = ApprovalMode::independent;
    std::uint64_t seed = 1;
    std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
    std::filesystem::path data_dir;     // optional pre-generated dataset

    /// Throws ConfigError naming the first key that violates an invariant.
    void validate() const;
};

}  // namespace hrcl
