#pragma once

// Low-level decentralized plan selection: iterative collective learning over a
// balanced binary tree. Each iteration runs a bottom-up phase (children report
// subtree aggregates, every agent selects its own plan) and a top-down phase
// (parents send approval decisions and the new global plan downward).

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "hrcl/costs.hpp"
#include "hrcl/domain.hpp"

namespace hrcl {

/// Heap-indexed binary tree: parent(v) = (v - 1) / 2, children {2v+1, 2v+2} within [0, U).
struct TreeTopology {
    std::vector<int> parent;                 // -1 for the root
    std::vector<std::vector<int>> children;  // ascending agent id

    std::size_t size() const noexcept { return parent.size(); }
    int root() const noexcept { return 0; }
    int depth(int agent) const;
};

TreeTopology build_tree(int agents);

std::string to_string(ApprovalMode mode);
/// Throws ConfigError (key "approval") on unknown names.
ApprovalMode parse_approval(const std::string& name);

struct EposOptions {
    int iterations = 20;  // L
    bool guard = true;    // revert a whole iteration that raises inefficiency
    ApprovalMode approval = ApprovalMode::independent;
    InefficiencyMetric metric = InefficiencyMetric::rmse;
    double sigma1 = 0.5;
    double sigma2 = 0.5;
    double inefficiency_scale = 1.0;
};

/// Per-agent protocol state.
struct NodeState {
    std::size_t selection = 0;  // committed selection
    std::size_t previous = 0;   // committed selection at the start of the iteration
    std::size_t proposal = 0;   // plan picked during the current bottom-up phase
    bool has_previous = false;  // false until the first iteration commits
    bool approved = true;       // delta received from the parent in the current iteration
    Vector subtree;             // aggregate reported to the parent in the current iteration
    Vector previous_subtree;    // committed subtree aggregate at the start of the iteration
    Vector last_global;         // global plan stored after the previous iteration
    Behavior behavior;
    IndexRange allowed;
    double discomfort_scale = 1.0;
};

struct IterationRecord {
    int iteration = 0;
    std::vector<std::size_t> candidates;  // selections implied by the bottom-up phase
    Vector tentative_global;              // aggregate obtained at the root
    std::vector<NodeState> states;        // snapshot after the bottom-up phase
    std::vector<std::size_t> selections;  // committed after the top-down phase
    Vector global;                        // recomputed from the committed selections
    double inefficiency = 0.0;
    double combined = 0.0;
    bool guard_reverted = false;
};

struct EposResult {
    std::vector<Selection> selections;
    GlobalPlan global;
    CostReport report;
    std::vector<double> inefficiency_trace;  // one entry per iteration
    std::vector<double> combined_trace;
};

using IterationObserver = std::function<void(const IterationRecord&)>;

/// One EPOS engine bound to a period: plan sets, target, behaviors and allowed ranges.
class EposRun {
public:
    EposRun(const std::vector<PlanSet>& plansets, const Target& target, std::vector<Behavior> behaviors,
            std::vector<IndexRange> allowed, EposOptions options);

    /// Bottom-up phase of one iteration: candidate selections and root aggregate.
    void bottom_up_phase();
    /// Top-down phase: approvals, commit, global plan, guard. Returns the record.
    IterationRecord top_down_phase();
    /// bottom_up_phase followed by top_down_phase.
    IterationRecord iterate();

    const TreeTopology& topology() const noexcept { return tree_; }
    const std::vector<NodeState>& states() const noexcept { return states_; }
    const Vector& global() const noexcept { return global_; }
    double inefficiency() const noexcept { return inefficiency_; }
    int iteration() const noexcept { return iteration_; }

    EposResult result() const;

private:
    double own_score(std::size_t agent, std::size_t k, std::span<const double> others) const;
    double ineff(std::span<const double> global) const;
    double combined_of(const std::vector<std::size_t>& selections, std::span<const double> global) const;
    void add_plan(Vector& acc, std::size_t agent, std::size_t k, double sign) const;
    void joint_bottom_up(bool cold);

    // One subtree option of a node under joint approval.
    struct Option {
        std::size_t plan = 0;
        Vector aggregate;
        double discomfort = 0.0;  // sum of beta * normalized discomfort over the subtree
        double weight = 0.0;      // sum of (1 - beta) over the subtree
        std::vector<std::size_t> picks;  // option index per child
    };

    const std::vector<PlanSet>& sets_;
    Target target_;
    EposOptions options_;
    TreeTopology tree_;
    std::vector<NodeState> states_;
    std::vector<bool> delta_;  // per agent, decided by its parent
    std::vector<std::vector<Option>> options_menu_;
    std::vector<std::size_t> best_option_;
    Vector tentative_;
    Vector global_;
    double inefficiency_ = 0.0;
    int iteration_ = 0;
    bool bottom_up_done_ = false;
    std::vector<double> ineff_trace_;
    std::vector<double> combined_trace_;
};

/// Best plan index in the node's allowed range given `others`, the global plan
/// the agent assumes for everyone else. Ties go to the lowest index.
std::size_t local_select(const NodeState& node, const PlanSet& set, const Target& target,
                         std::span<const double> others, const EposOptions& options);

/// Runs L iterations from a cold start. `observer` sees every iteration record.
EposResult epos_run(const std::vector<PlanSet>& plansets, const Target& target,
                    const std::vector<Behavior>& behaviors, const std::vector<IndexRange>& allowed,
                    const EposOptions& options, const IterationObserver& observer = {});

/// Sum over agents of beta * normalized discomfort + (1 - beta) * normalized inefficiency of
/// the true global plan. The quantity the oracle minimizes.
double selection_objective(const std::vector<PlanSet>& plansets, const std::vector<std::size_t>& selections,
                           const Target& target, const std::vector<Behavior>& behaviors,
                           const EposOptions& options);

struct OracleResult {
    double cost = 0.0;
    double inefficiency = 0.0;
    std::vector<std::size_t> selections;
    GlobalPlan global;
};

inline constexpr double kOracleLimit = 1e6;

/// Exhaustive search over all selection combinations (allowed ranges, when given).
/// Throws PreconditionError when the combination count exceeds kOracleLimit.
/// Ties are broken towards the lexicographically smallest selection vector.
OracleResult brute_force_oracle(const std::vector<PlanSet>& plansets, const Target& target,
                                const std::vector<Behavior>& behaviors, const EposOptions& options,
                                const std::vector<IndexRange>& allowed = {});

}  // namespace hrcl
