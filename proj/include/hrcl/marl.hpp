#pragma once

// MDP wrapper, PPO machinery and the centralized-training / decentralized-execution loops.
// One actor (or a stack of actors, for two-level policies) and one centralized critic
// are shared by all agents.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hrcl/costs.hpp"
#include "hrcl/domain.hpp"
#include "hrcl/epos.hpp"
#include "hrcl/neural.hpp"
#include "hrcl/plangen.hpp"
#include "hrcl/rng.hpp"

namespace hrcl {

/// [tau (D), global (D), own plan (D), own normalized discomfort, t / T]
struct AgentState {
    Vector values;
};

AgentState encode_state(std::span<const double> target, std::span<const double> global,
                        std::span<const double> own_plan, double own_discomfort, double discomfort_scale, int period,
                        int periods);

/// One agent-period sample. `actions` holds one index per policy level.
struct Transition {
    AgentState state;
    std::vector<std::size_t> actions;
    std::vector<double> log_probs;  // per level, under the behavior policy at collection time
    double reward = 0.0;
    AgentState next_state;
    std::vector<std::size_t> next_actions;
    bool terminal = false;
    int agent = 0;
    int episode = 0;
    int period = 0;
};

struct PpoConfig {
    double gamma = 0.95;
    double clip = 0.2;
    std::size_t batch = 64;  // H, per agent
    int epochs = 4;
    std::size_t minibatch = 64;
    double entropy = 0.01;
    bool normalize_advantage = true;  // actor only: zero mean, unit variance per minibatch
    AdamConfig adam;

    void validate() const;
};

/// Input of actor level `level`: state followed by one-hot codes of the earlier levels' actions.
Vector actor_input(const AgentState& state, std::span<const std::size_t> actions, std::span<const std::size_t> heads,
                   std::size_t level);
/// Critic input: state followed by one-hot codes of every level's action.
Vector critic_input(const AgentState& state, std::span<const std::size_t> actions, std::span<const std::size_t> heads);

/// R + gamma * Q(S', A') - Q(S, A), with Q(S', A') = 0 on terminal transitions.
double advantage(const Transition& tr, const DenseNetwork& critic, std::span<const std::size_t> heads, double gamma);

double log_policy(const DenseNetwork& actor, std::span<const double> input, std::size_t action);
/// exp(log pi(a|s) - old_log_prob).
double prob_ratio(const DenseNetwork& actor, double old_log_prob, std::span<const double> input, std::size_t action);
/// min(ratio * adv, clip(ratio, 1 - eps, 1 + eps) * adv).
double clipped_surrogate(double ratio, double adv, double epsilon);

struct LossReport {
    double actor_loss = 0.0;      // -(mean surrogate) - entropy * mean entropy, before the update
    double critic_loss = 0.0;     // mean squared advantage, before the update
    double surrogate = 0.0;       // mean clipped surrogate, before the update
    double entropy = 0.0;         // mean policy entropy, before the update
    double max_initial_ratio_deviation = 0.0;  // max |ratio - 1| against the freshly refreshed pi_old
    std::size_t samples = 0;
    std::size_t steps = 0;        // optimizer steps taken
};

struct Decision {
    std::vector<std::size_t> actions;
    std::vector<double> log_probs;
};

/// Shared actor stack plus centralized critic, each with its own Adam state.
class Learner {
public:
    Learner(std::size_t state_size, std::vector<std::size_t> heads, std::size_t hidden, const PpoConfig& config,
            std::uint64_t seed);
    /// Wraps existing networks (checkpoint restore); optimizers start fresh.
    Learner(std::vector<DenseNetwork> actors, DenseNetwork critic, const PpoConfig& config);

    /// Samples one action per level; greedy argmax (lowest index on ties) when `rng` is null.
    Decision act(const AgentState& state, Xoshiro256* rng) const;
    double q_value(const AgentState& state, std::span<const std::size_t> actions) const;

    /// PPO update over `batch` (already sampled). Throws PreconditionError on an empty batch.
    LossReport update(const std::vector<Transition>& batch, Xoshiro256& rng);

    const std::vector<std::size_t>& heads() const noexcept { return heads_; }
    const std::vector<DenseNetwork>& actors() const noexcept { return actors_; }
    const DenseNetwork& critic() const noexcept { return critic_; }
    const PpoConfig& config() const noexcept { return config_; }
    std::uint64_t updates() const noexcept { return updates_; }

private:
    LossReport losses(const std::vector<const Transition*>& items, std::vector<GradientBuffer>* actor_grads,
                      GradientBuffer* critic_grad) const;

    std::vector<std::size_t> heads_;
    std::vector<DenseNetwork> actors_;
    DenseNetwork critic_;
    PpoConfig config_;
    std::vector<Adam> actor_opt_;
    Adam critic_opt_;
    std::uint64_t updates_ = 0;
};

/// Sample `per_agent` transitions of each agent without replacement (or all of them
/// when fewer are stored), in a deterministic order given `rng`.
std::vector<Transition> sample_batch(const std::vector<Transition>& window, int agents, std::size_t per_agent,
                                     Xoshiro256& rng);

// ---------------------------------------------------------------------------
// Decision layer

enum class PolicyKind {
    none,          // fixed behavior, all plans allowed, EPOS only
    strategy,      // (group, behavior range) -> EPOS
    flat,          // direct plan choice, no EPOS
    hierarchical,  // group, then plan within the group, no EPOS
};

/// How agents' actions map to plan selections in one period.
struct PolicyLayout {
    PolicyKind kind = PolicyKind::strategy;
    std::size_t groups = 1;  // I (plan sets are split into this many groups)
    std::size_t ranges = 1;  // M
    std::optional<double> fixed_beta;  // overrides the range midpoint
    std::size_t plans = 1;   // K

    /// Sizes of the policy levels: {I*M}, {K}, {I, max G_i}; empty for `none`.
    std::vector<std::size_t> heads() const;
    std::size_t action_space_size() const;  // sum of heads
};

struct PeriodOutcome {
    std::vector<std::size_t> selections;
    std::vector<double> betas;
    GlobalPlan global;
    CostReport report;
    double reward = 0.0;
    std::vector<double> inefficiency_trace;  // EPOS only
    std::vector<double> combined_trace;
};

struct StepContext {
    const ExperimentConfig& config;
    InefficiencyMetric metric;
    PolicyLayout layout;
    double default_beta = 0.5;  // used by PolicyKind::none
    const IterationObserver* observer = nullptr;
};

/// Applies the agents' decisions to one period and scores it.
PeriodOutcome step_period(const StepContext& ctx, const std::vector<PlanSet>& sets, const Target& target,
                          const std::vector<Decision>& decisions);

// ---------------------------------------------------------------------------
// Rollouts

struct PeriodRow {
    int episode = 0;
    int period = 0;
    CostReport report;
    double reward = 0.0;
};

struct TraceRow {
    int period = 0;
    int iteration = 0;
    double inefficiency = 0.0;
    double combined = 0.0;
};

struct CurveRow {
    int episode = 0;
    double mean_reward = 0.0;
    double mean_discomfort = 0.0;
    double inefficiency = 0.0;
    double combined = 0.0;
};

struct Rollout {
    std::vector<PeriodRow> periods;
    std::vector<TraceRow> trace;
    std::vector<std::vector<std::size_t>> selections;  // per period, per agent
    std::vector<std::vector<std::vector<std::size_t>>> actions;  // per period, per agent, per level
    CurveRow summary;
};

/// Observation scale applied to target and global entries (1/U for the energy scenario).
double observation_scale(const Scenario& scenario);

/// Decentralized greedy rollout over the evaluation split. A null learner means
/// fixed behaviors (`PolicyKind::none`).
Rollout evaluate(const Scenario& scenario, const ExperimentConfig& config, const PolicyLayout& layout,
                 const Learner* learner, double default_beta, int episode_label);

struct TrainingResult {
    Learner learner;
    std::vector<CurveRow> curve;
    std::vector<LossReport> losses;
    Rollout evaluation;
};

/// Algorithm 1: sampled rollouts on the training split, PPO updates whenever at
/// least H fresh transitions per agent are stored (checked at episode end),
/// followed by a greedy evaluation rollout.
TrainingResult train(const Scenario& scenario, const ExperimentConfig& config, const PolicyLayout& layout);

/// Checkpoint of a trained learner with the layout it was trained for.
Checkpoint make_checkpoint(const Learner& learner, const ExperimentConfig& config, const PolicyLayout& layout);
/// Restores the learner; throws ConfigError when the checkpoint does not fit `layout` / `config`.
Learner restore_learner(const Checkpoint& ckpt, const ExperimentConfig& config, const PolicyLayout& layout);

/// Algorithm 2: greedy decentralized execution of a checkpointed actor.
Rollout execute(const Checkpoint& ckpt, const Scenario& scenario, const ExperimentConfig& config,
                const PolicyLayout& layout);

PpoConfig ppo_config(const ExperimentConfig& config);

}  // namespace hrcl
