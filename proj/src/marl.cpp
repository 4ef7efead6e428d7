#include "hrcl/marl.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hrcl/error.hpp"
#include "hrcl/strategy.hpp"
#include "hrcl/text.hpp"

namespace hrcl {

namespace {

constexpr std::uint64_t kNetworkStream = 0x6e65'7473ULL;
constexpr std::uint64_t kActionStream = 0x6163'7473ULL;
constexpr std::uint64_t kUpdateStream = 0x7570'6474ULL;

std::size_t sum(std::span<const std::size_t> xs) {
    std::size_t s = 0;
    for (std::size_t x : xs) s += x;
    return s;
}

void append_one_hot(Vector& v, std::size_t index, std::size_t size) {
    if (index >= size) throw PreconditionError("action " + std::to_string(index) + " outside [0, " +
                                               std::to_string(size) + ")");
    const std::size_t at = v.size();
    v.resize(at + size, 0.0);
    v[at + index] = 1.0;
}

double entropy_of(std::span<const double> probs, std::span<const double> logp) {
    double h = 0.0;
    for (std::size_t j = 0; j < probs.size(); ++j) h -= probs[j] * logp[j];
    return h;
}

}  // namespace

AgentState encode_state(std::span<const double> target, std::span<const double> global,
                        std::span<const double> own_plan, double own_discomfort, double discomfort_scale, int period,
                        int periods) {
    require_same_dim(global.size(), target.size(), "state global plan");
    require_same_dim(own_plan.size(), target.size(), "state own plan");
    if (periods < 1) throw PreconditionError("encode_state: periods must be >= 1");
    if (!(discomfort_scale > 0.0)) throw PreconditionError("encode_state: discomfort scale must be positive");
    AgentState s;
    s.values.reserve(3 * target.size() + 2);
    s.values.insert(s.values.end(), target.begin(), target.end());
    s.values.insert(s.values.end(), global.begin(), global.end());
    s.values.insert(s.values.end(), own_plan.begin(), own_plan.end());
    s.values.push_back(own_discomfort / discomfort_scale);
    s.values.push_back(static_cast<double>(period) / static_cast<double>(periods));
    return s;
}

void PpoConfig::validate() const {
    if (!(gamma >= 0.0 && gamma <= 1.0)) throw ConfigError("gamma", "must lie in [0, 1]");
    if (!(clip > 0.0)) throw ConfigError("clip", "must be > 0");
    if (batch < 1) throw ConfigError("batch", "must be >= 1");
    if (epochs < 1) throw ConfigError("epochs", "must be >= 1");
    if (minibatch < 1) throw ConfigError("minibatch", "must be >= 1");
    if (!(entropy >= 0.0)) throw ConfigError("entropy", "must be >= 0");
}

Vector actor_input(const AgentState& state, std::span<const std::size_t> actions, std::span<const std::size_t> heads,
                   std::size_t level) {
    if (level > actions.size() || level >= heads.size()) throw PreconditionError("actor_input: level out of range");
    Vector x = state.values;
    for (std::size_t l = 0; l < level; ++l) append_one_hot(x, actions[l], heads[l]);
    return x;
}

Vector critic_input(const AgentState& state, std::span<const std::size_t> actions, std::span<const std::size_t> heads) {
    require_same_dim(actions.size(), heads.size(), "critic action levels");
    Vector x = state.values;
    for (std::size_t l = 0; l < heads.size(); ++l) append_one_hot(x, actions[l], heads[l]);
    return x;
}

double advantage(const Transition& tr, const DenseNetwork& critic, std::span<const std::size_t> heads, double gamma) {
    const double q = critic.forward(critic_input(tr.state, tr.actions, heads))[0];
    double next = 0.0;
    if (!tr.terminal) next = critic.forward(critic_input(tr.next_state, tr.next_actions, heads))[0];
    return tr.reward + gamma * next - q;
}

double log_policy(const DenseNetwork& actor, std::span<const double> input, std::size_t action) {
    ForwardCache cache;
    actor.forward(input, cache);
    if (action >= cache.logits.size()) throw PreconditionError("log_policy: action out of range");
    return log_softmax(cache.logits)[action];
}

double prob_ratio(const DenseNetwork& actor, double old_log_prob, std::span<const double> input, std::size_t action) {
    return std::exp(log_policy(actor, input, action) - old_log_prob);
}

double clipped_surrogate(double ratio, double adv, double epsilon) {
    if (!(epsilon > 0.0)) throw PreconditionError("clipped_surrogate: epsilon must be > 0");
    const double clipped = std::clamp(ratio, 1.0 - epsilon, 1.0 + epsilon);
    return std::min(ratio * adv, clipped * adv);
}

// ---------------------------------------------------------------------------

Learner::Learner(std::size_t state_size, std::vector<std::size_t> heads, std::size_t hidden, const PpoConfig& config,
                 std::uint64_t seed)
    : heads_(std::move(heads)), config_(config) {
    if (heads_.empty()) throw PreconditionError("learner needs at least one action level");
    std::size_t in = state_size;
    for (std::size_t l = 0; l < heads_.size(); ++l) {
        if (heads_[l] == 0) throw PreconditionError("action level with no actions");
        actors_.push_back(DenseNetwork::create(in, hidden, heads_[l], OutputHead::softmax,
                                               derive_seed(seed, {kNetworkStream, l + 1})));
        in += heads_[l];
    }
    critic_ = DenseNetwork::create(in, hidden, 1, OutputHead::identity, derive_seed(seed, {kNetworkStream, 0}));
    for (const auto& a : actors_) actor_opt_.emplace_back(a, config_.adam);
    critic_opt_ = Adam(critic_, config_.adam);
}

Learner::Learner(std::vector<DenseNetwork> actors, DenseNetwork critic, const PpoConfig& config)
    : actors_(std::move(actors)), critic_(std::move(critic)), config_(config) {
    if (actors_.empty()) throw PreconditionError("learner needs at least one actor");
    for (const auto& a : actors_) {
        if (a.head() != OutputHead::softmax) throw PreconditionError("actor networks need a softmax head");
        heads_.push_back(a.output_size());
        actor_opt_.emplace_back(a, config_.adam);
    }
    if (critic_.output_size() != 1 || critic_.head() != OutputHead::identity)
        throw PreconditionError("critic must have one identity output");
    critic_opt_ = Adam(critic_, config_.adam);
}

Decision Learner::act(const AgentState& state, Xoshiro256* rng) const {
    Decision d;
    for (std::size_t l = 0; l < actors_.size(); ++l) {
        const Vector x = actor_input(state, d.actions, heads_, l);
        ForwardCache cache;
        const Vector probs = actors_[l].forward(x, cache);
        std::size_t a = 0;
        if (rng) {
            const double u = rng->uniform();
            double acc = 0.0;
            a = probs.size() - 1;
            for (std::size_t j = 0; j < probs.size(); ++j) {
                acc += probs[j];
                if (u < acc) {
                    a = j;
                    break;
                }
            }
        } else {
            for (std::size_t j = 1; j < probs.size(); ++j)
                if (probs[j] > probs[a]) a = j;
        }
        d.actions.push_back(a);
        d.log_probs.push_back(log_softmax(cache.logits)[a]);
    }
    return d;
}

double Learner::q_value(const AgentState& state, std::span<const std::size_t> actions) const {
    return critic_.forward(critic_input(state, actions, heads_))[0];
}

LossReport Learner::losses(const std::vector<const Transition*>& items, std::vector<GradientBuffer>* actor_grads,
                           GradientBuffer* critic_grad) const {
    LossReport r;
    r.samples = items.size();
    const double n = static_cast<double>(items.size());
    std::vector<double> advs;
    advs.reserve(items.size());
    for (const Transition* tr : items) advs.push_back(advantage(*tr, critic_, heads_, config_.gamma));
    std::vector<double> actor_adv = advs;
    if (config_.normalize_advantage && items.size() > 1) {
        double mean = 0.0, var = 0.0;
        for (double a : advs) mean += a / n;
        for (double a : advs) var += (a - mean) * (a - mean) / n;
        const double sd = std::sqrt(var) + 1e-8;
        for (double& a : actor_adv) a = (a - mean) / sd;
    }
    for (std::size_t i = 0; i < items.size(); ++i) {
        const Transition* tr = items[i];
        const double adv = advs[i];
        r.critic_loss += adv * adv / n;
        if (critic_grad) {
            ForwardCache cache;
            critic_.forward(critic_input(tr->state, tr->actions, heads_), cache);
            const double g = -2.0 * adv / n;  // semi-gradient: the bootstrap target is held fixed
            backward_logits(critic_, cache, std::span<const double>(&g, 1), *critic_grad);
        }
        for (std::size_t l = 0; l < actors_.size(); ++l) {
            const Vector x = actor_input(tr->state, tr->actions, heads_, l);
            ForwardCache cache;
            const Vector probs = actors_[l].forward(x, cache);
            const Vector logp = log_softmax(cache.logits);
            const std::size_t a = tr->actions[l];
            const double ratio = std::exp(logp[a] - tr->log_probs[l]);
            const double aa = actor_adv[i];
            const double surr = clipped_surrogate(ratio, aa, config_.clip);
            const double h = entropy_of(probs, logp);
            r.max_initial_ratio_deviation = std::max(r.max_initial_ratio_deviation, std::abs(ratio - 1.0));
            r.surrogate += surr / n;
            r.entropy += h / n;
            if (actor_grads) {
                const double clipped = std::clamp(ratio, 1.0 - config_.clip, 1.0 + config_.clip);
                const double dsurr = ratio * aa <= clipped * aa ? ratio * aa : 0.0;  // d surr / d log pi(a)
                Vector dz(probs.size());
                for (std::size_t j = 0; j < probs.size(); ++j) {
                    const double dlogp = (j == a ? 1.0 : 0.0) - probs[j];
                    const double dh = -probs[j] * (logp[j] + h);
                    dz[j] = (-dsurr * dlogp - config_.entropy * dh) / n;
                }
                backward_logits(actors_[l], cache, dz, (*actor_grads)[l]);
            }
        }
    }
    r.actor_loss = -r.surrogate - config_.entropy * r.entropy;
    return r;
}

LossReport Learner::update(const std::vector<Transition>& batch, Xoshiro256& rng) {
    if (batch.empty()) throw PreconditionError("update_policies: empty batch");
    for (const auto& tr : batch) {
        if (tr.actions.size() != heads_.size() || tr.log_probs.size() != heads_.size())
            throw PreconditionError("update_policies: transition action levels do not match the learner");
        if (!std::isfinite(tr.reward)) throw PreconditionError("update_policies: non-finite reward");
    }
    std::vector<const Transition*> items;
    for (const auto& tr : batch) items.push_back(&tr);
    LossReport report = losses(items, nullptr, nullptr);

    std::vector<std::size_t> order(batch.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    for (int epoch = 0; epoch < config_.epochs; ++epoch) {
        for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
        for (std::size_t start = 0; start < order.size(); start += config_.minibatch) {
            const std::size_t stop = std::min(order.size(), start + config_.minibatch);
            std::vector<const Transition*> mb;
            for (std::size_t i = start; i < stop; ++i) mb.push_back(&batch[order[i]]);
            std::vector<GradientBuffer> ag;
            for (const auto& a : actors_) ag.emplace_back(a);
            GradientBuffer cg(critic_);
            losses(mb, &ag, &cg);
            for (std::size_t l = 0; l < actors_.size(); ++l) actor_opt_[l].step(actors_[l], ag[l]);
            critic_opt_.step(critic_, cg);
            ++report.steps;
        }
    }
    ++updates_;
    return report;
}

std::vector<Transition> sample_batch(const std::vector<Transition>& window, int agents, std::size_t per_agent,
                                     Xoshiro256& rng) {
    std::vector<Transition> out;
    for (int u = 0; u < agents; ++u) {
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < window.size(); ++i)
            if (window[i].agent == u) idx.push_back(i);
        const std::size_t take = std::min(per_agent, idx.size());
        for (std::size_t i = 0; i < take; ++i) {
            std::swap(idx[i], idx[i + rng.below(idx.size() - i)]);
            out.push_back(window[idx[i]]);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------

std::vector<std::size_t> PolicyLayout::heads() const {
    switch (kind) {
        case PolicyKind::none: return {};
        case PolicyKind::strategy: return {groups * ranges};
        case PolicyKind::flat: return {plans};
        case PolicyKind::hierarchical: {
            const auto g = quantile_groups(plans, groups);
            std::size_t widest = 0;
            for (const auto& r : g) widest = std::max(widest, r.size());
            return {groups, widest};
        }
    }
    return {};
}

std::size_t PolicyLayout::action_space_size() const {
    const auto h = heads();
    return sum(h);
}

PeriodOutcome step_period(const StepContext& ctx, const std::vector<PlanSet>& sets, const Target& target,
                          const std::vector<Decision>& decisions) {
    const auto& cfg = ctx.config;
    const std::size_t n = sets.size();
    const PolicyLayout& layout = ctx.layout;
    if (layout.kind != PolicyKind::none && decisions.size() != n)
        throw PreconditionError("step_period: one decision per agent required");

    PeriodOutcome out;
    const double ineff_scale = inefficiency_scale(ctx.metric, target, Scenario::baseline(sets));
    std::vector<double> scales(n);
    for (std::size_t u = 0; u < n; ++u) scales[u] = discomfort_scale(sets[u]);

    if (layout.kind == PolicyKind::none || layout.kind == PolicyKind::strategy) {
        std::vector<Behavior> behaviors;
        std::vector<IndexRange> allowed;
        const ActionSpace space{layout.groups, layout.ranges};
        for (std::size_t u = 0; u < n; ++u) {
            if (layout.kind == PolicyKind::none) {
                behaviors.emplace_back(ctx.default_beta);
                allowed.push_back(sets[u].whole());
            } else {
                const AgentAction action = space.decode(decisions[u].actions.at(0));
                allowed.push_back(restrict_planset(sets[u], action));
                behaviors.push_back(layout.fixed_beta ? Behavior(*layout.fixed_beta)
                                                      : behavior_from_range(action.range, layout.ranges));
            }
            out.betas.push_back(behaviors.back().beta());
        }
        EposOptions opt;
        opt.iterations = cfg.iterations;
        opt.guard = cfg.guard;
        opt.approval = cfg.approval;
        opt.metric = ctx.metric;
        opt.sigma1 = cfg.sigma1;
        opt.sigma2 = cfg.sigma2;
        opt.inefficiency_scale = ineff_scale;
        EposResult res = epos_run(sets, target, behaviors, allowed, opt,
                                  ctx.observer ? *ctx.observer : IterationObserver{});
        for (const auto& s : res.selections) out.selections.push_back(s.plan_index);
        out.global = std::move(res.global);
        out.report = res.report;
        out.inefficiency_trace = std::move(res.inefficiency_trace);
        out.combined_trace = std::move(res.combined_trace);
    } else {
        std::vector<const Plan*> picked;
        for (std::size_t u = 0; u < n; ++u) {
            const auto& acts = decisions[u].actions;
            std::size_t k = 0;
            if (layout.kind == PolicyKind::flat) {
                k = acts.at(0) % sets[u].size();
            } else {
                const IndexRange r = sets[u].group(acts.at(0));
                k = r.begin + acts.at(1) % r.size();
            }
            out.selections.push_back(k);
            picked.push_back(&sets[u][k]);
            out.betas.push_back(0.0);
        }
        out.global = aggregate_global_plan(std::span<const Plan* const>(picked));
        out.report = evaluate_costs(picked, scales, target, out.global, ctx.metric, ineff_scale, cfg.sigma1,
                                    cfg.sigma2);
    }
    out.reward = compute_reward(out.report, cfg.sigma1, cfg.sigma2);
    return out;
}

// ---------------------------------------------------------------------------

double observation_scale(const Scenario& scenario) {
    return scenario.kind() == ScenarioKind::energy ? 1.0 / static_cast<double>(scenario.agents()) : 1.0;
}

namespace {

struct EpisodeOptions {
    Split split = Split::eval;
    int episode = 0;
    int label = 0;
    const Learner* learner = nullptr;
    std::vector<Xoshiro256>* rngs = nullptr;  // null: greedy
    double default_beta = 0.5;
    std::vector<Transition>* transitions = nullptr;
    bool keep_trace = false;
};

Rollout run_episode(const Scenario& scenario, const ExperimentConfig& config, const PolicyLayout& layout,
                    const EpisodeOptions& eo) {
    const int U = scenario.agents();
    const int T = scenario.periods();
    const auto D = static_cast<std::size_t>(scenario.dim());
    const double obs = observation_scale(scenario);

    Rollout roll;
    Target tau = scenario.initial_target();
    Vector global(D, 0.0);
    std::vector<Vector> own(static_cast<std::size_t>(U), Vector(D, 0.0));
    std::vector<double> own_disc(static_cast<std::size_t>(U), 0.0);
    std::vector<double> own_scale(static_cast<std::size_t>(U), 1.0);
    std::vector<std::size_t> pending(static_cast<std::size_t>(U), SIZE_MAX);

    const auto observe = [&](int u, int t) {
        Vector ts = tau.values, gs = global;
        for (double& v : ts) v *= obs;
        for (double& v : gs) v *= obs;
        const auto iu = static_cast<std::size_t>(u);
        return encode_state(ts, gs, own[iu], own_disc[iu], own_scale[iu], t, T);
    };

    double sum_reward = 0.0, sum_disc = 0.0, sum_ineff = 0.0, sum_comb = 0.0;
    for (int t = 0; t < T; ++t) {
        const std::vector<PlanSet> sets = scenario.plansets(eo.split, eo.episode, t, layout.groups);
        std::vector<AgentState> states;
        std::vector<Decision> decisions;
        for (int u = 0; u < U; ++u) {
            states.push_back(observe(u, t));
            if (eo.learner) {
                Xoshiro256* rng = eo.rngs ? &(*eo.rngs)[static_cast<std::size_t>(u)] : nullptr;
                decisions.push_back(eo.learner->act(states.back(), rng));
            }
        }

        IterationObserver trace_obs = [&](const IterationRecord& rec) {
            roll.trace.push_back({t, rec.iteration, rec.inefficiency, rec.combined});
        };
        StepContext ctx{config, scenario.metric(), layout, eo.default_beta, eo.keep_trace ? &trace_obs : nullptr};
        PeriodOutcome out = step_period(ctx, sets, tau, decisions);

        if (eo.transitions) {
            for (int u = 0; u < U; ++u) {
                const auto iu = static_cast<std::size_t>(u);
                if (pending[iu] != SIZE_MAX) {
                    Transition& prev = (*eo.transitions)[pending[iu]];
                    prev.next_state = states[iu];
                    prev.next_actions = decisions[iu].actions;
                }
                Transition tr;
                tr.state = states[iu];
                tr.actions = decisions[iu].actions;
                tr.log_probs = decisions[iu].log_probs;
                tr.reward = out.reward;
                tr.agent = u;
                tr.episode = eo.episode;
                tr.period = t;
                pending[iu] = eo.transitions->size();
                eo.transitions->push_back(std::move(tr));
            }
        }

        roll.periods.push_back({eo.label, t, out.report, out.reward});
        roll.selections.push_back(out.selections);
        roll.actions.emplace_back();
        for (const auto& d : decisions) roll.actions.back().push_back(d.actions);
        sum_reward += out.reward;
        sum_disc += out.report.mean_discomfort;
        sum_ineff += out.report.inefficiency;
        sum_comb += out.report.combined;

        for (int u = 0; u < U; ++u) {
            const auto iu = static_cast<std::size_t>(u);
            const Plan& p = sets[iu][out.selections[iu]];
            own[iu] = p.values;
            own_disc[iu] = p.discomfort;
            own_scale[iu] = discomfort_scale(sets[iu]);
        }
        tau = scenario.next_target(tau, out.global);
        global = out.global.values;
    }
    if (eo.transitions) {
        for (int u = 0; u < U; ++u) {
            const auto iu = static_cast<std::size_t>(u);
            if (pending[iu] == SIZE_MAX) continue;
            Transition& last = (*eo.transitions)[pending[iu]];
            last.terminal = true;
            last.next_state = observe(u, T);
        }
    }
    const double inv = 1.0 / static_cast<double>(T);
    roll.summary = {eo.label, sum_reward * inv, sum_disc * inv, sum_ineff * inv, sum_comb * inv};
    return roll;
}

}  // namespace

Rollout evaluate(const Scenario& scenario, const ExperimentConfig& config, const PolicyLayout& layout,
                 const Learner* learner, double default_beta, int episode_label) {
    if (layout.kind != PolicyKind::none && !learner)
        throw PreconditionError("evaluate: a learning layout needs a learner");
    EpisodeOptions eo;
    eo.split = Split::eval;
    eo.label = episode_label;
    eo.learner = layout.kind == PolicyKind::none ? nullptr : learner;
    eo.default_beta = default_beta;
    eo.keep_trace = true;
    return run_episode(scenario, config, layout, eo);
}

PpoConfig ppo_config(const ExperimentConfig& config) {
    PpoConfig p;
    p.gamma = config.gamma;
    p.clip = config.clip;
    p.batch = static_cast<std::size_t>(config.batch);
    p.epochs = config.epochs;
    p.minibatch = static_cast<std::size_t>(config.minibatch);
    p.entropy = config.entropy;
    p.normalize_advantage = config.normalize_advantage;
    p.adam.learning_rate = config.learning_rate;
    return p;
}

TrainingResult train(const Scenario& scenario, const ExperimentConfig& config, const PolicyLayout& layout) {
    if (layout.kind == PolicyKind::none) throw ConfigError("method", "method does not train a policy");
    const PpoConfig ppo = ppo_config(config);
    ppo.validate();
    const int U = scenario.agents();
    const std::size_t state_size = 3 * static_cast<std::size_t>(scenario.dim()) + 2;

    TrainingResult result{Learner(state_size, layout.heads(), static_cast<std::size_t>(config.hidden), ppo,
                                  config.seed),
                          {}, {}, {}};
    std::vector<Xoshiro256> rngs;
    for (int u = 0; u < U; ++u)
        rngs.emplace_back(derive_seed(config.seed, {static_cast<std::uint64_t>(u), kActionStream}));
    Xoshiro256 update_rng(derive_seed(config.seed, {kUpdateStream}));

    std::vector<Transition> window;
    for (int e = 0; e < config.episodes; ++e) {
        EpisodeOptions eo;
        eo.split = Split::train;
        eo.episode = e;
        eo.label = e;
        eo.learner = &result.learner;
        eo.rngs = &rngs;
        eo.transitions = &window;
        Rollout roll = run_episode(scenario, config, layout, eo);
        result.curve.push_back(roll.summary);
        if (window.size() / static_cast<std::size_t>(U) >= ppo.batch) {
            const auto batch = sample_batch(window, U, ppo.batch, update_rng);
            result.losses.push_back(result.learner.update(batch, update_rng));
            window.clear();
        }
    }
    result.evaluation = evaluate(scenario, config, layout, &result.learner, config.beta, config.episodes);
    return result;
}

// ---------------------------------------------------------------------------

namespace {

std::string kind_name(PolicyKind kind) {
    switch (kind) {
        case PolicyKind::none: return "none";
        case PolicyKind::strategy: return "strategy";
        case PolicyKind::flat: return "flat";
        case PolicyKind::hierarchical: return "hierarchical";
    }
    return "none";
}

std::string join_sizes(const std::vector<std::size_t>& xs) {
    std::string s;
    for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? "," : "") + std::to_string(xs[i]);
    return s;
}

}  // namespace

Checkpoint make_checkpoint(const Learner& learner, const ExperimentConfig& config, const PolicyLayout& layout) {
    Checkpoint c;
    c.meta = {
        {"method", to_string(config.method)},
        {"scenario", to_string(config.scenario)},
        {"seed", std::to_string(config.seed)},
        {"updates", std::to_string(learner.updates())},
        {"policy", kind_name(layout.kind)},
        {"heads", join_sizes(learner.heads())},
        {"agents", std::to_string(config.agents)},
        {"plans", std::to_string(config.plans)},
        {"dim", std::to_string(config.dim)},
        {"periods", std::to_string(config.periods)},
        {"groups", std::to_string(layout.groups)},
        {"ranges", std::to_string(layout.ranges)},
        {"fixed_beta", layout.fixed_beta ? text::format_double(*layout.fixed_beta) : "none"},
        {"hidden", std::to_string(config.hidden)},
    };
    for (std::size_t l = 0; l < learner.actors().size(); ++l)
        c.networks.emplace_back("actor_" + std::to_string(l), learner.actors()[l]);
    c.networks.emplace_back("critic", learner.critic());
    return c;
}

Learner restore_learner(const Checkpoint& ckpt, const ExperimentConfig& config, const PolicyLayout& layout) {
    const auto check = [&](const std::string& key, const std::string& expected) {
        const std::string& got = ckpt.value(key);
        if (got != expected)
            throw ConfigError(key, "checkpoint was trained with " + key + "=" + got + ", run uses " + expected);
    };
    check("policy", kind_name(layout.kind));
    check("heads", join_sizes(layout.heads()));
    check("dim", std::to_string(config.dim));
    std::vector<DenseNetwork> actors;
    for (std::size_t l = 0; l < layout.heads().size(); ++l) actors.push_back(ckpt.network("actor_" + std::to_string(l)));
    const std::size_t state_size = 3 * static_cast<std::size_t>(config.dim) + 2;
    if (actors.front().input_size() != state_size) throw ConfigError("dim", "checkpoint state size does not match");
    return Learner(std::move(actors), ckpt.network("critic"), ppo_config(config));
}

Rollout execute(const Checkpoint& ckpt, const Scenario& scenario, const ExperimentConfig& config,
                const PolicyLayout& layout) {
    const Learner learner = restore_learner(ckpt, config, layout);
    return evaluate(scenario, config, layout, &learner, config.beta, config.episodes);
}

}  // namespace hrcl
