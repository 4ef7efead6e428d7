#include "hrcl/baselines.hpp"

#include <string>

#include "hrcl/error.hpp"
#include "hrcl/strategy.hpp"

namespace hrcl {

std::string MethodSpec::action_space() const {
    const auto h = layout.heads();
    switch (layout.kind) {
        case PolicyKind::none: return "none";
        case PolicyKind::strategy:
            return "I*M=" + std::to_string(layout.groups) + "*" + std::to_string(layout.ranges) + "=" +
                   std::to_string(h[0]);
        case PolicyKind::flat: return "K=" + std::to_string(h[0]);
        case PolicyKind::hierarchical:
            return "I+maxG=" + std::to_string(h[0]) + "+" + std::to_string(h[1]) + "=" +
                   std::to_string(h[0] + h[1]);
    }
    return "none";
}

MethodSpec method_spec(const ExperimentConfig& config) {
    MethodSpec s;
    s.method = config.method;
    auto& L = s.layout;
    L.plans = static_cast<std::size_t>(config.plans);
    const auto I = static_cast<std::size_t>(config.groups);
    const auto M = static_cast<std::size_t>(config.ranges);
    switch (config.method) {
        case MethodId::epos:
            L.kind = PolicyKind::none;
            s.beta = config.beta;
            break;
        case MethodId::epos_selfish:
            L.kind = PolicyKind::none;
            s.beta = 1.0;
            break;
        case MethodId::epos_altruistic:
            L.kind = PolicyKind::none;
            s.beta = 0.0;
            break;
        case MethodId::epos_p:
            L.kind = PolicyKind::none;
            s.sweep = true;
            break;
        case MethodId::mappo:
            L.kind = PolicyKind::flat;
            break;
        case MethodId::hrl:
            L.kind = PolicyKind::hierarchical;
            L.groups = I;
            break;
        case MethodId::hrcl:
            L.kind = PolicyKind::strategy;
            L.groups = I;
            L.ranges = M;
            break;
        case MethodId::hrcl_p:
            L.kind = PolicyKind::strategy;
            L.groups = I;
            L.ranges = 1;
            L.fixed_beta = config.beta;
            break;
        case MethodId::hrcl_b:
            L.kind = PolicyKind::strategy;
            L.groups = 1;
            L.ranges = M;
            break;
    }
    return s;
}

std::vector<double> epos_p_grid(int ranges) {
    if (ranges < 1) throw ConfigError("ranges", "must be >= 1");
    std::vector<double> grid{0.0};
    for (int m = 1; m <= ranges; ++m)
        grid.push_back(behavior_from_range(static_cast<std::size_t>(m), static_cast<std::size_t>(ranges)).beta());
    grid.push_back(1.0);
    return grid;
}

MethodRun run_epos_variant(const Scenario& scenario, const ExperimentConfig& config, const MethodSpec& spec) {
    if (spec.learning()) throw PreconditionError("run_epos_variant: method trains a policy");
    MethodRun run;
    run.spec = spec;
    if (!spec.sweep) {
        run.beta = spec.beta.value_or(config.beta);
        run.evaluation = evaluate(scenario, config, spec.layout, nullptr, run.beta, 0);
        return run;
    }
    bool have = false;
    double best = 0.0;
    for (double beta : epos_p_grid(config.ranges)) {
        Rollout r = evaluate(scenario, config, spec.layout, nullptr, beta, 0);
        double total = 0.0;
        for (const auto& p : r.periods) total += p.report.combined;
        run.sweep.emplace_back(beta, total);
        if (!have || total < best) {
            have = true;
            best = total;
            run.beta = beta;
            run.evaluation = std::move(r);
        }
    }
    return run;
}

namespace {

MethodRun run_learning(const Scenario& scenario, const ExperimentConfig& config, const MethodSpec& spec) {
    TrainingResult tr = train(scenario, config, spec.layout);
    MethodRun run;
    run.spec = spec;
    run.checkpoint = make_checkpoint(tr.learner, config, spec.layout);
    run.evaluation = std::move(tr.evaluation);
    run.curve = std::move(tr.curve);
    run.losses = std::move(tr.losses);
    run.beta = spec.layout.fixed_beta.value_or(0.0);
    return run;
}

}  // namespace

MethodRun run_mappo(const Scenario& scenario, const ExperimentConfig& config) {
    ExperimentConfig c = config;
    c.method = MethodId::mappo;
    return run_learning(scenario, c, method_spec(c));
}

MethodRun run_hrl(const Scenario& scenario, const ExperimentConfig& config) {
    ExperimentConfig c = config;
    c.method = MethodId::hrl;
    return run_learning(scenario, c, method_spec(c));
}

MethodRun run_method(const Scenario& scenario, const ExperimentConfig& config) {
    const MethodSpec spec = method_spec(config);
    if (spec.learning()) return run_learning(scenario, config, spec);
    return run_epos_variant(scenario, config, spec);
}

}  // namespace hrcl
