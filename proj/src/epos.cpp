#include "hrcl/epos.hpp"

#include <cmath>
#include <string>

#include "hrcl/error.hpp"

namespace hrcl {

namespace {

// f_i of (base + plan), evaluated without materializing the sum.
double shifted_inefficiency(InefficiencyMetric metric, std::span<const double> target, std::span<const double> base,
                            std::span<const double> plan) {
    const std::size_t n = base.size();
    if (metric == InefficiencyMetric::variance) {
        double mean = 0.0;
        for (std::size_t d = 0; d < n; ++d) mean += base[d] + plan[d];
        mean /= static_cast<double>(n);
        double sum = 0.0;
        for (std::size_t d = 0; d < n; ++d) {
            const double x = base[d] + plan[d] - mean;
            sum += x * x;
        }
        return sum / static_cast<double>(n);
    }
    double sum = 0.0;
    for (std::size_t d = 0; d < n; ++d) {
        const double x = target[d] - (base[d] + plan[d]);
        sum += x * x;
    }
    return std::sqrt(sum / static_cast<double>(n));
}

}  // namespace

std::string to_string(ApprovalMode mode) {
    switch (mode) {
        case ApprovalMode::sequential: return "sequential";
        case ApprovalMode::independent: return "independent";
        case ApprovalMode::joint: return "joint";
    }
    return "independent";
}

ApprovalMode parse_approval(const std::string& name) {
    if (name == "sequential") return ApprovalMode::sequential;
    if (name == "independent") return ApprovalMode::independent;
    if (name == "joint") return ApprovalMode::joint;
    throw ConfigError("approval", "unknown approval mode '" + name + "'");
}

int TreeTopology::depth(int agent) const {
    int d = 0;
    while (parent.at(static_cast<std::size_t>(agent)) >= 0) {
        agent = parent[static_cast<std::size_t>(agent)];
        ++d;
    }
    return d;
}

TreeTopology build_tree(int agents) {
    if (agents < 1) throw PreconditionError("build_tree: need at least one agent");
    TreeTopology t;
    const auto n = static_cast<std::size_t>(agents);
    t.parent.assign(n, -1);
    t.children.assign(n, {});
    for (int v = 1; v < agents; ++v) {
        const int p = (v - 1) / 2;
        t.parent[static_cast<std::size_t>(v)] = p;
        t.children[static_cast<std::size_t>(p)].push_back(v);
    }
    return t;
}

std::size_t local_select(const NodeState& node, const PlanSet& set, const Target& target,
                         std::span<const double> others, const EposOptions& options) {
    if (node.allowed.size() == 0 || node.allowed.end > set.size())
        throw PreconditionError("local_select: invalid allowed range");
    require_same_dim(others.size(), set.dim(), "local_select");
    const double beta = node.behavior.beta();
    std::size_t best = node.allowed.begin;
    double best_score = 0.0;
    for (std::size_t k = node.allowed.begin; k < node.allowed.end; ++k) {
        const Plan& p = set[k];
        const double ineff = shifted_inefficiency(options.metric, target.values, others, p.values);
        const double score =
            beta * (p.discomfort / node.discomfort_scale) + (1.0 - beta) * (ineff / options.inefficiency_scale);
        if (k == node.allowed.begin || score < best_score) {
            best = k;
            best_score = score;
        }
    }
    return best;
}

// ---------------------------------------------------------------------------

EposRun::EposRun(const std::vector<PlanSet>& plansets, const Target& target, std::vector<Behavior> behaviors,
                 std::vector<IndexRange> allowed, EposOptions options)
    : sets_(plansets), target_(target), options_(options) {
    const std::size_t n = plansets.size();
    if (n == 0) throw PreconditionError("epos: no agents");
    if (behaviors.size() != n) throw PreconditionError("epos: one behavior per agent required");
    if (allowed.empty()) {
        for (const auto& s : plansets) allowed.push_back(s.whole());
    }
    if (allowed.size() != n) throw PreconditionError("epos: one allowed range per agent required");
    if (options_.iterations < 1) throw PreconditionError("epos: iterations must be >= 1");
    if (!(options_.inefficiency_scale > 0.0)) throw PreconditionError("epos: inefficiency scale must be positive");

    const std::size_t dim = plansets.front().dim();
    require_same_dim(target.dim(), dim, "epos target");
    tree_ = build_tree(static_cast<int>(n));
    states_.resize(n);
    delta_.assign(n, true);
    for (std::size_t u = 0; u < n; ++u) {
        require_same_dim(plansets[u].dim(), dim, "epos plan set");
        if (allowed[u].size() == 0 || allowed[u].end > plansets[u].size())
            throw PreconditionError("epos: allowed range of agent " + std::to_string(u) + " is invalid");
        auto& st = states_[u];
        st.behavior = behaviors[u];
        st.allowed = allowed[u];
        st.selection = st.previous = st.proposal = allowed[u].begin;
        st.subtree.assign(dim, 0.0);
        st.previous_subtree.assign(dim, 0.0);
        st.last_global.assign(dim, 0.0);
        st.discomfort_scale = discomfort_scale(plansets[u]);
    }
    tentative_.assign(dim, 0.0);
    global_.assign(dim, 0.0);
    inefficiency_ = ineff(global_);
}

double EposRun::ineff(std::span<const double> global) const {
    return hrcl::inefficiency(options_.metric, target_.values, global);
}

void EposRun::add_plan(Vector& acc, std::size_t agent, std::size_t k, double sign) const {
    const auto& v = sets_[agent][k].values;
    for (std::size_t d = 0; d < acc.size(); ++d) acc[d] += sign * v[d];
}

double EposRun::combined_of(const std::vector<std::size_t>& selections, std::span<const double> global) const {
    double norm = 0.0;
    for (std::size_t u = 0; u < selections.size(); ++u)
        norm += sets_[u][selections[u]].discomfort / states_[u].discomfort_scale;
    norm /= static_cast<double>(selections.size());
    return options_.sigma1 * norm + options_.sigma2 * (ineff(global) / options_.inefficiency_scale);
}

void EposRun::joint_bottom_up(bool cold) {
    const std::size_t n = states_.size();
    const std::size_t dim = global_.size();
    options_menu_.assign(n, {});
    best_option_.assign(n, 0);
    const auto score = [&](const Option& o, std::span<const double> others) {
        const double f = shifted_inefficiency(options_.metric, target_.values, others, o.aggregate);
        return o.discomfort + o.weight * (f / options_.inefficiency_scale);
    };

    for (std::size_t u = n; u-- > 0;) {
        NodeState& st = states_[u];
        Vector others(dim, 0.0);
        if (!cold)
            for (std::size_t d = 0; d < dim; ++d) others[d] = st.last_global[d] - st.previous_subtree[d];
        const auto& kids = tree_.children[u];
        const double beta = st.behavior.beta();
        auto& menu = options_menu_[u];

        for (std::size_t k = st.allowed.begin; k < st.allowed.end; ++k) {
            Option best;
            double best_score = 0.0;
            bool have = false;
            std::vector<std::size_t> pick(kids.size(), 0);
            while (true) {
                Option o;
                o.plan = k;
                o.aggregate = sets_[u][k].values;
                o.discomfort = beta * (sets_[u][k].discomfort / st.discomfort_scale);
                o.weight = 1.0 - beta;
                for (std::size_t i = 0; i < kids.size(); ++i) {
                    const Option& c = options_menu_[static_cast<std::size_t>(kids[i])][pick[i]];
                    for (std::size_t d = 0; d < dim; ++d) o.aggregate[d] += c.aggregate[d];
                    o.discomfort += c.discomfort;
                    o.weight += c.weight;
                }
                o.picks = pick;
                const double s = score(o, others);
                if (!have || s < best_score) {
                    best = std::move(o);
                    best_score = s;
                    have = true;
                }
                std::size_t i = kids.size();
                while (i-- > 0) {
                    if (++pick[i] < options_menu_[static_cast<std::size_t>(kids[i])].size()) break;
                    pick[i] = 0;
                }
                if (i == static_cast<std::size_t>(-1)) break;
            }
            menu.push_back(std::move(best));
        }

        std::size_t top = 0;
        double top_score = 0.0;
        for (std::size_t j = 0; j < menu.size(); ++j) {
            const double s = score(menu[j], others);
            if (j == 0 || s < top_score) {
                top = j;
                top_score = s;
            }
        }
        best_option_[u] = top;
        st.proposal = menu[top].plan;
        st.subtree = menu[top].aggregate;
    }
    tentative_ = states_[0].subtree;
    bottom_up_done_ = true;
}

void EposRun::bottom_up_phase() {
    const bool cold = iteration_ == 0;
    if (options_.approval == ApprovalMode::joint) {
        joint_bottom_up(cold);
        return;
    }
    const bool sequential = options_.approval == ApprovalMode::sequential;
    const std::size_t dim = global_.size();

    // Children carry larger ids than their parent, so descending id order is leaves-to-root.
    for (std::size_t u = states_.size(); u-- > 0;) {
        NodeState& st = states_[u];
        Vector current = cold ? Vector(dim, 0.0) : st.last_global;

        for (int c : tree_.children[u]) {
            const auto& child = states_[static_cast<std::size_t>(c)];
            Vector change(dim);
            for (std::size_t d = 0; d < dim; ++d) change[d] = child.subtree[d] - child.previous_subtree[d];
            bool accept = true;
            if (sequential && !cold) {
                Vector trial = current;
                for (std::size_t d = 0; d < dim; ++d) trial[d] += change[d];
                accept = ineff(trial) <= ineff(current);
            }
            delta_[static_cast<std::size_t>(c)] = accept;
            if (accept)
                for (std::size_t d = 0; d < dim; ++d) current[d] += change[d];
        }

        // Independent approval scores against the previous global plan only.
        Vector others = (cold || sequential) ? std::move(current) : st.last_global;
        if (!cold) add_plan(others, u, st.previous, -1.0);
        st.proposal = local_select(st, sets_[u], target_, others, options_);

        if (sequential && !cold && tree_.parent[u] < 0 && st.proposal != st.previous) {
            // The root has no parent to approve its own change; it applies the same rule itself.
            const double before = shifted_inefficiency(options_.metric, target_.values, others,
                                                       sets_[u][st.previous].values);
            const double after = shifted_inefficiency(options_.metric, target_.values, others,
                                                      sets_[u][st.proposal].values);
            if (after > before) st.proposal = st.previous;
        }

        st.subtree = sets_[u][st.proposal].values;
        for (int c : tree_.children[u]) {
            const auto& child = states_[static_cast<std::size_t>(c)];
            const Vector& part = delta_[static_cast<std::size_t>(c)] ? child.subtree : child.previous_subtree;
            for (std::size_t d = 0; d < dim; ++d) st.subtree[d] += part[d];
        }
    }
    tentative_ = states_[0].subtree;
    bottom_up_done_ = true;
}

IterationRecord EposRun::top_down_phase() {
    if (!bottom_up_done_) throw PreconditionError("top_down_phase called before bottom_up_phase");
    bottom_up_done_ = false;
    const bool cold = iteration_ == 0;
    const bool sequential = options_.approval == ApprovalMode::sequential;
    const std::size_t n = states_.size();
    const std::size_t dim = global_.size();

    IterationRecord rec;
    rec.iteration = iteration_;
    rec.tentative_global = tentative_;

    // Effective decision per agent, propagated root-to-leaves (ascending id).
    std::vector<bool> keep(n, true);
    rec.candidates.resize(n);
    if (options_.approval == ApprovalMode::joint) {
        std::vector<std::size_t> option(n, 0);
        option[0] = best_option_[0];
        for (std::size_t u = 0; u < n; ++u) {
            const Option& o = options_menu_[u][option[u]];
            const auto& kids = tree_.children[u];
            for (std::size_t i = 0; i < kids.size(); ++i) {
                const auto c = static_cast<std::size_t>(kids[i]);
                option[c] = o.picks[i];
                delta_[c] = option[c] == best_option_[c];
            }
            states_[u].proposal = o.plan;
            states_[u].subtree = o.aggregate;
            states_[u].approved = u == 0 || delta_[u];
            rec.candidates[u] = o.plan;
        }
    }
    for (std::size_t u = 0; u < n && options_.approval != ApprovalMode::joint; ++u) {
        const int p = tree_.parent[u];
        if (p < 0 || cold) {
            keep[u] = true;
        } else if (sequential) {
            keep[u] = delta_[u] && keep[static_cast<std::size_t>(p)];
        } else {
            Vector trial = states_[u].last_global;
            add_plan(trial, u, states_[u].previous, -1.0);
            add_plan(trial, u, states_[u].proposal, 1.0);
            delta_[u] = ineff(trial) <= ineff(states_[u].last_global);
            keep[u] = delta_[u];
        }
        states_[u].approved = keep[u];
        // In sequential mode the decisions were taken bottom-up, so candidates are final;
        // in independent mode the bottom-up candidates are the raw proposals.
        rec.candidates[u] = (sequential && !keep[u]) ? states_[u].previous : states_[u].proposal;
    }
    rec.states = states_;

    std::vector<std::size_t> chosen(n);
    for (std::size_t u = 0; u < n; ++u) chosen[u] = keep[u] ? states_[u].proposal : states_[u].previous;

    Vector fresh(dim, 0.0);
    for (std::size_t u = 0; u < n; ++u) add_plan(fresh, u, chosen[u], 1.0);
    const double fresh_ineff = ineff(fresh);

    if (!cold && options_.guard && fresh_ineff > inefficiency_) {
        rec.guard_reverted = true;
        for (std::size_t u = 0; u < n; ++u) chosen[u] = states_[u].previous;
    } else {
        global_ = std::move(fresh);
        inefficiency_ = fresh_ineff;
    }

    // Commit, then rebuild subtree aggregates of the committed selections (leaves-to-root).
    for (std::size_t u = n; u-- > 0;) {
        NodeState& st = states_[u];
        st.selection = st.previous = chosen[u];
        st.has_previous = true;
        st.previous_subtree = sets_[u][chosen[u]].values;
        for (int c : tree_.children[u]) {
            const auto& part = states_[static_cast<std::size_t>(c)].previous_subtree;
            for (std::size_t d = 0; d < dim; ++d) st.previous_subtree[d] += part[d];
        }
        st.subtree = st.previous_subtree;
        st.last_global = global_;
    }

    rec.selections = chosen;
    rec.global = global_;
    rec.inefficiency = inefficiency_;
    rec.combined = combined_of(chosen, global_);
    ineff_trace_.push_back(rec.inefficiency);
    combined_trace_.push_back(rec.combined);
    ++iteration_;
    return rec;
}

IterationRecord EposRun::iterate() {
    bottom_up_phase();
    return top_down_phase();
}

EposResult EposRun::result() const {
    EposResult r;
    const std::size_t n = states_.size();
    std::vector<const Plan*> picked;
    std::vector<double> scales;
    for (std::size_t u = 0; u < n; ++u) {
        r.selections.push_back({static_cast<int>(u), states_[u].selection, target_.period});
        picked.push_back(&sets_[u][states_[u].selection]);
        scales.push_back(states_[u].discomfort_scale);
    }
    r.global = GlobalPlan{global_};
    r.report = evaluate_costs(picked, scales, target_, r.global, options_.metric, options_.inefficiency_scale,
                              options_.sigma1, options_.sigma2);
    r.inefficiency_trace = ineff_trace_;
    r.combined_trace = combined_trace_;
    return r;
}

EposResult epos_run(const std::vector<PlanSet>& plansets, const Target& target,
                    const std::vector<Behavior>& behaviors, const std::vector<IndexRange>& allowed,
                    const EposOptions& options, const IterationObserver& observer) {
    EposRun run(plansets, target, behaviors, allowed, options);
    for (int l = 0; l < options.iterations; ++l) {
        IterationRecord rec = run.iterate();
        if (observer) observer(rec);
    }
    return run.result();
}

// ---------------------------------------------------------------------------

double selection_objective(const std::vector<PlanSet>& plansets, const std::vector<std::size_t>& selections,
                           const Target& target, const std::vector<Behavior>& behaviors,
                           const EposOptions& options) {
    require_same_dim(plansets.size(), selections.size(), "selection_objective");
    require_same_dim(plansets.size(), behaviors.size(), "selection_objective behaviors");
    Vector global(plansets.front().dim(), 0.0);
    for (std::size_t u = 0; u < plansets.size(); ++u) {
        const auto& v = plansets[u][selections[u]].values;
        for (std::size_t d = 0; d < global.size(); ++d) global[d] += v[d];
    }
    const double f = inefficiency(options.metric, target.values, global) / options.inefficiency_scale;
    double total = 0.0;
    for (std::size_t u = 0; u < plansets.size(); ++u) {
        const double b = behaviors[u].beta();
        total += b * (plansets[u][selections[u]].discomfort / discomfort_scale(plansets[u])) + (1.0 - b) * f;
    }
    return total;
}

OracleResult brute_force_oracle(const std::vector<PlanSet>& plansets, const Target& target,
                                const std::vector<Behavior>& behaviors, const EposOptions& options,
                                const std::vector<IndexRange>& allowed_in) {
    const std::size_t n = plansets.size();
    if (n == 0) throw PreconditionError("oracle: no agents");
    require_same_dim(behaviors.size(), n, "oracle behaviors");
    std::vector<IndexRange> allowed = allowed_in;
    if (allowed.empty())
        for (const auto& s : plansets) allowed.push_back(s.whole());
    require_same_dim(allowed.size(), n, "oracle allowed ranges");

    double combos = 1.0;
    for (const auto& r : allowed) combos *= static_cast<double>(r.size());
    if (combos > kOracleLimit)
        throw PreconditionError("oracle: instance too large (" + std::to_string(static_cast<long long>(combos)) +
                                " combinations > 1e6)");

    std::vector<double> scales(n);
    for (std::size_t u = 0; u < n; ++u) scales[u] = discomfort_scale(plansets[u]);

    const std::size_t dim = plansets.front().dim();
    std::vector<std::size_t> sel(n);
    for (std::size_t u = 0; u < n; ++u) sel[u] = allowed[u].begin;

    OracleResult best;
    bool have = false;
    Vector global(dim);
    while (true) {
        std::fill(global.begin(), global.end(), 0.0);
        for (std::size_t u = 0; u < n; ++u) {
            const auto& v = plansets[u][sel[u]].values;
            for (std::size_t d = 0; d < dim; ++d) global[d] += v[d];
        }
        const double f = inefficiency(options.metric, target.values, global);
        double cost = 0.0;
        for (std::size_t u = 0; u < n; ++u) {
            const double b = behaviors[u].beta();
            cost += b * (plansets[u][sel[u]].discomfort / scales[u]) + (1.0 - b) * (f / options.inefficiency_scale);
        }
        if (!have || cost < best.cost) {
            have = true;
            best.cost = cost;
            best.inefficiency = f;
            best.selections = sel;
            best.global = GlobalPlan{global};
        }
        // Mixed-radix increment, agent 0 most significant: lexicographic enumeration.
        std::size_t u = n;
        while (u-- > 0) {
            if (++sel[u] < allowed[u].end) break;
            sel[u] = allowed[u].begin;
        }
        if (u == static_cast<std::size_t>(-1)) break;
    }
    return best;
}

}  // namespace hrcl
