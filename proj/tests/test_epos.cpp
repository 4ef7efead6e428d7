#include <gtest/gtest.h>

#include <cmath>
#include <optional>

#include "hrcl/epos.hpp"
#include "hrcl/error.hpp"
#include "support.hpp"

using namespace hrcl;

namespace {

constexpr ApprovalMode kModes[] = {ApprovalMode::independent, ApprovalMode::sequential, ApprovalMode::joint};

EposOptions options_for(const Target& target, ApprovalMode mode, int iterations = 20) {
    EposOptions o;
    o.iterations = iterations;
    o.approval = mode;
    o.inefficiency_scale = inefficiency_scale(o.metric, target, GlobalPlan{Vector(target.dim(), 0.0)});
    return o;
}

std::vector<Behavior> uniform_behaviors(std::size_t n, double beta) { return std::vector<Behavior>(n, Behavior(beta)); }

Vector flat_sum(const std::vector<PlanSet>& sets, const std::vector<std::size_t>& picks) {
    Vector g(sets.front().dim(), 0.0);
    for (std::size_t u = 0; u < sets.size(); ++u)
        for (std::size_t d = 0; d < g.size(); ++d) g[d] += sets[u][picks[u]].values[d];
    return g;
}

// Independent exhaustive minimum of f_i over all selections.
double min_inefficiency(const std::vector<PlanSet>& sets, const Target& target) {
    std::vector<std::size_t> pick(sets.size(), 0);
    double best = INFINITY;
    while (true) {
        best = std::min(best, inefficiency_rmse(target, GlobalPlan{flat_sum(sets, pick)}));
        std::size_t u = 0;
        while (u < sets.size() && ++pick[u] == sets[u].size()) pick[u++] = 0;
        if (u == sets.size()) break;
    }
    return best;
}

std::vector<PlanSet> pair_instance() {
    return {test::make_set(0, {{4}, {6}}, {0, 1}), test::make_set(1, {{4}, {6}}, {0, 1})};
}

}  // namespace

TEST(Tree, HeapLayout) {
    const auto t1 = build_tree(1);
    EXPECT_EQ(t1.parent, (std::vector<int>{-1}));
    EXPECT_TRUE(t1.children[0].empty());

    const auto t3 = build_tree(3);
    EXPECT_EQ(t3.children[0], (std::vector<int>{1, 2}));

    const auto t7 = build_tree(7);
    for (int leaf : {3, 4, 5, 6}) {
        EXPECT_TRUE(t7.children[static_cast<std::size_t>(leaf)].empty());
        EXPECT_EQ(t7.depth(leaf), 2);
    }
    EXPECT_THROW(build_tree(0), PreconditionError);
}

TEST(Tree, EveryAgentOnceAcyclic) {
    for (int n = 1; n <= 40; ++n) {
        const auto t = build_tree(n);
        std::vector<int> seen(static_cast<std::size_t>(n), 0);
        seen[0]++;
        for (int v = 0; v < n; ++v) {
            for (int c : t.children[static_cast<std::size_t>(v)]) {
                EXPECT_EQ(t.parent[static_cast<std::size_t>(c)], v);
                EXPECT_GT(c, v);
                seen[static_cast<std::size_t>(c)]++;
            }
        }
        for (int s : seen) EXPECT_EQ(s, 1);
    }
}

TEST(LocalSelect, AltruisticPicksNearestPlan) {
    const auto set = test::make_set(0, {{0, 0}, {2, 1}, {5, 5}, {1, 2}}, {0, 0.3, 0.6, 1});
    NodeState node;
    node.behavior = Behavior(0.0);
    node.allowed = set.whole();
    node.discomfort_scale = 1.0;
    const Target t{{1.2, 1.9}, 0};
    EposOptions o;
    const auto k = local_select(node, set, t, Vector{0, 0}, o);
    EXPECT_EQ(set[k].values, (Vector{1, 2}));
}

TEST(LocalSelect, SelfishPicksRangeStart) {
    const auto set = test::make_set(0, {{0}, {1}, {2}, {3}, {4}, {5}}, {0, 0.2, 0.4, 0.6, 0.8, 1});
    NodeState node;
    node.behavior = Behavior(1.0);
    node.allowed = {2, 5};
    EXPECT_EQ(local_select(node, set, {{3}, 0}, Vector{0}, EposOptions{}), 2u);
}

TEST(LocalSelect, TiesGoToLowestIndex) {
    const auto set = test::make_set(0, {{1}, {-1}, {1}}, {0, 0, 0});
    NodeState node;
    node.behavior = Behavior(0.0);
    node.allowed = set.whole();
    EXPECT_EQ(local_select(node, set, {{0}, 0}, Vector{0}, EposOptions{}), 0u);
}

TEST(Epos, TwoAgentPairReachesTargetInEveryMode) {
    const auto sets = pair_instance();
    const Target t{{10}, 0};
    // exhaustive 4-combination check: only mixed selections hit 10
    EXPECT_EQ(min_inefficiency(sets, t), 0.0);
    for (auto mode : kModes) {
        const auto r = epos_run(sets, t, uniform_behaviors(2, 0.0), {}, options_for(t, mode));
        EXPECT_EQ(r.global.values, Vector{10}) << to_string(mode);
        EXPECT_NE(r.selections[0].plan_index, r.selections[1].plan_index);
    }
}

TEST(Epos, SelfishSingleIteration) {
    Xoshiro256 rng(4);
    const auto sets = test::random_sets(rng, 6, 5, 3);
    const auto t = test::random_target(rng, 3);
    const auto r = epos_run(sets, t, uniform_behaviors(6, 1.0), {}, options_for(t, ApprovalMode::independent, 1));
    std::vector<std::size_t> zeros(6, 0);
    for (const auto& s : r.selections) EXPECT_EQ(s.plan_index, 0u);
    EXPECT_EQ(r.global.values, flat_sum(sets, zeros));
    ASSERT_EQ(r.inefficiency_trace.size(), 1u);
}

TEST(Epos, SingleAgentRootAggregateIsItsPlan) {
    const std::vector<PlanSet> sets{test::make_set(0, {{3, 1}, {0, 0}}, {0, 1})};
    const Target t{{0.5, 0.5}, 0};
    EposRun run(sets, t, uniform_behaviors(1, 0.0), {}, options_for(t, ApprovalMode::independent));
    run.bottom_up_phase();
    const auto rec = run.top_down_phase();
    EXPECT_EQ(rec.tentative_global, sets[0][rec.candidates[0]].values);
    EXPECT_EQ(rec.candidates[0], 1u);
}

TEST(Epos, SinglePlanSetsAggregateExactly) {
    Xoshiro256 rng(12);
    const auto sets = test::random_sets(rng, 9, 1, 4);
    const auto t = test::random_target(rng, 4);
    EposRun run(sets, t, uniform_behaviors(9, 0.3), {}, options_for(t, ApprovalMode::independent));
    run.bottom_up_phase();
    const auto rec = run.top_down_phase();
    std::vector<Plan> only;
    for (const auto& s : sets) only.push_back(s[0]);
    const auto g = aggregate_global_plan(only);
    for (std::size_t d = 0; d < 4; ++d) EXPECT_NEAR(rec.tentative_global[d], g.values[d], 1e-12);
}

TEST(Epos, ConvergedStateIsAFixedPoint) {
    // Pick a 4-agent instance on which the run settles, then check one more bottom-up phase.
    int checked = 0;
    for (std::uint64_t seed = 1; seed < 200 && checked < 5; ++seed) {
        Xoshiro256 rng(seed);
        const auto sets = test::random_sets(rng, 4, 4, 3);
        const auto t = test::random_target(rng, 3);
        for (auto mode : kModes) {
            EposRun run(sets, t, uniform_behaviors(4, 0.2), {}, options_for(t, mode));
            std::vector<std::size_t> last;
            bool settled = false;
            for (int l = 0; l < 30; ++l) {
                const auto rec = run.iterate();
                bool all_kept = !rec.guard_reverted;
                for (std::size_t u = 0; u < 4; ++u) all_kept = all_kept && rec.candidates[u] == rec.selections[u];
                settled = rec.selections == last && all_kept;
                last = rec.selections;
            }
            if (!settled) continue;
            run.bottom_up_phase();
            const auto rec = run.top_down_phase();
            EXPECT_EQ(rec.candidates, last) << to_string(mode) << " seed " << seed;
            EXPECT_EQ(rec.selections, last);
            ++checked;
        }
    }
    EXPECT_GE(checked, 5);
}

TEST(TopDown, NoChangeKeepsEverything) {
    // Every agent already at its best plan: iteration 1 changes nothing.
    const std::vector<PlanSet> sets{test::make_set(0, {{1}, {-20}}, {0, 1}), test::make_set(1, {{2}, {-20}}, {0, 1}),
                                    test::make_set(2, {{3}, {-20}}, {0, 1})};
    const Target t{{6}, 0};
    EposRun run(sets, t, uniform_behaviors(3, 0.0), {}, options_for(t, ApprovalMode::independent));
    const auto first = run.iterate();
    EXPECT_EQ(first.global, Vector{6});
    const auto second = run.iterate();
    for (const auto& st : second.states) EXPECT_TRUE(st.approved);
    EXPECT_EQ(second.global, first.global);
    EXPECT_EQ(second.selections, first.selections);
}

TEST(TopDown, SingleImprovingChangeIsKept) {
    // Agent 1 can only improve by switching to its second plan once agent 0 is fixed.
    const std::vector<PlanSet> sets{test::make_set(0, {{5}}, {0}), test::make_set(1, {{0}, {3}}, {0, 1})};
    const Target t{{8}, 0};
    for (auto mode : kModes) {
        const auto r = epos_run(sets, t, uniform_behaviors(2, 0.0), {}, options_for(t, mode, 3));
        EXPECT_EQ(r.selections[1].plan_index, 1u);
        EXPECT_EQ(r.global.values, Vector{8});
    }
}

// Changes that each lower RMSE against the previous global plan but overshoot together.
TEST(Guard, AdversarialInstanceIsReverted) {
    std::optional<std::uint64_t> found;
    for (std::uint64_t seed = 1; seed < 5000 && !found; ++seed) {
        Xoshiro256 rng(seed);
        const auto sets = test::random_sets(rng, 3, 3, 1);
        const auto t = test::random_target(rng, 1);
        bool reverted = false;
        epos_run(sets, t, uniform_behaviors(3, 0.0), {}, options_for(t, ApprovalMode::independent, 8),
                 [&](const IterationRecord& r) { reverted = reverted || r.guard_reverted; });
        if (reverted) found = seed;
    }
    ASSERT_TRUE(found.has_value()) << "no adversarial instance found";
    Xoshiro256 rng(*found);
    const auto sets = test::random_sets(rng, 3, 3, 1);
    const auto t = test::random_target(rng, 1);
    const auto o = options_for(t, ApprovalMode::independent, 8);

    EposRun run(sets, t, uniform_behaviors(3, 0.0), {}, o);
    double previous = INFINITY;
    int first_revert = -1;
    for (int l = 0; l < 8; ++l) {
        const Vector before = run.global();
        const auto rec = run.iterate();
        if (rec.guard_reverted) {
            if (first_revert < 0) first_revert = l;
            const double base = inefficiency_rmse(t, GlobalPlan{before});
            Vector merged = before;
            for (std::size_t u = 0; u < 3; ++u) {
                const auto& st = rec.states[u];
                if (!st.approved) continue;
                Vector alone = before;
                alone[0] += sets[u][st.proposal].values[0] - sets[u][st.previous].values[0];
                merged[0] += sets[u][st.proposal].values[0] - sets[u][st.previous].values[0];
                EXPECT_LE(inefficiency_rmse(t, GlobalPlan{alone}), base + 1e-12);
            }
            EXPECT_GT(inefficiency_rmse(t, GlobalPlan{merged}), base);
            EXPECT_EQ(rec.global, before);
        }
        EXPECT_LE(rec.inefficiency, previous);
        previous = rec.inefficiency;
    }
    ASSERT_GE(first_revert, 1);

    // Without the guard the same iteration commits and inefficiency rises.
    auto unguarded = o;
    unguarded.guard = false;
    const auto r = epos_run(sets, t, uniform_behaviors(3, 0.0), {}, unguarded);
    const auto i = static_cast<std::size_t>(first_revert);
    EXPECT_GT(r.inefficiency_trace[i], r.inefficiency_trace[i - 1]);
}

TEST(Oracle, SingleAgentMatchesLocalSelect) {
    Xoshiro256 rng(21);
    for (int i = 0; i < 30; ++i) {
        const auto sets = test::random_sets(rng, 1, 6, 3);
        const auto t = test::random_target(rng, 3);
        const double beta = rng.uniform();
        const auto o = options_for(t, ApprovalMode::independent);
        NodeState node;
        node.behavior = Behavior(beta);
        node.allowed = sets[0].whole();
        node.discomfort_scale = discomfort_scale(sets[0]);
        const auto best = brute_force_oracle(sets, t, {Behavior(beta)}, o);
        EXPECT_EQ(best.selections[0], local_select(node, sets[0], t, Vector(3, 0.0), o));
    }
}

TEST(Oracle, PairTieBreaksLexicographically) {
    const auto sets = pair_instance();
    const Target t{{10}, 0};
    const auto r = brute_force_oracle(sets, t, uniform_behaviors(2, 0.0), options_for(t, ApprovalMode::independent));
    EXPECT_EQ(r.selections, (std::vector<std::size_t>{0, 1}));
    EXPECT_EQ(r.inefficiency, 0.0);
    EXPECT_EQ(r.global.values, Vector{10});
}

TEST(Oracle, SelfishOptimumIsAllCheapest) {
    Xoshiro256 rng(2);
    const auto sets = test::random_sets(rng, 4, 3, 2);
    const auto t = test::random_target(rng, 2);
    const auto r = brute_force_oracle(sets, t, uniform_behaviors(4, 1.0), options_for(t, ApprovalMode::independent));
    EXPECT_EQ(r.selections, (std::vector<std::size_t>(4, 0)));
    EXPECT_EQ(r.cost, 0.0);
}

TEST(Oracle, RejectsLargeInstances) {
    Xoshiro256 rng(2);
    const auto sets = test::random_sets(rng, 7, 8, 1);
    const auto t = test::random_target(rng, 1);
    EXPECT_THROW(brute_force_oracle(sets, t, uniform_behaviors(7, 0.0), EposOptions{}), PreconditionError);
}

TEST(Epos, FourByTwoNearOracle) {
    // 4 agents x 2 plans, D=2, beta=0: compare final inefficiency with the 16-combination optimum.
    int within = 0, total = 0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        Xoshiro256 rng(seed);
        const auto sets = test::random_sets(rng, 4, 2, 2);
        const auto t = test::random_target(rng, 2);
        const auto o = options_for(t, ApprovalMode::independent);
        const auto r = epos_run(sets, t, uniform_behaviors(4, 0.0), {}, o);
        const double best = min_inefficiency(sets, t);
        EXPECT_GE(r.report.inefficiency, best - 1e-12);
        ++total;
        if (r.report.inefficiency <= best * 1.1 + 1e-12) ++within;
    }
    RecordProperty("within_10_percent", within);
    EXPECT_GE(within, total / 2);
}

// Monotonicity, aggregation exactness, subtree consistency and the oracle bound on random instances.
TEST(EposProperties, RandomInstancesAllModes) {
    Xoshiro256 rng(1234);
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t agents = 1 + rng.below(7);
        const std::size_t plans = 1 + rng.below(4);
        const std::size_t dim = 1 + rng.below(4);
        const auto sets = test::random_sets(rng, agents, plans, dim);
        const auto t = test::random_target(rng, dim);
        std::vector<Behavior> betas;
        for (std::size_t u = 0; u < agents; ++u) betas.emplace_back(rng.uniform());
        std::vector<IndexRange> allowed;
        for (const auto& s : sets) {
            const std::size_t a = rng.below(s.size());
            allowed.push_back({a, a + 1 + rng.below(s.size() - a)});
        }
        const auto tree = build_tree(static_cast<int>(agents));
        for (auto mode : kModes) {
            const auto o = options_for(t, mode);
            double previous = INFINITY;
            const auto r = epos_run(sets, t, betas, allowed, o, [&](const IterationRecord& rec) {
                EXPECT_LE(rec.inefficiency, previous);
                previous = rec.inefficiency;

                const auto flat = flat_sum(sets, rec.candidates);
                for (std::size_t d = 0; d < dim; ++d) EXPECT_NEAR(rec.tentative_global[d], flat[d], 1e-9);
                const auto committed = flat_sum(sets, rec.selections);
                for (std::size_t d = 0; d < dim; ++d) EXPECT_NEAR(rec.global[d], committed[d], 1e-9);

                for (std::size_t u = 0; u < agents; ++u) {
                    EXPECT_GE(rec.selections[u], allowed[u].begin);
                    EXPECT_LT(rec.selections[u], allowed[u].end);
                    const auto& st = rec.states[u];
                    if (mode == ApprovalMode::sequential && !st.approved) continue;
                    // subtree = own candidate + children's reported aggregates
                    Vector expect = sets[u][rec.candidates[u]].values;
                    for (int c : tree.children[u]) {
                        const auto& cs = rec.states[static_cast<std::size_t>(c)];
                        const Vector& part = (mode == ApprovalMode::sequential && !cs.approved) ? cs.previous_subtree
                                                                                                : cs.subtree;
                        for (std::size_t d = 0; d < dim; ++d) expect[d] += part[d];
                    }
                    for (std::size_t d = 0; d < dim; ++d) EXPECT_NEAR(st.subtree[d], expect[d], 1e-9);
                }
            });
            ASSERT_EQ(r.inefficiency_trace.size(), 20u);
            for (std::size_t i = 1; i < r.inefficiency_trace.size(); ++i)
                EXPECT_LE(r.inefficiency_trace[i], r.inefficiency_trace[i - 1]);

            const auto again = epos_run(sets, t, betas, allowed, o);
            EXPECT_EQ(again.inefficiency_trace, r.inefficiency_trace);
            EXPECT_EQ(again.global, r.global);

            std::vector<std::size_t> sel;
            for (const auto& s : r.selections) sel.push_back(s.plan_index);
            const auto best = brute_force_oracle(sets, t, betas, o, allowed);
            EXPECT_GE(selection_objective(sets, sel, t, betas, o), best.cost - 1e-12);
        }
    }
}

TEST(Epos, CommittedSubtreesAreConsistent) {
    Xoshiro256 rng(77);
    const auto sets = test::random_sets(rng, 11, 4, 3);
    const auto t = test::random_target(rng, 3);
    EposRun run(sets, t, uniform_behaviors(11, 0.4), {}, options_for(t, ApprovalMode::independent));
    for (int l = 0; l < 5; ++l) {
        run.iterate();
        const auto& states = run.states();
        for (std::size_t u = 0; u < states.size(); ++u) {
            Vector expect = sets[u][states[u].selection].values;
            for (int c : run.topology().children[u])
                for (std::size_t d = 0; d < 3; ++d) expect[d] += states[static_cast<std::size_t>(c)].previous_subtree[d];
            for (std::size_t d = 0; d < 3; ++d) EXPECT_NEAR(states[u].previous_subtree[d], expect[d], 1e-12);
        }
        for (std::size_t d = 0; d < 3; ++d) EXPECT_NEAR(states[0].previous_subtree[d], run.global()[d], 1e-12);
    }
}

TEST(Epos, PhaseOrderIsEnforced) {
    const auto sets = pair_instance();
    EposRun run(sets, {{10}, 0}, uniform_behaviors(2, 0.0), {}, EposOptions{});
    EXPECT_THROW(run.top_down_phase(), PreconditionError);
    EXPECT_THROW(EposRun(sets, {{10, 1}, 0}, uniform_behaviors(2, 0.0), {}, EposOptions{}), DimensionError);
    EXPECT_THROW(EposRun(sets, {{10}, 0}, uniform_behaviors(1, 0.0), {}, EposOptions{}), PreconditionError);
}

TEST(Approval, NamesRoundTrip) {
    for (auto mode : kModes) EXPECT_EQ(parse_approval(to_string(mode)), mode);
    EXPECT_THROW(parse_approval("vote"), ConfigError);
}
