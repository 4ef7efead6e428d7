// Acceptance checks: one PASS/FAIL line per criterion, then a tally.
// Exit status is 0 only when every criterion passes.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "hrcl/baselines.hpp"
#include "hrcl/epos.hpp"
#include "hrcl/harness.hpp"
#include "hrcl/marl.hpp"
#include "hrcl/neural.hpp"
#include "hrcl/plangen.hpp"
#include "hrcl/rng.hpp"

using namespace hrcl;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

int failures = 0;
std::map<int, std::string> lines;

void verdict(int id, bool pass, const std::string& name, const std::string& detail) {
    lines[id] = "criterion " + std::to_string(id) + ": " + (pass ? "PASS" : "FAIL") + "  " + name + ": " + detail;
    std::fprintf(stderr, "[%d done]\n", id);
    failures += pass ? 0 : 1;
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

struct Instance {
    std::vector<PlanSet> sets;
    Target target;
};

Instance random_instance(Xoshiro256& rng) {
    const std::size_t U = 1 + rng.below(5), K = 1 + rng.below(4), D = 1 + rng.below(4);
    Instance in;
    for (std::size_t u = 0; u < U; ++u) {
        std::vector<Plan> plans;
        for (std::size_t k = 0; k < K; ++k) {
            Plan p;
            for (std::size_t d = 0; d < D; ++d) p.values.push_back(rng.normal());
            p.discomfort = K > 1 ? static_cast<double>(k) / static_cast<double>(K - 1) : 0.0;
            plans.push_back(std::move(p));
        }
        in.sets.emplace_back(static_cast<int>(u), std::move(plans));
    }
    for (std::size_t d = 0; d < D; ++d) in.target.values.push_back(rng.normal());
    return in;
}

// Criteria 2 and 3 are checked on every EPOS run this program performs.
struct ProtocolAudit {
    std::size_t runs = 0, iterations = 0, monotone_violations = 0, aggregation_violations = 0;
    double worst_aggregation = 0.0;

    IterationObserver observer(const std::vector<PlanSet>& sets) {
        return [this, &sets](const IterationRecord& rec) {
            ++iterations;
            Vector sum(rec.tentative_global.size(), 0.0);
            for (std::size_t u = 0; u < sets.size(); ++u)
                for (std::size_t d = 0; d < sum.size(); ++d) sum[d] += sets[u][rec.candidates[u]].values[d];
            for (std::size_t d = 0; d < sum.size(); ++d) {
                const double err = std::abs(sum[d] - rec.tentative_global[d]);
                worst_aggregation = std::max(worst_aggregation, err);
                if (err > 1e-9) ++aggregation_violations;
            }
        };
    }
    void trace(const std::vector<double>& t) {
        ++runs;
        for (std::size_t i = 1; i < t.size(); ++i)
            if (t[i] > t[i - 1]) ++monotone_violations;
    }
    void rollout(const Rollout& r) {
        for (std::size_t i = 1; i < r.trace.size(); ++i) {
            if (r.trace[i].period != r.trace[i - 1].period) {
                ++runs;
                continue;
            }
            if (r.trace[i].inefficiency > r.trace[i - 1].inefficiency) ++monotone_violations;
        }
        if (!r.trace.empty()) ++runs;
    }
};

ProtocolAudit audit;

void criterion_1() {
    const auto t0 = Clock::now();
    const int n = 200;
    struct Tally {
        int within = 0, below = 0;
    };
    std::vector<Tally> by_mode(3);
    Xoshiro256 rng(20240601);
    for (int i = 0; i < n; ++i) {
        const auto in = random_instance(rng);
        const std::vector<Behavior> b(in.sets.size(), Behavior(0.0));
        const auto opt = brute_force_oracle(in.sets, in.target, b, EposOptions{}).inefficiency;
        for (int m = 0; m < 3; ++m) {
            EposOptions o;
            o.approval = static_cast<ApprovalMode>(m);
            const auto r = epos_run(in.sets, in.target, b, {}, o, audit.observer(in.sets));
            audit.trace(r.inefficiency_trace);
            const double e = r.report.inefficiency;
            if (e <= opt * 1.1 + 1e-12) ++by_mode[m].within;
            if (e < opt - 1e-12) ++by_mode[m].below;
        }
    }
    const double secs = seconds_since(t0);
    const auto def = static_cast<std::size_t>(EposOptions{}.approval);
    std::string others;
    for (int m = 0; m < 3; ++m)
        if (static_cast<std::size_t>(m) != def)
            others += fmt("; %s %d/%d", to_string(static_cast<ApprovalMode>(m)).c_str(), by_mode[m].within, n);
    const auto& t = by_mode[def];
    const bool pass = t.within >= (9 * n + 9) / 10 && t.below == 0 && secs < 10.0;
    verdict(1, pass, "oracle equivalence",
            fmt("%s approval within 10%% on %d/%d (%.1f%%), below optimum %d, %.2fs", to_string(EposOptions{}.approval).c_str(),
                t.within, n, 100.0 * t.within / n, t.below, secs) +
                " (info, 3 modes timed together" + others + ")");
}

void criterion_2_3_epos_scenarios() {
    // desk-scale EPOS rollouts for every fixed behavior, in addition to the random instances above
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        ExperimentConfig c;
        c.seed = seed;
        const Scenario s(c);
        for (auto m : {MethodId::epos, MethodId::epos_selfish, MethodId::epos_altruistic, MethodId::epos_p}) {
            c.method = m;
            audit.rollout(run_method(s, c).evaluation);
        }
        for (int period = 0; period < c.periods; ++period) {
            const auto sets = s.plansets(Split::eval, 0, period, 1);
            const std::vector<Behavior> b(sets.size(), Behavior(c.beta));
            EposOptions o;
            o.metric = s.metric();
            const auto r = epos_run(sets, s.initial_target(), b, {}, o, audit.observer(sets));
            audit.trace(r.inefficiency_trace);
        }
    }
    verdict(2, audit.monotone_violations == 0, "monotonicity",
            fmt("%zu violations over %zu EPOS runs", audit.monotone_violations, audit.runs));
    verdict(3, audit.aggregation_violations == 0, "aggregation exactness",
            fmt("%zu violations over %zu iterations, max error %.3g", audit.aggregation_violations, audit.iterations,
                audit.worst_aggregation));
}

DenseNetwork random_net(std::vector<std::size_t> sizes, OutputHead head, Xoshiro256& rng) {
    DenseNetwork net(std::move(sizes), head);
    for (std::size_t i = 0; i < net.parameter_count(); ++i) net.parameter(i) = rng.uniform(-0.5, 0.5);
    return net;
}

void criterion_4() {
    const auto t0 = Clock::now();
    Xoshiro256 rng(4);
    double worst = 0.0;
    int nets = 0;
    for (int i = 0; i < 20; ++i) {
        const std::size_t in = 2 + rng.below(5), hidden = 3 + rng.below(6), out = 2 + rng.below(4);
        Vector x(in);
        for (auto& v : x) v = rng.uniform(-1, 1);

        const auto actor = random_net({in, hidden, hidden, out}, OutputHead::softmax, rng);
        const std::size_t action = rng.below(out);
        const double adv = rng.uniform(-1, 1);
        auto actor_loss = [&](const DenseNetwork& n) { return -adv * std::log(n.forward(x)[action]); };
        auto actor_grad = [&](const DenseNetwork& n) {
            ForwardCache cache;
            const auto p = n.forward(x, cache);
            Vector g(out, 0.0);
            g[action] = -adv / p[action];
            return backward(n, cache, g);
        };
        worst = std::max(worst, gradient_check(actor, actor_loss, actor_grad).max_relative_error);

        const auto critic = random_net({in, hidden, hidden, 1}, OutputHead::identity, rng);
        const double y = rng.uniform(-1, 1);
        auto critic_loss = [&](const DenseNetwork& n) {
            const double e = n.forward(x)[0] - y;
            return e * e;
        };
        auto critic_grad = [&](const DenseNetwork& n) {
            ForwardCache cache;
            const double e = n.forward(x, cache)[0] - y;
            return backward(n, cache, Vector{2.0 * e});
        };
        worst = std::max(worst, gradient_check(critic, critic_loss, critic_grad).max_relative_error);
        nets += 2;
    }
    const double secs = seconds_since(t0);
    verdict(4, worst < 1e-4 && secs < 30.0, "gradient correctness",
            fmt("%d networks (20 actor + 20 critic), max relative error %.3g, %.2fs", nets, worst, secs));
}

ExperimentConfig small(MethodId m) {
    ExperimentConfig c;
    c.method = m;
    c.agents = 4;
    c.plans = 8;
    c.dim = 8;
    c.periods = 4;
    c.episodes = 40;
    c.batch = 16;
    c.hidden = 16;
    c.minibatch = 16;
    return c;
}

void criterion_5() {
    double worst = 0.0;
    std::size_t updates = 0;
    for (auto m : {MethodId::hrcl, MethodId::mappo, MethodId::hrl, MethodId::hrcl_p, MethodId::hrcl_b}) {
        const auto c = small(m);
        const auto r = run_method(Scenario(c), c);
        for (const auto& l : r.losses) worst = std::max(worst, l.max_initial_ratio_deviation);
        updates += r.losses.size();
    }
    const double a = clipped_surrogate(1.0, 0.37, 0.2);
    const double b = clipped_surrogate(2.0, 1.0, 0.2);
    const double d = clipped_surrogate(0.5, -1.0, 0.2);
    const bool exact = a == 0.37 && b == 1.2 && d == -0.8;
    verdict(5, worst < 1e-12 && updates > 0 && exact, "PPO identities",
            fmt("max |ratio-1| %.3g over %zu refreshes; surrogates %.17g %.17g %.17g (expect 0.37 1.2 -0.8)", worst,
                updates, a, b, d));
}

void criterion_6() {
    double worst = 0.0;
    std::size_t rows = 0;
    for (MethodId m : all_methods()) {
        auto c = small(m);
        c.sigma1 = c.sigma2 = 0.5;
        c.episodes = 10;
        const auto r = run_method(Scenario(c), c);
        for (const auto& p : r.evaluation.periods) {
            worst = std::max(worst, std::abs(p.reward + p.report.combined));
            ++rows;
        }
        for (const auto& e : r.curve) {
            worst = std::max(worst, std::abs(e.mean_reward + e.combined));
            ++rows;
        }
    }
    verdict(6, worst <= 1e-12, "reward/metric consistency",
            fmt("%zu rows over %zu methods, max |reward + combined| %.3g", rows, all_methods().size(), worst));
}

void criterion_7() {
    int exact = 0, checked = 0, wins = 0;
    std::string detail;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        ExperimentConfig c;
        c.seed = seed;
        const Scenario s(c);
        c.method = MethodId::epos_selfish;
        const auto selfish = run_method(s, c).evaluation;
        for (int t = 0; t < c.periods; ++t) {
            const auto sets = s.plansets(Split::eval, 0, t, 1);
            for (std::size_t u = 0; u < sets.size(); ++u) {
                double lo = INFINITY;
                for (const auto& p : sets[u].plans()) lo = std::min(lo, p.discomfort);
                ++checked;
                exact += sets[u][selfish.selections[t][u]].discomfort == lo ? 1 : 0;
            }
        }
        c.method = MethodId::epos_altruistic;
        const auto alt = run_method(s, c).evaluation;
        const bool win = alt.summary.inefficiency <= selfish.summary.inefficiency;
        wins += win ? 1 : 0;
        detail += fmt(" %.3f/%.3f", alt.summary.inefficiency, selfish.summary.inefficiency);
    }
    verdict(7, exact == checked && wins >= 4, "boundary behaviors",
            fmt("selfish at minimum discomfort %d/%d agent-periods; altruistic <= selfish inefficiency on %d/5 seeds "
                "(alt/selfish:",
                exact, checked, wins) +
                detail + ")");
}

void criterion_8_9() {
    const auto t0 = Clock::now();
    int improved = 0;
    double hrcl_sum = 0.0, epos_sum = 0.0;
    std::string detail;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        ExperimentConfig c;  // desk scale: U=8 K=8 D=16 T=8, 500 episodes
        c.seed = seed;
        const Scenario s(c);
        c.method = MethodId::hrcl;
        const auto h = run_method(s, c);
        audit.rollout(h.evaluation);
        const std::size_t E = h.curve.size(), w = std::min<std::size_t>(50, E);
        double first = 0.0, last = 0.0;
        for (std::size_t e = 0; e < w; ++e) {
            first += h.curve[e].mean_reward / static_cast<double>(w);
            last += h.curve[E - w + e].mean_reward / static_cast<double>(w);
        }
        improved += last > first ? 1 : 0;
        detail += fmt(" %.3f->%.3f", first, last);
        c.method = MethodId::epos;
        c.beta = 0.5;
        hrcl_sum += h.evaluation.summary.combined;
        epos_sum += run_method(s, c).evaluation.summary.combined;
    }
    const double secs = seconds_since(t0);
    verdict(8, improved >= 4 && secs < 900.0, "learning progress",
            fmt("improved on %d/5 seeds, %.1fs incl. EPOS baselines (first50->last50:", improved, secs) + detail + ")");
    verdict(9, hrcl_sum / 5.0 <= epos_sum / 5.0, "ablation ordering",
            fmt("HRCL mean combined %.4f vs EPOS beta=0.5 %.4f", hrcl_sum / 5.0, epos_sum / 5.0));
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void criterion_10(const fs::path& scratch) {
    RunSettings s;
    s.experiment = small(MethodId::hrcl);
    s.experiment.seeds = {1, 2};
    s.methods = {MethodId::hrcl, MethodId::mappo, MethodId::hrl, MethodId::epos, MethodId::epos_p};
    s.name = "determinism";
    const auto a = scratch / "a", b = scratch / "b";
    run_experiment(s, a);
    // second run rebuilt from the first run's manifest
    const auto replay = load_config(a / "manifest.txt");
    run_experiment(replay, b);
    // CSVs and checkpoints; manifest.txt records its own output directory
    const auto compared = [](const fs::path& p) { return p.extension() == ".csv" || p.filename() == "checkpoint.txt"; };
    std::size_t files = 0, differ = 0, files_b = 0;
    for (const auto& entry : fs::recursive_directory_iterator(a)) {
        if (!entry.is_regular_file() || !compared(entry.path())) continue;
        const auto rel = fs::relative(entry.path(), a);
        ++files;
        if (!fs::exists(b / rel) || slurp(entry.path()) != slurp(b / rel)) ++differ;
    }
    for (const auto& entry : fs::recursive_directory_iterator(b))
        files_b += entry.is_regular_file() && compared(entry.path()) ? 1 : 0;
    verdict(10, differ == 0 && files == files_b && files > 0, "determinism",
            fmt("%zu CSV/checkpoint files compared after a manifest replay, %zu differ", files, differ));
}

void criterion_11() {
    std::size_t compared = 0, mismatched = 0;
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        auto base = small(MethodId::hrcl);
        base.seed = seed;
        base.beta = 0.5;  // the M=1 midpoint
        const auto same = [&](const MethodRun& x, const MethodRun& y) {
            ++compared;
            bool eq = x.evaluation.selections == y.evaluation.selections &&
                      x.evaluation.actions.size() == y.evaluation.actions.size() && x.curve.size() == y.curve.size();
            for (std::size_t e = 0; eq && e < x.curve.size(); ++e)
                eq = x.curve[e].mean_reward == y.curve[e].mean_reward && x.curve[e].combined == y.curve[e].combined;
            for (std::size_t e = 0; eq && e < x.losses.size(); ++e)
                eq = x.losses[e].actor_loss == y.losses[e].actor_loss && x.losses[e].critic_loss == y.losses[e].critic_loss;
            mismatched += eq ? 0 : 1;
        };
        auto m1 = base;
        m1.ranges = 1;
        auto p = m1;
        p.method = MethodId::hrcl_p;
        const Scenario s1(m1);
        same(run_method(s1, m1), run_method(s1, p));

        auto i1 = base;
        i1.groups = 1;
        auto hb = i1;
        hb.method = MethodId::hrcl_b;
        const Scenario s2(i1);
        same(run_method(s2, i1), run_method(s2, hb));
    }
    verdict(11, mismatched == 0, "special-case collapse",
            fmt("%zu trajectory pairs (M=1 vs HRCL-P, I=1 vs HRCL-B, seeds 1-3), %zu mismatched", compared, mismatched));
}

}  // namespace

int main(int argc, char** argv) {
    const fs::path scratch = argc > 1 ? fs::path(argv[1]) : fs::temp_directory_path() / "hrcl_acceptance";
    fs::remove_all(scratch);
    const auto t0 = Clock::now();
    try {
        criterion_1();
        criterion_4();
        criterion_5();
        criterion_6();
        criterion_7();
        criterion_8_9();
        criterion_2_3_epos_scenarios();  // also audits the EPOS runs made by the criteria above
        criterion_10(scratch);
        criterion_11();
    } catch (const std::exception& e) {
        for (const auto& [id, line] : lines) std::printf("%s\n", line.c_str());
        std::printf("acceptance aborted: %s\n", e.what());
        return 3;
    }
    fs::remove_all(scratch);
    for (const auto& [id, line] : lines) std::printf("%s\n", line.c_str());
    std::printf("acceptance: %d of 11 criteria passed (%.1fs)\n", 11 - failures, seconds_since(t0));
    return failures == 0 ? 0 : 1;
}
