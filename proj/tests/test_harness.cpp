#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "hrcl/error.hpp"
#include "hrcl/harness.hpp"
#include "hrcl/text.hpp"
#include "support.hpp"

using namespace hrcl;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::vector<std::string>> rows_of(const std::string& csv) {
    std::vector<std::vector<std::string>> out;
    for (auto line : text::split(csv, '\n')) {
        if (text::trim(line).empty()) continue;
        std::vector<std::string> f;
        for (auto x : text::split(line, ',')) f.emplace_back(x);
        out.push_back(std::move(f));
    }
    return out;
}

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("hrcl_harness_" + name);
    fs::remove_all(dir);
    return dir;
}

RunSettings small_settings() {
    RunSettings s;
    s.experiment = test::small_config();
    s.experiment.method = MethodId::epos;
    return s;
}

std::string key_of_error(const std::function<void()>& f) {
    try {
        f();
    } catch (const ConfigError& e) {
        return e.key();
    }
    return "<none>";
}

}  // namespace

TEST(Config, ParseSectionsAndComments) {
    const auto s = parse_config(
        "# comment\n[scenario]\nagents = 12\nplans=6\n\n[epos]\napproval = joint\n[experiment]\nmethods = epos, hrcl\n"
        "seeds = 3,4\n");
    EXPECT_EQ(s.experiment.agents, 12);
    EXPECT_EQ(s.experiment.plans, 6);
    EXPECT_EQ(s.experiment.approval, ApprovalMode::joint);
    EXPECT_EQ(s.method_list(), (std::vector<MethodId>{MethodId::epos, MethodId::hrcl}));
    EXPECT_EQ(s.experiment.seeds, (std::vector<std::uint64_t>{3, 4}));
}

TEST(Config, UnknownKeyAndBadValuesNameTheKey) {
    EXPECT_EQ(key_of_error([] { parse_config("[scenario]\nagnets = 3\n"); }), "agnets");
    EXPECT_EQ(key_of_error([] { parse_config("agents = many\n"); }), "agents");
    EXPECT_EQ(key_of_error([] { parse_config("method = ppo\n"); }), "method");
    EXPECT_EQ(key_of_error([] { parse_config("profile = huge\n"); }), "profile");
    EXPECT_THROW(parse_config("this is not a pair\n"), ConfigError);
}

TEST(Config, ProfileAppliesBeforeOtherKeys) {
    const auto s = parse_config("agents = 5\nprofile = full\n");
    EXPECT_EQ(s.experiment.agents, 5);
    EXPECT_EQ(s.experiment.plans, 16);
    EXPECT_EQ(s.experiment.episodes, 2000);
    const auto d = parse_config("profile = desk\n");
    EXPECT_EQ(d.experiment.agents, 8);
    EXPECT_EQ(d.experiment.plans, 8);
    EXPECT_EQ(d.experiment.dim, 16);
    EXPECT_EQ(d.experiment.periods, 8);
    EXPECT_EQ(d.experiment.iterations, 20);
    EXPECT_EQ(d.experiment.episodes, 500);
    EXPECT_EQ(d.experiment.seeds.size(), 5u);
}

TEST(Config, LaterTextOverridesEarlier) {
    const auto base = parse_config("[training]\nepisodes = 40\nlr = 0.001\n");
    const auto s = parse_config("[cli]\nepisodes = 7\n", base);
    EXPECT_EQ(s.experiment.episodes, 7);
    EXPECT_EQ(s.experiment.learning_rate, 0.001);
}

TEST(Config, FormatRoundTripsEveryKey) {
    auto s = small_settings();
    s.experiment.omega = 0.3;
    s.experiment.approval = ApprovalMode::sequential;
    s.experiment.guard = false;
    s.sweep_param = "agents";
    s.sweep_values = {"2", "3"};
    s.name = "demo";
    const auto text = format_config(s);
    const auto back = parse_config(text);
    EXPECT_EQ(format_config(back), text);
    for (const auto& k : config_keys()) EXPECT_EQ(get_config_value(back, k.name), get_config_value(s, k.name)) << k.name;
    EXPECT_NE(text.find("[scenario]"), std::string::npos);
}

TEST(Config, EveryKeyHasSectionAndHelp) {
    std::map<std::string, int> seen;
    for (const auto& k : config_keys()) {
        EXPECT_GT(std::string(k.section).size(), 0u);
        EXPECT_GT(std::string(k.help).size(), 0u);
        EXPECT_EQ(++seen[k.name], 1) << k.name;
    }
    for (const char* k : {"agents", "plans", "dim", "periods", "groups", "ranges", "iterations", "episodes", "batch",
                          "gamma", "clip", "sigma1", "sigma2", "seeds", "method", "sweep_param", "sweep_values"})
        EXPECT_EQ(seen.count(k), 1u) << k;
}

TEST(Config, Validation) {
    auto s = small_settings();
    s.experiment.seeds.clear();
    EXPECT_EQ(key_of_error([&] { validate_settings(s); }), "seeds");
    EXPECT_EQ(key_of_error([] { validate_settings(parse_config("seeds =\n")); }), "seeds");
    auto t = small_settings();
    t.sweep_param = "method";
    t.sweep_values = {"epos"};
    EXPECT_EQ(key_of_error([&] { validate_settings(t); }), "sweep_param");
    t.sweep_param = "agents";
    t.sweep_values = {};
    EXPECT_EQ(key_of_error([&] { validate_settings(t); }), "sweep_values");
    t.sweep_values = {"2", "0"};
    EXPECT_EQ(key_of_error([&] { validate_settings(t); }), "sweep_values");
}

TEST(OutputRoot, ExplicitThenEnvThenDefault) {
    ::setenv(kOutputRootEnv, "/tmp/from_env", 1);
    EXPECT_EQ(resolve_output_root("/x/y"), fs::path("/x/y"));
    EXPECT_EQ(resolve_output_root(""), fs::path("/tmp/from_env"));
    ::unsetenv(kOutputRootEnv);
    EXPECT_EQ(resolve_output_root(""), fs::path("runs"));
}

TEST(RunName, NamedOrDerived) {
    auto s = small_settings();
    EXPECT_EQ(run_name(s).rfind("epos-synthetic-", 0), 0u);
    auto t = s;
    t.experiment.agents = 5;
    EXPECT_NE(run_name(s), run_name(t));
    s.name = "mine";
    EXPECT_EQ(run_name(s), "mine");
}

TEST(Manifest, WriteOnce) {
    const auto dir = scratch("manifest");
    const auto s = small_settings();
    const auto m = write_manifest(s, dir);
    const std::string first = slurp(dir / "manifest.txt");
    EXPECT_NE(first.find("id = " + m.id), std::string::npos);
    EXPECT_NE(first.find("dataset_hash = "), std::string::npos);
    EXPECT_NE(first.find("created = "), std::string::npos);
    // Same configuration: kept as is.
    write_manifest(s, dir);
    EXPECT_EQ(slurp(dir / "manifest.txt"), first);
    // Different configuration: refused.
    auto other = s;
    other.experiment.agents = 3;
    EXPECT_EQ(key_of_error([&] { write_manifest(other, dir); }), "manifest");
    // The manifest parses back to the same configuration.
    EXPECT_EQ(format_config(load_config(dir / "manifest.txt")), format_config(s));
    fs::remove_all(dir);
}

TEST(RunExperiment, OutputsAndSummaryMeans) {
    const auto dir = scratch("run");
    auto s = small_settings();
    s.methods = {MethodId::epos, MethodId::hrcl};
    s.experiment.seeds = {1, 2, 3};
    const auto report = run_experiment(s, dir);
    EXPECT_EQ(report.per_seed.size(), 6u);
    for (const char* f : {"manifest.txt", "summary.csv", "per_seed.csv", "epos/seed_1/costs.csv",
                          "epos/seed_1/trace.csv", "hrcl/seed_3/curve.csv", "hrcl/seed_3/losses.csv",
                          "hrcl/seed_3/checkpoint.txt"})
        EXPECT_TRUE(fs::exists(dir / f)) << f;
    EXPECT_FALSE(fs::exists(dir / "epos/seed_1/curve.csv"));

    const auto costs = rows_of(slurp(dir / "epos/seed_1/costs.csv"));
    EXPECT_EQ(costs[0], (std::vector<std::string>{"episode", "period", "mean_discomfort", "inefficiency", "combined",
                                                  "reward"}));
    EXPECT_EQ(costs.size(), 1u + 3);
    const auto trace = rows_of(slurp(dir / "epos/seed_1/trace.csv"));
    EXPECT_EQ(trace[0], (std::vector<std::string>{"period", "iteration", "inefficiency", "combined"}));
    EXPECT_EQ(trace.size(), 1u + 3 * 5);

    const auto per_seed = rows_of(slurp(dir / "per_seed.csv"));
    const auto summary = rows_of(slurp(dir / "summary.csv"));
    ASSERT_EQ(summary.size(), 3u);
    EXPECT_EQ(summary[0][4], "mean_discomfort");
    EXPECT_EQ(summary[0][5], "mean_discomfort_se");
    for (std::size_t r = 1; r < summary.size(); ++r) {
        EXPECT_EQ(summary[r][1], "none");
        EXPECT_EQ(summary[r][3], "3");
        for (int metric = 0; metric < 4; ++metric) {
            double total = 0.0;
            int n = 0;
            for (std::size_t p = 1; p < per_seed.size(); ++p)
                if (per_seed[p][0] == summary[r][0]) {
                    total += text::parse_double(per_seed[p][4 + metric]);
                    ++n;
                }
            EXPECT_NEAR(text::parse_double(summary[r][4 + 2 * metric]), total / n, 1e-12);
        }
    }
    fs::remove_all(dir);
}

TEST(RunExperiment, ByteIdenticalRerun) {
    const auto a = scratch("rerun_a");
    const auto b = scratch("rerun_b");
    auto s = small_settings();
    s.methods = {MethodId::epos_p, MethodId::mappo};
    run_experiment(s, a);
    run_experiment(s, b);
    run_experiment(s, a);  // same directory again
    for (const char* f : {"summary.csv", "per_seed.csv", "epos-p/seed_2/costs.csv", "epos-p/seed_2/trace.csv",
                          "mappo/seed_1/curve.csv", "mappo/seed_1/losses.csv", "mappo/seed_1/checkpoint.txt"})
        EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST(RunExperiment, SweepGivesOneRowPerPointAndMethod) {
    const auto dir = scratch("sweep");
    auto s = small_settings();
    s.methods = {MethodId::epos, MethodId::epos_selfish};
    s.experiment.seeds = {1};
    s.sweep_param = "agents";
    s.sweep_values = {"2", "4", "8"};
    run_experiment(s, dir);
    const auto summary = rows_of(slurp(dir / "summary.csv"));
    EXPECT_EQ(summary.size(), 1u + 3 * 2);
    for (std::size_t r = 1; r < summary.size(); ++r) EXPECT_EQ(summary[r][1], "agents");
    EXPECT_TRUE(fs::exists(dir / "epos/agents=4/seed_1/costs.csv"));

    auto omega = small_settings();
    omega.experiment.seeds = {1};
    omega.sweep_param = "omega";
    omega.sweep_values = {"0.1308996938995747", "0.2617993877991494", "0.5235987755982988"};
    const auto d2 = scratch("sweep_omega");
    run_experiment(omega, d2);
    EXPECT_EQ(rows_of(slurp(d2 / "summary.csv")).size(), 4u);
    fs::remove_all(dir);
    fs::remove_all(d2);
}

TEST(PlotData, SchemaMeansAndIdempotence) {
    const auto dir = scratch("plot");
    auto s = small_settings();
    s.experiment.seeds = {4};
    run_experiment(s, dir);
    auto rows = rows_of(plot_data(dir));
    EXPECT_EQ(rows[0], (std::vector<std::string>{"method", "param", "param_value", "seed", "metric", "value"}));
    EXPECT_EQ(rows.size(), 1u + 4);

    const auto two = scratch("plot_two");
    s.experiment.seeds = {4, 5};
    run_experiment(s, two);
    rows = rows_of(plot_data(two));
    EXPECT_EQ(rows.size(), 1u + 8 + 4);
    int means = 0;
    for (const auto& r : rows) means += r[3] == "_mean";
    EXPECT_EQ(means, 4);

    const auto out = two / "plot.csv";
    emit_plot_data(two, out);
    const auto first = slurp(out);
    emit_plot_data(two, out);
    EXPECT_EQ(slurp(out), first);
    EXPECT_EQ(first, plot_data(two));

    EXPECT_THROW(plot_data(scratch("plot_missing")), IoError);
    fs::remove_all(dir);
    fs::remove_all(two);
}

TEST(Evaluation, CheckpointReplay) {
    const auto dir = scratch("eval");
    auto s = small_settings();
    s.experiment.method = MethodId::hrcl;
    s.experiment.seeds = {2};
    run_experiment(s, dir);
    const auto out = dir / "replay";
    auto e = s;
    e.experiment.seed = 2;
    const auto r = run_evaluation(e, dir / "hrcl/seed_2/checkpoint.txt", out);
    EXPECT_EQ(slurp(out / "costs.csv").substr(slurp(out / "costs.csv").find('\n')),
              slurp(dir / "hrcl/seed_2/costs.csv").substr(slurp(dir / "hrcl/seed_2/costs.csv").find('\n')));
    EXPECT_EQ(r.periods.size(), 3u);
    EXPECT_EQ(key_of_error([&] { run_evaluation(e, dir / "nope.txt", out); }), "checkpoint");
    fs::remove_all(dir);
}

TEST(Oracle, EposNeverBeatsExhaustiveSearch) {
    const auto dir = scratch("oracle");
    auto s = small_settings();
    s.experiment.agents = 4;
    s.experiment.plans = 4;
    const auto r = run_oracle(s, dir);
    EXPECT_GE(r.epos_cost, r.oracle.cost - 1e-12);
    const auto rows = rows_of(slurp(dir / "oracle.csv"));
    EXPECT_EQ(rows[0][0], "solver");
    EXPECT_EQ(rows.size(), 3u);
    s.experiment.agents = 20;
    s.experiment.plans = 8;
    EXPECT_EQ(key_of_error([&] { run_oracle(s, dir); }), "plans");
    fs::remove_all(dir);
}

TEST(Generate, WritesDataset) {
    const auto dir = scratch("generate");
    const auto s = small_settings();
    run_generate(s, dir);
    EXPECT_TRUE(fs::exists(dir / "dataset.meta"));
    auto from = s;
    from.experiment.data_dir = dir;
    EXPECT_EQ(Scenario(from.experiment).dataset_hash(), Scenario(s.experiment).dataset_hash());
    fs::remove_all(dir);
}
