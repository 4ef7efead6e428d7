#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

const fs::path kRoot = fs::temp_directory_path() / "hrcl_cli_test";

int run(const std::string& args, const std::string& env = "") {
    const std::string cmd = env + " " HRCL_CLI_PATH " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string capture(const std::string& args) {
    const std::string cmd = HRCL_CLI_PATH " " + args + " 2>&1";
    std::string out;
    if (FILE* p = popen(cmd.c_str(), "r")) {
        char buf[4096];
        size_t n;
        while ((n = fread(buf, 1, sizeof buf, p)) > 0) out.append(buf, n);
        pclose(p);
    }
    return out;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const std::string kSmall =
    "--agents 4 --plans 4 --dim 4 --periods 3 --groups 2 --ranges 2 --iterations 5 --episodes 6 --batch 8 "
    "--hidden 8 --epochs 2 --minibatch 8 --seeds 1,2";

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        fs::remove_all(kRoot);
        fs::create_directories(kRoot);
    }
    void TearDown() override { fs::remove_all(kRoot); }
};

}  // namespace

TEST_F(Cli, HelpAndUsage) {
    EXPECT_EQ(run("--help"), 0);
    EXPECT_EQ(run("run --help"), 0);
    EXPECT_EQ(run(""), 2);
    EXPECT_EQ(run("frobnicate"), 2);
}

TEST_F(Cli, ConfigErrorsExitTwo) {
    EXPECT_EQ(run("run --agents 0 -o " + kRoot.string()), 2);
    EXPECT_EQ(run("run --method ppo -o " + kRoot.string()), 2);
    EXPECT_EQ(run("run --config /nonexistent.cfg -o " + kRoot.string()), 2);
    EXPECT_EQ(run("run --no-such-flag 1"), 2);
    EXPECT_EQ(run("sweep " + kSmall + " -o " + kRoot.string()), 2);
    EXPECT_EQ(run("train --method epos " + kSmall + " -o " + kRoot.string()), 2);
    const std::string msg = capture("run --agents 0 -o " + kRoot.string());
    EXPECT_NE(msg.find("config error"), std::string::npos);
    EXPECT_NE(msg.find("agents"), std::string::npos);
}

TEST_F(Cli, RuntimeFailureExitsThree) {
    EXPECT_EQ(run("plot-data " + (kRoot / "not-a-run").string()), 3);
    // output root is a regular file
    std::ofstream(kRoot / "file") << "x";
    EXPECT_EQ(run("run --method epos " + kSmall + " -o " + (kRoot / "file").string()), 3);
}

TEST_F(Cli, RunUsesEnvRootAndFlagsOverrideFile) {
    std::ofstream(kRoot / "exp.cfg") << "[experiment]\nname = demo\nmethod = epos\n[scenario]\nagents = 9\n";
    const std::string env = "HRCL_OUTPUT_ROOT=" + (kRoot / "env").string();
    ASSERT_EQ(run("run -c " + (kRoot / "exp.cfg").string() + " " + kSmall, env), 0);
    const auto manifest = slurp(kRoot / "env/demo/manifest.txt");
    EXPECT_NE(manifest.find("agents = 4"), std::string::npos);
    EXPECT_NE(manifest.find("method = epos"), std::string::npos);
    EXPECT_TRUE(fs::exists(kRoot / "env/demo/epos/seed_2/costs.csv"));

    // same run again: manifest kept; changed config into the same name: refused
    EXPECT_EQ(run("run -c " + (kRoot / "exp.cfg").string() + " " + kSmall, env), 0);
    EXPECT_EQ(run("run -c " + (kRoot / "exp.cfg").string() + " " + kSmall + " --iterations 6", env), 2);
}

TEST_F(Cli, AllSubcommands) {
    const std::string out = " -o " + kRoot.string();
    ASSERT_EQ(run("train --name t " + kSmall + out), 0);
    EXPECT_TRUE(fs::exists(kRoot / "t/hrcl/seed_1/checkpoint.txt"));
    EXPECT_EQ(run("eval --name t " + kSmall + " --checkpoint " + (kRoot / "t/hrcl/seed_1/checkpoint.txt").string() +
                  " --out " + (kRoot / "ev").string() + out),
              0);
    EXPECT_TRUE(fs::exists(kRoot / "ev/costs.csv"));
    EXPECT_EQ(run("eval " + kSmall + out), 2);  // --checkpoint is required

    EXPECT_EQ(run("generate --name g " + kSmall + " --out " + (kRoot / "data").string() + out), 0);
    EXPECT_TRUE(fs::exists(kRoot / "data/dataset.meta"));
    EXPECT_EQ(run("run --name fromdata --method epos " + kSmall + " --data_dir " + (kRoot / "data").string() + out), 0);

    EXPECT_EQ(run("oracle --name o " + kSmall + " --out " + (kRoot / "or").string() + out), 0);
    EXPECT_TRUE(fs::exists(kRoot / "or/oracle.csv"));

    ASSERT_EQ(run("sweep --name s --methods epos,epos-selfish " + kSmall +
                  " --sweep_param agents --sweep_values 2,4,8" + out),
              0);
    const auto summary = slurp(kRoot / "s/summary.csv");
    EXPECT_EQ(std::count(summary.begin(), summary.end(), '\n'), 1 + 6);

    EXPECT_EQ(run("plot-data " + (kRoot / "s").string() + " --out " + (kRoot / "plot.csv").string()), 0);
    EXPECT_EQ(slurp(kRoot / "plot.csv").rfind("method,param,param_value,seed,metric,value\n", 0), 0u);

    const std::string cfg = capture("config --agents 7 --approval joint");
    EXPECT_NE(cfg.find("agents = 7"), std::string::npos);
    EXPECT_NE(cfg.find("approval = joint"), std::string::npos);
}
