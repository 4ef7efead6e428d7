// hrcl command-line front end. Talks to the library through the C interface only.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hrcl/hrcl.h"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct Options {
    std::string config_file;
    std::string output_root;
    std::string out;
    std::string checkpoint;
    std::string run_dir;
    std::map<std::string, std::string> flag_values;
};

int exit_code(hrcl_status st) {
    switch (st) {
        case HRCL_OK: return 0;
        case HRCL_CONFIG_ERROR:
        case HRCL_INVALID_ARGUMENT: return kExitConfig;
        default: return kExitRuntime;
    }
}

int report(hrcl_status st) {
    if (st != HRCL_OK) {
        std::cerr << "hrcl: " << (st == HRCL_RUNTIME_ERROR ? "error" : "config error") << ": " << hrcl_last_error()
                  << "\n";
    }
    return exit_code(st);
}

std::string fetch(hrcl_status (*fn)(const hrcl_config*, const char*, char*, size_t, size_t*), const hrcl_config* c,
                  const char* arg, hrcl_status& st) {
    size_t needed = 0;
    st = fn(c, arg, nullptr, 0, &needed);
    if (st != HRCL_OK) return {};
    std::string buf(needed, '\0');
    st = fn(c, arg, buf.data(), buf.size(), &needed);
    buf.resize(needed ? needed - 1 : 0);
    return buf;
}

void add_config_flags(CLI::App* cmd, Options& opt) {
    cmd->add_option("-c,--config", opt.config_file, "config file (key = value, [section] headers)");
    cmd->add_option("-o,--output", opt.output_root,
                    std::string("output root (default: $") + hrcl_output_root_env() + " or ./runs)");
    for (size_t i = 0; i < hrcl_config_key_count(); ++i) {
        const std::string name = hrcl_config_key_name(i);
        auto* o = cmd->add_option("--" + name, opt.flag_values[name], hrcl_config_key_help(i));
        o->group(std::string("[") + hrcl_config_key_section(i) + "]");
    }
}

struct ConfigDeleter {
    void operator()(hrcl_config* c) const { hrcl_config_free(c); }
};
using ConfigPtr = std::unique_ptr<hrcl_config, ConfigDeleter>;

// File first, then every flag given on the command line; profile keys of both go first.
hrcl_status build_config(const CLI::App* cmd, const Options& opt, ConfigPtr& out) {
    hrcl_config* raw = nullptr;
    if (auto st = hrcl_config_new(&raw); st != HRCL_OK) return st;
    out.reset(raw);
    std::string text;
    if (!opt.config_file.empty()) {
        std::ifstream in(opt.config_file, std::ios::binary);
        if (!in) return hrcl_config_load_file(raw, opt.config_file.c_str());
        std::ostringstream buf;
        buf << in.rdbuf();
        text = buf.str() + "\n[cli]\n";
    }
    for (size_t i = 0; i < hrcl_config_key_count(); ++i) {
        const std::string name = hrcl_config_key_name(i);
        if (cmd->count("--" + name) > 0) text += name + " = " + opt.flag_values.at(name) + "\n";
    }
    if (auto st = hrcl_config_parse(raw, text.c_str()); st != HRCL_OK) return st;
    return hrcl_config_validate(raw);
}

std::string run_dir_of(const hrcl_config* c, const Options& opt, hrcl_status& st) {
    return fetch(hrcl_resolve_run_dir, c, opt.output_root.c_str(), st);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"hrcl: hierarchical reinforcement and collective learning experiments"};
    app.require_subcommand(1);
    Options opt;

    auto* generate = app.add_subcommand("generate", "write the plan-set dataset of the configured scenario");
    auto* run = app.add_subcommand("run", "run the configured method(s) over all seeds");
    auto* train = app.add_subcommand("train", "train the configured learning method(s) over all seeds");
    auto* eval = app.add_subcommand("eval", "greedy evaluation of a checkpoint");
    auto* oracle = app.add_subcommand("oracle", "EPOS versus exhaustive search on one small instance");
    auto* sweep = app.add_subcommand("sweep", "run every method over sweep_param x sweep_values x seeds");
    auto* plot = app.add_subcommand("plot-data", "long-format metrics table of a completed run");
    auto* keys = app.add_subcommand("config", "print the effective configuration");

    for (auto* cmd : {generate, run, train, eval, oracle, sweep, keys}) add_config_flags(cmd, opt);
    for (auto* cmd : {generate, eval, oracle})
        cmd->add_option("--out", opt.out, "output directory (default: under the output root)");
    eval->add_option("--checkpoint", opt.checkpoint, "checkpoint.txt written by run/train")->required();
    plot->add_option("run_dir", opt.run_dir, "run directory")->required();
    plot->add_option("--out", opt.out, "output CSV (default: <run_dir>/plot_data.csv)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitConfig;
    }

    if (plot->parsed()) {
        const std::string out = opt.out.empty() ? (std::filesystem::path(opt.run_dir) / "plot_data.csv").string()
                                                : opt.out;
        const auto st = hrcl_plot_data(opt.run_dir.c_str(), out.c_str());
        if (st == HRCL_OK) std::cout << out << "\n";
        return report(st);
    }

    CLI::App* cmd = app.get_subcommands().front();
    ConfigPtr config;
    if (auto st = build_config(cmd, opt, config); st != HRCL_OK) return report(st);

    hrcl_status st = HRCL_OK;
    const std::string dir = run_dir_of(config.get(), opt, st);
    if (st != HRCL_OK) return report(st);
    const std::filesystem::path root = std::filesystem::path(dir).parent_path();
    const std::string name = std::filesystem::path(dir).filename().string();

    if (keys->parsed()) {
        hrcl_status s2 = HRCL_OK;
        size_t needed = 0;
        s2 = hrcl_config_dump(config.get(), nullptr, 0, &needed);
        std::string text(needed, '\0');
        if (s2 == HRCL_OK) s2 = hrcl_config_dump(config.get(), text.data(), text.size(), &needed);
        if (s2 == HRCL_OK) std::cout << text.c_str();
        return report(s2);
    }
    if (generate->parsed()) {
        const std::string out = opt.out.empty() ? (root / ("data-" + name)).string()
                                                : opt.out;
        st = hrcl_generate(config.get(), out.c_str());
        if (st == HRCL_OK) std::cout << out << "\n";
        return report(st);
    }
    if (eval->parsed()) {
        const std::string out = opt.out.empty() ? (root / ("eval-" + name)).string()
                                                : opt.out;
        double combined = 0.0;
        st = hrcl_eval(config.get(), opt.checkpoint.c_str(), out.c_str(), &combined);
        if (st == HRCL_OK) std::cout << out << "\nmean combined cost " << combined << "\n";
        return report(st);
    }
    if (oracle->parsed()) {
        const std::string out = opt.out.empty()
                                    ? (root / ("oracle-" + name)).string()
                                    : opt.out;
        double best = 0.0, epos = 0.0;
        st = hrcl_oracle(config.get(), out.c_str(), &best, &epos);
        if (st == HRCL_OK)
            std::cout << out << "\noracle cost " << best << "\nepos cost   " << epos << "\nrelative gap "
                      << (best != 0.0 ? (epos - best) / best : 0.0) << "\n";
        return report(st);
    }
    if (run->parsed()) st = hrcl_run(config.get(), dir.c_str());
    if (train->parsed()) st = hrcl_train(config.get(), dir.c_str());
    if (sweep->parsed()) st = hrcl_sweep(config.get(), dir.c_str());
    if (st == HRCL_OK) std::cout << dir << "\n";
    return report(st);
}
