#pragma once

// Configuration files, experiment orchestration and CSV export.
//
// Config format: `key = value` lines grouped under `[section]` headers, `#` comments.
// Keys are unique across sections; a key may appear under any section header but is
// listed under its home section when a config is written back out.

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hrcl/baselines.hpp"
#include "hrcl/domain.hpp"

namespace hrcl {

inline constexpr const char* kOutputRootEnv = "HRCL_OUTPUT_ROOT";

/// Everything a run needs: the experiment plus orchestration keys.
struct RunSettings {
    ExperimentConfig experiment;
    std::string profile = "desk";
    std::string name;                   // run directory name; derived from the config when empty
    std::vector<MethodId> methods;      // empty: experiment.method only
    std::string sweep_param;            // a numeric config key, or empty
    std::vector<std::string> sweep_values;

    std::vector<MethodId> method_list() const;
};

struct ConfigKeyInfo {
    const char* name;
    const char* section;
    const char* help;
};

const std::vector<ConfigKeyInfo>& config_keys();

/// Resets `s` to the named profile ("desk" or "full").
void apply_profile(RunSettings& s, const std::string& profile);
/// Throws ConfigError naming `key` when the key is unknown or the value invalid.
void set_config_value(RunSettings& s, const std::string& key, const std::string& value);
std::string get_config_value(const RunSettings& s, const std::string& key);

/// Parses a config text on top of `base`. A `profile` key is applied before all other keys.
/// The informational `[manifest]` section of a manifest file is skipped.
RunSettings parse_config(std::string_view text, const RunSettings& base = {});
RunSettings load_config(const std::filesystem::path& path, const RunSettings& base = {});
/// Canonical text form, every key under its home section.
std::string format_config(const RunSettings& s);

/// Validates the experiment plus the orchestration keys.
void validate_settings(const RunSettings& s);

/// `explicit_root` if non-empty, else $HRCL_OUTPUT_ROOT, else "runs".
std::filesystem::path resolve_output_root(const std::string& explicit_root);
/// Run directory name: `name` when set, otherwise `<methods>-<scenario>-<hash of config>`.
std::string run_name(const RunSettings& s);

struct Manifest {
    std::string id;          // hash of the canonical config
    std::string config;      // canonical config text
    std::string dataset_hash;
    std::filesystem::path directory;
};

/// Writes `manifest.txt` once. An existing manifest with the same id is kept as is;
/// a different one raises ConfigError("manifest").
Manifest write_manifest(const RunSettings& s, const std::filesystem::path& dir);

struct SeedMetrics {
    MethodId method = MethodId::epos;
    std::string param;
    std::string param_value;
    std::uint64_t seed = 0;
    double mean_discomfort = 0.0;
    double inefficiency = 0.0;
    double combined = 0.0;
    double reward = 0.0;
};

struct RunReport {
    Manifest manifest;
    std::vector<SeedMetrics> per_seed;
};

/// Executes every (sweep point, method, seed) and writes
///   <dir>/manifest.txt, summary.csv, per_seed.csv
///   <dir>/<method>[/<param>=<value>]/seed_<s>/costs.csv, trace.csv[, curve.csv, losses.csv, checkpoint.txt]
RunReport run_experiment(const RunSettings& s, const std::filesystem::path& dir);

/// Greedy execution of a checkpoint on the configured scenario; writes costs.csv and trace.csv.
Rollout run_evaluation(const RunSettings& s, const std::filesystem::path& checkpoint, const std::filesystem::path& dir);

struct OracleReport {
    OracleResult oracle;
    EposResult epos;
    double epos_cost = 0.0;  // selection objective of the EPOS selections
};

/// EPOS versus exhaustive search on period 0 of the evaluation split with behavior `beta`
/// for every agent; writes oracle.csv.
OracleReport run_oracle(const RunSettings& s, const std::filesystem::path& dir);

/// Writes the dataset of the configured scenario.
void run_generate(const RunSettings& s, const std::filesystem::path& dir);

/// Reads <run_dir>/per_seed.csv and writes the long-format table
/// `method,param,param_value,seed,metric,value`, with `_mean` rows when a point has >= 2 seeds.
std::string plot_data(const std::filesystem::path& run_dir);
void emit_plot_data(const std::filesystem::path& run_dir, const std::filesystem::path& out);

std::string format_costs_csv(const Rollout& r);
std::string format_trace_csv(const Rollout& r);
std::string format_curve_csv(const std::vector<CurveRow>& curve);
std::string format_summary_csv(const std::vector<SeedMetrics>& rows);
std::string format_per_seed_csv(const std::vector<SeedMetrics>& rows);

}  // namespace hrcl
