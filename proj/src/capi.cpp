#include "hrcl/hrcl.h"

#include <algorithm>
#include <cstring>
#include <numeric>
#include <string>

#include "hrcl/epos.hpp"
#include "hrcl/error.hpp"
#include "hrcl/harness.hpp"
#include "hrcl/plangen.hpp"

struct hrcl_config {
    hrcl::RunSettings settings;
};

namespace {

thread_local std::string g_error;
thread_local std::string g_error_key;

hrcl_status fail(hrcl_status status, std::string message, std::string key = {}) {
    g_error = std::move(message);
    g_error_key = std::move(key);
    return status;
}

template <typename F>
hrcl_status guarded(F&& body) {
    try {
        body();
        return HRCL_OK;
    } catch (const hrcl::ConfigError& e) {
        return fail(HRCL_CONFIG_ERROR, e.what(), e.key());
    } catch (const hrcl::PreconditionError& e) {
        return fail(HRCL_INVALID_ARGUMENT, e.what());
    } catch (const hrcl::DimensionError& e) {
        return fail(HRCL_INVALID_ARGUMENT, e.what());
    } catch (const std::exception& e) {
        return fail(HRCL_RUNTIME_ERROR, e.what());
    } catch (...) {
        return fail(HRCL_RUNTIME_ERROR, "unknown error");
    }
}

hrcl_status copy_out(const std::string& s, char* buffer, std::size_t capacity, std::size_t* needed) {
    if (needed) *needed = s.size() + 1;
    if (!buffer && capacity == 0) return HRCL_OK;
    if (!buffer || capacity < s.size() + 1)
        return fail(HRCL_INVALID_ARGUMENT, "buffer too small: " + std::to_string(s.size() + 1) + " bytes needed");
    std::memcpy(buffer, s.c_str(), s.size() + 1);
    return HRCL_OK;
}

std::string str(const char* s) { return s ? s : ""; }

struct Problem {
    std::vector<hrcl::PlanSet> sets;
    std::vector<std::vector<std::size_t>> order;  // sorted position -> caller index
    hrcl::Target target;
    std::vector<hrcl::Behavior> behaviors;
    hrcl::EposOptions options;
};

Problem build_problem(std::size_t agents, std::size_t plans, std::size_t dim, const double* values,
                      const double* discomfort, const double* target, const double* betas,
                      const hrcl_epos_params* params) {
    if (!values || !discomfort || !target || !betas || !params)
        throw hrcl::PreconditionError("null input array");
    if (agents == 0 || plans == 0 || dim == 0) throw hrcl::PreconditionError("agents, plans and dim must be >= 1");
    if (params->approval < 0 || params->approval > 2) throw hrcl::PreconditionError("approval must be 0, 1 or 2");
    if (params->iterations < 1) throw hrcl::PreconditionError("iterations must be >= 1");
    Problem p;
    for (std::size_t u = 0; u < agents; ++u) {
        std::vector<std::size_t> idx(plans);
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        const double* dis = discomfort + u * plans;
        std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return dis[a] < dis[b]; });
        std::vector<hrcl::Plan> list;
        for (std::size_t k : idx) {
            const double* v = values + (u * plans + k) * dim;
            list.push_back({hrcl::Vector(v, v + dim), dis[k]});
        }
        p.sets.emplace_back(static_cast<int>(u), std::move(list));
        p.order.push_back(std::move(idx));
        p.behaviors.emplace_back(betas[u]);
    }
    p.target.values.assign(target, target + dim);
    auto& o = p.options;
    o.iterations = params->iterations;
    o.guard = params->guard != 0;
    o.approval = static_cast<hrcl::ApprovalMode>(params->approval);
    o.metric = params->variance ? hrcl::InefficiencyMetric::variance : hrcl::InefficiencyMetric::rmse;
    o.sigma1 = params->sigma1;
    o.sigma2 = params->sigma2;
    o.inefficiency_scale = hrcl::inefficiency_scale(o.metric, p.target, hrcl::Scenario::baseline(p.sets));
    return p;
}

hrcl_status need(const void* p, const char* what) {
    return p ? HRCL_OK : fail(HRCL_INVALID_ARGUMENT, std::string(what) + " is null");
}

#define HRCL_REQUIRE(p)                                       \
    do {                                                      \
        if (hrcl_status st_ = need((p), #p); st_ != HRCL_OK) \
            return st_;                                       \
    } while (0)

hrcl_status run_kind(const hrcl_config* config, const char* directory, int kind) {
    HRCL_REQUIRE(config);
    HRCL_REQUIRE(directory);
    return guarded([&] {
        const auto& s = config->settings;
        if (kind == 1) {
            for (auto m : s.method_list())
                if (!hrcl::is_learning_method(m))
                    throw hrcl::ConfigError(s.methods.empty() ? "method" : "methods",
                                            "train needs learning methods; '" + hrcl::to_string(m) +
                                                "' does not train a policy");
        }
        if (kind == 2 && s.sweep_param.empty()) throw hrcl::ConfigError("sweep_param", "sweep needs sweep_param");
        hrcl::run_experiment(s, directory);
    });
}

}  // namespace

extern "C" {

const char* hrcl_version(void) { return "1.0.0"; }
const char* hrcl_last_error(void) { return g_error.c_str(); }
const char* hrcl_last_error_key(void) { return g_error_key.c_str(); }
const char* hrcl_output_root_env(void) { return hrcl::kOutputRootEnv; }

hrcl_status hrcl_config_new(hrcl_config** out) {
    HRCL_REQUIRE(out);
    return guarded([&] { *out = new hrcl_config{}; });
}

void hrcl_config_free(hrcl_config* config) { delete config; }

hrcl_status hrcl_config_parse(hrcl_config* config, const char* text) {
    HRCL_REQUIRE(config);
    HRCL_REQUIRE(text);
    return guarded([&] { config->settings = hrcl::parse_config(text, config->settings); });
}

hrcl_status hrcl_config_load_file(hrcl_config* config, const char* path) {
    HRCL_REQUIRE(config);
    HRCL_REQUIRE(path);
    return guarded([&] { config->settings = hrcl::load_config(path, config->settings); });
}

hrcl_status hrcl_config_set(hrcl_config* config, const char* key, const char* value) {
    HRCL_REQUIRE(config);
    HRCL_REQUIRE(key);
    HRCL_REQUIRE(value);
    return guarded([&] { hrcl::set_config_value(config->settings, key, value); });
}

hrcl_status hrcl_config_get(const hrcl_config* config, const char* key, char* buffer, size_t capacity,
                            size_t* needed) {
    HRCL_REQUIRE(config);
    HRCL_REQUIRE(key);
    std::string value;
    if (auto st = guarded([&] { value = hrcl::get_config_value(config->settings, key); }); st != HRCL_OK) return st;
    return copy_out(value, buffer, capacity, needed);
}

hrcl_status hrcl_config_dump(const hrcl_config* config, char* buffer, size_t capacity, size_t* needed) {
    HRCL_REQUIRE(config);
    return copy_out(hrcl::format_config(config->settings), buffer, capacity, needed);
}

hrcl_status hrcl_config_validate(const hrcl_config* config) {
    HRCL_REQUIRE(config);
    return guarded([&] { hrcl::validate_settings(config->settings); });
}

size_t hrcl_config_key_count(void) { return hrcl::config_keys().size(); }

const char* hrcl_config_key_name(size_t index) {
    const auto& k = hrcl::config_keys();
    return index < k.size() ? k[index].name : nullptr;
}

const char* hrcl_config_key_section(size_t index) {
    const auto& k = hrcl::config_keys();
    return index < k.size() ? k[index].section : nullptr;
}

const char* hrcl_config_key_help(size_t index) {
    const auto& k = hrcl::config_keys();
    return index < k.size() ? k[index].help : nullptr;
}

hrcl_status hrcl_resolve_run_dir(const hrcl_config* config, const char* output_root, char* buffer, size_t capacity,
                                 size_t* needed) {
    HRCL_REQUIRE(config);
    std::string dir;
    if (auto st = guarded([&] {
            dir = (hrcl::resolve_output_root(str(output_root)) / hrcl::run_name(config->settings)).string();
        });
        st != HRCL_OK)
        return st;
    return copy_out(dir, buffer, capacity, needed);
}

hrcl_status hrcl_generate(const hrcl_config* config, const char* directory) {
    HRCL_REQUIRE(config);
    HRCL_REQUIRE(directory);
    return guarded([&] { hrcl::run_generate(config->settings, directory); });
}

hrcl_status hrcl_run(const hrcl_config* config, const char* directory) { return run_kind(config, directory, 0); }
hrcl_status hrcl_train(const hrcl_config* config, const char* directory) { return run_kind(config, directory, 1); }
hrcl_status hrcl_sweep(const hrcl_config* config, const char* directory) { return run_kind(config, directory, 2); }

hrcl_status hrcl_eval(const hrcl_config* config, const char* checkpoint, const char* directory,
                      double* mean_combined) {
    HRCL_REQUIRE(config);
    HRCL_REQUIRE(checkpoint);
    HRCL_REQUIRE(directory);
    return guarded([&] {
        const auto r = hrcl::run_evaluation(config->settings, checkpoint, directory);
        if (mean_combined) *mean_combined = r.summary.combined;
    });
}

hrcl_status hrcl_oracle(const hrcl_config* config, const char* directory, double* oracle_cost, double* epos_cost) {
    HRCL_REQUIRE(config);
    HRCL_REQUIRE(directory);
    return guarded([&] {
        const auto r = hrcl::run_oracle(config->settings, directory);
        if (oracle_cost) *oracle_cost = r.oracle.cost;
        if (epos_cost) *epos_cost = r.epos_cost;
    });
}

hrcl_status hrcl_plot_data(const char* run_directory, const char* output_path) {
    HRCL_REQUIRE(run_directory);
    HRCL_REQUIRE(output_path);
    return guarded([&] { hrcl::emit_plot_data(run_directory, output_path); });
}

void hrcl_epos_params_default(hrcl_epos_params* params) {
    if (!params) return;
    const hrcl::EposOptions o;
    params->iterations = o.iterations;
    params->guard = o.guard ? 1 : 0;
    params->approval = static_cast<int>(o.approval);
    params->variance = 0;
    params->sigma1 = o.sigma1;
    params->sigma2 = o.sigma2;
}

hrcl_status hrcl_epos_solve(size_t agents, size_t plans, size_t dim, const double* values, const double* discomfort,
                            const double* target, const double* betas, const hrcl_epos_params* params,
                            size_t* selections, double* trace, double* inefficiency) {
    HRCL_REQUIRE(selections);
    return guarded([&] {
        const Problem p = build_problem(agents, plans, dim, values, discomfort, target, betas, params);
        const auto r = hrcl::epos_run(p.sets, p.target, p.behaviors, {}, p.options);
        for (std::size_t u = 0; u < agents; ++u) selections[u] = p.order[u][r.selections[u].plan_index];
        if (trace) std::copy(r.inefficiency_trace.begin(), r.inefficiency_trace.end(), trace);
        if (inefficiency) *inefficiency = r.report.inefficiency;
    });
}

hrcl_status hrcl_oracle_solve(size_t agents, size_t plans, size_t dim, const double* values,
                              const double* discomfort, const double* target, const double* betas,
                              const hrcl_epos_params* params, size_t* selections, double* cost,
                              double* inefficiency) {
    HRCL_REQUIRE(selections);
    return guarded([&] {
        const Problem p = build_problem(agents, plans, dim, values, discomfort, target, betas, params);
        const auto r = hrcl::brute_force_oracle(p.sets, p.target, p.behaviors, p.options);
        for (std::size_t u = 0; u < agents; ++u) selections[u] = p.order[u][r.selections[u]];
        if (cost) *cost = r.cost;
        if (inefficiency) *inefficiency = r.inefficiency;
    });
}

}  // extern "C"
