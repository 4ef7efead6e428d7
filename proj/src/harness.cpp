#include "hrcl/harness.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "hrcl/error.hpp"
#include "hrcl/text.hpp"

namespace hrcl {

namespace fs = std::filesystem;

std::vector<MethodId> RunSettings::method_list() const {
    return methods.empty() ? std::vector<MethodId>{experiment.method} : methods;
}

// ---------------------------------------------------------------------------
// Key table

namespace {

struct KeyEntry {
    ConfigKeyInfo info;
    std::function<void(RunSettings&, const std::string&)> set;
    std::function<std::string(const RunSettings&)> get;
    bool numeric = false;
};

template <typename T>
T checked(const char* key, const std::function<T()>& f) {
    try {
        return f();
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError(key, e.what());
    }
}

KeyEntry int_key(const char* name, const char* section, const char* help, int ExperimentConfig::*field) {
    return {{name, section, help},
            [=](RunSettings& s, const std::string& v) {
                const long long x = checked<long long>(name, [&] { return text::parse_int(v); });
                if (x < INT32_MIN || x > INT32_MAX) throw ConfigError(name, "value out of range");
                s.experiment.*field = static_cast<int>(x);
            },
            [=](const RunSettings& s) { return std::to_string(s.experiment.*field); }, true};
}

KeyEntry real_key(const char* name, const char* section, const char* help, double ExperimentConfig::*field) {
    return {{name, section, help},
            [=](RunSettings& s, const std::string& v) {
                s.experiment.*field = checked<double>(name, [&] { return text::parse_double(v); });
            },
            [=](const RunSettings& s) { return text::format_double(s.experiment.*field); }, true};
}

KeyEntry bool_key(const char* name, const char* section, const char* help, bool ExperimentConfig::*field) {
    return {{name, section, help},
            [=](RunSettings& s, const std::string& v) {
                s.experiment.*field = checked<bool>(name, [&] { return text::parse_bool(v); });
            },
            [=](const RunSettings& s) { return std::string(s.experiment.*field ? "true" : "false"); }};
}

std::vector<std::string> split_list(const std::string& v) {
    std::vector<std::string> out;
    for (auto part : text::split(v, ',')) {
        const auto t = text::trim(part);
        if (!t.empty()) out.emplace_back(t);
    }
    return out;
}

template <typename T, typename F>
std::string join(const std::vector<T>& xs, F f) {
    std::string s;
    for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? "," : "") + f(xs[i]);
    return s;
}

const std::vector<KeyEntry>& entries() {
    using E = ExperimentConfig;
    static const std::vector<KeyEntry> table = [] {
        std::vector<KeyEntry> t;
        t.push_back({{"profile", "experiment", "defaults profile: desk or full (applied before other keys)"},
                     [](RunSettings& s, const std::string& v) { apply_profile(s, v); },
                     [](const RunSettings& s) { return s.profile; }});
        t.push_back({{"name", "experiment", "run directory name (default: derived from the config)"},
                     [](RunSettings& s, const std::string& v) { s.name = v; },
                     [](const RunSettings& s) { return s.name; }});
        t.push_back({{"scenario", "experiment", "synthetic or energy"},
                     [](RunSettings& s, const std::string& v) { s.experiment.scenario = parse_scenario(v); },
                     [](const RunSettings& s) { return to_string(s.experiment.scenario); }});
        t.push_back({{"method", "experiment", "epos, epos-selfish, epos-altruistic, epos-p, mappo, hrl, hrcl, hrcl-p, hrcl-b"},
                     [](RunSettings& s, const std::string& v) { s.experiment.method = parse_method(v); },
                     [](const RunSettings& s) { return to_string(s.experiment.method); }});
        t.push_back({{"methods", "experiment", "comma-separated methods for run/sweep (default: method)"},
                     [](RunSettings& s, const std::string& v) {
                         s.methods.clear();
                         for (const auto& m : split_list(v)) {
                             try {
                                 s.methods.push_back(parse_method(m));
                             } catch (const ConfigError& e) {
                                 throw ConfigError("methods", e.what());
                             }
                         }
                     },
                     [](const RunSettings& s) {
                         return join(s.methods, [](MethodId m) { return to_string(m); });
                     }});
        t.push_back({{"seed", "experiment", "base seed for generate, oracle and eval"},
                     [](RunSettings& s, const std::string& v) {
                         s.experiment.seed = checked<std::uint64_t>("seed", [&] { return text::parse_uint(v); });
                     },
                     [](const RunSettings& s) { return std::to_string(s.experiment.seed); }});
        t.push_back({{"seeds", "experiment", "comma-separated seeds of run/train/sweep"},
                     [](RunSettings& s, const std::string& v) {
                         s.experiment.seeds.clear();
                         for (const auto& x : split_list(v))
                             s.experiment.seeds.push_back(
                                 checked<std::uint64_t>("seeds", [&] { return text::parse_uint(x); }));
                     },
                     [](const RunSettings& s) {
                         return join(s.experiment.seeds, [](std::uint64_t x) { return std::to_string(x); });
                     }});
        t.push_back({{"data_dir", "experiment", "pre-generated dataset directory (optional)"},
                     [](RunSettings& s, const std::string& v) { s.experiment.data_dir = v; },
                     [](const RunSettings& s) { return s.experiment.data_dir.string(); }});

        t.push_back(int_key("agents", "scenario", "U, number of agents", &E::agents));
        t.push_back(int_key("plans", "scenario", "K, plans per agent", &E::plans));
        t.push_back(int_key("dim", "scenario", "D, plan length", &E::dim));
        t.push_back(int_key("periods", "scenario", "T, periods per episode", &E::periods));
        t.push_back(real_key("omega", "scenario", "angular frequency of the cosine target", &E::omega));
        t.push_back(real_key("amplitude", "scenario", "target amplitude; negative selects U * mean|v| / 2", &E::amplitude));

        t.push_back(int_key("groups", "strategy", "I, plan groups", &E::groups));
        t.push_back(int_key("ranges", "strategy", "M, behavior ranges", &E::ranges));
        t.push_back(real_key("beta", "strategy", "fixed behavior of epos and hrcl-p", &E::beta));

        t.push_back(int_key("iterations", "epos", "L, iterations per period", &E::iterations));
        t.push_back(bool_key("guard", "epos", "revert iterations that raise inefficiency", &E::guard));
        t.push_back({{"approval", "epos", "independent, sequential or joint"},
                     [](RunSettings& s, const std::string& v) { s.experiment.approval = parse_approval(v); },
                     [](const RunSettings& s) { return to_string(s.experiment.approval); }});

        t.push_back(real_key("sigma1", "costs", "weight of normalized discomfort", &E::sigma1));
        t.push_back(real_key("sigma2", "costs", "weight of normalized inefficiency", &E::sigma2));

        t.push_back(int_key("episodes", "training", "training episodes", &E::episodes));
        t.push_back(int_key("batch", "training", "H, transitions per agent per update", &E::batch));
        t.push_back(int_key("hidden", "training", "W, hidden units per layer", &E::hidden));
        t.push_back(int_key("epochs", "training", "passes over each batch", &E::epochs));
        t.push_back(int_key("minibatch", "training", "transitions per optimizer step", &E::minibatch));
        t.push_back(real_key("gamma", "training", "discount factor", &E::gamma));
        t.push_back(real_key("clip", "training", "PPO clip epsilon", &E::clip));
        t.push_back(real_key("lr", "training", "Adam step size", &E::learning_rate));
        t.push_back(real_key("entropy", "training", "entropy bonus coefficient", &E::entropy));
        t.push_back(bool_key("normalize_advantage", "training", "standardize advantages per minibatch (actor)",
                             &E::normalize_advantage));

        t.push_back({{"sweep_param", "sweep", "numeric key to sweep (empty: no sweep)"},
                     [](RunSettings& s, const std::string& v) { s.sweep_param = v; },
                     [](const RunSettings& s) { return s.sweep_param; }});
        t.push_back({{"sweep_values", "sweep", "comma-separated values of sweep_param"},
                     [](RunSettings& s, const std::string& v) { s.sweep_values = split_list(v); },
                     [](const RunSettings& s) { return join(s.sweep_values, [](const std::string& x) { return x; }); }});
        return t;
    }();
    return table;
}

const KeyEntry& entry(const std::string& key) {
    for (const auto& e : entries())
        if (key == e.info.name) return e;
    throw ConfigError(key, "unknown configuration key");
}

void write_text(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << content;
    if (!out) throw IoError("failed writing " + path.string());
}

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace

const std::vector<ConfigKeyInfo>& config_keys() {
    static const std::vector<ConfigKeyInfo> keys = [] {
        std::vector<ConfigKeyInfo> k;
        for (const auto& e : entries()) k.push_back(e.info);
        return k;
    }();
    return keys;
}

void apply_profile(RunSettings& s, const std::string& profile) {
    RunSettings fresh;
    if (profile == "desk") {
        // defaults
    } else if (profile == "full") {
        auto& e = fresh.experiment;
        e.agents = 40;
        e.plans = 16;
        e.dim = 100;
        e.periods = 16;
        e.groups = 4;
        e.ranges = 4;
        e.episodes = 2000;
    } else {
        throw ConfigError("profile", "unknown profile '" + profile + "' (desk or full)");
    }
    fresh.profile = profile;
    s = std::move(fresh);
}

void set_config_value(RunSettings& s, const std::string& key, const std::string& value) {
    entry(key).set(s, value);
}

std::string get_config_value(const RunSettings& s, const std::string& key) { return entry(key).get(s); }

RunSettings parse_config(std::string_view text, const RunSettings& base) {
    struct Line {
        std::string key, value;
    };
    std::vector<Line> lines;
    std::string section;
    std::size_t lineno = 0;
    for (auto raw : text::split(text, '\n')) {
        ++lineno;
        auto line = text::trim(raw);
        if (line.empty() || line.front() == '#' || line.front() == ';') continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError("", "line " + std::to_string(lineno) + ": malformed section header");
            section = std::string(text::trim(line.substr(1, line.size() - 2)));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError("", "line " + std::to_string(lineno) + ": expected key = value");
        if (section == "manifest") continue;
        lines.push_back({std::string(text::trim(line.substr(0, eq))), std::string(text::trim(line.substr(eq + 1)))});
    }
    RunSettings s = base;
    for (const auto& l : lines)
        if (l.key == "profile") set_config_value(s, l.key, l.value);
    for (const auto& l : lines)
        if (l.key != "profile") set_config_value(s, l.key, l.value);
    return s;
}

RunSettings load_config(const fs::path& path, const RunSettings& base) {
    std::string content;
    try {
        content = read_text(path);
    } catch (const IoError& e) {
        throw ConfigError("config", e.what());
    }
    return parse_config(content, base);
}

std::string format_config(const RunSettings& s) {
    std::string out;
    std::string section;
    for (const auto& e : entries()) {
        if (section != e.info.section) {
            section = e.info.section;
            out += (out.empty() ? "[" : "\n[") + section + "]\n";
        }
        out += std::string(e.info.name) + " = " + e.get(s) + "\n";
    }
    return out;
}

void validate_settings(const RunSettings& s) {
    s.experiment.validate();
    if (!s.sweep_param.empty()) {
        const auto& e = entry(s.sweep_param);
        if (!e.numeric) throw ConfigError("sweep_param", "'" + s.sweep_param + "' is not a numeric key");
        if (s.sweep_values.empty()) throw ConfigError("sweep_values", "sweep needs at least one value");
        for (const auto& v : s.sweep_values) {
            RunSettings probe = s;
            set_config_value(probe, s.sweep_param, v);
            try {
                probe.experiment.validate();
            } catch (const ConfigError& err) {
                throw ConfigError("sweep_values", s.sweep_param + "=" + v + ": " + err.what());
            }
        }
    } else if (!s.sweep_values.empty()) {
        throw ConfigError("sweep_param", "sweep_values given without sweep_param");
    }
}

fs::path resolve_output_root(const std::string& explicit_root) {
    if (!explicit_root.empty()) return explicit_root;
    if (const char* env = std::getenv(kOutputRootEnv); env && *env) return env;
    return "runs";
}

namespace {

std::string config_id(const RunSettings& s) { return text::hex64(text::fnv1a(format_config(s))); }

std::string utc_now() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

struct Point {
    std::string param = "none";
    std::string value = "none";
    RunSettings settings;
};

std::vector<Point> sweep_points(const RunSettings& s) {
    if (s.sweep_param.empty()) return {{"none", "none", s}};
    std::vector<Point> pts;
    for (const auto& v : s.sweep_values) {
        Point p{s.sweep_param, v, s};
        set_config_value(p.settings, s.sweep_param, v);
        p.value = get_config_value(p.settings, s.sweep_param);
        pts.push_back(std::move(p));
    }
    return pts;
}

std::string combined_dataset_hash(const RunSettings& s) {
    std::uint64_t h = text::fnv1a("hrcl-datasets");
    for (const auto& p : sweep_points(s)) {
        for (std::uint64_t seed : s.experiment.seeds) {
            ExperimentConfig c = p.settings.experiment;
            c.seed = seed;
            h = text::fnv1a(Scenario(c).dataset_hash(), h);
        }
    }
    return text::hex64(h);
}

std::string manifest_value(const std::string& content, const std::string& key) {
    bool in = false;
    for (auto raw : text::split(content, '\n')) {
        const auto line = text::trim(raw);
        if (!line.empty() && line.front() == '[') {
            in = line == "[manifest]";
            continue;
        }
        if (!in) continue;
        const auto eq = line.find('=');
        if (eq != std::string_view::npos && text::trim(line.substr(0, eq)) == key)
            return std::string(text::trim(line.substr(eq + 1)));
    }
    return {};
}

}  // namespace

std::string run_name(const RunSettings& s) {
    if (!s.name.empty()) return s.name;
    const auto methods = join(s.method_list(), [](MethodId m) { return to_string(m); });
    std::string n;
    for (char c : methods) n += c == ',' ? '+' : c;
    return n + "-" + to_string(s.experiment.scenario) + "-" + config_id(s).substr(0, 8);
}

Manifest write_manifest(const RunSettings& s, const fs::path& dir) {
    Manifest m;
    m.id = config_id(s);
    m.config = format_config(s);
    m.directory = dir;
    const fs::path path = dir / "manifest.txt";
    if (fs::exists(path)) {
        const std::string existing = read_text(path);
        const std::string id = manifest_value(existing, "id");
        if (id != m.id)
            throw ConfigError("manifest", path.string() + " belongs to a different configuration (id " + id +
                                              "); choose another run name or output root");
        m.dataset_hash = manifest_value(existing, "dataset_hash");
        return m;
    }
    m.dataset_hash = combined_dataset_hash(s);
    fs::create_directories(dir);
    std::string out = "# hrcl run manifest (write-once). Re-run with: hrcl run --config manifest.txt\n";
    out += "[manifest]\n";
    out += "id = " + m.id + "\n";
    out += "dataset_hash = " + m.dataset_hash + "\n";
    out += "methods = " + join(s.method_list(), [](MethodId x) { return to_string(x); }) + "\n";
    out += "seeds = " + join(s.experiment.seeds, [](std::uint64_t x) { return std::to_string(x); }) + "\n";
    out += "output = " + dir.string() + "\n";
    out += "created = " + utc_now() + "\n\n";
    out += m.config;
    write_text(path, out);
    return m;
}

// ---------------------------------------------------------------------------
// CSV

std::string format_costs_csv(const Rollout& r) {
    std::string s = "episode,period,mean_discomfort,inefficiency,combined,reward\n";
    for (const auto& p : r.periods) {
        s += std::to_string(p.episode) + "," + std::to_string(p.period) + "," +
             text::format_double(p.report.mean_discomfort) + "," + text::format_double(p.report.inefficiency) + "," +
             text::format_double(p.report.combined) + "," + text::format_double(p.reward) + "\n";
    }
    return s;
}

std::string format_trace_csv(const Rollout& r) {
    std::string s = "period,iteration,inefficiency,combined\n";
    for (const auto& t : r.trace)
        s += std::to_string(t.period) + "," + std::to_string(t.iteration) + "," + text::format_double(t.inefficiency) +
             "," + text::format_double(t.combined) + "\n";
    return s;
}

std::string format_curve_csv(const std::vector<CurveRow>& curve) {
    std::string s = "episode,mean_reward,mean_discomfort,inefficiency,combined\n";
    for (const auto& c : curve)
        s += std::to_string(c.episode) + "," + text::format_double(c.mean_reward) + "," +
             text::format_double(c.mean_discomfort) + "," + text::format_double(c.inefficiency) + "," +
             text::format_double(c.combined) + "\n";
    return s;
}

namespace {

std::string format_losses_csv(const std::vector<LossReport>& losses) {
    std::string s = "update,actor_loss,critic_loss,surrogate,entropy,max_initial_ratio_deviation,samples,steps\n";
    for (std::size_t i = 0; i < losses.size(); ++i) {
        const auto& l = losses[i];
        s += std::to_string(i) + "," + text::format_double(l.actor_loss) + "," + text::format_double(l.critic_loss) +
             "," + text::format_double(l.surrogate) + "," + text::format_double(l.entropy) + "," +
             text::format_double(l.max_initial_ratio_deviation) + "," + std::to_string(l.samples) + "," +
             std::to_string(l.steps) + "\n";
    }
    return s;
}

constexpr const char* kMetricNames[] = {"mean_discomfort", "inefficiency", "combined", "reward"};

double metric_of(const SeedMetrics& m, int i) {
    switch (i) {
        case 0: return m.mean_discomfort;
        case 1: return m.inefficiency;
        case 2: return m.combined;
        default: return m.reward;
    }
}

// Groups rows by (method, param, value) in first-appearance order.
std::vector<std::vector<const SeedMetrics*>> group_points(const std::vector<SeedMetrics>& rows) {
    std::vector<std::vector<const SeedMetrics*>> groups;
    for (const auto& r : rows) {
        bool placed = false;
        for (auto& g : groups) {
            if (g.front()->method == r.method && g.front()->param == r.param && g.front()->param_value == r.param_value) {
                g.push_back(&r);
                placed = true;
                break;
            }
        }
        if (!placed) groups.push_back({&r});
    }
    return groups;
}

}  // namespace

std::string format_summary_csv(const std::vector<SeedMetrics>& rows) {
    std::string s = "method,param,param_value,seeds";
    for (const char* m : kMetricNames) s += std::string(",") + m + "," + m + "_se";
    s += "\n";
    for (const auto& g : group_points(rows)) {
        const auto n = static_cast<double>(g.size());
        s += to_string(g.front()->method) + "," + g.front()->param + "," + g.front()->param_value + "," +
             std::to_string(g.size());
        for (int i = 0; i < 4; ++i) {
            double total = 0.0;
            for (const auto* r : g) total += metric_of(*r, i);
            const double mean = total / n;
            double se = 0.0;
            if (g.size() > 1) {
                double ss = 0.0;
                for (const auto* r : g) ss += (metric_of(*r, i) - mean) * (metric_of(*r, i) - mean);
                se = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
            }
            s += "," + text::format_double(mean) + "," + text::format_double(se);
        }
        s += "\n";
    }
    return s;
}

std::string format_per_seed_csv(const std::vector<SeedMetrics>& rows) {
    std::string s = "method,param,param_value,seed";
    for (const char* m : kMetricNames) s += std::string(",") + m;
    s += "\n";
    for (const auto& r : rows) {
        s += to_string(r.method) + "," + r.param + "," + r.param_value + "," + std::to_string(r.seed);
        for (int i = 0; i < 4; ++i) s += "," + text::format_double(metric_of(r, i));
        s += "\n";
    }
    return s;
}

// ---------------------------------------------------------------------------
// Orchestration

RunReport run_experiment(const RunSettings& s, const fs::path& dir) {
    validate_settings(s);
    RunReport report;
    report.manifest = write_manifest(s, dir);
    for (const auto& point : sweep_points(s)) {
        for (MethodId method : s.method_list()) {
            for (std::uint64_t seed : s.experiment.seeds) {
                ExperimentConfig c = point.settings.experiment;
                c.method = method;
                c.seed = seed;
                const Scenario scenario(c);
                const MethodRun run = run_method(scenario, c);

                fs::path out = dir / to_string(method);
                if (point.param != "none") out /= point.param + "=" + point.value;
                out /= "seed_" + std::to_string(seed);
                fs::create_directories(out);
                write_text(out / "costs.csv", format_costs_csv(run.evaluation));
                write_text(out / "trace.csv", format_trace_csv(run.evaluation));
                if (run.spec.learning()) {
                    write_text(out / "curve.csv", format_curve_csv(run.curve));
                    write_text(out / "losses.csv", format_losses_csv(run.losses));
                    save_checkpoint((out / "checkpoint.txt").string(), *run.checkpoint);
                }
                const auto& sum = run.evaluation.summary;
                report.per_seed.push_back({method, point.param, point.value, seed, sum.mean_discomfort,
                                           sum.inefficiency, sum.combined, sum.mean_reward});
            }
        }
    }
    write_text(dir / "per_seed.csv", format_per_seed_csv(report.per_seed));
    write_text(dir / "summary.csv", format_summary_csv(report.per_seed));
    return report;
}

Rollout run_evaluation(const RunSettings& s, const fs::path& checkpoint, const fs::path& dir) {
    Checkpoint ckpt;
    try {
        ckpt = load_checkpoint(checkpoint.string());
    } catch (const IoError& e) {
        throw ConfigError("checkpoint", e.what());
    }
    ExperimentConfig c = s.experiment;
    c.method = parse_method(ckpt.value("method"));
    c.validate();
    const Scenario scenario(c);
    const MethodSpec spec = method_spec(c);
    if (!spec.learning()) throw ConfigError("checkpoint", "checkpoint method does not use a policy");
    Rollout r = execute(ckpt, scenario, c, spec.layout);
    fs::create_directories(dir);
    write_text(dir / "costs.csv", format_costs_csv(r));
    write_text(dir / "trace.csv", format_trace_csv(r));
    return r;
}

OracleReport run_oracle(const RunSettings& s, const fs::path& dir) {
    const ExperimentConfig& c = s.experiment;
    c.validate();
    const Scenario scenario(c);
    const auto sets = scenario.plansets(Split::eval, 0, 0, 1);
    const Target target = scenario.initial_target();
    EposOptions opt;
    opt.iterations = c.iterations;
    opt.guard = c.guard;
    opt.approval = c.approval;
    opt.metric = scenario.metric();
    opt.sigma1 = c.sigma1;
    opt.sigma2 = c.sigma2;
    opt.inefficiency_scale = inefficiency_scale(opt.metric, target, Scenario::baseline(sets));
    const std::vector<Behavior> behaviors(sets.size(), Behavior(c.beta));

    double combos = 1.0;
    for (const auto& set : sets) combos *= static_cast<double>(set.size());
    if (combos > kOracleLimit)
        throw ConfigError("plans", "oracle instance has more than 1e6 combinations; reduce agents or plans");

    OracleReport r;
    r.oracle = brute_force_oracle(sets, target, behaviors, opt);
    r.epos = epos_run(sets, target, behaviors, {}, opt);
    std::vector<std::size_t> sel;
    for (const auto& x : r.epos.selections) sel.push_back(x.plan_index);
    r.epos_cost = selection_objective(sets, sel, target, behaviors, opt);

    const auto joined = [](const std::vector<std::size_t>& v) {
        return join(v, [](std::size_t x) { return std::to_string(x); });
    };
    std::string csv = "solver,cost,inefficiency,selections\n";
    csv += "oracle," + text::format_double(r.oracle.cost) + "," + text::format_double(r.oracle.inefficiency) + ",\"" +
           joined(r.oracle.selections) + "\"\n";
    csv += "epos," + text::format_double(r.epos_cost) + "," + text::format_double(r.epos.report.inefficiency) +
           ",\"" + joined(sel) + "\"\n";
    fs::create_directories(dir);
    write_text(dir / "oracle.csv", csv);
    return r;
}

void run_generate(const RunSettings& s, const fs::path& dir) {
    s.experiment.validate();
    ExperimentConfig c = s.experiment;
    c.data_dir.clear();
    Scenario(c).write_dataset(dir);
}

// ---------------------------------------------------------------------------
// Plot data

std::string plot_data(const fs::path& run_dir) {
    const fs::path path = run_dir / "per_seed.csv";
    if (!fs::exists(path)) throw IoError("missing " + path.string() + " (not a completed run directory)");
    const std::string content = read_text(path);
    std::vector<SeedMetrics> rows;
    bool header = true;
    for (auto raw : text::split(content, '\n')) {
        const auto line = text::trim(raw);
        if (line.empty()) continue;
        if (header) {
            header = false;
            continue;
        }
        const auto f = text::split(line, ',');
        if (f.size() != 8) throw IoError("per_seed.csv: malformed row '" + std::string(line) + "'");
        SeedMetrics m;
        m.method = parse_method(std::string(f[0]));
        m.param = std::string(f[1]);
        m.param_value = std::string(f[2]);
        m.seed = text::parse_uint(f[3]);
        m.mean_discomfort = text::parse_double(f[4]);
        m.inefficiency = text::parse_double(f[5]);
        m.combined = text::parse_double(f[6]);
        m.reward = text::parse_double(f[7]);
        rows.push_back(m);
    }
    std::string out = "method,param,param_value,seed,metric,value\n";
    for (const auto& g : group_points(rows)) {
        const std::string prefix = to_string(g.front()->method) + "," + g.front()->param + "," + g.front()->param_value;
        for (const auto* r : g)
            for (int i = 0; i < 4; ++i)
                out += prefix + "," + std::to_string(r->seed) + "," + kMetricNames[i] + "," +
                       text::format_double(metric_of(*r, i)) + "\n";
        if (g.size() >= 2) {
            for (int i = 0; i < 4; ++i) {
                double total = 0.0;
                for (const auto* r : g) total += metric_of(*r, i);
                out += prefix + ",_mean," + kMetricNames[i] + "," +
                       text::format_double(total / static_cast<double>(g.size())) + "\n";
            }
        }
    }
    return out;
}

void emit_plot_data(const fs::path& run_dir, const fs::path& out) {
    const std::string data = plot_data(run_dir);
    if (out.has_parent_path()) fs::create_directories(out.parent_path());
    write_text(out, data);
}

}  // namespace hrcl
