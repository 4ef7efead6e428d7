#include "hrcl/plangen.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

#include "hrcl/error.hpp"
#include "hrcl/rng.hpp"
#include "hrcl/text.hpp"

namespace hrcl {

namespace {

// Stream tags keep the training and evaluation draws apart.
constexpr std::uint64_t kTrainStream = 0x7472'6169'6eULL;
constexpr std::uint64_t kEvalStream = 0x6576'616cULL;
constexpr std::size_t kPoolFactor = 5;  // 4 parts training, 1 part evaluation

std::vector<Plan> with_linear_discomfort(std::vector<Vector> values) {
    std::vector<Plan> plans;
    plans.reserve(values.size());
    const std::size_t k = values.size();
    for (std::size_t i = 0; i < k; ++i) {
        const double cost = k > 1 ? static_cast<double>(i) / static_cast<double>(k - 1) : 0.0;
        plans.push_back({std::move(values[i]), cost});
    }
    return plans;
}

std::map<std::string, std::string> read_meta(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read " + path.string());
    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(in, line)) {
        auto view = text::trim(line);
        if (view.empty() || view.front() == '#') continue;
        const auto eq = view.find('=');
        if (eq == std::string_view::npos) throw IoError("dataset.meta: malformed line '" + line + "'");
        kv.emplace(std::string(text::trim(view.substr(0, eq))), std::string(text::trim(view.substr(eq + 1))));
    }
    return kv;
}

}  // namespace

PlanSet generate_synthetic_planset(const SyntheticSpec& spec, int agent_id) {
    if (spec.plans < 1 || spec.dim < 1) throw PreconditionError("synthetic spec needs K >= 1 and D >= 1");
    Xoshiro256 rng(derive_seed(spec.seed, {static_cast<std::uint64_t>(agent_id)}));
    std::vector<Vector> values(spec.plans, Vector(spec.dim));
    for (auto& v : values)
        for (auto& x : v) x = rng.normal();
    return PlanSet(agent_id, with_linear_discomfort(std::move(values)), spec.groups);
}

std::vector<int> default_shift_offsets(std::size_t count) {
    static constexpr int kOffsets[] = {75, -75, 150, -150, 720, -720, 225, -225, 300, -300};
    if (count > std::size(kOffsets)) throw PreconditionError("at most 10 default shift offsets");
    return {std::begin(kOffsets), std::begin(kOffsets) + static_cast<std::ptrdiff_t>(count)};
}

PlanSet generate_loadshift_planset(const LoadShiftSpec& spec, int agent_id) {
    if (spec.base.empty()) throw PreconditionError("load-shift base profile is empty");
    if (spec.resolution_minutes <= 0) throw PreconditionError("resolution must be positive");
    const auto dim = static_cast<std::ptrdiff_t>(spec.base.size());
    std::vector<Plan> plans;
    plans.push_back({spec.base, 0.0});
    for (int offset : spec.offsets_minutes) {
        if (offset % spec.resolution_minutes != 0)
            throw PreconditionError("shift of " + std::to_string(offset) + " min is not a multiple of " +
                                    std::to_string(spec.resolution_minutes) + " min");
        const std::ptrdiff_t shift = offset / spec.resolution_minutes;
        Vector shifted(spec.base.size());
        for (std::ptrdiff_t d = 0; d < dim; ++d) {
            const std::ptrdiff_t src = (((d - shift) % dim) + dim) % dim;
            shifted[static_cast<std::size_t>(d)] = spec.base[static_cast<std::size_t>(src)];
        }
        plans.push_back({std::move(shifted), static_cast<double>(std::abs(offset))});
    }
    return PlanSet(agent_id, std::move(plans), spec.groups);
}

Vector synthetic_demand_profile(std::uint64_t stream_seed, std::size_t dim) {
    Xoshiro256 rng(stream_seed);
    const double n = static_cast<double>(dim);
    const double base = rng.uniform(0.2, 0.6);
    // Window starts at 10:00; 13:00 and 19:00 sit at 25% and 75% of a 12 h span.
    const double midday_at = n * 0.25 + rng.uniform(-0.08, 0.08) * n;
    const double evening_at = n * 0.75 + rng.uniform(-0.08, 0.08) * n;
    const double midday_amp = rng.uniform(0.3, 1.5);
    const double evening_amp = rng.uniform(0.8, 2.5);
    const double midday_width = rng.uniform(0.04, 0.12) * n;
    const double evening_width = rng.uniform(0.04, 0.12) * n;

    Vector profile(dim);
    for (std::size_t d = 0; d < dim; ++d) {
        const double x = static_cast<double>(d);
        const double a = (x - midday_at) / midday_width;
        const double b = (x - evening_at) / evening_width;
        profile[d] = base + midday_amp * std::exp(-0.5 * a * a) + evening_amp * std::exp(-0.5 * b * b);
    }
    const auto pulses = 1 + rng.below(3);
    for (std::uint64_t p = 0; p < pulses; ++p) {
        const double height = rng.uniform(1.0, 3.0);
        const auto len = static_cast<std::size_t>(std::max(1.0, std::round(rng.uniform(0.02, 0.08) * n)));
        const auto start = static_cast<std::size_t>(rng.below(dim));
        for (std::size_t i = 0; i < len && start + i < dim; ++i) profile[start + i] += height;
    }
    for (auto& v : profile) v = std::max(0.0, v + 0.05 * rng.normal());
    return profile;
}

Target cosine_target(const CosineTargetSpec& spec) {
    if (!(spec.omega > 0.0)) throw PreconditionError("omega must be positive");
    Target t{Vector(spec.dim), 0};
    for (std::size_t d = 0; d < spec.dim; ++d)
        t.values[d] = spec.amplitude * std::cos(spec.omega * static_cast<double>(d));
    return t;
}

Target update_target(const Target& previous, const GlobalPlan& global) {
    require_same_dim(previous.dim(), global.dim(), "update_target");
    Target next{previous.values, previous.period + 1};
    for (std::size_t d = 0; d < next.dim(); ++d) next.values[d] -= global.values[d];
    return next;
}

double default_amplitude(const std::vector<PlanSet>& sets) {
    if (sets.empty()) return 0.0;
    double total = 0.0;
    for (const auto& s : sets) {
        double abs_sum = 0.0;
        std::size_t count = 0;
        for (const auto& p : s.plans()) {
            for (double v : p.values) abs_sum += std::abs(v);
            count += p.dim();
        }
        total += abs_sum / static_cast<double>(count);
    }
    const double mean_abs = total / static_cast<double>(sets.size());
    return static_cast<double>(sets.size()) * mean_abs * 0.5;
}

// ---------------------------------------------------------------------------
// Scenario

Scenario::Scenario(const ExperimentConfig& config)
    : kind_(config.scenario),
      agents_(config.agents),
      plans_(config.plans),
      dim_(config.dim),
      periods_(config.periods),
      seed_(config.seed),
      omega_(config.omega) {
    if (!config.data_dir.empty()) {
        const auto meta = read_meta(config.data_dir / "dataset.meta");
        auto check = [&](const char* key, long long expected) {
            auto it = meta.find(key);
            if (it == meta.end()) throw ConfigError("data_dir", std::string("dataset.meta lacks '") + key + "'");
            if (text::parse_int(it->second) != expected)
                throw ConfigError("data_dir", std::string("dataset ") + key + "=" + it->second +
                                                  " does not match configuration (" + std::to_string(expected) + ")");
        };
        check("U", agents_);
        check("K", plans_);
        check("D", dim_);
        dataset_.reserve(static_cast<std::size_t>(agents_));
        for (int u = 0; u < agents_; ++u) dataset_.push_back(read_planset_file(config.data_dir, u));
        if (auto it = meta.find("scenario"); it != meta.end()) kind_ = parse_scenario(it->second);
        if (auto it = meta.find("seed"); it != meta.end()) seed_ = text::parse_uint(it->second);
    } else if (kind_ == ScenarioKind::synthetic) {
        pools_.reserve(static_cast<std::size_t>(agents_));
        const SyntheticSpec pool_spec{static_cast<std::size_t>(plans_) * kPoolFactor,
                                      static_cast<std::size_t>(dim_), seed_, 1};
        for (int u = 0; u < agents_; ++u) {
            const PlanSet pool = generate_synthetic_planset(pool_spec, u);
            std::vector<Vector> vectors;
            vectors.reserve(pool.size());
            for (const auto& p : pool.plans()) vectors.push_back(p.values);
            pools_.push_back(std::move(vectors));
        }
    } else {
        if (plans_ > 11) throw ConfigError("plans", "the energy scenario supports at most 11 plans");
        offsets_ = default_shift_offsets(static_cast<std::size_t>(plans_ - 1));
    }

    if (kind_ == ScenarioKind::synthetic) {
        amplitude_ = config.amplitude >= 0.0 ? config.amplitude : default_amplitude(plansets(Split::eval, 0, 0, 1));
    }
}

std::string Scenario::generator_name() const { return std::string(Xoshiro256::name) + "+box-muller"; }

PlanSet Scenario::planset(Split split, int episode, int period, int agent, std::size_t groups) const {
    if (agent < 0 || agent >= agents_) throw PreconditionError("agent id out of range");
    if (!dataset_.empty()) return dataset_[static_cast<std::size_t>(agent)].regrouped(groups);
    if (kind_ == ScenarioKind::synthetic) return synthetic_planset(split, episode, period, agent, groups);
    return energy_planset(split, episode, period, agent, groups);
}

std::vector<PlanSet> Scenario::plansets(Split split, int episode, int period, std::size_t groups) const {
    std::vector<PlanSet> sets;
    sets.reserve(static_cast<std::size_t>(agents_));
    for (int u = 0; u < agents_; ++u) sets.push_back(planset(split, episode, period, u, groups));
    return sets;
}

PlanSet Scenario::synthetic_planset(Split split, int episode, int period, int agent, std::size_t groups) const {
    const auto& pool = pools_[static_cast<std::size_t>(agent)];
    const auto k = static_cast<std::size_t>(plans_);
    std::vector<Vector> chosen;
    chosen.reserve(k);
    if (split == Split::eval) {
        // Every fifth pool entry is held out for evaluation.
        for (std::size_t n = kPoolFactor - 1; n < pool.size(); n += kPoolFactor) chosen.push_back(pool[n]);
    } else {
        std::vector<std::size_t> train;
        train.reserve(pool.size());
        for (std::size_t n = 0; n < pool.size(); ++n)
            if (n % kPoolFactor != kPoolFactor - 1) train.push_back(n);
        Xoshiro256 rng(derive_seed(seed_, {static_cast<std::uint64_t>(agent), kTrainStream,
                                           static_cast<std::uint64_t>(episode), static_cast<std::uint64_t>(period)}));
        for (std::size_t i = 0; i < k; ++i) {
            const auto j = i + static_cast<std::size_t>(rng.below(train.size() - i));
            std::swap(train[i], train[j]);
            chosen.push_back(pool[train[i]]);
        }
    }
    return PlanSet(agent, with_linear_discomfort(std::move(chosen)), groups);
}

PlanSet Scenario::energy_planset(Split split, int episode, int period, int agent, std::size_t groups) const {
    const std::uint64_t stream =
        split == Split::eval
            ? derive_seed(seed_, {static_cast<std::uint64_t>(agent), kEvalStream, static_cast<std::uint64_t>(period)})
            : derive_seed(seed_, {static_cast<std::uint64_t>(agent), kTrainStream, static_cast<std::uint64_t>(episode),
                                  static_cast<std::uint64_t>(period)});
    LoadShiftSpec spec{synthetic_demand_profile(stream, static_cast<std::size_t>(dim_)), offsets_, 5, groups};
    return generate_loadshift_planset(spec, agent);
}

Target Scenario::initial_target() const {
    if (kind_ == ScenarioKind::energy) return Target{Vector(static_cast<std::size_t>(dim_), 0.0), 0};
    return cosine_target({amplitude_, omega_, static_cast<std::size_t>(dim_)});
}

Target Scenario::next_target(const Target& target, const GlobalPlan& global) const {
    if (kind_ == ScenarioKind::energy) return Target{target.values, target.period + 1};
    return update_target(target, global);
}

GlobalPlan Scenario::baseline(const std::vector<PlanSet>& sets) {
    std::vector<const Plan*> cheapest;
    cheapest.reserve(sets.size());
    for (const auto& s : sets) cheapest.push_back(&s[0]);
    return aggregate_global_plan(std::span<const Plan* const>(cheapest));
}

std::string Scenario::dataset_hash() const {
    std::uint64_t h = text::fnv1a("hrcl-dataset");
    for (const auto& s : plansets(Split::eval, 0, 0, 1)) h = text::fnv1a(format_planset(s), h);
    for (double v : initial_target().values) h = text::fnv1a(text::format_double(v), h);
    return text::hex64(h);
}

void Scenario::write_dataset(const std::filesystem::path& dir) const {
    std::filesystem::create_directories(dir);
    for (const auto& s : plansets(Split::eval, 0, 0, 1)) write_planset_file(dir, s);
    std::ofstream meta(dir / "dataset.meta", std::ios::binary);
    if (!meta) throw IoError("cannot write " + (dir / "dataset.meta").string());
    meta << "format=hrcl-dataset-1\n"
         << "scenario=" << to_string(kind_) << '\n'
         << "seed=" << seed_ << '\n'
         << "U=" << agents_ << '\n'
         << "K=" << plans_ << '\n'
         << "D=" << dim_ << '\n'
         << "generator=" << generator_name() << '\n'
         << "substream=splitmix64(seed)^agent_id\n"
         << "amplitude=" << text::format_double(amplitude_) << '\n'
         << "omega=" << text::format_double(omega_) << '\n';
    if (kind_ == ScenarioKind::energy) {
        meta << "resolution_minutes=5\noffsets_minutes=";
        for (std::size_t i = 0; i < offsets_.size(); ++i) meta << (i ? "," : "") << offsets_[i];
        meta << '\n';
    }
    meta << "hash=" << dataset_hash() << '\n';
    if (!meta) throw IoError("failed writing dataset.meta");
}

}  // namespace hrcl
