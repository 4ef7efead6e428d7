#include "hrcl/domain.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <sstream>

#include "hrcl/error.hpp"
#include "hrcl/text.hpp"

namespace hrcl {

void validate_plan(const Plan& plan) {
    if (plan.values.empty()) throw PreconditionError("plan has no values");
    if (!std::isfinite(plan.discomfort) || plan.discomfort < 0.0)
        throw PreconditionError("plan discomfort must be finite and non-negative");
    for (double v : plan.values)
        if (!std::isfinite(v)) throw PreconditionError("plan values must be finite");
}

std::vector<IndexRange> quantile_groups(std::size_t count, std::size_t groups) {
    if (groups == 0 || groups > count)
        throw PreconditionError("need 1 <= groups <= plans (groups=" + std::to_string(groups) +
                                ", plans=" + std::to_string(count) + ")");
    const std::size_t base = count / groups;
    const std::size_t extra = count % groups;
    std::vector<IndexRange> ranges;
    ranges.reserve(groups);
    std::size_t start = 0;
    for (std::size_t g = 0; g < groups; ++g) {
        const std::size_t len = base + (g < extra ? 1 : 0);
        ranges.push_back({start, start + len});
        start += len;
    }
    return ranges;
}

PlanSet::PlanSet(int agent_id, std::vector<Plan> plans, std::size_t groups)
    : agent_id_(agent_id), plans_(std::move(plans)) {
    if (agent_id < 0) throw PreconditionError("agent id must be non-negative");
    if (plans_.empty()) throw PreconditionError("a plan set needs at least one plan");
    const std::size_t d = plans_.front().dim();
    for (const auto& p : plans_) {
        validate_plan(p);
        require_same_dim(p.dim(), d, "plan set");
    }
    std::stable_sort(plans_.begin(), plans_.end(),
                     [](const Plan& a, const Plan& b) { return a.discomfort < b.discomfort; });
    groups_ = quantile_groups(plans_.size(), groups);
}

const IndexRange& PlanSet::group(std::size_t i) const {
    if (i >= groups_.size())
        throw PreconditionError("group index " + std::to_string(i) + " out of range [0, " +
                                std::to_string(groups_.size()) + ")");
    return groups_[i];
}

PlanSet PlanSet::regrouped(std::size_t groups) const {
    PlanSet copy = *this;
    copy.groups_ = quantile_groups(plans_.size(), groups);
    return copy;
}

double PlanSet::max_discomfort() const noexcept {
    double m = 0.0;
    for (const auto& p : plans_) m = std::max(m, p.discomfort);
    return m;
}

Behavior::Behavior(double beta) : beta_(beta) {
    if (!(beta >= 0.0 && beta <= 1.0)) throw PreconditionError("behavior must lie in [0, 1]");
}

void require_same_dim(std::size_t a, std::size_t b, const char* what) {
    if (a != b)
        throw DimensionError(std::string(what) + ": dimension mismatch (" + std::to_string(a) +
                             " vs " + std::to_string(b) + ")");
}

GlobalPlan aggregate_global_plan(std::span<const Plan> selected) {
    if (selected.empty()) throw PreconditionError("aggregate_global_plan: no plans");
    GlobalPlan g{Vector(selected.front().dim(), 0.0)};
    for (const auto& p : selected) {
        require_same_dim(p.dim(), g.dim(), "aggregate_global_plan");
        for (std::size_t d = 0; d < g.dim(); ++d) g.values[d] += p.values[d];
    }
    return g;
}

GlobalPlan aggregate_global_plan(std::span<const Plan* const> selected) {
    if (selected.empty()) throw PreconditionError("aggregate_global_plan: no plans");
    GlobalPlan g{Vector(selected.front()->dim(), 0.0)};
    for (const Plan* p : selected) {
        require_same_dim(p->dim(), g.dim(), "aggregate_global_plan");
        for (std::size_t d = 0; d < g.dim(); ++d) g.values[d] += p->values[d];
    }
    return g;
}

// ---------------------------------------------------------------------------
// Plan dataset files

std::string format_planset(const PlanSet& set) {
    std::string out;
    for (const auto& p : set.plans()) {
        out += text::format_double(p.discomfort);
        out += ':';
        for (std::size_t d = 0; d < p.dim(); ++d) {
            if (d) out += ',';
            out += text::format_double(p.values[d]);
        }
        out += '\n';
    }
    return out;
}

PlanSet parse_planset(std::string_view content, int agent_id, std::size_t groups) {
    std::vector<Plan> plans;
    std::size_t line_no = 0;
    for (std::string_view line : text::split(content, '\n')) {
        ++line_no;
        line = text::trim(line);
        if (line.empty() || line.front() == '#') continue;
        const auto colon = line.find(':');
        if (colon == std::string_view::npos)
            throw IoError("plan line " + std::to_string(line_no) + ": missing ':'");
        Plan p;
        try {
            p.discomfort = text::parse_double(line.substr(0, colon));
            for (auto tok : text::split(line.substr(colon + 1), ','))
                p.values.push_back(text::parse_double(tok));
        } catch (const PreconditionError& e) {
            throw IoError("plan line " + std::to_string(line_no) + ": " + e.what());
        }
        plans.push_back(std::move(p));
    }
    return PlanSet(agent_id, std::move(plans), groups);
}

std::filesystem::path planset_path(const std::filesystem::path& dir, int agent_id) {
    return dir / ("agent_" + std::to_string(agent_id) + ".plans");
}

void write_planset_file(const std::filesystem::path& dir, const PlanSet& set) {
    const auto path = planset_path(dir, set.agent_id());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << format_planset(set);
    if (!out) throw IoError("failed writing " + path.string());
}

PlanSet read_planset_file(const std::filesystem::path& dir, int agent_id, std::size_t groups) {
    const auto path = planset_path(dir, agent_id);
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_planset(buf.str(), agent_id, groups);
}

// ---------------------------------------------------------------------------
// Identifiers and configuration

namespace {

struct MethodName {
    MethodId id;
    const char* name;
};

constexpr std::array<MethodName, 9> kMethodNames{{
    {MethodId::epos, "epos"},
    {MethodId::epos_selfish, "epos-selfish"},
    {MethodId::epos_altruistic, "epos-altruistic"},
    {MethodId::epos_p, "epos-p"},
    {MethodId::mappo, "mappo"},
    {MethodId::hrl, "hrl"},
    {MethodId::hrcl, "hrcl"},
    {MethodId::hrcl_p, "hrcl-p"},
    {MethodId::hrcl_b, "hrcl-b"},
}};

constexpr std::array<MethodId, 9> kMethods{MethodId::epos,  MethodId::epos_selfish, MethodId::epos_altruistic,
                                           MethodId::epos_p, MethodId::mappo,       MethodId::hrl,
                                           MethodId::hrcl,  MethodId::hrcl_p,       MethodId::hrcl_b};

}  // namespace

std::string to_string(ScenarioKind kind) {
    return kind == ScenarioKind::synthetic ? "synthetic" : "energy";
}

std::string to_string(MethodId method) {
    for (const auto& m : kMethodNames)
        if (m.id == method) return m.name;
    return "unknown";
}

ScenarioKind parse_scenario(const std::string& name) {
    if (name == "synthetic") return ScenarioKind::synthetic;
    if (name == "energy") return ScenarioKind::energy;
    throw ConfigError("scenario", "unknown scenario '" + name + "'");
}

MethodId parse_method(const std::string& name) {
    for (const auto& m : kMethodNames)
        if (name == m.name) return m.id;
    throw ConfigError("method", "unknown method '" + name + "'");
}

std::span<const MethodId> all_methods() noexcept { return kMethods; }

bool is_learning_method(MethodId method) noexcept {
    switch (method) {
        case MethodId::mappo:
        case MethodId::hrl:
        case MethodId::hrcl:
        case MethodId::hrcl_p:
        case MethodId::hrcl_b:
            return true;
        default:
            return false;
    }
}

void ExperimentConfig::validate() const {
    auto need = [](bool ok, const char* key, const char* what) {
        if (!ok) throw ConfigError(key, what);
    };
    auto unit = [](double v) { return v >= 0.0 && v <= 1.0; };
    need(agents >= 1, "agents", "must be >= 1");
    need(plans >= 1, "plans", "must be >= 1");
    need(dim >= 1, "dim", "must be >= 1");
    need(periods >= 1, "periods", "must be >= 1");
    need(groups >= 1, "groups", "must be >= 1");
    need(groups <= plans, "groups", "must not exceed plans");
    need(ranges >= 1, "ranges", "must be >= 1");
    need(iterations >= 1, "iterations", "must be >= 1");
    need(episodes >= 1, "episodes", "must be >= 1");
    need(batch >= 1, "batch", "must be >= 1");
    need(hidden >= 1, "hidden", "must be >= 1");
    need(epochs >= 1, "epochs", "must be >= 1");
    need(minibatch >= 1, "minibatch", "must be >= 1");
    need(unit(gamma), "gamma", "must lie in [0, 1]");
    need(clip > 0.0, "clip", "must be > 0");
    need(unit(sigma1), "sigma1", "must lie in [0, 1]");
    need(unit(sigma2), "sigma2", "must lie in [0, 1]");
    need(unit(beta), "beta", "must lie in [0, 1]");
    need(learning_rate >= 0.0, "lr", "must be >= 0");
    need(entropy >= 0.0, "entropy", "must be >= 0");
    need(omega > 0.0, "omega", "must be > 0");
    need(std::isfinite(amplitude), "amplitude", "must be finite");
    need(!seeds.empty(), "seeds", "seed list must not be empty");
}

}  // namespace hrcl
