#include "hrcl/neural.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "hrcl/error.hpp"
#include "hrcl/rng.hpp"
#include "hrcl/text.hpp"

namespace hrcl {

std::string to_string(OutputHead head) { return head == OutputHead::softmax ? "softmax" : "identity"; }

DenseNetwork::DenseNetwork(std::vector<std::size_t> sizes, OutputHead head) : head_(head) {
    if (sizes.size() < 2) throw PreconditionError("network needs at least input and output sizes");
    for (std::size_t s : sizes)
        if (s == 0) throw PreconditionError("network layer sizes must be positive");
    for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
        DenseLayer layer;
        layer.inputs = sizes[l];
        layer.outputs = sizes[l + 1];
        layer.weights.assign(layer.inputs * layer.outputs, 0.0);
        layer.bias.assign(layer.outputs, 0.0);
        layers_.push_back(std::move(layer));
    }
}

DenseNetwork DenseNetwork::create(std::size_t input, std::size_t hidden, std::size_t output, OutputHead head,
                                  std::uint64_t seed) {
    DenseNetwork net({input, hidden, hidden, output}, head);
    Xoshiro256 rng(seed);
    for (std::size_t i = 0; i < net.parameter_count(); ++i) net.parameter(i) = rng.uniform(-0.1, 0.1);
    return net;
}

std::vector<std::size_t> DenseNetwork::sizes() const {
    std::vector<std::size_t> s;
    if (layers_.empty()) return s;
    s.push_back(layers_.front().inputs);
    for (const auto& l : layers_) s.push_back(l.outputs);
    return s;
}

std::size_t DenseNetwork::input_size() const { return layers_.empty() ? 0 : layers_.front().inputs; }
std::size_t DenseNetwork::output_size() const { return layers_.empty() ? 0 : layers_.back().outputs; }

std::size_t DenseNetwork::parameter_count() const {
    std::size_t n = 0;
    for (const auto& l : layers_) n += l.weights.size() + l.bias.size();
    return n;
}

double& DenseNetwork::parameter(std::size_t index) {
    for (auto& l : layers_) {
        if (index < l.weights.size()) return l.weights[index];
        index -= l.weights.size();
        if (index < l.bias.size()) return l.bias[index];
        index -= l.bias.size();
    }
    throw PreconditionError("parameter index out of range");
}

double DenseNetwork::parameter(std::size_t index) const {
    return const_cast<DenseNetwork*>(this)->parameter(index);
}

bool DenseNetwork::all_finite() const {
    for (const auto& l : layers_) {
        for (double w : l.weights)
            if (!std::isfinite(w)) return false;
        for (double b : l.bias)
            if (!std::isfinite(b)) return false;
    }
    return true;
}

Vector DenseNetwork::forward(std::span<const double> input) const {
    ForwardCache cache;
    return forward(input, cache);
}

Vector DenseNetwork::forward(std::span<const double> input, ForwardCache& cache) const {
    if (layers_.empty()) throw PreconditionError("forward on an empty network");
    require_same_dim(input.size(), input_size(), "network input");
    cache.activations.clear();
    cache.activations.emplace_back(input.begin(), input.end());
    for (std::size_t l = 0; l < layers_.size(); ++l) {
        const DenseLayer& layer = layers_[l];
        const Vector& x = cache.activations.back();
        Vector z(layer.bias);
        for (std::size_t o = 0; o < layer.outputs; ++o) {
            const double* row = layer.weights.data() + o * layer.inputs;
            double acc = 0.0;
            for (std::size_t i = 0; i < layer.inputs; ++i) acc += row[i] * x[i];
            z[o] += acc;
        }
        if (l + 1 < layers_.size()) {
            for (double& v : z) v = std::tanh(v);
            cache.activations.push_back(std::move(z));
        } else {
            cache.logits = std::move(z);
        }
    }
    cache.output = head_ == OutputHead::softmax ? softmax(cache.logits) : cache.logits;
    return cache.output;
}

// ---------------------------------------------------------------------------

GradientBuffer::GradientBuffer(const DenseNetwork& net) {
    for (const auto& l : net.layers()) {
        weights.emplace_back(l.weights.size(), 0.0);
        bias.emplace_back(l.bias.size(), 0.0);
    }
}

void GradientBuffer::zero() {
    for (auto& w : weights) std::fill(w.begin(), w.end(), 0.0);
    for (auto& b : bias) std::fill(b.begin(), b.end(), 0.0);
}

bool GradientBuffer::matches(const DenseNetwork& net) const {
    const auto& layers = net.layers();
    if (layers.size() != weights.size() || layers.size() != bias.size()) return false;
    for (std::size_t l = 0; l < layers.size(); ++l)
        if (layers[l].weights.size() != weights[l].size() || layers[l].bias.size() != bias[l].size()) return false;
    return true;
}

void GradientBuffer::add(const GradientBuffer& other, double factor) {
    if (other.size() != size()) throw DimensionError("gradient buffer shapes differ");
    for (std::size_t l = 0; l < weights.size(); ++l) {
        for (std::size_t i = 0; i < weights[l].size(); ++i) weights[l][i] += factor * other.weights[l][i];
        for (std::size_t i = 0; i < bias[l].size(); ++i) bias[l][i] += factor * other.bias[l][i];
    }
}

void GradientBuffer::scale(double factor) {
    for (auto& w : weights)
        for (double& v : w) v *= factor;
    for (auto& b : bias)
        for (double& v : b) v *= factor;
}

std::size_t GradientBuffer::size() const {
    std::size_t n = 0;
    for (std::size_t l = 0; l < weights.size(); ++l) n += weights[l].size() + bias[l].size();
    return n;
}

double& GradientBuffer::operator[](std::size_t index) {
    for (std::size_t l = 0; l < weights.size(); ++l) {
        if (index < weights[l].size()) return weights[l][index];
        index -= weights[l].size();
        if (index < bias[l].size()) return bias[l][index];
        index -= bias[l].size();
    }
    throw PreconditionError("gradient index out of range");
}

double GradientBuffer::operator[](std::size_t index) const { return const_cast<GradientBuffer&>(*this)[index]; }

void backward_logits(const DenseNetwork& net, const ForwardCache& cache, std::span<const double> logit_grad,
                     GradientBuffer& grads) {
    const auto& layers = net.layers();
    if (cache.activations.size() != layers.size() || cache.logits.size() != net.output_size())
        throw PreconditionError("backward: forward cache missing or stale");
    require_same_dim(logit_grad.size(), net.output_size(), "backward output gradient");
    if (!grads.matches(net)) throw DimensionError("backward: gradient buffer does not match network");

    Vector delta(logit_grad.begin(), logit_grad.end());
    for (std::size_t l = layers.size(); l-- > 0;) {
        const DenseLayer& layer = layers[l];
        const Vector& x = cache.activations[l];
        auto& gw = grads.weights[l];
        auto& gb = grads.bias[l];
        for (std::size_t o = 0; o < layer.outputs; ++o) {
            const double d = delta[o];
            gb[o] += d;
            if (d == 0.0) continue;
            double* row = gw.data() + o * layer.inputs;
            for (std::size_t i = 0; i < layer.inputs; ++i) row[i] += d * x[i];
        }
        if (l == 0) break;
        Vector prev(layer.inputs, 0.0);
        for (std::size_t o = 0; o < layer.outputs; ++o) {
            const double d = delta[o];
            if (d == 0.0) continue;
            const double* row = layer.weights.data() + o * layer.inputs;
            for (std::size_t i = 0; i < layer.inputs; ++i) prev[i] += d * row[i];
        }
        // x = tanh(z): dz = dx * (1 - x^2)
        for (std::size_t i = 0; i < layer.inputs; ++i) prev[i] *= 1.0 - x[i] * x[i];
        delta = std::move(prev);
    }
}

GradientBuffer backward(const DenseNetwork& net, const ForwardCache& cache, std::span<const double> output_grad) {
    require_same_dim(output_grad.size(), net.output_size(), "backward output gradient");
    GradientBuffer grads(net);
    if (net.head() == OutputHead::softmax) {
        if (cache.output.size() != output_grad.size()) throw PreconditionError("backward: forward cache missing");
        double dot = 0.0;
        for (std::size_t j = 0; j < output_grad.size(); ++j) dot += output_grad[j] * cache.output[j];
        Vector dz(output_grad.size());
        for (std::size_t j = 0; j < dz.size(); ++j) dz[j] = cache.output[j] * (output_grad[j] - dot);
        backward_logits(net, cache, dz, grads);
    } else {
        backward_logits(net, cache, output_grad, grads);
    }
    return grads;
}

Vector softmax(std::span<const double> logits) {
    if (logits.empty()) return {};
    const double top = *std::max_element(logits.begin(), logits.end());
    Vector out(logits.size());
    double sum = 0.0;
    for (std::size_t j = 0; j < logits.size(); ++j) {
        out[j] = std::exp(logits[j] - top);
        sum += out[j];
    }
    for (double& v : out) v /= sum;
    return out;
}

Vector log_softmax(std::span<const double> logits) {
    if (logits.empty()) return {};
    const double top = *std::max_element(logits.begin(), logits.end());
    double sum = 0.0;
    for (double z : logits) sum += std::exp(z - top);
    const double lse = top + std::log(sum);
    Vector out(logits.size());
    for (std::size_t j = 0; j < logits.size(); ++j) out[j] = logits[j] - lse;
    return out;
}

// ---------------------------------------------------------------------------

Adam::Adam(const DenseNetwork& net, AdamConfig config) : config_(config), m_(net), v_(net) {}

void Adam::step(DenseNetwork& net, const GradientBuffer& grads) {
    if (!grads.matches(net) || m_.size() != grads.size()) throw DimensionError("adam: gradient shape mismatch");
    ++steps_;
    const double t = static_cast<double>(steps_);
    const double c1 = 1.0 - std::pow(config_.beta1, t);
    const double c2 = 1.0 - std::pow(config_.beta2, t);
    auto& layers = net.layers();
    for (std::size_t l = 0; l < layers.size(); ++l) {
        const auto update = [&](std::vector<double>& p, const std::vector<double>& g, std::vector<double>& m,
                                std::vector<double>& v) {
            for (std::size_t i = 0; i < p.size(); ++i) {
                m[i] = config_.beta1 * m[i] + (1.0 - config_.beta1) * g[i];
                v[i] = config_.beta2 * v[i] + (1.0 - config_.beta2) * g[i] * g[i];
                const double mhat = m[i] / c1;
                const double vhat = v[i] / c2;
                p[i] -= config_.learning_rate * mhat / (std::sqrt(vhat) + config_.epsilon);
            }
        };
        update(layers[l].weights, grads.weights[l], m_.weights[l], v_.weights[l]);
        update(layers[l].bias, grads.bias[l], m_.bias[l], v_.bias[l]);
    }
}

// ---------------------------------------------------------------------------

GradientCheckReport gradient_check(const DenseNetwork& net, const std::function<double(const DenseNetwork&)>& loss,
                                   const std::function<GradientBuffer(const DenseNetwork&)>& analytic,
                                   const GradientCheckOptions& options) {
    GradientCheckReport report;
    const GradientBuffer grads = analytic(net);
    if (!grads.matches(net)) throw DimensionError("gradient_check: analytic gradient shape mismatch");
    DenseNetwork probe = net;
    report.parameters = net.parameter_count();
    for (std::size_t i = 0; i < report.parameters; ++i) {
        const double original = probe.parameter(i);
        probe.parameter(i) = original + options.step;
        const double up = loss(probe);
        probe.parameter(i) = original - options.step;
        const double down = loss(probe);
        probe.parameter(i) = original;
        const double numeric = (up - down) / (2.0 * options.step);
        const double a = grads[i];
        const double denom = std::max({std::abs(a), std::abs(numeric), options.floor});
        const double rel = std::abs(a - numeric) / denom;
        if (rel > report.max_relative_error || i == 0) {
            report.max_relative_error = rel;
            report.worst_parameter = i;
        }
    }
    report.passed = report.max_relative_error < options.tolerance;
    return report;
}

// ---------------------------------------------------------------------------
// Checkpoints
//
//   hrcl-checkpoint 1
//   meta <key> <value>            (any number, in order)
//   network <name> <head> <n> <size_0> ... <size_{n-1}>
//   w <layer> <values...>         (row-major)
//   b <layer> <values...>
//   end

namespace {

void write_values(std::ostream& out, const char* tag, std::size_t layer, const std::vector<double>& values) {
    out << tag << ' ' << layer;
    for (double v : values) out << ' ' << text::format_double(v);
    out << '\n';
}

std::vector<double> read_values(std::istringstream& line, std::size_t expected, const std::string& what) {
    std::vector<double> values;
    values.reserve(expected);
    std::string tok;
    while (line >> tok) values.push_back(text::parse_double(tok));
    if (values.size() != expected) throw IoError("checkpoint: wrong value count in " + what);
    return values;
}

}  // namespace

const DenseNetwork& Checkpoint::network(const std::string& name) const {
    for (const auto& [n, net] : networks)
        if (n == name) return net;
    throw IoError("checkpoint has no network '" + name + "'");
}

const std::string& Checkpoint::value(const std::string& key) const {
    for (const auto& [k, v] : meta)
        if (k == key) return v;
    throw IoError("checkpoint has no entry '" + key + "'");
}

void write_checkpoint(std::ostream& out, const Checkpoint& ckpt) {
    out << "hrcl-checkpoint " << Checkpoint::kVersion << '\n';
    for (const auto& [k, v] : ckpt.meta) {
        if (k.find_first_of(" \n") != std::string::npos || v.find('\n') != std::string::npos)
            throw PreconditionError("checkpoint meta entries must be single tokens / lines");
        out << "meta " << k << ' ' << v << '\n';
    }
    for (const auto& [name, net] : ckpt.networks) {
        const auto sizes = net.sizes();
        out << "network " << name << ' ' << to_string(net.head()) << ' ' << sizes.size();
        for (std::size_t s : sizes) out << ' ' << s;
        out << '\n';
        for (std::size_t l = 0; l < net.layers().size(); ++l) {
            write_values(out, "w", l, net.layers()[l].weights);
            write_values(out, "b", l, net.layers()[l].bias);
        }
    }
    out << "end\n";
}

Checkpoint read_checkpoint(std::istream& in) {
    Checkpoint ckpt;
    std::string line;
    if (!std::getline(in, line)) throw IoError("checkpoint: empty input");
    {
        std::istringstream head(line);
        std::string magic;
        int version = 0;
        head >> magic >> version;
        if (magic != "hrcl-checkpoint") throw IoError("checkpoint: bad header");
        if (version != Checkpoint::kVersion)
            throw IoError("checkpoint: unsupported version " + std::to_string(version));
    }
    DenseNetwork* current = nullptr;
    bool ended = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string tag;
        ls >> tag;
        if (tag == "meta") {
            std::string key;
            ls >> key;
            std::string rest;
            std::getline(ls, rest);
            if (!rest.empty() && rest.front() == ' ') rest.erase(0, 1);
            ckpt.meta.emplace_back(key, rest);
        } else if (tag == "network") {
            std::string name, head;
            std::size_t count = 0;
            ls >> name >> head >> count;
            std::vector<std::size_t> sizes(count);
            for (auto& s : sizes)
                if (!(ls >> s)) throw IoError("checkpoint: truncated network header");
            OutputHead h;
            if (head == "softmax") h = OutputHead::softmax;
            else if (head == "identity") h = OutputHead::identity;
            else throw IoError("checkpoint: unknown head '" + head + "'");
            ckpt.networks.emplace_back(name, DenseNetwork(sizes, h));
            current = &ckpt.networks.back().second;
        } else if (tag == "w" || tag == "b") {
            if (!current) throw IoError("checkpoint: values before network header");
            std::size_t layer = 0;
            ls >> layer;
            if (layer >= current->layers().size()) throw IoError("checkpoint: layer index out of range");
            auto& target = tag == "w" ? current->layers()[layer].weights : current->layers()[layer].bias;
            target = read_values(ls, target.size(), tag + std::to_string(layer));
        } else if (tag == "end") {
            ended = true;
            break;
        } else {
            throw IoError("checkpoint: unknown record '" + tag + "'");
        }
    }
    if (!ended) throw IoError("checkpoint: missing end marker");
    return ckpt;
}

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    write_checkpoint(out, ckpt);
    if (!out) throw IoError("failed writing " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path);
    return read_checkpoint(in);
}

}  // namespace hrcl
