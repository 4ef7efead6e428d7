#pragma once

// Small dense networks with explicit reverse-mode gradients and an Adam optimizer.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hrcl/domain.hpp"

namespace hrcl {

enum class OutputHead { identity, softmax };

std::string to_string(OutputHead head);

/// Affine layer, weights stored row-major (out x in).
struct DenseLayer {
    std::size_t inputs = 0;
    std::size_t outputs = 0;
    std::vector<double> weights;
    std::vector<double> bias;

    bool operator==(const DenseLayer&) const = default;
};

/// Intermediates of one forward pass: activations[0] is the input, activations[l]
/// the tanh output of hidden layer l, logits the last affine output.
struct ForwardCache {
    std::vector<Vector> activations;
    Vector logits;
    Vector output;
};

class GradientBuffer;

class DenseNetwork {
public:
    DenseNetwork() = default;
    /// Zero-initialized network with layer sizes [input, hidden..., output].
    DenseNetwork(std::vector<std::size_t> sizes, OutputHead head);

    /// [input, hidden, hidden, output] with parameters drawn from U[-0.1, 0.1].
    static DenseNetwork create(std::size_t input, std::size_t hidden, std::size_t output, OutputHead head,
                               std::uint64_t seed);

    Vector forward(std::span<const double> input) const;
    Vector forward(std::span<const double> input, ForwardCache& cache) const;

    std::vector<std::size_t> sizes() const;
    OutputHead head() const noexcept { return head_; }
    std::size_t input_size() const;
    std::size_t output_size() const;
    const std::vector<DenseLayer>& layers() const noexcept { return layers_; }
    std::vector<DenseLayer>& layers() noexcept { return layers_; }

    /// Flat parameter view: per layer, weights then bias.
    std::size_t parameter_count() const;
    double& parameter(std::size_t index);
    double parameter(std::size_t index) const;

    bool all_finite() const;
    bool operator==(const DenseNetwork&) const = default;

private:
    std::vector<DenseLayer> layers_;
    OutputHead head_ = OutputHead::identity;
};

/// Gradients shaped like a network's parameters.
class GradientBuffer {
public:
    GradientBuffer() = default;
    explicit GradientBuffer(const DenseNetwork& net);

    void zero();
    bool matches(const DenseNetwork& net) const;
    void add(const GradientBuffer& other, double scale = 1.0);
    void scale(double factor);

    std::size_t size() const;
    double& operator[](std::size_t index);
    double operator[](std::size_t index) const;

    std::vector<std::vector<double>> weights;
    std::vector<std::vector<double>> bias;
};

/// Accumulates d(loss)/d(params) into `grads` given d(loss)/d(logits).
void backward_logits(const DenseNetwork& net, const ForwardCache& cache, std::span<const double> logit_grad,
                     GradientBuffer& grads);

/// Gradient of a scalar loss given d(loss)/d(output); the head Jacobian is applied here.
GradientBuffer backward(const DenseNetwork& net, const ForwardCache& cache, std::span<const double> output_grad);

Vector softmax(std::span<const double> logits);
Vector log_softmax(std::span<const double> logits);

struct AdamConfig {
    double learning_rate = 3e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

class Adam {
public:
    Adam() = default;
    Adam(const DenseNetwork& net, AdamConfig config);

    /// One bias-corrected step of descent along `grads`.
    void step(DenseNetwork& net, const GradientBuffer& grads);

    std::uint64_t steps() const noexcept { return steps_; }
    const AdamConfig& config() const noexcept { return config_; }

private:
    AdamConfig config_;
    GradientBuffer m_;
    GradientBuffer v_;
    std::uint64_t steps_ = 0;
};

struct GradientCheckOptions {
    double step = 1e-5;
    double tolerance = 1e-4;
    double floor = 1e-7;  // denominators below this count as this
};

struct GradientCheckReport {
    double max_relative_error = 0.0;
    std::size_t worst_parameter = 0;
    std::size_t parameters = 0;
    bool passed = false;
};

/// Compares `analytic(net)` with central differences of `loss` over every parameter.
GradientCheckReport gradient_check(const DenseNetwork& net, const std::function<double(const DenseNetwork&)>& loss,
                                   const std::function<GradientBuffer(const DenseNetwork&)>& analytic,
                                   const GradientCheckOptions& options = {});

/// Versioned text checkpoint: header, metadata lines, then one block per network.
struct Checkpoint {
    static constexpr int kVersion = 1;
    std::vector<std::pair<std::string, std::string>> meta;  // written in order
    std::vector<std::pair<std::string, DenseNetwork>> networks;

    const DenseNetwork& network(const std::string& name) const;
    const std::string& value(const std::string& key) const;
};

void write_checkpoint(std::ostream& out, const Checkpoint& ckpt);
Checkpoint read_checkpoint(std::istream& in);
void save_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace hrcl
