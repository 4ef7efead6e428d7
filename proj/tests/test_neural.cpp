#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <sstream>

#include "hrcl/error.hpp"
#include "hrcl/neural.hpp"
#include "hrcl/rng.hpp"

using namespace hrcl;

namespace {

DenseNetwork random_net(std::vector<std::size_t> sizes, OutputHead head, std::uint64_t seed, double scale = 0.5) {
    DenseNetwork net(std::move(sizes), head);
    Xoshiro256 rng(seed);
    for (std::size_t i = 0; i < net.parameter_count(); ++i) net.parameter(i) = rng.uniform(-scale, scale);
    return net;
}

Vector random_input(std::size_t n, std::uint64_t seed) {
    Xoshiro256 rng(seed);
    Vector x(n);
    for (auto& v : x) v = rng.uniform(-1, 1);
    return x;
}

}  // namespace

TEST(Forward, ZeroNetworkIdentity) {
    const DenseNetwork net({3, 4, 4, 2}, OutputHead::identity);
    EXPECT_EQ(net.forward(Vector{1, -2, 3}), (Vector{0, 0}));
}

TEST(Forward, ZeroNetworkSoftmaxIsUniform) {
    const DenseNetwork net({3, 4, 4, 5}, OutputHead::softmax);
    for (double p : net.forward(Vector{1, 2, 3})) EXPECT_DOUBLE_EQ(p, 0.2);
}

TEST(Forward, UnitChain) {
    DenseNetwork net({1, 1, 1, 1}, OutputHead::identity);
    for (std::size_t l = 0; l < 3; ++l) net.layers()[l].weights[0] = 1.0;
    EXPECT_EQ(net.forward(Vector{0}), Vector{0});
    EXPECT_DOUBLE_EQ(net.forward(Vector{1})[0], std::tanh(std::tanh(1.0)));
}

TEST(Forward, DimensionMismatch) {
    const DenseNetwork net({3, 4, 4, 2}, OutputHead::identity);
    EXPECT_THROW(net.forward(Vector{1, 2}), DimensionError);
}

TEST(Backward, FinalBiasGradientIsOne) {
    const auto net = random_net({3, 5, 5, 1}, OutputHead::identity, 3);
    ForwardCache cache;
    net.forward(random_input(3, 4), cache);
    const auto g = backward(net, cache, Vector{1.0});
    EXPECT_DOUBLE_EQ(g.bias.back()[0], 1.0);
}

TEST(Backward, ZeroOutputGradient) {
    const auto net = random_net({3, 5, 5, 2}, OutputHead::softmax, 3);
    ForwardCache cache;
    net.forward(random_input(3, 4), cache);
    const auto g = backward(net, cache, Vector{0.0, 0.0});
    for (std::size_t i = 0; i < g.size(); ++i) EXPECT_EQ(g[i], 0.0);
}

TEST(Backward, MissingCache) {
    const auto net = random_net({2, 3, 3, 2}, OutputHead::softmax, 1);
    const ForwardCache empty;
    EXPECT_THROW(backward(net, empty, Vector{1, 0}), PreconditionError);
}

TEST(GradientCheck, SoftmaxPolicyLoss) {
    const auto net = DenseNetwork::create(4, 8, 3, OutputHead::softmax, 17);
    const Vector x = random_input(4, 5);
    const std::size_t action = 1;
    const double advantage = 0.7;
    auto loss = [&](const DenseNetwork& n) { return -advantage * std::log(n.forward(x)[action]); };
    auto analytic = [&](const DenseNetwork& n) {
        ForwardCache cache;
        const auto p = n.forward(x, cache);
        Vector grad(3, 0.0);
        grad[action] = -advantage / p[action];
        return backward(n, cache, grad);
    };
    const auto report = gradient_check(net, loss, analytic);
    EXPECT_EQ(report.parameters, 4u * 8 + 8 + 8 * 8 + 8 + 8 * 3 + 3);
    EXPECT_LT(report.max_relative_error, 1e-4);
    EXPECT_TRUE(report.passed);
}

TEST(GradientCheck, IdentitySquaredLoss) {
    const auto net = random_net({3, 6, 6, 1}, OutputHead::identity, 9);
    const Vector x = random_input(3, 10);
    const double y = 0.4;
    auto loss = [&](const DenseNetwork& n) {
        const double e = n.forward(x)[0] - y;
        return e * e;
    };
    auto analytic = [&](const DenseNetwork& n) {
        ForwardCache cache;
        const double e = n.forward(x, cache)[0] - y;
        return backward(n, cache, Vector{2.0 * e});
    };
    GradientCheckOptions o;
    o.tolerance = 1e-6;
    const auto report = gradient_check(net, loss, analytic, o);
    EXPECT_LT(report.max_relative_error, 1e-6);
    EXPECT_TRUE(report.passed);
}

TEST(GradientCheck, RandomNetsEveryLayer) {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        for (auto head : {OutputHead::identity, OutputHead::softmax}) {
            const auto net = random_net({2 + seed % 3, 3 + seed % 4, 4, 2 + seed % 2}, head, seed);
            const Vector x = random_input(net.input_size(), seed + 100);
            const Vector w = random_input(net.output_size(), seed + 200);
            auto loss = [&](const DenseNetwork& n) {
                const auto out = n.forward(x);
                return std::inner_product(out.begin(), out.end(), w.begin(), 0.0);
            };
            auto analytic = [&](const DenseNetwork& n) {
                ForwardCache cache;
                n.forward(x, cache);
                return backward(n, cache, w);
            };
            const auto report = gradient_check(net, loss, analytic);
            EXPECT_TRUE(report.passed) << "seed " << seed << " error " << report.max_relative_error;
        }
    }
}

TEST(GradientCheck, SignFlipFails) {
    const auto net = random_net({3, 4, 4, 1}, OutputHead::identity, 2);
    const Vector x = random_input(3, 6);
    auto loss = [&](const DenseNetwork& n) { return n.forward(x)[0]; };
    auto flipped = [&](const DenseNetwork& n) {
        ForwardCache cache;
        n.forward(x, cache);
        auto g = backward(n, cache, Vector{1.0});
        g.scale(-1.0);
        return g;
    };
    EXPECT_FALSE(gradient_check(net, loss, flipped).passed);
}

TEST(Softmax, Properties) {
    Xoshiro256 rng(31);
    for (int trial = 0; trial < 200; ++trial) {
        Vector z(1 + rng.below(8));
        for (auto& v : z) v = rng.uniform(-30, 30);
        const auto p = softmax(z);
        double sum = 0.0;
        for (double v : p) {
            EXPECT_GT(v, 0.0);
            sum += v;
        }
        EXPECT_NEAR(sum, 1.0, 1e-12);

        const double c = rng.uniform(-50, 50);
        Vector shifted = z;
        for (auto& v : shifted) v += c;
        const auto q = softmax(shifted);
        for (std::size_t i = 0; i < p.size(); ++i) EXPECT_LT(std::abs(p[i] - q[i]), 1e-12);

        const auto lp = log_softmax(z);
        for (std::size_t i = 0; i < p.size(); ++i) EXPECT_NEAR(std::exp(lp[i]), p[i], 1e-12);
    }
    const auto big = softmax(Vector{700, 0});
    EXPECT_GT(big[1], 0.0);
    EXPECT_TRUE(std::isfinite(log_softmax(Vector{1000, 0})[1]));
}

TEST(Init, UniformRangeAndSeeded) {
    const auto a = DenseNetwork::create(10, 16, 4, OutputHead::softmax, 8);
    EXPECT_EQ(a.sizes(), (std::vector<std::size_t>{10, 16, 16, 4}));
    bool nonzero = false;
    for (std::size_t i = 0; i < a.parameter_count(); ++i) {
        EXPECT_GE(a.parameter(i), -0.1);
        EXPECT_LE(a.parameter(i), 0.1);
        nonzero = nonzero || a.parameter(i) != 0.0;
    }
    EXPECT_TRUE(nonzero);
    EXPECT_TRUE(a.all_finite());
    EXPECT_EQ(a, DenseNetwork::create(10, 16, 4, OutputHead::softmax, 8));
    EXPECT_NE(a, DenseNetwork::create(10, 16, 4, OutputHead::softmax, 9));
}

TEST(Adam, ZeroGradientLeavesParameters) {
    auto net = random_net({2, 3, 3, 1}, OutputHead::identity, 4);
    const auto before = net;
    Adam adam(net, AdamConfig{});
    GradientBuffer g(net);
    for (int i = 0; i < 5; ++i) adam.step(net, g);
    EXPECT_EQ(net, before);
    EXPECT_EQ(adam.steps(), 5u);
}

TEST(Adam, ConstantGradientDescends) {
    auto net = random_net({2, 3, 3, 1}, OutputHead::identity, 4);
    const auto before = net;
    Adam adam(net, AdamConfig{});
    GradientBuffer g(net);
    for (std::size_t i = 0; i < g.size(); ++i) g[i] = (i % 2 == 0) ? 0.5 : -2.0;
    for (int s = 0; s < 100; ++s) adam.step(net, g);
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (g[i] > 0) EXPECT_LT(net.parameter(i), before.parameter(i));
        else EXPECT_GT(net.parameter(i), before.parameter(i));
        // bias-corrected steps have magnitude about lr
        EXPECT_NEAR(std::abs(net.parameter(i) - before.parameter(i)), 100 * 3e-4, 1e-6);
    }
}

TEST(Adam, IdenticalStreamsIdenticalTrajectories) {
    auto a = random_net({3, 4, 4, 2}, OutputHead::softmax, 7);
    auto b = a;
    Adam oa(a, AdamConfig{}), ob(b, AdamConfig{});
    Xoshiro256 rng(1);
    for (int s = 0; s < 20; ++s) {
        GradientBuffer g(a);
        for (std::size_t i = 0; i < g.size(); ++i) g[i] = rng.uniform(-1, 1);
        oa.step(a, g);
        ob.step(b, g);
    }
    EXPECT_EQ(a, b);
    GradientBuffer wrong(DenseNetwork({3, 4, 2}, OutputHead::identity));
    EXPECT_THROW(oa.step(a, wrong), DimensionError);
}

TEST(GradientBufferOps, AddScaleZero) {
    const DenseNetwork net({2, 2, 1}, OutputHead::identity);
    GradientBuffer a(net), b(net);
    for (std::size_t i = 0; i < a.size(); ++i) {
        a[i] = static_cast<double>(i);
        b[i] = 1.0;
    }
    a.add(b, 2.0);
    a.scale(0.5);
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_DOUBLE_EQ(a[i], (static_cast<double>(i) + 2.0) * 0.5);
    a.zero();
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i], 0.0);
    EXPECT_TRUE(a.matches(net));
}

TEST(Checkpoint, RoundTripIsExactAndByteStable) {
    Checkpoint c;
    c.meta = {{"method", "hrcl"}, {"seed", "3"}, {"steps", "120"}};
    c.networks = {{"actor", DenseNetwork::create(6, 8, 4, OutputHead::softmax, 1)},
                  {"critic", random_net({6, 8, 8, 1}, OutputHead::identity, 2, 3.0)}};
    c.networks[1].second.parameter(0) = 1.0 / 3.0;
    std::ostringstream out;
    write_checkpoint(out, c);
    std::istringstream in(out.str());
    const auto back = read_checkpoint(in);
    EXPECT_EQ(back.meta, c.meta);
    ASSERT_EQ(back.networks.size(), 2u);
    EXPECT_EQ(back.network("actor"), c.network("actor"));
    EXPECT_EQ(back.network("critic"), c.network("critic"));
    EXPECT_EQ(back.value("seed"), "3");
    std::ostringstream again;
    write_checkpoint(again, back);
    EXPECT_EQ(again.str(), out.str());
    EXPECT_EQ(out.str().rfind("hrcl-checkpoint 1\n", 0), 0u);
}

TEST(Checkpoint, RejectsBadInput) {
    auto parse = [](const std::string& text) {
        std::istringstream in(text);
        return read_checkpoint(in);
    };
    EXPECT_THROW(parse(""), IoError);
    EXPECT_THROW(parse("other 1\nend\n"), IoError);
    EXPECT_THROW(parse("hrcl-checkpoint 2\nend\n"), IoError);
    EXPECT_THROW(parse("hrcl-checkpoint 1\nmeta a b\n"), IoError);
    EXPECT_THROW(parse("hrcl-checkpoint 1\nnetwork n identity 2 1 1\nw 0 1 2\nb 0 0\nend\n"), IoError);
    EXPECT_THROW(parse("hrcl-checkpoint 1\nend\n").network("actor"), IoError);
}
