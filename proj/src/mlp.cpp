#include "kandistill/mlp.hpp"

#include <cmath>

#include "kandistill/errors.hpp"
#include "kandistill/kan.hpp" // silu
#include "kandistill/rng.hpp"

namespace kandistill {

std::string activation_name(Activation a) {
    switch (a) {
    case Activation::relu: return "relu";
    case Activation::tanh: return "tanh";
    case Activation::silu: return "silu";
    }
    throw InvalidArgument("unknown activation tag");
}

Activation activation_from_name(const std::string& name) {
    if (name == "relu") return Activation::relu;
    if (name == "tanh") return Activation::tanh;
    if (name == "silu") return Activation::silu;
    throw InvalidArgument("unknown activation: " + name);
}

namespace {

double activate(Activation a, double x) {
    switch (a) {
    case Activation::relu: return x > 0.0 ? x : 0.0;
    case Activation::tanh: return std::tanh(x);
    case Activation::silu: return silu(x);
    }
    return x;
}

// Derivative in terms of the pre-activation value.
double activate_derivative(Activation a, double x) {
    switch (a) {
    case Activation::relu: return x > 0.0 ? 1.0 : 0.0;
    case Activation::tanh: {
        const double t = std::tanh(x);
        return 1.0 - t * t;
    }
    case Activation::silu: return silu_derivative(x);
    }
    return 1.0;
}

void affine(const MlpLayer& layer, std::span<const double> in, std::span<double> out) {
    for (int j = 0; j < layer.d_out; ++j) out[static_cast<std::size_t>(j)] = layer.bias[static_cast<std::size_t>(j)];
    for (int p = 0; p < layer.d_in; ++p) {
        const double x = in[static_cast<std::size_t>(p)];
        const double* w = layer.weights.data() + static_cast<std::size_t>(p) * static_cast<std::size_t>(layer.d_out);
        for (int j = 0; j < layer.d_out; ++j) out[static_cast<std::size_t>(j)] += w[j] * x;
    }
}

} // namespace

MlpNetwork::MlpNetwork(const std::vector<int>& dims, Activation activation, std::uint64_t seed)
    : activation_(activation) {
    if (dims.size() < 2) throw InvalidArgument("MLP needs at least an input and an output dimension");
    for (int d : dims) {
        if (d < 1) throw InvalidArgument("MLP dimensions must be positive");
    }
    Rng rng(seed);
    layers_.reserve(dims.size() - 1);
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
        MlpLayer layer;
        layer.d_in = dims[l];
        layer.d_out = dims[l + 1];
        layer.weights.resize(static_cast<std::size_t>(layer.d_in) * static_cast<std::size_t>(layer.d_out));
        layer.bias.assign(static_cast<std::size_t>(layer.d_out), 0.0);
        const double bound = 1.0 / std::sqrt(static_cast<double>(layer.d_in));
        for (auto& w : layer.weights) w = rng.uniform(-bound, bound);
        layers_.push_back(std::move(layer));
    }
}

std::vector<int> MlpNetwork::dims() const {
    std::vector<int> d;
    d.push_back(layers_.front().d_in);
    for (const auto& layer : layers_) d.push_back(layer.d_out);
    return d;
}

std::size_t MlpNetwork::parameter_count() const {
    std::size_t n = 0;
    for (const auto& layer : layers_) n += layer.weights.size() + layer.bias.size();
    return n;
}

std::size_t mlp_parameter_count(const std::vector<int>& dims) {
    std::size_t n = 0;
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
        n += static_cast<std::size_t>(dims[l]) * static_cast<std::size_t>(dims[l + 1]) +
             static_cast<std::size_t>(dims[l + 1]);
    }
    return n;
}

std::vector<double> MlpNetwork::forward(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != input_dim()) {
        throw DimensionError("MLP forward: input length does not match input_dim");
    }
    std::vector<double> cur(x.begin(), x.end());
    std::vector<double> next;
    for (std::size_t l = 0; l < layers_.size(); ++l) {
        next.assign(static_cast<std::size_t>(layers_[l].d_out), 0.0);
        affine(layers_[l], cur, next);
        if (l + 1 < layers_.size()) {
            for (auto& v : next) v = activate(activation_, v);
        }
        cur.swap(next);
    }
    return cur;
}

std::vector<double> MlpNetwork::penultimate(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != input_dim()) {
        throw DimensionError("MLP penultimate: input length does not match input_dim");
    }
    std::vector<double> cur(x.begin(), x.end());
    std::vector<double> next;
    for (std::size_t l = 0; l + 1 < layers_.size(); ++l) {
        next.assign(static_cast<std::size_t>(layers_[l].d_out), 0.0);
        affine(layers_[l], cur, next);
        for (auto& v : next) v = activate(activation_, v);
        cur.swap(next);
    }
    return cur;
}

std::vector<std::span<double>> MlpNetwork::parameter_blocks() {
    std::vector<std::span<double>> blocks;
    blocks.reserve(layers_.size() * 2);
    for (auto& layer : layers_) {
        blocks.emplace_back(layer.weights);
        blocks.emplace_back(layer.bias);
    }
    return blocks;
}

std::vector<std::span<const double>> MlpNetwork::parameter_blocks() const {
    std::vector<std::span<const double>> blocks;
    blocks.reserve(layers_.size() * 2);
    for (const auto& layer : layers_) {
        blocks.emplace_back(layer.weights);
        blocks.emplace_back(layer.bias);
    }
    return blocks;
}

void MlpNetwork::accumulate_gradients(std::span<const double> x, std::span<const double> upstream,
                                      GradientBlocks& grads, std::vector<double>* input_grad) const {
    if (static_cast<int>(x.size()) != input_dim()) {
        throw DimensionError("MLP backward: input length does not match input_dim");
    }
    if (static_cast<int>(upstream.size()) != output_dim()) {
        throw DimensionError("MLP backward: upstream length does not match output_dim");
    }
    if (grads.size() != layers_.size() * 2) {
        throw DimensionError("MLP backward: gradient block count mismatch");
    }

    // Forward pass keeping layer inputs (post-activation) and pre-activations.
    std::vector<std::vector<double>> inputs;   // input to layer l
    std::vector<std::vector<double>> preacts;  // affine output of layer l
    inputs.reserve(layers_.size());
    preacts.reserve(layers_.size());
    std::vector<double> cur(x.begin(), x.end());
    for (std::size_t l = 0; l < layers_.size(); ++l) {
        inputs.push_back(cur);
        std::vector<double> z(static_cast<std::size_t>(layers_[l].d_out), 0.0);
        affine(layers_[l], inputs.back(), z);
        preacts.push_back(z);
        if (l + 1 < layers_.size()) {
            for (auto& v : z) v = activate(activation_, v);
        }
        cur.swap(z);
    }

    std::vector<double> grad_out(upstream.begin(), upstream.end());
    for (std::size_t l = layers_.size(); l-- > 0;) {
        const auto& layer = layers_[l];
        // grad_out currently holds d/d(activation output of layer l); map it
        // through the activation for hidden layers.
        if (l + 1 < layers_.size()) {
            for (int j = 0; j < layer.d_out; ++j) {
                grad_out[static_cast<std::size_t>(j)] *=
                    activate_derivative(activation_, preacts[l][static_cast<std::size_t>(j)]);
            }
        }
        auto& wg = grads[l * 2 + 0];
        auto& bg = grads[l * 2 + 1];
        for (int j = 0; j < layer.d_out; ++j) bg[static_cast<std::size_t>(j)] += grad_out[static_cast<std::size_t>(j)];
        std::vector<double> grad_in(static_cast<std::size_t>(layer.d_in), 0.0);
        for (int p = 0; p < layer.d_in; ++p) {
            const double a = inputs[l][static_cast<std::size_t>(p)];
            const std::size_t row = static_cast<std::size_t>(p) * static_cast<std::size_t>(layer.d_out);
            const double* w = layer.weights.data() + row;
            double g = 0.0;
            for (int j = 0; j < layer.d_out; ++j) {
                wg[row + static_cast<std::size_t>(j)] += grad_out[static_cast<std::size_t>(j)] * a;
                g += grad_out[static_cast<std::size_t>(j)] * w[j];
            }
            grad_in[static_cast<std::size_t>(p)] = g;
        }
        grad_out.swap(grad_in);
    }
    if (input_grad) {
        for (std::size_t i = 0; i < grad_out.size(); ++i) (*input_grad)[i] += grad_out[i];
    }
}

std::unique_ptr<Model> MlpNetwork::clone() const {
    return std::make_unique<MlpNetwork>(*this);
}

MlpGradients mlp_backward(const MlpNetwork& net, std::span<const double> x,
                          std::span<const double> upstream) {
    MlpGradients out;
    out.blocks = make_gradient_blocks(net);
    out.input.assign(x.size(), 0.0);
    net.accumulate_gradients(x, upstream, out.blocks, &out.input);
    return out;
}

} // namespace kandistill
