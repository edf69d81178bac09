#include "kandistill/kan.hpp"

#include <algorithm>
#include <cmath>

#include "kandistill/errors.hpp"
#include "kandistill/rng.hpp"

namespace kandistill {

double silu(double x) {
    return x / (1.0 + std::exp(-x));
}

double silu_derivative(double x) {
    const double s = 1.0 / (1.0 + std::exp(-x));
    return s * (1.0 + x * (1.0 - s));
}

std::size_t KanLayer::parameter_count() const {
    return edge_count() * static_cast<std::size_t>(grid.basis_count() + 3) + bias.size();
}

void KanLayer::forward(std::span<const double> in, std::span<double> out) const {
    const int nb = grid.basis_count();
    const int k = grid.order;
    thread_local std::vector<double> basis;
    basis.assign(static_cast<std::size_t>(k + 1), 0.0);

    for (int j = 0; j < d_out; ++j) out[static_cast<std::size_t>(j)] = bias[static_cast<std::size_t>(j)];

    for (int p = 0; p < d_in; ++p) {
        const double x = in[static_cast<std::size_t>(p)];
        const double s = silu(x);
        const std::size_t row = static_cast<std::size_t>(p) * static_cast<std::size_t>(d_out);
        for (int j = 0; j < d_out; ++j) {
            const std::size_t e = row + static_cast<std::size_t>(j);
            const int first = basis_nonzero(grid, x + shift[e], basis);
            const double* c = coeffs.data() + e * static_cast<std::size_t>(nb) + static_cast<std::size_t>(first);
            double spline = 0.0;
            for (int r = 0; r <= k; ++r) spline += c[r] * basis[static_cast<std::size_t>(r)];
            out[static_cast<std::size_t>(j)] += omega_b[e] * s + omega_s[e] * spline;
        }
    }
}

void KanLayer::backward(std::span<const double> in, std::span<const double> grad_out,
                        KanLayerGrads grads, std::span<double> grad_in) const {
    const int nb = grid.basis_count();
    const int k = grid.order;
    thread_local std::vector<double> basis, dbasis;
    basis.assign(static_cast<std::size_t>(k + 1), 0.0);
    dbasis.assign(static_cast<std::size_t>(k + 1), 0.0);

    for (int j = 0; j < d_out; ++j) grads.bias[static_cast<std::size_t>(j)] += grad_out[static_cast<std::size_t>(j)];

    for (int p = 0; p < d_in; ++p) {
        const double x = in[static_cast<std::size_t>(p)];
        const double s = silu(x);
        const double ds = silu_derivative(x);
        const std::size_t row = static_cast<std::size_t>(p) * static_cast<std::size_t>(d_out);
        double gx = 0.0;
        for (int j = 0; j < d_out; ++j) {
            const std::size_t e = row + static_cast<std::size_t>(j);
            const double g = grad_out[static_cast<std::size_t>(j)];
            const double u = x + shift[e];
            const int first = basis_nonzero(grid, u, basis);
            basis_nonzero_derivatives(grid, u, dbasis);
            const std::size_t coff = e * static_cast<std::size_t>(nb) + static_cast<std::size_t>(first);
            const double* c = coeffs.data() + coff;
            double spline = 0.0;
            double dspline = 0.0;
            for (int r = 0; r <= k; ++r) {
                spline += c[r] * basis[static_cast<std::size_t>(r)];
                dspline += c[r] * dbasis[static_cast<std::size_t>(r)];
            }
            grads.omega_b[e] += g * s;
            grads.omega_s[e] += g * spline;
            const double gc = g * omega_s[e];
            double* cg = grads.coeffs.data() + coff;
            for (int r = 0; r <= k; ++r) cg[r] += gc * basis[static_cast<std::size_t>(r)];

            // The clamp pins the spline input at the boundary, so no
            // gradient flows through it from outside the domain.
            const bool interior = u >= grid.domain_lo && u <= grid.domain_hi;
            if (interior) {
                grads.shift[e] += gc * dspline;
                gx += gc * dspline;
            }
            gx += g * omega_b[e] * ds;
        }
        grad_in[static_cast<std::size_t>(p)] += gx;
    }
}

namespace {

KanLayer make_layer(int d_in, int d_out, const GridSpec& spec, Rng& rng) {
    KanLayer layer;
    layer.d_in = d_in;
    layer.d_out = d_out;
    layer.grid = SplineGrid::make(spec.domain_lo, spec.domain_hi, spec.grid_size, spec.order);
    const std::size_t n_edges = layer.edge_count();
    const std::size_t nb = static_cast<std::size_t>(layer.grid.basis_count());
    layer.omega_b.resize(n_edges);
    layer.omega_s.assign(n_edges, 1.0);
    layer.shift.assign(n_edges, 0.0);
    layer.coeffs.resize(n_edges * nb);
    layer.bias.assign(static_cast<std::size_t>(d_out), 0.0);

    const double bound = 1.0 / std::sqrt(static_cast<double>(d_in));
    for (auto& w : layer.omega_b) w = rng.uniform(-bound, bound);
    for (auto& c : layer.coeffs) c = 0.1 * rng.normal();
    return layer;
}

} // namespace

KanNetwork::KanNetwork(const std::vector<int>& dims, const GridSpec& grid, std::uint64_t seed) {
    if (dims.size() < 2) throw InvalidArgument("KAN needs at least an input and an output dimension");
    for (int d : dims) {
        if (d < 1) throw InvalidArgument("KAN dimensions must be positive");
    }
    grid_spec_ = grid;
    Rng rng(seed);
    layers_.reserve(dims.size() - 1);
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
        layers_.push_back(make_layer(dims[l], dims[l + 1], grid, rng));
    }
}

std::vector<int> KanNetwork::dims() const {
    std::vector<int> d;
    d.push_back(layers_.front().d_in);
    for (const auto& layer : layers_) d.push_back(layer.d_out);
    return d;
}

std::size_t KanNetwork::parameter_count() const {
    std::size_t n = 0;
    for (const auto& layer : layers_) n += layer.parameter_count();
    return n;
}

std::size_t kan_parameter_count(const std::vector<int>& dims, int grid_size, int order) {
    std::size_t n = 0;
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
        const auto d_in = static_cast<std::size_t>(dims[l]);
        const auto d_out = static_cast<std::size_t>(dims[l + 1]);
        n += d_in * d_out * static_cast<std::size_t>(grid_size + order + 3) + d_out;
    }
    return n;
}

std::vector<double> KanNetwork::forward(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != input_dim()) {
        throw DimensionError("KAN forward: input length does not match input_dim");
    }
    std::vector<double> cur(x.begin(), x.end());
    std::vector<double> next;
    for (const auto& layer : layers_) {
        next.assign(static_cast<std::size_t>(layer.d_out), 0.0);
        layer.forward(cur, next);
        cur.swap(next);
    }
    return cur;
}

std::vector<double> KanNetwork::penultimate(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != input_dim()) {
        throw DimensionError("KAN penultimate: input length does not match input_dim");
    }
    std::vector<double> cur(x.begin(), x.end());
    std::vector<double> next;
    for (std::size_t l = 0; l + 1 < layers_.size(); ++l) {
        next.assign(static_cast<std::size_t>(layers_[l].d_out), 0.0);
        layers_[l].forward(cur, next);
        cur.swap(next);
    }
    return cur;
}

std::vector<std::span<double>> KanNetwork::parameter_blocks() {
    std::vector<std::span<double>> blocks;
    blocks.reserve(layers_.size() * 5);
    for (auto& layer : layers_) {
        blocks.emplace_back(layer.omega_b);
        blocks.emplace_back(layer.omega_s);
        blocks.emplace_back(layer.shift);
        blocks.emplace_back(layer.coeffs);
        blocks.emplace_back(layer.bias);
    }
    return blocks;
}

std::vector<std::span<const double>> KanNetwork::parameter_blocks() const {
    std::vector<std::span<const double>> blocks;
    blocks.reserve(layers_.size() * 5);
    for (const auto& layer : layers_) {
        blocks.emplace_back(layer.omega_b);
        blocks.emplace_back(layer.omega_s);
        blocks.emplace_back(layer.shift);
        blocks.emplace_back(layer.coeffs);
        blocks.emplace_back(layer.bias);
    }
    return blocks;
}

void KanNetwork::accumulate_gradients(std::span<const double> x, std::span<const double> upstream,
                                      GradientBlocks& grads, std::vector<double>* input_grad) const {
    if (static_cast<int>(x.size()) != input_dim()) {
        throw DimensionError("KAN backward: input length does not match input_dim");
    }
    if (static_cast<int>(upstream.size()) != output_dim()) {
        throw DimensionError("KAN backward: upstream length does not match output_dim");
    }
    if (grads.size() != layers_.size() * 5) {
        throw DimensionError("KAN backward: gradient block count mismatch");
    }

    // Forward pass, keeping every layer input.
    std::vector<std::vector<double>> inputs;
    inputs.reserve(layers_.size());
    std::vector<double> cur(x.begin(), x.end());
    for (const auto& layer : layers_) {
        inputs.push_back(cur);
        std::vector<double> next(static_cast<std::size_t>(layer.d_out), 0.0);
        layer.forward(inputs.back(), next);
        cur.swap(next);
    }

    // Reverse pass.
    std::vector<double> grad_out(upstream.begin(), upstream.end());
    for (std::size_t l = layers_.size(); l-- > 0;) {
        const auto& layer = layers_[l];
        KanLayerGrads view{grads[l * 5 + 0], grads[l * 5 + 1], grads[l * 5 + 2],
                           grads[l * 5 + 3], grads[l * 5 + 4]};
        std::vector<double> grad_in(static_cast<std::size_t>(layer.d_in), 0.0);
        layer.backward(inputs[l], grad_out, view, grad_in);
        grad_out.swap(grad_in);
    }
    if (input_grad) {
        for (std::size_t i = 0; i < grad_out.size(); ++i) (*input_grad)[i] += grad_out[i];
    }
}

std::unique_ptr<Model> KanNetwork::clone() const {
    return std::make_unique<KanNetwork>(*this);
}

GradientBlocks make_gradient_blocks(const Model& model) {
    GradientBlocks grads;
    for (auto block : model.parameter_blocks()) {
        grads.emplace_back(block.size(), 0.0);
    }
    return grads;
}

void zero_gradient_blocks(GradientBlocks& grads) {
    for (auto& g : grads) std::fill(g.begin(), g.end(), 0.0);
}

KanGradients kan_backward(const KanNetwork& net, std::span<const double> x,
                          std::span<const double> upstream) {
    KanGradients out;
    out.blocks = make_gradient_blocks(net);
    out.input.assign(x.size(), 0.0);
    net.accumulate_gradients(x, upstream, out.blocks, &out.input);
    return out;
}

} // namespace kandistill
