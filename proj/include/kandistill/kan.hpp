#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "kandistill/model.hpp"
#include "kandistill/spline.hpp"

namespace kandistill {

// SiLU(x) = x / (1 + e^-x) and its derivative.
double silu(double x);
double silu_derivative(double x);

// Accumulator views for one layer's parameter gradients.
struct KanLayerGrads {
    std::span<double> omega_b;
    std::span<double> omega_s;
    std::span<double> shift;
    std::span<double> coeffs;
    std::span<double> bias;
};

// One KAN layer. Every edge (p, j) carries a learnable activation
// phi(x) = omega_b * SiLU(x) + omega_s * Spline(x + shift); node j sums its
// incoming edge activations plus a bias. Edge tensors are stored row-major
// over (input p, output j), i.e. index p * d_out + j.
struct KanLayer {
    int d_in = 0;
    int d_out = 0;
    SplineGrid grid;
    std::vector<double> omega_b; // d_in * d_out
    std::vector<double> omega_s; // d_in * d_out
    std::vector<double> shift;   // d_in * d_out
    std::vector<double> coeffs;  // d_in * d_out * basis_count, contiguous per edge
    std::vector<double> bias;    // d_out

    std::size_t edge_count() const { return static_cast<std::size_t>(d_in) * static_cast<std::size_t>(d_out); }
    std::size_t parameter_count() const;

    void forward(std::span<const double> in, std::span<double> out) const;
    // Accumulates parameter gradients and d/d(in) given d/d(out).
    void backward(std::span<const double> in, std::span<const double> grad_out,
                  KanLayerGrads grads, std::span<double> grad_in) const;
};

struct GridSpec {
    double domain_lo = -3.0;
    double domain_hi = 3.0;
    int grid_size = 50;
    int order = 1;
};

class KanNetwork : public Model {
public:
    KanNetwork() = default;
    // dims = [T, hidden..., C]; all layers share one grid configuration.
    KanNetwork(const std::vector<int>& dims, const GridSpec& grid, std::uint64_t seed);

    ModelKind kind() const override { return ModelKind::kan; }
    int input_dim() const override { return layers_.front().d_in; }
    int output_dim() const override { return layers_.back().d_out; }
    std::size_t parameter_count() const override;

    std::vector<double> forward(std::span<const double> x) const override;
    std::vector<double> penultimate(std::span<const double> x) const override;

    std::vector<std::span<double>> parameter_blocks() override;
    std::vector<std::span<const double>> parameter_blocks() const override;
    void accumulate_gradients(std::span<const double> x, std::span<const double> upstream,
                              GradientBlocks& grads, std::vector<double>* input_grad) const override;
    std::unique_ptr<Model> clone() const override;

    const std::vector<KanLayer>& layers() const { return layers_; }
    std::vector<KanLayer>& layers() { return layers_; }
    std::vector<int> dims() const;
    const GridSpec& grid_spec() const { return grid_spec_; }

private:
    std::vector<KanLayer> layers_;
    GridSpec grid_spec_;
};

// Single-sample gradient set, in spec terms.
struct KanGradients {
    GradientBlocks blocks;       // layout of parameter_blocks()
    std::vector<double> input;   // d/dx
};

KanGradients kan_backward(const KanNetwork& net, std::span<const double> x,
                          std::span<const double> upstream);

// Closed-form parameter count: sum over layers of
// (d_in * d_out) * (G + K + 3) + d_out.
std::size_t kan_parameter_count(const std::vector<int>& dims, int grid_size, int order);

} // namespace kandistill
