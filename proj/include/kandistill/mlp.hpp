#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "kandistill/model.hpp"

namespace kandistill {

enum class Activation : std::uint8_t {
    relu = 0,
    tanh = 1,
    silu = 2,
};

std::string activation_name(Activation a);
Activation activation_from_name(const std::string& name);

// Affine layer; weights stored row-major over (input p, output j) like the
// KAN edge tensors: index p * d_out + j.
struct MlpLayer {
    int d_in = 0;
    int d_out = 0;
    std::vector<double> weights; // d_in * d_out
    std::vector<double> bias;    // d_out
};

// Plain feed-forward network: affine layers with the hidden activation
// between them and none after the last.
class MlpNetwork : public Model {
public:
    MlpNetwork() = default;
    MlpNetwork(const std::vector<int>& dims, Activation activation, std::uint64_t seed);

    ModelKind kind() const override { return ModelKind::mlp; }
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

    const std::vector<MlpLayer>& layers() const { return layers_; }
    std::vector<MlpLayer>& layers() { return layers_; }
    Activation activation() const { return activation_; }
    std::vector<int> dims() const;

private:
    std::vector<MlpLayer> layers_;
    Activation activation_ = Activation::relu;
};

struct MlpGradients {
    GradientBlocks blocks;
    std::vector<double> input;
};

MlpGradients mlp_backward(const MlpNetwork& net, std::span<const double> x,
                          std::span<const double> upstream);

// Sum over layers of d_in * d_out + d_out.
std::size_t mlp_parameter_count(const std::vector<int>& dims);

} // namespace kandistill
