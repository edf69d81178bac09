#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

namespace kandistill {

enum class ModelKind : std::uint8_t {
    kan = 1,
    mlp = 2,
};

// Gradient buffers matching Model::parameter_blocks(), one vector per block.
using GradientBlocks = std::vector<std::vector<double>>;

// Common surface of the two network types: forward evaluation, reverse-mode
// gradients and flat parameter access for the optimizer and the stores.
class Model {
public:
    virtual ~Model() = default;

    virtual ModelKind kind() const = 0;
    virtual int input_dim() const = 0;
    virtual int output_dim() const = 0;
    virtual std::size_t parameter_count() const = 0;

    virtual std::vector<double> forward(std::span<const double> x) const = 0;

    // Output of the layer feeding the final transformation; the input itself
    // for single-layer networks.
    virtual std::vector<double> penultimate(std::span<const double> x) const = 0;

    // Mutable views over every trainable scalar, grouped per tensor.
    virtual std::vector<std::span<double>> parameter_blocks() = 0;
    virtual std::vector<std::span<const double>> parameter_blocks() const = 0;

    // Adds d(logits . upstream)/dparam into `grads` (layout of
    // parameter_blocks) and, when requested, d/dx into `input_grad`.
    virtual void accumulate_gradients(std::span<const double> x,
                                      std::span<const double> upstream,
                                      GradientBlocks& grads,
                                      std::vector<double>* input_grad) const = 0;

    virtual std::unique_ptr<Model> clone() const = 0;
};

GradientBlocks make_gradient_blocks(const Model& model);
void zero_gradient_blocks(GradientBlocks& grads);

} // namespace kandistill
