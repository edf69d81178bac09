#pragma once

#include <memory>
#include <string>

#include "kandistill/kan.hpp"
#include "kandistill/mlp.hpp"
#include "kandistill/rng.hpp"

namespace kandistill {

// Versioned binary model container. Layout: magic "KDKD", format version
// u32, model kind tag u8, dims, per-kind header (grid size, order, domain
// bounds for KAN; activation tag for MLP), then every parameter as a
// little-endian 64-bit float in layer-major, edge-row-major order (per edge:
// omega_b, omega_s, shift, coeffs; then the layer bias), and a crc32
// trailer. Round-trips are bit-exact.
void save_model(const Model& model, const std::string& path);
std::unique_ptr<Model> load_model(const std::string& path);

// Kind-checked loads; a container of the other kind raises FormatError.
KanNetwork load_kan(const std::string& path);
MlpNetwork load_mlp(const std::string& path);

// Training checkpoint: the model plus enough loop state to resume.
struct Checkpoint {
    std::unique_ptr<Model> model;
    std::uint32_t epoch = 0;
    double running_loss = 0.0;
    RngState rng;
};

void save_checkpoint(const Checkpoint& ckpt, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

} // namespace kandistill
