#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "kandistill/data.hpp"
#include "kandistill/distill.hpp"
#include "kandistill/kan.hpp"
#include "kandistill/mlp.hpp"

namespace kandistill {

enum class OptimizerKind : std::uint8_t {
    adam = 0,
    sgd = 1,
};

std::string optimizer_name(OptimizerKind k);
OptimizerKind optimizer_from_name(const std::string& name);

struct TrainConfig {
    int epochs = 100;
    int batch_size = 256;
    double learning_rate = 1e-3;
    OptimizerKind optimizer = OptimizerKind::adam;
    std::uint64_t seed = 0;
    std::optional<DkdConfig> dkd; // present only for distillation runs
    std::optional<std::pair<double, double>> class_weights; // (normal, attack), hard loss only
    std::string checkpoint_path; // written after every epoch when non-empty

    void validate() const;
};

struct EpochStats {
    int epoch = 0;
    double hard_loss = 0.0;     // mean (optionally class-weighted) cross-entropy
    double dkd_loss = 0.0;      // mean DKD value, 0 for supervised runs
    double warmup_weight = 0.0; // lambda * min(epoch / warmup, 1)
};

using LossHistory = std::vector<EpochStats>;

// Mini-batch training with cross-entropy only; cfg.dkd must be absent.
LossHistory train_supervised(Model& model, const Dataset& train, const TrainConfig& cfg);

// The teacher path: supervised cross-entropy on a KAN.
LossHistory train_teacher(KanNetwork& net, const Dataset& train, const TrainConfig& cfg);

// Student training against a frozen teacher with the mixed objective
// (1 - lambda) * hard + lambda * min(epoch / warmup, 1) * dkd; cfg.dkd is
// required. With lambda == 0 the trajectory matches train_supervised
// exactly for the same seed.
LossHistory distill_student(Model& student, const Model& teacher, const Dataset& train,
                            const TrainConfig& cfg);

// Delimited text: epoch, hard_loss, dkd_loss, warmup_weight.
void write_history(const LossHistory& history, const std::string& path);

} // namespace kandistill
