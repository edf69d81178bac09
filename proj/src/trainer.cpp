#include "kandistill/trainer.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>

#include "kandistill/errors.hpp"
#include "kandistill/model_store.hpp"
#include "kandistill/rng.hpp"

namespace kandistill {

std::string optimizer_name(OptimizerKind k) {
    return k == OptimizerKind::adam ? "adam" : "sgd";
}

OptimizerKind optimizer_from_name(const std::string& name) {
    if (name == "adam") return OptimizerKind::adam;
    if (name == "sgd") return OptimizerKind::sgd;
    throw InvalidArgument("unknown optimizer: " + name);
}

void TrainConfig::validate() const {
    if (epochs < 1) throw InvalidArgument("epochs must be positive");
    if (batch_size < 1) throw InvalidArgument("batch_size must be positive");
    if (!(learning_rate >= 0.0)) throw InvalidArgument("learning_rate must be >= 0");
    if (dkd) dkd->validate();
    if (class_weights) {
        if (!(class_weights->first > 0.0) || !(class_weights->second > 0.0)) {
            throw InvalidArgument("class weights must be positive");
        }
    }
}

namespace {

constexpr double kAdamBeta1 = 0.9;
constexpr double kAdamBeta2 = 0.999;
constexpr double kAdamEps = 1e-8;

struct AdamState {
    std::vector<std::vector<double>> m;
    std::vector<std::vector<double>> v;
    long long t = 0;
};

void optimizer_step(std::vector<std::span<double>>& params, const GradientBlocks& grads,
                    const TrainConfig& cfg, AdamState& adam) {
    if (cfg.optimizer == OptimizerKind::sgd) {
        for (std::size_t b = 0; b < params.size(); ++b) {
            for (std::size_t i = 0; i < params[b].size(); ++i) {
                params[b][i] -= cfg.learning_rate * grads[b][i];
            }
        }
        return;
    }
    ++adam.t;
    const double bc1 = 1.0 - std::pow(kAdamBeta1, static_cast<double>(adam.t));
    const double bc2 = 1.0 - std::pow(kAdamBeta2, static_cast<double>(adam.t));
    for (std::size_t b = 0; b < params.size(); ++b) {
        auto& m = adam.m[b];
        auto& v = adam.v[b];
        for (std::size_t i = 0; i < params[b].size(); ++i) {
            const double g = grads[b][i];
            m[i] = kAdamBeta1 * m[i] + (1.0 - kAdamBeta1) * g;
            v[i] = kAdamBeta2 * v[i] + (1.0 - kAdamBeta2) * g * g;
            params[b][i] -= cfg.learning_rate * (m[i] / bc1) / (std::sqrt(v[i] / bc2) + kAdamEps);
        }
    }
}

LossHistory run_training(Model& model, const Model* teacher, const Dataset& data,
                         const TrainConfig& cfg) {
    cfg.validate();
    if (data.n_rows == 0) throw InvalidArgument("cannot train on an empty dataset");
    if (static_cast<std::size_t>(model.input_dim()) != data.n_features) {
        throw DimensionError("model input dimension does not match dataset feature count");
    }
    if (model.output_dim() < 2) throw DimensionError("classification model needs >= 2 outputs");
    if (teacher) {
        if (teacher->input_dim() != model.input_dim()) {
            throw DimensionError("teacher input dimension does not match student");
        }
        if (teacher->output_dim() != model.output_dim()) {
            throw DimensionError("teacher output dimension does not match student");
        }
    }

    Rng rng(cfg.seed);
    auto params = model.parameter_blocks();
    GradientBlocks grads = make_gradient_blocks(model);
    AdamState adam;
    if (cfg.optimizer == OptimizerKind::adam) {
        adam.m = make_gradient_blocks(model);
        adam.v = make_gradient_blocks(model);
    }

    const bool use_dkd = teacher != nullptr && cfg.dkd.has_value() && cfg.dkd->lambda_mix > 0.0;
    const double w_normal = cfg.class_weights ? cfg.class_weights->first : 1.0;
    const double w_attack = cfg.class_weights ? cfg.class_weights->second : 1.0;

    std::vector<std::size_t> order(data.n_rows);
    std::iota(order.begin(), order.end(), std::size_t{0});

    LossHistory history;
    history.reserve(static_cast<std::size_t>(cfg.epochs));
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        shuffle(order, rng);
        const double warm = cfg.dkd ? cfg.dkd->lambda_mix * warmup_factor(epoch, cfg.dkd->warmup_epochs) : 0.0;
        double epoch_hard = 0.0;
        double epoch_dkd = 0.0;

        std::size_t pos = 0;
        std::size_t batch_index = 0;
        while (pos < order.size()) {
            const std::size_t batch_n = std::min<std::size_t>(cfg.batch_size, order.size() - pos);
            zero_gradient_blocks(grads);
            double batch_hard = 0.0;
            double batch_dkd = 0.0;
            // Shapes were validated up front, so a value error from inside
            // the networks here means parameters or activations went
            // non-finite: report it as divergence.
            try {
                for (std::size_t b = 0; b < batch_n; ++b) {
                    const std::size_t i = order[pos + b];
                    const auto x = data.row(i);
                    const int target = data.labels[i] ? 1 : 0;
                    const double cw = data.labels[i] ? w_attack : w_normal;

                    const auto logits = model.forward(x);
                    const double hard = cw * cross_entropy(logits, target);
                    auto upstream = cross_entropy_grad(logits, target);
                    for (auto& g : upstream) g *= cw;

                    if (use_dkd) {
                        const auto teacher_logits = teacher->forward(x);
                        batch_dkd += dkd_loss(teacher_logits, logits, target, *cfg.dkd);
                        const double hard_w = 1.0 - cfg.dkd->lambda_mix;
                        for (auto& g : upstream) g *= hard_w;
                        if (warm != 0.0) {
                            const auto dg = dkd_loss_grad(teacher_logits, logits, target, *cfg.dkd);
                            for (std::size_t c = 0; c < upstream.size(); ++c) upstream[c] += warm * dg[c];
                        }
                    }
                    batch_hard += hard;
                    model.accumulate_gradients(x, upstream, grads, nullptr);
                }
            } catch (const InvalidArgument& e) {
                throw DivergenceError("training diverged at epoch " + std::to_string(epoch) +
                                      ", batch " + std::to_string(batch_index) + ": " + e.what());
            }

            if (!std::isfinite(batch_hard) || !std::isfinite(batch_dkd)) {
                throw DivergenceError("training diverged (non-finite loss) at epoch " +
                                      std::to_string(epoch) + ", batch " +
                                      std::to_string(batch_index));
            }

            const double inv = 1.0 / static_cast<double>(batch_n);
            for (auto& g : grads) {
                for (auto& v : g) v *= inv;
            }
            optimizer_step(params, grads, cfg, adam);

            epoch_hard += batch_hard;
            epoch_dkd += batch_dkd;
            pos += batch_n;
            ++batch_index;
        }

        EpochStats stats;
        stats.epoch = epoch;
        stats.hard_loss = epoch_hard / static_cast<double>(data.n_rows);
        stats.dkd_loss = epoch_dkd / static_cast<double>(data.n_rows);
        stats.warmup_weight = warm;
        history.push_back(stats);

        if (!cfg.checkpoint_path.empty()) {
            Checkpoint ckpt;
            ckpt.model = model.clone();
            ckpt.epoch = static_cast<std::uint32_t>(epoch);
            ckpt.running_loss = stats.hard_loss + stats.dkd_loss;
            ckpt.rng = rng.state();
            save_checkpoint(ckpt, cfg.checkpoint_path);
        }
    }
    return history;
}

} // namespace

LossHistory train_supervised(Model& model, const Dataset& train, const TrainConfig& cfg) {
    if (cfg.dkd) {
        throw InvalidArgument("train_supervised takes no dkd config; use distill_student");
    }
    return run_training(model, nullptr, train, cfg);
}

LossHistory train_teacher(KanNetwork& net, const Dataset& train, const TrainConfig& cfg) {
    return train_supervised(net, train, cfg);
}

LossHistory distill_student(Model& student, const Model& teacher, const Dataset& train,
                            const TrainConfig& cfg) {
    if (!cfg.dkd) throw InvalidArgument("distill_student requires a dkd config");
    return run_training(student, &teacher, train, cfg);
}

void write_history(const LossHistory& history, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open file for writing: " + path);
    out << "epoch,hard_loss,dkd_loss,warmup_weight\n";
    char line[160];
    for (const auto& e : history) {
        std::snprintf(line, sizeof(line), "%d,%.17g,%.17g,%.17g\n", e.epoch, e.hard_loss,
                      e.dkd_loss, e.warmup_weight);
        out << line;
    }
    if (!out) throw IoError("write failed: " + path);
}

} // namespace kandistill
