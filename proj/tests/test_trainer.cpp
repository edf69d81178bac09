#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <fstream>
#include <limits>

#include "kandistill/errors.hpp"
#include "kandistill/metrics.hpp"
#include "kandistill/model_store.hpp"
#include "kandistill/trainer.hpp"
#include "support/fixtures.hpp"

using namespace kandistill;
using testutil::TempDir;

namespace {

// Near-separable two-feature set: one strongly shifted attack feature, no
// weak rows.
Dataset separable_toy(std::uint64_t seed) {
    SyntheticSpec spec;
    spec.n_normal = 300;
    spec.n_attack = 300;
    spec.n_features = 2;
    spec.primary_shift = 8.0;
    spec.attack_scale = 1.0;
    spec.weak_fraction = 0.0;
    auto data = gen_synthetic(spec, seed);
    const auto scaler = fit_scaler(data);
    apply_scaler(data, scaler);
    return data;
}

Dataset imbalanced_set(std::uint64_t seed, std::size_t n_normal = 1880, std::size_t n_attack = 120) {
    SyntheticSpec spec;
    spec.n_normal = n_normal;
    spec.n_attack = n_attack;
    spec.n_features = 8;
    auto data = gen_synthetic(spec, seed);
    const auto scaler = fit_scaler(data);
    apply_scaler(data, scaler);
    return data;
}

std::vector<std::vector<double>> snapshot(const Model& model) {
    std::vector<std::vector<double>> out;
    for (auto block : model.parameter_blocks()) {
        out.emplace_back(block.begin(), block.end());
    }
    return out;
}

} // namespace

TEST_CASE("zero learning rate leaves parameters untouched") {
    const auto data = separable_toy(1);
    for (auto opt : {OptimizerKind::adam, OptimizerKind::sgd}) {
        KanNetwork net({2, 3, 2}, GridSpec{-3.0, 3.0, 5, 1}, 7);
        const auto before = snapshot(net);
        TrainConfig cfg;
        cfg.epochs = 1;
        cfg.learning_rate = 0.0;
        cfg.optimizer = opt;
        train_teacher(net, data, cfg);
        CHECK(snapshot(net) == before);
    }
}

TEST_CASE("teacher fits a separable toy set") {
    auto data = separable_toy(42);
    KanNetwork net({2, 4, 2}, GridSpec{-3.0, 3.0, 10, 2}, 3);
    TrainConfig cfg;
    cfg.epochs = 200;
    cfg.batch_size = 64;
    cfg.learning_rate = 5e-3;
    cfg.seed = 11;
    const auto history = train_teacher(net, data, cfg);
    REQUIRE(history.size() == 200);
    CHECK(history.back().hard_loss < history.front().hard_loss);
    const auto report = evaluate(net, data);
    CHECK(report.accuracy >= 0.99);
}

TEST_CASE("fixed seeds reproduce loss histories bit for bit") {
    const auto data = imbalanced_set(5, 470, 30);
    TrainConfig cfg;
    cfg.epochs = 5;
    cfg.batch_size = 64;
    cfg.seed = 21;

    KanNetwork a({8, 4, 2}, GridSpec{-3.0, 3.0, 5, 1}, 9);
    KanNetwork b({8, 4, 2}, GridSpec{-3.0, 3.0, 5, 1}, 9);
    const auto ha = train_teacher(a, data, cfg);
    const auto hb = train_teacher(b, data, cfg);
    REQUIRE(ha.size() == hb.size());
    for (std::size_t i = 0; i < ha.size(); ++i) {
        CHECK(ha[i].hard_loss == hb[i].hard_loss);
    }
    CHECK(snapshot(a) == snapshot(b));
}

TEST_CASE("lambda = 0 distillation matches plain supervised training exactly") {
    const auto data = imbalanced_set(6, 470, 30);
    KanNetwork teacher({8, 4, 2}, GridSpec{-3.0, 3.0, 5, 1}, 2);

    MlpNetwork supervised({8, 5, 2}, Activation::relu, 13);
    MlpNetwork distilled({8, 5, 2}, Activation::relu, 13);

    TrainConfig plain;
    plain.epochs = 4;
    plain.batch_size = 32;
    plain.seed = 3;
    const auto h_plain = train_supervised(supervised, data, plain);

    TrainConfig with_dkd = plain;
    with_dkd.dkd = DkdConfig{};
    with_dkd.dkd->lambda_mix = 0.0;
    const auto h_dkd = distill_student(distilled, teacher, data, with_dkd);

    CHECK(snapshot(supervised) == snapshot(distilled));
    for (std::size_t i = 0; i < h_plain.size(); ++i) {
        CHECK(h_plain[i].hard_loss == h_dkd[i].hard_loss);
        CHECK(h_dkd[i].warmup_weight == 0.0);
    }
}

TEST_CASE("the teacher is frozen during distillation") {
    const auto data = imbalanced_set(7, 470, 30);
    KanNetwork teacher({8, 4, 2}, GridSpec{-3.0, 3.0, 5, 1}, 15);
    const auto before = snapshot(teacher);

    MlpNetwork student({8, 5, 2}, Activation::relu, 1);
    TrainConfig cfg;
    cfg.epochs = 3;
    cfg.batch_size = 32;
    cfg.dkd = DkdConfig{};
    distill_student(student, teacher, data, cfg);
    CHECK(snapshot(teacher) == before);
}

TEST_CASE("warm-up weights are logged per epoch") {
    const auto data = imbalanced_set(8, 235, 15);
    KanNetwork teacher({8, 3, 2}, GridSpec{-3.0, 3.0, 5, 1}, 4);
    MlpNetwork student({8, 4, 2}, Activation::relu, 5);

    TrainConfig cfg;
    cfg.epochs = 12;
    cfg.batch_size = 64;
    cfg.dkd = DkdConfig{};
    cfg.dkd->lambda_mix = 0.2;
    cfg.dkd->warmup_epochs = 5;
    const auto history = distill_student(student, teacher, data, cfg);
    REQUIRE(history.size() == 12);
    for (int e = 0; e < 12; ++e) {
        const double expected = 0.2 * std::min(static_cast<double>(e) / 5.0, 1.0);
        CHECK(std::fabs(history[static_cast<std::size_t>(e)].warmup_weight - expected) <= 1e-15);
        if (e > 0) CHECK(history[static_cast<std::size_t>(e)].dkd_loss >= 0.0);
    }
}

TEST_CASE("distillation runs end to end and the student learns") {
    auto data = imbalanced_set(9);
    KanNetwork teacher({8, 6, 2}, GridSpec{-3.0, 3.0, 10, 1}, 31);
    TrainConfig tcfg;
    tcfg.epochs = 40;
    tcfg.batch_size = 128;
    tcfg.seed = 1;
    train_teacher(teacher, data, tcfg);
    const auto teacher_report = evaluate(teacher, data);
    CHECK(teacher_report.f1 > 0.7);

    MlpNetwork student({8, 4, 2}, Activation::relu, 77);
    TrainConfig scfg;
    scfg.epochs = 40;
    scfg.batch_size = 128;
    scfg.seed = 2;
    scfg.dkd = DkdConfig{};
    scfg.dkd->alpha = 5.0;
    scfg.dkd->beta = 1.0;
    scfg.dkd->lambda_mix = 0.2;
    scfg.dkd->warmup_epochs = 5;
    const auto history = distill_student(student, teacher, data, scfg);
    const auto report = evaluate(student, data);
    CHECK(report.f1 > 0.6);
    CHECK(history.back().dkd_loss >= 0.0);
}

TEST_CASE("class weights reshape the hard loss") {
    const auto data = imbalanced_set(10, 470, 30);
    MlpNetwork a({8, 4, 2}, Activation::relu, 3);
    MlpNetwork b({8, 4, 2}, Activation::relu, 3);
    TrainConfig cfg;
    cfg.epochs = 2;
    cfg.batch_size = 32;
    const auto ha = train_supervised(a, data, cfg);
    cfg.class_weights = {1.0, 5.0};
    const auto hb = train_supervised(b, data, cfg);
    CHECK(ha[0].hard_loss != hb[0].hard_loss);

    cfg.class_weights = {0.0, 1.0};
    MlpNetwork c({8, 4, 2}, Activation::relu, 3);
    CHECK_THROWS_AS(train_supervised(c, data, cfg), InvalidArgument);
}

TEST_CASE("divergence aborts with a diagnostic") {
    const auto data = imbalanced_set(11, 94, 6);

    KanNetwork poisoned({8, 3, 2}, GridSpec{-3.0, 3.0, 5, 1}, 5);
    poisoned.layers()[0].omega_b[0] = std::numeric_limits<double>::quiet_NaN();
    TrainConfig cfg;
    cfg.epochs = 1;
    cfg.batch_size = 16;
    CHECK_THROWS_AS(train_teacher(poisoned, data, cfg), DivergenceError);

    KanNetwork exploding({8, 3, 2}, GridSpec{-3.0, 3.0, 5, 1}, 5);
    TrainConfig wild;
    wild.epochs = 20;
    wild.batch_size = 16;
    wild.learning_rate = 1e155;
    CHECK_THROWS_AS(train_teacher(exploding, data, wild), DivergenceError);
}

TEST_CASE("config and shape validation") {
    const auto data = imbalanced_set(12, 94, 6);
    MlpNetwork net({8, 4, 2}, Activation::relu, 1);

    TrainConfig cfg;
    cfg.epochs = 0;
    CHECK_THROWS_AS(train_supervised(net, data, cfg), InvalidArgument);
    cfg = {};
    cfg.batch_size = 0;
    CHECK_THROWS_AS(train_supervised(net, data, cfg), InvalidArgument);
    cfg = {};
    cfg.dkd = DkdConfig{};
    CHECK_THROWS_AS(train_supervised(net, data, cfg), InvalidArgument);

    KanNetwork teacher({8, 3, 2}, GridSpec{-3.0, 3.0, 5, 1}, 2);
    TrainConfig dcfg;
    CHECK_THROWS_AS(distill_student(net, teacher, data, dcfg), InvalidArgument);

    KanNetwork narrow({4, 3, 2}, GridSpec{-3.0, 3.0, 5, 1}, 2);
    dcfg.dkd = DkdConfig{};
    CHECK_THROWS_AS(distill_student(net, narrow, data, dcfg), DimensionError);

    MlpNetwork wrong_width({5, 4, 2}, Activation::relu, 1);
    CHECK_THROWS_AS(train_supervised(wrong_width, data, cfg), InvalidArgument);
}

TEST_CASE("per-epoch checkpoints are written and resumable") {
    TempDir dir("train");
    const auto data = imbalanced_set(13, 235, 15);
    MlpNetwork net({8, 4, 2}, Activation::relu, 6);
    TrainConfig cfg;
    cfg.epochs = 3;
    cfg.batch_size = 64;
    cfg.checkpoint_path = dir.file("run.kdcp");
    train_supervised(net, data, cfg);

    const auto ckpt = load_checkpoint(cfg.checkpoint_path);
    CHECK(ckpt.epoch == 2);
    CHECK(std::isfinite(ckpt.running_loss));
    REQUIRE(ckpt.model != nullptr);
    // Final checkpoint holds the final parameters.
    CHECK(snapshot(*ckpt.model) == snapshot(net));
}

TEST_CASE("history files carry the four columns") {
    TempDir dir("hist");
    LossHistory history = {{0, 0.5, 0.25, 0.0}, {1, 0.375, 0.125, 0.04}};
    const auto path = dir.file("loss.csv");
    write_history(history, path);

    std::ifstream in(path);
    std::string line;
    std::getline(in, line);
    CHECK(line == "epoch,hard_loss,dkd_loss,warmup_weight");
    std::getline(in, line);
    CHECK(line == "0,0.5,0.25,0");
    std::getline(in, line);
    CHECK(line.substr(0, 2) == "1,");
    CHECK_FALSE(std::getline(in, line));
}
