#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstring>
#include <string>
#include <vector>

#include "kandistill.h"
#include "support/fixtures.hpp"

using testutil::TempDir;

namespace {

struct DatasetHandle {
    kd_dataset* ptr = nullptr;
    ~DatasetHandle() { kd_dataset_free(ptr); }
};

struct ModelHandle {
    kd_model* ptr = nullptr;
    ~ModelHandle() { kd_model_free(ptr); }
};

kd_train_config quick_train(int epochs, unsigned long long seed) {
    kd_train_config cfg{};
    cfg.epochs = epochs;
    cfg.batch_size = 64;
    cfg.learning_rate = 1e-3;
    cfg.optimizer = 0;
    cfg.seed = seed;
    return cfg;
}

} // namespace

TEST_CASE("version and error surface") {
    CHECK(std::string(kd_version()) == "0.1.0");
    CHECK(kd_last_error() != nullptr);

    kd_dataset* ds = nullptr;
    CHECK(kd_dataset_open("/no/such/file.kdds", &ds) == KD_ERR_IO);
    CHECK(std::string(kd_last_error()).find("no/such/file") != std::string::npos);
    CHECK(kd_dataset_open(nullptr, &ds) == KD_ERR_INVALID_ARGUMENT);
}

TEST_CASE("synthetic data pipeline through the C surface") {
    TempDir dir("capi");
    DatasetHandle all;
    REQUIRE(kd_dataset_gen_synthetic(470, 30, 8, 99, &all.ptr) == KD_OK);
    CHECK(kd_dataset_rows(all.ptr) == 500);
    CHECK(kd_dataset_features(all.ptr) == 8);

    long long normals = 0, attacks = 0;
    REQUIRE(kd_dataset_class_counts(all.ptr, &normals, &attacks) == KD_OK);
    CHECK(normals == 470);
    CHECK(attacks == 30);

    char name[32];
    REQUIRE(kd_dataset_feature_name(all.ptr, 0, name, sizeof(name)) == KD_OK);
    CHECK(std::string(name) == "f00");
    CHECK(kd_dataset_feature_name(all.ptr, 99, name, sizeof(name)) == KD_ERR_INVALID_ARGUMENT);

    DatasetHandle train, test;
    REQUIRE(kd_dataset_split_scale(all.ptr, 0.2, 0, 0, 0, &train.ptr, &test.ptr) == KD_OK);
    CHECK(kd_dataset_rows(train.ptr) == 400);
    CHECK(kd_dataset_rows(test.ptr) == 100);

    CHECK(kd_dataset_mask(train.ptr, 1.0, 1) == KD_ERR_INVALID_ARGUMENT);
    CHECK(kd_dataset_mask(train.ptr, 0.05, 1) == KD_OK);

    const auto path = dir.file("train.kdds");
    REQUIRE(kd_dataset_save(train.ptr, path.c_str()) == KD_OK);
    DatasetHandle loaded;
    REQUIRE(kd_dataset_open(path.c_str(), &loaded.ptr) == KD_OK);
    CHECK(kd_dataset_rows(loaded.ptr) == 400);
}

TEST_CASE("model lifecycle, training and evaluation") {
    TempDir dir("capi");
    DatasetHandle all, train, test;
    REQUIRE(kd_dataset_gen_synthetic(1880, 120, 8, 7, &all.ptr) == KD_OK);
    REQUIRE(kd_dataset_split_scale(all.ptr, 0.2, 0, 0, 0, &train.ptr, &test.ptr) == KD_OK);

    const int kan_dims[] = {8, 6, 2};
    ModelHandle teacher;
    REQUIRE(kd_model_create_kan(kan_dims, 3, 10, 1, -3.0, 3.0, 5, &teacher.ptr) == KD_OK);
    CHECK(kd_model_kind(teacher.ptr) == 1);
    CHECK(kd_model_input_dim(teacher.ptr) == 8);
    CHECK(kd_model_output_dim(teacher.ptr) == 2);
    CHECK(kd_model_parameter_count(teacher.ptr) == (8 * 6 + 6 * 2) * (10 + 1 + 3) + 6 + 2);

    const auto tc = quick_train(30, 1);
    const auto hist_path = dir.file("teacher_hist.csv");
    REQUIRE(kd_train_teacher(teacher.ptr, train.ptr, &tc, hist_path.c_str()) == KD_OK);

    kd_eval_report teacher_report{};
    REQUIRE(kd_evaluate(teacher.ptr, test.ptr, &teacher_report) == KD_OK);
    CHECK(teacher_report.tp + teacher_report.fp + teacher_report.tn + teacher_report.fn == 400);
    CHECK(teacher_report.accuracy > 0.9);

    // MLP cannot be a teacher.
    const int mlp_dims[] = {8, 4, 2};
    ModelHandle bare, distilled;
    REQUIRE(kd_model_create_mlp(mlp_dims, 3, "relu", 2, &bare.ptr) == KD_OK);
    REQUIRE(kd_model_create_mlp(mlp_dims, 3, "relu", 2, &distilled.ptr) == KD_OK);
    CHECK(kd_train_teacher(bare.ptr, train.ptr, &tc, nullptr) == KD_ERR_INVALID_ARGUMENT);
    CHECK(kd_model_create_mlp(mlp_dims, 3, "gelu", 2, &bare.ptr) == KD_ERR_INVALID_ARGUMENT);

    const auto sc = quick_train(25, 3);
    REQUIRE(kd_train_student(bare.ptr, train.ptr, &sc, nullptr) == KD_OK);

    kd_dkd_config dkd{};
    dkd.alpha = 5.0;
    dkd.beta = 1.0;
    dkd.lambda_mix = 0.2;
    dkd.warmup_epochs = 5;
    dkd.temperature = 4.0;
    REQUIRE(kd_distill_student(distilled.ptr, teacher.ptr, train.ptr, &sc, &dkd,
                               dir.file("student_hist.csv").c_str()) == KD_OK);

    kd_eval_report student_report{};
    REQUIRE(kd_evaluate(distilled.ptr, test.ptr, &student_report) == KD_OK);
    CHECK(student_report.accuracy > 0.8);

    // Save / load round-trip preserves the forward pass.
    const auto model_path = dir.file("student.kdm");
    REQUIRE(kd_model_save(distilled.ptr, model_path.c_str()) == KD_OK);
    ModelHandle reloaded;
    REQUIRE(kd_model_load(model_path.c_str(), &reloaded.ptr) == KD_OK);
    CHECK(kd_model_kind(reloaded.ptr) == 2);

    const double x[8] = {0.1, -0.4, 1.2, 0.0, -1.0, 0.6, 0.3, -0.2};
    double a[2], b[2];
    REQUIRE(kd_model_forward(distilled.ptr, x, 8, a, 2) == KD_OK);
    REQUIRE(kd_model_forward(reloaded.ptr, x, 8, b, 2) == KD_OK);
    CHECK(a[0] == b[0]);
    CHECK(a[1] == b[1]);
    CHECK(kd_model_forward(reloaded.ptr, x, 5, b, 2) == KD_ERR_INVALID_ARGUMENT);

    // Formatting helpers.
    char buf[2048];
    REQUIRE(kd_eval_report_format(&student_report, 1, kd_model_parameter_count(distilled.ptr), buf,
                                  sizeof(buf)) == KD_OK);
    CHECK(std::string(buf).find("f1=") != std::string::npos);
    REQUIRE(kd_eval_report_format(&student_report, 0, 42, buf, sizeof(buf)) == KD_OK);
    CHECK(std::string(buf).find("accuracy") != std::string::npos);
    REQUIRE(kd_eval_report_confusion_csv(&student_report, buf, sizeof(buf)) == KD_OK);
    CHECK(std::count(buf, buf + std::strlen(buf), '\n') == 2);

    const auto emb_path = dir.file("emb.csv");
    REQUIRE(kd_export_embeddings(distilled.ptr, test.ptr, "penultimate", emb_path.c_str()) == KD_OK);
    CHECK(kd_export_embeddings(distilled.ptr, test.ptr, "bogus", emb_path.c_str()) ==
          KD_ERR_INVALID_ARGUMENT);
}

TEST_CASE("csv preparation through the C surface") {
    TempDir dir("capi");
    const auto csv = dir.file("wadi.csv");
    testutil::write_wadi_fixture(csv, 60);

    const auto train_path = dir.file("train.kdds");
    const auto test_path = dir.file("test.kdds");
    kd_prepare_options opts{};
    opts.csv_path = csv.c_str();
    opts.label_column = "label";
    opts.positive_labels = "Attack";
    opts.out_train = train_path.c_str();
    opts.out_test = test_path.c_str();

    char ledger[8192];
    REQUIRE(kd_prepare_csv(&opts, ledger, sizeof(ledger)) == KD_OK);
    CHECK(std::string(ledger).find("4 nan-only") != std::string::npos);

    DatasetHandle train;
    REQUIRE(kd_dataset_open(train_path.c_str(), &train.ptr) == KD_OK);
    CHECK(kd_dataset_features(train.ptr) == 123);

    opts.label_column = "missing_column";
    CHECK(kd_prepare_csv(&opts, nullptr, 0) == KD_ERR_PARSE);

    unsigned int crc = 0;
    REQUIRE(kd_file_crc32(csv.c_str(), &crc) == KD_OK);
    unsigned int crc2 = 0;
    REQUIRE(kd_file_crc32(csv.c_str(), &crc2) == KD_OK);
    CHECK(crc == crc2);
    CHECK(kd_file_crc32("/no/such/file", &crc) == KD_ERR_IO);
}

TEST_CASE("divergence surfaces as its own status") {
    DatasetHandle all;
    REQUIRE(kd_dataset_gen_synthetic(94, 6, 4, 3, &all.ptr) == KD_OK);
    const int dims[] = {4, 3, 2};
    ModelHandle model;
    REQUIRE(kd_model_create_kan(dims, 3, 5, 1, -3.0, 3.0, 1, &model.ptr) == KD_OK);
    auto cfg = quick_train(20, 1);
    cfg.batch_size = 16;
    cfg.learning_rate = 1e155;
    CHECK(kd_train_teacher(model.ptr, all.ptr, &cfg, nullptr) == KD_ERR_DIVERGED);
}
