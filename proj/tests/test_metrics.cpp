#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <fstream>
#include <sstream>

#include "kandistill/errors.hpp"
#include "kandistill/metrics.hpp"
#include "kandistill/mlp.hpp"
#include "kandistill/rng.hpp"
#include "support/fixtures.hpp"

using namespace kandistill;
using testutil::TempDir;

namespace {

// Single-feature dataset whose label equals sign(x).
Dataset sign_dataset(const std::vector<int>& labels) {
    Dataset data;
    data.n_rows = labels.size();
    data.n_features = 1;
    data.feature_names = {"x"};
    for (int l : labels) {
        data.features.push_back(l ? 1.0 : -1.0);
        data.labels.push_back(static_cast<std::uint8_t>(l));
    }
    return data;
}

// logits = (-x, x): predicts attack iff x > 0.
MlpNetwork sign_model() {
    MlpNetwork net({1, 2}, Activation::relu, 0);
    net.layers()[0].weights = {-1.0, 1.0};
    net.layers()[0].bias = {0.0, 0.0};
    return net;
}

} // namespace

TEST_CASE("perfect predictions score 1 everywhere") {
    const auto data = sign_dataset({0, 1, 0, 1});
    const auto report = evaluate(sign_model(), data);
    CHECK(report.tp == 2);
    CHECK(report.tn == 2);
    CHECK(report.fp == 0);
    CHECK(report.fn == 0);
    CHECK(report.accuracy == 1.0);
    CHECK(report.precision == 1.0);
    CHECK(report.recall == 1.0);
    CHECK(report.f1 == 1.0);
}

TEST_CASE("all-normal predictions on an imbalanced set degrade gracefully") {
    const auto data = sign_dataset({0, 0, 0, 0, 0, 0, 1, 1});
    MlpNetwork net({1, 2}, Activation::relu, 0);
    net.layers()[0].weights = {0.0, 0.0};
    net.layers()[0].bias = {10.0, -10.0}; // always class 0
    const auto report = evaluate(net, data);
    CHECK(report.tp == 0);
    CHECK(report.fp == 0);
    CHECK(report.fn == 2);
    CHECK(report.tn == 6);
    CHECK(report.recall == 0.0);
    CHECK(report.f1 == 0.0);
    CHECK(report.precision == 0.0);
    CHECK_FALSE(report.precision_defined);
    CHECK(report.recall_defined); // 0/2 is a defined zero
    CHECK_FALSE(report.f1_defined);
}

TEST_CASE("hand-computed counts") {
    const auto report = report_from_counts(3, 1, 4, 2);
    CHECK(report.precision == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(report.recall == doctest::Approx(0.6).epsilon(1e-15));
    CHECK(report.f1 == doctest::Approx(2.0 * (0.75 * 0.6) / 1.35).epsilon(1e-15));
    CHECK(report.accuracy == doctest::Approx(0.7).epsilon(1e-15));
    CHECK(report.total() == 10);
}

TEST_CASE("metric identities on random counts") {
    Rng rng(15);
    for (int t = 0; t < 200; ++t) {
        const auto tp = rng.below(50);
        const auto fp = rng.below(50);
        const auto tn = rng.below(50);
        const auto fn = rng.below(50);
        if (tp + fp + tn + fn == 0) continue;
        const auto r = report_from_counts(tp, fp, tn, fn);
        CHECK(r.accuracy ==
              doctest::Approx(static_cast<double>(tp + tn) / static_cast<double>(tp + fp + tn + fn)));
        if (tp + fp > 0) {
            CHECK(r.precision == doctest::Approx(static_cast<double>(tp) / static_cast<double>(tp + fp)));
        } else {
            CHECK(r.precision == 0.0);
        }
        if (tp + fn > 0) {
            CHECK(r.recall == doctest::Approx(static_cast<double>(tp) / static_cast<double>(tp + fn)));
        }
        if (r.precision + r.recall > 0) {
            CHECK(r.f1 ==
                  doctest::Approx(2.0 * r.precision * r.recall / (r.precision + r.recall)));
        }
    }
}

TEST_CASE("evaluate is deterministic and validates its inputs") {
    const auto data = sign_dataset({0, 1, 1, 0, 1});
    const auto net = sign_model();
    const auto a = evaluate(net, data);
    const auto b = evaluate(net, data);
    CHECK(a.tp == b.tp);
    CHECK(a.accuracy == b.accuracy);

    Dataset empty;
    empty.n_features = 1;
    empty.feature_names = {"x"};
    CHECK_THROWS_AS(evaluate(net, empty), InvalidArgument);

    MlpNetwork wide({3, 2}, Activation::relu, 0);
    CHECK_THROWS_AS(evaluate(wide, data), DimensionError);
}

TEST_CASE("embedding export writes rows and round-trips") {
    TempDir dir("emb");
    const auto data = sign_dataset({0, 1});
    MlpNetwork net({1, 4, 2}, Activation::tanh, 33);

    const auto logits_path = dir.file("logits.csv");
    export_embeddings(net, data, "logits", logits_path);
    std::ifstream in(logits_path);
    std::string line;
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        std::stringstream ss(line);
        std::string field;
        std::vector<std::string> fields;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        REQUIRE(fields.size() == 3); // two logits + label
        const std::size_t r = rows;
        const auto expected = net.forward(data.row(r));
        CHECK(std::fabs(std::stod(fields[0]) - expected[0]) <= 1e-6 * std::max(1.0, std::fabs(expected[0])));
        CHECK(std::fabs(std::stod(fields[1]) - expected[1]) <= 1e-6 * std::max(1.0, std::fabs(expected[1])));
        CHECK(fields[2] == std::to_string(static_cast<int>(data.labels[r])));
        ++rows;
    }
    CHECK(rows == 2);

    const auto pen_path = dir.file("pen.csv");
    export_embeddings(net, data, "penultimate", pen_path);
    std::ifstream pin(pen_path);
    std::getline(pin, line);
    CHECK(std::count(line.begin(), line.end(), ',') == 4); // 4 hidden values + label

    CHECK_THROWS_AS(export_embeddings(net, data, "bogus", dir.file("x.csv")), InvalidArgument);
    CHECK_THROWS_AS(export_embeddings(net, data, "logits", dir.file("no/such/dir/x.csv")), IoError);
}

TEST_CASE("report formatting") {
    const auto report = report_from_counts(3, 1, 4, 2);
    const auto kv = format_report_kv(report, 1234);
    CHECK(kv.find("tp=3") != std::string::npos);
    CHECK(kv.find("f1=0.66") != std::string::npos);
    CHECK(kv.find("parameters=1234") != std::string::npos);

    const auto table = format_report_table(report, 1234);
    CHECK(table.find("accuracy 0.7000") != std::string::npos);

    CHECK(format_confusion_csv(report) == "4,1\n2,3\n");
}
