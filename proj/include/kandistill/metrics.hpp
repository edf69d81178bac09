#pragma once

#include <cstdint>
#include <string>

#include "kandistill/data.hpp"
#include "kandistill/model.hpp"

namespace kandistill {

// Confusion counts and derived metrics with attack (label 1) as the
// positive class. Metrics with a zero denominator are reported as 0 with
// the matching *_defined flag cleared.
struct EvalReport {
    std::uint64_t tp = 0;
    std::uint64_t fp = 0;
    std::uint64_t tn = 0;
    std::uint64_t fn = 0;
    double accuracy = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    bool precision_defined = true;
    bool recall_defined = true;
    bool f1_defined = true;

    std::uint64_t total() const { return tp + fp + tn + fn; }
};

EvalReport report_from_counts(std::uint64_t tp, std::uint64_t fp, std::uint64_t tn,
                              std::uint64_t fn);

// Argmax over logits; ties resolve to the lower class index.
EvalReport evaluate(const Model& model, const Dataset& data);

// Writes one row per sample: embedding values then the true label.
// layer_tag is "penultimate" or "logits".
void export_embeddings(const Model& model, const Dataset& data, const std::string& layer_tag,
                       const std::string& path);

std::string format_report_table(const EvalReport& report, std::size_t parameter_count);
std::string format_report_kv(const EvalReport& report, std::size_t parameter_count);
std::string format_confusion_csv(const EvalReport& report);

} // namespace kandistill
