#include "manifest.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace cli {

namespace {

std::string crc_hex(const std::string& path) {
    unsigned int crc = 0;
    if (kd_file_crc32(path.c_str(), &crc) != KD_OK) {
        throw std::runtime_error(kd_last_error());
    }
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%08x", crc);
    return buf;
}

void dump(const nlohmann::ordered_json& doc, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << doc.dump(2) << "\n";
    if (!out) throw std::runtime_error("write failed: " + path);
}

} // namespace

void write_manifest(const RunManifest& manifest, const std::string& path) {
    nlohmann::ordered_json doc;
    doc["tool"] = "kandistill";
    doc["version"] = kd_version();
    doc["command"] = manifest.command;
    doc["seed"] = manifest.seed;
    doc["config"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : manifest.config) doc["config"][k] = v;
    doc["inputs"] = nlohmann::ordered_json::array();
    for (const auto& input : manifest.input_paths) {
        doc["inputs"].push_back({{"path", input}, {"crc32", crc_hex(input)}});
    }
    doc["outputs"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : manifest.outputs) doc["outputs"][k] = v;
    dump(doc, path);
}

void write_result(const std::string& path, long long parameter_count, int final_epoch,
                  double final_hard_loss, double final_dkd_loss, const kd_eval_report& train_eval) {
    nlohmann::ordered_json doc;
    doc["parameter_count"] = parameter_count;
    doc["final_epoch"] = final_epoch;
    doc["final_hard_loss"] = final_hard_loss;
    doc["final_dkd_loss"] = final_dkd_loss;
    doc["train_eval"] = {
        {"tp", train_eval.tp},
        {"fp", train_eval.fp},
        {"tn", train_eval.tn},
        {"fn", train_eval.fn},
        {"accuracy", train_eval.accuracy},
        {"precision", train_eval.precision},
        {"recall", train_eval.recall},
        {"f1", train_eval.f1},
    };
    dump(doc, path);
}

} // namespace cli
