#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "kandistill.h"
#include "options.hpp"

namespace cli {

// Reproducibility record written before a command starts working: the
// resolved configuration, digests of every input file, the seed and the
// planned artifact paths.
struct RunManifest {
    std::string command;
    std::uint64_t seed = 0;
    KeyValues config;
    std::vector<std::string> input_paths;
    std::map<std::string, std::string> outputs;
};

void write_manifest(const RunManifest& manifest, const std::string& path);

// Post-run record: final losses plus the evaluation of the saved model on
// its own training data, which a later `eval` run must reproduce exactly.
void write_result(const std::string& path, long long parameter_count, int final_epoch,
                  double final_hard_loss, double final_dkd_loss, const kd_eval_report& train_eval);

} // namespace cli
