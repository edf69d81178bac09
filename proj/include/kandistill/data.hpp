#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace kandistill {

// Why a column was removed during cleaning.
enum class DropReason : std::uint8_t {
    metadata = 0,      // timestamp/date/index column
    nan_only = 1,      // every cell missing
    zero_variance = 2, // every cell identical
};

std::string drop_reason_name(DropReason r);

struct DropRecord {
    std::string column;
    DropReason reason = DropReason::metadata;
};

struct LabelMapReport {
    struct Entry {
        std::string value;  // raw label text as seen in the file
        std::size_t count = 0;
        int mapped = 0;     // 0 normal, 1 attack
    };
    std::vector<Entry> entries;
    std::size_t missing_label_rows = 0;
};

// Parsed delimited file: numeric cells (NaN marks a missing value) plus the
// label column already mapped to binary.
struct RawTable {
    std::vector<std::string> feature_names;
    std::vector<double> cells; // row-major, n_rows x feature_names.size()
    std::size_t n_rows = 0;
    std::string label_column;
    std::vector<std::uint8_t> labels; // 1 = attack
    LabelMapReport label_report;
    std::size_t non_numeric_cells = 0;

    std::size_t n_cols() const { return feature_names.size(); }
    double cell(std::size_t row, std::size_t col) const { return cells[row * n_cols() + col]; }
};

struct CsvOptions {
    char delimiter = ',';
};

// Reads a header-first delimited file. Rows whose label is missing or empty
// are dropped and counted. Non-numeric feature cells become missing values.
RawTable load_csv(const std::string& path, const std::string& label_column,
                  const std::vector<std::string>& positive_label_values,
                  const CsvOptions& options = {});

struct CleanResult {
    RawTable table;
    std::vector<DropRecord> dropped;
    std::size_t rows_dropped_missing = 0;
};

// Drops timestamp/date/index columns, all-missing columns, rows that still
// contain missing cells, then zero-variance columns, in that order. The
// result contains no missing values, so the pass is idempotent.
CleanResult clean_columns(const RawTable& table);

enum class ScalerKind : std::uint8_t {
    standard = 0, // (x - mean) / population std
    minmax = 1,   // (x - min) / (max - min)
};

struct ScalerParams {
    ScalerKind kind = ScalerKind::standard;
    std::vector<double> center; // mu, or min
    std::vector<double> scale;  // population sigma, or max - min
    std::vector<DropRecord> dropped_columns; // cleaning provenance
};

struct Dataset {
    std::vector<double> features; // row-major
    std::vector<std::uint8_t> labels;
    std::vector<std::string> feature_names;
    std::optional<ScalerParams> scaler;
    std::size_t n_rows = 0;
    std::size_t n_features = 0;

    std::span<const double> row(std::size_t r) const {
        return {features.data() + r * n_features, n_features};
    }
    std::size_t count_label(int label) const;
    bool single_class() const;
};

// Converts a cleaned table (no missing cells) into a Dataset.
Dataset make_dataset(const RawTable& table);

// Statistics are taken from `train` only; columns with no spread are an
// error because cleaning should have removed them.
ScalerParams fit_scaler(const Dataset& train, ScalerKind kind = ScalerKind::standard);
void apply_scaler(Dataset& data, const ScalerParams& params);

// Sequential split takes the first floor(n * (1 - test_fraction)) rows as
// train; shuffled permutes rows first with the seed.
std::pair<Dataset, Dataset> split(const Dataset& data, double test_fraction,
                                  std::uint64_t seed, bool shuffle);

// Replaces each cell independently by 0 with probability mask_prob.
void random_mask(Dataset& data, double mask_prob, std::uint64_t seed);

// Synthetic ICS-like generator: normal rows from a correlated Gaussian,
// attack rows with a subset of features shifted and rescaled. Feature 0 is
// always attacked with `primary_shift` so a plain threshold on it is a
// usable reference classifier. Rows are shuffled so class labels interleave.
struct SyntheticSpec {
    std::size_t n_normal = 9400;
    std::size_t n_attack = 600;
    int n_features = 20;
    int n_factors = 4;
    double factor_row_norm = 0.8;
    double noise_sigma = 0.6;
    double primary_shift = 4.0;
    double secondary_shift_lo = 1.5;
    double secondary_shift_hi = 2.5;
    double attacked_fraction = 0.3; // of features, including feature 0
    double attack_scale = 1.2;      // stddev multiplier on attacked features
    double weak_fraction = 0.25;    // attack rows with attenuated shift
    double weak_factor = 0.6;
};

Dataset gen_synthetic(const SyntheticSpec& spec, std::uint64_t seed);
Dataset gen_synthetic(std::size_t n_normal, std::size_t n_attack, int n_features,
                      std::uint64_t seed);

// Prepared-dataset container (magic "KDDS"): header with format version,
// feature names, scaler params and drop ledger, then row-major
// little-endian 32-bit floats and one label byte per row.
void save_dataset(const Dataset& data, const std::string& path);
Dataset load_dataset(const std::string& path);

// Whole CSV-to-container pipeline: load, clean, split, fit/apply scaler,
// optional masking of the train split.
struct PrepareOptions {
    std::string label_column = "label";
    std::vector<std::string> positive_labels = {"Attack"};
    char delimiter = ',';
    double test_fraction = 0.2;
    bool shuffled_split = false;
    std::uint64_t seed = 0;
    ScalerKind scaler = ScalerKind::standard;
    double mask_prob = 0.0;
    std::uint64_t mask_seed = 0;
};

struct PrepareOutcome {
    Dataset train;
    Dataset test;
    std::vector<DropRecord> dropped;
    std::size_t rows_dropped_missing = 0;
    LabelMapReport label_report;
    std::string ledger_text; // human-readable drop ledger
};

PrepareOutcome prepare_csv(const std::string& csv_path, const PrepareOptions& options);

} // namespace kandistill
