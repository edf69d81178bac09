#include "kandistill/data.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <unordered_set>

#include "kandistill/bytes.hpp"
#include "kandistill/errors.hpp"
#include "kandistill/rng.hpp"

namespace kandistill {

namespace {

constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

bool is_missing(double v) { return std::isnan(v); }

std::string trim(const std::string& s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

bool parse_number(const std::string& text, double& out) {
    const char* first = text.data();
    const char* last = text.data() + text.size();
    const auto res = std::from_chars(first, last, out);
    return res.ec == std::errc() && res.ptr == last;
}

// Splits one line on the delimiter, honoring double-quoted fields.
std::vector<std::string> split_line(const std::string& line, char delim) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == delim) {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    fields.push_back(cur);
    return fields;
}

bool is_nan_text(const std::string& t) {
    const std::string l = lower(t);
    return l == "nan" || l == "na" || l == "null";
}

// True for names like "Row", "Date", " Timestamp" after normalization.
bool is_metadata_column(const std::string& name) {
    static const std::unordered_set<std::string> kMeta = {
        "row", "date", "time", "timestamp", "datetime", "index",
    };
    std::string n = lower(trim(name));
    std::erase_if(n, [](char c) { return c == '_' || c == ' '; });
    return kMeta.contains(n);
}

} // namespace

std::string drop_reason_name(DropReason r) {
    switch (r) {
    case DropReason::metadata: return "timestamp/index";
    case DropReason::nan_only: return "nan-only";
    case DropReason::zero_variance: return "zero-variance";
    }
    return "?";
}

RawTable load_csv(const std::string& path, const std::string& label_column,
                  const std::vector<std::string>& positive_label_values,
                  const CsvOptions& options) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open file: " + path);

    std::string line;
    if (!std::getline(in, line)) throw ParseError(path + ": empty file, expected a header row");
    if (!line.empty() && line.back() == '\r') line.pop_back();

    auto header = split_line(line, options.delimiter);
    for (auto& h : header) h = trim(h);

    // A header made entirely of numbers is almost certainly a missing header.
    {
        bool all_numeric = !header.empty();
        for (const auto& h : header) {
            double tmp;
            if (h.empty() || !parse_number(h, tmp)) {
                all_numeric = false;
                break;
            }
        }
        if (all_numeric) throw ParseError(path + ":1: header row looks numeric; a header is required");
    }

    std::size_t label_idx = header.size();
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == trim(label_column)) {
            label_idx = i;
            break;
        }
    }
    if (label_idx == header.size()) {
        throw InvalidArgument(path + ": label column \"" + label_column + "\" not found in header");
    }

    std::vector<std::string> positives;
    positives.reserve(positive_label_values.size());
    for (const auto& v : positive_label_values) positives.push_back(lower(trim(v)));

    auto map_label = [&](const std::string& raw) -> int {
        const std::string t = lower(trim(raw));
        for (const auto& p : positives) {
            if (t == p) return 1;
            double a, b;
            if (parse_number(t, a) && parse_number(p, b) && a == b) return 1;
        }
        return 0;
    };

    RawTable table;
    table.label_column = header[label_idx];
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (i != label_idx) table.feature_names.push_back(header[i]);
    }

    struct LabelCount {
        std::size_t count = 0;
        int mapped = 0;
    };
    std::vector<std::pair<std::string, LabelCount>> label_counts;

    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto fields = split_line(line, options.delimiter);
        if (fields.size() != header.size()) {
            throw ParseError(path + ":" + std::to_string(line_no) + ": expected " +
                             std::to_string(header.size()) + " fields, found " +
                             std::to_string(fields.size()));
        }
        const std::string raw_label = trim(fields[label_idx]);
        if (raw_label.empty()) {
            ++table.label_report.missing_label_rows;
            continue;
        }
        const int mapped = map_label(raw_label);
        auto it = std::find_if(label_counts.begin(), label_counts.end(),
                               [&](const auto& e) { return e.first == raw_label; });
        if (it == label_counts.end()) {
            label_counts.push_back({raw_label, {1, mapped}});
        } else {
            ++it->second.count;
        }
        table.labels.push_back(static_cast<std::uint8_t>(mapped));

        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (i == label_idx) continue;
            const std::string cell = trim(fields[i]);
            double value = kMissing;
            if (!cell.empty() && !is_nan_text(cell)) {
                if (!parse_number(cell, value)) {
                    value = kMissing;
                    ++table.non_numeric_cells;
                }
            }
            table.cells.push_back(value);
        }
        ++table.n_rows;
    }

    for (const auto& [value, lc] : label_counts) {
        table.label_report.entries.push_back({value, lc.count, lc.mapped});
    }
    return table;
}

CleanResult clean_columns(const RawTable& table) {
    const std::size_t n_cols = table.n_cols();
    std::vector<bool> keep(n_cols, true);
    CleanResult result;

    // 1. timestamp/date/index columns
    for (std::size_t c = 0; c < n_cols; ++c) {
        if (is_metadata_column(table.feature_names[c])) {
            keep[c] = false;
            result.dropped.push_back({table.feature_names[c], DropReason::metadata});
        }
    }

    // 2. all-missing columns
    for (std::size_t c = 0; c < n_cols; ++c) {
        if (!keep[c]) continue;
        bool any = false;
        for (std::size_t r = 0; r < table.n_rows && !any; ++r) {
            if (!is_missing(table.cell(r, c))) any = true;
        }
        if (!any && table.n_rows > 0) {
            keep[c] = false;
            result.dropped.push_back({table.feature_names[c], DropReason::nan_only});
        }
    }

    // 3. rows with missing cells among the remaining columns
    std::vector<bool> keep_row(table.n_rows, true);
    for (std::size_t r = 0; r < table.n_rows; ++r) {
        for (std::size_t c = 0; c < n_cols; ++c) {
            if (keep[c] && is_missing(table.cell(r, c))) {
                keep_row[r] = false;
                ++result.rows_dropped_missing;
                break;
            }
        }
    }

    // 4. zero-variance columns over the surviving rows
    for (std::size_t c = 0; c < n_cols; ++c) {
        if (!keep[c]) continue;
        bool constant = true;
        bool have_first = false;
        double first = 0.0;
        for (std::size_t r = 0; r < table.n_rows && constant; ++r) {
            if (!keep_row[r]) continue;
            const double v = table.cell(r, c);
            if (!have_first) {
                first = v;
                have_first = true;
            } else if (v != first) {
                constant = false;
            }
        }
        if (constant && have_first) {
            keep[c] = false;
            result.dropped.push_back({table.feature_names[c], DropReason::zero_variance});
        }
    }

    RawTable& out = result.table;
    out.label_column = table.label_column;
    out.label_report = table.label_report;
    out.non_numeric_cells = table.non_numeric_cells;
    for (std::size_t c = 0; c < n_cols; ++c) {
        if (keep[c]) out.feature_names.push_back(table.feature_names[c]);
    }
    for (std::size_t r = 0; r < table.n_rows; ++r) {
        if (!keep_row[r]) continue;
        for (std::size_t c = 0; c < n_cols; ++c) {
            if (keep[c]) out.cells.push_back(table.cell(r, c));
        }
        out.labels.push_back(table.labels[r]);
        ++out.n_rows;
    }
    return result;
}

std::size_t Dataset::count_label(int label) const {
    return static_cast<std::size_t>(
        std::count(labels.begin(), labels.end(), static_cast<std::uint8_t>(label)));
}

bool Dataset::single_class() const {
    return count_label(0) == n_rows || count_label(1) == n_rows;
}

Dataset make_dataset(const RawTable& table) {
    for (double v : table.cells) {
        if (is_missing(v)) {
            throw InvalidArgument("table still has missing cells; run clean_columns first");
        }
    }
    Dataset data;
    data.feature_names = table.feature_names;
    data.features = table.cells;
    data.labels = table.labels;
    data.n_rows = table.n_rows;
    data.n_features = table.n_cols();
    return data;
}

ScalerParams fit_scaler(const Dataset& train, ScalerKind kind) {
    if (train.n_rows == 0) throw InvalidArgument("cannot fit a scaler on an empty dataset");
    ScalerParams params;
    params.kind = kind;
    params.center.resize(train.n_features);
    params.scale.resize(train.n_features);
    const double n = static_cast<double>(train.n_rows);
    for (std::size_t c = 0; c < train.n_features; ++c) {
        double lo = train.features[c];
        double hi = train.features[c];
        double sum = 0.0;
        for (std::size_t r = 0; r < train.n_rows; ++r) {
            const double v = train.features[r * train.n_features + c];
            sum += v;
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        if (lo == hi) {
            throw InvalidArgument("column \"" + train.feature_names[c] +
                                  "\" has no spread in the training split; it should have been dropped");
        }
        if (kind == ScalerKind::standard) {
            const double mu = sum / n;
            double ss = 0.0;
            for (std::size_t r = 0; r < train.n_rows; ++r) {
                const double d = train.features[r * train.n_features + c] - mu;
                ss += d * d;
            }
            params.center[c] = mu;
            params.scale[c] = std::sqrt(ss / n); // population convention
        } else {
            params.center[c] = lo;
            params.scale[c] = hi - lo;
        }
    }
    return params;
}

void apply_scaler(Dataset& data, const ScalerParams& params) {
    if (params.center.size() != data.n_features || params.scale.size() != data.n_features) {
        throw DimensionError("scaler parameter length does not match feature count");
    }
    for (std::size_t r = 0; r < data.n_rows; ++r) {
        double* row = data.features.data() + r * data.n_features;
        for (std::size_t c = 0; c < data.n_features; ++c) {
            row[c] = (row[c] - params.center[c]) / params.scale[c];
        }
    }
    data.scaler = params;
}

namespace {

Dataset take_rows(const Dataset& data, std::span<const std::size_t> rows) {
    Dataset out;
    out.feature_names = data.feature_names;
    out.scaler = data.scaler;
    out.n_features = data.n_features;
    out.n_rows = rows.size();
    out.features.reserve(rows.size() * data.n_features);
    out.labels.reserve(rows.size());
    for (std::size_t r : rows) {
        const auto row = data.row(r);
        out.features.insert(out.features.end(), row.begin(), row.end());
        out.labels.push_back(data.labels[r]);
    }
    return out;
}

} // namespace

std::pair<Dataset, Dataset> split(const Dataset& data, double test_fraction,
                                  std::uint64_t seed, bool shuffle_rows) {
    if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
        throw InvalidArgument("test_fraction must lie strictly inside (0, 1)");
    }
    const auto n = data.n_rows;
    const auto n_train =
        static_cast<std::size_t>(std::floor(static_cast<double>(n) * (1.0 - test_fraction)));
    if (n_train == 0 || n_train == n) {
        throw InvalidArgument("split is degenerate: one side would be empty");
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    if (shuffle_rows) {
        Rng rng(seed);
        shuffle(order, rng);
    }
    const std::span<const std::size_t> all(order);
    return {take_rows(data, all.subspan(0, n_train)), take_rows(data, all.subspan(n_train))};
}

void random_mask(Dataset& data, double mask_prob, std::uint64_t seed) {
    if (!(mask_prob >= 0.0 && mask_prob < 1.0)) {
        throw InvalidArgument("mask_prob must lie in [0, 1)");
    }
    if (mask_prob == 0.0) return;
    Rng rng(seed);
    for (auto& v : data.features) {
        if (rng.uniform() < mask_prob) v = 0.0;
    }
}

Dataset gen_synthetic(const SyntheticSpec& spec, std::uint64_t seed) {
    if (spec.n_normal == 0 && spec.n_attack == 0) {
        throw InvalidArgument("synthetic dataset needs at least one row");
    }
    if (spec.n_features < 1) throw InvalidArgument("n_features must be positive");
    const auto f = static_cast<std::size_t>(spec.n_features);
    const auto k = static_cast<std::size_t>(spec.n_factors);

    Rng rng(seed);

    // Factor loadings; each feature has unit-ish variance by construction.
    std::vector<double> loadings(f * k);
    for (std::size_t i = 0; i < f; ++i) {
        double norm2 = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
            const double v = rng.normal();
            loadings[i * k + j] = v;
            norm2 += v * v;
        }
        const double s = spec.factor_row_norm / std::sqrt(std::max(norm2, 1e-12));
        for (std::size_t j = 0; j < k; ++j) loadings[i * k + j] *= s;
    }

    // Attacked feature subset always includes feature 0.
    const std::size_t n_attacked = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::lround(spec.attacked_fraction * static_cast<double>(f))));
    std::vector<std::size_t> pool(f - 1);
    std::iota(pool.begin(), pool.end(), std::size_t{1});
    shuffle(pool, rng);
    std::vector<std::size_t> attacked = {0};
    for (std::size_t i = 0; i + 1 < n_attacked && i < pool.size(); ++i) attacked.push_back(pool[i]);

    std::vector<double> shift(f, 0.0);
    std::vector<bool> is_attacked(f, false);
    for (std::size_t idx : attacked) is_attacked[idx] = true;
    shift[0] = spec.primary_shift;
    for (std::size_t i = 1; i < attacked.size(); ++i) {
        shift[attacked[i]] = rng.uniform(spec.secondary_shift_lo, spec.secondary_shift_hi);
    }

    const std::size_t n = spec.n_normal + spec.n_attack;
    Dataset data;
    data.n_rows = n;
    data.n_features = f;
    data.features.resize(n * f);
    data.labels.resize(n);
    data.feature_names.reserve(f);
    for (std::size_t i = 0; i < f; ++i) {
        char name[16];
        std::snprintf(name, sizeof(name), "f%02zu", i);
        data.feature_names.emplace_back(name);
    }

    std::vector<double> z(k);
    for (std::size_t r = 0; r < n; ++r) {
        const bool attack = r >= spec.n_normal;
        const bool weak = attack && rng.uniform() < spec.weak_fraction;
        for (auto& v : z) v = rng.normal();
        double* row = data.features.data() + r * f;
        for (std::size_t i = 0; i < f; ++i) {
            double v = spec.noise_sigma * rng.normal();
            for (std::size_t j = 0; j < k; ++j) v += loadings[i * k + j] * z[j];
            if (attack && is_attacked[i]) {
                v = spec.attack_scale * v + shift[i] * (weak ? spec.weak_factor : 1.0);
            }
            row[i] = v;
        }
        data.labels[r] = attack ? 1 : 0;
    }

    // Interleave classes so a sequential split sees both.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    shuffle(order, rng);
    Dataset mixed = take_rows(data, order);
    return mixed;
}

Dataset gen_synthetic(std::size_t n_normal, std::size_t n_attack, int n_features,
                      std::uint64_t seed) {
    SyntheticSpec spec;
    spec.n_normal = n_normal;
    spec.n_attack = n_attack;
    spec.n_features = n_features;
    return gen_synthetic(spec, seed);
}

namespace {

constexpr char kDatasetMagic[4] = {'K', 'D', 'D', 'S'};
constexpr std::uint32_t kDatasetVersion = 1;

} // namespace

void save_dataset(const Dataset& data, const std::string& path) {
    ByteWriter w;
    w.raw(kDatasetMagic, 4);
    w.u32(kDatasetVersion);
    w.u64(data.n_rows);
    w.u32(static_cast<std::uint32_t>(data.n_features));
    w.u32(static_cast<std::uint32_t>(data.feature_names.size()));
    for (const auto& name : data.feature_names) w.str(name);
    w.u8(data.scaler.has_value() ? 1 : 0);
    if (data.scaler) {
        const auto& s = *data.scaler;
        w.u8(static_cast<std::uint8_t>(s.kind));
        w.u32(static_cast<std::uint32_t>(s.center.size()));
        for (double v : s.center) w.f64(v);
        for (double v : s.scale) w.f64(v);
        w.u32(static_cast<std::uint32_t>(s.dropped_columns.size()));
        for (const auto& d : s.dropped_columns) {
            w.str(d.column);
            w.u8(static_cast<std::uint8_t>(d.reason));
        }
    }
    for (double v : data.features) w.f32(static_cast<float>(v));
    for (std::uint8_t l : data.labels) w.u8(l);
    w.write_file(path);
}

Dataset load_dataset(const std::string& path) {
    ByteReader r = ByteReader::from_file(path);
    char magic[4];
    r.raw(magic, 4);
    if (std::memcmp(magic, kDatasetMagic, 4) != 0) {
        throw FormatError(path + ": not a prepared-dataset container");
    }
    const auto version = r.u32();
    if (version != kDatasetVersion) {
        throw FormatError(path + ": unsupported dataset format version " + std::to_string(version));
    }
    Dataset data;
    data.n_rows = r.u64();
    data.n_features = r.u32();
    const auto n_names = r.u32();
    if (n_names != data.n_features) throw FormatError(path + ": feature name count mismatch");
    data.feature_names.reserve(n_names);
    for (std::uint32_t i = 0; i < n_names; ++i) data.feature_names.push_back(r.str());
    if (r.u8() != 0) {
        ScalerParams s;
        s.kind = static_cast<ScalerKind>(r.u8());
        const auto n = r.u32();
        s.center.resize(n);
        s.scale.resize(n);
        for (auto& v : s.center) v = r.f64();
        for (auto& v : s.scale) v = r.f64();
        const auto n_drops = r.u32();
        s.dropped_columns.reserve(n_drops);
        for (std::uint32_t i = 0; i < n_drops; ++i) {
            DropRecord d;
            d.column = r.str();
            d.reason = static_cast<DropReason>(r.u8());
            s.dropped_columns.push_back(std::move(d));
        }
        data.scaler = std::move(s);
    }
    data.features.resize(data.n_rows * data.n_features);
    for (auto& v : data.features) v = static_cast<double>(r.f32());
    data.labels.resize(data.n_rows);
    for (auto& l : data.labels) l = r.u8();
    if (!r.at_end()) throw FormatError(path + ": trailing bytes in container");
    return data;
}

PrepareOutcome prepare_csv(const std::string& csv_path, const PrepareOptions& options) {
    CsvOptions csv;
    csv.delimiter = options.delimiter;
    const RawTable raw = load_csv(csv_path, options.label_column, options.positive_labels, csv);
    CleanResult cleaned = clean_columns(raw);
    if (cleaned.table.n_cols() == 0) {
        throw InvalidArgument(csv_path + ": no feature columns survive cleaning");
    }

    Dataset all = make_dataset(cleaned.table);
    auto [train, test] = split(all, options.test_fraction, options.seed, options.shuffled_split);
    ScalerParams scaler = fit_scaler(train, options.scaler);
    scaler.dropped_columns = cleaned.dropped;
    apply_scaler(train, scaler);
    apply_scaler(test, scaler);
    if (options.mask_prob > 0.0) {
        random_mask(train, options.mask_prob, options.mask_seed);
    }

    PrepareOutcome out;
    out.dropped = cleaned.dropped;
    out.rows_dropped_missing = cleaned.rows_dropped_missing;
    out.label_report = raw.label_report;

    std::ostringstream ledger;
    std::size_t nan_only = 0, zero_var = 0, metadata = 0;
    for (const auto& d : cleaned.dropped) {
        ledger << "dropped column \"" << d.column << "\" (" << drop_reason_name(d.reason) << ")\n";
        switch (d.reason) {
        case DropReason::metadata: ++metadata; break;
        case DropReason::nan_only: ++nan_only; break;
        case DropReason::zero_variance: ++zero_var; break;
        }
    }
    ledger << "drop summary: " << metadata << " timestamp/index, " << nan_only << " nan-only, "
           << zero_var << " zero-variance\n";
    if (cleaned.rows_dropped_missing > 0) {
        ledger << "dropped " << cleaned.rows_dropped_missing << " rows with missing values\n";
    }
    if (raw.non_numeric_cells > 0) {
        ledger << "coerced " << raw.non_numeric_cells << " non-numeric cells to missing\n";
    }
    if (raw.label_report.missing_label_rows > 0) {
        ledger << "dropped " << raw.label_report.missing_label_rows << " rows with empty labels\n";
    }
    for (const auto& e : raw.label_report.entries) {
        ledger << "label \"" << e.value << "\" -> " << e.mapped << " (" << e.count << " rows)\n";
    }
    ledger << "retained " << train.n_features << " features; train rows " << train.n_rows
           << ", test rows " << test.n_rows << "\n";
    out.ledger_text = ledger.str();

    out.train = std::move(train);
    out.test = std::move(test);
    return out;
}

} // namespace kandistill
