// kandistill command line: prepare data, train a KAN teacher, distill an
// MLP student, evaluate and export. Links only the public C API.

#include <cmath>
#include <cstdio>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "kandistill.h"
#include "manifest.hpp"
#include "options.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitDiverged = 4;
constexpr int kExitInternal = 70;

struct CliError {
    int exit_code;
    std::string message;
};

int exit_code_for(kd_status status) {
    switch (status) {
    case KD_OK: return kExitOk;
    case KD_ERR_INVALID_ARGUMENT: return kExitUsage;
    case KD_ERR_PARSE:
    case KD_ERR_IO:
    case KD_ERR_FORMAT:
    case KD_ERR_DIMENSION: return kExitData;
    case KD_ERR_DIVERGED: return kExitDiverged;
    default: return kExitInternal;
    }
}

void check(kd_status status) {
    if (status != KD_OK) throw CliError{exit_code_for(status), kd_last_error()};
}

struct DatasetHandle {
    kd_dataset* ptr = nullptr;
    ~DatasetHandle() { kd_dataset_free(ptr); }
};

struct ModelHandle {
    kd_model* ptr = nullptr;
    ~ModelHandle() { kd_model_free(ptr); }
};

// Tunable flags shared with config files and presets: values land in the
// resolver only when the user actually passed them.
struct FlagSet {
    CLI::App* app = nullptr;
    std::map<std::string, std::string> storage;
    std::map<std::string, std::string> flag_of_key; // key -> flag name

    void add(const std::string& key, const std::string& flag, const std::string& desc) {
        flag_of_key[key] = flag;
        app->add_option(flag, storage[key], desc);
    }

    cli::KeyValues passed() const {
        cli::KeyValues out;
        for (const auto& [key, flag] : flag_of_key) {
            if (app->count(flag) > 0) out[key] = storage.at(key);
        }
        return out;
    }
};

std::string sibling_path(const std::string& base, const std::string& suffix) {
    return base + suffix;
}

std::string join_ints(const std::vector<int>& values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out.push_back(',');
        out += std::to_string(values[i]);
    }
    return out;
}

kd_train_config train_config_from(const cli::KeyValues& opts, const std::string& checkpoint) {
    kd_train_config cfg{};
    cfg.epochs = cli::get_int(opts, "epochs");
    cfg.batch_size = cli::get_int(opts, "batch");
    cfg.learning_rate = cli::get_double(opts, "lr");
    const auto& optimizer = cli::get_string(opts, "optimizer");
    if (optimizer == "adam") {
        cfg.optimizer = 0;
    } else if (optimizer == "sgd") {
        cfg.optimizer = 1;
    } else {
        throw CliError{kExitUsage, "unknown optimizer \"" + optimizer + "\" (adam or sgd)"};
    }
    cfg.seed = cli::get_seed(opts, "seed");
    const double wn = cli::get_double(opts, "class-weight-normal");
    const double wa = cli::get_double(opts, "class-weight-attack");
    if (wn != 1.0 || wa != 1.0) {
        cfg.use_class_weights = 1;
        cfg.class_weight_normal = wn;
        cfg.class_weight_attack = wa;
    }
    cfg.checkpoint_path = checkpoint.empty() ? nullptr : checkpoint.c_str();
    return cfg;
}

kd_dkd_config dkd_config_from(const cli::KeyValues& opts) {
    kd_dkd_config dkd{};
    dkd.alpha = cli::get_double(opts, "alpha");
    dkd.beta = cli::get_double(opts, "beta");
    dkd.lambda_mix = cli::get_double(opts, "lambda");
    dkd.warmup_epochs = cli::get_int(opts, "warmup");
    dkd.temperature = cli::get_double(opts, "temperature");
    return dkd;
}

int scaler_kind_from(const cli::KeyValues& opts) {
    const auto& scaler = cli::get_string(opts, "scaler");
    if (scaler == "standard") return 0;
    if (scaler == "minmax") return 1;
    throw CliError{kExitUsage, "unknown scaler \"" + scaler + "\" (standard or minmax)"};
}

bool shuffled_from(const cli::KeyValues& opts) {
    const auto& split = cli::get_string(opts, "split");
    if (split == "sequential") return false;
    if (split == "shuffled") return true;
    throw CliError{kExitUsage, "unknown split \"" + split + "\" (sequential or shuffled)"};
}

// Parse the last row of a history file for the result record.
void read_final_losses(const std::string& path, int& epoch, double& hard, double& dkd) {
    std::FILE* f = std::fopen(path.c_str(), "r");
    if (!f) throw CliError{kExitData, "cannot reopen history file: " + path};
    char line[512];
    char last[512] = {0};
    while (std::fgets(line, sizeof(line), f)) {
        if (line[0] != 'e') std::snprintf(last, sizeof(last), "%s", line);
    }
    std::fclose(f);
    double warm = 0.0;
    if (std::sscanf(last, "%d,%lf,%lf,%lf", &epoch, &hard, &dkd, &warm) != 4) {
        throw CliError{kExitInternal, "history file has no rows: " + path};
    }
}

void finish_training_outputs(kd_model* model, kd_dataset* train, const std::string& history_path,
                             const std::string& result_path) {
    kd_eval_report train_eval{};
    check(kd_evaluate(model, train, &train_eval));
    int final_epoch = 0;
    double hard = 0.0, dkd = 0.0;
    read_final_losses(history_path, final_epoch, hard, dkd);
    cli::write_result(result_path, kd_model_parameter_count(model), final_epoch, hard, dkd,
                      train_eval);

    char buf[4096];
    check(kd_eval_report_format(&train_eval, 1, kd_model_parameter_count(model), buf, sizeof(buf)));
    std::cout << "final train metrics:\n" << buf;
}

// ---- subcommand payloads ----------------------------------------------

struct PrepareArgs {
    std::string csv, label_column, positive_labels = "Attack", out_train, out_test, config, preset;
    std::string delimiter = ",";
    FlagSet flags;
};

void run_prepare(PrepareArgs& args) {
    const auto opts = cli::resolve_options(args.flags.passed(), args.config, args.preset);
    const auto out_train = cli::resolve_output_path(args.out_train);
    const auto out_test = cli::resolve_output_path(args.out_test);

    cli::RunManifest manifest;
    manifest.command = "prepare";
    manifest.seed = cli::get_seed(opts, "seed");
    manifest.config = opts;
    manifest.config["csv"] = args.csv;
    manifest.config["label-column"] = args.label_column;
    manifest.config["positive-labels"] = args.positive_labels;
    manifest.input_paths = {args.csv};
    manifest.outputs = {{"train", out_train}, {"test", out_test}};
    cli::write_manifest(manifest, sibling_path(out_train, ".manifest.json"));

    kd_prepare_options prep{};
    prep.csv_path = args.csv.c_str();
    prep.label_column = args.label_column.c_str();
    prep.positive_labels = args.positive_labels.c_str();
    if (args.delimiter.size() != 1) {
        throw CliError{kExitUsage, "--delimiter expects a single character"};
    }
    prep.delimiter = args.delimiter[0];
    prep.test_fraction = cli::get_double(opts, "test-fraction");
    prep.shuffled_split = shuffled_from(opts) ? 1 : 0;
    prep.seed = cli::get_seed(opts, "seed");
    prep.scaler = scaler_kind_from(opts);
    prep.mask_prob = cli::get_double(opts, "mask-prob");
    prep.mask_seed = cli::get_seed(opts, "mask-seed");
    prep.out_train = out_train.c_str();
    prep.out_test = out_test.c_str();

    std::vector<char> ledger(1 << 16);
    check(kd_prepare_csv(&prep, ledger.data(), ledger.size()));
    std::cout << ledger.data();
    std::cout << "wrote " << out_train << " and " << out_test << "\n";
}

struct GenArgs {
    long long rows = 10000;
    double attack_frac = 0.06;
    int features = 20;
    std::string out_train, out_test, config, preset;
    FlagSet flags;
};

void run_gen_synthetic(GenArgs& args) {
    if (args.rows < 2) throw CliError{kExitUsage, "--rows must be at least 2"};
    if (args.attack_frac < 0.0 || args.attack_frac >= 1.0) {
        throw CliError{kExitUsage, "--attack-frac must lie in [0, 1)"};
    }
    const auto opts = cli::resolve_options(args.flags.passed(), args.config, args.preset);
    const auto out_train = cli::resolve_output_path(args.out_train);
    const auto out_test = cli::resolve_output_path(args.out_test);
    const auto n_attack = static_cast<long long>(std::llround(args.attack_frac * static_cast<double>(args.rows)));
    const auto n_normal = args.rows - n_attack;

    cli::RunManifest manifest;
    manifest.command = "gen-synthetic";
    manifest.seed = cli::get_seed(opts, "seed");
    manifest.config = opts;
    manifest.config["rows"] = std::to_string(args.rows);
    manifest.config["attack-frac"] = std::to_string(args.attack_frac);
    manifest.config["features"] = std::to_string(args.features);
    manifest.outputs = {{"train", out_train}, {"test", out_test}};
    cli::write_manifest(manifest, sibling_path(out_train, ".manifest.json"));

    DatasetHandle all, train, test;
    check(kd_dataset_gen_synthetic(n_normal, n_attack, args.features,
                                   cli::get_seed(opts, "seed"), &all.ptr));
    if (n_attack == 0) {
        std::cout << "note: dataset is single-class (no attack rows)\n";
    }
    check(kd_dataset_split_scale(all.ptr, cli::get_double(opts, "test-fraction"),
                                 shuffled_from(opts) ? 1 : 0, cli::get_seed(opts, "seed"),
                                 scaler_kind_from(opts), &train.ptr, &test.ptr));
    const double mask_prob = cli::get_double(opts, "mask-prob");
    if (mask_prob > 0.0) {
        check(kd_dataset_mask(train.ptr, mask_prob, cli::get_seed(opts, "mask-seed")));
    }
    check(kd_dataset_save(train.ptr, out_train.c_str()));
    check(kd_dataset_save(test.ptr, out_test.c_str()));

    long long normals = 0, attacks = 0;
    check(kd_dataset_class_counts(train.ptr, &normals, &attacks));
    std::cout << "train rows " << kd_dataset_rows(train.ptr) << " (" << attacks << " attacks), "
              << "test rows " << kd_dataset_rows(test.ptr) << "\n";
    std::cout << "wrote " << out_train << " and " << out_test << "\n";
}

struct TrainArgs {
    std::string train, out, history, checkpoint, config, preset;
    bool deterministic = false;
    FlagSet flags;
};

void run_train_teacher(TrainArgs& args) {
    const auto opts = cli::resolve_options(args.flags.passed(), args.config, args.preset);
    const auto out_model = cli::resolve_output_path(args.out);
    const auto history = cli::resolve_output_path(
        args.history.empty() ? sibling_path(args.out, ".history.csv") : args.history);
    const auto result = sibling_path(out_model, ".result.json");
    const auto checkpoint = args.checkpoint.empty() ? std::string() : cli::resolve_output_path(args.checkpoint);

    DatasetHandle train;
    check(kd_dataset_open(args.train.c_str(), &train.ptr));
    std::vector<int> dims = {kd_dataset_features(train.ptr)};
    for (int h : cli::get_int_list(opts, "hidden")) dims.push_back(h);
    dims.push_back(2);

    cli::RunManifest manifest;
    manifest.command = "train-teacher";
    manifest.seed = cli::get_seed(opts, "seed");
    manifest.config = opts;
    manifest.config["dims"] = join_ints(dims);
    manifest.input_paths = {args.train};
    manifest.outputs = {{"model", out_model}, {"history", history}, {"result", result}};
    cli::write_manifest(manifest, sibling_path(out_model, ".manifest.json"));

    ModelHandle model;
    check(kd_model_create_kan(dims.data(), static_cast<int>(dims.size()),
                              cli::get_int(opts, "grid"), cli::get_int(opts, "order"),
                              cli::get_double(opts, "domain-lo"), cli::get_double(opts, "domain-hi"),
                              cli::get_seed(opts, "seed"), &model.ptr));
    std::cout << "teacher KAN dims [" << join_ints(dims) << "], parameters "
              << kd_model_parameter_count(model.ptr) << "\n";

    const auto cfg = train_config_from(opts, checkpoint);
    check(kd_train_teacher(model.ptr, train.ptr, &cfg, history.c_str()));
    check(kd_model_save(model.ptr, out_model.c_str()));
    finish_training_outputs(model.ptr, train.ptr, history, result);
    std::cout << "wrote " << out_model << "\n";
}

void run_train_student(TrainArgs& args) {
    const auto opts = cli::resolve_options(args.flags.passed(), args.config, args.preset);
    const auto out_model = cli::resolve_output_path(args.out);
    const auto history = cli::resolve_output_path(
        args.history.empty() ? sibling_path(args.out, ".history.csv") : args.history);
    const auto result = sibling_path(out_model, ".result.json");
    const auto checkpoint = args.checkpoint.empty() ? std::string() : cli::resolve_output_path(args.checkpoint);

    DatasetHandle train;
    check(kd_dataset_open(args.train.c_str(), &train.ptr));
    std::vector<int> dims = {kd_dataset_features(train.ptr)};
    for (int h : cli::get_int_list(opts, "student-hidden")) dims.push_back(h);
    dims.push_back(2);

    cli::RunManifest manifest;
    manifest.command = "train-student";
    manifest.seed = cli::get_seed(opts, "seed");
    manifest.config = opts;
    manifest.config["dims"] = join_ints(dims);
    manifest.input_paths = {args.train};
    manifest.outputs = {{"model", out_model}, {"history", history}, {"result", result}};
    cli::write_manifest(manifest, sibling_path(out_model, ".manifest.json"));

    ModelHandle model;
    check(kd_model_create_mlp(dims.data(), static_cast<int>(dims.size()),
                              cli::get_string(opts, "activation").c_str(),
                              cli::get_seed(opts, "seed"), &model.ptr));
    std::cout << "student MLP dims [" << join_ints(dims) << "], parameters "
              << kd_model_parameter_count(model.ptr) << "\n";

    const auto cfg = train_config_from(opts, checkpoint);
    check(kd_train_student(model.ptr, train.ptr, &cfg, history.c_str()));
    check(kd_model_save(model.ptr, out_model.c_str()));
    finish_training_outputs(model.ptr, train.ptr, history, result);
    std::cout << "wrote " << out_model << "\n";
}

struct DistillArgs {
    std::string train, teacher, out, history, checkpoint, config, preset;
    FlagSet flags;
};

void run_distill(DistillArgs& args) {
    const auto opts = cli::resolve_options(args.flags.passed(), args.config, args.preset);
    const auto out_model = cli::resolve_output_path(args.out);
    const auto history = cli::resolve_output_path(
        args.history.empty() ? sibling_path(args.out, ".history.csv") : args.history);
    const auto result = sibling_path(out_model, ".result.json");
    const auto checkpoint = args.checkpoint.empty() ? std::string() : cli::resolve_output_path(args.checkpoint);

    DatasetHandle train;
    check(kd_dataset_open(args.train.c_str(), &train.ptr));
    ModelHandle teacher;
    check(kd_model_load(args.teacher.c_str(), &teacher.ptr));
    if (kd_model_kind(teacher.ptr) != 1) {
        throw CliError{kExitData, args.teacher + ": the teacher model must be a KAN"};
    }
    if (kd_model_input_dim(teacher.ptr) != kd_dataset_features(train.ptr)) {
        throw CliError{kExitData, "teacher input dimension does not match the dataset"};
    }

    std::vector<int> dims = {kd_dataset_features(train.ptr)};
    for (int h : cli::get_int_list(opts, "student-hidden")) dims.push_back(h);
    dims.push_back(kd_model_output_dim(teacher.ptr));

    cli::RunManifest manifest;
    manifest.command = "distill";
    manifest.seed = cli::get_seed(opts, "seed");
    manifest.config = opts;
    manifest.config["dims"] = join_ints(dims);
    manifest.input_paths = {args.train, args.teacher};
    manifest.outputs = {{"model", out_model}, {"history", history}, {"result", result}};
    cli::write_manifest(manifest, sibling_path(out_model, ".manifest.json"));

    ModelHandle student;
    check(kd_model_create_mlp(dims.data(), static_cast<int>(dims.size()),
                              cli::get_string(opts, "activation").c_str(),
                              cli::get_seed(opts, "seed"), &student.ptr));
    std::cout << "student MLP dims [" << join_ints(dims) << "], parameters "
              << kd_model_parameter_count(student.ptr) << " (teacher "
              << kd_model_parameter_count(teacher.ptr) << ")\n";

    const auto cfg = train_config_from(opts, checkpoint);
    const auto dkd = dkd_config_from(opts);
    check(kd_distill_student(student.ptr, teacher.ptr, train.ptr, &cfg, &dkd, history.c_str()));
    check(kd_model_save(student.ptr, out_model.c_str()));
    finish_training_outputs(student.ptr, train.ptr, history, result);
    std::cout << "wrote " << out_model << "\n";
}

struct EvalArgs {
    std::string model, data, report, kv, confusion;
};

void run_eval(EvalArgs& args) {
    ModelHandle model;
    check(kd_model_load(args.model.c_str(), &model.ptr));
    DatasetHandle data;
    check(kd_dataset_open(args.data.c_str(), &data.ptr));

    kd_eval_report report{};
    check(kd_evaluate(model.ptr, data.ptr, &report));

    const long long params = kd_model_parameter_count(model.ptr);
    char table[4096];
    char kv[4096];
    check(kd_eval_report_format(&report, 0, params, table, sizeof(table)));
    check(kd_eval_report_format(&report, 1, params, kv, sizeof(kv)));
    std::cout << table << "\n" << kv;

    auto write_text = [](const std::string& path, const char* text) {
        std::FILE* f = std::fopen(path.c_str(), "w");
        if (!f) throw CliError{kExitData, "cannot write " + path};
        std::fputs(text, f);
        std::fclose(f);
    };
    if (!args.report.empty()) write_text(cli::resolve_output_path(args.report), table);
    if (!args.kv.empty()) write_text(cli::resolve_output_path(args.kv), kv);
    if (!args.confusion.empty()) {
        char cm[128];
        check(kd_eval_report_confusion_csv(&report, cm, sizeof(cm)));
        write_text(cli::resolve_output_path(args.confusion), cm);
    }
}

struct ExportArgs {
    std::string model, data, layer = "penultimate", out;
};

void run_export(ExportArgs& args) {
    ModelHandle model;
    check(kd_model_load(args.model.c_str(), &model.ptr));
    DatasetHandle data;
    check(kd_dataset_open(args.data.c_str(), &data.ptr));
    const auto out = cli::resolve_output_path(args.out);
    check(kd_export_embeddings(model.ptr, data.ptr, args.layer.c_str(), out.c_str()));
    std::cout << "wrote " << out << "\n";
}

void add_common_data_flags(FlagSet& flags) {
    flags.add("test-fraction", "--test-fraction", "test split fraction (default 0.2)");
    flags.add("split", "--split", "sequential or shuffled (default sequential)");
    flags.add("seed", "--seed", "seed for shuffling/generation");
    flags.add("scaler", "--scaler", "standard or minmax (default standard)");
    flags.add("mask-prob", "--mask-prob", "random-mask probability on the train split (default 0)");
    flags.add("mask-seed", "--mask-seed", "seed for the random mask");
}

void add_train_flags(FlagSet& flags, bool teacher) {
    if (teacher) {
        flags.add("hidden", "--hidden", "comma-separated hidden widths of the KAN teacher");
        flags.add("grid", "--grid", "spline grid size G");
        flags.add("order", "--order", "spline order K");
        flags.add("domain-lo", "--domain-lo", "spline domain lower bound");
        flags.add("domain-hi", "--domain-hi", "spline domain upper bound");
    } else {
        flags.add("student-hidden", "--hidden", "comma-separated hidden widths of the MLP student");
        flags.add("activation", "--activation", "hidden activation: relu, tanh or silu");
    }
    flags.add("epochs", "--epochs", "training epochs");
    flags.add("batch", "--batch", "mini-batch size");
    flags.add("lr", "--lr", "learning rate");
    flags.add("optimizer", "--optimizer", "adam or sgd");
    flags.add("seed", "--seed", "init and shuffle seed");
    flags.add("class-weight-normal", "--class-weight-normal", "hard-loss weight of normal rows");
    flags.add("class-weight-attack", "--class-weight-attack", "hard-loss weight of attack rows");
}

void add_dkd_flags(FlagSet& flags) {
    flags.add("alpha", "--alpha", "target-class DKD weight");
    flags.add("beta", "--beta", "non-target DKD weight");
    flags.add("lambda", "--lambda", "distillation share of the total loss");
    flags.add("warmup", "--warmup", "linear warm-up epochs for the DKD term");
    flags.add("temperature", "--temperature", "softmax temperature");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"KAN teachers distilled into tiny MLP students for ICS intrusion detection"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kd_version()));

    PrepareArgs prepare;
    auto* prep_cmd = app.add_subcommand("prepare", "clean, split and standardize an attack CSV");
    prep_cmd->add_option("--csv", prepare.csv, "input CSV with a header row")->required();
    prep_cmd->add_option("--label-column", prepare.label_column, "name of the label column")->required();
    prep_cmd->add_option("--positive-labels", prepare.positive_labels,
                         "comma-separated label values meaning attack (default Attack)");
    prep_cmd->add_option("--delimiter", prepare.delimiter, "field delimiter (default ,)");
    prep_cmd->add_option("--out-train", prepare.out_train, "output train container")->required();
    prep_cmd->add_option("--out-test", prepare.out_test, "output test container")->required();
    prep_cmd->add_option("--config", prepare.config, "key = value config file");
    prep_cmd->add_option("--preset", prepare.preset, "wadi or swat");
    prepare.flags.app = prep_cmd;
    add_common_data_flags(prepare.flags);

    GenArgs gen;
    auto* gen_cmd = app.add_subcommand("gen-synthetic", "generate a synthetic ICS-like dataset");
    gen_cmd->add_option("--rows", gen.rows, "total rows (default 10000)");
    gen_cmd->add_option("--attack-frac", gen.attack_frac, "attack fraction (default 0.06)");
    gen_cmd->add_option("--features", gen.features, "feature count (default 20)");
    gen_cmd->add_option("--out-train", gen.out_train, "output train container")->required();
    gen_cmd->add_option("--out-test", gen.out_test, "output test container")->required();
    gen_cmd->add_option("--config", gen.config, "key = value config file");
    gen_cmd->add_option("--preset", gen.preset, "wadi or swat");
    gen.flags.app = gen_cmd;
    add_common_data_flags(gen.flags);

    TrainArgs teacher;
    auto* teach_cmd = app.add_subcommand("train-teacher", "train the KAN teacher with cross-entropy");
    teach_cmd->add_option("--train", teacher.train, "prepared train container")->required();
    teach_cmd->add_option("--out", teacher.out, "output model path")->required();
    teach_cmd->add_option("--history", teacher.history, "loss history path (default <out>.history.csv)");
    teach_cmd->add_option("--checkpoint", teacher.checkpoint, "per-epoch checkpoint path");
    teach_cmd->add_option("--config", teacher.config, "key = value config file");
    teach_cmd->add_option("--preset", teacher.preset, "wadi or swat");
    teach_cmd->add_flag("--deterministic", teacher.deterministic,
                        "single-threaded deterministic execution (always on)");
    teacher.flags.app = teach_cmd;
    add_train_flags(teacher.flags, true);

    TrainArgs student;
    auto* stud_cmd = app.add_subcommand("train-student", "train a bare MLP student (no teacher)");
    stud_cmd->add_option("--train", student.train, "prepared train container")->required();
    stud_cmd->add_option("--out", student.out, "output model path")->required();
    stud_cmd->add_option("--history", student.history, "loss history path (default <out>.history.csv)");
    stud_cmd->add_option("--checkpoint", student.checkpoint, "per-epoch checkpoint path");
    stud_cmd->add_option("--config", student.config, "key = value config file");
    stud_cmd->add_option("--preset", student.preset, "wadi or swat");
    stud_cmd->add_flag("--deterministic", student.deterministic,
                       "single-threaded deterministic execution (always on)");
    student.flags.app = stud_cmd;
    add_train_flags(student.flags, false);

    DistillArgs distill;
    auto* dist_cmd = app.add_subcommand("distill", "distill a frozen KAN teacher into an MLP student");
    dist_cmd->add_option("--train", distill.train, "prepared train container")->required();
    dist_cmd->add_option("--teacher", distill.teacher, "trained teacher model")->required();
    dist_cmd->add_option("--out", distill.out, "output student model path")->required();
    dist_cmd->add_option("--history", distill.history, "loss history path (default <out>.history.csv)");
    dist_cmd->add_option("--checkpoint", distill.checkpoint, "per-epoch checkpoint path");
    dist_cmd->add_option("--config", distill.config, "key = value config file");
    dist_cmd->add_option("--preset", distill.preset, "wadi or swat");
    distill.flags.app = dist_cmd;
    add_train_flags(distill.flags, false);
    add_dkd_flags(distill.flags);

    EvalArgs eval;
    auto* eval_cmd = app.add_subcommand("eval", "evaluate a model on a prepared dataset");
    eval_cmd->add_option("--model", eval.model, "model container")->required();
    eval_cmd->add_option("--data", eval.data, "prepared dataset container")->required();
    eval_cmd->add_option("--report", eval.report, "write the human-readable table here");
    eval_cmd->add_option("--kv", eval.kv, "write key=value metrics here");
    eval_cmd->add_option("--confusion", eval.confusion, "write the 2x2 confusion matrix CSV here");

    ExportArgs exp;
    auto* exp_cmd = app.add_subcommand("export-embeddings", "dump per-sample embeddings to CSV");
    exp_cmd->add_option("--model", exp.model, "model container")->required();
    exp_cmd->add_option("--data", exp.data, "prepared dataset container")->required();
    exp_cmd->add_option("--layer", exp.layer, "penultimate (default) or logits");
    exp_cmd->add_option("--out", exp.out, "output CSV path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (prep_cmd->parsed()) run_prepare(prepare);
        if (gen_cmd->parsed()) run_gen_synthetic(gen);
        if (teach_cmd->parsed()) run_train_teacher(teacher);
        if (stud_cmd->parsed()) run_train_student(student);
        if (dist_cmd->parsed()) run_distill(distill);
        if (eval_cmd->parsed()) run_eval(eval);
        if (exp_cmd->parsed()) run_export(exp);
    } catch (const CliError& e) {
        std::cerr << "error: " << e.message << "\n";
        return e.exit_code;
    } catch (const std::runtime_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
    return kExitOk;
}
