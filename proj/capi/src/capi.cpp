#include "kandistill.h"

#include <cstring>
#include <memory>
#include <string>

#include "kandistill/bytes.hpp"
#include "kandistill/data.hpp"
#include "kandistill/errors.hpp"
#include "kandistill/metrics.hpp"
#include "kandistill/model_store.hpp"
#include "kandistill/trainer.hpp"
#include "kandistill/version.hpp"

namespace kd = kandistill;

struct kd_dataset {
    kd::Dataset data;
};

struct kd_model {
    std::unique_ptr<kd::Model> model;
};

namespace {

thread_local std::string g_last_error;

void set_error(const std::string& message) { g_last_error = message; }

kd_status fail(kd_status code, const std::string& message) {
    set_error(message);
    return code;
}

// Runs fn, translating exceptions into status codes.
template <typename Fn>
kd_status guarded(Fn&& fn) {
    try {
        fn();
        return KD_OK;
    } catch (const kd::DimensionError& e) {
        return fail(KD_ERR_DIMENSION, e.what());
    } catch (const kd::ParseError& e) {
        return fail(KD_ERR_PARSE, e.what());
    } catch (const kd::IoError& e) {
        return fail(KD_ERR_IO, e.what());
    } catch (const kd::FormatError& e) {
        return fail(KD_ERR_FORMAT, e.what());
    } catch (const kd::DivergenceError& e) {
        return fail(KD_ERR_DIVERGED, e.what());
    } catch (const kd::InvalidArgument& e) {
        return fail(KD_ERR_INVALID_ARGUMENT, e.what());
    } catch (const std::exception& e) {
        return fail(KD_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(KD_ERR_INTERNAL, "unknown error");
    }
}

kd_status require(bool ok, const char* message) {
    return ok ? KD_OK : fail(KD_ERR_INVALID_ARGUMENT, message);
}

void copy_out(const std::string& text, char* buf, size_t cap) {
    if (!buf || cap == 0) return;
    const size_t n = std::min(text.size(), cap - 1);
    std::memcpy(buf, text.data(), n);
    buf[n] = '\0';
}

std::vector<std::string> split_csv_list(const char* text) {
    std::vector<std::string> out;
    if (!text) return out;
    std::string cur;
    for (const char* p = text; *p; ++p) {
        if (*p == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(*p);
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

kd::TrainConfig to_train_config(const kd_train_config* cfg) {
    kd::TrainConfig out;
    out.epochs = cfg->epochs;
    out.batch_size = cfg->batch_size;
    out.learning_rate = cfg->learning_rate;
    out.optimizer = cfg->optimizer == 1 ? kd::OptimizerKind::sgd : kd::OptimizerKind::adam;
    out.seed = cfg->seed;
    if (cfg->use_class_weights) {
        out.class_weights = {cfg->class_weight_normal, cfg->class_weight_attack};
    }
    if (cfg->checkpoint_path) out.checkpoint_path = cfg->checkpoint_path;
    return out;
}

kd::DkdConfig to_dkd_config(const kd_dkd_config* dkd) {
    kd::DkdConfig out;
    out.alpha = dkd->alpha;
    out.beta = dkd->beta;
    out.lambda_mix = dkd->lambda_mix;
    out.warmup_epochs = dkd->warmup_epochs;
    out.temperature = dkd->temperature;
    return out;
}

kd_eval_report to_c_report(const kd::EvalReport& r) {
    kd_eval_report out;
    out.tp = r.tp;
    out.fp = r.fp;
    out.tn = r.tn;
    out.fn = r.fn;
    out.accuracy = r.accuracy;
    out.precision = r.precision;
    out.recall = r.recall;
    out.f1 = r.f1;
    out.precision_defined = r.precision_defined ? 1 : 0;
    out.recall_defined = r.recall_defined ? 1 : 0;
    out.f1_defined = r.f1_defined ? 1 : 0;
    return out;
}

kd::EvalReport from_c_report(const kd_eval_report* r) {
    kd::EvalReport out;
    out.tp = r->tp;
    out.fp = r->fp;
    out.tn = r->tn;
    out.fn = r->fn;
    out.accuracy = r->accuracy;
    out.precision = r->precision;
    out.recall = r->recall;
    out.f1 = r->f1;
    out.precision_defined = r->precision_defined != 0;
    out.recall_defined = r->recall_defined != 0;
    out.f1_defined = r->f1_defined != 0;
    return out;
}

} // namespace

extern "C" {

const char* kd_version(void) { return kd::kVersion; }

const char* kd_last_error(void) { return g_last_error.c_str(); }

kd_status kd_dataset_gen_synthetic(long long n_normal, long long n_attack, int n_features,
                                   unsigned long long seed, kd_dataset** out) {
    if (auto s = require(out != nullptr, "out is NULL")) return s;
    if (auto s = require(n_normal >= 0 && n_attack >= 0, "row counts must be >= 0")) return s;
    return guarded([&] {
        auto handle = std::make_unique<kd_dataset>();
        handle->data = kd::gen_synthetic(static_cast<std::size_t>(n_normal),
                                         static_cast<std::size_t>(n_attack), n_features, seed);
        *out = handle.release();
    });
}

kd_status kd_dataset_open(const char* path, kd_dataset** out) {
    if (auto s = require(path && out, "path/out is NULL")) return s;
    return guarded([&] {
        auto handle = std::make_unique<kd_dataset>();
        handle->data = kd::load_dataset(path);
        *out = handle.release();
    });
}

kd_status kd_dataset_save(const kd_dataset* data, const char* path) {
    if (auto s = require(data && path, "data/path is NULL")) return s;
    return guarded([&] { kd::save_dataset(data->data, path); });
}

kd_status kd_dataset_split_scale(const kd_dataset* data, double test_fraction, int shuffled,
                                 unsigned long long seed, int scaler_kind, kd_dataset** train_out,
                                 kd_dataset** test_out) {
    if (auto s = require(data && train_out && test_out, "data/out is NULL")) return s;
    if (auto s = require(scaler_kind == 0 || scaler_kind == 1, "scaler_kind must be 0 or 1")) return s;
    return guarded([&] {
        auto [train, test] = kd::split(data->data, test_fraction, seed, shuffled != 0);
        const auto params = kd::fit_scaler(
            train, scaler_kind == 1 ? kd::ScalerKind::minmax : kd::ScalerKind::standard);
        kd::apply_scaler(train, params);
        kd::apply_scaler(test, params);
        auto a = std::make_unique<kd_dataset>();
        auto b = std::make_unique<kd_dataset>();
        a->data = std::move(train);
        b->data = std::move(test);
        *train_out = a.release();
        *test_out = b.release();
    });
}

kd_status kd_dataset_mask(kd_dataset* data, double mask_prob, unsigned long long seed) {
    if (auto s = require(data != nullptr, "data is NULL")) return s;
    return guarded([&] { kd::random_mask(data->data, mask_prob, seed); });
}

long long kd_dataset_rows(const kd_dataset* data) {
    return data ? static_cast<long long>(data->data.n_rows) : -1;
}

int kd_dataset_features(const kd_dataset* data) {
    return data ? static_cast<int>(data->data.n_features) : -1;
}

kd_status kd_dataset_feature_name(const kd_dataset* data, int index, char* buf, size_t cap) {
    if (auto s = require(data && buf && cap > 0, "data/buf is NULL")) return s;
    if (auto s = require(index >= 0 && static_cast<std::size_t>(index) < data->data.feature_names.size(),
                         "feature index out of range")) {
        return s;
    }
    copy_out(data->data.feature_names[static_cast<std::size_t>(index)], buf, cap);
    return KD_OK;
}

kd_status kd_dataset_class_counts(const kd_dataset* data, long long* n_normal,
                                  long long* n_attack) {
    if (auto s = require(data && n_normal && n_attack, "data/out is NULL")) return s;
    *n_normal = static_cast<long long>(data->data.count_label(0));
    *n_attack = static_cast<long long>(data->data.count_label(1));
    return KD_OK;
}

void kd_dataset_free(kd_dataset* data) { delete data; }

kd_status kd_prepare_csv(const kd_prepare_options* options, char* ledger_buf, size_t ledger_cap) {
    if (auto s = require(options != nullptr, "options is NULL")) return s;
    if (auto s = require(options->csv_path && options->label_column, "csv_path/label_column is NULL")) {
        return s;
    }
    if (auto s = require(options->out_train && options->out_test, "out_train/out_test is NULL")) {
        return s;
    }
    return guarded([&] {
        kd::PrepareOptions opts;
        opts.label_column = options->label_column;
        opts.positive_labels = split_csv_list(options->positive_labels);
        if (opts.positive_labels.empty()) opts.positive_labels = {"Attack"};
        if (options->delimiter) opts.delimiter = options->delimiter;
        opts.test_fraction = options->test_fraction > 0.0 ? options->test_fraction : 0.2;
        opts.shuffled_split = options->shuffled_split != 0;
        opts.seed = options->seed;
        opts.scaler = options->scaler == 1 ? kd::ScalerKind::minmax : kd::ScalerKind::standard;
        opts.mask_prob = options->mask_prob;
        opts.mask_seed = options->mask_seed;

        auto outcome = kd::prepare_csv(options->csv_path, opts);
        kd::save_dataset(outcome.train, options->out_train);
        kd::save_dataset(outcome.test, options->out_test);
        copy_out(outcome.ledger_text, ledger_buf, ledger_cap);
    });
}

kd_status kd_model_create_kan(const int* dims, int n_dims, int grid_size, int order,
                              double domain_lo, double domain_hi, unsigned long long seed,
                              kd_model** out) {
    if (auto s = require(dims && out, "dims/out is NULL")) return s;
    if (auto s = require(n_dims >= 2, "n_dims must be >= 2")) return s;
    return guarded([&] {
        const std::vector<int> d(dims, dims + n_dims);
        auto handle = std::make_unique<kd_model>();
        handle->model = std::make_unique<kd::KanNetwork>(
            d, kd::GridSpec{domain_lo, domain_hi, grid_size, order}, seed);
        *out = handle.release();
    });
}

kd_status kd_model_create_mlp(const int* dims, int n_dims, const char* activation,
                              unsigned long long seed, kd_model** out) {
    if (auto s = require(dims && out, "dims/out is NULL")) return s;
    if (auto s = require(n_dims >= 2, "n_dims must be >= 2")) return s;
    return guarded([&] {
        const std::vector<int> d(dims, dims + n_dims);
        const auto act = activation ? kd::activation_from_name(activation) : kd::Activation::relu;
        auto handle = std::make_unique<kd_model>();
        handle->model = std::make_unique<kd::MlpNetwork>(d, act, seed);
        *out = handle.release();
    });
}

kd_status kd_model_load(const char* path, kd_model** out) {
    if (auto s = require(path && out, "path/out is NULL")) return s;
    return guarded([&] {
        auto handle = std::make_unique<kd_model>();
        handle->model = kd::load_model(path);
        *out = handle.release();
    });
}

kd_status kd_model_save(const kd_model* model, const char* path) {
    if (auto s = require(model && model->model && path, "model/path is NULL")) return s;
    return guarded([&] { kd::save_model(*model->model, path); });
}

int kd_model_kind(const kd_model* model) {
    if (!model || !model->model) return -1;
    return static_cast<int>(model->model->kind());
}

int kd_model_input_dim(const kd_model* model) {
    if (!model || !model->model) return -1;
    return model->model->input_dim();
}

int kd_model_output_dim(const kd_model* model) {
    if (!model || !model->model) return -1;
    return model->model->output_dim();
}

long long kd_model_parameter_count(const kd_model* model) {
    if (!model || !model->model) return -1;
    return static_cast<long long>(model->model->parameter_count());
}

kd_status kd_model_forward(const kd_model* model, const double* x, int n, double* logits, int c) {
    if (auto s = require(model && model->model && x && logits, "model/x/logits is NULL")) return s;
    if (auto s = require(n == kd_model_input_dim(model), "input length mismatch")) return s;
    if (auto s = require(c == kd_model_output_dim(model), "logits length mismatch")) return s;
    return guarded([&] {
        const auto out = model->model->forward(std::span<const double>(x, static_cast<std::size_t>(n)));
        std::memcpy(logits, out.data(), out.size() * sizeof(double));
    });
}

void kd_model_free(kd_model* model) { delete model; }

kd_status kd_train_teacher(kd_model* model, const kd_dataset* train, const kd_train_config* cfg,
                           const char* history_path) {
    if (auto s = require(model && model->model && train && cfg, "model/train/cfg is NULL")) return s;
    if (auto s = require(model->model->kind() == kd::ModelKind::kan,
                         "teacher training requires a KAN model")) {
        return s;
    }
    return guarded([&] {
        const auto history = kd::train_supervised(*model->model, train->data, to_train_config(cfg));
        if (history_path) kd::write_history(history, history_path);
    });
}

kd_status kd_train_student(kd_model* model, const kd_dataset* train, const kd_train_config* cfg,
                           const char* history_path) {
    if (auto s = require(model && model->model && train && cfg, "model/train/cfg is NULL")) return s;
    return guarded([&] {
        const auto history = kd::train_supervised(*model->model, train->data, to_train_config(cfg));
        if (history_path) kd::write_history(history, history_path);
    });
}

kd_status kd_distill_student(kd_model* student, const kd_model* teacher, const kd_dataset* train,
                             const kd_train_config* cfg, const kd_dkd_config* dkd,
                             const char* history_path) {
    if (auto s = require(student && student->model && teacher && teacher->model && train && cfg && dkd,
                         "student/teacher/train/cfg/dkd is NULL")) {
        return s;
    }
    return guarded([&] {
        auto config = to_train_config(cfg);
        config.dkd = to_dkd_config(dkd);
        const auto history =
            kd::distill_student(*student->model, *teacher->model, train->data, config);
        if (history_path) kd::write_history(history, history_path);
    });
}

kd_status kd_evaluate(const kd_model* model, const kd_dataset* data, kd_eval_report* out) {
    if (auto s = require(model && model->model && data && out, "model/data/out is NULL")) return s;
    return guarded([&] { *out = to_c_report(kd::evaluate(*model->model, data->data)); });
}

kd_status kd_export_embeddings(const kd_model* model, const kd_dataset* data,
                               const char* layer_tag, const char* path) {
    if (auto s = require(model && model->model && data && layer_tag && path,
                         "model/data/layer_tag/path is NULL")) {
        return s;
    }
    return guarded([&] { kd::export_embeddings(*model->model, data->data, layer_tag, path); });
}

kd_status kd_eval_report_format(const kd_eval_report* report, int style,
                                long long parameter_count, char* buf, size_t cap) {
    if (auto s = require(report && buf && cap > 0, "report/buf is NULL")) return s;
    if (auto s = require(style == 0 || style == 1, "style must be 0 or 1")) return s;
    return guarded([&] {
        const auto r = from_c_report(report);
        const auto n = parameter_count > 0 ? static_cast<std::size_t>(parameter_count) : 0;
        copy_out(style == 0 ? kd::format_report_table(r, n) : kd::format_report_kv(r, n), buf, cap);
    });
}

kd_status kd_eval_report_confusion_csv(const kd_eval_report* report, char* buf, size_t cap) {
    if (auto s = require(report && buf && cap > 0, "report/buf is NULL")) return s;
    copy_out(kd::format_confusion_csv(from_c_report(report)), buf, cap);
    return KD_OK;
}

kd_status kd_file_crc32(const char* path, unsigned int* out) {
    if (auto s = require(path && out, "path/out is NULL")) return s;
    return guarded([&] { *out = kd::crc32_file(path); });
}

} // extern "C"
