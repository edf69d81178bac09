/*
 * kandistill C API: KAN teachers distilled into tiny MLP students for
 * binary intrusion detection.
 *
 * Every function reports success as KD_OK; on failure it returns a status
 * code and stores a human-readable message retrievable (per thread) via
 * kd_last_error(). Objects are opaque handles released with the matching
 * *_free call.
 */
#ifndef KANDISTILL_H
#define KANDISTILL_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum kd_status {
    KD_OK = 0,
    KD_ERR_INVALID_ARGUMENT = 1,
    KD_ERR_DIMENSION = 2,
    KD_ERR_PARSE = 3,
    KD_ERR_IO = 4,
    KD_ERR_FORMAT = 5,
    KD_ERR_DIVERGED = 6,
    KD_ERR_INTERNAL = 7
} kd_status;

typedef struct kd_dataset kd_dataset;
typedef struct kd_model kd_model;

const char* kd_version(void);
/* Message for the most recent failure on this thread; never NULL. */
const char* kd_last_error(void);

/* ---- datasets -------------------------------------------------------- */

/* Correlated-Gaussian synthetic generator with shifted attack features. */
kd_status kd_dataset_gen_synthetic(long long n_normal, long long n_attack, int n_features,
                                   unsigned long long seed, kd_dataset** out);

/* Prepared-dataset container ("KDDS") I/O. */
kd_status kd_dataset_open(const char* path, kd_dataset** out);
kd_status kd_dataset_save(const kd_dataset* data, const char* path);

/* Split (sequential by default; shuffled != 0 permutes rows with the
 * seed), fit the scaler on the train side only, and scale both sides.
 * scaler_kind: 0 standard, 1 minmax. */
kd_status kd_dataset_split_scale(const kd_dataset* data, double test_fraction, int shuffled,
                                 unsigned long long seed, int scaler_kind, kd_dataset** train_out,
                                 kd_dataset** test_out);

/* Zero each cell independently with probability mask_prob in [0, 1). */
kd_status kd_dataset_mask(kd_dataset* data, double mask_prob, unsigned long long seed);

long long kd_dataset_rows(const kd_dataset* data);
int kd_dataset_features(const kd_dataset* data);
kd_status kd_dataset_feature_name(const kd_dataset* data, int index, char* buf, size_t cap);
kd_status kd_dataset_class_counts(const kd_dataset* data, long long* n_normal,
                                  long long* n_attack);
void kd_dataset_free(kd_dataset* data);

/* ---- CSV preparation -------------------------------------------------- */

typedef struct kd_prepare_options {
    const char* csv_path;
    const char* label_column;
    const char* positive_labels; /* comma-separated attack label values */
    char delimiter;              /* 0 means ',' */
    double test_fraction;        /* <= 0 means 0.2 */
    int shuffled_split;
    unsigned long long seed;
    int scaler; /* 0 standard, 1 minmax */
    double mask_prob;
    unsigned long long mask_seed;
    const char* out_train; /* prepared-container path, required */
    const char* out_test;  /* prepared-container path, required */
} kd_prepare_options;

/* Loads the CSV, drops timestamp/index, nan-only and zero-variance
 * columns, splits, standardizes on the train side and writes both
 * containers. A textual drop ledger is copied into ledger_buf (truncated
 * to cap, always NUL-terminated) when ledger_buf is non-NULL. */
kd_status kd_prepare_csv(const kd_prepare_options* options, char* ledger_buf, size_t ledger_cap);

/* ---- models ----------------------------------------------------------- */

kd_status kd_model_create_kan(const int* dims, int n_dims, int grid_size, int order,
                              double domain_lo, double domain_hi, unsigned long long seed,
                              kd_model** out);
kd_status kd_model_create_mlp(const int* dims, int n_dims, const char* activation,
                              unsigned long long seed, kd_model** out);

/* Model container ("KDKD") I/O; loading checks magic, version, checksum. */
kd_status kd_model_load(const char* path, kd_model** out);
kd_status kd_model_save(const kd_model* model, const char* path);

/* 1 = KAN, 2 = MLP; negative on a NULL handle. */
int kd_model_kind(const kd_model* model);
int kd_model_input_dim(const kd_model* model);
int kd_model_output_dim(const kd_model* model);
long long kd_model_parameter_count(const kd_model* model);

kd_status kd_model_forward(const kd_model* model, const double* x, int n, double* logits, int c);
void kd_model_free(kd_model* model);

/* ---- training --------------------------------------------------------- */

typedef struct kd_train_config {
    int epochs;
    int batch_size;
    double learning_rate;
    int optimizer; /* 0 adam, 1 sgd */
    unsigned long long seed;
    int use_class_weights;
    double class_weight_normal;
    double class_weight_attack;
    const char* checkpoint_path; /* optional per-epoch checkpoint */
} kd_train_config;

typedef struct kd_dkd_config {
    double alpha;       /* target-class weight */
    double beta;        /* non-target weight */
    double lambda_mix;  /* distillation share of the total loss */
    int warmup_epochs;  /* linear warm-up length */
    double temperature; /* softmax temperature for both sides */
} kd_dkd_config;

/* Cross-entropy training of a KAN teacher. history_path (optional) gets
 * per-epoch "epoch,hard_loss,dkd_loss,warmup_weight" rows. */
kd_status kd_train_teacher(kd_model* model, const kd_dataset* train, const kd_train_config* cfg,
                           const char* history_path);

/* Plain supervised training of any model (the bare-student baseline). */
kd_status kd_train_student(kd_model* model, const kd_dataset* train, const kd_train_config* cfg,
                           const char* history_path);

/* Student training against a frozen teacher with the mixed objective
 * (1 - lambda) * hard + lambda * min(epoch / warmup, 1) * dkd. */
kd_status kd_distill_student(kd_model* student, const kd_model* teacher, const kd_dataset* train,
                             const kd_train_config* cfg, const kd_dkd_config* dkd,
                             const char* history_path);

/* ---- evaluation ------------------------------------------------------- */

typedef struct kd_eval_report {
    unsigned long long tp, fp, tn, fn;
    double accuracy, precision, recall, f1;
    int precision_defined, recall_defined, f1_defined; /* 0 when the
        denominator was zero and the metric was reported as 0 */
} kd_eval_report;

kd_status kd_evaluate(const kd_model* model, const kd_dataset* data, kd_eval_report* out);

/* layer_tag: "penultimate" or "logits"; writes CSV rows of embedding
 * values followed by the true label. */
kd_status kd_export_embeddings(const kd_model* model, const kd_dataset* data,
                               const char* layer_tag, const char* path);

/* style: 0 human-readable table, 1 machine-readable key=value lines. */
kd_status kd_eval_report_format(const kd_eval_report* report, int style,
                                long long parameter_count, char* buf, size_t cap);
/* 2x2 confusion matrix as "tn,fp\nfn,tp\n". */
kd_status kd_eval_report_confusion_csv(const kd_eval_report* report, char* buf, size_t cap);

/* ---- misc ------------------------------------------------------------- */

kd_status kd_file_crc32(const char* path, unsigned int* out);

#ifdef __cplusplus
}
#endif

#endif /* KANDISTILL_H */
