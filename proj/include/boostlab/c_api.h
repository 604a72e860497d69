/*
 * boostlab C interface.
 *
 * Every function returning BlStatus reports failures through the status
 * value; bl_last_error() then holds a one-line diagnostic for the calling
 * thread. Handles are opaque and owned by the caller once returned; free
 * them with the matching *_free function. Strings and buffers handed out by
 * the library are released with bl_string_free / bl_buffer_free.
 */
#ifndef BOOSTLAB_C_API_H_
#define BOOSTLAB_C_API_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define BL_API __declspec(dllexport)
#else
#define BL_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum BlStatus {
  BL_OK = 0,
  BL_ERR_INVALID_ARGUMENT = 1,
  BL_ERR_IO = 2,
  BL_ERR_MALFORMED_CSV = 3,
  BL_ERR_UNKNOWN_COLUMN = 4,
  BL_ERR_LABEL_NOT_BINARY = 5,
  BL_ERR_EMPTY_DATASET = 6,
  BL_ERR_DEGENERATE_SCHEMA = 7,
  BL_ERR_SINGLE_CLASS_DATASET = 8,
  BL_ERR_EMPTY_DATA = 9,
  BL_ERR_SCHEMA_MISMATCH = 10,
  BL_ERR_LENGTH_MISMATCH = 11,
  BL_ERR_SINGLE_CLASS_TRUTH = 12,
  BL_ERR_NO_POSITIVES = 13,
  BL_ERR_INVALID_MODEL = 14,
  BL_ERR_INTERNAL = 15
} BlStatus;

typedef struct BlDataset BlDataset;
typedef struct BlModel BlModel;

typedef struct BlBoostParams {
  int32_t n_rounds;
  double learning_rate;
  int32_t max_depth;
  double lambda;
  double gamma;
  double min_child_weight;
  uint64_t seed;
  int32_t cat_one_hot_max;
  double cat_prior;
  double threshold;
} BlBoostParams;

/* Undefined metrics (zero denominators) are NaN. */
typedef struct BlMetrics {
  uint64_t tp;
  uint64_t fp;
  uint64_t tn;
  uint64_t fn;
  double accuracy;
  double precision;
  double recall;
  double f_score;
  double specificity;
  double tpr;
  double fpr;
  double auc;
} BlMetrics;

BL_API const char* bl_version(void);
BL_API const char* bl_last_error(void);
BL_API const char* bl_status_name(BlStatus status);
BL_API void bl_string_free(char* s);
BL_API void bl_buffer_free(void* p);

/* algo: "adaboost" | "gbm" | "xgboost" | "catboost". */
BL_API BlStatus bl_default_params(const char* algo, int paper_preset, BlBoostParams* out);
BL_API BlStatus bl_params_validate(const BlBoostParams* params);

/* schema_json may be NULL for the built-in twelve-feature PCOS schema. */
BL_API BlStatus bl_dataset_load_csv(const char* path, const char* schema_json, BlDataset** out);
BL_API BlStatus bl_dataset_synthesize(const char* schema_json, uint64_t n, uint64_t seed,
                                      double signal_strength, double missing_rate,
                                      BlDataset** out);
BL_API BlStatus bl_dataset_write_csv(const BlDataset* data, const char* path);
BL_API BlStatus bl_dataset_split(const BlDataset* data, double test_fraction, uint64_t seed,
                                 BlDataset** train, BlDataset** test);
BL_API size_t bl_dataset_rows(const BlDataset* data);
BL_API size_t bl_dataset_cols(const BlDataset* data);
BL_API BlStatus bl_dataset_labels(const BlDataset* data, uint8_t* out, size_t len);
BL_API void bl_dataset_free(BlDataset* data);

BL_API BlStatus bl_model_train(const char* algo, const BlDataset* train,
                               const BlBoostParams* params, BlModel** out);
BL_API BlStatus bl_model_save(const BlModel* model, const char* path);
BL_API BlStatus bl_model_load(const char* path, BlModel** out);
/* Writes the model's training schema as JSON; free with bl_string_free. */
BL_API BlStatus bl_model_schema_json(const BlModel* model, char** out);
BL_API const char* bl_model_algorithm(const BlModel* model);
BL_API BlStatus bl_model_predict_scores(const BlModel* model, const BlDataset* data, double* out,
                                        size_t len);
BL_API void bl_model_free(BlModel* model);

/* Scores file: header "score", one probability per line. */
BL_API BlStatus bl_scores_write(const char* path, const double* scores, size_t n);
BL_API BlStatus bl_scores_read(const char* path, double** out, size_t* n);
/* Truth file: one header line, then one 0/1 label per line. */
BL_API BlStatus bl_truth_read(const char* path, uint8_t** out, size_t* n);

BL_API BlStatus bl_evaluate(const double* scores, const uint8_t* truth, size_t n,
                            double threshold, BlMetrics* out);
/* Writes metrics.json, roc.csv and pr.csv into out_dir (created if absent). */
BL_API BlStatus bl_evaluate_write(const double* scores, const uint8_t* truth, size_t n,
                                  double threshold, const char* out_dir, BlMetrics* out);

/* Runs the four-booster comparison described by config_json. Non-NULL
 * report_json / table receive the report document and the rendered table. */
BL_API BlStatus bl_run_benchmark(const char* config_json, char** report_json, char** table);

#ifdef __cplusplus
}
#endif

#endif /* BOOSTLAB_C_API_H_ */
