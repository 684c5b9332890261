#ifndef BIGTAX_H
#define BIGTAX_H

/* C interface to the bigtax library. All functions returning bigtax_status
 * set a thread-local message retrievable via bigtax_last_error() on failure.
 * Strings returned through char** are owned by the caller; release them with
 * bigtax_string_free(). Handles are opaque; free with the matching *_free(). */

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
  BIGTAX_OK = 0,
  BIGTAX_E_IO = 1,
  BIGTAX_E_PARSE = 2,
  BIGTAX_E_INVALID_ARGUMENT = 3,
  BIGTAX_E_EMPTY_DATA = 4,
  BIGTAX_E_SCHEMA_MISMATCH = 5,
  BIGTAX_E_MISSING_VALUES = 6,
  BIGTAX_E_CONSTANT_COLUMN = 7,
  BIGTAX_E_SINGULAR = 8,
  BIGTAX_E_NOT_CONVERGED = 9,
  BIGTAX_E_UNSUPPORTED = 10,
  BIGTAX_E_INTERNAL = 11
} bigtax_status;

typedef struct bigtax_dataset bigtax_dataset;
typedef struct bigtax_model bigtax_model;
typedef struct bigtax_report bigtax_report;

const char *bigtax_version(void);
const char *bigtax_last_error(void);
void bigtax_string_free(char *s);

/* ---- datasets ---- */

bigtax_status bigtax_dataset_load_csv(const char *path, const char *label_column,
                                      const char *schema_path_or_null,
                                      bigtax_dataset **out);
void bigtax_dataset_free(bigtax_dataset *ds);
bigtax_status bigtax_dataset_set_name(bigtax_dataset *ds, const char *name);
int bigtax_dataset_n(const bigtax_dataset *ds);
int bigtax_dataset_p(const bigtax_dataset *ds);
int bigtax_dataset_classes(const bigtax_dataset *ds);
bigtax_status bigtax_dataset_missing_json(const bigtax_dataset *ds, char **json_out);
/* policy: "delete" | "central" */
bigtax_status bigtax_dataset_impute(const bigtax_dataset *ds, const char *policy,
                                    bigtax_dataset **out);
/* kind: "standardize" | "unitize"; sd_scale applies to standardize only */
bigtax_status bigtax_dataset_transform(const bigtax_dataset *ds, const char *kind,
                                       int sd_scale, bigtax_dataset **out,
                                       char **params_json_out);
/* re-apply parameters captured by bigtax_dataset_transform to new data */
bigtax_status bigtax_dataset_apply_transform(const bigtax_dataset *ds,
                                             const char *params_json,
                                             bigtax_dataset **out);
/* stamp_lines: optional newline-separated key=value pairs, written as leading
 * '#' comments (load_csv skips them) */
bigtax_status bigtax_dataset_write_csv(const bigtax_dataset *ds, const char *path,
                                       const char *stamp_lines_or_null);

/* ---- taxonomy ---- */

bigtax_status bigtax_taxonomy_json(long n, long p, int heterogeneous, int missing,
                                   char **json_out);

/* ---- models ---- */

bigtax_status bigtax_fit(const bigtax_dataset *ds, const char *spec,
                         unsigned long long seed, bigtax_model **out);
void bigtax_model_free(bigtax_model *m);
/* stamp_lines: optional key=value pairs stored under a top-level "config"
 * key; ignored when loading */
bigtax_status bigtax_model_save(const bigtax_model *m, const char *path,
                                const char *stamp_lines_or_null);
bigtax_status bigtax_model_load(const char *path, bigtax_model **out);
bigtax_status bigtax_model_method(const bigtax_model *m, char **out);
bigtax_status bigtax_model_predict(const bigtax_model *m, const double *x, int p,
                                   int *label_out);
bigtax_status bigtax_evaluate(const bigtax_model *m, const bigtax_dataset *test,
                              double *epe_out);

/* ---- evaluation ---- */

bigtax_status bigtax_loocv(const bigtax_dataset *ds, const char *spec,
                           double *cv_out);
bigtax_status bigtax_select_k(const bigtax_dataset *ds, const int *ks, int n_ks,
                              const char *distance, char **table_json_out);
bigtax_status bigtax_bench(const bigtax_dataset *const *datasets, int n_datasets,
                           const char *const *methods, int n_methods, int R,
                           double test_fraction, unsigned long long seed,
                           int standardize, bigtax_report **out);
void bigtax_report_free(bigtax_report *r);
/* format: "csv_long" | "csv_summary" | "md" | "json" | "svg";
 * stamp_lines: newline-separated key=value pairs echoed into the artifact */
bigtax_status bigtax_report_render(const bigtax_report *r, const char *format,
                                   const char *stamp_lines, char **out);
bigtax_status bigtax_write_file_atomic(const char *path, const char *bytes);

#ifdef __cplusplus
}
#endif

#endif /* BIGTAX_H */
