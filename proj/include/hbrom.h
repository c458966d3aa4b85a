/* SPDX-License-Identifier: Apache-2.0
 *
 * hbrom: reduced-order modeling of PDE snapshot data with POD/DMD and
 * continuous-depth latent models trained by the adjoint method.
 *
 * All functions return hbrom_status; on failure hbrom_last_error() carries a
 * thread-local message. Objects are opaque handles freed with the matching
 * *_free call. Strings returned through char** are heap-allocated and must
 * be released with hbrom_string_free.
 */
#ifndef HBROM_H
#define HBROM_H

#include <stdint.h>

#if defined(_WIN32)
#define HBROM_API __declspec(dllexport)
#else
#define HBROM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum hbrom_status {
    HBROM_OK = 0,
    HBROM_ERR_INTERNAL = 1,
    HBROM_ERR_USAGE = 2,       /* invalid arguments or malformed files */
    HBROM_ERR_INSTABILITY = 3, /* solver instability */
    HBROM_ERR_DIVERGENCE = 4   /* training divergence; partial metrics retained */
} hbrom_status;

typedef struct hbrom_snapshots hbrom_snapshots;
typedef struct hbrom_pod hbrom_pod;
typedef struct hbrom_dmd hbrom_dmd;
typedef struct hbrom_model hbrom_model;
typedef struct hbrom_train_run hbrom_train_run;

HBROM_API const char* hbrom_version(void);
HBROM_API const char* hbrom_last_error(void);
HBROM_API void hbrom_string_free(char* s);

/* Default JSON configs. command: "simulate.kpp", "simulate.euler",
 * "simulate.synthetic-vks" or "train.<task>"; profile: "desk" or "paper". */
HBROM_API hbrom_status hbrom_default_config(const char* command, const char* profile,
                                            char** json_out);

/* ------------------------------- snapshots ------------------------------ */
/* kind: "kpp", "euler" or "synthetic-vks"; config_json as above. */
HBROM_API hbrom_status hbrom_simulate(const char* kind, const char* config_json,
                                      hbrom_snapshots** out);
HBROM_API hbrom_status hbrom_snapshots_open(const char* path, hbrom_snapshots** out);
HBROM_API hbrom_status hbrom_snapshots_save(const hbrom_snapshots* s, const char* path);
HBROM_API void hbrom_snapshots_free(hbrom_snapshots* s);
/* {"source","nt","ndof","fields":[{name,size}],"t0","t1","params"?} */
HBROM_API hbrom_status hbrom_snapshots_info(const hbrom_snapshots* s, char** json_out);

/* Euler ensemble over a uniform parameter grid; writes member .snap files
 * plus manifest.json into out_dir and returns the manifest path. jobs > 1
 * runs trajectories in parallel. */
HBROM_API hbrom_status hbrom_ensemble_simulate(const char* config_json, int32_t count,
                                               const char* out_dir, int32_t jobs,
                                               char** manifest_path_out);

/* ------------------------------- reduction ------------------------------ */
HBROM_API hbrom_status hbrom_pod_fit(const hbrom_snapshots* s, int32_t rank, hbrom_pod** out);
HBROM_API hbrom_status hbrom_pod_save(const hbrom_pod* p, const char* path);
HBROM_API hbrom_status hbrom_pod_open(const char* path, hbrom_pod** out);
HBROM_API void hbrom_pod_free(hbrom_pod* p);
/* {"rank","effective_rank","info":[{"r","value"}...],"eigenvalues":[...]} */
HBROM_API hbrom_status hbrom_pod_info(const hbrom_pod* p, int32_t max_order, char** json_out);

/* lifts: comma list from {cos,sin,sq,cube}; the identity is implicit. */
HBROM_API hbrom_status hbrom_dmd_fit(const hbrom_snapshots* s, int32_t rank, const char* lifts,
                                     hbrom_dmd** out);
HBROM_API hbrom_status hbrom_dmd_save(const hbrom_dmd* m, const char* path);
HBROM_API hbrom_status hbrom_dmd_open(const char* path, hbrom_dmd** out);
HBROM_API void hbrom_dmd_free(hbrom_dmd* m);
/* {"rank","lift","fit_residual","eigenvalues":[{"re","im","modulus"}...]} */
HBROM_API hbrom_status hbrom_dmd_info(const hbrom_dmd* m, char** json_out);
/* Identity-segment forecast k = 0..horizon steps past training, one row per
 * step. */
HBROM_API hbrom_status hbrom_dmd_predict_csv(const hbrom_dmd* m, int64_t horizon,
                                             const char* csv_path);

/* Per-member POD over an ensemble manifest; writes basis files plus
 * ensemble.json into out_dir and returns a report with the mean I(rank). */
HBROM_API hbrom_status hbrom_ensemble_reduce(const char* manifest_path, int32_t rank,
                                             const char* out_dir, char** json_out);

/* ------------------------------- training ------------------------------- */
/* config_json: the train config (see hbrom_default_config) plus
 * {"reduction": <pod artifact or pod-ensemble manifest path>}. On
 * divergence the run handle is still produced with the partial metrics and
 * HBROM_ERR_DIVERGENCE is returned. */
HBROM_API hbrom_status hbrom_train(const char* config_json, hbrom_train_run** out);
HBROM_API hbrom_status hbrom_train_run_summary(const hbrom_train_run* r, char** json_out);
/* writes metrics.csv, checkpoint.json and run.json under out_dir */
HBROM_API hbrom_status hbrom_train_run_write(const hbrom_train_run* r, const char* out_dir);
HBROM_API void hbrom_train_run_free(hbrom_train_run* r);

/* ------------------------------ prediction ------------------------------ */
HBROM_API hbrom_status hbrom_model_open(const char* checkpoint_path, hbrom_model** out);
HBROM_API void hbrom_model_free(hbrom_model* m);
/* Rolls the model out autoregressively and writes the coefficient CSV
 * (columns t, alpha_1..alpha_r). When reconstruct_csv_path is non-NULL the
 * embedded POD basis reconstructs full fields (row width = basis dof). */
HBROM_API hbrom_status hbrom_model_predict_csv(const hbrom_model* m, int64_t horizon,
                                               const char* csv_path,
                                               const char* reconstruct_csv_path);

/* ------------------------------- reporting ------------------------------ */
/* Aggregates run directories into a comparison summary (medians across
 * seeds, per-model NFE and loss, direction booleans). */
HBROM_API hbrom_status hbrom_report(const char* const* run_dirs, int64_t n_dirs, char** json_out);

#ifdef __cplusplus
}
#endif

#endif /* HBROM_H */
