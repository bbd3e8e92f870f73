/* SPDX-License-Identifier: Apache-2.0
 *
 * C interface to the MVANC simulation library. All state lives behind the
 * opaque handles below; every fallible call returns an mvanc_status and
 * leaves a human-readable message in mvanc_last_error() (thread-local).
 *
 * Status values double as process exit codes for the CLI:
 *   0 success, 2 usage/config error, 3 adaptive divergence, 4 file I/O error.
 */
#ifndef MVANC_H
#define MVANC_H

#include <stdint.h>

#if defined(_WIN32)
#define MVANC_API __declspec(dllexport)
#else
#define MVANC_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mvanc_status {
    MVANC_OK = 0,
    MVANC_ERR_USAGE = 2,
    MVANC_ERR_DIVERGENCE = 3,
    MVANC_ERR_IO = 4,
    MVANC_ERR_INTERNAL = 5
} mvanc_status;

typedef struct mvanc_config_s mvanc_config;
typedef struct mvanc_plant_s mvanc_plant;
typedef struct mvanc_result_s mvanc_result;

MVANC_API const char* mvanc_version(void);

/* Message for the most recent failure on this thread; never NULL. */
MVANC_API const char* mvanc_last_error(void);

/* Status of the most recent failure on this thread (for calls that report
 * failure by returning NULL). */
MVANC_API mvanc_status mvanc_last_status(void);

/* ---- presets and configs ---------------------------------------------- */

MVANC_API int mvanc_preset_count(void);
MVANC_API const char* mvanc_preset_name(int index);
MVANC_API const char* mvanc_preset_description(int index);

MVANC_API mvanc_config* mvanc_config_from_preset(const char* name);
MVANC_API mvanc_config* mvanc_config_from_file(const char* path);
MVANC_API mvanc_config* mvanc_config_default(void);

/* Recognized keys: "seed", "samples" (all three stages), "algorithm"
 * (mcalms|mcfxlms, replaces the algorithm list), "mu-scale", "trace-stride",
 * "name". */
MVANC_API mvanc_status mvanc_config_set(mvanc_config* cfg, const char* key, const char* value);

/* JSON text of the config; release with mvanc_string_free. */
MVANC_API char* mvanc_config_to_json(const mvanc_config* cfg);
MVANC_API void mvanc_config_free(mvanc_config* cfg);
MVANC_API void mvanc_string_free(char* s);

/* ---- plants ------------------------------------------------------------ */

MVANC_API mvanc_plant* mvanc_plant_synth(const mvanc_config* cfg);
MVANC_API mvanc_plant* mvanc_plant_load(const char* path);
MVANC_API mvanc_status mvanc_plant_save(const mvanc_plant* plant, const char* path);
MVANC_API void mvanc_plant_free(mvanc_plant* plant);

/* ---- experiments ------------------------------------------------------- */

/* Runs tuning -> auxiliary -> control for every configured algorithm.
 * plant may be NULL (synthesized from the config). out_dir may be NULL (no
 * artifacts written). threads >= 1 fans the algorithm runs out. */
MVANC_API mvanc_result* mvanc_run(const mvanc_config* cfg, const mvanc_plant* plant,
                                  const char* out_dir, int threads);

MVANC_API int mvanc_result_run_count(const mvanc_result* res);
MVANC_API const char* mvanc_result_algorithm(const mvanc_result* res, int run_index);

/* Steady-state noise reduction per channel (dB). Writes up to cap values,
 * stores the true channel count in *count. */
MVANC_API mvanc_status mvanc_result_control_nr(const mvanc_result* res, int run_index,
                                               double* out, int cap, int* count);
MVANC_API mvanc_status mvanc_result_tuning_nr(const mvanc_result* res, int run_index, double* out,
                                              int cap, int* count);

/* Named summary metric, e.g. "mcalms.control_nr_db_ch1" or "nr_gap_db_ch1". */
MVANC_API mvanc_status mvanc_result_metric(const mvanc_result* res, const char* name,
                                           double* out);

/* Human-readable run summary; release with mvanc_string_free. */
MVANC_API char* mvanc_result_summary(const mvanc_result* res);

/* Number of preset expectation annotations that did not hold. */
MVANC_API int mvanc_result_expectations_failed(const mvanc_result* res);
MVANC_API void mvanc_result_free(mvanc_result* res);

/* ---- complexity --------------------------------------------------------- */

MVANC_API mvanc_status mvanc_ops_mcfxlms(int64_t refs, int64_t sources, int64_t phys_mics,
                                         int64_t control_taps, int64_t aux_taps,
                                         int64_t model_taps, uint64_t* mults, uint64_t* adds);
MVANC_API mvanc_status mvanc_ops_mcalms(int64_t refs, int64_t sources, int64_t phys_mics,
                                        int64_t control_taps, int64_t aux_taps,
                                        int64_t model_taps, uint64_t* mults, uint64_t* adds);

/* Channel-sweep CSV + log-scale SVG under out_dir. */
MVANC_API mvanc_status mvanc_complexity_report(int64_t control_taps, int64_t aux_taps,
                                               int64_t model_taps, int ch_max,
                                               const char* out_dir);

/* ---- spectra ------------------------------------------------------------ */

/* Magnitude-response CSV per filter-bank snapshot plus an overlay SVG. */
MVANC_API mvanc_status mvanc_spectrum_report(const char* const* snapshot_paths, int n_paths,
                                             double band_low, double band_high,
                                             double sample_rate, const char* out_dir);

#ifdef __cplusplus
}
#endif

#endif /* MVANC_H */
