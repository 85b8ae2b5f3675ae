/*
 * C interface to the hsirestore library: mixed-noise restoration of
 * hyperspectral cubes with a TV-regularized low-rank Tucker model.
 *
 * All objects are opaque handles owned by the caller and released with the
 * matching *_destroy function. Every fallible call returns an hsir_status;
 * on failure hsir_last_error() describes the problem (thread-local, valid
 * until the next failing call on the same thread). Band indices are 0-based.
 */
#ifndef HSIRESTORE_H
#define HSIRESTORE_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(HSIR_BUILDING)
#    define HSIR_API __declspec(dllexport)
#  else
#    define HSIR_API __declspec(dllimport)
#  endif
#else
#  define HSIR_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum hsir_status {
    HSIR_OK = 0,
    HSIR_E_ARGUMENT = 1, /* invalid parameter, shape or index */
    HSIR_E_IO = 2,       /* file could not be opened, read or written */
    HSIR_E_FORMAT = 3,   /* malformed cube header/payload or JSON document */
    HSIR_E_DATA = 4,     /* unusable data: non-finite samples, mismatched cubes */
    HSIR_E_STATE = 5,    /* operation not valid in this configuration */
    HSIR_E_INTERNAL = 6
} hsir_status;

typedef enum hsir_dtype { HSIR_F32 = 0, HSIR_F64 = 1 } hsir_dtype;
typedef enum hsir_model { HSIR_MODEL_GENERAL = 0, HSIR_MODEL_APPROXIMATE = 1 } hsir_model;
typedef enum hsir_axis { HSIR_AXIS_HORIZONTAL = 0, HSIR_AXIS_VERTICAL = 1 } hsir_axis;

typedef struct hsir_cube hsir_cube;
typedef struct hsir_report hsir_report;
typedef struct hsir_metrics hsir_metrics;

HSIR_API const char* hsir_last_error(void);
HSIR_API const char* hsir_version(void);

/* ---- cubes ------------------------------------------------------------ */

HSIR_API hsir_status hsir_cube_create(size_t height, size_t width, size_t bands, hsir_cube** out);
/* Copies height*width*bands doubles in band-sequential, row-major order. */
HSIR_API hsir_status hsir_cube_from_data(size_t height, size_t width, size_t bands, const double* data,
                                         hsir_cube** out);
HSIR_API hsir_status hsir_cube_clone(const hsir_cube* cube, hsir_cube** out);
HSIR_API void hsir_cube_destroy(hsir_cube* cube);
HSIR_API hsir_status hsir_cube_shape(const hsir_cube* cube, size_t* height, size_t* width, size_t* bands);
/* Borrowed pointer to the storage; valid while the cube lives. */
HSIR_API double* hsir_cube_data(hsir_cube* cube);
HSIR_API const double* hsir_cube_cdata(const hsir_cube* cube);

HSIR_API hsir_status hsir_cube_read(const char* path, hsir_cube** out);
HSIR_API hsir_status hsir_cube_write(const char* path, const hsir_cube* cube, hsir_dtype dtype);
/* Write with a value_range entry in the header. */
HSIR_API hsir_status hsir_cube_write_ranged(const char* path, const hsir_cube* cube, hsir_dtype dtype,
                                            double range_min, double range_max);

/* ranges receives 2*bands doubles (min, max per band). */
HSIR_API hsir_status hsir_normalize_bands(const hsir_cube* cube, hsir_cube** out, double* ranges);
HSIR_API hsir_status hsir_denormalize_bands(const hsir_cube* cube, const double* ranges, hsir_cube** out);
HSIR_API hsir_status hsir_export_band_png(const hsir_cube* cube, size_t band, const char* path);

/* ---- noise simulation -------------------------------------------------- */

/* spec_json is a NoiseSpec document ({"case_id", "seed", "gaussian_sigma",
 * "impulse_fraction", "deadline_band_range", "stripe_band_range"}). mask may
 * be NULL; otherwise it receives per-voxel flags (1 impulse, 2 deadline,
 * 4 stripe, OR-ed). */
HSIR_API hsir_status hsir_apply_noise(const hsir_cube* clean, const char* spec_json, hsir_cube** noisy,
                                      hsir_cube** mask);
/* Validates spec_json and re-serializes it in canonical form. Free with hsir_string_free. */
HSIR_API hsir_status hsir_noise_spec_canonical(const char* spec_json, char** out);

/* ---- restoration -------------------------------------------------------- */

typedef struct hsir_solver_config {
    hsir_model model;
    double tau;
    double lambda_c; /* lambda = 100 * lambda_c / sqrt(height * width) */
    double beta;     /* general model; negative means "unset" (defaults to 100) */
    double weights[3]; /* spectral, horizontal, vertical */
    size_t ranks[3];   /* all zero means automatic ranks */
    double mu0;
    double rho;
    double mu_max;
    double eps;      /* stop when ||dX||^2/||Y||^2 <= eps ... */
    double feas_tol; /* ... and ||Y-X-S-N||/||Y|| <= feas_tol */
    int max_iter;
    int hooi_sweeps;
} hsir_solver_config;

HSIR_API void hsir_solver_config_default(hsir_solver_config* cfg);
HSIR_API hsir_status hsir_auto_ranks(size_t height, size_t width, size_t bands, size_t ranks[3]);

HSIR_API hsir_status hsir_restore(const hsir_cube* noisy, const hsir_solver_config* cfg, hsir_report** out);
HSIR_API void hsir_report_destroy(hsir_report* report);
/* Borrowed; valid while the report lives. */
HSIR_API const hsir_cube* hsir_report_restored(const hsir_report* report);
HSIR_API const hsir_cube* hsir_report_sparse(const hsir_report* report);
HSIR_API const hsir_cube* hsir_report_gaussian(const hsir_report* report);
HSIR_API int hsir_report_iterations(const hsir_report* report);
HSIR_API int hsir_report_converged(const hsir_report* report);
HSIR_API const double* hsir_report_rel_change(const hsir_report* report, size_t* len);
HSIR_API const double* hsir_report_residual(const hsir_report* report, size_t* len);
HSIR_API void hsir_report_ranks(const hsir_report* report, size_t ranks[3]);
HSIR_API double hsir_report_lambda(const hsir_report* report);
HSIR_API double hsir_report_beta(const hsir_report* report);

/* ---- metrics ------------------------------------------------------------ */

HSIR_API hsir_status hsir_evaluate(const hsir_cube* ref, const hsir_cube* test, hsir_metrics** out);
HSIR_API void hsir_metrics_destroy(hsir_metrics* m);
HSIR_API double hsir_metrics_mpsnr(const hsir_metrics* m);
HSIR_API double hsir_metrics_mssim(const hsir_metrics* m);
HSIR_API double hsir_metrics_ergas(const hsir_metrics* m);
HSIR_API size_t hsir_metrics_bands(const hsir_metrics* m);
HSIR_API double hsir_metrics_band_psnr(const hsir_metrics* m, size_t band);
HSIR_API double hsir_metrics_band_ssim(const hsir_metrics* m, size_t band);
/* Free with hsir_string_free. */
HSIR_API hsir_status hsir_metrics_csv(const hsir_metrics* m, char** out);
HSIR_API hsir_status hsir_metrics_json(const hsir_metrics* m, char** out);

/* out must hold height (horizontal) or width (vertical) doubles; len is its capacity. */
HSIR_API hsir_status hsir_mean_profile(const hsir_cube* cube, size_t band, hsir_axis axis, double* out,
                                       size_t len);

HSIR_API void hsir_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif /* HSIRESTORE_H */
