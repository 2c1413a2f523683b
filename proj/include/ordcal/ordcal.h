/*
 * Copyright 2026 The ordcal Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#ifndef ORDCAL_ORDCAL_H_
#define ORDCAL_ORDCAL_H_

/*
 * C interface to the ordcal radial-distortion toolkit.
 *
 * Conventions:
 *   - Every fallible call returns an ordcal_status. On failure the message
 *     for the calling thread is available from ordcal_last_error() until the
 *     next failing call on that thread.
 *   - Objects are opaque handles created by *_create / *_load functions and
 *     released with the matching *_free. Free functions accept NULL.
 *   - Radii passed as "normalized" are pixel radii divided by r_norm.
 *   - Pixel (i, j) has its center at (i + 0.5, j + 0.5).
 *   - All functions are safe to call concurrently on distinct handles;
 *     const handles may be shared between threads.
 */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(ORDCAL_BUILDING_LIBRARY)
#    define ORDCAL_API __declspec(dllexport)
#  else
#    define ORDCAL_API __declspec(dllimport)
#  endif
#else
#  define ORDCAL_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ordcal_status {
  ORDCAL_OK = 0,
  ORDCAL_ERR_ARGUMENT = 1,
  ORDCAL_ERR_DOMAIN = 2,
  ORDCAL_ERR_SINGULAR_MODEL = 3,
  ORDCAL_ERR_OUT_OF_RANGE = 4,
  ORDCAL_ERR_CONVERSION = 5,
  ORDCAL_ERR_ESTIMATION = 6,
  ORDCAL_ERR_CONFIG = 7,
  ORDCAL_ERR_IO = 8,
  ORDCAL_ERR_INTERNAL = 99
} ordcal_status;

typedef enum ordcal_model {
  ORDCAL_MODEL_DIVISION = 0,
  ORDCAL_MODEL_POLYNOMIAL = 1
} ordcal_model;

typedef enum ordcal_scale_policy {
  ORDCAL_SCALE_SAME_SIZE = 0,
  ORDCAL_SCALE_FIT = 1
} ordcal_scale_policy;

typedef enum ordcal_scene {
  ORDCAL_SCENE_MIXED = 0,
  ORDCAL_SCENE_CHECKERBOARD = 1,
  ORDCAL_SCENE_LINES = 2
} ordcal_scene;

/* Borrowed view of a coefficient vector; k[i] multiplies (r/r_norm)^(2i+2). */
typedef struct ordcal_coefficients {
  ordcal_model model;
  const double* k;
  size_t n;
  double r_norm;
} ordcal_coefficients;

ORDCAL_API const char* ordcal_version(void);
ORDCAL_API const char* ordcal_last_error(void);
ORDCAL_API const char* ordcal_status_name(ordcal_status status);
ORDCAL_API double ordcal_default_r_norm(int width, int height);

/* ---- images ------------------------------------------------------------ */

typedef struct ordcal_image ordcal_image;

ORDCAL_API ordcal_status ordcal_image_create(int width, int height,
                                             int channels, ordcal_image** out);
ORDCAL_API ordcal_status ordcal_image_load_png(const char* path,
                                               ordcal_image** out);
ORDCAL_API ordcal_status ordcal_image_save_png(const ordcal_image* image,
                                               const char* path);
ORDCAL_API ordcal_status ordcal_image_crop(const ordcal_image* image, int x0,
                                           int y0, int width, int height,
                                           ordcal_image** out);
ORDCAL_API void ordcal_image_free(ordcal_image* image);
ORDCAL_API int ordcal_image_width(const ordcal_image* image);
ORDCAL_API int ordcal_image_height(const ordcal_image* image);
ORDCAL_API int ordcal_image_channels(const ordcal_image* image);
/* Interleaved row-major bytes, width * height * channels long. */
ORDCAL_API uint8_t* ordcal_image_data(ordcal_image* image);

/* ---- camera model ------------------------------------------------------ */

ORDCAL_API ordcal_status ordcal_distortion_level(const ordcal_coefficients* k,
                                                 double r, double* out);
ORDCAL_API ordcal_status ordcal_undistort_point(const ordcal_coefficients* k,
                                                double xc, double yc, double x,
                                                double y, double* out_x,
                                                double* out_y);
/* Pixel radii in and out; max_search is a normalized radius (use 1.0). */
ORDCAL_API ordcal_status ordcal_solve_distorted_radius(
    const ordcal_coefficients* k, double r_corrected, double max_search,
    double* out);
/* *ok = 1 when monotone on [0, r_max]; else *violation holds the first
 * failing normalized radius. */
ORDCAL_API ordcal_status ordcal_validate_monotone(const ordcal_coefficients* k,
                                                  double r_max, int* ok,
                                                  double* violation);

/* ---- ordinal distortion ------------------------------------------------ */

ORDCAL_API ordcal_status ordcal_compute_ordinal(const ordcal_coefficients* k,
                                                const double* radii, size_t n,
                                                double* levels_out);
/* Writes n coefficients to k_out; condition_out (nullable) receives the
 * 1-norm condition number of the system. */
ORDCAL_API ordcal_status ordcal_ordinal_to_coefficients(
    const double* radii, const double* levels, size_t n, double* k_out,
    double* condition_out);
/* count = n + 2 samples; writes n coefficients to k_out. *flat is set when
 * all levels equal 1 and the center is not identifiable. */
ORDCAL_API ordcal_status ordcal_estimate_full_params(
    const double* levels, const double* xs, const double* ys, size_t count,
    int width, int height, ordcal_model model, double* xc_out, double* yc_out,
    double* k_out, int* flat);

typedef struct ordcal_ddm ordcal_ddm;

ORDCAL_API ordcal_status ordcal_ddm_create(const ordcal_coefficients* k,
                                           double xc, double yc, int width,
                                           int height, ordcal_ddm** out);
/* Copies width * height row-major values. */
ORDCAL_API ordcal_status ordcal_ddm_from_values(const double* values,
                                                int width, int height,
                                                double xc, double yc,
                                                ordcal_ddm** out);
ORDCAL_API void ordcal_ddm_free(ordcal_ddm* map);
ORDCAL_API int ordcal_ddm_width(const ordcal_ddm* map);
ORDCAL_API int ordcal_ddm_height(const ordcal_ddm* map);
ORDCAL_API const double* ordcal_ddm_values(const ordcal_ddm* map);
ORDCAL_API ordcal_status ordcal_ddm_check_symmetry(const ordcal_ddm* map,
                                                   double* out);
ORDCAL_API ordcal_status ordcal_ddm_write_csv(const ordcal_ddm* map,
                                              const char* path);
/* 16-bit gray, delta in [1, delta_max] -> [0, 65535]; delta_max <= 1 uses
 * the map maximum. */
ORDCAL_API ordcal_status ordcal_ddm_write_png(const ordcal_ddm* map,
                                              const char* path,
                                              double delta_max);

/* ---- synthesis --------------------------------------------------------- */

ORDCAL_API ordcal_status ordcal_distort_image(const ordcal_image* clean,
                                              const ordcal_coefficients* k,
                                              double xc, double yc,
                                              ordcal_image** out);
ORDCAL_API ordcal_status ordcal_render_scene(ordcal_scene kind, int width,
                                             int height, uint64_t seed,
                                             ordcal_image** out);

#define ORDCAL_MAX_COEFFICIENTS 8

typedef struct ordcal_dataset_options {
  const char* out_dir;
  const char* source_dir; /* NULL: procedural scenes */
  ordcal_scene scenes;
  int train;
  int test;
  int val;
  int width;
  int height;
  int n;
  uint64_t seed;
  double center_jitter; /* fraction of the image diagonal */
  int write_masks;
  ordcal_model model;
  size_t range_count;
  double range_lo[ORDCAL_MAX_COEFFICIENTS];
  double range_hi[ORDCAL_MAX_COEFFICIENTS];
  int use_level_window;
  double level_lo;
  double level_hi;
} ordcal_dataset_options;

/* Fills the defaults: 500/100/100 samples, 256x256, n = 4, default ranges. */
ORDCAL_API void ordcal_dataset_options_init(ordcal_dataset_options* opts);
ORDCAL_API ordcal_status ordcal_generate_dataset(
    const ordcal_dataset_options* opts, size_t* record_count);

typedef struct ordcal_manifest ordcal_manifest;

/* Paths are resolved against the manifest directory. Pointers stay valid
 * until the manifest is freed. */
typedef struct ordcal_record_view {
  const char* id;
  const char* split;
  const char* source_path;
  const char* distorted_path;
  double xc;
  double yc;
  ordcal_model model;
  const double* k;
  size_t k_count;
  double r_norm;
  const double* radii;
  const double* ordinal;
  size_t ordinal_count;
} ordcal_record_view;

ORDCAL_API ordcal_status ordcal_manifest_load(const char* path,
                                              ordcal_manifest** out);
ORDCAL_API void ordcal_manifest_free(ordcal_manifest* manifest);
ORDCAL_API size_t ordcal_manifest_size(const ordcal_manifest* manifest);
ORDCAL_API ordcal_status ordcal_manifest_find(const ordcal_manifest* manifest,
                                              const char* id, size_t* index);
ORDCAL_API ordcal_status ordcal_manifest_record(
    const ordcal_manifest* manifest, size_t index, ordcal_record_view* out);
/* The record exactly as serialized on its manifest line. */
ORDCAL_API ordcal_status ordcal_manifest_record_json(
    const ordcal_manifest* manifest, size_t index, const char** json);

/* ---- rectification ----------------------------------------------------- */

typedef struct ordcal_inverse_map ordcal_inverse_map;

ORDCAL_API ordcal_status ordcal_inverse_map_build(const ordcal_coefficients* k,
                                                  double xc, double yc,
                                                  int width, int height,
                                                  ordcal_inverse_map** out);
ORDCAL_API void ordcal_inverse_map_free(ordcal_inverse_map* map);
/* *in_range = 0 (and *out untouched) beyond the tabulated radius. */
ORDCAL_API ordcal_status ordcal_inverse_map_lookup(
    const ordcal_inverse_map* map, double r_corrected, double* out,
    int* in_range);

ORDCAL_API ordcal_status ordcal_rectify_image(const ordcal_image* distorted,
                                              const ordcal_coefficients* k,
                                              double xc, double yc,
                                              ordcal_scale_policy policy,
                                              ordcal_image** out);
ORDCAL_API ordcal_status ordcal_rectify_from_ordinal(
    const ordcal_image* distorted, const double* radii, const double* levels,
    size_t n, double r_norm, double xc, double yc, ordcal_scale_policy policy,
    ordcal_image** out);

/* ---- metrics ----------------------------------------------------------- */

/* Identical images give +infinity. */
ORDCAL_API ordcal_status ordcal_psnr(const ordcal_image* a,
                                     const ordcal_image* b, double* out);
ORDCAL_API ordcal_status ordcal_ssim(const ordcal_image* a,
                                     const ordcal_image* b, double* out);
/* conventional = 0 applies the mean-absolute form; 1 the usual RMSE. */
ORDCAL_API ordcal_status ordcal_rmse_params(const double* estimate,
                                            const double* truth, size_t n,
                                            int conventional, double* out);
ORDCAL_API ordcal_status ordcal_mdld(const ordcal_ddm* estimate,
                                     const ordcal_ddm* truth, double* out);
ORDCAL_API ordcal_status ordcal_mdld_coefficients(
    const ordcal_coefficients* estimate, const ordcal_coefficients* truth,
    double xc, double yc, int width, int height, double* out);

typedef struct ordcal_lfr_group {
  double error;
  double data_count;
  double convergence_epoch;
} ordcal_lfr_group;

ORDCAL_API ordcal_status ordcal_learning_friendly_rate(
    const ordcal_lfr_group* groups, size_t count, double total_data,
    double total_epochs, int use_log10, double* out);

#ifdef __cplusplus
}  // extern "C"
#endif

#endif  /* ORDCAL_ORDCAL_H_ */
