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
#include "ordcal/ordcal.h"

#include <algorithm>
#include <exception>
#include <new>
#include <string>
#include <vector>

#include "ordcal/camera_model.hpp"
#include "ordcal/errors.hpp"
#include "ordcal/image.hpp"
#include "ordcal/metrics.hpp"
#include "ordcal/ordinal.hpp"
#include "ordcal/rectify.hpp"
#include "ordcal/synth.hpp"

struct ordcal_image {
  ordcal::ImageBuffer buffer;
};

struct ordcal_ddm {
  ordcal::DistortionDistributionMap map;
};

struct ordcal_inverse_map {
  ordcal::InverseRadialMap map;
};

struct ordcal_manifest {
  ordcal::DatasetManifest manifest;
  // Per-record storage backing ordcal_record_view and the JSON accessor.
  struct Strings {
    std::string split;
    std::string source;
    std::string distorted;
    std::string json;
  };
  std::vector<Strings> strings;
};

namespace {

thread_local std::string g_last_error;

ordcal_status set_error(ordcal_status status, const char* what) {
  g_last_error = what;
  return status;
}

// Runs fn, translating exceptions into status codes.
template <typename Fn>
ordcal_status guarded(Fn&& fn) {
  try {
    fn();
    return ORDCAL_OK;
  } catch (const ordcal::Error& e) {
    return set_error(static_cast<ordcal_status>(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return set_error(ORDCAL_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return set_error(ORDCAL_ERR_INTERNAL, e.what());
  } catch (...) {
    return set_error(ORDCAL_ERR_INTERNAL, "unknown error");
  }
}

void require(bool cond, const char* what) {
  if (!cond) throw ordcal::ArgumentError(what);
}

ordcal::DistortionCoefficients to_cpp(const ordcal_coefficients* k) {
  require(k != nullptr, "coefficients must not be NULL");
  require(k->n == 0 || k->k != nullptr, "coefficient array must not be NULL");
  require(k->model == ORDCAL_MODEL_DIVISION || k->model == ORDCAL_MODEL_POLYNOMIAL,
          "unknown camera model");
  ordcal::DistortionCoefficients out;
  out.model = k->model == ORDCAL_MODEL_DIVISION ? ordcal::Model::kDivision
                                                : ordcal::Model::kPolynomial;
  out.k.assign(k->k, k->k + k->n);
  out.r_norm = k->r_norm;
  require(out.r_norm > 0.0, "r_norm must be positive");
  return out;
}

ordcal::ScalePolicy to_cpp(ordcal_scale_policy p) {
  require(p == ORDCAL_SCALE_SAME_SIZE || p == ORDCAL_SCALE_FIT,
          "unknown scale policy");
  return p == ORDCAL_SCALE_FIT ? ordcal::ScalePolicy::kFit
                               : ordcal::ScalePolicy::kSameSize;
}

ordcal::SceneKind to_cpp(ordcal_scene s) {
  switch (s) {
    case ORDCAL_SCENE_MIXED: return ordcal::SceneKind::kMixed;
    case ORDCAL_SCENE_CHECKERBOARD: return ordcal::SceneKind::kCheckerboard;
    case ORDCAL_SCENE_LINES: return ordcal::SceneKind::kLines;
  }
  throw ordcal::ArgumentError("unknown scene kind");
}

ordcal_image* wrap(ordcal::ImageBuffer img) {
  return new ordcal_image{std::move(img)};
}

}  // namespace

extern "C" {

const char* ordcal_version(void) { return "0.1.0"; }

const char* ordcal_last_error(void) { return g_last_error.c_str(); }

const char* ordcal_status_name(ordcal_status status) {
  switch (status) {
    case ORDCAL_OK: return "ok";
    case ORDCAL_ERR_ARGUMENT: return "argument error";
    case ORDCAL_ERR_DOMAIN: return "domain error";
    case ORDCAL_ERR_SINGULAR_MODEL: return "singular model";
    case ORDCAL_ERR_OUT_OF_RANGE: return "out of range";
    case ORDCAL_ERR_CONVERSION: return "conversion error";
    case ORDCAL_ERR_ESTIMATION: return "estimation error";
    case ORDCAL_ERR_CONFIG: return "configuration error";
    case ORDCAL_ERR_IO: return "I/O error";
    case ORDCAL_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

double ordcal_default_r_norm(int width, int height) {
  return ordcal::default_r_norm(width, height);
}

/* images */

ordcal_status ordcal_image_create(int width, int height, int channels,
                                  ordcal_image** out) {
  return guarded([&] {
    require(out != nullptr, "output handle must not be NULL");
    *out = wrap(ordcal::ImageBuffer(width, height, channels));
  });
}

ordcal_status ordcal_image_load_png(const char* path, ordcal_image** out) {
  return guarded([&] {
    require(path != nullptr && out != nullptr, "NULL argument");
    *out = wrap(ordcal::load_png(path));
  });
}

ordcal_status ordcal_image_save_png(const ordcal_image* image,
                                    const char* path) {
  return guarded([&] {
    require(image != nullptr && path != nullptr, "NULL argument");
    ordcal::save_png(image->buffer, path);
  });
}

ordcal_status ordcal_image_crop(const ordcal_image* image, int x0, int y0,
                                int width, int height, ordcal_image** out) {
  return guarded([&] {
    require(image != nullptr && out != nullptr, "NULL argument");
    *out = wrap(ordcal::crop(image->buffer, x0, y0, width, height));
  });
}

void ordcal_image_free(ordcal_image* image) { delete image; }

int ordcal_image_width(const ordcal_image* image) {
  return image ? image->buffer.width() : 0;
}
int ordcal_image_height(const ordcal_image* image) {
  return image ? image->buffer.height() : 0;
}
int ordcal_image_channels(const ordcal_image* image) {
  return image ? image->buffer.channels() : 0;
}
uint8_t* ordcal_image_data(ordcal_image* image) {
  return image ? image->buffer.data().data() : nullptr;
}

/* camera model */

ordcal_status ordcal_distortion_level(const ordcal_coefficients* k, double r,
                                      double* out) {
  return guarded([&] {
    require(out != nullptr, "NULL output");
    *out = ordcal::distortion_level(to_cpp(k), r);
  });
}

ordcal_status ordcal_undistort_point(const ordcal_coefficients* k, double xc,
                                     double yc, double x, double y,
                                     double* out_x, double* out_y) {
  return guarded([&] {
    require(out_x != nullptr && out_y != nullptr, "NULL output");
    const auto p = ordcal::undistort_point({x, y, ordcal::Frame::kDistorted},
                                           to_cpp(k), {xc, yc});
    *out_x = p.x;
    *out_y = p.y;
  });
}

ordcal_status ordcal_solve_distorted_radius(const ordcal_coefficients* k,
                                            double r_corrected,
                                            double max_search, double* out) {
  return guarded([&] {
    require(out != nullptr, "NULL output");
    *out = ordcal::solve_distorted_radius(to_cpp(k), r_corrected, max_search);
  });
}

ordcal_status ordcal_validate_monotone(const ordcal_coefficients* k,
                                       double r_max, int* ok,
                                       double* violation) {
  return guarded([&] {
    require(ok != nullptr, "NULL output");
    const auto check = ordcal::validate_monotone(to_cpp(k), r_max);
    *ok = check.ok ? 1 : 0;
    if (violation && check.violation_radius) *violation = *check.violation_radius;
  });
}

/* ordinal */

ordcal_status ordcal_compute_ordinal(const ordcal_coefficients* k,
                                     const double* radii, size_t n,
                                     double* levels_out) {
  return guarded([&] {
    require(radii != nullptr && levels_out != nullptr, "NULL argument");
    const auto d = ordcal::compute_ordinal(to_cpp(k), {radii, n});
    std::copy(d.levels.begin(), d.levels.end(), levels_out);
  });
}

ordcal_status ordcal_ordinal_to_coefficients(const double* radii,
                                             const double* levels, size_t n,
                                             double* k_out,
                                             double* condition_out) {
  return guarded([&] {
    require(radii != nullptr && levels != nullptr && k_out != nullptr,
            "NULL argument");
    ordcal::OrdinalDistortion d{{radii, radii + n}, {levels, levels + n}};
    const auto res = ordcal::ordinal_to_coefficients(d);
    std::copy(res.coefficients.k.begin(), res.coefficients.k.end(), k_out);
    if (condition_out) *condition_out = res.condition;
  });
}

ordcal_status ordcal_estimate_full_params(const double* levels,
                                          const double* xs, const double* ys,
                                          size_t count, int width, int height,
                                          ordcal_model model, double* xc_out,
                                          double* yc_out, double* k_out,
                                          int* flat) {
  return guarded([&] {
    require(levels && xs && ys && xc_out && yc_out && k_out, "NULL argument");
    std::vector<ordcal::Point> pts(count);
    for (size_t i = 0; i < count; ++i) pts[i] = {xs[i], ys[i], ordcal::Frame::kDistorted};
    const auto m = model == ORDCAL_MODEL_POLYNOMIAL ? ordcal::Model::kPolynomial
                                                    : ordcal::Model::kDivision;
    const auto emit = [&](const ordcal::FullParamsResult& r) {
      *xc_out = r.principal_point.xc;
      *yc_out = r.principal_point.yc;
      std::copy(r.coefficients.k.begin(), r.coefficients.k.end(), k_out);
      if (flat) *flat = r.flat ? 1 : 0;
    };
    try {
      emit(ordcal::estimate_full_params({levels, count}, pts, width, height, m));
    } catch (const ordcal::EstimationError& e) {
      emit(e.best());  // best-so-far is still reported alongside the error
      throw;
    }
  });
}

ordcal_status ordcal_ddm_create(const ordcal_coefficients* k, double xc,
                                double yc, int width, int height,
                                ordcal_ddm** out) {
  return guarded([&] {
    require(out != nullptr, "NULL output");
    *out = new ordcal_ddm{ordcal::ddm(to_cpp(k), {xc, yc}, width, height)};
  });
}

ordcal_status ordcal_ddm_from_values(const double* values, int width,
                                     int height, double xc, double yc,
                                     ordcal_ddm** out) {
  return guarded([&] {
    require(values != nullptr && out != nullptr, "NULL argument");
    require(width > 0 && height > 0, "invalid map size");
    ordcal::DistortionDistributionMap m;
    m.width = width;
    m.height = height;
    m.principal_point = {xc, yc};
    m.values.assign(values, values + static_cast<size_t>(width) * height);
    *out = new ordcal_ddm{std::move(m)};
  });
}

void ordcal_ddm_free(ordcal_ddm* map) { delete map; }
int ordcal_ddm_width(const ordcal_ddm* map) { return map ? map->map.width : 0; }
int ordcal_ddm_height(const ordcal_ddm* map) { return map ? map->map.height : 0; }
const double* ordcal_ddm_values(const ordcal_ddm* map) {
  return map ? map->map.values.data() : nullptr;
}

ordcal_status ordcal_ddm_check_symmetry(const ordcal_ddm* map, double* out) {
  return guarded([&] {
    require(map != nullptr && out != nullptr, "NULL argument");
    *out = ordcal::check_symmetry(map->map);
  });
}

ordcal_status ordcal_ddm_write_csv(const ordcal_ddm* map, const char* path) {
  return guarded([&] {
    require(map != nullptr && path != nullptr, "NULL argument");
    ordcal::write_ddm_csv(map->map, path);
  });
}

ordcal_status ordcal_ddm_write_png(const ordcal_ddm* map, const char* path,
                                   double delta_max) {
  return guarded([&] {
    require(map != nullptr && path != nullptr, "NULL argument");
    ordcal::write_ddm_png(map->map, path, delta_max);
  });
}

/* synthesis */

ordcal_status ordcal_distort_image(const ordcal_image* clean,
                                   const ordcal_coefficients* k, double xc,
                                   double yc, ordcal_image** out) {
  return guarded([&] {
    require(clean != nullptr && out != nullptr, "NULL argument");
    *out = wrap(ordcal::distort_image(clean->buffer, to_cpp(k), {xc, yc}));
  });
}

ordcal_status ordcal_render_scene(ordcal_scene kind, int width, int height,
                                  uint64_t seed, ordcal_image** out) {
  return guarded([&] {
    require(out != nullptr, "NULL output");
    *out = wrap(ordcal::render_scene(to_cpp(kind), width, height, seed));
  });
}

void ordcal_dataset_options_init(ordcal_dataset_options* opts) {
  if (!opts) return;
  const ordcal::DatasetConfig defaults;
  *opts = ordcal_dataset_options{};
  opts->out_dir = nullptr;
  opts->source_dir = nullptr;
  opts->scenes = ORDCAL_SCENE_MIXED;
  opts->train = defaults.train;
  opts->test = defaults.test;
  opts->val = defaults.val;
  opts->width = defaults.width;
  opts->height = defaults.height;
  opts->n = defaults.n;
  opts->seed = defaults.seed;
  opts->center_jitter = defaults.center_jitter;
  opts->write_masks = 0;
  opts->model = ORDCAL_MODEL_DIVISION;
  const auto& r = defaults.ranges;
  opts->range_count = r.intervals.size();
  for (size_t i = 0; i < r.intervals.size(); ++i) {
    opts->range_lo[i] = r.intervals[i].first;
    opts->range_hi[i] = r.intervals[i].second;
  }
  opts->use_level_window = r.level_window ? 1 : 0;
  opts->level_lo = r.level_window ? r.level_window->first : 0.0;
  opts->level_hi = r.level_window ? r.level_window->second : 0.0;
}

ordcal_status ordcal_generate_dataset(const ordcal_dataset_options* opts,
                                      size_t* record_count) {
  return guarded([&] {
    require(opts != nullptr && opts->out_dir != nullptr,
            "options and out_dir must not be NULL");
    require(opts->range_count >= 1 && opts->range_count <= ORDCAL_MAX_COEFFICIENTS,
            "range_count must be in [1, ORDCAL_MAX_COEFFICIENTS]");
    ordcal::DatasetConfig cfg;
    cfg.out_dir = opts->out_dir;
    if (opts->source_dir) cfg.source_dir = opts->source_dir;
    cfg.scenes = to_cpp(opts->scenes);
    cfg.train = opts->train;
    cfg.test = opts->test;
    cfg.val = opts->val;
    cfg.width = opts->width;
    cfg.height = opts->height;
    cfg.n = opts->n;
    cfg.seed = opts->seed;
    cfg.center_jitter = opts->center_jitter;
    cfg.write_masks = opts->write_masks != 0;
    cfg.ranges.model = opts->model == ORDCAL_MODEL_POLYNOMIAL
                           ? ordcal::Model::kPolynomial
                           : ordcal::Model::kDivision;
    cfg.ranges.intervals.clear();
    for (size_t i = 0; i < opts->range_count; ++i) {
      cfg.ranges.intervals.emplace_back(opts->range_lo[i], opts->range_hi[i]);
    }
    if (opts->use_level_window) {
      cfg.ranges.level_window = std::make_pair(opts->level_lo, opts->level_hi);
    } else {
      cfg.ranges.level_window.reset();
    }
    const auto m = ordcal::generate_dataset(cfg);
    if (record_count) *record_count = m.records.size();
  });
}

ordcal_status ordcal_manifest_load(const char* path, ordcal_manifest** out) {
  return guarded([&] {
    require(path != nullptr && out != nullptr, "NULL argument");
    auto handle = std::make_unique<ordcal_manifest>();
    handle->manifest = ordcal::load_manifest(path);
    for (const auto& r : handle->manifest.records) {
      handle->strings.push_back({ordcal::to_string(r.split),
                                 handle->manifest.resolve(r.source_path).string(),
                                 handle->manifest.resolve(r.distorted_path).string(),
                                 ordcal::record_to_json(r)});
    }
    *out = handle.release();
  });
}

void ordcal_manifest_free(ordcal_manifest* manifest) { delete manifest; }

size_t ordcal_manifest_size(const ordcal_manifest* manifest) {
  return manifest ? manifest->manifest.records.size() : 0;
}

ordcal_status ordcal_manifest_find(const ordcal_manifest* manifest,
                                   const char* id, size_t* index) {
  return guarded([&] {
    require(manifest && id && index, "NULL argument");
    const auto& recs = manifest->manifest.records;
    for (size_t i = 0; i < recs.size(); ++i) {
      if (recs[i].id == id) {
        *index = i;
        return;
      }
    }
    throw ordcal::ArgumentError(std::string("no record with id '") + id + "'");
  });
}

ordcal_status ordcal_manifest_record(const ordcal_manifest* manifest,
                                     size_t index, ordcal_record_view* out) {
  return guarded([&] {
    require(manifest && out, "NULL argument");
    require(index < manifest->manifest.records.size(), "record index out of range");
    const auto& r = manifest->manifest.records[index];
    const auto& s = manifest->strings[index];
    out->id = r.id.c_str();
    out->split = s.split.c_str();
    out->source_path = s.source.c_str();
    out->distorted_path = s.distorted.c_str();
    out->xc = r.principal_point.xc;
    out->yc = r.principal_point.yc;
    out->model = r.coefficients.model == ordcal::Model::kDivision
                     ? ORDCAL_MODEL_DIVISION
                     : ORDCAL_MODEL_POLYNOMIAL;
    out->k = r.coefficients.k.data();
    out->k_count = r.coefficients.k.size();
    out->r_norm = r.coefficients.r_norm;
    out->radii = r.radii.data();
    out->ordinal = r.ordinal.data();
    out->ordinal_count = r.ordinal.size();
  });
}

ordcal_status ordcal_manifest_record_json(const ordcal_manifest* manifest,
                                          size_t index, const char** json) {
  return guarded([&] {
    require(manifest && json, "NULL argument");
    require(index < manifest->strings.size(), "record index out of range");
    *json = manifest->strings[index].json.c_str();
  });
}

/* rectification */

ordcal_status ordcal_inverse_map_build(const ordcal_coefficients* k, double xc,
                                       double yc, int width, int height,
                                       ordcal_inverse_map** out) {
  return guarded([&] {
    require(out != nullptr, "NULL output");
    *out = new ordcal_inverse_map{
        ordcal::InverseRadialMap::build(to_cpp(k), {xc, yc}, width, height)};
  });
}

void ordcal_inverse_map_free(ordcal_inverse_map* map) { delete map; }

ordcal_status ordcal_inverse_map_lookup(const ordcal_inverse_map* map,
                                        double r_corrected, double* out,
                                        int* in_range) {
  return guarded([&] {
    require(map && out && in_range, "NULL argument");
    const auto r = map->map.lookup(r_corrected);
    *in_range = r ? 1 : 0;
    if (r) *out = *r;
  });
}

ordcal_status ordcal_rectify_image(const ordcal_image* distorted,
                                   const ordcal_coefficients* k, double xc,
                                   double yc, ordcal_scale_policy policy,
                                   ordcal_image** out) {
  return guarded([&] {
    require(distorted != nullptr && out != nullptr, "NULL argument");
    *out = wrap(ordcal::rectify_image(distorted->buffer, to_cpp(k), {xc, yc},
                                      to_cpp(policy)));
  });
}

ordcal_status ordcal_rectify_from_ordinal(const ordcal_image* distorted,
                                          const double* radii,
                                          const double* levels, size_t n,
                                          double r_norm, double xc, double yc,
                                          ordcal_scale_policy policy,
                                          ordcal_image** out) {
  return guarded([&] {
    require(distorted && radii && levels && out, "NULL argument");
    ordcal::OrdinalDistortion d{{radii, radii + n}, {levels, levels + n}};
    *out = wrap(ordcal::rectify_from_ordinal(distorted->buffer, d, {xc, yc},
                                             r_norm, to_cpp(policy)));
  });
}

/* metrics */

ordcal_status ordcal_psnr(const ordcal_image* a, const ordcal_image* b,
                          double* out) {
  return guarded([&] {
    require(a && b && out, "NULL argument");
    *out = ordcal::psnr(a->buffer, b->buffer);
  });
}

ordcal_status ordcal_ssim(const ordcal_image* a, const ordcal_image* b,
                          double* out) {
  return guarded([&] {
    require(a && b && out, "NULL argument");
    *out = ordcal::ssim(a->buffer, b->buffer);
  });
}

ordcal_status ordcal_rmse_params(const double* estimate, const double* truth,
                                 size_t n, int conventional, double* out) {
  return guarded([&] {
    require(estimate && truth && out, "NULL argument");
    *out = ordcal::rmse_params({estimate, n}, {truth, n},
                               conventional ? ordcal::RmseVariant::kConventional
                                            : ordcal::RmseVariant::kAsPrinted);
  });
}

ordcal_status ordcal_mdld(const ordcal_ddm* estimate, const ordcal_ddm* truth,
                          double* out) {
  return guarded([&] {
    require(estimate && truth && out, "NULL argument");
    *out = ordcal::mdld(estimate->map, truth->map);
  });
}

ordcal_status ordcal_mdld_coefficients(const ordcal_coefficients* estimate,
                                       const ordcal_coefficients* truth,
                                       double xc, double yc, int width,
                                       int height, double* out) {
  return guarded([&] {
    require(out != nullptr, "NULL output");
    *out = ordcal::mdld(to_cpp(estimate), to_cpp(truth), {xc, yc}, width, height);
  });
}

ordcal_status ordcal_learning_friendly_rate(const ordcal_lfr_group* groups,
                                            size_t count, double total_data,
                                            double total_epochs, int use_log10,
                                            double* out) {
  return guarded([&] {
    require(groups != nullptr && out != nullptr, "NULL argument");
    std::vector<ordcal::LfrGroup> g(count);
    for (size_t i = 0; i < count; ++i) {
      g[i] = {groups[i].error, groups[i].data_count, groups[i].convergence_epoch};
    }
    *out = ordcal::learning_friendly_rate(
        g, total_data, total_epochs,
        use_log10 ? ordcal::LogBase::kTen : ordcal::LogBase::kNatural);
  });
}

}  // extern "C"
