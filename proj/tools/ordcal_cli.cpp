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

// ordcal command-line tool. Every subcommand forwards to the C API; this file
// only parses flags and formats results.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "ordcal/ordcal.h"

namespace {

using json = nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitRuntime = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RuntimeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void check(ordcal_status s) {
  if (s != ORDCAL_OK) {
    throw RuntimeError(std::string(ordcal_status_name(s)) + ": " +
                       ordcal_last_error());
  }
}

std::string fmt9(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

// Rounds to 9 significant digits so JSON output matches the table output.
json num(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return nullptr;
  return std::strtod(fmt9(v).c_str(), nullptr);
}

json num_list(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(num(x));
  return a;
}

std::string list_text(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ", ";
    s += fmt9(v[i]);
  }
  return s;
}

std::vector<double> parse_list(const std::string& text, const char* flag) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) ++used;
    if (item.empty() || used != item.size()) {
      throw UsageError(std::string(flag) + ": not a number list: '" + text + "'");
    }
    out.push_back(v);
  }
  if (out.empty()) throw UsageError(std::string(flag) + ": empty list");
  return out;
}

// Collected result of one subcommand: printed as a JSON object or as an
// aligned two-column table.
class Report {
 public:
  void add(const std::string& key, json value, std::string text) {
    obj_[key] = std::move(value);
    rows_.emplace_back(key, std::move(text));
  }
  void add(const std::string& key, double v) { add(key, num(v), fmt9(v)); }
  void add(const std::string& key, const std::vector<double>& v) {
    add(key, num_list(v), list_text(v));
  }
  void add(const std::string& key, const std::string& s) { add(key, s, s); }
  void add_count(const std::string& key, std::size_t n) {
    add(key, json(n), std::to_string(n));
  }

  const json& object() const { return obj_; }

  void print(bool as_json) const {
    if (as_json) {
      std::cout << obj_.dump() << '\n';
      return;
    }
    std::size_t width = 0;
    for (const auto& r : rows_) width = std::max(width, r.first.size());
    for (const auto& r : rows_) {
      std::cout << r.first << std::string(width - r.first.size() + 2, ' ')
                << r.second << '\n';
    }
  }

 private:
  json obj_ = json::object();
  std::vector<std::pair<std::string, std::string>> rows_;
};

struct ImageDeleter {
  void operator()(ordcal_image* p) const { ordcal_image_free(p); }
};
using Image = std::unique_ptr<ordcal_image, ImageDeleter>;

struct DdmDeleter {
  void operator()(ordcal_ddm* p) const { ordcal_ddm_free(p); }
};
using Ddm = std::unique_ptr<ordcal_ddm, DdmDeleter>;

struct ManifestDeleter {
  void operator()(ordcal_manifest* p) const { ordcal_manifest_free(p); }
};
using Manifest = std::unique_ptr<ordcal_manifest, ManifestDeleter>;

Image load(const std::string& path) {
  ordcal_image* raw = nullptr;
  check(ordcal_image_load_png(path.c_str(), &raw));
  return Image(raw);
}

void save(const Image& img, const std::string& path) {
  check(ordcal_image_save_png(img.get(), path.c_str()));
}

ordcal_model parse_model(const std::string& s) {
  if (s == "division") return ORDCAL_MODEL_DIVISION;
  if (s == "polynomial") return ORDCAL_MODEL_POLYNOMIAL;
  throw UsageError("--model must be 'division' or 'polynomial'");
}

const char* model_name(ordcal_model m) {
  return m == ORDCAL_MODEL_DIVISION ? "division" : "polynomial";
}

// Image geometry shared by the warping subcommands.
struct Geometry {
  std::string center;  // "x,y"; empty means the image center
  double r_norm = 0.0;  // 0 means half the image diagonal

  void add_flags(CLI::App* cmd) {
    cmd->add_option("--center", center, "Principal point as x,y in pixels");
    cmd->add_option("--r-norm", r_norm, "Radius normalization in pixels");
  }
  void validate() const {
    if (!center.empty() && parse_list(center, "--center").size() != 2) {
      throw UsageError("--center expects x,y");
    }
    if (r_norm < 0.0) throw UsageError("--r-norm must be positive");
  }
  std::pair<double, double> principal_point(int w, int h) const {
    if (center.empty()) return {w / 2.0, h / 2.0};
    const auto c = parse_list(center, "--center");
    return {c[0], c[1]};
  }
  double norm(int w, int h) const {
    return r_norm > 0.0 ? r_norm : ordcal_default_r_norm(w, h);
  }
};

struct Coefficients {
  std::vector<double> k;
  ordcal_model model = ORDCAL_MODEL_DIVISION;
  double r_norm = 1.0;

  ordcal_coefficients view() const { return {model, k.data(), k.size(), r_norm}; }
};

// ---------------------------------------------------------------- generate

struct GenerateArgs {
  std::string out;
  std::string source_dir;
  std::string scenes = "mixed";
  std::optional<int> count, train, test, val;
  int width = 0, height = 0, n = 0;
  std::uint64_t seed = 0;
  double center_jitter = 0.0;
  bool masks = false;
  std::string model = "division";
  std::string k_lo, k_hi, level_window;
  bool no_level_window = false;
};

int run_generate(const GenerateArgs& a, bool as_json) {
  ordcal_dataset_options o;
  ordcal_dataset_options_init(&o);
  if (a.scenes == "mixed") {
    o.scenes = ORDCAL_SCENE_MIXED;
  } else if (a.scenes == "checkerboard") {
    o.scenes = ORDCAL_SCENE_CHECKERBOARD;
  } else if (a.scenes == "lines") {
    o.scenes = ORDCAL_SCENE_LINES;
  } else {
    throw UsageError("--scenes must be mixed, checkerboard or lines");
  }
  o.model = parse_model(a.model);
  if (a.count) {
    // --count is a shorthand for a train-only dataset.
    o.train = *a.count;
    o.test = 0;
    o.val = 0;
  }
  if (a.train) o.train = *a.train;
  if (a.test) o.test = *a.test;
  if (a.val) o.val = *a.val;
  if (o.train < 0 || o.test < 0 || o.val < 0) throw UsageError("split sizes must be >= 0");
  if (a.width) o.width = a.width;
  if (a.height) o.height = a.height;
  if (a.n) o.n = a.n;
  o.seed = a.seed;
  o.center_jitter = a.center_jitter;
  o.write_masks = a.masks ? 1 : 0;
  if (!a.k_lo.empty() || !a.k_hi.empty()) {
    if (a.k_lo.empty() || a.k_hi.empty()) throw UsageError("--k-lo and --k-hi go together");
    const auto lo = parse_list(a.k_lo, "--k-lo");
    const auto hi = parse_list(a.k_hi, "--k-hi");
    if (lo.size() != hi.size()) throw UsageError("--k-lo and --k-hi differ in length");
    if (lo.size() > ORDCAL_MAX_COEFFICIENTS) throw UsageError("too many coefficient ranges");
    o.range_count = lo.size();
    for (std::size_t i = 0; i < lo.size(); ++i) {
      o.range_lo[i] = lo[i];
      o.range_hi[i] = hi[i];
    }
  }
  if (!a.level_window.empty()) {
    const auto w = parse_list(a.level_window, "--level-window");
    if (w.size() != 2) throw UsageError("--level-window expects lo,hi");
    o.use_level_window = 1;
    o.level_lo = w[0];
    o.level_hi = w[1];
  }
  if (a.no_level_window) o.use_level_window = 0;
  o.out_dir = a.out.c_str();
  o.source_dir = a.source_dir.empty() ? nullptr : a.source_dir.c_str();

  std::size_t records = 0;
  check(ordcal_generate_dataset(&o, &records));
  Report r;
  r.add_count("records", records);
  r.add("manifest", a.out + "/manifest.jsonl");
  r.add("seed", json(a.seed), std::to_string(a.seed));
  r.print(as_json);
  return kExitOk;
}

// ----------------------------------------------------------------- distort

struct WarpArgs {
  std::string in, out;
  std::string k, ordinal, radii;
  std::string model = "division";
  bool fit = false;
  Geometry geo;
};

int run_distort(const WarpArgs& a, bool as_json) {
  const auto k = parse_list(a.k, "--k");
  const auto model = parse_model(a.model);
  a.geo.validate();
  const Image src = load(a.in);
  const int w = ordcal_image_width(src.get());
  const int h = ordcal_image_height(src.get());
  const auto [xc, yc] = a.geo.principal_point(w, h);
  const Coefficients c{k, model, a.geo.norm(w, h)};
  const auto view = c.view();
  ordcal_image* raw = nullptr;
  check(ordcal_distort_image(src.get(), &view, xc, yc, &raw));
  const Image out(raw);
  save(out, a.out);
  Report r;
  r.add("output", a.out);
  r.add("model", model_name(model));
  r.add("k", k);
  r.add("r_norm", c.r_norm);
  r.add("principal_point", std::vector<double>{xc, yc});
  r.print(as_json);
  return kExitOk;
}

// ----------------------------------------------------------------- rectify

int run_rectify(const WarpArgs& a, bool as_json) {
  const bool by_k = !a.k.empty();
  const bool by_ordinal = !a.ordinal.empty() || !a.radii.empty();
  if (by_k == by_ordinal) {
    throw UsageError("rectify needs either --k or --ordinal with --radii");
  }
  std::vector<double> k, levels, radii;
  if (by_k) {
    k = parse_list(a.k, "--k");
  } else {
    if (a.ordinal.empty() || a.radii.empty()) {
      throw UsageError("--ordinal and --radii go together");
    }
    levels = parse_list(a.ordinal, "--ordinal");
    radii = parse_list(a.radii, "--radii");
    if (levels.size() != radii.size()) throw UsageError("--ordinal and --radii differ in length");
  }
  const auto model = parse_model(a.model);
  a.geo.validate();

  const Image src = load(a.in);
  const int w = ordcal_image_width(src.get());
  const int h = ordcal_image_height(src.get());
  const auto [xc, yc] = a.geo.principal_point(w, h);
  const double r_norm = a.geo.norm(w, h);
  const auto policy = a.fit ? ORDCAL_SCALE_FIT : ORDCAL_SCALE_SAME_SIZE;

  Report r;
  if (by_ordinal) {
    k.resize(levels.size());
    double condition = 0.0;
    check(ordcal_ordinal_to_coefficients(radii.data(), levels.data(),
                                         levels.size(), k.data(), &condition));
    r.add("condition", condition);
  }
  const Coefficients c{k, model, r_norm};
  const auto view = c.view();
  ordcal_image* raw = nullptr;
  check(ordcal_rectify_image(src.get(), &view, xc, yc, policy, &raw));
  const Image out(raw);
  save(out, a.out);
  r.add("output", a.out);
  r.add("model", model_name(model));
  r.add("k", k);
  r.add("r_norm", r_norm);
  r.add("principal_point", std::vector<double>{xc, yc});
  r.add("scale_policy", a.fit ? "fit" : "same-size");
  r.print(as_json);
  return kExitOk;
}

// ----------------------------------------------------------------- convert

struct ConvertArgs {
  std::string levels, k, radii;
};

int run_convert(const ConvertArgs& a, bool as_json) {
  if (a.levels.empty() == a.k.empty()) {
    throw UsageError("convert needs exactly one of --levels or --k");
  }
  if (a.radii.empty()) throw UsageError("convert needs --radii");
  const auto radii = parse_list(a.radii, "--radii");
  Report r;
  r.add("radii", radii);
  if (!a.levels.empty()) {
    const auto levels = parse_list(a.levels, "--levels");
    if (levels.size() != radii.size()) throw UsageError("--levels and --radii differ in length");
    std::vector<double> k(levels.size());
    double condition = 0.0;
    check(ordcal_ordinal_to_coefficients(radii.data(), levels.data(),
                                         levels.size(), k.data(), &condition));
    r.add("levels", levels);
    r.add("k", k);
    r.add("condition", condition);
  } else {
    const auto k = parse_list(a.k, "--k");
    const Coefficients c{k, ORDCAL_MODEL_DIVISION, 1.0};
    const auto view = c.view();
    std::vector<double> levels(radii.size());
    check(ordcal_compute_ordinal(&view, radii.data(), radii.size(), levels.data()));
    r.add("k", k);
    r.add("levels", levels);
  }
  r.print(as_json);
  return kExitOk;
}

// --------------------------------------------------------------------- ddm

struct DdmArgs {
  std::string k;
  std::string model = "division";
  int width = 0, height = 0;
  std::string csv, png;
  double delta_max = 0.0;
  Geometry geo;
};

int run_ddm(const DdmArgs& a, bool as_json) {
  const auto k = parse_list(a.k, "--k");
  const auto model = parse_model(a.model);
  if (a.width <= 0 || a.height <= 0) throw UsageError("--width and --height must be positive");
  if (a.csv.empty() && a.png.empty()) throw UsageError("ddm needs --csv and/or --png");
  a.geo.validate();
  const auto [xc, yc] = a.geo.principal_point(a.width, a.height);
  const Coefficients c{k, model, a.geo.norm(a.width, a.height)};
  const auto view = c.view();
  ordcal_ddm* raw = nullptr;
  check(ordcal_ddm_create(&view, xc, yc, a.width, a.height, &raw));
  const Ddm map(raw);
  if (!a.csv.empty()) check(ordcal_ddm_write_csv(map.get(), a.csv.c_str()));
  if (!a.png.empty()) check(ordcal_ddm_write_png(map.get(), a.png.c_str(), a.delta_max));
  double symmetry = 0.0;
  check(ordcal_ddm_check_symmetry(map.get(), &symmetry));
  Report r;
  if (!a.csv.empty()) r.add("csv", a.csv);
  if (!a.png.empty()) r.add("png", a.png);
  r.add_count("width", static_cast<std::size_t>(a.width));
  r.add_count("height", static_cast<std::size_t>(a.height));
  r.add("symmetry", symmetry);
  r.print(as_json);
  return kExitOk;
}

// -------------------------------------------------------------------- eval

struct EvalArgs {
  std::string a, b;
  std::string k_est, k_true;
  std::string model = "division";
  int width = 0, height = 0;
  std::string manifest, predictions, split;
  bool ground_truth = false;
  bool conventional_rmse = false;
  double crop = 1.0;
  Geometry geo;
};

// Central crop covering `area` of the image, used for PSNR/SSIM.
Image central_crop(const Image& img, double area) {
  if (area >= 1.0) {
    ordcal_image* raw = nullptr;
    check(ordcal_image_crop(img.get(), 0, 0, ordcal_image_width(img.get()),
                            ordcal_image_height(img.get()), &raw));
    return Image(raw);
  }
  const double side = std::sqrt(area);
  const int w = ordcal_image_width(img.get());
  const int h = ordcal_image_height(img.get());
  const int cw = static_cast<int>(std::lround(w * side));
  const int ch = static_cast<int>(std::lround(h * side));
  ordcal_image* raw = nullptr;
  check(ordcal_image_crop(img.get(), (w - cw) / 2, (h - ch) / 2, cw, ch, &raw));
  return Image(raw);
}

void image_metrics(Report& r, const Image& a, const Image& b, double crop) {
  const Image ca = central_crop(a, crop);
  const Image cb = central_crop(b, crop);
  double p = 0.0, s = 0.0;
  check(ordcal_psnr(ca.get(), cb.get(), &p));
  check(ordcal_ssim(ca.get(), cb.get(), &s));
  r.add("psnr", p);
  r.add("ssim", s);
}

void coefficient_metrics(Report& r, const Coefficients& est,
                         const Coefficients& truth, double xc, double yc, int w,
                         int h, bool conventional) {
  if (est.k.size() == truth.k.size()) {
    double rm = 0.0;
    check(ordcal_rmse_params(est.k.data(), truth.k.data(), est.k.size(),
                             conventional ? 1 : 0, &rm));
    r.add("rmse_params", rm);
  }
  const auto ev = est.view();
  const auto tv = truth.view();
  double md = 0.0;
  check(ordcal_mdld_coefficients(&ev, &tv, xc, yc, w, h, &md));
  r.add("mdld", md);
}

int run_eval_files(const EvalArgs& a, bool as_json) {
  const bool images = !a.a.empty() || !a.b.empty();
  const bool coeffs = !a.k_est.empty() || !a.k_true.empty();
  if (!images && !coeffs) throw UsageError("eval needs --a/--b, --k-est/--k-true, or --manifest");
  if (images && (a.a.empty() || a.b.empty())) throw UsageError("--a and --b go together");
  if (coeffs && (a.k_est.empty() || a.k_true.empty())) {
    throw UsageError("--k-est and --k-true go together");
  }
  std::vector<double> k_est, k_true;
  if (coeffs) {
    k_est = parse_list(a.k_est, "--k-est");
    k_true = parse_list(a.k_true, "--k-true");
  }
  const auto model = parse_model(a.model);
  a.geo.validate();
  if (!(a.crop > 0.0 && a.crop <= 1.0)) throw UsageError("--crop must be in (0, 1]");

  Report r;
  int w = a.width, h = a.height;
  if (images) {
    const Image ia = load(a.a);
    const Image ib = load(a.b);
    image_metrics(r, ia, ib, a.crop);
    if (w == 0) w = ordcal_image_width(ia.get());
    if (h == 0) h = ordcal_image_height(ia.get());
  }
  if (coeffs) {
    if (w <= 0 || h <= 0) throw UsageError("coefficient metrics need --width/--height or images");
    const auto [xc, yc] = a.geo.principal_point(w, h);
    const double rn = a.geo.norm(w, h);
    coefficient_metrics(r, {k_est, model, rn}, {k_true, model, rn}, xc, yc, w, h,
                        a.conventional_rmse);
  }
  r.print(as_json);
  return kExitOk;
}

// One prediction line: {"id": ..., "k": [...]} or {"id": ..., "ordinal": [...]}
// with optional "radii" and "rectified" (path to an already rectified image).
struct Prediction {
  std::string id;
  std::vector<double> k, ordinal, radii;
  std::string rectified;
};

std::vector<Prediction> load_predictions(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw RuntimeError("cannot open predictions file '" + path + "'");
  std::vector<Prediction> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = json::parse(line);
      Prediction p;
      p.id = j.at("id").get<std::string>();
      if (j.contains("k")) p.k = j.at("k").get<std::vector<double>>();
      if (j.contains("ordinal")) p.ordinal = j.at("ordinal").get<std::vector<double>>();
      if (j.contains("radii")) p.radii = j.at("radii").get<std::vector<double>>();
      if (j.contains("rectified")) p.rectified = j.at("rectified").get<std::string>();
      out.push_back(std::move(p));
    } catch (const json::exception& e) {
      throw RuntimeError(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

int run_eval_batch(const EvalArgs& a, bool as_json) {
  if (a.ground_truth == !a.predictions.empty()) {
    throw UsageError("batch eval needs exactly one of --predictions or --ground-truth");
  }
  if (!(a.crop > 0.0 && a.crop <= 1.0)) throw UsageError("--crop must be in (0, 1]");
  (void)as_json;  // batch output is always JSON lines

  ordcal_manifest* raw = nullptr;
  check(ordcal_manifest_load(a.manifest.c_str(), &raw));
  const Manifest manifest(raw);

  std::vector<Prediction> preds;
  if (a.ground_truth) {
    for (std::size_t i = 0; i < ordcal_manifest_size(manifest.get()); ++i) {
      ordcal_record_view v;
      check(ordcal_manifest_record(manifest.get(), i, &v));
      if (!a.split.empty() && a.split != v.split) continue;
      Prediction p;
      p.id = v.id;
      p.k.assign(v.k, v.k + v.k_count);
      preds.push_back(std::move(p));
    }
  } else {
    preds = load_predictions(a.predictions);
  }

  for (const auto& p : preds) {
    std::size_t index = 0;
    check(ordcal_manifest_find(manifest.get(), p.id.c_str(), &index));
    ordcal_record_view v;
    check(ordcal_manifest_record(manifest.get(), index, &v));
    if (!a.split.empty() && a.split != v.split) continue;

    const Image source = load(v.source_path);
    const Image distorted = load(v.distorted_path);
    const int w = ordcal_image_width(distorted.get());
    const int h = ordcal_image_height(distorted.get());
    const Coefficients truth{{v.k, v.k + v.k_count}, v.model, v.r_norm};

    Report r;
    r.add("id", p.id);
    std::vector<double> k = p.k;
    if (k.empty()) {
      if (p.ordinal.empty()) throw RuntimeError(p.id + ": prediction has neither k nor ordinal");
      const std::vector<double> radii =
          p.radii.empty() ? std::vector<double>(v.radii, v.radii + v.ordinal_count) : p.radii;
      if (radii.size() != p.ordinal.size()) throw RuntimeError(p.id + ": ordinal/radii length mismatch");
      k.resize(p.ordinal.size());
      double condition = 0.0;
      check(ordcal_ordinal_to_coefficients(radii.data(), p.ordinal.data(),
                                           p.ordinal.size(), k.data(), &condition));
    }
    const Coefficients est{k, v.model, v.r_norm};

    if (!p.rectified.empty()) {
      image_metrics(r, source, load(p.rectified), a.crop);
    } else {
      // A prediction that folds over cannot be rectified; report it and keep
      // the coefficient metrics, which stay well defined.
      const auto view = est.view();
      ordcal_image* rect = nullptr;
      if (ordcal_rectify_image(distorted.get(), &view, v.xc, v.yc,
                               ORDCAL_SCALE_SAME_SIZE, &rect) == ORDCAL_OK) {
        image_metrics(r, source, Image(rect), a.crop);
      } else {
        r.add("rectify_error", std::string(ordcal_last_error()));
      }
    }
    coefficient_metrics(r, est, truth, v.xc, v.yc, w, h, a.conventional_rmse);
    std::cout << r.object().dump() << '\n';
  }
  return kExitOk;
}

// --------------------------------------------------------------------- lfr

struct LfrArgs {
  std::string groups;
  double total_data = 0.0, total_epochs = 0.0;
  bool log10 = false;
};

// CSV columns: error,data_count,convergence_epoch. A non-numeric first line is
// treated as a header.
std::vector<ordcal_lfr_group> load_groups(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw RuntimeError("cannot open groups file '" + path + "'");
  std::vector<ordcal_lfr_group> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::vector<double> v;
    try {
      v = parse_list(line, "groups");
    } catch (const UsageError&) {
      if (line_no == 1) continue;
      throw RuntimeError(path + ":" + std::to_string(line_no) + ": malformed row");
    }
    if (v.size() != 3) {
      throw RuntimeError(path + ":" + std::to_string(line_no) + ": expected 3 columns");
    }
    out.push_back({v[0], v[1], v[2]});
  }
  return out;
}

int run_lfr(const LfrArgs& a, bool as_json) {
  if (a.total_data <= 0.0 || a.total_epochs <= 0.0) {
    throw UsageError("--total-data and --total-epochs must be positive");
  }
  const auto groups = load_groups(a.groups);
  double rate = 0.0;
  check(ordcal_learning_friendly_rate(groups.data(), groups.size(), a.total_data,
                                      a.total_epochs, a.log10 ? 1 : 0, &rate));
  Report r;
  r.add_count("groups", groups.size());
  r.add("log_base", a.log10 ? "10" : "e");
  r.add("lfr", rate);
  r.print(as_json);
  return kExitOk;
}

// ----------------------------------------------------------------- inspect

struct InspectArgs {
  std::string manifest, id;
  std::optional<std::size_t> index;
};

int run_inspect(const InspectArgs& a, bool as_json) {
  if (a.id.empty() == !a.index.has_value()) {
    throw UsageError("inspect needs exactly one of --id or --index");
  }
  ordcal_manifest* raw = nullptr;
  check(ordcal_manifest_load(a.manifest.c_str(), &raw));
  const Manifest manifest(raw);
  std::size_t index = a.index.value_or(0);
  if (!a.id.empty()) check(ordcal_manifest_find(manifest.get(), a.id.c_str(), &index));
  if (as_json) {
    const char* text = nullptr;
    check(ordcal_manifest_record_json(manifest.get(), index, &text));
    std::cout << text << '\n';
    return kExitOk;
  }
  ordcal_record_view v;
  check(ordcal_manifest_record(manifest.get(), index, &v));
  Report r;
  r.add("id", std::string(v.id));
  r.add("split", std::string(v.split));
  r.add("source", std::string(v.source_path));
  r.add("distorted", std::string(v.distorted_path));
  r.add("principal_point", std::vector<double>{v.xc, v.yc});
  r.add("model", model_name(v.model));
  r.add("k", std::vector<double>(v.k, v.k + v.k_count));
  r.add("r_norm", v.r_norm);
  r.add("radii", std::vector<double>(v.radii, v.radii + v.ordinal_count));
  r.add("ordinal", std::vector<double>(v.ordinal, v.ordinal + v.ordinal_count));
  r.print(false);
  return kExitOk;
}

// ------------------------------------------------------------ config files

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Reads key=value lines ('#' comments) into flag tokens. Keys are long flag
// names without dashes; underscores map to dashes. Boolean flags take
// true/false.
std::vector<std::string> config_tokens(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file '" + path + "'");
  std::vector<std::string> tokens;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw UsageError(path + ":" + std::to_string(line_no) + ": expected key=value");
    }
    std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    for (char& ch : key) {
      if (ch == '_') ch = '-';
    }
    if (key.empty()) throw UsageError(path + ":" + std::to_string(line_no) + ": empty key");
    tokens.push_back("--" + key + "=" + value);
  }
  return tokens;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Radial lens distortion toolkit: synthesis, ordinal conversion, "
               "rectification and metrics"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(ordcal_version()));
  bool as_json = false;
  std::string config_path;
  app.add_flag("--json", as_json, "Print machine-readable JSON");
  app.add_option("--config", config_path,
                 "key=value file with flag defaults (command line wins)");
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "Generate a synthetic dataset");
  generate->add_option("--out", gen.out, "Output directory")->required();
  generate->add_option("--source-dir", gen.source_dir, "Directory of clean PNG sources");
  generate->add_option("--scenes", gen.scenes, "Procedural scenes: mixed|checkerboard|lines");
  generate->add_option("--count", gen.count, "Train-only dataset with N samples");
  generate->add_option("--train", gen.train, "Train split size");
  generate->add_option("--test", gen.test, "Test split size");
  generate->add_option("--val", gen.val, "Validation split size");
  generate->add_option("--width", gen.width, "Image width");
  generate->add_option("--height", gen.height, "Image height");
  generate->add_option("--n", gen.n, "Distortion blocks per element");
  generate->add_option("--seed", gen.seed, "Master seed");
  generate->add_option("--center-jitter", gen.center_jitter,
                       "Principal point jitter as a fraction of the diagonal");
  generate->add_flag("--masks,!--no-masks", gen.masks, "Write region masks");
  generate->add_option("--model", gen.model, "division|polynomial");
  generate->add_option("--k-lo", gen.k_lo, "Lower coefficient bounds, comma separated");
  generate->add_option("--k-hi", gen.k_hi, "Upper coefficient bounds, comma separated");
  generate->add_option("--level-window", gen.level_window, "Accepted delta(1) range lo,hi");
  generate->add_flag("--no-level-window", gen.no_level_window, "Disable the delta(1) window");

  WarpArgs dist;
  auto* distort = app.add_subcommand("distort", "Apply radial distortion to an image");
  distort->add_option("--in", dist.in, "Clean input PNG")->required();
  distort->add_option("--out", dist.out, "Distorted output PNG")->required();
  distort->add_option("--k", dist.k, "Coefficients, comma separated")->required();
  distort->add_option("--model", dist.model, "division|polynomial");
  dist.geo.add_flags(distort);

  WarpArgs rect;
  auto* rectify = app.add_subcommand("rectify", "Remove radial distortion from an image");
  rectify->add_option("--in", rect.in, "Distorted input PNG")->required();
  rectify->add_option("--out", rect.out, "Rectified output PNG")->required();
  rectify->add_option("--k", rect.k, "Coefficients, comma separated");
  rectify->add_option("--ordinal", rect.ordinal, "Distortion levels, comma separated");
  rectify->add_option("--radii", rect.radii, "Normalized radii of the levels");
  rectify->add_option("--model", rect.model, "division|polynomial");
  rectify->add_flag("--fit", rect.fit, "Scale so the whole corrected image fits");
  rect.geo.add_flags(rectify);

  ConvertArgs conv;
  auto* convert = app.add_subcommand("convert", "Convert between levels and coefficients");
  convert->add_option("--levels", conv.levels, "Distortion levels -> coefficients");
  convert->add_option("--k", conv.k, "Coefficients -> distortion levels");
  convert->add_option("--radii", conv.radii, "Normalized radii");

  DdmArgs dd;
  auto* ddm = app.add_subcommand("ddm", "Export a distortion distribution map");
  ddm->add_option("--k", dd.k, "Coefficients, comma separated")->required();
  ddm->add_option("--model", dd.model, "division|polynomial");
  ddm->add_option("--width", dd.width, "Map width")->required();
  ddm->add_option("--height", dd.height, "Map height")->required();
  ddm->add_option("--csv", dd.csv, "CSV output path");
  ddm->add_option("--png", dd.png, "16-bit PNG output path");
  ddm->add_option("--delta-max", dd.delta_max,
                  "Level mapped to 65535 in the PNG (default: map maximum)");
  dd.geo.add_flags(ddm);

  EvalArgs ev;
  auto* eval = app.add_subcommand("eval", "Compute quality metrics");
  eval->add_option("--a", ev.a, "First image");
  eval->add_option("--b", ev.b, "Second image");
  eval->add_option("--k-est", ev.k_est, "Estimated coefficients");
  eval->add_option("--k-true", ev.k_true, "True coefficients");
  eval->add_option("--model", ev.model, "division|polynomial");
  eval->add_option("--width", ev.width, "Map width for coefficient metrics");
  eval->add_option("--height", ev.height, "Map height for coefficient metrics");
  eval->add_option("--manifest", ev.manifest, "Dataset manifest (batch mode)");
  eval->add_option("--predictions", ev.predictions, "Predictions JSON lines (batch mode)");
  eval->add_flag("--ground-truth", ev.ground_truth, "Use manifest coefficients as predictions");
  eval->add_option("--split", ev.split, "Restrict batch mode to one split");
  eval->add_flag("--conventional-rmse", ev.conventional_rmse,
                 "Root of the mean squared parameter error");
  eval->add_option("--crop", ev.crop, "Central area fraction used for PSNR/SSIM");
  ev.geo.add_flags(eval);

  LfrArgs lf;
  auto* lfr = app.add_subcommand("lfr", "Learning-friendly rate from a groups CSV");
  lfr->add_option("--groups", lf.groups, "CSV: error,data_count,convergence_epoch")->required();
  lfr->add_option("--total-data", lf.total_data, "Total data count D")->required();
  lfr->add_option("--total-epochs", lf.total_epochs, "Total epochs C")->required();
  lfr->add_flag("--log10", lf.log10, "Use base-10 logarithms");

  InspectArgs ins;
  auto* inspect = app.add_subcommand("inspect", "Print a manifest record");
  inspect->add_option("--manifest", ins.manifest, "Dataset manifest")->required();
  inspect->add_option("--id", ins.id, "Record id");
  inspect->add_option("--index", ins.index, "Record index");

  // Config files are folded in as leading flags right after the subcommand,
  // so explicit flags that follow take precedence.
  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    for (std::size_t i = 0; i < args.size(); ++i) {
      std::string path;
      if (args[i] == "--config" && i + 1 < args.size()) {
        path = args[i + 1];
      } else if (args[i].rfind("--config=", 0) == 0) {
        path = args[i].substr(9);
      }
      if (path.empty()) continue;
      std::size_t sub = 0;
      while (sub < args.size() && !app.get_subcommand_no_throw(args[sub])) ++sub;
      if (sub == args.size()) break;
      auto tokens = config_tokens(path);
      args.insert(args.begin() + static_cast<std::ptrdiff_t>(sub) + 1, tokens.begin(),
                  tokens.end());
      break;
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  std::vector<const char*> cargs{argv[0]};
  for (const auto& s : args) cargs.push_back(s.c_str());
  try {
    app.parse(static_cast<int>(cargs.size()), const_cast<char**>(cargs.data()));
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    if (*generate) return run_generate(gen, as_json);
    if (*distort) return run_distort(dist, as_json);
    if (*rectify) return run_rectify(rect, as_json);
    if (*convert) return run_convert(conv, as_json);
    if (*ddm) return run_ddm(dd, as_json);
    if (*eval) {
      return ev.manifest.empty() ? run_eval_files(ev, as_json) : run_eval_batch(ev, as_json);
    }
    if (*lfr) return run_lfr(lf, as_json);
    if (*inspect) return run_inspect(ins, as_json);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  } catch (const RuntimeError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}
