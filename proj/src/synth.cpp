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
#include "ordcal/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

#include "ordcal/errors.hpp"
#include "ordcal/ordinal.hpp"
#include "ordcal/parallel.hpp"

namespace ordcal {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream,
                          std::uint64_t index) {
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return mix(mix(mix(seed) ^ stream) ^ index);
}

CoefficientRanges default_ranges() {
  CoefficientRanges r;
  r.model = Model::kDivision;
  r.intervals = {{0.05, 1.0}, {-0.1, 0.1}, {-0.1, 0.1}, {-0.1, 0.1}};
  r.level_window = std::make_pair(1.05, 3.0);
  return r;
}

DistortionCoefficients sample_coefficients(const CoefficientRanges& ranges,
                                           std::uint64_t seed, double r_norm) {
  if (ranges.intervals.empty()) {
    throw ConfigError("coefficient ranges must name at least one interval");
  }
  for (const auto& [lo, hi] : ranges.intervals) {
    if (!(lo <= hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
      throw ConfigError("coefficient interval with lo > hi or non-finite bounds");
    }
  }
  if (ranges.level_window && !(ranges.level_window->first <= ranges.level_window->second)) {
    throw ConfigError("level window with lo > hi");
  }
  Rng rng(seed);
  DistortionCoefficients k;
  k.model = ranges.model;
  k.r_norm = r_norm;
  k.k.resize(ranges.intervals.size());
  constexpr int kMaxDraws = 100;
  for (int draw = 0; draw < kMaxDraws; ++draw) {
    for (std::size_t i = 0; i < k.k.size(); ++i) {
      const auto [lo, hi] = ranges.intervals[i];
      k.k[i] = lo == hi ? lo : rng.uniform(lo, hi);
    }
    if (!validate_monotone(k, 1.0)) continue;
    if (ranges.level_window) {
      const double edge = distortion_level_normalized(k, 1.0).level;
      if (edge < ranges.level_window->first ||
          edge > ranges.level_window->second) {
        continue;
      }
    }
    return k;
  }
  throw ConfigError(
      "coefficient ranges rejected 100 draws: incompatible with a monotone "
      "radial map or with the delta(1) window");
}

Point distort_source_coordinate(const Point& p, const DistortionCoefficients& k,
                                const PrincipalPoint& c) {
  return undistort_point(p, k, c);
}

ImageBuffer distort_image(const ImageBuffer& clean,
                          const DistortionCoefficients& k,
                          const PrincipalPoint& c, const Background& bg) {
  ImageBuffer out(clean.width(), clean.height(), clean.channels());
  parallel_for(static_cast<std::size_t>(clean.height()), [&](std::size_t row) {
    const int j = static_cast<int>(row);
    std::array<std::uint8_t, 4> px{};
    for (int i = 0; i < clean.width(); ++i) {
      const Point src = distort_source_coordinate(
          {i + 0.5, j + 0.5, Frame::kDistorted}, k, c);
      sample_bilinear(clean, src.x, src.y, bg, px);
      for (int ch = 0; ch < clean.channels(); ++ch) out.at(i, j, ch) = px[ch];
    }
  });
  return out;
}

std::string to_string(Flip f) {
  switch (f) {
    case Flip::kNone: return "none";
    case Flip::kHorizontal: return "horizontal";
    case Flip::kVertical: return "vertical";
    case Flip::kDiagonal: return "diagonal";
  }
  return "none";
}

Flip flip_from_string(const std::string& s) {
  if (s == "none") return Flip::kNone;
  if (s == "horizontal") return Flip::kHorizontal;
  if (s == "vertical") return Flip::kVertical;
  if (s == "diagonal") return Flip::kDiagonal;
  throw ArgumentError("unknown flip tag '" + s + "'");
}

ImageBuffer apply_flip(const ImageBuffer& img, Flip f) {
  const bool mirror_x = f == Flip::kHorizontal || f == Flip::kDiagonal;
  const bool mirror_y = f == Flip::kVertical || f == Flip::kDiagonal;
  ImageBuffer out(img.width(), img.height(), img.channels());
  for (int y = 0; y < img.height(); ++y) {
    const int sy = mirror_y ? img.height() - 1 - y : y;
    for (int x = 0; x < img.width(); ++x) {
      const int sx = mirror_x ? img.width() - 1 - x : x;
      for (int c = 0; c < img.channels(); ++c) out.at(x, y, c) = img.at(sx, sy, c);
    }
  }
  return out;
}

Flip quadrant_flip(Quadrant q) {
  switch (q) {
    case Quadrant::kTopLeft: return Flip::kDiagonal;
    case Quadrant::kTopRight: return Flip::kVertical;
    case Quadrant::kBottomLeft: return Flip::kHorizontal;
    case Quadrant::kBottomRight: return Flip::kNone;
  }
  return Flip::kNone;
}

std::array<DistortionElement, 4> split_elements(const ImageBuffer& img) {
  if (img.width() % 2 != 0 || img.height() % 2 != 0) {
    throw ArgumentError("split_elements needs even image dimensions");
  }
  const int hw = img.width() / 2;
  const int hh = img.height() / 2;
  std::array<DistortionElement, 4> out;
  const std::array<std::pair<int, int>, 4> origins{
      {{0, 0}, {hw, 0}, {0, hh}, {hw, hh}}};
  for (int q = 0; q < 4; ++q) {
    auto& e = out[q];
    e.quadrant = static_cast<Quadrant>(q);
    e.flip = quadrant_flip(e.quadrant);
    e.image = apply_flip(crop(img, origins[q].first, origins[q].second, hw, hh),
                         e.flip);
  }
  return out;
}

ImageBuffer assemble_elements(const std::array<DistortionElement, 4>& elements) {
  const int hw = elements[0].image.width();
  const int hh = elements[0].image.height();
  ImageBuffer out(2 * hw, 2 * hh, elements[0].image.channels());
  for (const auto& e : elements) {
    const ImageBuffer quad = apply_flip(e.image, e.flip);
    const int q = static_cast<int>(e.quadrant);
    const int x0 = (q % 2) * hw;
    const int y0 = (q / 2) * hh;
    for (int y = 0; y < hh; ++y) {
      for (int x = 0; x < hw; ++x) {
        for (int c = 0; c < out.channels(); ++c) {
          out.at(x0 + x, y0 + y, c) = quad.at(x, y, c);
        }
      }
    }
  }
  return out;
}

Point element_to_image(const Point& p, Quadrant q, int image_width,
                       int image_height) {
  const double cx = 0.5 * image_width;
  const double cy = 0.5 * image_height;
  const bool left = q == Quadrant::kTopLeft || q == Quadrant::kBottomLeft;
  const bool top = q == Quadrant::kTopLeft || q == Quadrant::kTopRight;
  return {left ? cx - p.x : cx + p.x, top ? cy - p.y : cy + p.y, p.frame};
}

DistortionBlocks crop_blocks(const DistortionElement& element, int n,
                             int image_width, int image_height) {
  if (n < 1) throw ArgumentError("block count must be positive");
  const int ew = element.image.width();
  const int eh = element.image.height();
  DistortionBlocks out;
  out.side_x = image_width / 8;
  out.side_y = image_height / 8;
  if (out.side_x < 1 || out.side_y < 1) {
    throw ArgumentError("image too small for H/8 x W/8 blocks");
  }
  for (int i = 1; i <= n; ++i) {
    const double f = (2.0 * i - 1.0) / (2.0 * n);
    const Point center{f * ew, f * eh, Frame::kDistorted};
    const int x0 = static_cast<int>(std::lround(center.x - 0.5 * out.side_x));
    const int y0 = static_cast<int>(std::lround(center.y - 0.5 * out.side_y));
    if (x0 < 0 || y0 < 0 || x0 + out.side_x > ew || y0 + out.side_y > eh) {
      std::ostringstream os;
      os << "block " << i << " of " << n << " (" << out.side_x << "x"
         << out.side_y << " at " << x0 << "," << y0
         << ") overflows the " << ew << "x" << eh << " element";
      throw ArgumentError(os.str());
    }
    out.images.push_back(crop(element.image, x0, y0, out.side_x, out.side_y));
    out.centers_element.push_back(center);
    out.centers_image.push_back(
        element_to_image(center, element.quadrant, image_width, image_height));
    out.origins.emplace_back(x0, y0);
  }
  return out;
}

double RegionMask::blob_value(double x, double y) const {
  const double dx = x - center.x;
  const double dy = y - center.y;
  return std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
}

std::vector<RegionMask> build_masks(int element_width, int element_height,
                                    const DistortionBlocks& blocks) {
  std::vector<RegionMask> masks;
  masks.reserve(blocks.images.size());
  const double side = 0.5 * (blocks.side_x + blocks.side_y);
  for (std::size_t b = 0; b < blocks.images.size(); ++b) {
    RegionMask m;
    m.width = element_width;
    m.height = element_height;
    m.center = blocks.centers_element[b];
    m.sigma = side / 4.0;
    const std::size_t count = static_cast<std::size_t>(element_width) * element_height;
    m.box.assign(count, 0.0f);
    m.blob.assign(count, 0.0f);
    const auto [x0, y0] = blocks.origins[b];
    for (int j = 0; j < element_height; ++j) {
      for (int i = 0; i < element_width; ++i) {
        const std::size_t idx = static_cast<std::size_t>(j) * element_width + i;
        const bool inside = i >= x0 && i < x0 + blocks.side_x && j >= y0 &&
                            j < y0 + blocks.side_y;
        m.box[idx] = inside ? 1.0f : 0.0f;
        m.blob[idx] = static_cast<float>(m.blob_value(i + 0.5, j + 0.5));
      }
    }
    masks.push_back(std::move(m));
  }
  return masks;
}

std::string to_string(Split s) {
  switch (s) {
    case Split::kTrain: return "train";
    case Split::kTest: return "test";
    case Split::kVal: return "val";
  }
  return "train";
}

Split split_from_string(const std::string& s) {
  if (s == "train") return Split::kTrain;
  if (s == "test") return Split::kTest;
  if (s == "val") return Split::kVal;
  throw ArgumentError("unknown split '" + s + "'");
}

const SampleRecord* DatasetManifest::find(const std::string& id) const {
  for (const auto& r : records) {
    if (r.id == id) return &r;
  }
  return nullptr;
}

std::filesystem::path DatasetManifest::resolve(const std::string& relative) const {
  return path.parent_path() / relative;
}

namespace {

struct Rgb {
  double r, g, b;
};

Rgb random_color(Rng& rng) {
  return {rng.uniform(10.0, 245.0), rng.uniform(10.0, 245.0),
          rng.uniform(10.0, 245.0)};
}

std::uint8_t to_byte(double v) {
  return static_cast<std::uint8_t>(std::clamp<long>(std::lround(v), 0L, 255L));
}

// 4x4 supersampled coverage rendering; `shade` returns the color of a
// continuous point.
template <typename Shade>
ImageBuffer supersample(int width, int height, Shade&& shade) {
  ImageBuffer img(width, height, 3);
  constexpr int kSub = 4;
  for (int j = 0; j < height; ++j) {
    for (int i = 0; i < width; ++i) {
      double r = 0.0, g = 0.0, b = 0.0;
      for (int sy = 0; sy < kSub; ++sy) {
        for (int sx = 0; sx < kSub; ++sx) {
          const Rgb c = shade(i + (sx + 0.5) / kSub, j + (sy + 0.5) / kSub);
          r += c.r;
          g += c.g;
          b += c.b;
        }
      }
      constexpr double kInv = 1.0 / (kSub * kSub);
      img.at(i, j, 0) = to_byte(r * kInv);
      img.at(i, j, 1) = to_byte(g * kInv);
      img.at(i, j, 2) = to_byte(b * kInv);
    }
  }
  return img;
}

ImageBuffer render_checkerboard(int width, int height, Rng& rng) {
  const double cell = rng.uniform(14.0, 40.0);
  const double angle = rng.uniform(0.0, 0.5 * std::numbers::pi);
  const double ox = rng.uniform(0.0, cell);
  const double oy = rng.uniform(0.0, cell);
  const Rgb a = random_color(rng);
  Rgb b = random_color(rng);
  if (std::abs(a.r + a.g + a.b - b.r - b.g - b.b) < 120.0) {
    b = {255.0 - a.r, 255.0 - a.g, 255.0 - a.b};
  }
  const double ca = std::cos(angle);
  const double sa = std::sin(angle);
  const double gx = rng.uniform(-0.15, 0.15);
  const double gy = rng.uniform(-0.15, 0.15);
  return supersample(width, height, [&](double x, double y) {
    const double u = (ca * x + sa * y + ox) / cell;
    const double v = (-sa * x + ca * y + oy) / cell;
    const bool odd =
        (static_cast<long>(std::floor(u)) + static_cast<long>(std::floor(v))) & 1;
    const Rgb base = odd ? a : b;
    const double shade = 1.0 + gx * (x / width - 0.5) + gy * (y / height - 0.5);
    return Rgb{base.r * shade, base.g * shade, base.b * shade};
  });
}

ImageBuffer render_lines(int width, int height, Rng& rng) {
  struct Line {
    double nx, ny, offset, half_width;
    Rgb color;
  };
  const Rgb background = random_color(rng);
  const int count = rng.uniform_int(12, 28);
  std::vector<Line> lines;
  lines.reserve(count);
  for (int l = 0; l < count; ++l) {
    const double theta = rng.uniform(0.0, std::numbers::pi);
    const double px = rng.uniform(0.0, width);
    const double py = rng.uniform(0.0, height);
    const double nx = std::cos(theta);
    const double ny = std::sin(theta);
    lines.push_back({nx, ny, nx * px + ny * py, 0.5 * rng.uniform(1.5, 6.0),
                     random_color(rng)});
  }
  return supersample(width, height, [&](double x, double y) {
    Rgb c = background;
    for (const auto& l : lines) {  // later lines paint over earlier ones
      if (std::abs(l.nx * x + l.ny * y - l.offset) <= l.half_width) c = l.color;
    }
    return c;
  });
}

ImageBuffer to_rgb_resized(const ImageBuffer& src, int width, int height) {
  ImageBuffer rgb(src.width(), src.height(), 3);
  for (int y = 0; y < src.height(); ++y) {
    for (int x = 0; x < src.width(); ++x) {
      for (int c = 0; c < 3; ++c) {
        const int sc = src.channels() >= 3 ? c : 0;
        rgb.at(x, y, c) = src.at(x, y, sc);
      }
    }
  }
  if (src.width() == width && src.height() == height) return rgb;
  ImageBuffer out(width, height, 3);
  const double sx = static_cast<double>(src.width()) / width;
  const double sy = static_cast<double>(src.height()) / height;
  std::array<std::uint8_t, 4> px{};
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      sample_bilinear(rgb, (x + 0.5) * sx, (y + 0.5) * sy, {}, px);
      for (int c = 0; c < 3; ++c) out.at(x, y, c) = px[c];
    }
  }
  return out;
}

std::vector<std::filesystem::path> list_sources(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> files;
  std::error_code ec;
  std::filesystem::directory_iterator it(dir, ec);
  if (ec) throw IoError("cannot read source directory", dir.string());
  for (const auto& entry : it) {
    if (!entry.is_regular_file()) continue;
    auto ext = entry.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char ch) { return std::tolower(ch); });
    if (ext == ".png") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw IoError("no PNG sources found", dir.string());
  return files;
}

void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory", dir.string());
}

std::string sample_id(Split split, int index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%s_%06d", to_string(split).c_str(), index);
  return buf;
}

void write_mask_png(const RegionMask& m, const std::filesystem::path& path) {
  ImageBuffer img(m.width, m.height, 3, 0);
  for (int j = 0; j < m.height; ++j) {
    for (int i = 0; i < m.width; ++i) {
      img.at(i, j, 0) = to_byte(255.0 * m.box_at(i, j));
      img.at(i, j, 1) = to_byte(255.0 * m.blob_at(i, j));
    }
  }
  save_png(img, path);
}

}  // namespace

ImageBuffer render_scene(SceneKind kind, int width, int height,
                         std::uint64_t seed) {
  Rng rng(seed);
  if (kind == SceneKind::kMixed) {
    kind = rng.uniform() < 0.5 ? SceneKind::kCheckerboard : SceneKind::kLines;
  }
  return kind == SceneKind::kCheckerboard ? render_checkerboard(width, height, rng)
                                          : render_lines(width, height, rng);
}

DatasetManifest generate_dataset(const DatasetConfig& config) {
  if (config.width <= 0 || config.height <= 0 || config.width % 2 != 0 ||
      config.height % 2 != 0) {
    throw ConfigError("image size must be positive and even");
  }
  if (config.train < 0 || config.test < 0 || config.val < 0) {
    throw ConfigError("sample counts must be non-negative");
  }
  if (config.n < 1) throw ConfigError("block count n must be positive");
  if (!(config.center_jitter >= 0.0 && config.center_jitter < 0.25)) {
    throw ConfigError("center jitter must be in [0, 0.25)");
  }
  std::vector<std::filesystem::path> sources;
  if (config.source_dir) sources = list_sources(*config.source_dir);

  const auto& out = config.out_dir;
  for (const char* sub : {"sources", "distorted", "elements"}) ensure_dir(out / sub);
  if (config.write_masks) ensure_dir(out / "masks");

  struct Job {
    Split split;
    int index;
  };
  std::vector<Job> jobs;
  for (int i = 0; i < config.train; ++i) jobs.push_back({Split::kTrain, i});
  for (int i = 0; i < config.test; ++i) jobs.push_back({Split::kTest, i});
  for (int i = 0; i < config.val; ++i) jobs.push_back({Split::kVal, i});

  const int w = config.width;
  const int h = config.height;
  const double r_norm = default_r_norm(w, h);
  const double diag = std::hypot(static_cast<double>(w), static_cast<double>(h));

  DatasetManifest manifest;
  manifest.path = out / "manifest.jsonl";
  manifest.records.resize(jobs.size());

  parallel_for(jobs.size(), [&](std::size_t job_index) {
    const Job& job = jobs[job_index];
    Rng rng(derive_seed(config.seed, static_cast<std::uint64_t>(job.split),
                        static_cast<std::uint64_t>(job.index)));
    const std::uint64_t scene_seed = rng.next();
    const std::uint64_t coef_seed = rng.next();

    SampleRecord rec;
    rec.id = sample_id(job.split, job.index);
    rec.split = job.split;

    ImageBuffer clean;
    if (sources.empty()) {
      clean = render_scene(config.scenes, w, h, scene_seed);
    } else {
      const auto& src = sources[scene_seed % sources.size()];
      clean = to_rgb_resized(load_png(src), w, h);
    }

    rec.coefficients = sample_coefficients(config.ranges, coef_seed, r_norm);
    const double jx = config.center_jitter * diag * rng.uniform(-1.0, 1.0);
    const double jy = config.center_jitter * diag * rng.uniform(-1.0, 1.0);
    rec.principal_point = {0.5 * w + jx, 0.5 * h + jy};

    const ImageBuffer distorted =
        distort_image(clean, rec.coefficients, rec.principal_point);
    const auto elements = split_elements(distorted);

    rec.source_path = "sources/" + rec.id + ".png";
    rec.distorted_path = "distorted/" + rec.id + ".png";
    save_png(clean, out / rec.source_path);
    save_png(distorted, out / rec.distorted_path);

    for (int q = 0; q < 4; ++q) {
      const auto& e = elements[q];
      rec.element_paths[q] = "elements/" + rec.id + "_e" + std::to_string(q) + ".png";
      rec.flips[q] = e.flip;
      save_png(e.image, out / rec.element_paths[q]);
      const DistortionBlocks blocks = crop_blocks(e, config.n, w, h);
      rec.block_centers[q] = blocks.centers_image;
      const auto masks = build_masks(e.image.width(), e.image.height(), blocks);
      if (config.write_masks) {
        for (std::size_t b = 0; b < masks.size(); ++b) {
          write_mask_png(masks[b], out / "masks" /
                                       (rec.id + "_e" + std::to_string(q) +
                                        "_b" + std::to_string(b) + ".png"));
        }
      }
      if (e.quadrant == Quadrant::kBottomRight) {
        rec.radii.clear();
        for (const auto& c : blocks.centers_image) {
          rec.radii.push_back(radius(c, rec.principal_point) / r_norm);
        }
      }
    }
    rec.ordinal = compute_ordinal(rec.coefficients, rec.radii).levels;
    manifest.records[job_index] = std::move(rec);
  });

  write_manifest(manifest);
  return manifest;
}

}  // namespace ordcal
