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
#ifndef ORDCAL_SYNTH_HPP_
#define ORDCAL_SYNTH_HPP_

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "ordcal/camera_model.hpp"
#include "ordcal/image.hpp"

namespace ordcal {

/// Deterministic stream of uniform doubles. Built on mt19937_64, whose
/// output sequence is fixed by the standard; the conversion to [0, 1) is
/// done here so results do not depend on the standard library vendor.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  int uniform_int(int lo, int hi) {  // inclusive
    return lo + static_cast<int>(uniform() * (hi - lo + 1));
  }
  std::uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

/// Mixes a base seed with a stream tag and index (splitmix64 finalizer).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream,
                          std::uint64_t index);

struct CoefficientRanges {
  Model model = Model::kDivision;
  std::vector<std::pair<double, double>> intervals;
  /// Accepted window for delta at normalized radius 1; nullopt disables it.
  std::optional<std::pair<double, double>> level_window;
};

/// k1 in [0.05, 1.0], k2..k4 in [-0.1, 0.1], delta(1) in [1.05, 3.0].
CoefficientRanges default_ranges();

/// Uniform draw per coefficient, resampled (at most 100 draws) until the
/// radial map is monotone on [0, 1] and delta(1) lies in the window.
/// Throws ConfigError when every draw is rejected.
DistortionCoefficients sample_coefficients(const CoefficientRanges& ranges,
                                           std::uint64_t seed,
                                           double r_norm = 1.0);

/// Synthesizes the distorted view: every output pixel center p samples the
/// clean image bilinearly at undistort_point(p).
ImageBuffer distort_image(const ImageBuffer& clean,
                          const DistortionCoefficients& k,
                          const PrincipalPoint& c, const Background& bg = {});

/// Source coordinate used by distort_image for a distorted point.
Point distort_source_coordinate(const Point& p, const DistortionCoefficients& k,
                                const PrincipalPoint& c);

enum class Flip { kNone, kHorizontal, kVertical, kDiagonal };
std::string to_string(Flip f);
Flip flip_from_string(const std::string& s);

/// Horizontal mirrors left-right, vertical mirrors top-bottom, diagonal does
/// both. Every flip is its own inverse.
ImageBuffer apply_flip(const ImageBuffer& img, Flip f);

enum class Quadrant { kTopLeft = 0, kTopRight = 1, kBottomLeft = 2, kBottomRight = 3 };

/// One quarter of a distorted image, flipped so the image center sits at the
/// element's top-left corner.
struct DistortionElement {
  Quadrant quadrant = Quadrant::kBottomRight;
  Flip flip = Flip::kNone;
  ImageBuffer image;
};

/// Flip applied to each quadrant; bottom-right is the canonical orientation.
Flip quadrant_flip(Quadrant q);

/// Cuts along the image center into TL, TR, BL, BR elements (in that order).
/// Throws ArgumentError on odd dimensions.
std::array<DistortionElement, 4> split_elements(const ImageBuffer& img);

/// Inverse of split_elements.
ImageBuffer assemble_elements(const std::array<DistortionElement, 4>& elements);

/// Maps a continuous coordinate in element space back to the full image.
Point element_to_image(const Point& p, Quadrant q, int image_width,
                       int image_height);

struct DistortionBlocks {
  int side_x = 0;  // W / 8 of the full image
  int side_y = 0;  // H / 8 of the full image
  std::vector<ImageBuffer> images;
  std::vector<Point> centers_element;  // element coordinates
  std::vector<Point> centers_image;    // full-image coordinates
  std::vector<std::pair<int, int>> origins;  // top-left pixel in the element
};

/// Places n blocks of (W/8 x H/8) along the element diagonal at fractions
/// (2i - 1) / (2n), i = 1..n. Throws ArgumentError when a block would leave
/// the element.
DistortionBlocks crop_blocks(const DistortionElement& element, int n,
                             int image_width, int image_height);

struct RegionMask {
  int width = 0;
  int height = 0;
  Point center;
  double sigma = 0.0;
  std::vector<float> box;   // 1 inside the block rectangle
  std::vector<float> blob;  // Gaussian centered on the block

  float box_at(int i, int j) const {
    return box[static_cast<std::size_t>(j) * width + i];
  }
  float blob_at(int i, int j) const {
    return blob[static_cast<std::size_t>(j) * width + i];
  }
  /// Continuous blob profile exp(-d^2 / (2 sigma^2)).
  double blob_value(double x, double y) const;
};

/// One mask per block; sigma = block side / 4.
std::vector<RegionMask> build_masks(int element_width, int element_height,
                                    const DistortionBlocks& blocks);

enum class Split { kTrain, kTest, kVal };
std::string to_string(Split s);
Split split_from_string(const std::string& s);

struct SampleRecord {
  std::string id;
  std::string source_path;
  std::string distorted_path;
  PrincipalPoint principal_point;
  DistortionCoefficients coefficients;
  std::vector<double> radii;
  std::vector<double> ordinal;
  std::array<std::string, 4> element_paths;
  std::array<Flip, 4> flips{};
  std::array<std::vector<Point>, 4> block_centers;
  Split split = Split::kTrain;
};

struct DatasetManifest {
  std::filesystem::path path;  // manifest file; record paths are relative to its directory
  std::vector<SampleRecord> records;

  const SampleRecord* find(const std::string& id) const;
  std::filesystem::path resolve(const std::string& relative) const;
};

enum class SceneKind { kMixed, kCheckerboard, kLines };

struct DatasetConfig {
  std::optional<std::filesystem::path> source_dir;  // nullopt: procedural
  SceneKind scenes = SceneKind::kMixed;
  int train = 500;
  int test = 100;
  int val = 100;
  int width = 256;
  int height = 256;
  int n = 4;
  CoefficientRanges ranges = default_ranges();
  double center_jitter = 0.0;  // fraction of the image diagonal
  bool write_masks = false;
  std::uint64_t seed = 0;
  std::filesystem::path out_dir;
};

/// Procedural clean scene (checkerboard or line field), antialiased.
ImageBuffer render_scene(SceneKind kind, int width, int height,
                         std::uint64_t seed);

/// Runs the full synthesis chain per sample and writes PNGs plus
/// manifest.jsonl under out_dir. Output is a pure function of the config,
/// for any worker count.
DatasetManifest generate_dataset(const DatasetConfig& config);

std::string record_to_json(const SampleRecord& r);
SampleRecord record_from_json(const std::string& line);
void write_manifest(const DatasetManifest& m);
DatasetManifest load_manifest(const std::filesystem::path& path);

}  // namespace ordcal

#endif  // ORDCAL_SYNTH_HPP_
