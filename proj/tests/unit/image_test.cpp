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
#include "ordcal/image.hpp"

#include <atomic>
#include <fstream>

#include <gtest/gtest.h>

#include "ordcal/errors.hpp"
#include "ordcal/parallel.hpp"
#include "test_util.hpp"

namespace ordcal {
namespace {

TEST(ImageBuffer, Layout) {
  ImageBuffer img(3, 2, 3, 9);
  EXPECT_EQ(img.data().size(), 18u);
  img.at(2, 1, 1) = 42;
  EXPECT_EQ(img.data()[(1 * 3 + 2) * 3 + 1], 42);
  EXPECT_THROW(ImageBuffer(0, 2, 3), ArgumentError);
  EXPECT_THROW(ImageBuffer(2, 2, 5), ArgumentError);
}

TEST(SampleBilinear, PixelCentersAndMidpoints) {
  ImageBuffer img(2, 1, 1);
  img.at(0, 0, 0) = 10;
  img.at(1, 0, 0) = 30;
  std::array<std::uint8_t, 4> px{};
  sample_bilinear(img, 0.5, 0.5, {}, px);
  EXPECT_EQ(px[0], 10);
  sample_bilinear(img, 1.0, 0.5, {}, px);
  EXPECT_EQ(px[0], 20);
  sample_bilinear(img, 1.25, 0.5, {}, px);
  EXPECT_EQ(px[0], 25);
  // Half-pixel border clamps to the edge.
  sample_bilinear(img, 0.1, 0.9, {}, px);
  EXPECT_EQ(px[0], 10);
  sample_bilinear(img, 2.0, 0.5, {}, px);
  EXPECT_EQ(px[0], 30);
  // Outside the raster: background.
  Background bg;
  bg.value = {7, 7, 7, 7};
  sample_bilinear(img, 2.01, 0.5, bg, px);
  EXPECT_EQ(px[0], 7);
  sample_bilinear(img, 1.0, -0.01, bg, px);
  EXPECT_EQ(px[0], 7);
}

TEST(Crop, Region) {
  ImageBuffer img(4, 4, 1);
  for (int j = 0; j < 4; ++j) {
    for (int i = 0; i < 4; ++i) img.at(i, j, 0) = static_cast<std::uint8_t>(j * 4 + i);
  }
  const auto c = crop(img, 1, 2, 2, 2);
  EXPECT_EQ(c.at(0, 0, 0), 9);
  EXPECT_EQ(c.at(1, 1, 0), 14);
  EXPECT_THROW(crop(img, 3, 0, 2, 2), ArgumentError);
}

TEST(Png, RoundTripAndStableBytes) {
  testing::TempDir dir("png");
  for (int channels : {1, 3, 4}) {
    ImageBuffer img(17, 9, channels);
    int v = 0;
    for (auto& b : img.data()) b = static_cast<std::uint8_t>(v++ * 37);
    const auto p = dir / ("img" + std::to_string(channels) + ".png");
    save_png(img, p);
    EXPECT_EQ(load_png(p), img);
    const std::string first = testing::read_file(p);
    save_png(img, p);
    EXPECT_EQ(testing::read_file(p), first);
  }
}

TEST(Png, Errors) {
  testing::TempDir dir("png_err");
  EXPECT_THROW(load_png(dir / "missing.png"), IoError);
  {
    std::ofstream bad(dir / "bad.png");
    bad << "not a png";
  }
  EXPECT_THROW(load_png(dir / "bad.png"), IoError);
  EXPECT_THROW(save_png(ImageBuffer(2, 2, 3), dir / "no/such/dir/x.png"), IoError);
}

TEST(Png, SixteenBit) {
  testing::TempDir dir("png16");
  const std::vector<std::uint16_t> v{0, 1, 65535, 256};
  save_png16(2, 2, v, dir / "m.png");
  // 8-bit load strips to the high byte.
  const auto img = load_png(dir / "m.png");
  EXPECT_EQ(img.channels(), 1);
  EXPECT_EQ(img.at(0, 1, 0), 255);
  EXPECT_EQ(img.at(1, 1, 0), 1);
}

TEST(ParallelFor, CoversEveryIndexOnce) {
  for (const char* threads : {"1", "2", "7"}) {
    testing::ScopedEnv env("ORDCAL_THREADS", threads);
    std::vector<std::atomic<int>> hits(1000);
    parallel_for(hits.size(), [&](std::size_t i) { hits[i]++; });
    for (const auto& h : hits) EXPECT_EQ(h.load(), 1);
  }
}

TEST(ParallelFor, PropagatesExceptions) {
  testing::ScopedEnv env("ORDCAL_THREADS", "3");
  EXPECT_THROW(parallel_for(100,
                            [](std::size_t i) {
                              if (i == 57) throw ArgumentError("boom");
                            }),
               ArgumentError);
}

TEST(ParallelFor, NestedCallsRunInline) {
  testing::ScopedEnv env("ORDCAL_THREADS", "2");
  std::vector<int> out(16, 0);
  parallel_for(4, [&](std::size_t i) {
    parallel_for(4, [&](std::size_t j) { out[i * 4 + j] = static_cast<int>(i + j); });
  });
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 4; ++j) EXPECT_EQ(out[i * 4 + j], static_cast<int>(i + j));
  }
}

TEST(WorkerCount, Environment) {
  {
    testing::ScopedEnv env("ORDCAL_THREADS", "5");
    EXPECT_EQ(worker_count(), 5);
  }
  {
    testing::ScopedEnv env("ORDCAL_THREADS", "garbage");
    EXPECT_GE(worker_count(), 1);
  }
}

}  // namespace
}  // namespace ordcal
