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
#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "json.hpp"
#include "test_util.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Result {
  int code = -1;
  std::string out;
};

// Runs the CLI with stderr discarded unless requested.
Result run(const std::string& args, bool merge_stderr = false,
           const std::string& env = "") {
  const std::string cmd = env + (env.empty() ? "" : " ") + "'" ORDCAL_CLI_PATH "' " + args +
                          (merge_stderr ? " 2>&1" : " 2>/dev/null");
  Result r;
  FILE* pipe = ::popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  const int status = ::pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

json run_json(const std::string& args) {
  const auto r = run("--json " + args);
  EXPECT_EQ(r.code, 0) << args << "\n" << r.out;
  return json::parse(r.out);
}

std::vector<json> json_lines(const std::string& text) {
  std::vector<json> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) {
    if (!line.empty()) out.push_back(json::parse(line));
  }
  return out;
}

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

// Every regular file under root, keyed by relative path.
std::map<std::string, std::string> snapshot(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) {
      files[fs::relative(e.path(), root).string()] = ordcal::testing::read_file(e.path());
    }
  }
  return files;
}

TEST(Cli, ConvertLevelsToCoefficients) {
  const auto j = run_json("convert --levels 1.4 --radii 1.0");
  ASSERT_EQ(j["k"].size(), 1u);
  EXPECT_NEAR(j["k"][0].get<double>(), 0.4, 1e-9);
  EXPECT_NEAR(j["condition"].get<double>(), 1.0, 1e-12);

  const auto two = run_json("convert --levels 1.1,1.5 --radii 0.5,1");
  // k1 / 4 + k2 / 16 = 0.1 and k1 + k2 = 0.5.
  EXPECT_NEAR(two["k"][0].get<double>(), 1.1 / 3, 1e-9);
  EXPECT_NEAR(two["k"][1].get<double>(), 0.5 - 1.1 / 3, 1e-9);
  EXPECT_NEAR(two["condition"].get<double>(), 13.3333333, 1e-6);
}

TEST(Cli, ConvertCoefficientsToLevels) {
  const auto j = run_json("convert --k 0.4,0.1 --radii 0.5,1");
  EXPECT_NEAR(j["levels"][0].get<double>(), 1.10625, 1e-9);
  EXPECT_NEAR(j["levels"][1].get<double>(), 1.5, 1e-9);
}

TEST(Cli, TableOutput) {
  const auto r = run("convert --levels 1.4 --radii 1.0");
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("k          0.4\n"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("condition  1\n"), std::string::npos) << r.out;
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run("").code, 1);
  EXPECT_EQ(run("convert --no-such-flag").code, 1);
  EXPECT_EQ(run("convert --levels 1.1").code, 1);
  EXPECT_EQ(run("eval --a /nonexistent/a.png --b /nonexistent/b.png").code, 2);
  const auto bad = run("convert --levels 1.1,1.2 --radii 0.5,0.5", true);
  EXPECT_EQ(bad.code, 2);
  EXPECT_NE(bad.out.find("error"), std::string::npos);
  EXPECT_EQ(run("--version").code, 0);
}

TEST(Cli, DistortRectifyEval) {
  ordcal::testing::TempDir dir("cli_dr");
  // A dataset source is the simplest way to get a clean image on disk.
  ASSERT_EQ(run("generate --out " + q(dir / "ds") + " --count 1 --width 128 --height 128 "
                "--k-lo 0.3,0,0,0 --k-hi 0.3,0,0,0 --no-level-window")
                .code,
            0);
  const auto clean = dir / "ds" / "sources" / "train_000000.png";
  ASSERT_TRUE(fs::exists(clean));
  ASSERT_EQ(run("distort --in " + q(clean) + " --out " + q(dir / "d.png") + " --k 0.3").code, 0);
  // Same bytes as the generated distorted image.
  EXPECT_EQ(ordcal::testing::read_file(dir / "d.png"),
            ordcal::testing::read_file(dir / "ds" / "distorted" / "train_000000.png"));
  ASSERT_EQ(run("rectify --in " + q(dir / "d.png") + " --out " + q(dir / "r.png") + " --k 0.3").code,
            0);
  const auto j = run_json("eval --a " + q(clean) + " --b " + q(dir / "r.png") + " --crop 0.25");
  EXPECT_GE(j["psnr"].get<double>(), 28.0);

  ASSERT_EQ(run("rectify --in " + q(dir / "d.png") + " --out " + q(dir / "o.png") +
                " --ordinal 1.3 --radii 1.0")
                .code,
            0);
  EXPECT_EQ(ordcal::testing::read_file(dir / "o.png"), ordcal::testing::read_file(dir / "r.png"));
  ASSERT_EQ(run("rectify --fit --in " + q(dir / "d.png") + " --out " + q(dir / "f.png") + " --k 0.3")
                .code,
            0);
  EXPECT_TRUE(fs::exists(dir / "f.png"));
}

TEST(Cli, EvalIdenticalImages) {
  ordcal::testing::TempDir dir("cli_eval");
  ASSERT_EQ(run("generate --out " + q(dir / "ds") + " --count 1 --width 32 --height 32").code, 0);
  const auto img = q(dir / "ds" / "sources" / "train_000000.png");
  const auto r = run("--json eval --a " + img + " --b " + img);
  ASSERT_EQ(r.code, 0);
  const auto j = json::parse(r.out);
  EXPECT_EQ(j["psnr"], "inf");
  EXPECT_DOUBLE_EQ(j["ssim"].get<double>(), 1.0);
}

TEST(Cli, EvalCoefficients) {
  const auto j = run_json("eval --k-est 1,1 --k-true 0,3 --width 16 --height 16");
  EXPECT_NEAR(j["rmse_params"].get<double>(), 1.5, 1e-9);
  EXPECT_GT(j["mdld"].get<double>(), 0.0);
  const auto c = run_json("eval --k-est 1,1 --k-true 0,3 --width 16 --height 16 --conventional-rmse");
  EXPECT_NEAR(c["rmse_params"].get<double>(), std::sqrt(2.5), 1e-8);
  const auto same = run_json("eval --k-est 0.2 --k-true 0.2 --width 16 --height 16");
  EXPECT_EQ(same["mdld"].get<double>(), 0.0);
}

TEST(Cli, DdmExport) {
  ordcal::testing::TempDir dir("cli_ddm");
  const auto j = run_json("ddm --k 0.1 --width 256 --height 256 --csv " + q(dir / "m.csv") +
                          " --png " + q(dir / "m.png"));
  EXPECT_EQ(j["width"], 256);
  EXPECT_EQ(j["symmetry"].get<double>(), 0.0);
  std::ifstream csv(dir / "m.csv");
  std::string first;
  std::getline(csv, first);
  // Nine significant digits.
  EXPECT_EQ(first.substr(0, first.find(',')), "1.09922028");
  const auto png = ordcal::testing::read_file(dir / "m.png");
  ASSERT_GT(png.size(), 26u);
  EXPECT_EQ(static_cast<int>(png[24]), 16);  // bit depth
  EXPECT_EQ(static_cast<int>(png[25]), 0);   // grayscale
  EXPECT_EQ(run("ddm --k 0.1 --width 8 --height 8").code, 1);
}

TEST(Cli, LearningFriendlyRate) {
  ordcal::testing::TempDir dir("cli_lfr");
  {
    std::ofstream out(dir / "g.csv");
    out << "error,data_count,convergence_epoch\n0.07,100,50\n";
  }
  const auto j = run_json("lfr --groups " + q(dir / "g.csv") + " --total-data 100 --total-epochs 100");
  EXPECT_NEAR(j["lfr"].get<double>(), 5.79235868725949, 1e-6);
  EXPECT_EQ(j["groups"], 1);
  const auto t = run_json("lfr --log10 --groups " + q(dir / "g.csv") +
                          " --total-data 100 --total-epochs 100");
  EXPECT_NEAR(t["lfr"].get<double>(), std::log10(1.5) / 0.07, 1e-6);
}

TEST(Cli, GenerateIsDeterministicAcrossThreads) {
  ordcal::testing::TempDir dir("cli_det");
  const std::string common = " --train 3 --test 1 --val 1 --width 64 --height 64 --seed 11 --masks";
  ASSERT_EQ(run("generate --out " + q(dir / "a") + common, false, "ORDCAL_THREADS=1").code, 0);
  ASSERT_EQ(run("generate --out " + q(dir / "b") + common, false, "ORDCAL_THREADS=3").code, 0);
  const auto a = snapshot(dir / "a"), b = snapshot(dir / "b");
  EXPECT_GT(a.size(), 5u);
  EXPECT_TRUE(a == b);
  ASSERT_EQ(run("generate --out " + q(dir / "c") + " --train 3 --test 1 --val 1 --width 64 "
                "--height 64 --seed 12 --masks")
                .code,
            0);
  EXPECT_NE(snapshot(dir / "c").at("manifest.jsonl"), a.at("manifest.jsonl"));
}

TEST(Cli, ConfigFileSetsDefaults) {
  ordcal::testing::TempDir dir("cli_cfg");
  {
    std::ofstream cfg(dir / "gen.cfg");
    cfg << "# small dataset\nwidth=32\nheight = 32\ncount=2\nseed=4\n";
  }
  const auto j = run_json("--config " + q(dir / "gen.cfg") + " generate --out " + q(dir / "a"));
  EXPECT_EQ(j["records"], 2);
  EXPECT_EQ(j["seed"], 4);
  // Command line wins over the file.
  const auto k = run_json("--config " + q(dir / "gen.cfg") + " generate --seed 9 --out " +
                          q(dir / "b"));
  EXPECT_EQ(k["seed"], 9);
  const auto rec = json::parse(run("--json inspect --index 0 --manifest " + q(dir / "a" / "manifest.jsonl")).out);
  EXPECT_NEAR(rec["coefficients"]["r_norm"].get<double>(), std::hypot(16.0, 16.0), 1e-9);
  EXPECT_EQ(run("--config " + q(dir / "missing.cfg") + " generate --out " + q(dir / "c")).code, 1);
}

TEST(Cli, InspectMatchesManifestLine) {
  ordcal::testing::TempDir dir("cli_inspect");
  ASSERT_EQ(run("generate --out " + q(dir.path()) + " --train 1 --test 1 --val 0 --width 32 --height 32")
                .code,
            0);
  std::ifstream in(dir / "manifest.jsonl");
  std::string first, second;
  std::getline(in, first);
  std::getline(in, second);
  const auto by_index = run("--json inspect --manifest " + q(dir / "manifest.jsonl") + " --index 1");
  EXPECT_EQ(json::parse(by_index.out), json::parse(second));
  const auto id = json::parse(first)["id"].get<std::string>();
  const auto by_id = run("--json inspect --manifest " + q(dir / "manifest.jsonl") + " --id " + id);
  EXPECT_EQ(json::parse(by_id.out), json::parse(first));
  EXPECT_EQ(run("inspect --manifest " + q(dir / "manifest.jsonl") + " --id nope").code, 2);
}

TEST(Cli, BatchEvalWithPredictions) {
  ordcal::testing::TempDir dir("cli_batch");
  ASSERT_EQ(run("generate --out " + q(dir / "ds") + " --train 1 --test 2 --val 0 --width 64 "
                "--height 64 --seed 2")
                .code,
            0);
  const auto manifest = dir / "ds" / "manifest.jsonl";
  std::vector<json> records;
  {
    std::ifstream in(manifest);
    for (std::string line; std::getline(in, line);) records.push_back(json::parse(line));
  }
  ASSERT_EQ(records.size(), 3u);
  {
    std::ofstream p(dir / "pred.jsonl");
    // Exact k, exact ordinal, a perturbed ordinal and one that folds over.
    p << json{{"id", records[1]["id"]}, {"k", records[1]["coefficients"]["k"]}}.dump() << '\n';
    p << json{{"id", records[2]["id"]}, {"ordinal", records[2]["ordinal"]}}.dump() << '\n';
    auto off = records[0]["ordinal"];
    off[3] = off[3].get<double>() + 0.01;
    p << json{{"id", records[0]["id"]}, {"ordinal", off}, {"radii", records[0]["radii"]}}.dump()
      << '\n';
    off[3] = off[3].get<double>() + 0.04;
    p << json{{"id", records[0]["id"]}, {"ordinal", off}}.dump() << '\n';
  }
  const auto r = run("eval --manifest " + q(manifest) + " --predictions " + q(dir / "pred.jsonl"));
  ASSERT_EQ(r.code, 0);
  const auto lines = json_lines(r.out);
  ASSERT_EQ(lines.size(), 4u);
  EXPECT_EQ(lines[0]["id"], records[1]["id"]);
  EXPECT_EQ(lines[0]["rmse_params"].get<double>(), 0.0);
  EXPECT_EQ(lines[0]["mdld"].get<double>(), 0.0);
  EXPECT_LT(lines[1]["rmse_params"].get<double>(), 1e-9);
  EXPECT_LT(lines[1]["mdld"].get<double>(), 1e-9);
  EXPECT_GT(lines[2]["mdld"].get<double>(), 1e-4);
  for (int i = 0; i < 3; ++i) {
    EXPECT_TRUE(lines[i].contains("psnr"));
    EXPECT_TRUE(lines[i].contains("ssim"));
  }
  EXPECT_FALSE(lines[3].contains("psnr"));
  EXPECT_NE(lines[3]["rectify_error"].get<std::string>().find("monotone"), std::string::npos);
  EXPECT_GT(lines[3]["mdld"].get<double>(), lines[2]["mdld"].get<double>());

  const auto gt = json_lines(run("eval --ground-truth --split test --manifest " + q(manifest)).out);
  ASSERT_EQ(gt.size(), 2u);
  EXPECT_NEAR(gt[0]["psnr"].get<double>(), lines[0]["psnr"].get<double>(), 1e-6);

  EXPECT_EQ(run("eval --ground-truth --predictions " + q(dir / "pred.jsonl") + " --manifest " +
                q(manifest))
                .code,
            1);
  {
    std::ofstream p(dir / "bad.jsonl");
    p << R"({"id": "no-such-id", "k": [0.1]})" << '\n';
  }
  EXPECT_EQ(run("eval --manifest " + q(manifest) + " --predictions " + q(dir / "bad.jsonl")).code, 2);
}

}  // namespace
