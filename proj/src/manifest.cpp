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
#include <fstream>
#include <string>

#include "json.hpp"
#include "ordcal/errors.hpp"
#include "ordcal/synth.hpp"

namespace ordcal {

using Json = nlohmann::ordered_json;

std::string record_to_json(const SampleRecord& r) {
  Json j;
  j["id"] = r.id;
  j["source_path"] = r.source_path;
  j["distorted_path"] = r.distorted_path;
  j["principal_point"] = {{"xc", r.principal_point.xc},
                          {"yc", r.principal_point.yc}};
  j["coefficients"] = {{"model", to_string(r.coefficients.model)},
                       {"k", r.coefficients.k},
                       {"r_norm", r.coefficients.r_norm}};
  j["radii"] = r.radii;
  j["ordinal"] = r.ordinal;
  j["element_paths"] = Json::array();
  j["flips"] = Json::array();
  j["block_centers"] = Json::array();
  for (int q = 0; q < 4; ++q) {
    j["element_paths"].push_back(r.element_paths[q]);
    j["flips"].push_back(to_string(r.flips[q]));
    Json centers = Json::array();
    for (const auto& p : r.block_centers[q]) centers.push_back({p.x, p.y});
    j["block_centers"].push_back(std::move(centers));
  }
  j["split"] = to_string(r.split);
  return j.dump();
}

SampleRecord record_from_json(const std::string& line) {
  SampleRecord r;
  try {
    const Json j = Json::parse(line);
    r.id = j.at("id").get<std::string>();
    r.source_path = j.at("source_path").get<std::string>();
    r.distorted_path = j.at("distorted_path").get<std::string>();
    r.principal_point.xc = j.at("principal_point").at("xc").get<double>();
    r.principal_point.yc = j.at("principal_point").at("yc").get<double>();
    const Json& k = j.at("coefficients");
    r.coefficients.model = model_from_string(k.at("model").get<std::string>());
    r.coefficients.k = k.at("k").get<std::vector<double>>();
    r.coefficients.r_norm = k.at("r_norm").get<double>();
    r.radii = j.at("radii").get<std::vector<double>>();
    r.ordinal = j.at("ordinal").get<std::vector<double>>();
    const Json& paths = j.at("element_paths");
    const Json& flips = j.at("flips");
    const Json& centers = j.at("block_centers");
    if (paths.size() != 4 || flips.size() != 4 || centers.size() != 4) {
      throw ArgumentError("record needs exactly four elements");
    }
    for (int q = 0; q < 4; ++q) {
      r.element_paths[q] = paths[q].get<std::string>();
      r.flips[q] = flip_from_string(flips[q].get<std::string>());
      for (const auto& p : centers[q]) {
        r.block_centers[q].push_back(
            {p.at(0).get<double>(), p.at(1).get<double>(), Frame::kDistorted});
      }
    }
    r.split = split_from_string(j.at("split").get<std::string>());
  } catch (const Json::exception& e) {
    throw ArgumentError(std::string("malformed manifest record: ") + e.what());
  }
  return r;
}

void write_manifest(const DatasetManifest& m) {
  std::ofstream os(m.path, std::ios::binary);
  if (!os) throw IoError("cannot open for writing", m.path.string());
  for (const auto& r : m.records) os << record_to_json(r) << '\n';
  if (!os) throw IoError("write failed", m.path.string());
}

DatasetManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open for reading", path.string());
  DatasetManifest m;
  m.path = path;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    m.records.push_back(record_from_json(line));
  }
  return m;
}

}  // namespace ordcal
