// Copyright 2026 The SAU Toolkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "sau/interchange.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <regex>
#include <sstream>

#include "sau/error.hpp"
#include "sau/kernels.hpp"

namespace sau::io {
namespace {

using nlohmann::json;

constexpr std::array<char, 6> kMagic = {'\x93', 'N', 'U', 'M', 'P', 'Y'};
constexpr std::size_t kAlignment = 64;

std::string path_context(const fs::path& path) { return " (" + path.string() + ")"; }

std::uint32_t byteswap32(std::uint32_t v) {
  return ((v & 0xFFu) << 24) | ((v & 0xFF00u) << 8) | ((v >> 8) & 0xFF00u) | (v >> 24);
}

std::string read_file_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open file for reading" + path_context(path));
  }
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) {
    throw IoError("read failure" + path_context(path));
  }
  return bytes;
}

std::vector<std::size_t> parse_shape_tuple(const std::string& text, const fs::path& path) {
  std::vector<std::size_t> shape;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto first = item.find_first_not_of(" \t");
    if (first == std::string::npos) {
      continue;  // trailing comma of a 1-tuple
    }
    const auto last = item.find_last_not_of(" \tL");
    const std::string digits = item.substr(first, last - first + 1);
    if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos) {
      throw IoError("malformed shape in array header" + path_context(path));
    }
    shape.push_back(static_cast<std::size_t>(std::stoull(digits)));
  }
  return shape;
}

std::size_t element_count(std::span<const std::size_t> shape) {
  std::size_t n = 1;
  for (auto d : shape) {
    n *= d;
  }
  return n;
}

Shape tensor_shape(std::span<const std::size_t> dims) { return Shape{dims[0], dims[1], dims[2]}; }

std::size_t json_size(const json& j, const char* what) {
  if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<std::int64_t>() >= 0)) {
    throw ValidationError(std::string("expected a non-negative integer for ") + what);
  }
  return j.get<std::size_t>();
}

void write_json_file(const fs::path& path, const json& j) { write_text_file(path, j.dump(2) + "\n"); }

}  // namespace

std::string encode_npy_header(std::span<const std::size_t> shape) {
  std::string dict = "{'descr': '<f4', 'fortran_order': False, 'shape': (";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    dict += std::to_string(shape[i]);
    dict += (shape.size() == 1 || i + 1 < shape.size()) ? "," : "";
    if (i + 1 < shape.size()) {
      dict += ' ';
    }
  }
  dict += "), }";

  const std::size_t preamble = kMagic.size() + 2 + 2;
  std::size_t total = preamble + dict.size() + 1;  // + '\n'
  const std::size_t padded = (total + kAlignment - 1) / kAlignment * kAlignment;
  dict.append(padded - total, ' ');
  dict += '\n';

  const auto header_len = static_cast<std::uint16_t>(dict.size());
  std::string out(kMagic.begin(), kMagic.end());
  out += '\x01';
  out += '\x00';
  out += static_cast<char>(header_len & 0xFF);
  out += static_cast<char>((header_len >> 8) & 0xFF);
  out += dict;
  return out;
}

void write_npy(const fs::path& path, std::span<const std::size_t> shape, std::span<const float> data) {
  if (element_count(shape) != data.size()) {
    throw ValidationError("array shape does not match data length" + path_context(path));
  }
  std::string bytes = encode_npy_header(shape);
  const std::size_t offset = bytes.size();
  bytes.resize(offset + data.size() * sizeof(float));
  for (std::size_t i = 0; i < data.size(); ++i) {
    auto word = std::bit_cast<std::uint32_t>(data[i]);
    if constexpr (std::endian::native == std::endian::big) {
      word = byteswap32(word);
    }
    std::memcpy(bytes.data() + offset + i * sizeof(float), &word, sizeof(word));
  }
  write_text_file(path, bytes);
}

NpyArray read_npy(const fs::path& path) {
  const std::string bytes = read_file_bytes(path);
  if (bytes.size() < 10 || !std::equal(kMagic.begin(), kMagic.end(), bytes.begin())) {
    throw IoError("not an array container" + path_context(path));
  }
  const auto major = static_cast<unsigned char>(bytes[6]);
  std::size_t header_len = 0;
  std::size_t header_start = 0;
  if (major == 1) {
    header_len = static_cast<unsigned char>(bytes[8]) | (static_cast<std::size_t>(static_cast<unsigned char>(bytes[9])) << 8);
    header_start = 10;
  } else if (major == 2 || major == 3) {
    if (bytes.size() < 12) {
      throw IoError("not an array container" + path_context(path));
    }
    for (int b = 0; b < 4; ++b) {
      header_len |= static_cast<std::size_t>(static_cast<unsigned char>(bytes[8 + b])) << (8 * b);
    }
    header_start = 12;
  } else {
    throw IoError("unsupported version " + std::to_string(major) + path_context(path));
  }
  if (bytes.size() < header_start + header_len) {
    throw IoError("payload length mismatch: header truncated" + path_context(path));
  }
  const std::string header = bytes.substr(header_start, header_len);

  static const std::regex descr_re(R"('descr'\s*:\s*'([^']*)')");
  static const std::regex order_re(R"('fortran_order'\s*:\s*(True|False))");
  static const std::regex shape_re(R"('shape'\s*:\s*\(([^)]*)\))");
  std::smatch m;
  if (!std::regex_search(header, m, descr_re)) {
    throw IoError("not an array container: header lacks descr" + path_context(path));
  }
  if (m[1] != "<f4") {
    throw IoError("unsupported dtype '" + m[1].str() + "'" + path_context(path));
  }
  if (!std::regex_search(header, m, order_re)) {
    throw IoError("not an array container: header lacks fortran_order" + path_context(path));
  }
  if (m[1] == "True") {
    throw IoError("fortran order not supported" + path_context(path));
  }
  if (!std::regex_search(header, m, shape_re)) {
    throw IoError("not an array container: header lacks shape" + path_context(path));
  }

  NpyArray array;
  array.shape = parse_shape_tuple(m[1].str(), path);
  const std::size_t count = element_count(array.shape);
  const std::size_t payload = bytes.size() - header_start - header_len;
  if (payload != count * sizeof(float)) {
    throw IoError("payload length mismatch: expected " + std::to_string(count * sizeof(float)) + " bytes, found " +
                  std::to_string(payload) + path_context(path));
  }
  array.data.resize(count);
  const char* src = bytes.data() + header_start + header_len;
  for (std::size_t i = 0; i < count; ++i) {
    std::uint32_t word = 0;
    std::memcpy(&word, src + i * sizeof(float), sizeof(word));
    if constexpr (std::endian::native == std::endian::big) {
      word = byteswap32(word);
    }
    const auto v = std::bit_cast<float>(word);
    if (!std::isfinite(v)) {
      throw IoError("non-finite data at element " + std::to_string(i) + path_context(path));
    }
    array.data[i] = v;
  }
  return array;
}

void write_array(const fs::path& path, const LatentTensor& tensor) {
  const Shape& s = tensor.shape();
  const std::array<std::size_t, 3> shape = {s.channels, s.height, s.width};
  write_npy(path, shape, tensor.data());
}

void write_array(const fs::path& path, const LatentBatch& batch) {
  const Shape& s = batch.item_shape();
  const std::array<std::size_t, 4> shape = {batch.count(), s.channels, s.height, s.width};
  std::vector<float> flat;
  flat.reserve(batch.count() * s.size());
  for (const auto& t : batch) {
    flat.insert(flat.end(), t.data().begin(), t.data().end());
  }
  write_npy(path, shape, flat);
}

void write_array(const fs::path& path, const SpatialMap& map) {
  const std::array<std::size_t, 2> shape = {map.height(), map.width()};
  write_npy(path, shape, map.values());
}

void write_array(const fs::path& path, std::span<const SpatialMap> maps) {
  if (maps.empty()) {
    throw ValidationError("cannot write an empty map stack" + path_context(path));
  }
  const std::array<std::size_t, 3> shape = {maps.size(), maps.front().height(), maps.front().width()};
  std::vector<float> flat;
  flat.reserve(maps.size() * maps.front().size());
  for (const auto& m : maps) {
    if (m.height() != shape[1] || m.width() != shape[2]) {
      throw ValidationError("map stack has inconsistent shapes" + path_context(path));
    }
    flat.insert(flat.end(), m.values().begin(), m.values().end());
  }
  write_npy(path, shape, flat);
}

LatentTensor read_tensor(const fs::path& path) {
  NpyArray a = read_npy(path);
  if (a.shape.size() != 3) {
    throw ValidationError("expected a (C,H,W) array, found " + std::to_string(a.shape.size()) + " dimensions" +
                          path_context(path));
  }
  return LatentTensor(tensor_shape(a.shape), std::move(a.data));
}

LatentBatch read_batch(const fs::path& path) {
  NpyArray a = read_npy(path);
  if (a.shape.size() == 3) {
    return LatentBatch({LatentTensor(tensor_shape(a.shape), std::move(a.data))});
  }
  if (a.shape.size() != 4) {
    throw ValidationError("expected a (N,C,H,W) array, found " + std::to_string(a.shape.size()) + " dimensions" +
                          path_context(path));
  }
  if (a.shape[0] == 0) {
    throw ValidationError("empty batch" + path_context(path));
  }
  const Shape item = tensor_shape(std::span<const std::size_t>(a.shape).subspan(1));
  if (!item.valid()) {
    throw ValidationError("batch item dimensions must be positive" + path_context(path));
  }
  std::vector<LatentTensor> items;
  items.reserve(a.shape[0]);
  for (std::size_t i = 0; i < a.shape[0]; ++i) {
    const auto first = a.data.begin() + static_cast<std::ptrdiff_t>(i * item.size());
    items.emplace_back(item, std::vector<float>(first, first + static_cast<std::ptrdiff_t>(item.size())));
  }
  return LatentBatch(std::move(items));
}

SpatialMap read_map(const fs::path& path) {
  NpyArray a = read_npy(path);
  if (a.shape.size() != 2) {
    throw ValidationError("expected a (H,W) array" + path_context(path));
  }
  return SpatialMap(a.shape[0], a.shape[1], std::move(a.data));
}

void write_profile(const fs::path& dir, const TriggerProfile& profile, const nlohmann::json& provenance) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    throw IoError("cannot create profile directory: " + ec.message() + path_context(dir));
  }
  write_array(dir / kTriggerLatentFile, profile.trigger_latent());
  write_array(dir / kActivationMapFile, profile.activation_map());

  const Shape& s = profile.shape();
  json manifest;
  manifest["format_version"] = kProfileFormatVersion;
  manifest["shape"] = {s.channels, s.height, s.width};
  manifest["sample_count"] = profile.sample_count();
  manifest["files"] = {{"trigger_latent", kTriggerLatentFile}, {"activation_map", kActivationMapFile}};
  manifest["metadata"] = provenance;
  write_json_file(dir / kProfileManifestFile, manifest);
}

namespace {

// Artifacts written by this tool: malformed JSON is a file-content problem.
json read_artifact_json(const fs::path& path) {
  try {
    return read_json_file(path);
  } catch (const ValidationError& e) {
    throw IoError(e.what());
  }
}

}  // namespace

TriggerProfile read_profile(const fs::path& dir) {
  const json manifest = read_artifact_json(dir / kProfileManifestFile);
  try {
    if (manifest.at("format_version").get<int>() != kProfileFormatVersion) {
      throw IoError("unsupported profile format version" + path_context(dir));
    }
    const auto& shape = manifest.at("shape");
    if (!shape.is_array() || shape.size() != 3) {
      throw IoError("profile manifest shape must have three entries" + path_context(dir));
    }
    const Shape declared{json_size(shape[0], "shape"), json_size(shape[1], "shape"), json_size(shape[2], "shape")};
    const std::size_t samples = json_size(manifest.at("sample_count"), "sample_count");

    LatentTensor trigger = read_tensor(dir / kTriggerLatentFile);
    SpatialMap activation = read_map(dir / kActivationMapFile);
    if (trigger.shape() != declared) {
      throw IoError("profile manifest shape does not match trigger latent" + path_context(dir));
    }
    try {
      return TriggerProfile::restore(std::move(trigger), std::move(activation), samples);
    } catch (const ValidationError& e) {
      throw IoError(std::string("corrupt profile bundle: ") + e.what() + path_context(dir));
    }
  } catch (const json::exception& e) {
    throw IoError(std::string("malformed profile manifest: ") + e.what() + path_context(dir));
  }
}

SauConfig parse_config(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }
  if (!j.is_object()) {
    throw ValidationError("config: top-level value must be a JSON object");
  }
  SauConfig config;
  const std::array<std::pair<const char*, double*>, 6> fields = {{
      {"tau1", &config.tau1},
      {"tau2", &config.tau2},
      {"sigma_mask", &config.sigma_mask},
      {"beta", &config.beta},
      {"alpha", &config.alpha},
      {"sigma_final", &config.sigma_final},
  }};
  for (const auto& [key, value] : j.items()) {
    const auto it = std::find_if(fields.begin(), fields.end(), [&](const auto& f) { return key == f.first; });
    if (it == fields.end()) {
      throw ValidationError("config: unknown key \"" + key + "\"");
    }
    if (!value.is_number()) {
      throw ValidationError("config key \"" + key + "\": must be a number");
    }
    *it->second = value.get<double>();
  }
  config.validate();
  return config;
}

SauConfig read_config(const fs::path& path) {
  const std::string text = read_file_bytes(path);
  try {
    return parse_config(text);
  } catch (const ValidationError& e) {
    throw ValidationError(std::string(e.what()) + path_context(path));
  }
}

nlohmann::json config_to_json(const SauConfig& c) {
  return json{{"tau1", c.tau1},   {"tau2", c.tau2},   {"sigma_mask", c.sigma_mask},
              {"beta", c.beta},   {"alpha", c.alpha}, {"sigma_final", c.sigma_final}};
}

nlohmann::json manifest_to_json(const AttackManifest& m) {
  const auto& g = m.generator;
  json j;
  j["format_version"] = 1;
  j["generator"] = {{"shape", {g.shape.channels, g.shape.height, g.shape.width}},
                    {"smoothness", g.smoothness},
                    {"channel_bias", g.channel_bias},
                    {"noise_std", g.noise_std}};
  j["attack"] = {{"kind", std::string(sim::to_string(g.attack.kind))},
                 {"patch_origin", {g.attack.patch.row, g.attack.patch.col}},
                 {"patch_size", {g.attack.patch.height, g.attack.patch.width}},
                 {"amplitude", g.attack.amplitude}};
  j["seeds"] = {{"first", m.first_seed}, {"count", m.count}};
  return j;
}

AttackManifest manifest_from_json(const nlohmann::json& j) {
  try {
    AttackManifest m;
    const auto& g = j.at("generator");
    const auto& shape = g.at("shape");
    if (!shape.is_array() || shape.size() != 3) {
      throw ValidationError("attack manifest: shape must have three entries");
    }
    m.generator.shape = Shape{json_size(shape[0], "shape"), json_size(shape[1], "shape"), json_size(shape[2], "shape")};
    m.generator.smoothness = g.at("smoothness").get<double>();
    m.generator.channel_bias = g.at("channel_bias").get<double>();
    m.generator.noise_std = g.at("noise_std").get<double>();

    const auto& a = j.at("attack");
    m.generator.attack.kind = sim::parse_attack_kind(a.at("kind").get<std::string>());
    const auto& origin = a.at("patch_origin");
    const auto& size = a.at("patch_size");
    if (origin.size() != 2 || size.size() != 2) {
      throw ValidationError("attack manifest: patch_origin and patch_size need two entries");
    }
    m.generator.attack.patch = Rect{json_size(origin[0], "patch_origin"), json_size(origin[1], "patch_origin"),
                                    json_size(size[0], "patch_size"), json_size(size[1], "patch_size")};
    m.generator.attack.amplitude = a.at("amplitude").get<double>();

    m.first_seed = j.at("seeds").at("first").get<std::uint64_t>();
    m.count = json_size(j.at("seeds").at("count"), "seeds.count");
    // Constructing the generator enforces every attack invariant.
    sim::SyntheticGenerator check(m.generator);
    return m;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("attack manifest: ") + e.what());
  }
}

void write_attack_manifest(const fs::path& path, const AttackManifest& manifest) {
  write_json_file(path, manifest_to_json(manifest));
}

AttackManifest read_attack_manifest(const fs::path& path) {
  const json j = read_json_file(path);
  try {
    return manifest_from_json(j);
  } catch (const ValidationError& e) {
    throw ValidationError(std::string(e.what()) + path_context(path));
  }
}

nlohmann::json report_to_json(const EvalReport& report) {
  json items = json::array();
  for (const auto& item : report.items) {
    items.push_back({{"id", item.id},
                     {"detected_trigger", item.detected_trigger},
                     {"score", item.score},
                     {"psnr_db", item.psnr_db}});
  }
  const auto& d = report.detector;
  json region = "full_frame";
  if (d.region) {
    region = {{"row", d.region->row}, {"col", d.region->col}, {"height", d.region->height}, {"width", d.region->width}};
  }
  json j;
  j["attack_kind"] = report.attack_kind;
  j["detector"] = {{"region", region},      {"k", d.k},
                   {"mean", d.mean},        {"std", d.stddev},
                   {"threshold", d.threshold}, {"calibration_count", d.sample_count}};
  j["items"] = std::move(items);
  j["item_count"] = report.items.size();
  j["removal_accuracy"] = report.removal_accuracy;
  j["mean_psnr_db"] = report.mean_psnr_db;
  j["psnr_peak"] = report.psnr_peak;
  return j;
}

EvalReport report_from_json(const nlohmann::json& j) {
  try {
    EvalReport r;
    r.attack_kind = j.at("attack_kind").get<std::string>();
    const auto& d = j.at("detector");
    const auto& region = d.at("region");
    if (region.is_object()) {
      r.detector.region = Rect{region.at("row").get<std::size_t>(), region.at("col").get<std::size_t>(),
                               region.at("height").get<std::size_t>(), region.at("width").get<std::size_t>()};
    }
    r.detector.k = d.at("k").get<double>();
    r.detector.mean = d.at("mean").get<double>();
    r.detector.stddev = d.at("std").get<double>();
    r.detector.threshold = d.at("threshold").get<double>();
    r.detector.sample_count = d.at("calibration_count").get<std::size_t>();
    for (const auto& item : j.at("items")) {
      r.items.push_back(ItemRecord{item.at("id").get<std::string>(), item.at("detected_trigger").get<bool>(),
                                   item.at("score").get<double>(), item.at("psnr_db").get<double>()});
    }
    r.removal_accuracy = j.at("removal_accuracy").get<double>();
    r.mean_psnr_db = j.at("mean_psnr_db").get<double>();
    r.psnr_peak = j.at("psnr_peak").get<double>();
    return r;
  } catch (const json::exception& e) {
    throw IoError(std::string("malformed report: ") + e.what());
  }
}

void write_report(const fs::path& path, const EvalReport& report, const nlohmann::json& metadata) {
  json j = report_to_json(report);
  j["metadata"] = metadata;
  write_json_file(path, j);
}

EvalReport read_report(const fs::path& path) { return report_from_json(read_artifact_json(path)); }

nlohmann::json read_json_file(const fs::path& path) {
  const std::string text = read_file_bytes(path);
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string(e.what()) + path_context(path));
  }
}

void write_text_file(const fs::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw IoError("cannot open file for writing" + path_context(path));
  }
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  out.close();
  if (!out) {
    throw IoError("write failure" + path_context(path));
  }
}

}  // namespace sau::io
