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

#ifndef SAU_INTERCHANGE_HPP_
#define SAU_INTERCHANGE_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "sau/attack_sim.hpp"
#include "sau/latent.hpp"
#include "sau/mask_gen.hpp"
#include "sau/metrics.hpp"
#include "sau/trigger_profile.hpp"

namespace sau::io {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Array container: NPY 1.0, dtype "<f4", C order.
//
//   "\x93NUMPY" 0x01 0x00 <u16 LE header length> <header dict, space padded,
//   '\n' terminated> <payload>
//
// The header is padded so the payload starts at a multiple of 64 bytes.
// ---------------------------------------------------------------------------

struct NpyArray {
  std::vector<std::size_t> shape;
  std::vector<float> data;
};

/// Full preamble (magic, version, length, padded dict) for a float32 array.
std::string encode_npy_header(std::span<const std::size_t> shape);

void write_npy(const fs::path& path, std::span<const std::size_t> shape, std::span<const float> data);

/// Errors (IoError): "not an array container", "unsupported version",
/// "unsupported dtype", "fortran order not supported", "payload length mismatch",
/// "non-finite data".
NpyArray read_npy(const fs::path& path);

void write_array(const fs::path& path, const LatentTensor& tensor);
void write_array(const fs::path& path, const LatentBatch& batch);
void write_array(const fs::path& path, const SpatialMap& map);
void write_array(const fs::path& path, std::span<const SpatialMap> maps);

/// Requires a 3-d (C,H,W) array.
LatentTensor read_tensor(const fs::path& path);
/// Accepts (N,C,H,W), or (C,H,W) as a batch of one.
LatentBatch read_batch(const fs::path& path);
/// Requires a 2-d (H,W) array.
SpatialMap read_map(const fs::path& path);

// ---------------------------------------------------------------------------
// Profile bundle: <dir>/trigger_latent.npy, <dir>/activation_map.npy, <dir>/manifest.json
// ---------------------------------------------------------------------------

inline constexpr int kProfileFormatVersion = 1;
inline constexpr const char* kTriggerLatentFile = "trigger_latent.npy";
inline constexpr const char* kActivationMapFile = "activation_map.npy";
inline constexpr const char* kProfileManifestFile = "manifest.json";

void write_profile(const fs::path& dir, const TriggerProfile& profile,
                   const nlohmann::json& provenance = nlohmann::json::object());
TriggerProfile read_profile(const fs::path& dir);

// ---------------------------------------------------------------------------
// Config: JSON object with optional numeric keys tau1, tau2, sigma_mask,
// beta, alpha, sigma_final. Absent keys take defaults; others are rejected.
// ---------------------------------------------------------------------------

SauConfig parse_config(std::string_view text);
SauConfig read_config(const fs::path& path);
nlohmann::json config_to_json(const SauConfig& config);

// ---------------------------------------------------------------------------
// Attack manifest written by `simulate`.
// ---------------------------------------------------------------------------

struct AttackManifest {
  sim::GeneratorOptions generator;
  std::uint64_t first_seed = 0;
  std::size_t count = 0;
};

nlohmann::json manifest_to_json(const AttackManifest& manifest);
AttackManifest manifest_from_json(const nlohmann::json& j);
void write_attack_manifest(const fs::path& path, const AttackManifest& manifest);
AttackManifest read_attack_manifest(const fs::path& path);

// ---------------------------------------------------------------------------
// Evaluation report. Everything except the "metadata" member is a pure
// function of the inputs; keys are emitted in sorted order.
// ---------------------------------------------------------------------------

nlohmann::json report_to_json(const EvalReport& report);
EvalReport report_from_json(const nlohmann::json& j);
void write_report(const fs::path& path, const EvalReport& report,
                  const nlohmann::json& metadata = nlohmann::json::object());
EvalReport read_report(const fs::path& path);

// Text helpers shared by the CLI.
nlohmann::json read_json_file(const fs::path& path);
void write_text_file(const fs::path& path, std::string_view text);

}  // namespace sau::io

#endif  // SAU_INTERCHANGE_HPP_
