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

#include "sau/cli.hpp"

#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "sau/attack_sim.hpp"
#include "sau/error.hpp"
#include "sau/interchange.hpp"
#include "sau/kernels.hpp"
#include "sau/metrics.hpp"
#include "sau/purifier.hpp"
#include "sau/trigger_profile.hpp"

namespace sau::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr const char* kToolVersion = "0.1.0";

std::vector<std::size_t> parse_size_list(const std::string& text, std::size_t expected, const char* flag) {
  std::vector<std::size_t> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty() || item.find_first_not_of("0123456789") != std::string::npos) {
      throw ValidationError(std::string(flag) + ": expected " + std::to_string(expected) +
                            " comma-separated non-negative integers, got \"" + text + "\"");
    }
    values.push_back(static_cast<std::size_t>(std::stoull(item)));
  }
  if (values.size() != expected) {
    throw ValidationError(std::string(flag) + ": expected " + std::to_string(expected) + " values, got \"" + text +
                          "\"");
  }
  return values;
}

void ensure_directory(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
  }
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream ss;
  ss << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return ss.str();
}

// ---------------------------------------------------------------------------

struct SimulateArgs {
  std::string out_dir;
  std::size_t count = 0;
  std::string attack;
  std::uint64_t seed = 0;
  std::string shape = "4,64,64";
  std::optional<double> amplitude;
  double noise_std = 0.0;
  double smoothness = 2.5;
  double channel_bias = 2.0;
  std::string patch_origin = "2,2";
  std::string patch_size = "12,12";
};

int cmd_simulate(const SimulateArgs& a, std::ostream& out) {
  const auto dims = parse_size_list(a.shape, 3, "--shape");
  const auto origin = parse_size_list(a.patch_origin, 2, "--patch-origin");
  const auto size = parse_size_list(a.patch_size, 2, "--patch-size");
  if (a.count == 0) {
    throw ValidationError("--count must be positive");
  }

  sim::GeneratorOptions opts;
  opts.shape = Shape{dims[0], dims[1], dims[2]};
  opts.smoothness = a.smoothness;
  opts.channel_bias = a.channel_bias;
  opts.noise_std = a.noise_std;
  const auto kind = sim::parse_attack_kind(a.attack);
  opts.attack = kind == sim::AttackKind::kPixel ? sim::AttackSpec::default_pixel(opts.shape)
                                                : sim::AttackSpec::default_style();
  opts.attack.patch = Rect{origin[0], origin[1], size[0], size[1]};
  if (a.amplitude) {
    opts.attack.amplitude = *a.amplitude;
  }
  const sim::SyntheticGenerator gen(opts);

  const auto seeds = sim::seed_range(a.seed, a.count);
  const auto [clean, poisoned] = sim::make_paired_batches(gen, seeds);

  const fs::path dir(a.out_dir);
  ensure_directory(dir);
  io::write_array(dir / "clean.npy", clean);
  io::write_array(dir / "poisoned.npy", poisoned);
  io::write_attack_manifest(dir / "attack.json", io::AttackManifest{opts, a.seed, a.count});

  out << "simulate: wrote " << a.count << " clean/poisoned pairs (" << sim::to_string(kind) << " attack, shape "
      << opts.shape.channels << "x" << opts.shape.height << "x" << opts.shape.width << ", amplitude "
      << opts.attack.amplitude << ") to " << dir.string() << "\n";
  return kOk;
}

// ---------------------------------------------------------------------------

struct FitArgs {
  std::string clean;
  std::string poisoned;
  std::string out_dir;
};

int cmd_fit(const FitArgs& a, std::ostream& out, std::ostream& err) {
  const LatentBatch clean = io::read_batch(a.clean);
  const LatentBatch poisoned = io::read_batch(a.poisoned);
  if (clean.item_shape() != poisoned.item_shape()) {
    throw ValidationError("fit: clean and poisoned batches have different item shapes");
  }
  const TriggerProfile profile = estimate_trigger(clean, poisoned);

  double peak = 0.0;
  for (float v : profile.activation_map().values()) {
    peak = std::max(peak, static_cast<double>(v));
  }
  if (peak == 0.0) {
    err << "warning: trigger latent is all zeros; clean and poisoned batches have identical means\n";
  }

  const json provenance = {{"tool", "sau"},
                           {"tool_version", kToolVersion},
                           {"clean_source", fs::path(a.clean).filename().string()},
                           {"poisoned_source", fs::path(a.poisoned).filename().string()},
                           {"clean_count", clean.count()},
                           {"poisoned_count", poisoned.count()}};
  io::write_profile(a.out_dir, profile, provenance);
  out << "fit: trigger profile from " << profile.sample_count() << " samples, peak activation "
      << std::setprecision(6) << peak << ", written to " << a.out_dir << "\n";
  return kOk;
}

// ---------------------------------------------------------------------------

struct PurifyArgs {
  std::string input;
  std::string clean_ref;
  std::string profile;
  std::string config;
  std::string out;
  std::string dump_masks;
};

SauConfig resolve_config(const std::string& explicit_path) {
  if (!explicit_path.empty()) {
    return io::read_config(explicit_path);
  }
  if (const char* env = std::getenv(kDefaultConfigEnv); env != nullptr && *env != '\0') {
    return io::read_config(env);
  }
  return SauConfig{};
}

int cmd_purify(const PurifyArgs& a, std::ostream& out) {
  const SauConfig config = resolve_config(a.config);
  const LatentBatch poisoned = io::read_batch(a.input);
  const LatentBatch clean = io::read_batch(a.clean_ref);
  const TriggerProfile profile = io::read_profile(a.profile);
  if (poisoned.count() != clean.count()) {
    throw ValidationError("purify: --input has " + std::to_string(poisoned.count()) + " items but --clean-ref has " +
                          std::to_string(clean.count()));
  }
  if (poisoned.item_shape() != profile.shape() || clean.item_shape() != profile.shape()) {
    throw ValidationError("purify: batch item shape does not match the trigger profile");
  }

  std::vector<LatentTensor> purified;
  std::vector<SpatialMap> similarity, primary_raw, secondary_raw, primary_smooth, secondary_smooth;
  const Shape& s = profile.shape();
  auto as_map = [&](const BinaryMask& m) {
    std::vector<float> v(m.values().begin(), m.values().end());
    return SpatialMap(s.height, s.width, std::move(v));
  };
  std::size_t masked_locations = 0;
  for (std::size_t i = 0; i < poisoned.count(); ++i) {
    PurifiedResult r = purify(poisoned[i], clean[i], profile, config);
    masked_locations += r.masks.primary_raw.count();
    if (!a.dump_masks.empty()) {
      similarity.push_back(r.masks.similarity);
      primary_raw.push_back(as_map(r.masks.primary_raw));
      secondary_raw.push_back(as_map(r.masks.secondary_raw));
      primary_smooth.push_back(r.masks.primary_smooth);
      secondary_smooth.push_back(r.masks.secondary_smooth);
    }
    purified.push_back(std::move(r.latent));
  }
  io::write_array(a.out, LatentBatch(std::move(purified)));

  if (!a.dump_masks.empty()) {
    const fs::path dir(a.dump_masks);
    ensure_directory(dir);
    io::write_array(dir / "activation_map.npy", profile.activation_map());
    io::write_array(dir / "similarity.npy", std::span<const SpatialMap>(similarity));
    io::write_array(dir / "primary_raw.npy", std::span<const SpatialMap>(primary_raw));
    io::write_array(dir / "secondary_raw.npy", std::span<const SpatialMap>(secondary_raw));
    io::write_array(dir / "primary_smooth.npy", std::span<const SpatialMap>(primary_smooth));
    io::write_array(dir / "secondary_smooth.npy", std::span<const SpatialMap>(secondary_smooth));
  }

  out << "purify: " << poisoned.count() << " latents purified (mean primary-mask area "
      << std::fixed << std::setprecision(1)
      << static_cast<double>(masked_locations) / static_cast<double>(poisoned.count()) << " locations), written to "
      << a.out << "\n";
  return kOk;
}

// ---------------------------------------------------------------------------

struct EvalArgs {
  std::string purified;
  std::string reference;
  std::string profile;
  std::string manifest;
  std::string report;
  std::optional<double> expect_accuracy;
  double k = 3.0;
  std::optional<double> peak;
};

int cmd_eval(const EvalArgs& a, std::ostream& out) {
  const LatentBatch purified = io::read_batch(a.purified);
  const LatentBatch reference = io::read_batch(a.reference);
  const TriggerProfile profile = io::read_profile(a.profile);
  const io::AttackManifest manifest = io::read_attack_manifest(a.manifest);
  if (purified.count() != reference.count()) {
    throw ValidationError("eval: --purified has " + std::to_string(purified.count()) +
                          " items but --reference has " + std::to_string(reference.count()));
  }
  const auto& attack = manifest.generator.attack;
  std::optional<Rect> region;
  if (attack.kind == sim::AttackKind::kPixel) {
    region = attack.patch;
  }
  const double peak = a.peak.value_or(max_abs_value(reference));
  if (!(peak > 0.0)) {
    throw ValidationError("eval: PSNR peak must be positive (reference batch is all zeros; pass --peak)");
  }

  EvalReport report = evaluate_batch(purified, reference, profile, region, a.k, peak);
  report.attack_kind = std::string(sim::to_string(attack.kind));
  const json metadata = {{"tool", "sau"}, {"tool_version", kToolVersion}, {"generated_at", utc_timestamp()}};
  io::write_report(a.report, report, metadata);

  out << "eval: " << report.items.size() << " items, removal accuracy " << std::fixed << std::setprecision(4)
      << report.removal_accuracy << ", mean PSNR " << std::setprecision(2) << report.mean_psnr_db
      << " dB, detector threshold " << std::setprecision(4) << report.detector.threshold << "\n";

  if (a.expect_accuracy && report.removal_accuracy < *a.expect_accuracy) {
    out << "eval: removal accuracy " << report.removal_accuracy << " below expected " << *a.expect_accuracy << "\n";
    return kAcceptanceFailed;
  }
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Spatial attention unlearning toolkit: simulate, fit, purify and evaluate backdoored latents"};
  app.name(args.empty() ? "sau" : fs::path(args.front()).filename().string());
  app.require_subcommand(1);

  SimulateArgs sim_args;
  auto* simulate = app.add_subcommand("simulate", "Generate paired clean/poisoned latent batches");
  simulate->add_option("--out", sim_args.out_dir, "Output directory")->required();
  simulate->add_option("--count", sim_args.count, "Number of prompt seeds")->required();
  simulate->add_option("--attack", sim_args.attack, "Attack kind: pixel or style")->required();
  simulate->add_option("--seed", sim_args.seed, "First seed; seeds run seed..seed+count-1")->required();
  simulate->add_option("--shape", sim_args.shape, "Latent shape C,H,W")->capture_default_str();
  simulate->add_option("--amplitude", sim_args.amplitude,
                       "Pixel patch strength (channel norm) or style mix strength in (0,1]");
  simulate->add_option("--noise-std", sim_args.noise_std, "Per-sample jitter std")->capture_default_str();
  simulate->add_option("--smoothness", sim_args.smoothness, "Base field blur sigma")->capture_default_str();
  simulate->add_option("--channel-bias", sim_args.channel_bias, "Channel offset span")->capture_default_str();
  simulate->add_option("--patch-origin", sim_args.patch_origin, "Patch origin row,col")->capture_default_str();
  simulate->add_option("--patch-size", sim_args.patch_size, "Patch size h,w")->capture_default_str();

  FitArgs fit_args;
  auto* fit = app.add_subcommand("fit", "Estimate a trigger profile from clean/poisoned batches");
  fit->add_option("--clean", fit_args.clean, "Clean batch (.npy)")->required();
  fit->add_option("--poisoned", fit_args.poisoned, "Poisoned batch (.npy)")->required();
  fit->add_option("--out", fit_args.out_dir, "Profile bundle directory")->required();

  PurifyArgs purify_args;
  auto* purify_cmd = app.add_subcommand("purify", "Purify poisoned latents against a trigger profile");
  purify_cmd->add_option("--input", purify_args.input, "Poisoned batch (.npy)")->required();
  purify_cmd->add_option("--clean-ref", purify_args.clean_ref, "Clean latents for the same prompts (.npy)")
      ->required();
  purify_cmd->add_option("--profile", purify_args.profile, "Profile bundle directory")->required();
  purify_cmd->add_option("--config", purify_args.config,
                         std::string("Config JSON (default: $") + kDefaultConfigEnv + ", then built-ins)");
  purify_cmd->add_option("--out", purify_args.out, "Output batch (.npy)")->required();
  purify_cmd->add_option("--dump-masks", purify_args.dump_masks, "Directory for similarity/mask arrays");

  EvalArgs eval_args;
  auto* eval = app.add_subcommand("eval", "Score purified latents and write a report");
  eval->add_option("--purified", eval_args.purified, "Purified batch (.npy)")->required();
  eval->add_option("--reference", eval_args.reference, "Clean reference batch (.npy)")->required();
  eval->add_option("--profile", eval_args.profile, "Profile bundle directory")->required();
  eval->add_option("--attack-manifest", eval_args.manifest, "attack.json written by simulate")->required();
  eval->add_option("--report", eval_args.report, "Report path (.json)")->required();
  eval->add_option("--expect-accuracy", eval_args.expect_accuracy, "Exit 3 when removal accuracy is lower");
  eval->add_option("--k", eval_args.k, "Detector std multiplier")->capture_default_str();
  eval->add_option("--peak", eval_args.peak, "PSNR peak (default: max |reference|)");

  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  if (args.empty()) {
    argv.push_back("sau");
  }
  for (const auto& a : args) {
    argv.push_back(a.c_str());
  }

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kValidationError;
  }

  try {
    if (*simulate) {
      return cmd_simulate(sim_args, out);
    }
    if (*fit) {
      return cmd_fit(fit_args, out, err);
    }
    if (*purify_cmd) {
      return cmd_purify(purify_args, out);
    }
    if (*eval) {
      return cmd_eval(eval_args, out);
    }
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kValidationError;
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kIoError;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kIoError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kValidationError;
  }
  return kValidationError;
}

}  // namespace sau::cli
