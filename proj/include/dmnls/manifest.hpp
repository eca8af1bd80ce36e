#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace dmnls {

inline constexpr const char* kArtifactVersion = "0.1.0";

/// Everything needed to reproduce an output file: the full normalized
/// config, the seed, and the paths the run produced. Round-trips losslessly
/// through JSON.
struct RunManifest {
  std::string artifact_version = kArtifactVersion;
  std::string subcommand;
  std::string timestamp_utc;  // informational; not part of determinism claims
  std::uint64_t seed = 0;
  std::string config_text;  // canonical config rendering
  std::string config_hash;
  std::vector<std::string> outputs;
};

bool operator==(const RunManifest& a, const RunManifest& b);

std::string to_json_text(const RunManifest& m);
RunManifest manifest_from_json_text(const std::string& text);

void save_manifest(const RunManifest& m, const std::string& path);
RunManifest load_manifest(const std::string& path);

std::string utc_timestamp_now();

}  // namespace dmnls
