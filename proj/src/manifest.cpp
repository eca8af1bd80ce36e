#include "dmnls/manifest.hpp"

#include <ctime>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace dmnls {

bool operator==(const RunManifest& a, const RunManifest& b) {
  return a.artifact_version == b.artifact_version && a.subcommand == b.subcommand &&
         a.timestamp_utc == b.timestamp_utc && a.seed == b.seed && a.config_text == b.config_text &&
         a.config_hash == b.config_hash && a.outputs == b.outputs;
}

std::string to_json_text(const RunManifest& m) {
  nlohmann::ordered_json j;
  j["artifact_version"] = m.artifact_version;
  j["subcommand"] = m.subcommand;
  j["timestamp_utc"] = m.timestamp_utc;
  j["seed"] = m.seed;
  j["config_text"] = m.config_text;
  j["config_hash"] = m.config_hash;
  j["outputs"] = m.outputs;
  return j.dump(2) + "\n";
}

RunManifest manifest_from_json_text(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  RunManifest m;
  m.artifact_version = j.at("artifact_version").get<std::string>();
  m.subcommand = j.at("subcommand").get<std::string>();
  m.timestamp_utc = j.at("timestamp_utc").get<std::string>();
  m.seed = j.at("seed").get<std::uint64_t>();
  m.config_text = j.at("config_text").get<std::string>();
  m.config_hash = j.at("config_hash").get<std::string>();
  m.outputs = j.at("outputs").get<std::vector<std::string>>();
  return m;
}

void save_manifest(const RunManifest& m, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  const std::string payload = to_json_text(m);
  out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
  if (!out) throw std::runtime_error("write failed: " + path);
}

RunManifest load_manifest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return manifest_from_json_text(buf.str());
}

std::string utc_timestamp_now() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace dmnls
