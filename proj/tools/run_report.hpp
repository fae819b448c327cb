#pragma once

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace stereoscope::cli {

// Schema-stable record of one CLI invocation. Inputs carry content hashes;
// the on-disk copy omits the runtime-environment fields (wall_time_s,
// worker_count) so reruns with any worker count stay byte-identical.
struct RunReport {
  std::string command;
  std::string version;
  std::vector<std::pair<std::string, std::string>> inputs;  // path, sha256
  std::vector<std::string> outputs;
  nlohmann::json payload = nlohmann::json::object();
  double wall_time_s = 0.0;
  int worker_count = 1;
  std::string error;  // empty on success

  nlohmann::json to_json(bool include_runtime_fields) const;
};

std::string sha256_hex(const void* data, size_t size);
std::string sha256_file(const std::filesystem::path& path);
// Digest of a directory: sha256 over "name:sha256(file)\n" lines in sorted
// order, so any content or naming change shows up.
std::string sha256_dir(const std::filesystem::path& dir);

}  // namespace stereoscope::cli
