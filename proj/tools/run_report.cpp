#include "run_report.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <fstream>

#include "stereoscope/error.hpp"

namespace stereoscope::cli {

namespace fs = std::filesystem;

nlohmann::json RunReport::to_json(bool include_runtime_fields) const {
  nlohmann::json in = nlohmann::json::array();
  for (const auto& [path, hash] : inputs) in.push_back({{"path", path}, {"sha256", hash}});
  nlohmann::json j{{"command", command}, {"version", version}, {"inputs", in},
                   {"outputs", outputs}, {"payload", payload},
                   {"error", error.empty() ? nlohmann::json() : nlohmann::json(error)}};
  if (include_runtime_fields) {
    j["wall_time_s"] = wall_time_s;
    j["worker_count"] = worker_count;
  }
  return j;
}

std::string sha256_hex(const void* data, size_t size) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data, size, md, &len, EVP_sha256(), nullptr) != 1)
    throw Error(ErrorKind::Io, "sha256 failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[md[i] >> 4]);
    out.push_back(hex[md[i] & 0xf]);
  }
  return out;
}

std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot hash: " + path.string());
  std::string bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  return sha256_hex(bytes.data(), bytes.size());
}

std::string sha256_dir(const fs::path& dir) {
  std::vector<std::string> entries;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    entries.push_back(entry.path().filename().string() + ":" + sha256_file(entry.path()));
  }
  std::sort(entries.begin(), entries.end());
  std::string combined;
  for (const std::string& e : entries) {
    combined += e;
    combined += '\n';
  }
  return sha256_hex(combined.data(), combined.size());
}

}  // namespace stereoscope::cli
