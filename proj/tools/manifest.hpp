#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace sensikit::cli {

std::string sha256_hex(std::string_view bytes);

/// Run record written next to the outputs: tool version, resolved config,
/// seed, timings and a SHA-256 digest of every output file.
class RunManifest {
 public:
  RunManifest(std::string command, nlohmann::json resolved_config, std::uint64_t master_seed);

  /// Writes `bytes` to dir/name and records its digest.
  void write_output(const std::filesystem::path& dir, const std::string& name, const std::string& bytes);

  void add_timing(const std::string& step, double seconds);
  void set(const std::string& key, nlohmann::json value);

  nlohmann::json to_json() const;
  void save(const std::filesystem::path& dir) const;

 private:
  std::string command_;
  nlohmann::json config_;
  std::uint64_t master_seed_;
  nlohmann::json timings_ = nlohmann::json::object();
  nlohmann::json outputs_ = nlohmann::json::array();
  nlohmann::json extra_ = nlohmann::json::object();
};

}  // namespace sensikit::cli
