#include "manifest.hpp"

#include <openssl/evp.h>

#include <array>
#include <fstream>
#include <memory>
#include <stdexcept>

#include "cli.hpp"
#include "sensikit/kernels.hpp"

namespace sensikit::cli {

std::string sha256_hex(std::string_view bytes) {
  const std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), digest.data(), &len) != 1) {
    throw std::runtime_error("SHA-256 digest failed");
  }
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xf];
  }
  return out;
}

RunManifest::RunManifest(std::string command, nlohmann::json resolved_config, std::uint64_t master_seed)
    : command_(std::move(command)), config_(std::move(resolved_config)), master_seed_(master_seed) {}

void RunManifest::write_output(const std::filesystem::path& dir, const std::string& name, const std::string& bytes) {
  const auto path = dir / name;
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("failed writing " + path.string());
  outputs_.push_back({{"file", name}, {"bytes", bytes.size()}, {"sha256", sha256_hex(bytes)}});
}

void RunManifest::add_timing(const std::string& step, double seconds) {
  timings_[step] = seconds;
}

void RunManifest::set(const std::string& key, nlohmann::json value) {
  extra_[key] = std::move(value);
}

nlohmann::json RunManifest::to_json() const {
  nlohmann::json j;
  j["tool"] = kToolName;
  j["version"] = kToolVersion;
  j["command"] = command_;
  j["master_seed"] = master_seed_;
  j["simd"] = std::string(kernels::to_string(kernels::active_isa()));
  j["config"] = config_;
  j["timings_seconds"] = timings_;
  j["outputs"] = outputs_;
  for (const auto& [key, value] : extra_.items()) j[key] = value;
  return j;
}

void RunManifest::save(const std::filesystem::path& dir) const {
  std::ofstream out(dir / "manifest.json", std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write manifest.json in " + dir.string());
  out << to_json().dump(2) << '\n';
}

}  // namespace sensikit::cli
