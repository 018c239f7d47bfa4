#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <Eigen/Core>
#include <openssl/evp.h>

#include "vvkrr/cli/commands.hpp"

#ifndef VVKRR_VERSION_STRING
#define VVKRR_VERSION_STRING "unknown"
#endif

namespace vvkrr::cli {
namespace {

void write_file(const std::filesystem::path& path, std::string_view body) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out.write(body.data(), static_cast<std::streamsize>(body.size()));
  out.close();
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

std::string compiler_id() {
#if defined(__clang__)
  return "clang " __clang_version__;
#elif defined(__GNUC__)
  return "gcc " __VERSION__;
#else
  return "unknown";
#endif
}

}  // namespace

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
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

void write_artifacts(const std::string& dir, std::string_view command, const ExperimentConfig& config, bool pass,
                     const std::map<std::string, std::string>& files) {
  const std::filesystem::path root(dir);
  std::error_code ec;
  std::filesystem::create_directories(root, ec);
  if (ec) throw std::runtime_error("cannot create output directory " + root.string() + ": " + ec.message());

  const std::string config_text = echo_config(config);
  std::ostringstream manifest;
  manifest << "format = vvkrr-manifest 1\n";
  manifest << "command = " << command << '\n';
  manifest << "config_id = " << config.config_id << '\n';
  manifest << "master_seed = " << config.master_seed << '\n';
  manifest << "result = " << (pass ? "pass" : "fail") << '\n';
  manifest << "reproduce = vvkrr " << command << " --config config.txt\n";
  manifest << "[versions]\n";
  manifest << "vvkrr = " << VVKRR_VERSION_STRING << '\n';
  manifest << "eigen = " << EIGEN_WORLD_VERSION << '.' << EIGEN_MAJOR_VERSION << '.' << EIGEN_MINOR_VERSION << '\n';
  manifest << "compiler = " << compiler_id() << '\n';
  manifest << "[sha256]\n";
  manifest << "config.txt = " << sha256_hex(config_text) << '\n';
  for (const auto& [name, body] : files) manifest << name << " = " << sha256_hex(body) << '\n';

  for (const auto& [name, body] : files) write_file(root / name, body);
  write_file(root / "config.txt", config_text);
  write_file(root / "manifest.txt", manifest.str());
}

}  // namespace vvkrr::cli
