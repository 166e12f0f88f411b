#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace imply {

inline constexpr std::string_view kToolVersion = "1.0.0";

std::string sha256_hex(std::string_view bytes);
/// Throws ConfigError when the file cannot be read.
std::string sha256_file(const std::string& path);

struct OutputDigest {
  std::string file;  // relative to the output directory
  std::string sha256;
};

struct RunManifest {
  std::string tool_version{kToolVersion};
  std::string command;
  std::vector<std::string> arguments;  // command options, excluding --out and config files
  std::string config;                  // resolved config snapshot
  std::uint64_t seed = 0;
  std::vector<OutputDigest> outputs;

  std::string to_json() const;
  static RunManifest from_json(std::string_view text);
};

/// Writes `content` to dir/name and records its digest in the manifest.
void write_output(const std::string& dir, const std::string& name, std::string_view content, RunManifest& manifest);

}  // namespace imply
