#pragma once

#include <charconv>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace egonet::io {

// Shortest round-trip decimal representation; keeps serialized artifacts
// byte-stable across runs.
inline std::string fmt_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

std::vector<std::string_view> split_fields(std::string_view line);

std::string read_file(const std::string& path);

// FNV-1a over file bytes; used to fingerprint inputs in artifact sidecars.
std::uint64_t fnv1a_file(const std::string& path);

}  // namespace egonet::io
