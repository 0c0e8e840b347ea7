#include "bodykit/util.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace bodykit {

std::uint64_t fnv1a(const void* data, std::size_t n, std::uint64_t seed) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = seed;
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

std::uint64_t fnv1a_file(const std::filesystem::path& path) {
  const std::vector<char> bytes = read_binary(path);
  return fnv1a(bytes.data(), bytes.size());
}

std::string hex64(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(value));
  return std::string(buf);
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), "cannot open for write: " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  require(out.good(), "write failed: " + path.string());
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), "cannot open: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_binary(const std::filesystem::path& path, const void* data, std::size_t bytes) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), "cannot open for write: " + path.string());
  out.write(static_cast<const char*>(data), static_cast<std::streamsize>(bytes));
  require(out.good(), "write failed: " + path.string());
}

std::vector<char> read_binary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary | std::ios::ate);
  require(in.good(), "cannot open: " + path.string());
  const auto size = in.tellg();
  in.seekg(0);
  std::vector<char> bytes(static_cast<std::size_t>(size));
  if (size > 0) in.read(bytes.data(), size);
  require(in.good(), "read failed: " + path.string());
  return bytes;
}

}  // namespace bodykit
