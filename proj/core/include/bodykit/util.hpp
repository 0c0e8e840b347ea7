#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace bodykit {

// Raised for contract violations (bad shapes, bad files, out-of-range
// inputs). The CLI maps it to a one-line error and a nonzero exit.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

[[noreturn]] inline void fail(const std::string& what) { throw Error(what); }

inline void require(bool cond, const std::string& what) {
  if (!cond) fail(what);
}

// FNV-1a over raw bytes; used for content hashes of templates,
// registries, encoders and checkpoints.
std::uint64_t fnv1a(const void* data, std::size_t n, std::uint64_t seed = 0xcbf29ce484222325ull);
std::uint64_t fnv1a_file(const std::filesystem::path& path);
std::string hex64(std::uint64_t value);

void write_file(const std::filesystem::path& path, const std::string& text);
std::string read_file(const std::filesystem::path& path);

void write_binary(const std::filesystem::path& path, const void* data, std::size_t bytes);
std::vector<char> read_binary(const std::filesystem::path& path);

}  // namespace bodykit
