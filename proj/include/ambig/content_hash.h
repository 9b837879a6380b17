#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace ambig {

// 128-bit content key: the first 16 bytes of SHA-256. At 48M lines the
// birthday-bound collision probability is about 2^-75.
struct Hash128 {
  std::uint64_t hi = 0;
  std::uint64_t lo = 0;

  bool operator==(const Hash128&) const = default;
};

struct Hash128Hasher {
  std::size_t operator()(const Hash128& h) const noexcept { return static_cast<std::size_t>(h.lo); }
};

// Hash of a (src, tgt) pair. Length-prefixed so ("ab","c") != ("a","bc").
Hash128 pair_hash(std::string_view src, std::string_view tgt);

std::string sha256_hex(std::string_view data);
std::string sha256_file_hex(const std::filesystem::path& path);

}  // namespace ambig
