#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace refinery::util {

// Lowercase hex SHA-256.
std::string sha256_hex(std::string_view bytes);

// SHA-256 of a file's raw bytes (no decompression). Returns "" if the file is
// missing.
std::string file_sha256(const std::filesystem::path& path);

// 64-bit FNV-1a followed by a splitmix64 finaliser. Platform independent;
// used wherever a stable non-cryptographic string hash is needed.
std::uint64_t stable_hash64(std::string_view bytes) noexcept;

constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace refinery::util
