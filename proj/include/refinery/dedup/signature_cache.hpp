#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "refinery/dedup/minhash.hpp"

namespace refinery::dedup {

class CacheFormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Binary, little-endian:
//   "RFMH" | u32 version | u32 num_perm | u64 seed
//   then per document: u32 id_len | id bytes | num_perm x u64
struct SignatureCache {
    static constexpr char kMagic[4] = {'R', 'F', 'M', 'H'};
    static constexpr std::uint32_t kVersion = 1;

    std::uint32_t num_perm = 0;
    std::uint64_t seed = 0;
    std::vector<std::pair<std::string, MinHashSignature>> entries;

    // Throws CacheFormatError on a bad magic, version or truncated body.
    static SignatureCache read(const std::filesystem::path& path);
    void write(const std::filesystem::path& path) const;

    // Entries keyed by id; the last entry wins for a repeated id.
    std::unordered_map<std::string, MinHashSignature> by_id() const;
};

// The cache at `path` if it exists and matches (num_perm, seed); nullopt if
// it is missing or was built with other parameters.
std::optional<SignatureCache> load_matching_cache(const std::filesystem::path& path, std::uint32_t num_perm,
                                                  std::uint64_t seed);

}  // namespace refinery::dedup
