#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

namespace refinery::dedup {

inline constexpr std::size_t kDefaultNumPerm = 128;
inline constexpr std::size_t kDefaultShingleSize = 5;
inline constexpr std::uint64_t kDefaultSeed = 1;
inline constexpr std::uint64_t kEmptySlot = std::numeric_limits<std::uint64_t>::max();

// Distinct word n-grams of the lowercased text, joined by single spaces and
// sorted. Fewer than n words gives one shingle of all the words; no words
// gives an empty set.
std::vector<std::string> shingle(std::string_view text, std::size_t n = kDefaultShingleSize);

struct MinHashSignature {
    std::vector<std::uint64_t> values;

    std::size_t num_perm() const noexcept { return values.size(); }
    bool operator==(const MinHashSignature&) const = default;
};

// h_i(x) = (a_i * (H(x) mod p) + b_i) mod p with p = 2^61 - 1, H the stable
// 64-bit string hash and (a_i, b_i) drawn from mt19937_64(seed).
class MinHasher {
public:
    explicit MinHasher(std::size_t num_perm = kDefaultNumPerm, std::uint64_t seed = kDefaultSeed);

    std::size_t num_perm() const noexcept { return a_.size(); }
    std::uint64_t seed() const noexcept { return seed_; }

    MinHashSignature signature(const std::vector<std::string>& shingles) const;
    MinHashSignature signature_of_text(std::string_view text, std::size_t n = kDefaultShingleSize) const;

private:
    std::uint64_t seed_;
    std::vector<std::uint64_t> a_;
    std::vector<std::uint64_t> b_;
};

// Fraction of positions where the two signatures agree. Throws
// std::invalid_argument on a num_perm mismatch.
double estimate_jaccard(const MinHashSignature& a, const MinHashSignature& b);

// Exact Jaccard of two sorted, duplicate-free sets; two empty sets give 1.
double exact_jaccard(const std::vector<std::string>& a, const std::vector<std::string>& b);

}  // namespace refinery::dedup
