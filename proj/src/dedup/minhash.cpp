#include "refinery/dedup/minhash.hpp"

#include <algorithm>
#include <stdexcept>

#include "refinery/text/lexical.hpp"
#include "refinery/util/digest.hpp"
#include "refinery/util/random.hpp"

namespace refinery::dedup {
namespace {

constexpr std::uint64_t kPrime = (std::uint64_t{1} << 61) - 1;

std::uint64_t mod_prime(unsigned __int128 v) {
    // v < 2^122, so two folds bring it below 2p.
    std::uint64_t lo = static_cast<std::uint64_t>(v & kPrime);
    std::uint64_t hi = static_cast<std::uint64_t>(v >> 61);
    std::uint64_t r = (lo & kPrime) + (hi & kPrime) + (hi >> 61);
    r = (r & kPrime) + (r >> 61);
    return r >= kPrime ? r - kPrime : r;
}

}  // namespace

std::vector<std::string> shingle(std::string_view text, std::size_t n) {
    if (n == 0) throw std::invalid_argument("shingle size must be positive");
    std::string lowered = text::to_lower(text);
    auto words = text::split_words(lowered);
    std::vector<std::string> out;
    if (words.empty()) return out;
    auto join = [&](std::size_t from, std::size_t count) {
        std::string s(words[from]);
        for (std::size_t k = 1; k < count; ++k) {
            s += ' ';
            s += words[from + k];
        }
        return s;
    };
    if (words.size() < n) {
        out.push_back(join(0, words.size()));
        return out;
    }
    out.reserve(words.size() - n + 1);
    for (std::size_t i = 0; i + n <= words.size(); ++i) out.push_back(join(i, n));
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

MinHasher::MinHasher(std::size_t num_perm, std::uint64_t seed) : seed_(seed) {
    if (num_perm == 0) throw std::invalid_argument("num_perm must be positive");
    util::Rng rng(seed);
    a_.reserve(num_perm);
    b_.reserve(num_perm);
    for (std::size_t i = 0; i < num_perm; ++i) {
        a_.push_back(1 + rng.next() % (kPrime - 1));
        b_.push_back(rng.next() % kPrime);
    }
}

MinHashSignature MinHasher::signature(const std::vector<std::string>& shingles) const {
    MinHashSignature sig;
    sig.values.assign(a_.size(), kEmptySlot);
    for (const auto& s : shingles) {
        std::uint64_t x = util::stable_hash64(s) % kPrime;
        for (std::size_t i = 0; i < a_.size(); ++i) {
            std::uint64_t h = mod_prime(static_cast<unsigned __int128>(a_[i]) * x + b_[i]);
            if (h < sig.values[i]) sig.values[i] = h;
        }
    }
    return sig;
}

MinHashSignature MinHasher::signature_of_text(std::string_view text, std::size_t n) const {
    return signature(shingle(text, n));
}

double estimate_jaccard(const MinHashSignature& a, const MinHashSignature& b) {
    if (a.num_perm() != b.num_perm()) throw std::invalid_argument("signatures differ in num_perm");
    if (a.num_perm() == 0) return 0.0;
    std::size_t same = 0;
    for (std::size_t i = 0; i < a.values.size(); ++i) same += a.values[i] == b.values[i];
    return static_cast<double>(same) / static_cast<double>(a.num_perm());
}

double exact_jaccard(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    if (a.empty() && b.empty()) return 1.0;
    std::size_t i = 0, j = 0, both = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] < b[j]) {
            ++i;
        } else if (b[j] < a[i]) {
            ++j;
        } else {
            ++both;
            ++i;
            ++j;
        }
    }
    return static_cast<double>(both) / static_cast<double>(a.size() + b.size() - both);
}

}  // namespace refinery::dedup
