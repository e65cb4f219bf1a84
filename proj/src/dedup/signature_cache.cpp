#include "refinery/dedup/signature_cache.hpp"

#include <cstring>

#include "refinery/util/io.hpp"

namespace refinery::dedup {
namespace {

template <typename T>
void put_le(std::string& out, T v) {
    for (std::size_t i = 0; i < sizeof(T); ++i) out += static_cast<char>((v >> (8 * i)) & 0xFF);
}

class Cursor {
public:
    explicit Cursor(const std::string& bytes) : bytes_(bytes) {}

    template <typename T>
    T take_le() {
        need(sizeof(T));
        T v = 0;
        for (std::size_t i = 0; i < sizeof(T); ++i)
            v |= static_cast<T>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
        pos_ += sizeof(T);
        return v;
    }
    std::string take(std::size_t n) {
        need(n);
        std::string s = bytes_.substr(pos_, n);
        pos_ += n;
        return s;
    }
    bool done() const { return pos_ == bytes_.size(); }

private:
    void need(std::size_t n) const {
        if (bytes_.size() - pos_ < n) throw CacheFormatError("signature cache is truncated");
    }
    const std::string& bytes_;
    std::size_t pos_ = 0;
};

}  // namespace

SignatureCache SignatureCache::read(const std::filesystem::path& path) {
    std::string bytes = util::read_file(path);
    Cursor in(bytes);
    if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0)
        throw CacheFormatError(path.string() + ": not a signature cache");
    in.take(4);
    SignatureCache cache;
    auto version = in.take_le<std::uint32_t>();
    if (version != kVersion)
        throw CacheFormatError(path.string() + ": unsupported cache version " + std::to_string(version));
    cache.num_perm = in.take_le<std::uint32_t>();
    cache.seed = in.take_le<std::uint64_t>();
    while (!in.done()) {
        auto id_len = in.take_le<std::uint32_t>();
        std::string id = in.take(id_len);
        MinHashSignature sig;
        sig.values.reserve(cache.num_perm);
        for (std::uint32_t i = 0; i < cache.num_perm; ++i) sig.values.push_back(in.take_le<std::uint64_t>());
        cache.entries.emplace_back(std::move(id), std::move(sig));
    }
    return cache;
}

void SignatureCache::write(const std::filesystem::path& path) const {
    std::string out(kMagic, 4);
    put_le(out, kVersion);
    put_le(out, num_perm);
    put_le(out, seed);
    for (const auto& [id, sig] : entries) {
        if (sig.num_perm() != num_perm) throw std::invalid_argument("signature of " + id + " has the wrong length");
        put_le(out, static_cast<std::uint32_t>(id.size()));
        out += id;
        for (auto v : sig.values) put_le(out, v);
    }
    util::write_file_atomic(path, out);
}

std::unordered_map<std::string, MinHashSignature> SignatureCache::by_id() const {
    std::unordered_map<std::string, MinHashSignature> map;
    for (const auto& [id, sig] : entries) map[id] = sig;
    return map;
}

std::optional<SignatureCache> load_matching_cache(const std::filesystem::path& path, std::uint32_t num_perm,
                                                  std::uint64_t seed) {
    std::error_code ec;
    if (!std::filesystem::exists(path, ec)) return std::nullopt;
    auto cache = SignatureCache::read(path);
    if (cache.num_perm != num_perm || cache.seed != seed) return std::nullopt;
    return cache;
}

}  // namespace refinery::dedup
