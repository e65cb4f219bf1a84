#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace refinery::util {

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Sequential byte source over a plain or gzip-compressed file. Compression is
// detected from the magic bytes; concatenated gzip members (per-record gzip,
// as used by WARC) are read as one stream.
class InputFile {
public:
    explicit InputFile(const std::filesystem::path& path);
    ~InputFile();
    InputFile(InputFile&&) noexcept;
    InputFile& operator=(InputFile&&) noexcept;
    InputFile(const InputFile&) = delete;
    InputFile& operator=(const InputFile&) = delete;

    // Reads up to `max` bytes; returns 0 at end of stream.
    std::size_t read(char* dst, std::size_t max);

    // Reads one line without its terminating '\n'. Returns nullopt at EOF.
    std::optional<std::string> read_line();

    bool compressed() const noexcept { return compressed_; }

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    bool compressed_ = false;
};

// Writes to `<path>.partial` and renames onto `path` on commit(). If the
// writer is destroyed without commit(), the partial file is removed. Paths
// ending in ".gz" are gzip-compressed.
class AtomicWriter {
public:
    explicit AtomicWriter(std::filesystem::path path);
    ~AtomicWriter();
    AtomicWriter(const AtomicWriter&) = delete;
    AtomicWriter& operator=(const AtomicWriter&) = delete;

    void write(std::string_view bytes);
    void commit();

    const std::filesystem::path& partial_path() const noexcept { return partial_; }

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    std::filesystem::path path_;
    std::filesystem::path partial_;
    bool committed_ = false;
};

std::string read_file(const std::filesystem::path& path);
void write_file_atomic(const std::filesystem::path& path, std::string_view bytes);

}  // namespace refinery::util
