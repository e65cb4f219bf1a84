#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "refinery/corpus/document.hpp"

namespace refinery::util {
class InputFile;
class AtomicWriter;
}  // namespace refinery::util

namespace refinery::corpus {

class RecordFormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A line that could not be decoded. The reader continues past it.
struct RecordError {
    std::size_t line = 0;  // 1-based
    std::string message;
};

nlohmann::ordered_json to_json(const Document& doc);
Document document_from_json(const nlohmann::ordered_json& j);  // throws RecordFormatError
std::string to_json_line(const Document& doc);

// Streams newline-delimited JSON records (plain or gzip). Blank lines are
// skipped. An unreadable file throws util::IoError from the constructor.
class RecordReader {
public:
    using Item = std::variant<Document, RecordError>;

    explicit RecordReader(const std::filesystem::path& path);
    ~RecordReader();
    RecordReader(RecordReader&&) noexcept;

    std::optional<Item> next();

private:
    std::unique_ptr<util::InputFile> in_;
    std::size_t line_ = 0;
};

struct ReadResult {
    std::vector<Document> documents;
    std::vector<RecordError> errors;
};

ReadResult read_records(const std::filesystem::path& path);

// Writes records atomically: output lands in `<path>.partial` and is renamed
// on commit(). A writer destroyed before commit() removes the partial file.
class RecordWriter {
public:
    explicit RecordWriter(const std::filesystem::path& path);
    ~RecordWriter();

    void write(const Document& doc);
    std::size_t commit();
    std::size_t count() const noexcept { return count_; }

private:
    std::unique_ptr<util::AtomicWriter> out_;
    std::size_t count_ = 0;
};

std::size_t write_records(const std::vector<Document>& docs, const std::filesystem::path& path);

}  // namespace refinery::corpus
