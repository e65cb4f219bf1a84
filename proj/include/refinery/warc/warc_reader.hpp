#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>

namespace refinery::util {
class InputFile;
}

namespace refinery::warc {

class WarcFormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct WarcRecord {
    std::string version;  // "WARC/1.0" or "WARC/1.1"
    // Header names are lowercased; values are trimmed.
    std::map<std::string, std::string> headers;
    std::string body;

    std::string header(const std::string& lower_name) const;
    std::string warc_type() const { return header("warc-type"); }
    std::string target_uri() const;
    std::string warc_date() const { return header("warc-date"); }
    std::string record_id() const { return header("warc-record-id"); }
    bool is_response() const { return warc_type() == "response"; }
};

// A record that could not be parsed. The reader resynchronises on the next
// "WARC/1." line and continues.
struct WarcError {
    std::size_t offset = 0;  // uncompressed byte offset of the bad record
    std::string message;
};

// Streams records from a WARC 1.0/1.1 file, plain or gzip (per-record members
// are read as one stream). A file that does not begin with a WARC version
// line throws WarcFormatError from the first next().
class WarcReader {
public:
    using Item = std::variant<WarcRecord, WarcError>;

    explicit WarcReader(const std::filesystem::path& path);
    // Reads from an in-memory archive (already decompressed).
    static WarcReader from_bytes(std::string bytes);
    ~WarcReader();
    WarcReader(WarcReader&&) noexcept;

    std::optional<Item> next();

private:
    WarcReader() = default;

    bool fill();  // appends more input to buf_; false at end of input
    bool ensure(std::size_t n);  // at least n unread bytes, unless input ends
    std::optional<std::string> read_line();
    void compact();
    // Moves pos_ to the start of the next line beginning with "WARC/1." at or
    // after `from`; to end of input if none.
    void resync(std::size_t from);

    std::unique_ptr<util::InputFile> in_;
    std::string buf_;
    std::size_t pos_ = 0;
    std::size_t consumed_ = 0;  // bytes dropped from the front of buf_
    bool eof_ = false;
    bool started_ = false;
};

// The HTTP message carried by a response record.
struct HttpResponse {
    int status = 0;
    std::map<std::string, std::string> headers;  // lowercased names
    std::string payload;                         // chunked encoding removed

    std::string header(const std::string& lower_name) const;
};

// Parses an HTTP/1.x response message; nullopt if the status line is absent.
std::optional<HttpResponse> parse_http_response(std::string_view message);

// Removes chunked transfer coding. Malformed input returns what was decoded
// before the error.
std::string decode_chunked(std::string_view body);

}  // namespace refinery::warc
