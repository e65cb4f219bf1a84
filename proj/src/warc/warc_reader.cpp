#include "refinery/warc/warc_reader.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>

#include "refinery/util/io.hpp"

namespace refinery::warc {
namespace {

std::string lower(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

bool parse_size(std::string_view s, std::size_t& out) {
    s = trim(s);
    if (s.empty()) return false;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && p == s.data() + s.size();
}

// Splits "Name: value" header lines into a lowercased map. Continuation
// lines (leading whitespace) are appended to the previous value.
void add_header(std::map<std::string, std::string>& headers, std::string& last, std::string_view line) {
    if (!line.empty() && (line.front() == ' ' || line.front() == '\t') && !last.empty()) {
        headers[last] += " " + std::string(trim(line));
        return;
    }
    auto colon = line.find(':');
    if (colon == std::string_view::npos) return;
    last = lower(trim(line.substr(0, colon)));
    headers[last] = std::string(trim(line.substr(colon + 1)));
}

constexpr std::string_view kMagic = "WARC/1.";

}  // namespace

std::string WarcRecord::header(const std::string& lower_name) const {
    auto it = headers.find(lower_name);
    return it == headers.end() ? std::string() : it->second;
}

std::string WarcRecord::target_uri() const {
    std::string uri = header("warc-target-uri");
    // WARC 1.0 writers sometimes wrap the URI in angle brackets.
    if (uri.size() >= 2 && uri.front() == '<' && uri.back() == '>') uri = uri.substr(1, uri.size() - 2);
    return uri;
}

WarcReader::WarcReader(const std::filesystem::path& path) : in_(std::make_unique<util::InputFile>(path)) {}

WarcReader WarcReader::from_bytes(std::string bytes) {
    WarcReader r;
    r.buf_ = std::move(bytes);
    r.eof_ = true;
    return r;
}

WarcReader::~WarcReader() = default;
WarcReader::WarcReader(WarcReader&&) noexcept = default;

bool WarcReader::fill() {
    if (eof_ || !in_) {
        eof_ = true;
        return false;
    }
    char chunk[1 << 16];
    std::size_t n = in_->read(chunk, sizeof chunk);
    if (n == 0) {
        eof_ = true;
        return false;
    }
    buf_.append(chunk, n);
    return true;
}

bool WarcReader::ensure(std::size_t n) {
    while (buf_.size() - pos_ < n) {
        if (!fill()) return false;
    }
    return true;
}

std::optional<std::string> WarcReader::read_line() {
    std::size_t scan = pos_;
    while (true) {
        auto nl = buf_.find('\n', scan);
        if (nl != std::string::npos) {
            std::string line = buf_.substr(pos_, nl - pos_);
            if (!line.empty() && line.back() == '\r') line.pop_back();
            pos_ = nl + 1;
            return line;
        }
        scan = buf_.size();
        if (!fill()) {
            if (pos_ == buf_.size()) return std::nullopt;
            std::string line = buf_.substr(pos_);
            pos_ = buf_.size();
            return line;
        }
    }
}

void WarcReader::compact() {
    if (pos_ > (1u << 20)) {
        buf_.erase(0, pos_);
        consumed_ += pos_;
        pos_ = 0;
    }
}

void WarcReader::resync(std::size_t from) {
    std::size_t scan = from;
    while (true) {
        auto hit = buf_.find(kMagic, scan);
        while (hit != std::string::npos && hit != 0 && buf_[hit - 1] != '\n') hit = buf_.find(kMagic, hit + 1);
        if (hit != std::string::npos) {
            pos_ = hit;
            return;
        }
        scan = buf_.size() >= kMagic.size() ? buf_.size() - kMagic.size() + 1 : 0;
        scan = std::max(scan, from);
        if (!fill()) {
            pos_ = buf_.size();
            return;
        }
    }
}

std::optional<WarcReader::Item> WarcReader::next() {
    compact();
    // Skip blank lines between records.
    while (true) {
        if (!ensure(1)) return std::nullopt;
        char c = buf_[pos_];
        if (c == '\r' || c == '\n') {
            ++pos_;
            continue;
        }
        break;
    }
    const std::size_t record_start = pos_;
    const std::size_t offset = consumed_ + record_start;
    auto version = read_line();
    if (!version) return std::nullopt;
    if (version->rfind(kMagic, 0) != 0) {
        if (!started_) throw WarcFormatError("not a WARC file: missing version line");
        resync(record_start + 1);
        return WarcError{offset, "expected WARC version line"};
    }
    started_ = true;

    WarcRecord rec;
    rec.version = *version;
    std::string last;
    while (true) {
        auto line = read_line();
        if (!line) return WarcError{offset, "truncated record header"};
        if (line->empty()) break;
        add_header(rec.headers, last, *line);
    }
    std::size_t length = 0;
    if (!parse_size(rec.header("content-length"), length)) {
        resync(pos_);
        return WarcError{offset, "missing or invalid Content-Length"};
    }
    const std::size_t body_start = pos_;
    if (!ensure(length)) {
        resync(body_start);
        return WarcError{offset, "truncated record body"};
    }
    // Each record ends with two CRLFs.
    ensure(length + 4);
    std::string_view trailer = std::string_view(buf_).substr(body_start + length, 4);
    if (trailer != "\r\n\r\n") {
        resync(body_start);
        return WarcError{offset, "declared Content-Length does not match record boundary"};
    }
    rec.body = buf_.substr(body_start, length);
    pos_ = body_start + length + 4;
    return rec;
}

std::string HttpResponse::header(const std::string& lower_name) const {
    auto it = headers.find(lower_name);
    return it == headers.end() ? std::string() : it->second;
}

std::string decode_chunked(std::string_view body) {
    std::string out;
    std::size_t pos = 0;
    while (pos < body.size()) {
        auto eol = body.find('\n', pos);
        if (eol == std::string_view::npos) break;
        std::string_view size_line = trim(body.substr(pos, eol - pos));
        auto semi = size_line.find(';');
        if (semi != std::string_view::npos) size_line = trim(size_line.substr(0, semi));
        std::size_t size = 0;
        auto [p, ec] = std::from_chars(size_line.data(), size_line.data() + size_line.size(), size, 16);
        if (ec != std::errc() || p != size_line.data() + size_line.size()) break;
        pos = eol + 1;
        if (size == 0) break;
        if (pos + size > body.size()) {
            out.append(body.substr(pos));
            break;
        }
        out.append(body.substr(pos, size));
        pos += size;
        if (body.compare(pos, 2, "\r\n") == 0) {
            pos += 2;
        } else if (pos < body.size() && body[pos] == '\n') {
            pos += 1;
        }
    }
    return out;
}

std::optional<HttpResponse> parse_http_response(std::string_view message) {
    auto eol = message.find('\n');
    std::string_view status_line = trim(message.substr(0, eol));
    if (status_line.rfind("HTTP/", 0) != 0) return std::nullopt;
    HttpResponse r;
    auto sp = status_line.find(' ');
    if (sp == std::string_view::npos) return std::nullopt;
    auto code = trim(status_line.substr(sp + 1, 3));
    auto [p, ec] = std::from_chars(code.data(), code.data() + code.size(), r.status);
    if (ec != std::errc()) return std::nullopt;

    std::size_t pos = eol == std::string_view::npos ? message.size() : eol + 1;
    std::string last;
    while (pos < message.size()) {
        auto next = message.find('\n', pos);
        std::string_view line = message.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos);
        pos = next == std::string_view::npos ? message.size() : next + 1;
        if (trim(line).empty()) break;
        add_header(r.headers, last, line);
    }
    std::string_view payload = message.substr(std::min(pos, message.size()));
    if (lower(r.header("transfer-encoding")).find("chunked") != std::string::npos) {
        r.payload = decode_chunked(payload);
    } else {
        r.payload = std::string(payload);
    }
    return r;
}

}  // namespace refinery::warc
