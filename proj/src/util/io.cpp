#include "refinery/util/io.hpp"

#include <cerrno>
#include <cstdio>
#include <cstring>
#include <vector>

#include <zlib.h>

namespace refinery::util {

namespace fs = std::filesystem;

struct InputFile::Impl {
    gzFile gz = nullptr;
    std::vector<char> buf = std::vector<char>(1 << 16);
    std::size_t pos = 0;
    std::size_t len = 0;
    bool eof = false;

    bool fill() {
        if (eof) return false;
        int n = gzread(gz, buf.data(), static_cast<unsigned>(buf.size()));
        if (n < 0) {
            int err = 0;
            const char* msg = gzerror(gz, &err);
            throw IoError(std::string("read error: ") + (msg ? msg : "unknown"));
        }
        pos = 0;
        len = static_cast<std::size_t>(n);
        if (n == 0) eof = true;
        return n > 0;
    }

    ~Impl() {
        if (gz) gzclose(gz);
    }
};

InputFile::InputFile(const fs::path& path) : impl_(std::make_unique<Impl>()) {
    std::FILE* probe = std::fopen(path.c_str(), "rb");
    if (!probe) throw IoError("cannot open " + path.string() + ": " + std::strerror(errno));
    unsigned char magic[2] = {0, 0};
    std::size_t got = std::fread(magic, 1, 2, probe);
    std::fclose(probe);
    compressed_ = got == 2 && magic[0] == 0x1f && magic[1] == 0x8b;

    impl_->gz = gzopen(path.c_str(), "rb");
    if (!impl_->gz) throw IoError("cannot open " + path.string());
    gzbuffer(impl_->gz, 1 << 17);
}

InputFile::~InputFile() = default;
InputFile::InputFile(InputFile&&) noexcept = default;
InputFile& InputFile::operator=(InputFile&&) noexcept = default;

std::size_t InputFile::read(char* dst, std::size_t max) {
    std::size_t copied = 0;
    while (copied < max) {
        if (impl_->pos == impl_->len && !impl_->fill()) break;
        std::size_t n = std::min(max - copied, impl_->len - impl_->pos);
        std::memcpy(dst + copied, impl_->buf.data() + impl_->pos, n);
        impl_->pos += n;
        copied += n;
    }
    return copied;
}

std::optional<std::string> InputFile::read_line() {
    std::string line;
    bool any = false;
    while (true) {
        if (impl_->pos == impl_->len && !impl_->fill()) {
            if (!any) return std::nullopt;
            return line;
        }
        any = true;
        const char* begin = impl_->buf.data() + impl_->pos;
        const char* end = impl_->buf.data() + impl_->len;
        const char* nl = static_cast<const char*>(std::memchr(begin, '\n', end - begin));
        if (nl) {
            line.append(begin, nl);
            impl_->pos += (nl - begin) + 1;
            return line;
        }
        line.append(begin, end);
        impl_->pos = impl_->len;
    }
}

struct AtomicWriter::Impl {
    std::FILE* plain = nullptr;
    gzFile gz = nullptr;

    void close() {
        if (plain) {
            std::fclose(plain);
            plain = nullptr;
        }
        if (gz) {
            gzclose(gz);
            gz = nullptr;
        }
    }
    ~Impl() { close(); }
};

AtomicWriter::AtomicWriter(fs::path path)
    : impl_(std::make_unique<Impl>()), path_(std::move(path)), partial_(path_.string() + ".partial") {
    if (path_.has_parent_path()) fs::create_directories(path_.parent_path());
    if (path_.extension() == ".gz") {
        // zlib writes a constant gzip header (mtime 0), so output is reproducible.
        impl_->gz = gzopen(partial_.c_str(), "wb6");
        if (!impl_->gz) throw IoError("cannot create " + partial_.string());
    } else {
        impl_->plain = std::fopen(partial_.c_str(), "wb");
        if (!impl_->plain) {
            throw IoError("cannot create " + partial_.string() + ": " + std::strerror(errno));
        }
    }
}

AtomicWriter::~AtomicWriter() {
    if (!committed_) {
        impl_->close();
        std::error_code ec;
        fs::remove(partial_, ec);
    }
}

void AtomicWriter::write(std::string_view bytes) {
    if (bytes.empty()) return;
    if (impl_->plain) {
        if (std::fwrite(bytes.data(), 1, bytes.size(), impl_->plain) != bytes.size()) {
            throw IoError("write failed: " + partial_.string());
        }
    } else {
        int n = gzwrite(impl_->gz, bytes.data(), static_cast<unsigned>(bytes.size()));
        if (n != static_cast<int>(bytes.size())) throw IoError("write failed: " + partial_.string());
    }
}

void AtomicWriter::commit() {
    if (committed_) return;
    bool ok = true;
    if (impl_->plain) {
        ok = std::fflush(impl_->plain) == 0 && std::fclose(impl_->plain) == 0;
        impl_->plain = nullptr;
    } else if (impl_->gz) {
        ok = gzclose(impl_->gz) == Z_OK;
        impl_->gz = nullptr;
    }
    if (!ok) throw IoError("failed to flush " + partial_.string());
    fs::rename(partial_, path_);
    committed_ = true;
}

std::string read_file(const fs::path& path) {
    InputFile in(path);
    std::string out;
    std::vector<char> chunk(1 << 16);
    while (std::size_t n = in.read(chunk.data(), chunk.size())) out.append(chunk.data(), n);
    return out;
}

void write_file_atomic(const fs::path& path, std::string_view bytes) {
    AtomicWriter w(path);
    w.write(bytes);
    w.commit();
}

}  // namespace refinery::util
