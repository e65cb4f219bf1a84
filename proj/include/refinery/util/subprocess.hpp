#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace refinery::util {

class SubprocessError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A long-lived child process (`/bin/sh -c <command>`) driven by a
// line-oriented request/response protocol: each request() writes one line to
// the child's stdin and blocks for one line on its stdout.
class LineProcess {
public:
    explicit LineProcess(std::string command);
    ~LineProcess();
    LineProcess(const LineProcess&) = delete;
    LineProcess& operator=(const LineProcess&) = delete;

    // `line` must not contain '\n'. Throws SubprocessError if the child has
    // exited or closed its output.
    std::string request(std::string_view line);

    const std::string& command() const noexcept { return command_; }

private:
    void spawn();
    void shutdown() noexcept;

    std::string command_;
    int pid_ = -1;
    int to_child_ = -1;
    int from_child_ = -1;
    std::string pending_;
};

}  // namespace refinery::util
