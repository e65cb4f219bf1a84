#include "refinery/util/subprocess.hpp"

#include <cerrno>
#include <csignal>
#include <cstring>

#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

extern char** environ;

namespace refinery::util {

LineProcess::LineProcess(std::string command) : command_(std::move(command)) { spawn(); }

LineProcess::~LineProcess() { shutdown(); }

void LineProcess::spawn() {
    // A dead child must surface as a write error, not kill the pipeline.
    std::signal(SIGPIPE, SIG_IGN);

    int in_pipe[2];
    int out_pipe[2];
    if (pipe(in_pipe) != 0) throw SubprocessError(std::string("pipe: ") + std::strerror(errno));
    if (pipe(out_pipe) != 0) {
        close(in_pipe[0]);
        close(in_pipe[1]);
        throw SubprocessError(std::string("pipe: ") + std::strerror(errno));
    }

    posix_spawn_file_actions_t actions;
    posix_spawn_file_actions_init(&actions);
    posix_spawn_file_actions_adddup2(&actions, in_pipe[0], STDIN_FILENO);
    posix_spawn_file_actions_adddup2(&actions, out_pipe[1], STDOUT_FILENO);
    posix_spawn_file_actions_addclose(&actions, in_pipe[1]);
    posix_spawn_file_actions_addclose(&actions, out_pipe[0]);

    const char* argv[] = {"/bin/sh", "-c", command_.c_str(), nullptr};
    pid_t pid = 0;
    int rc = posix_spawn(&pid, "/bin/sh", &actions, nullptr, const_cast<char* const*>(argv), environ);
    posix_spawn_file_actions_destroy(&actions);
    close(in_pipe[0]);
    close(out_pipe[1]);
    if (rc != 0) {
        close(in_pipe[1]);
        close(out_pipe[0]);
        throw SubprocessError("spawn failed for '" + command_ + "': " + std::strerror(rc));
    }
    pid_ = pid;
    to_child_ = in_pipe[1];
    from_child_ = out_pipe[0];
}

void LineProcess::shutdown() noexcept {
    if (to_child_ >= 0) {
        close(to_child_);
        to_child_ = -1;
    }
    if (from_child_ >= 0) {
        close(from_child_);
        from_child_ = -1;
    }
    if (pid_ > 0) {
        int status = 0;
        waitpid(pid_, &status, 0);
        pid_ = -1;
    }
}

std::string LineProcess::request(std::string_view line) {
    if (to_child_ < 0) throw SubprocessError("scorer process is closed: " + command_);
    std::string msg(line);
    msg += '\n';
    std::size_t off = 0;
    while (off < msg.size()) {
        ssize_t n = write(to_child_, msg.data() + off, msg.size() - off);
        if (n < 0) {
            if (errno == EINTR) continue;
            throw SubprocessError("write to '" + command_ + "' failed: " + std::strerror(errno));
        }
        off += static_cast<std::size_t>(n);
    }
    while (true) {
        auto nl = pending_.find('\n');
        if (nl != std::string::npos) {
            std::string reply = pending_.substr(0, nl);
            pending_.erase(0, nl + 1);
            if (!reply.empty() && reply.back() == '\r') reply.pop_back();
            return reply;
        }
        char buf[4096];
        ssize_t n = read(from_child_, buf, sizeof buf);
        if (n < 0) {
            if (errno == EINTR) continue;
            throw SubprocessError("read from '" + command_ + "' failed: " + std::strerror(errno));
        }
        if (n == 0) throw SubprocessError("scorer '" + command_ + "' closed its output");
        pending_.append(buf, static_cast<std::size_t>(n));
    }
}

}  // namespace refinery::util
