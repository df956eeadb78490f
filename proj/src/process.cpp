#include "gitnet/process.hpp"

#include "gitnet/errors.hpp"

#include <cerrno>
#include <csignal>
#include <cstring>

#include <fcntl.h>
#include <poll.h>
#include <sys/wait.h>
#include <unistd.h>

namespace gitnet {

namespace {

[[noreturn]] void exec_child(const std::vector<std::string>& argv, const std::string& cwd)
{
    if (!cwd.empty() && chdir(cwd.c_str()) != 0)
        _exit(127);
    std::vector<char*> args;
    args.reserve(argv.size() + 1);
    for (const auto& a : argv)
        args.push_back(const_cast<char*>(a.c_str()));
    args.push_back(nullptr);
    execvp(args[0], args.data());
    _exit(127);
}

std::string drain(int fd, std::string& sink, char* buf, std::size_t bufsize)
{
    ssize_t n;
    while ((n = read(fd, buf, bufsize)) > 0)
        sink.append(buf, static_cast<std::size_t>(n));
    return sink;
}

} // namespace

ProcessResult run_process(const std::vector<std::string>& argv, const std::string& cwd)
{
    int out_pipe[2], err_pipe[2];
    if (pipe(out_pipe) != 0 || pipe(err_pipe) != 0)
        throw IoFailure("pipe() failed: " + std::string(strerror(errno)));

    const pid_t pid = fork();
    if (pid < 0)
        throw IoFailure("fork() failed: " + std::string(strerror(errno)));
    if (pid == 0) {
        dup2(out_pipe[1], STDOUT_FILENO);
        dup2(err_pipe[1], STDERR_FILENO);
        close(out_pipe[0]);
        close(out_pipe[1]);
        close(err_pipe[0]);
        close(err_pipe[1]);
        // stdin from /dev/null so git never blocks on a prompt
        const int devnull = open("/dev/null", O_RDONLY);
        if (devnull >= 0)
            dup2(devnull, STDIN_FILENO);
        exec_child(argv, cwd);
    }
    close(out_pipe[1]);
    close(err_pipe[1]);

    ProcessResult result;
    char buf[1 << 16];
    struct pollfd fds[2] = {{out_pipe[0], POLLIN, 0}, {err_pipe[0], POLLIN, 0}};
    bool open_out = true, open_err = true;
    while (open_out || open_err) {
        fds[0].fd = open_out ? out_pipe[0] : -1;
        fds[1].fd = open_err ? err_pipe[0] : -1;
        if (poll(fds, 2, -1) < 0) {
            if (errno == EINTR)
                continue;
            break;
        }
        if (open_out && (fds[0].revents & (POLLIN | POLLHUP))) {
            const ssize_t n = read(out_pipe[0], buf, sizeof buf);
            if (n > 0)
                result.out.append(buf, static_cast<std::size_t>(n));
            else
                open_out = false;
        }
        if (open_err && (fds[1].revents & (POLLIN | POLLHUP))) {
            const ssize_t n = read(err_pipe[0], buf, sizeof buf);
            if (n > 0)
                result.err.append(buf, static_cast<std::size_t>(n));
            else
                open_err = false;
        }
    }
    close(out_pipe[0]);
    close(err_pipe[0]);

    int status = 0;
    while (waitpid(pid, &status, 0) < 0 && errno == EINTR) {
    }
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -WTERMSIG(status);
    return result;
}

PipeProcess::PipeProcess(const std::vector<std::string>& argv, const std::string& cwd)
{
    int in_pipe[2], out_pipe[2];
    if (pipe(in_pipe) != 0 || pipe(out_pipe) != 0)
        throw IoFailure("pipe() failed: " + std::string(strerror(errno)));
    const pid_t pid = fork();
    if (pid < 0)
        throw IoFailure("fork() failed: " + std::string(strerror(errno)));
    if (pid == 0) {
        dup2(in_pipe[0], STDIN_FILENO);
        dup2(out_pipe[1], STDOUT_FILENO);
        close(in_pipe[0]);
        close(in_pipe[1]);
        close(out_pipe[0]);
        close(out_pipe[1]);
        exec_child(argv, cwd);
    }
    close(in_pipe[0]);
    close(out_pipe[1]);
    pid_ = pid;
    to_child_ = in_pipe[1];
    from_child_ = out_pipe[0];
}

PipeProcess::~PipeProcess()
{
    if (to_child_ >= 0)
        close(to_child_);
    if (from_child_ >= 0)
        close(from_child_);
    if (pid_ > 0) {
        int status;
        waitpid(pid_, &status, 0);
    }
}

void PipeProcess::write_line(const std::string& line)
{
    std::string data = line + "\n";
    std::size_t written = 0;
    while (written < data.size()) {
        const ssize_t n = write(to_child_, data.data() + written, data.size() - written);
        if (n < 0) {
            if (errno == EINTR)
                continue;
            throw IoFailure("write to child failed: " + std::string(strerror(errno)));
        }
        written += static_cast<std::size_t>(n);
    }
}

bool PipeProcess::fill_buffer()
{
    if (buffer_pos_ > 0) {
        buffer_.erase(0, buffer_pos_);
        buffer_pos_ = 0;
    }
    char buf[1 << 16];
    const ssize_t n = read(from_child_, buf, sizeof buf);
    if (n <= 0)
        return false;
    buffer_.append(buf, static_cast<std::size_t>(n));
    return true;
}

bool PipeProcess::read_line(std::string& line)
{
    for (;;) {
        const auto nl = buffer_.find('\n', buffer_pos_);
        if (nl != std::string::npos) {
            line.assign(buffer_, buffer_pos_, nl - buffer_pos_);
            buffer_pos_ = nl + 1;
            return true;
        }
        if (!fill_buffer())
            return false;
    }
}

std::string PipeProcess::read_exact(std::size_t n)
{
    while (buffer_.size() - buffer_pos_ < n) {
        if (!fill_buffer())
            throw IoFailure("child process closed pipe mid-record");
    }
    std::string out = buffer_.substr(buffer_pos_, n);
    buffer_pos_ += n;
    return out;
}

} // namespace gitnet
